from __future__ import annotations

from collections import Counter, deque
from copy import deepcopy
from datetime import datetime, timezone
import json
import logging
from pathlib import Path
import threading
from typing import Any, Deque, Dict

from . import config

logger = logging.getLogger(__name__)

_HISTORY_MAX = 500
_TRACE_MAX = 2000
_COEFFICIENTS_KEPT = 8

_LOCK = threading.Lock()
_COMMAND_HISTORY: Deque[Dict[str, Any]] = deque(maxlen=_HISTORY_MAX)
_ITERATION_TRACE: Deque[Dict[str, Any]] = deque(maxlen=_TRACE_MAX)
_ERROR_COUNTERS: Counter[str] = Counter()


def _now() -> str:
    return datetime.now(timezone.utc).replace(tzinfo=None).isoformat() + "Z"


def truncate_text(value: str, max_chars: int = 1500) -> str:
    if len(value) > max_chars:
        return f"{value[:max_chars]}...[TRUNCATED]"
    return value


def _sanitize_value(value: Any, key: str | None = None) -> Any:
    if isinstance(value, dict):
        return {k: _sanitize_value(v, k) for k, v in value.items()}
    if isinstance(value, list):
        if key == "coefficients" and len(value) > _COEFFICIENTS_KEPT:
            head = [_sanitize_value(v) for v in value[:_COEFFICIENTS_KEPT]]
            return head + [{"omitted": len(value) - _COEFFICIENTS_KEPT}]
        return [_sanitize_value(v, key) for v in value]
    if isinstance(value, str):
        if key in {"operator", "message"}:
            return truncate_text(value, max_chars=4000)
        return truncate_text(value)
    if isinstance(value, (int, float, bool)) or value is None:
        return value
    return truncate_text(str(value))


def _append_journal(entry: Dict[str, Any]) -> None:
    path = config.JOURNAL_PATH
    if not path:
        return
    try:
        with Path(path).open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry, sort_keys=True) + "\n")
    except OSError as exc:
        logger.warning("journal %s not writable: %s", path, exc)


def record_command(name: str, payload: Dict[str, Any] | None, response: Dict[str, Any]) -> None:
    ok = bool(response.get("ok", True))
    error_value = response.get("error")
    if isinstance(error_value, dict):
        error_value = error_value.get("code")
    error_key = "none" if ok else str(error_value or "unknown_error")

    entry = {
        "timestamp": _now(),
        "name": name,
        "ok": ok,
        "request": _sanitize_value(payload or {}),
        "response": _sanitize_value(response),
    }

    with _LOCK:
        _COMMAND_HISTORY.appendleft(entry)
        if not ok:
            _ERROR_COUNTERS[error_key] += 1
    _append_journal(entry)


def record_iteration(label: str, step: int, valuation: Any) -> None:
    entry = {"timestamp": _now(), "label": label, "step": step, "valuation": str(valuation)}
    with _LOCK:
        _ITERATION_TRACE.appendleft(entry)


def _page(source: Deque[Dict[str, Any]], offset: int, limit: int) -> Dict[str, Any]:
    safe_offset = max(offset, 0)
    safe_limit = max(1, min(limit, 100))
    with _LOCK:
        items = list(source)
    total = len(items)
    sliced = items[safe_offset : safe_offset + safe_limit]
    return {"total": total, "offset": safe_offset, "limit": safe_limit, "items": deepcopy(sliced)}


def get_command_history(offset: int = 0, limit: int = 20) -> Dict[str, Any]:
    return _page(_COMMAND_HISTORY, offset, limit)


def get_iteration_trace(offset: int = 0, limit: int = 20) -> Dict[str, Any]:
    return _page(_ITERATION_TRACE, offset, limit)


def get_error_counters() -> Dict[str, int]:
    with _LOCK:
        return dict(_ERROR_COUNTERS)


def reset() -> None:
    with _LOCK:
        _COMMAND_HISTORY.clear()
        _ITERATION_TRACE.clear()
        _ERROR_COUNTERS.clear()
