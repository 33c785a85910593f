from typing import Any, Mapping

from . import config

POLICY_PROFILE_NAME = "desk-scale-v1"

# payload keys checked against each ceiling
_PRECISION_KEYS = ("precision",)
_DIGITS_KEYS = ("digits",)
_DIMENSION_KEYS = ("n", "dimension")
_SIZE_KEYS = ("precision", "digits", "n", "dimension", "x", "stop", "bessel")


def _as_int(value: Any) -> int | None:
    if isinstance(value, bool) or value is None:
        return None
    if isinstance(value, int):
        return value
    return None


def check_request_policy(command: str, payload: Mapping[str, Any] | None) -> tuple[bool, str | None]:
    payload = payload or {}

    for key in _SIZE_KEYS:
        value = _as_int(payload.get(key))
        if value is not None and value < 0:
            return False, f"{key} must be nonnegative for {command}"

    for key in _PRECISION_KEYS:
        value = _as_int(payload.get(key))
        if value is not None and value > config.MAX_PRECISION:
            return False, f"{key} exceeds maximum policy limit ({config.MAX_PRECISION})"

    for key in _DIGITS_KEYS:
        value = _as_int(payload.get(key))
        if value is not None and value > config.MAX_DIGITS:
            return False, f"{key} exceeds maximum policy limit ({config.MAX_DIGITS})"

    if command == "heun-eigen":
        for key in _DIMENSION_KEYS:
            value = _as_int(payload.get(key))
            if value is not None and value + 1 > config.MAX_DIMENSION:
                return False, f"matrix dimension {value + 1} exceeds maximum policy limit ({config.MAX_DIMENSION})"

    return True, None


def policy_denied_response(command: str, reason: str) -> dict[str, Any]:
    return {
        "ok": False,
        "error": {"code": "policy_denied", "message": reason},
        "command": command,
        "policy_profile": POLICY_PROFILE_NAME,
    }
