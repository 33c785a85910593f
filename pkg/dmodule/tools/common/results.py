from __future__ import annotations

from typing import Any, Dict

from pydantic import ValidationError


ERROR_MESSAGES: Dict[str, str] = {
    "invalid_input": "Input is not valid for this operation.",
    "syntax_error": "Operator text does not match the grammar.",
    "unbound_identifier": "Operator text uses an identifier with no bound value.",
    "pair_mismatch": "Operators belong to different generator pairs.",
    "not_monic": "Divisor is not monic under the requested order.",
    "order_mismatch": "Operator does not have the required order.",
    "not_divisible": "Leading coefficient is not divisible by the divisor's leading coefficient.",
    "not_graded": "Operator is not expressible in the graded basis.",
    "no_roots": "No roots of the zero polynomial.",
    "no_convergence": "Root finder did not converge.",
    "resonant_root": "Resonant root, double-root case out of scope.",
    "not_immediate": "Remainder map not immediate at this configuration.",
    "invariance_violated": "Polynomial subspace is not invariant under the remainder map.",
    "constraint_violated": "Parameters violate the operator constraint.",
    "defective_eigenvalue": "No eigenvector found at tolerance.",
    "degenerate_factor": "Degenerate factor, X∂+γ−γ not invertible-normalizable.",
    "domain_too_small": "Function table is too narrow for the operator's shifts.",
    "non_invertible_substitution": "Substitution is not an invertible affine change of generators.",
    "verification_failed": "Re-multiplication check failed.",
    "policy_denied": "Request exceeds the configured limits.",
    "internal_error": "Unexpected internal error.",
}

# codes the CLI reports with exit status 2
USAGE_CODES = frozenset(
    {"invalid_input", "syntax_error", "unbound_identifier", "constraint_violated", "policy_denied"}
)


class AlgebraError(Exception):
    def __init__(self, code: str, message: str | None = None):
        self.code = code
        self.message = message or ERROR_MESSAGES.get(code, "Operation failed.")
        super().__init__(self.message)


def success(**data: Any) -> Dict[str, Any]:
    return {"ok": True, **data}


def error(code: str, message: str | None = None, **data: Any) -> Dict[str, Any]:
    return {
        "ok": False,
        "error": {
            "code": code,
            "message": message or ERROR_MESSAGES.get(code, "Operation failed."),
        },
        **data,
    }


def from_exception(exc: Exception, default_code: str = "internal_error", **data: Any) -> Dict[str, Any]:
    if isinstance(exc, AlgebraError):
        return error(exc.code, exc.message, **data)
    if isinstance(exc, ValidationError):
        return error("invalid_input", str(exc), **data)
    if isinstance(exc, ZeroDivisionError):
        return error("invalid_input", str(exc) or "division by zero", **data)
    if isinstance(exc, ValueError):
        return error("invalid_input", str(exc), **data)
    return error(default_code, str(exc) or None, **data)
