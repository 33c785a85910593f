from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, Union

from mpmath import mp, mpc, mpf

from .results import AlgebraError

Scalar = Union[Fraction, mpf, mpc]

ZERO = Fraction(0)
ONE = Fraction(1)


def exact(value: Any) -> Fraction:
    """Coerce ints, rational strings ("1/3", "-2") and Fractions to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise AlgebraError("invalid_input", f"not an exact rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise AlgebraError("invalid_input", f"not an exact rational: {value!r}") from exc
    raise AlgebraError("invalid_input", f"not an exact rational: {value!r}")


def is_big(value: Any) -> bool:
    return isinstance(value, (mpf, mpc))


def to_big(value: Any) -> Scalar:
    if isinstance(value, (mpf, mpc)):
        return value
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, int):
        return mpf(value)
    return mp.mpmathify(value)


def _mix(a: Any, b: Any) -> tuple[Any, Any]:
    # Fraction and mpf refuse each other's operators; ints mix with both
    if isinstance(a, Fraction) and is_big(b):
        return to_big(a), b
    if isinstance(b, Fraction) and is_big(a):
        return a, to_big(b)
    return a, b


def sadd(a: Any, b: Any) -> Scalar:
    a, b = _mix(a, b)
    return a + b


def ssub(a: Any, b: Any) -> Scalar:
    a, b = _mix(a, b)
    return a - b


def smul(a: Any, b: Any) -> Scalar:
    a, b = _mix(a, b)
    return a * b


def sdiv(a: Any, b: Any) -> Scalar:
    a, b = _mix(a, b)
    if b == 0:
        raise ZeroDivisionError("division by zero scalar")
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def normalize(value: Any) -> Scalar:
    if isinstance(value, bool):
        raise AlgebraError("invalid_input", f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, mpf, mpc)):
        return value
    if isinstance(value, str):
        return exact(value)
    return mp.mpmathify(value)


def magnitude(value: Any) -> mpf:
    return abs(to_big(value))


def is_negligible(value: Any, tol: Any = None) -> bool:
    if value == 0:
        return True
    if tol is None or not is_big(value):
        return False
    return abs(value) <= tol


def tolerance(digits: int) -> mpf:
    return mpf(10) ** (-digits)


def as_real(value: Any, tol: Any) -> Scalar:
    if isinstance(value, mpc) and abs(value.imag) <= tol:
        return value.real
    return value


def snap_rational(value: Any, tol: Any, max_denominator: int = 10**12) -> Fraction | None:
    """Nearest small-denominator rational within tol of value, or None."""
    if isinstance(value, Fraction):
        return value
    value = to_big(value)
    if isinstance(value, mpc):
        if abs(value.imag) > tol:
            return None
        value = value.real
    candidate = Fraction(mp.nstr(value, mp.dps, min_fixed=-10**9, max_fixed=10**9)).limit_denominator(max_denominator)
    if abs(to_big(candidate) - value) > tol:
        return None
    return candidate


def pochhammer(a: Any, k: int) -> Scalar:
    """Rising factorial a(a+1)...(a+k-1); 1 when k == 0."""
    if k < 0:
        raise AlgebraError("invalid_input", "pochhammer needs k >= 0")
    a = normalize(a)
    out: Scalar = to_big(ONE) if is_big(a) else ONE
    for step in range(k):
        out = out * (a + step)
    return out


def scalar_payload(value: Any, digits: int | None = None) -> Dict[str, str]:
    value = normalize(value)
    if isinstance(value, Fraction):
        return {"num": str(value.numerator), "den": str(value.denominator)}
    shown = digits or mp.dps
    if isinstance(value, mpc):
        return {"re": mp.nstr(value.real, shown), "im": mp.nstr(value.imag, shown)}
    return {"re": mp.nstr(value, shown), "im": "0"}


def scalar_from_payload(payload: Dict[str, str]) -> Scalar:
    if "num" in payload:
        return Fraction(int(payload["num"]), int(payload["den"]))
    re_part = mpf(payload["re"])
    im_part = mpf(payload.get("im", "0"))
    if im_part == 0:
        return re_part
    return mpc(re_part, im_part)


def format_scalar(value: Any, digits: int = 20) -> str:
    value = normalize(value)
    if isinstance(value, Fraction):
        return str(value)
    return mp.nstr(value, digits)
