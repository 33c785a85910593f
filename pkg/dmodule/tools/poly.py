from __future__ import annotations

import logging
import math
import random
from fractions import Fraction
from typing import Any, Iterable, Iterator, List, Sequence, Tuple

from mpmath import mp, mpc, mpf

from .. import config
from .common.results import AlgebraError
from .common.scalars import (
    Scalar,
    as_real,
    format_scalar,
    is_big,
    magnitude,
    normalize,
    sadd,
    sdiv,
    smul,
    snap_rational,
    ssub,
    to_big,
    tolerance,
)

logger = logging.getLogger(__name__)


def _clean(coeffs: Iterable[Any]) -> Tuple[Scalar, ...]:
    items = [normalize(c) for c in coeffs]
    if any(is_big(c) for c in items):
        items = [to_big(c) for c in items]
    while items and items[-1] == 0:
        items.pop()
    return tuple(items)


class Poly:
    """Dense univariate polynomial over Scalar, lowest degree first."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[Any] = (), var: str = "x"):
        self.coeffs = _clean(coeffs)
        self.var = var

    @classmethod
    def constant(cls, value: Any, var: str = "x") -> "Poly":
        return cls([value], var)

    @classmethod
    def monomial(cls, power: int, coeff: Any = 1, var: str = "x") -> "Poly":
        return cls([0] * power + [coeff], var)

    @classmethod
    def from_roots(cls, roots: Sequence[Any], var: str = "x") -> "Poly":
        out = cls([1], var)
        for root in roots:
            out = out * cls([smul(-1, normalize(root)), 1], var)
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_big(self) -> bool:
        return any(is_big(c) for c in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, power: int) -> Scalar:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def items(self) -> Iterator[Tuple[int, Scalar]]:
        for power, coeff in enumerate(self.coeffs):
            if coeff != 0:
                yield power, coeff

    def valuation(self) -> int | float:
        for power, coeff in enumerate(self.coeffs):
            if coeff != 0:
                return power
        return math.inf

    def _coerce(self, other: Any) -> "Poly":
        if isinstance(other, Poly):
            if other.var != self.var and self.degree > 0 and other.degree > 0:
                raise AlgebraError("invalid_input", f"polynomials in {self.var} and {other.var} do not mix")
            return other
        return Poly([other], self.var)

    def _var_with(self, other: "Poly") -> str:
        return self.var if self.degree > 0 or other.degree <= 0 else other.var

    def __add__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return Poly([sadd(self[k], other[k]) for k in range(size)], self._var_with(other))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return Poly([ssub(self[k], other[k]) for k in range(size)], self._var_with(other))

    def __rsub__(self, other: Any) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "Poly":
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return Poly([], self._var_with(other))
        out: List[Any] = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = sadd(out[i + j], smul(a, b))
        return Poly(out, self._var_with(other))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise AlgebraError("invalid_input", "negative polynomial power")
        result = Poly([1], self.var)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __call__(self, point: Any) -> Scalar:
        acc: Any = Fraction(0)
        for coeff in reversed(self.coeffs):
            acc = sadd(smul(acc, point), coeff)
        return acc

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            if self.coeffs != other.coeffs:
                return False
            return self.degree <= 0 or self.var == other.var
        if isinstance(other, (int, Fraction, mpf, mpc)):
            return self.coeffs == Poly([other], self.var).coeffs
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def divmod(self, divisor: "Poly") -> Tuple["Poly", "Poly"]:
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise AlgebraError("invalid_input", "division by zero polynomial")
        dd = divisor.degree
        if self.degree < dd:
            return Poly([], self.var), self
        rem: List[Any] = list(self.coeffs)
        quot: List[Any] = [Fraction(0)] * (self.degree - dd + 1)
        lead = divisor.leading()
        for k in range(self.degree - dd, -1, -1):
            c = sdiv(rem[k + dd], lead)
            quot[k] = c
            if c == 0:
                continue
            for j in range(dd):
                rem[k + j] = ssub(rem[k + j], smul(c, divisor.coeffs[j]))
            rem[k + dd] = Fraction(0)
        return Poly(quot, self.var), Poly(rem[:dd], self.var)

    def __floordiv__(self, divisor: Any) -> "Poly":
        return self.divmod(self._coerce(divisor))[0]

    def __mod__(self, divisor: Any) -> "Poly":
        return self.divmod(self._coerce(divisor))[1]

    def exact_divide(self, divisor: "Poly") -> "Poly":
        quotient, remainder = self.divmod(divisor)
        if not remainder.is_zero():
            raise AlgebraError("not_divisible", f"{divisor.format()} does not divide {self.format()}")
        return quotient

    def gcd(self, other: "Poly") -> "Poly":
        if self.is_big or other.is_big:
            raise AlgebraError("invalid_input", "gcd needs exact coefficients")
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(sdiv(1, self.leading()))

    def scale(self, factor: Any) -> "Poly":
        return Poly([smul(factor, c) for c in self.coeffs], self.var)

    def derivative(self) -> "Poly":
        return Poly([smul(k, c) for k, c in enumerate(self.coeffs)][1:], self.var)

    def shift(self, power: int) -> "Poly":
        """Multiply by var**power."""
        if self.is_zero():
            return self
        return Poly([0] * power + list(self.coeffs), self.var)

    def truncate(self, size: int) -> "Poly":
        return Poly(self.coeffs[:size], self.var)

    def to_big(self) -> "Poly":
        return Poly([to_big(c) for c in self.coeffs], self.var)

    def with_var(self, var: str) -> "Poly":
        return Poly(self.coeffs, var)

    def max_norm(self) -> mpf:
        return max((magnitude(c) for c in self.coeffs), default=mpf(0))

    def format(self, digits: int = 20) -> str:
        if self.is_zero():
            return "0"
        parts: List[str] = []
        for power in range(len(self.coeffs) - 1, -1, -1):
            coeff = self.coeffs[power]
            if coeff == 0:
                continue
            text = format_scalar(coeff, digits)
            negative = text.startswith("-")
            body = text[1:] if negative else text
            if "/" in body or "+" in body or "e" in body:
                body = f"({body})"
            if power == 0:
                term = body
            else:
                mono = self.var if power == 1 else f"{self.var}^{power}"
                term = mono if body == "1" else f"{body}*{mono}"
            if not parts:
                parts.append(f"-{term}" if negative else term)
            else:
                parts.append(f"- {term}" if negative else f"+ {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self.format()})"


class RationalFunction:
    """Quotient of polynomials in one variable with a monic, coprime denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Any, den: Any = None, var: str = "x"):
        if not isinstance(num, Poly):
            num = Poly([num], var)
        if den is None:
            den = Poly([1], num.var)
        elif not isinstance(den, Poly):
            den = Poly([den], num.var)
        if den.is_zero():
            raise AlgebraError("invalid_input", "zero denominator")
        if num.is_zero():
            den = Poly([1], num.var)
        elif den.degree > 0 and not (num.is_big or den.is_big):
            common = num.gcd(den)
            if common.degree > 0:
                num = num.exact_divide(common)
                den = den.exact_divide(common)
        lead = den.leading()
        if lead != 1:
            num = num.scale(sdiv(1, lead))
            den = den.scale(sdiv(1, lead))
        self.num = num
        self.den = den

    @property
    def var(self) -> str:
        return self.num.var if self.num.degree > 0 else self.den.var

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def _coerce(self, other: Any) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        return RationalFunction(Poly([other], self.var))

    def __add__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: Any) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other.is_zero():
            raise AlgebraError("invalid_input", "division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, point: Any) -> Scalar:
        return sdiv(self.num(point), self.den(point))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (RationalFunction, Poly, int, Fraction)):
            other = self._coerce(other)
            return (self.num * other.den) == (other.num * self.den)
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def format(self) -> str:
        if self.den.degree == 0:
            return self.num.format()
        return f"({self.num.format()})/({self.den.format()})"

    def __repr__(self) -> str:
        return f"RationalFunction({self.format()})"


def _durand_kerner(coeffs: List[Any]) -> List[Scalar]:
    maxsteps = config.ROOT_MAXSTEPS
    extraprec = config.ROOT_EXTRAPREC
    rng = random.Random(len(coeffs))
    init = None
    for attempt in range(config.ROOT_RETRIES):
        try:
            return list(mp.polyroots(coeffs, maxsteps=maxsteps, extraprec=extraprec, roots_init=init))
        except mp.NoConvergence:
            logger.warning("root finder stalled on degree %d (attempt %d), restarting", len(coeffs) - 1, attempt + 1)
            maxsteps *= 2
            extraprec *= 2
            init = [mpc(0.4, 0.9) ** k * (1 + mpf(rng.random()) / 1000) for k in range(len(coeffs) - 1)]
    raise AlgebraError("no_convergence", f"root finder failed after {config.ROOT_RETRIES} attempts")


def squarefree_factors(p: Poly) -> List[Tuple[Poly, int]]:
    """Yun decomposition: pairwise coprime squarefree factors of an exact p with their multiplicities."""
    if p.is_big:
        raise AlgebraError("invalid_input", "squarefree split needs exact coefficients")
    if p.degree <= 0:
        return []
    out: List[Tuple[Poly, int]] = []
    slope = p.derivative()
    common = p.gcd(slope)
    rest = p.exact_divide(common)
    excess = slope.exact_divide(common) - rest.derivative()
    mult = 1
    while rest.degree > 0:
        factor = rest.gcd(excess)
        rest = rest.exact_divide(factor)
        excess = excess.exact_divide(factor) - rest.derivative()
        if factor.degree > 0:
            out.append((factor, mult))
        mult += 1
    return out


def poly_roots(p: Poly, digits: int | None = None) -> List[Scalar]:
    """All deg(p) roots with multiplicity as big-floats; real roots come back as mpf."""
    if p.is_zero():
        raise AlgebraError("no_roots")
    if p.is_big or p.degree <= 1:
        return _numeric_roots(p, digits)
    out: List[Scalar] = []
    for factor, mult in squarefree_factors(p):
        out.extend(_numeric_roots(factor, digits) * mult)
    return out


def _numeric_roots(p: Poly, digits: int | None) -> List[Scalar]:
    digits = digits or config.DEFAULT_DIGITS
    low = int(p.valuation())
    core = list(p.coeffs[low:])
    with mp.workdps(digits + config.ROOT_GUARD_DIGITS):
        roots: List[Scalar] = [mpf(0)] * low
        if len(core) == 1:
            return roots
        coeffs = [to_big(c) for c in reversed(core)]
        if len(coeffs) == 2:
            return roots + [-coeffs[1] / coeffs[0]]
        tol = tolerance(digits)
        found = _durand_kerner(coeffs)
        return roots + [as_real(r, tol * max(1, abs(r))) for r in found]


def rational_root(p: Poly, approx: Any, digits: int | None = None) -> Fraction | None:
    """Exact rational root near approx, verified by exact evaluation."""
    if p.is_big:
        return None
    digits = digits or config.DEFAULT_DIGITS
    with mp.workdps(digits + config.ROOT_GUARD_DIGITS):
        tol = tolerance(max(8, digits // 2)) * max(1, magnitude(approx))
        candidate = snap_rational(approx, tol)
    if candidate is not None and p(candidate) == 0:
        return candidate
    return None


def roots_exact_first(p: Poly, digits: int | None = None) -> List[Scalar]:
    """poly_roots, with every root that is exactly rational replaced by its Fraction.

    Exact input is split into squarefree factors first, so repeated roots keep
    their multiplicity and linear factors never reach the numeric finder.
    """
    if p.is_zero():
        raise AlgebraError("no_roots")
    if p.is_big:
        return poly_roots(p, digits)
    out: List[Scalar] = []
    for factor, mult in squarefree_factors(p):
        if factor.degree == 1:
            found: List[Scalar] = [sdiv(-factor.coeffs[0], factor.coeffs[1])]
        else:
            found = []
            for approx in _numeric_roots(factor, digits):
                snapped = rational_root(factor, approx, digits)
                found.append(snapped if snapped is not None else approx)
        out.extend(found * mult)
    return out
