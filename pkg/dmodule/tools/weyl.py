from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .. import config
from .common.results import AlgebraError
from .common.scalars import (
    Scalar,
    exact,
    format_scalar,
    is_big,
    magnitude,
    normalize,
    sadd,
    sdiv,
    smul,
    ssub,
    to_big,
    tolerance,
)
from .poly import Poly

logger = logging.getLogger(__name__)

Key = Tuple[int, int]

MODES = ("standard", "dual", "graded")


@dataclass(frozen=True)
class GeneratorPair:
    """Generators with [lower, raise] = commutator; normal order keeps lower on the right."""

    raise_sym: str
    lower_sym: str
    commutator: Fraction

    def __post_init__(self) -> None:
        value = exact(self.commutator)
        if value == 0:
            raise AlgebraError("invalid_input", "generator pair needs a nonzero commutator")
        object.__setattr__(self, "commutator", value)

    @property
    def shift(self) -> Fraction:
        # G*E = E*(G + shift) for G = raise*lower
        return self.commutator

    def swapped(self) -> "GeneratorPair":
        return GeneratorPair(self.lower_sym, self.raise_sym, -self.commutator)

    def describe(self) -> str:
        return f"({self.raise_sym}, {self.lower_sym})"


XD = GeneratorPair("X", "D", 1)
# A = D + X, ADAG = D - X
AA = GeneratorPair("ADAG", "A", -2)


@lru_cache(maxsize=4096)
def _ordering_coefficient(m: int, n: int, k: int) -> int:
    return math.factorial(k) * math.comb(m, k) * math.comb(n, k)


class WeylOp:
    """Normal-ordered sum of coeff * raise^i * lower^j over one generator pair."""

    __slots__ = ("pair", "terms")

    def __init__(self, pair: GeneratorPair, terms: Optional[Mapping[Key, Any]] = None):
        cleaned: Dict[Key, Scalar] = {}
        for (i, j), coeff in (terms or {}).items():
            if i < 0 or j < 0:
                raise AlgebraError("invalid_input", "negative generator power")
            coeff = normalize(coeff)
            if coeff != 0:
                cleaned[(i, j)] = coeff
        if any(is_big(c) for c in cleaned.values()):
            cleaned = {key: to_big(c) for key, c in cleaned.items()}
        self.pair = pair
        self.terms = cleaned

    @classmethod
    def zero(cls, pair: GeneratorPair) -> "WeylOp":
        return cls(pair)

    @classmethod
    def scalar(cls, pair: GeneratorPair, value: Any) -> "WeylOp":
        return cls(pair, {(0, 0): value})

    @classmethod
    def monomial(cls, pair: GeneratorPair, i: int, j: int, coeff: Any = 1) -> "WeylOp":
        return cls(pair, {(i, j): coeff})

    @classmethod
    def raising(cls, pair: GeneratorPair, power: int = 1) -> "WeylOp":
        return cls(pair, {(power, 0): 1})

    @classmethod
    def lowering(cls, pair: GeneratorPair, power: int = 1) -> "WeylOp":
        return cls(pair, {(0, power): 1})

    @classmethod
    def grade(cls, pair: GeneratorPair) -> "WeylOp":
        return cls(pair, {(1, 1): 1})

    @classmethod
    def from_poly(cls, pair: GeneratorPair, p: Poly, side: str = "raise") -> "WeylOp":
        if side == "raise":
            return cls(pair, {(k, 0): c for k, c in p.items()})
        return cls(pair, {(0, k): c for k, c in p.items()})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_big(self) -> bool:
        return any(is_big(c) for c in self.terms.values())

    @property
    def raise_degree(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    @property
    def lower_degree(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def coefficient(self, i: int, j: int) -> Scalar:
        return self.terms.get((i, j), Fraction(0))

    def items(self) -> Iterator[Tuple[Key, Scalar]]:
        for key in sorted(self.terms, key=lambda k: (-(k[0] + k[1]), -k[1], -k[0])):
            yield key, self.terms[key]

    def raise_poly(self) -> Poly:
        if any(j for _, j in self.terms):
            raise AlgebraError("invalid_input", f"{self.format()} is not a polynomial in {self.pair.raise_sym}")
        return Poly([self.coefficient(i, 0) for i in range(self.raise_degree + 1)], self.pair.raise_sym)

    def lower_poly(self) -> Poly:
        if any(i for i, _ in self.terms):
            raise AlgebraError("invalid_input", f"{self.format()} is not a polynomial in {self.pair.lower_sym}")
        return Poly([self.coefficient(0, j) for j in range(self.lower_degree + 1)], self.pair.lower_sym)

    def _coerce(self, other: Any) -> "WeylOp":
        if isinstance(other, WeylOp):
            if other.pair != self.pair:
                raise AlgebraError("pair_mismatch", f"{self.pair.describe()} and {other.pair.describe()}")
            return other
        if isinstance(other, Poly):
            return WeylOp.from_poly(self.pair, other)
        return WeylOp.scalar(self.pair, other)

    def __add__(self, other: Any) -> "WeylOp":
        other = self._coerce(other)
        merged: Dict[Key, Any] = dict(self.terms)
        for key, coeff in other.terms.items():
            merged[key] = sadd(merged.get(key, 0), coeff)
        return WeylOp(self.pair, merged)

    __radd__ = __add__

    def __neg__(self) -> "WeylOp":
        return WeylOp(self.pair, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other: Any) -> "WeylOp":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "WeylOp":
        return self._coerce(other) - self

    def scale(self, factor: Any) -> "WeylOp":
        return WeylOp(self.pair, {key: smul(factor, c) for key, c in self.terms.items()})

    def __mul__(self, other: Any) -> "WeylOp":
        if isinstance(other, WeylOp):
            return weyl_mul(self, other)
        if isinstance(other, Poly):
            return weyl_mul(self, WeylOp.from_poly(self.pair, other))
        return self.scale(other)

    def __rmul__(self, other: Any) -> "WeylOp":
        if isinstance(other, Poly):
            return weyl_mul(WeylOp.from_poly(self.pair, other), self)
        return self.scale(other)

    def __pow__(self, exponent: int) -> "WeylOp":
        if exponent < 0:
            raise AlgebraError("invalid_input", "negative operator power")
        result = WeylOp.scalar(self.pair, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = weyl_mul(result, base)
            base = weyl_mul(base, base)
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, WeylOp):
            return self.pair == other.pair and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == WeylOp.scalar(self.pair, other).terms
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def to_big(self) -> "WeylOp":
        return WeylOp(self.pair, {key: to_big(c) for key, c in self.terms.items()})

    def max_norm(self) -> Any:
        return max((magnitude(c) for c in self.terms.values()), default=magnitude(0))

    def format(self, digits: int = 20) -> str:
        if not self.terms:
            return "0"
        out: List[str] = []
        for (i, j), coeff in self.items():
            factors = []
            if i:
                factors.append(self.pair.raise_sym if i == 1 else f"{self.pair.raise_sym}^{i}")
            if j:
                factors.append(self.pair.lower_sym if j == 1 else f"{self.pair.lower_sym}^{j}")
            text = format_scalar(coeff, digits)
            negative = text.startswith("-")
            body = text[1:] if negative else text
            if factors:
                if body != "1":
                    factors.insert(0, body)
                body = "*".join(factors)
            if not out:
                out.append(f"-{body}" if negative else body)
            else:
                out.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(out)

    def __repr__(self) -> str:
        return f"WeylOp{self.pair.describe()}[{self.format()}]"


def weyl_mul(a: WeylOp, b: WeylOp) -> WeylOp:
    """Normal-ordered product via lower^m raise^n = sum_k k! C(m,k) C(n,k) c^k raise^(n-k) lower^(m-k)."""
    if a.pair != b.pair:
        raise AlgebraError("pair_mismatch", f"{a.pair.describe()} and {b.pair.describe()}")
    c = a.pair.commutator
    out: Dict[Key, Any] = {}
    for (i, j), ca in a.terms.items():
        for (k, l), cb in b.terms.items():
            base = smul(ca, cb)
            for t in range(min(j, k) + 1):
                key = (i + k - t, j - t + l)
                weight = _ordering_coefficient(j, k, t) * c**t
                out[key] = sadd(out.get(key, 0), smul(base, weight))
    return WeylOp(a.pair, out)


def commutator(a: WeylOp, b: WeylOp) -> WeylOp:
    return weyl_mul(a, b) - weyl_mul(b, a)


def normal_form(pair: GeneratorPair, words: Iterable[Tuple[Any, Sequence[str]]]) -> WeylOp:
    """Sum of coeff * (product of generator symbols in written order), normal-ordered."""
    letters = {pair.raise_sym: WeylOp.raising(pair), pair.lower_sym: WeylOp.lowering(pair)}
    out = WeylOp.zero(pair)
    for coeff, word in words:
        term = WeylOp.scalar(pair, coeff)
        for symbol in word:
            if symbol not in letters:
                raise AlgebraError("invalid_input", f"{symbol} is not a generator of {pair.describe()}")
            term = weyl_mul(term, letters[symbol])
        out = out + term
    return out


def swap_pair(op: WeylOp) -> WeylOp:
    """Rewrite op over the swapped pair, where the old raise generator is rightmost."""
    target = op.pair.swapped()
    out = WeylOp.zero(target)
    for (i, j), coeff in op.terms.items():
        out = out + weyl_mul(WeylOp.monomial(target, 0, i), WeylOp.monomial(target, j, 0)).scale(coeff)
    return out


# graded form: op = sum_d raise^d * q_d(G), G = raise*lower


def to_graded(op: WeylOp) -> Dict[int, Poly]:
    shift = op.pair.shift
    forms: Dict[int, Poly] = {}
    for (i, j), coeff in op.terms.items():
        if i < j:
            raise AlgebraError(
                "not_graded",
                f"term {op.pair.raise_sym}^{i}*{op.pair.lower_sym}^{j} needs negative powers of {op.pair.raise_sym}",
            )
        # raise^j lower^j = G(G - s)...(G - (j-1)s)
        piece = Poly.from_roots([k * shift for k in range(j)], "G").scale(coeff)
        forms[i - j] = forms.get(i - j, Poly([], "G")) + piece
    return {d: p for d, p in forms.items() if not p.is_zero()}


def grade_poly_op(pair: GeneratorPair, p: Poly) -> WeylOp:
    out = WeylOp.zero(pair)
    power = WeylOp.scalar(pair, 1)
    g = WeylOp.grade(pair)
    for k in range(p.degree + 1):
        if p[k] != 0:
            out = out + power.scale(p[k])
        if k < p.degree:
            power = weyl_mul(power, g)
    return out


def from_graded(pair: GeneratorPair, forms: Mapping[int, Poly]) -> WeylOp:
    out = WeylOp.zero(pair)
    for d, p in forms.items():
        out = out + weyl_mul(WeylOp.raising(pair, d), grade_poly_op(pair, p))
    return out


@dataclass(frozen=True)
class OrderSpec:
    """Filtration choice: standard (F0 = C[raise]), dual (F0 = C[lower]) or graded (F0 = C[raise], order in G)."""

    mode: str = "standard"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise AlgebraError("invalid_input", f"unknown order mode {self.mode!r}")


STANDARD = OrderSpec("standard")
DUAL = OrderSpec("dual")
GRADED = OrderSpec("graded")


@dataclass(frozen=True)
class GradedDivisor:
    """G - lam over a pair, with G = raise*lower."""

    pair: GeneratorPair
    lam: Any

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", normalize(self.lam))

    @property
    def op(self) -> WeylOp:
        return WeylOp.grade(self.pair) - self.lam

    def describe(self) -> str:
        return f"{self.pair.raise_sym}*{self.pair.lower_sym} - ({format_scalar(self.lam)})"


def _decompose(op: WeylOp, mode: str) -> Dict[int, Poly]:
    """order -> coefficient polynomial in the raise generator (standard or graded mode)."""
    var = op.pair.raise_sym
    buckets: Dict[int, Dict[int, Scalar]] = {}
    if mode == "standard":
        for (i, j), coeff in op.terms.items():
            buckets.setdefault(j, {})[i] = coeff
    else:
        for d, p in to_graded(op).items():
            for k, coeff in p.items():
                buckets.setdefault(k, {})[d] = coeff
    out: Dict[int, Poly] = {}
    for order, coeffs in buckets.items():
        p = Poly([coeffs.get(i, 0) for i in range(max(coeffs) + 1)], var)
        if not p.is_zero():
            out[order] = p
    return out


def _compose(pair: GeneratorPair, mode: str, parts: Mapping[int, Poly]) -> WeylOp:
    if mode == "standard":
        terms: Dict[Key, Scalar] = {}
        for order, p in parts.items():
            for i, coeff in p.items():
                terms[(i, order)] = coeff
        return WeylOp(pair, terms)
    forms: Dict[int, Dict[int, Scalar]] = {}
    for order, p in parts.items():
        for d, coeff in p.items():
            forms.setdefault(d, {})[order] = coeff
    return from_graded(
        pair, {d: Poly([c.get(k, 0) for k in range(max(c) + 1)], "G") for d, c in forms.items()}
    )


def order_of(op: WeylOp, spec: OrderSpec) -> int:
    if op.is_zero():
        return 0
    if spec.mode == "standard":
        return op.lower_degree
    if spec.mode == "dual":
        return op.raise_degree
    return max(p.degree for p in to_graded(op).values())


def leading_coefficient(op: WeylOp, spec: OrderSpec) -> Poly:
    """Coefficient of the top filtration piece, as a polynomial in the F0 generator."""
    if spec.mode == "dual":
        return leading_coefficient(swap_pair(op), STANDARD)
    parts = _decompose(op, spec.mode)
    if not parts:
        return Poly([], op.pair.raise_sym)
    return parts[max(parts)]


def is_monic(k: WeylOp, spec: OrderSpec) -> bool:
    order = order_of(k, spec)
    if order != 1:
        raise AlgebraError("order_mismatch", f"divisor has order {order} under {spec.mode} order, expected 1")
    return leading_coefficient(k, spec).degree == 0


def f0_op(pair: GeneratorPair, p: Poly, spec: OrderSpec) -> WeylOp:
    """Embed an F0 polynomial as an operator."""
    return WeylOp.from_poly(pair, p, side="lower" if spec.mode == "dual" else "raise")


def _same_up_to(a: WeylOp, b: WeylOp) -> bool:
    diff = a - b
    if diff.is_zero():
        return True
    if not (a.is_big or b.is_big):
        return False
    scale = max(1, a.max_norm(), b.max_norm())
    return diff.max_norm() <= tolerance(config.FLOAT_TOLERANCE_DIGITS) * scale


def _verify_division(f: WeylOp, q: WeylOp, k: WeylOp, r: Poly, spec: OrderSpec) -> None:
    rebuilt = weyl_mul(q, k) + f0_op(f.pair, r, spec)
    if not _same_up_to(rebuilt, f):
        raise AlgebraError("verification_failed", f"q*k + r != f dividing by {k.format()}")


def _long_divide(f: WeylOp, k: WeylOp, spec: OrderSpec, require_monic: bool) -> Tuple[WeylOp, Poly]:
    if f.pair != k.pair:
        raise AlgebraError("pair_mismatch", f"{f.pair.describe()} and {k.pair.describe()}")
    if spec.mode == "dual":
        q, r = _long_divide(swap_pair(f), swap_pair(k), STANDARD, require_monic)
        return swap_pair(q), r
    pair, mode = f.pair, spec.mode
    divisor = _decompose(k, mode)
    if max(divisor, default=0) != 1:
        raise AlgebraError("order_mismatch", f"divisor {k.format()} is not of order 1 under {mode} order")
    lead = divisor[1]
    if lead.degree != 0 and (require_monic or mode == "graded"):
        raise AlgebraError("not_monic", f"{k.format()} has leading coefficient {lead.format()}")

    parts = _decompose(f, mode)
    quotient: Dict[int, Poly] = {}
    while parts and max(parts) > 0:
        top = max(parts)
        if lead.degree == 0:
            step = parts[top].scale(sdiv(1, lead[0]))
        else:
            step, rest = parts[top].divmod(lead)
            if not rest.is_zero():
                raise AlgebraError(
                    "not_divisible", f"{lead.format()} does not divide {parts[top].format()} at order {top}"
                )
        quotient[top - 1] = quotient.get(top - 1, Poly([], pair.raise_sym)) + step
        product = _decompose(weyl_mul(_compose(pair, mode, {top - 1: step}), k), mode)
        if not step.is_big and product.get(top) != parts[top]:
            raise AlgebraError("verification_failed", "leading term did not cancel")
        # top piece cancels by construction; dropping it keeps float runs from looping on rounding residue
        del parts[top]
        for order, p in product.items():
            if order == top:
                continue
            updated = parts.get(order, Poly([], pair.raise_sym)) - p
            if updated.is_zero():
                parts.pop(order, None)
            else:
                parts[order] = updated

    q = _compose(pair, mode, quotient)
    r = parts.get(0, Poly([], pair.raise_sym))
    if config.VERIFY_DIVISIONS:
        _verify_division(f, q, k, r, spec)
    return q, r


def divide_first_order(f: WeylOp, k: WeylOp, spec: OrderSpec) -> Tuple[WeylOp, Poly]:
    """Unique (q, r) with f = q*k + r and r in F0, for a monic first-order k."""
    return _long_divide(f, k, spec, require_monic=True)


def divide_nonmonic(f: WeylOp, k: WeylOp, spec: OrderSpec) -> Tuple[WeylOp, Poly]:
    """Same long division for a first-order k whose leading coefficient divides every step exactly."""
    return _long_divide(f, k, spec, require_monic=False)


def apply_to_poly(op: WeylOp, p: Poly) -> Poly:
    """Differential realization: X multiplies by x, D differentiates; A and ADAG act as D + X and D - X."""
    if op.pair == AA:
        op = change_basis(op, aa_to_xd())
    if op.pair != XD:
        raise AlgebraError("pair_mismatch", "the differential realization needs the (X, D) pair")
    derivatives = [p]
    for _ in range(max(op.lower_degree, 0)):
        derivatives.append(derivatives[-1].derivative())
    out = Poly([], p.var)
    for (i, j), coeff in op.terms.items():
        out = out + derivatives[j].shift(i).scale(coeff)
    return out


@dataclass(frozen=True, eq=False)
class Substitution:
    """Images of the source pair's generators as operators over the target pair."""

    source: GeneratorPair
    target: GeneratorPair
    raise_image: WeylOp
    lower_image: WeylOp

    def __post_init__(self) -> None:
        if self.raise_image.pair != self.target or self.lower_image.pair != self.target:
            raise AlgebraError("pair_mismatch", "substitution images must live over the target pair")
        bracket = commutator(self.lower_image, self.raise_image)
        if bracket != WeylOp.scalar(self.target, self.source.commutator):
            raise AlgebraError(
                "non_invertible_substitution",
                f"images give [{self.source.lower_sym}, {self.source.raise_sym}] = {bracket.format()}",
            )

    def _affine(self, image: WeylOp) -> Optional[Tuple[Scalar, Scalar, Scalar]]:
        if any(key not in {(0, 0), (1, 0), (0, 1)} for key in image.terms):
            return None
        return image.coefficient(1, 0), image.coefficient(0, 1), image.coefficient(0, 0)

    def inverse(self) -> "Substitution":
        top, bottom = self._affine(self.raise_image), self._affine(self.lower_image)
        if top is None or bottom is None:
            raise AlgebraError("non_invertible_substitution", "only affine substitutions are inverted")
        a, b, e = top
        c, d, f = bottom
        det = ssub(smul(a, d), smul(b, c))
        if det == 0:
            raise AlgebraError("non_invertible_substitution", "linear part is singular")
        rs = WeylOp.raising(self.source) - e
        ls = WeylOp.lowering(self.source) - f
        new_raise = (rs.scale(d) - ls.scale(b)).scale(sdiv(1, det))
        new_lower = (ls.scale(a) - rs.scale(c)).scale(sdiv(1, det))
        return Substitution(self.target, self.source, new_raise, new_lower)

    def apply(self, op: WeylOp) -> WeylOp:
        if op.pair != self.source:
            raise AlgebraError("pair_mismatch", f"substitution expects {self.source.describe()}")
        raise_powers = [WeylOp.scalar(self.target, 1)]
        lower_powers = [WeylOp.scalar(self.target, 1)]
        for _ in range(max(op.raise_degree, 0)):
            raise_powers.append(weyl_mul(raise_powers[-1], self.raise_image))
        for _ in range(max(op.lower_degree, 0)):
            lower_powers.append(weyl_mul(lower_powers[-1], self.lower_image))
        out = WeylOp.zero(self.target)
        for (i, j), coeff in op.terms.items():
            out = out + weyl_mul(raise_powers[i], lower_powers[j]).scale(coeff)
        return out


def change_basis(op: WeylOp, substitution: Substitution) -> WeylOp:
    return substitution.apply(op)


def xd_to_aa() -> Substitution:
    a = WeylOp.lowering(AA)
    adag = WeylOp.raising(AA)
    half = Fraction(1, 2)
    return Substitution(XD, AA, (a - adag).scale(half), (a + adag).scale(half))


def aa_to_xd() -> Substitution:
    d = WeylOp.lowering(XD)
    x = WeylOp.raising(XD)
    return Substitution(AA, XD, d - x, d + x)


def fourier() -> Substitution:
    """X -> D, D -> -X on the (X, D) pair."""
    return Substitution(XD, XD, WeylOp.lowering(XD), -WeylOp.raising(XD))
