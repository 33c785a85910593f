from __future__ import annotations

import math
from typing import Any, List, Sequence, Tuple, Union

from .common.results import AlgebraError
from .common.scalars import magnitude
from .poly import Poly, RationalFunction
from .weyl import XD, WeylOp

Coeff = Union[Poly, RationalFunction]


def _is_zero(c: Coeff) -> bool:
    return c.is_zero()


def _zero_like(sample: Sequence[Coeff], var: str) -> Coeff:
    if sample and isinstance(sample[0], Poly):
        return Poly([], var)
    return RationalFunction(Poly([], var))


class OreOp:
    """sum_i coeffs[i] * D^i over C(x)[D] with D*f = f*D + f'.

    Coefficients are RationalFunctions; the pseudo-division path keeps plain Polys.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Sequence[Any], var: str = "x"):
        items: List[Coeff] = []
        for c in coeffs:
            if not isinstance(c, (Poly, RationalFunction)):
                c = RationalFunction(Poly([c], var))
            items.append(c)
        while items and _is_zero(items[-1]):
            items.pop()
        self.coeffs = tuple(items)
        self.var = var

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Coeff:
        if not self.coeffs:
            raise AlgebraError("invalid_input", "zero operator has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, power: int) -> Coeff:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return self._zero()

    def _zero(self) -> Coeff:
        return _zero_like(self.coeffs, self.var)

    def __add__(self, other: "OreOp") -> "OreOp":
        size = max(len(self.coeffs), len(other.coeffs))
        zero = _zero_like(self.coeffs + other.coeffs, self.var)

        def pick(op: "OreOp", k: int) -> Coeff:
            return op.coeffs[k] if k < len(op.coeffs) else zero

        return OreOp([pick(self, k) + pick(other, k) for k in range(size)], self.var)

    def __neg__(self) -> "OreOp":
        return OreOp([-c for c in self.coeffs], self.var)

    def __sub__(self, other: "OreOp") -> "OreOp":
        return self + (-other)

    def left_scale(self, factor: Any) -> "OreOp":
        return OreOp([factor * c for c in self.coeffs], self.var)

    def __mul__(self, other: Any) -> "OreOp":
        if isinstance(other, OreOp):
            return ore_mul(self, other)
        return self.left_scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OreOp):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def max_norm(self) -> Any:
        norms = []
        for c in self.coeffs:
            parts = (c.num, c.den) if isinstance(c, RationalFunction) else (c,)
            norms.extend(p.max_norm() for p in parts)
        return max(norms, default=magnitude(0))

    def format(self) -> str:
        if not self.coeffs:
            return "0"
        pieces = []
        for power in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[power]
            if _is_zero(c):
                continue
            mono = "" if power == 0 else ("*D" if power == 1 else f"*D^{power}")
            pieces.append(f"({c.format()}){mono}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"OreOp({self.format()})"


def _monomial(coeff: Coeff, power: int, var: str) -> OreOp:
    return OreOp([_zero_like([coeff], var)] * power + [coeff], var)


def ore_mul(a: OreOp, b: OreOp) -> OreOp:
    """Skew product: D^i * f = sum_k C(i, k) f^(k) D^(i-k)."""
    if a.is_zero() or b.is_zero():
        return OreOp([], a.var)
    out: List[Coeff] = [b._zero() for _ in range(a.degree + b.degree + 1)]
    for j, bj in enumerate(b.coeffs):
        if _is_zero(bj):
            continue
        derivs = [bj]
        for _ in range(a.degree):
            derivs.append(derivs[-1].derivative())
        for i, ai in enumerate(a.coeffs):
            if _is_zero(ai):
                continue
            for k in range(i + 1):
                if _is_zero(derivs[k]):
                    continue
                out[i - k + j] = out[i - k + j] + ai * derivs[k] * math.comb(i, k)
    return OreOp(out, a.var)


def ore_right_divide(l: OreOp, m: OreOp) -> Tuple[OreOp, OreOp]:
    """(q, r) with l = q*m + r and deg r < deg m, exact over C(x)."""
    if m.is_zero():
        raise AlgebraError("invalid_input", "division by the zero operator")
    lead = m.leading()
    if not isinstance(lead, RationalFunction):
        raise AlgebraError("invalid_input", "exact right division needs rational-function coefficients")
    q = OreOp([], l.var)
    r = l
    while not r.is_zero() and r.degree >= m.degree:
        shift = r.degree - m.degree
        term = _monomial(r.leading() / lead, shift, l.var)
        q = q + term
        top = r.degree
        r = r - ore_mul(term, m)
        if r.degree >= top:
            r = OreOp(r.coeffs[:top], l.var)
    return q, r


def ore_pseudo_divide(l: OreOp, m: OreOp) -> Tuple[Poly, OreOp, OreOp]:
    """Fraction-free (c, q, r) with c*l = q*m + r for polynomial coefficients."""
    if m.is_zero():
        raise AlgebraError("invalid_input", "division by the zero operator")
    if not all(isinstance(c, Poly) for c in l.coeffs + m.coeffs):
        raise AlgebraError("invalid_input", "pseudo-division needs polynomial coefficients")
    lead = m.leading()
    c = Poly([1], l.var)
    q = OreOp([], l.var)
    r = l
    while not r.is_zero() and r.degree >= m.degree:
        shift = r.degree - m.degree
        top_coeff = r.leading()
        top = r.degree
        c = lead * c
        q = q.left_scale(lead) + _monomial(top_coeff, shift, l.var)
        r = r.left_scale(lead) - ore_mul(_monomial(top_coeff, shift, l.var), m)
        # lead*top_coeff - top_coeff*lead is zero; drop it so float rounding cannot keep it alive
        r = OreOp(r.coeffs[:top], l.var)
    return c, q, r


def weyl_to_ore(op: WeylOp, var: str = "x", polynomial: bool = False) -> OreOp:
    if op.pair != XD:
        raise AlgebraError("pair_mismatch", "Ore transcription needs the (X, D) pair")
    coeffs: List[Coeff] = []
    for j in range(op.lower_degree + 1):
        p = Poly([op.coefficient(i, j) for i in range(op.raise_degree + 1)], var)
        coeffs.append(p if polynomial else RationalFunction(p))
    return OreOp(coeffs, var)


def ore_apply(op: OreOp, f: Coeff) -> Coeff:
    """Realize op on a function of x: sum_i a_i f^(i)."""
    out: Any = None
    deriv = f
    for power, a in enumerate(op.coeffs):
        term = a * deriv
        out = term if out is None else out + term
        if power < op.degree:
            deriv = deriv.derivative()
    if out is None:
        return Poly([], op.var) if isinstance(f, Poly) else RationalFunction(Poly([], op.var))
    return out
