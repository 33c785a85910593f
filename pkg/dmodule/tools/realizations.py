"""Concrete models of (X, D): polynomials in x, and tables under D = forward difference, X f(x) = x f(x-1)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Tuple

from .adic import INF, AdicSeries
from .common.results import AlgebraError
from .common.scalars import Scalar, normalize, sadd, smul, ssub
from .weyl import XD, WeylOp, weyl_mul


def falling(x: Any, d: int) -> Scalar:
    """x(x-1)...(x-d+1); 1 when d == 0."""
    out: Any = Fraction(1)
    for i in range(d):
        out = smul(out, ssub(normalize(x), i))
    return out


@dataclass(frozen=True)
class FallingSeries:
    """sum_d terms[d] * x(x-1)...(x-d+1)."""

    terms: Mapping[int, Scalar]

    def evaluate(self, x: Any) -> Scalar:
        x = normalize(x)
        acc: Any = Fraction(0)
        integral = isinstance(x, Fraction) and x.denominator == 1 and x >= 0
        for d in sorted(self.terms):
            if integral and d > x:
                break
            acc = sadd(acc, smul(self.terms[d], falling(x, d)))
        return acc

    def table(self, start: int, stop: int) -> "FunctionTable":
        return FunctionTable(start, tuple(self.evaluate(x) for x in range(start, stop + 1)))


@dataclass(frozen=True)
class FunctionTable:
    """Values of f on the consecutive integers start, start+1, ..."""

    start: int
    values: Tuple[Scalar, ...]

    @property
    def domain(self) -> List[int]:
        return list(range(self.start, self.start + len(self.values)))

    @property
    def stop(self) -> int:
        return self.start + len(self.values) - 1

    def __getitem__(self, x: int) -> Scalar:
        if not self.start <= x <= self.stop:
            raise AlgebraError("domain_too_small", f"x = {x} outside [{self.start}, {self.stop}]")
        return self.values[x - self.start]

    def restrict(self, start: int, stop: int) -> "FunctionTable":
        return FunctionTable(start, tuple(self[x] for x in range(start, stop + 1)))

    def difference(self) -> "FunctionTable":
        if len(self.values) < 2:
            raise AlgebraError("domain_too_small", "forward difference needs two points")
        return FunctionTable(self.start, tuple(ssub(b, a) for a, b in zip(self.values, self.values[1:])))

    def raise_x(self) -> "FunctionTable":
        """(X f)(x) = x f(x-1); the point x = 0 stays defined because the factor x kills f(-1)."""
        if not self.values:
            raise AlgebraError("domain_too_small", "empty table")
        shifted = [smul(x, self[x - 1]) for x in range(self.start + 1, self.stop + 1)]
        if self.start == 0:
            return FunctionTable(0, (Fraction(0),) + tuple(shifted))
        return FunctionTable(self.start + 1, tuple(shifted))


def realize_differential(series: AdicSeries) -> List[Scalar]:
    """Coefficients of the series read in C[[x]] (X^n . 1 = x^n)."""
    top = series.precision if series.precision != INF else max(series.coeffs, default=-1) + 1
    return [series.coeffs.get(k, Fraction(0)) for k in range(int(top))]


def realize_difference(series: AdicSeries) -> FallingSeries:
    """Same coefficients on the falling factorials (X^n . 1 = x(x-1)...(x-n+1))."""
    return FallingSeries(dict(series.coeffs))


def apply_difference(op: WeylOp, f: FunctionTable) -> FunctionTable:
    """(op f) on the points where every term X^i D^j f is defined."""
    if op.pair != XD:
        raise AlgebraError("pair_mismatch", "the difference realization needs the (X, D) pair")
    if op.is_zero():
        return FunctionTable(f.start, tuple(Fraction(0) for _ in f.values))
    if len(f.values) <= max(j for _, j in op.terms):
        raise AlgebraError("domain_too_small", f"table [{f.start}, {f.stop}] too narrow for {op.format()}")
    differences = [f]
    for _ in range(max(j for _, j in op.terms)):
        differences.append(differences[-1].difference())
    terms = []
    for (i, j), coeff in op.terms.items():
        term = differences[j]
        for _ in range(i):
            term = term.raise_x()
        terms.append((coeff, term))
    left = max(t.start for _, t in terms)
    right = min(t.stop for _, t in terms)
    if left > right:
        raise AlgebraError("domain_too_small", f"table [{f.start}, {f.stop}] too narrow for {op.format()}")
    out: Dict[int, Any] = {x: Fraction(0) for x in range(left, right + 1)}
    for coeff, term in terms:
        for x in out:
            out[x] = sadd(out[x], smul(coeff, term[x]))
    return FunctionTable(left, tuple(out[x] for x in range(left, right + 1)))


def bessel_operator(nu: Any) -> WeylOp:
    """X^2 D^2 + X D + X^2 - nu^2."""
    x = WeylOp.raising(XD)
    d = WeylOp.lowering(XD)
    nu = normalize(nu)
    return weyl_mul(weyl_mul(x, x), weyl_mul(d, d)) + weyl_mul(x, d) + weyl_mul(x, x) - smul(nu, nu)


def bessel_series(n: int, precision: int) -> AdicSeries:
    """sum_k (-1)^k X^(n+2k) / (2^(n+2k) (n+k)! k!) below X^precision."""
    if n < 0:
        raise AlgebraError("invalid_input", "Bessel order must be a nonnegative integer")
    terms: Dict[int, Fraction] = {}
    k = 0
    while n + 2 * k < precision:
        terms[n + 2 * k] = Fraction((-1) ** k, 2 ** (n + 2 * k) * math.factorial(n + k) * math.factorial(k))
        k += 1
    return AdicSeries(terms, precision, "X")


def difference_bessel(n: int, x: int) -> Fraction:
    """sum over k >= 0 of (-1)^k x(x-1)...(x-n-2k+1) / (2^(n+2k) (n+k)! k!) at an integer x >= 0."""
    if n < 0 or x < 0:
        raise AlgebraError("invalid_input", "difference Bessel needs integers n >= 0 and x >= 0")
    return realize_difference(bessel_series(n, x + 1)).evaluate(x)


def difference_bessel_table(n: int, stop: int) -> FunctionTable:
    return FunctionTable(0, tuple(difference_bessel(n, x) for x in range(stop + 1)))
