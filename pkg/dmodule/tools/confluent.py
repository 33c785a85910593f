"""Doubly confluent Heun operators in the D-basis and biconfluent Heun operators over (ADAG, A)."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, Optional

from .. import config
from .common.results import AlgebraError
from .common.scalars import exact
from .newton import SolveConfig, SolveResult, TangentData, newton_iterate, solve_frobenius
from .poly import Poly
from .weyl import AA, DUAL, XD, GradedDivisor, WeylOp, to_graded, weyl_mul


def _x(power: int = 1) -> WeylOp:
    return WeylOp.raising(XD, power)


def _d(power: int = 1) -> WeylOp:
    return WeylOp.lowering(XD, power)


def doubly_confluent_operator(a: Any, b: Any, c: Any, q: Any) -> WeylOp:
    """X^2 D^2 + (-X^2 + bX + c) D - aX + q."""
    a, b, c, q = (exact(v) for v in (a, b, c, q))
    return _x(2) * _d(2) + (-_x(2) + _x().scale(b) + c) * _d() - _x().scale(a) + q


def kummer_divisor(a: Any, b: Any) -> WeylOp:
    """X D^2 + (b - X) D - a, annihilating 1F1(a; b; x)."""
    a, b = exact(a), exact(b)
    return _x() * _d(2) + (WeylOp.scalar(XD, b) - _x()) * _d() - a


def closed_quotient(n: int) -> WeylOp:
    return _x() * _d(n) - (_d(n - 1).scale(n) if n else WeylOp.zero(XD))


def closed_remainder(a: Any, b: Any, c: Any, q: Any, n: int) -> Poly:
    """c D^(n+1) + (nb + n(n-1) + q) D^n - n(a+n-1) D^(n-1) as a polynomial in D."""
    a, b, c, q = (exact(v) for v in (a, b, c, q))
    coeffs: Dict[int, Fraction] = {n + 1: c, n: n * b + n * (n - 1) + q}
    if n:
        coeffs[n - 1] = -n * (a + n - 1)
    return Poly([coeffs.get(k, 0) for k in range(n + 2)], "D")


def doubly_confluent_remainder(a: Any, b: Any, c: Any, q: Any, s: Poly) -> Poly:
    """Closed-formula remainder of D*s on division by the Kummer divisor, checked by re-multiplication."""
    op = doubly_confluent_operator(a, b, c, q)
    k = kummer_divisor(a, b)
    quotient = WeylOp.zero(XD)
    remainder = Poly([], "D")
    for n, coeff in s.items():
        quotient = quotient + closed_quotient(n).scale(coeff)
        remainder = remainder + closed_remainder(a, b, c, q, n).scale(coeff)
    lhs = weyl_mul(op, WeylOp.from_poly(XD, s, side="lower"))
    rhs = weyl_mul(quotient, k) + WeylOp.from_poly(XD, remainder, side="lower")
    if lhs != rhs:
        raise AlgebraError("verification_failed", "closed-formula remainder does not re-multiply")
    return remainder


def doubly_confluent_tangent(a: Any, b: Any, c: Any, q: Any) -> TangentData:
    a, b, c, q = (exact(v) for v in (a, b, c, q))
    m_poly = Poly([0, 1], "m")
    return TangentData(
        shift=-1,
        bands={
            -1: -(m_poly * (m_poly + (a - 1))),
            0: m_poly * (m_poly + (b - 1)) + q,
            1: Poly([c], "m"),
        },
    )


def doubly_confluent_config(
    a: Any, b: Any, c: Any, q: Any, precision: Optional[int] = None, seed: Optional[Poly] = None
) -> SolveConfig:
    a = exact(a)
    if a <= 0 and a.denominator == 1:
        raise AlgebraError("not_immediate", f"-a = {-a} is a nonnegative integer")
    return SolveConfig(
        doubly_confluent_operator(a, b, c, q),
        kummer_divisor(a, b),
        DUAL,
        seed,
        precision or config.DEFAULT_PRECISION,
        label="doubly-confluent",
        nonmonic=True,
        tangent=doubly_confluent_tangent(a, b, c, q),
    )


def solve_doubly_confluent(
    a: Any, b: Any, c: Any, q: Any, precision: Optional[int] = None, seed: Optional[Poly] = None
) -> SolveResult:
    """S in C[[D]] with D*S in the left ideal of the Kummer divisor, up to precision."""
    return newton_iterate(doubly_confluent_config(a, b, c, q, precision, seed))


def harmonic_operator() -> WeylOp:
    """H = ADAG*A - 1."""
    return WeylOp.grade(AA) - 1


def biconfluent_operator(alpha: Any, beta: Any, gamma: Any) -> WeylOp:
    """(A - ADAG)^2 (H + alpha) + beta (A - ADAG) + gamma over (ADAG, A)."""
    alpha, beta, gamma = exact(alpha), exact(beta), exact(gamma)
    diff = WeylOp.lowering(AA) - WeylOp.raising(AA)
    return weyl_mul(weyl_mul(diff, diff), harmonic_operator() + alpha) + diff.scale(beta) + gamma


def biconfluent_divisor(alpha: Any) -> GradedDivisor:
    """H + alpha = G - (1 - alpha)."""
    return GradedDivisor(AA, 1 - exact(alpha))


def lifted_biconfluent(alpha: Any, beta: Any, gamma: Any) -> WeylOp:
    """ADAG^2 * B, graded over (ADAG, ADAG*A)."""
    return weyl_mul(WeylOp.raising(AA, 2), biconfluent_operator(alpha, beta, gamma))


def biconfluent_graded_form(alpha: Any, beta: Any, gamma: Any) -> Dict[int, Poly]:
    return to_graded(lifted_biconfluent(alpha, beta, gamma))


def solve_biconfluent(alpha: Any, beta: Any, gamma: Any, precision: Optional[int] = None) -> SolveResult:
    """Series T in C[[ADAG]] with ADAG^2 * B * T in the left ideal of H + alpha, up to precision.

    The certificate belongs to the lifted operator ADAG^2 * B and the result names it in
    `certified_operator`. T carries no prefactor: B * (ADAG^2 * T) is not in that ideal.
    """
    alpha = exact(alpha)
    if alpha <= 1 and alpha.denominator == 1 and alpha.numerator % 2 != 0:
        raise AlgebraError("resonant_root", f"alpha = {alpha} is an odd integer <= 1")
    lifted = lifted_biconfluent(alpha, beta, gamma)
    result = solve_frobenius(lifted, 1 - alpha, precision, label="biconfluent")
    result.prefactor = None
    result.certified_operator = lifted.format()
    return result
