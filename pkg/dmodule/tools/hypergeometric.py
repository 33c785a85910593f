"""Generalized hypergeometric operators, coefficient-level series descriptions and identity checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Protocol, Sequence, Tuple

from mpmath import mp

from .. import config
from .adic import AdicSeries
from .common.results import AlgebraError
from .common.scalars import Scalar, is_big, magnitude, normalize, sadd, sdiv, smul, ssub, tolerance
from .heun import HeunParams, confluent_heun_operator, heun_operator
from .newton import SolveConfig, SolveResult, newton_iterate
from .poly import Poly
from .weyl import STANDARD, XD, WeylOp, apply_to_poly, weyl_mul


def theta() -> WeylOp:
    return weyl_mul(WeylOp.raising(XD), WeylOp.lowering(XD))


def gen_hyp_operator(upper: Sequence[Any], lower: Sequence[Any], scale: Any = 1) -> WeylOp:
    """D (XD + b_1 - 1)...(XD + b_q - 1) - scale (XD + a_1)...(XD + a_p), annihilating pFq(scale x)."""
    t = theta()
    left = WeylOp.lowering(XD)
    for b in lower:
        left = weyl_mul(left, t + ssub(normalize(b), 1))
    right = WeylOp.scalar(XD, 1)
    for a in upper:
        right = weyl_mul(right, t + normalize(a))
    return left - right.scale(normalize(scale))


def factor_operator(e_list: Sequence[Any]) -> WeylOp:
    """(X/e_1 D + 1)...(X/e_n D + 1)."""
    out = WeylOp.scalar(XD, 1)
    for e in e_list:
        if normalize(e) == 0:
            raise AlgebraError("degenerate_factor", "factor X/e D + 1 needs e != 0")
        out = weyl_mul(out, theta().scale(sdiv(1, normalize(e))) + 1)
    return out


class SeriesSpec(Protocol):
    def coefficients(self, n: int) -> List[Scalar]: ...


@dataclass(frozen=True)
class HypergeometricSeries:
    upper: Tuple[Any, ...]
    lower: Tuple[Any, ...]
    scale: Any = 1

    def coefficients(self, n: int) -> List[Scalar]:
        out: List[Scalar] = []
        current: Any = Fraction(1)
        scale = normalize(self.scale)
        for k in range(n):
            out.append(current)
            top: Any = scale
            for a in self.upper:
                top = smul(top, sadd(normalize(a), k))
            bottom: Any = Fraction(k + 1)
            for b in self.lower:
                bottom = smul(bottom, sadd(normalize(b), k))
            if bottom == 0:
                raise AlgebraError("invalid_input", f"lower parameter hits a nonpositive integer at k = {k}")
            current = sdiv(smul(current, top), bottom)
        return out


@dataclass(frozen=True)
class OperatorApplied:
    op: WeylOp
    inner: SeriesSpec

    def coefficients(self, n: int) -> List[Scalar]:
        if self.op.pair != XD:
            raise AlgebraError("pair_mismatch", "series realization needs the (X, D) pair")
        # D^j lowers degree by j, so j extra inner terms feed the first n outputs
        inner = Poly(self.inner.coefficients(n + max(self.op.lower_degree, 0)), "x")
        image = apply_to_poly(self.op, inner)
        return [image[k] for k in range(n)]


@dataclass(frozen=True)
class ExpTimes:
    scale: Any
    inner: SeriesSpec

    def coefficients(self, n: int) -> List[Scalar]:
        inner = self.inner.coefficients(n)
        exp_terms: List[Any] = [Fraction(1)]
        for k in range(1, n):
            exp_terms.append(sdiv(smul(exp_terms[-1], normalize(self.scale)), k))
        out: List[Scalar] = []
        for k in range(n):
            acc: Any = Fraction(0)
            for i in range(k + 1):
                acc = sadd(acc, smul(exp_terms[i], inner[k - i]))
            out.append(acc)
        return out


@dataclass(frozen=True)
class SolvedSeries:
    series: AdicSeries

    def coefficients(self, n: int) -> List[Scalar]:
        return [self.series.coefficient(k) for k in range(n)]


@dataclass
class IdentityCheck:
    equal: bool
    compared: int
    index: Optional[int] = None
    lhs_value: Optional[Scalar] = None
    rhs_value: Optional[Scalar] = None


def verify_identity_series(lhs: SeriesSpec, rhs: SeriesSpec, n: int, digits: Optional[int] = None) -> IdentityCheck:
    """Coefficient-wise comparison below x^n; exact for rational data, relative tolerance otherwise."""
    if n < 0:
        raise AlgebraError("invalid_input", "series length must be nonnegative")
    with mp.workdps((digits or config.DEFAULT_DIGITS) + config.ROOT_GUARD_DIGITS):
        left = lhs.coefficients(n)
        right = rhs.coefficients(n)
        tol = tolerance(config.FLOAT_TOLERANCE_DIGITS)
        for k, (a, b) in enumerate(zip(left, right)):
            if not (is_big(a) or is_big(b)):
                same = a == b
            else:
                same = magnitude(ssub(a, b)) <= tol * max(1, magnitude(a), magnitude(b))
            if not same:
                return IdentityCheck(False, k, k, a, b)
    return IdentityCheck(True, n)


def heun_identity_series(params: HeunParams, e_list: Sequence[Any]) -> HypergeometricSeries:
    """n+2Fn+1(alpha, beta, e+1; gamma, e; x), or n+1Fn+1(alpha, e+1; gamma, e; -eps x) for the confluent variant."""
    shifted = tuple(sadd(normalize(e), 1) for e in e_list)
    if params.variant == "confluent":
        return HypergeometricSeries((params.alpha,) + shifted, (params.gamma,) + tuple(e_list), -params.epsilon)
    return HypergeometricSeries((params.alpha, params.beta) + shifted, (params.gamma,) + tuple(e_list))


def factored_series(params: HeunParams, e_list: Sequence[Any]) -> OperatorApplied:
    """(X/e_1 D + 1)...(X/e_n D + 1) applied to 2F1(alpha, beta; gamma; x) or 1F1(alpha; gamma; -eps x)."""
    if params.variant == "confluent":
        base = HypergeometricSeries((params.alpha,), (params.gamma,), -params.epsilon)
    else:
        base = HypergeometricSeries((params.alpha, params.beta), (params.gamma,))
    return OperatorApplied(factor_operator(e_list), base)


def factorization_operator(params: HeunParams, e_list: Sequence[Any]) -> WeylOp:
    series = heun_identity_series(params, e_list)
    return gen_hyp_operator(series.upper, series.lower, series.scale)


def heun_local_series(params: HeunParams, q: Any, precision: Optional[int] = None) -> SolveResult:
    """Hl(a, q; ...; x) (or the confluent Hcl) normalized to 1 at 0, as the zero of L*S mod D."""
    q = normalize(q)
    if params.variant == "confluent":
        op, label = confluent_heun_operator(params) - q, "confluent-heun-local"
    else:
        op, label = heun_operator(params) - q, "heun-local"
        if params.a == 0:
            raise AlgebraError("invalid_input", "singular point a must be nonzero")
    if params.gamma <= 0 and params.gamma.denominator == 1:
        raise AlgebraError("not_immediate", f"gamma = {params.gamma} makes the tangential map vanish")
    cfg = SolveConfig(op, WeylOp.lowering(XD), STANDARD, None, precision or config.DEFAULT_PRECISION, label=label)
    return newton_iterate(cfg)


def valuation_band(result: SolveResult) -> List[Tuple[int, int, bool]]:
    """(n, v, n+1 <= v <= 2n+2) for every measured residual valuation of the iterates."""
    rows: List[Tuple[int, int, bool]] = []
    for n, v in enumerate(result.residual_valuations):
        if not v.exact:
            break
        rows.append((n, int(v.value), n + 1 <= v.value <= 2 * n + 2))
    return rows
