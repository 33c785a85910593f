from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from mpmath import mp

from .. import config, telemetry
from .adic import AdicSeries, Valuation
from .common.results import AlgebraError
from .common.scalars import (
    Scalar,
    format_scalar,
    is_big,
    magnitude,
    normalize,
    sadd,
    sdiv,
    smul,
    ssub,
    tolerance,
)
from .poly import Poly, poly_roots, roots_exact_first
from .weyl import (
    DUAL,
    GRADED,
    STANDARD,
    GeneratorPair,
    GradedDivisor,
    OrderSpec,
    WeylOp,
    divide_first_order,
    divide_nonmonic,
    f0_op,
    leading_coefficient,
    swap_pair,
    to_graded,
    weyl_mul,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TangentData:
    """Phi(E^m) = sum_delta bands[delta](m) E^(m+delta); the tangent keeps only delta = shift."""

    shift: int
    bands: Dict[int, Poly]

    @property
    def leading(self) -> Poly:
        return self.bands[self.shift]

    def __call__(self, m: int) -> Scalar:
        return self.leading(Fraction(m))


@dataclass
class SolveConfig:
    operator: WeylOp
    divisor: WeylOp
    spec: OrderSpec = STANDARD
    seed: Optional[Poly] = None
    precision: int = config.DEFAULT_PRECISION
    max_iterations: int = config.MAX_ITERATIONS
    label: str = ""
    # divisor with a non-constant leading coefficient that divides every step exactly
    nonmonic: bool = False
    tangent: Optional[TangentData] = None

    def __post_init__(self) -> None:
        if self.operator.pair != self.divisor.pair:
            raise AlgebraError("pair_mismatch", "operator and divisor use different generator pairs")
        if self.precision < 1:
            raise AlgebraError("invalid_input", "precision must be at least 1")
        if self.seed is None:
            self.seed = Poly([1], self.generator)
        if self.seed.is_zero():
            raise AlgebraError("invalid_input", "seed must be nonzero")
        self.seed = self.seed.with_var(self.generator)

    @property
    def pair(self) -> GeneratorPair:
        return self.operator.pair

    @property
    def generator(self) -> str:
        pair = self.operator.pair
        return pair.lower_sym if self.spec.mode == "dual" else pair.raise_sym


@dataclass
class SolveResult:
    series: AdicSeries
    residual_valuations: List[Valuation]
    converged: bool
    divisor: str
    iterations: int
    certificate: Optional[Valuation] = None
    lam: Optional[Scalar] = None
    prefactor: Optional[str] = None
    # set when the remainder was certified for a lifted operator rather than the one given
    certified_operator: Optional[str] = None


@dataclass(frozen=True)
class IndicialData:
    polynomial: Poly
    roots: List[Scalar]
    shift: Fraction
    left_power: int = 0

    def resonances(self, lam: Any) -> List[int]:
        """Positive m with i(lam + m*shift) = 0."""
        lam = normalize(lam)
        tol = tolerance(config.FLOAT_TOLERANCE_DIGITS)
        found: List[int] = []
        for root in self.roots:
            step = sdiv(ssub(root, lam), self.shift)
            if isinstance(step, Fraction):
                candidate = step.numerator if step.denominator == 1 else None
            else:
                nearest = int(mp.nint(mp.re(step)))
                candidate = nearest if magnitude(step - nearest) <= tol * max(1, abs(nearest)) else None
            if candidate is None or candidate <= 0:
                continue
            value = self.polynomial(sadd(lam, smul(candidate, self.shift)))
            if is_big(value) or value == 0:
                if candidate not in found:
                    found.append(candidate)
        return sorted(found)

    def non_resonant(self, lam: Any) -> bool:
        return not self.resonances(lam)


def _working(cfg: SolveConfig) -> Tuple[WeylOp, WeylOp, str]:
    if cfg.spec.mode == "dual":
        return swap_pair(cfg.operator), swap_pair(cfg.divisor), "standard"
    return cfg.operator, cfg.divisor, cfg.spec.mode


def _substitute(p: Poly, arg: Poly) -> Poly:
    out = Poly([], arg.var)
    for coeff in reversed(p.coeffs):
        out = out * arg + coeff
    return out


def tangent_data(cfg: SolveConfig) -> TangentData:
    if cfg.tangent is not None:
        return cfg.tangent
    op, k, mode = _working(cfg)
    pair = op.pair
    bands: Dict[int, Poly] = {}
    if mode == "standard":
        if set(k.terms) != {(0, 1)}:
            raise AlgebraError("invalid_input", f"tangential map needs K = c*{pair.lower_sym}, got {cfg.divisor.format()}")
        c = pair.commutator
        for (i, j), coeff in op.terms.items():
            # lower^j * E^m leaves c^j m(m-1)...(m-j+1) E^(m-j) modulo lower
            falling = Poly.from_roots(list(range(j)), "m").scale(smul(coeff, c**j))
            bands[i - j] = bands.get(i - j, Poly([], "m")) + falling
    else:
        if not set(k.terms) <= {(1, 1), (0, 0)} or (1, 1) not in k.terms:
            raise AlgebraError("invalid_input", f"tangential map needs K = c*(G - lambda), got {cfg.divisor.format()}")
        lam = sdiv(-k.coefficient(0, 0), k.coefficient(1, 1))
        arg = Poly([lam, pair.shift], "m")
        for d, q in to_graded(op).items():
            bands[d] = _substitute(q, arg)
    bands = {d: p for d, p in bands.items() if not p.is_zero()}
    if not bands:
        raise AlgebraError("invalid_input", "zero operator has no tangential map")
    return TangentData(min(bands), bands)


def remainder_map(cfg: SolveConfig, s: Poly) -> Poly:
    """Phi(s): remainder of L*s on division by K."""
    s_op = f0_op(cfg.pair, s, cfg.spec)
    divide = divide_nonmonic if cfg.nonmonic else divide_first_order
    _, r = divide(weyl_mul(cfg.operator, s_op), cfg.divisor, cfg.spec)
    return r.with_var(cfg.generator)


def tangential_apply(cfg: SolveConfig, s: Poly) -> Poly:
    tangent = tangent_data(cfg)
    terms: Dict[int, Scalar] = {}
    for m, coeff in s.items():
        value = tangent(m)
        if value == 0:
            continue
        terms[m + tangent.shift] = smul(coeff, value)
    top = max(terms, default=-1)
    return Poly([terms.get(k, 0) for k in range(top + 1)], cfg.generator)


def tangential_inverse(cfg: SolveConfig, r: Poly) -> Poly:
    """Monomial-wise inverse: E^k -> E^(k-d) / t(k-d)."""
    tangent = tangent_data(cfg)
    terms: Dict[int, Scalar] = {}
    for k, coeff in r.items():
        m = k - tangent.shift
        value = tangent(m) if m >= 0 else 0
        if value == 0:
            code = "resonant_root" if cfg.spec.mode == "graded" else "not_immediate"
            raise AlgebraError(code, f"tangential map vanishes at {cfg.generator}^{m}")
        terms[m] = sdiv(coeff, value)
    top = max(terms, default=-1)
    return Poly([terms.get(m, 0) for m in range(top + 1)], cfg.generator)


def _chop(p: Poly, scale: Any) -> Poly:
    if not p.is_big:
        return p
    tol = tolerance(config.FLOAT_TOLERANCE_DIGITS) * max(1, scale)
    return Poly([0 if magnitude(c) <= tol else c for c in p.coeffs], p.var)


def certify(cfg: SolveConfig, series: AdicSeries) -> Valuation:
    """Valuation of the full remainder of L * (truncated series)."""
    r = remainder_map(cfg, series.to_poly())
    return Valuation(_chop(r, series.to_poly().max_norm()).valuation())


def newton_iterate(cfg: SolveConfig) -> SolveResult:
    tangent = tangent_data(cfg)
    size = cfg.precision
    limit = size + tangent.shift
    s = cfg.seed.truncate(size)
    if s.is_zero():
        raise AlgebraError("invalid_input", "seed vanishes below the requested precision")
    valuations: List[Valuation] = []
    converged = False
    stalls = 0
    iterations = 0
    while True:
        residual = _chop(remainder_map(cfg, s).truncate(max(limit, 0)), s.max_norm())
        if residual.is_zero():
            valuations.append(Valuation(max(limit, 0), exact=False))
            converged = True
            logger.debug("%s converged after %d steps", cfg.label or "solve", iterations)
            break
        current = Valuation(residual.valuation())
        if valuations and current.value <= valuations[-1].value:
            stalls += 1
            if stalls >= 2:
                raise AlgebraError(
                    "not_immediate",
                    f"residual valuation stuck at {current} for {cfg.label or cfg.operator.format()}",
                )
        else:
            stalls = 0
        valuations.append(current)
        logger.debug("%s step %d residual valuation %s", cfg.label or "solve", iterations, current)
        telemetry.record_iteration(cfg.label or "solve", iterations, current)
        if iterations >= cfg.max_iterations:
            break
        s = (s - tangential_inverse(cfg, residual)).truncate(size)
        iterations += 1

    series = AdicSeries.from_poly(s, size)
    return SolveResult(
        series=series,
        residual_valuations=valuations,
        converged=converged,
        divisor=cfg.divisor.format(),
        iterations=iterations,
        certificate=certify(cfg, series) if converged else None,
    )


def graded_normalization(op: WeylOp) -> Tuple[WeylOp, int]:
    """(raise^k * op, k) with the least k making every term graded."""
    k = max((j - i for i, j in op.terms), default=0)
    k = max(k, 0)
    if k == 0:
        return op, 0
    return weyl_mul(WeylOp.raising(op.pair, k), op), k


def classify_point(op: WeylOp, spec: OrderSpec = STANDARD) -> str:
    if op.is_zero():
        raise AlgebraError("invalid_input", "zero operator")
    if spec.mode == "dual":
        op = swap_pair(op)
    if leading_coefficient(op, STANDARD)(0) != 0:
        return "ordinary"
    shifted, _ = graded_normalization(op)
    forms = to_graded(shifted)
    order = max(p.degree for p in forms.values())
    base = forms.get(0)
    if base is not None and base.degree == order:
        return "regular-singular"
    return "other"


def indicial_polynomial(op: WeylOp, normalize_grading: bool = True, digits: Optional[int] = None) -> IndicialData:
    if op.is_zero():
        raise AlgebraError("invalid_input", "zero operator")
    shifted, k = graded_normalization(op) if normalize_grading else (op, 0)
    forms = to_graded(shifted)
    poly = forms.get(0, Poly([], "G")).with_var("lambda")
    if poly.is_zero():
        raise AlgebraError("invalid_input", "indicial polynomial vanishes identically")
    roots = roots_exact_first(poly, digits) if poly.degree > 0 else []
    return IndicialData(poly, roots, op.pair.shift, k)


def radius_bound(op: WeylOp) -> Any:
    """Least modulus of a root of the leading coefficient; the expansion point is skipped when regular singular."""
    if op.is_zero():
        raise AlgebraError("invalid_input", "zero operator has no leading coefficient")
    lead = leading_coefficient(op, STANDARD)
    if lead.degree <= 0:
        return mp.inf
    roots = poly_roots(lead)
    if classify_point(op) == "regular-singular":
        tol = tolerance(config.FLOAT_TOLERANCE_DIGITS)
        roots = [r for r in roots if magnitude(r) > tol]
    if not roots:
        return mp.inf
    return min(magnitude(r) for r in roots)


def solve_ordinary(op: WeylOp, seed: Optional[Poly] = None, precision: Optional[int] = None, label: str = "") -> SolveResult:
    cfg = SolveConfig(
        op,
        WeylOp.lowering(op.pair),
        STANDARD,
        seed,
        precision or config.DEFAULT_PRECISION,
        label=label or "ordinary",
    )
    return newton_iterate(cfg)


def solve_dual(op: WeylOp, seed: Optional[Poly] = None, precision: Optional[int] = None, label: str = "") -> SolveResult:
    if leading_coefficient(op, DUAL)(0) == 0:
        raise AlgebraError("invalid_input", "dual-order leading coefficient vanishes at 0")
    cfg = SolveConfig(
        op,
        WeylOp.raising(op.pair),
        DUAL,
        seed,
        precision or config.DEFAULT_PRECISION,
        label=label or "dual",
    )
    return newton_iterate(cfg)


def solve_frobenius(
    op: WeylOp,
    lam: Any,
    precision: Optional[int] = None,
    seed: Optional[Poly] = None,
    label: str = "",
) -> SolveResult:
    lam = normalize(lam)
    data = indicial_polynomial(op)
    value = data.polynomial(lam)
    if value != 0 and not (is_big(value) and magnitude(value) <= tolerance(config.FLOAT_TOLERANCE_DIGITS)):
        raise AlgebraError("invalid_input", f"{format_scalar(lam)} is not a root of the indicial polynomial")
    hits = data.resonances(lam)
    if hits:
        raise AlgebraError("resonant_root", f"indicial roots differ by {hits[0]} steps from {format_scalar(lam)}")
    shifted, lift = graded_normalization(op)
    divisor = GradedDivisor(op.pair, lam)
    cfg = SolveConfig(
        shifted,
        divisor.op,
        GRADED,
        seed,
        precision or config.DEFAULT_PRECISION,
        label=label or "frobenius",
    )
    result = newton_iterate(cfg)
    result.lam = lam
    if lift:
        result.certified_operator = shifted.format()
    if lam != 0:
        result.prefactor = f"{op.pair.raise_sym}^({format_scalar(lam)})"
    return result
