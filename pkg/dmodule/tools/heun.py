from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Literal, Optional, Sequence, Tuple

from mpmath import mp
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .. import config
from .common.results import AlgebraError
from .common.scalars import (
    Scalar,
    exact,
    format_scalar,
    is_big,
    magnitude,
    sadd,
    sdiv,
    smul,
    ssub,
    tolerance,
)
from .ore import OreOp, ore_pseudo_divide, ore_right_divide, weyl_to_ore
from .poly import Poly, roots_exact_first
from .weyl import XD, WeylOp, apply_to_poly, weyl_mul

logger = logging.getLogger(__name__)

Matrix = List[List[Scalar]]

HEUN_SYMBOL = "A"
HAT_SYMBOL = "Ahat"


class HeunParams(BaseModel):
    """Exact parameters of a Heun-type operator; `a` and `beta` are unused by the confluent variant."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    variant: Literal["heun", "heun-hat", "confluent"] = "heun"
    a: Fraction = Fraction(0)
    alpha: Fraction
    beta: Fraction = Fraction(0)
    gamma: Fraction
    delta: Fraction
    epsilon: Fraction

    @field_validator("a", "alpha", "beta", "gamma", "delta", "epsilon", mode="before")
    @classmethod
    def _exact(cls, value: Any) -> Fraction:
        return exact(value)

    @model_validator(mode="after")
    def _constraint(self) -> "HeunParams":
        if self.variant != "confluent":
            excess = self.alpha + self.beta - self.gamma - self.delta - self.epsilon + 1
            if excess != 0:
                raise AlgebraError("constraint_violated", f"alpha + beta - gamma - delta - epsilon + 1 = {excess}")
        return self


@dataclass(frozen=True)
class DivisionSeeds:
    c1: Fraction
    c2: Fraction
    c3: Fraction


def division_seeds(p: HeunParams) -> DivisionSeeds:
    if p.variant == "heun":
        return DivisionSeeds(
            c1=p.alpha * p.beta * p.a - p.gamma * p.epsilon * (p.a - 1),
            c2=p.alpha * p.beta + p.gamma * (1 - p.delta - p.epsilon),
            c3=p.delta + p.epsilon - p.gamma - 1,
        )
    if p.variant == "heun-hat":
        return DivisionSeeds(
            c1=p.alpha * p.beta * p.a - (p.delta - 1) * p.epsilon * p.a,
            c2=p.alpha * p.beta + (p.gamma + p.epsilon) * (1 - p.delta),
            c3=p.delta - p.epsilon - p.gamma - 1,
        )
    # confluent: R_1 = delta*A + c1, Q-side multiplier eps*A + c2
    return DivisionSeeds(
        c1=p.alpha * p.epsilon - p.delta * p.gamma,
        c2=(p.alpha - p.gamma) * p.epsilon,
        c3=p.epsilon,
    )


def _x(power: int = 1) -> WeylOp:
    return WeylOp.raising(XD, power)


def _d(power: int = 1) -> WeylOp:
    return WeylOp.lowering(XD, power)


def heun_operator(p: HeunParams) -> WeylOp:
    """X(X-1)(X-a)D^2 + [g(X-1)(X-a) + eX(X-1) + dX(X-a)]D + ab X, without the accessory term."""
    x = _x()
    one = WeylOp.scalar(XD, 1)
    xm1 = x - one
    xma = x - p.a
    first = weyl_mul(xm1, xma).scale(p.gamma) + weyl_mul(x, xm1).scale(p.epsilon) + weyl_mul(x, xma).scale(p.delta)
    return weyl_mul(weyl_mul(x, weyl_mul(xm1, xma)), _d(2)) + weyl_mul(first, _d()) + x.scale(p.alpha * p.beta)


def heun_hyp_operator(p: HeunParams) -> WeylOp:
    """X(X-1)D^2 + [g(X-1) + (d+e)X]D + ab."""
    x = _x()
    first = (x - 1).scale(p.gamma) + x.scale(p.delta + p.epsilon)
    return weyl_mul(weyl_mul(x, x - 1), _d(2)) + weyl_mul(first, _d()) + p.alpha * p.beta


def heun_hat_operator(p: HeunParams) -> WeylOp:
    """X(X-1)D^2 + [(g+e)(X-1) + dX]D + ab."""
    x = _x()
    first = (x - 1).scale(p.gamma + p.epsilon) + x.scale(p.delta)
    return weyl_mul(weyl_mul(x, x - 1), _d(2)) + weyl_mul(first, _d()) + p.alpha * p.beta


def confluent_heun_operator(p: HeunParams) -> WeylOp:
    """X(X-1)D^2 + [g(X-1) + dX + eX(X-1)]D + a e X."""
    x = _x()
    first = (x - 1).scale(p.gamma) + x.scale(p.delta) + weyl_mul(x, x - 1).scale(p.epsilon)
    return weyl_mul(weyl_mul(x, x - 1), _d(2)) + weyl_mul(first, _d()) + x.scale(p.alpha * p.epsilon)


def confluent_hyp_operator(p: HeunParams) -> WeylOp:
    """X D^2 + (g + eX) D + a e, annihilating 1F1(alpha; gamma; -e x)."""
    x = _x()
    return weyl_mul(x, _d(2)) + weyl_mul(x.scale(p.epsilon) + p.gamma, _d()) + p.alpha * p.epsilon


def a_generator(p: HeunParams) -> WeylOp:
    """A = X D + gamma."""
    return weyl_mul(_x(), _d()) + p.gamma


def a_dagger(p: HeunParams) -> WeylOp:
    """A-dagger = (X-1) D + delta + epsilon - 1."""
    return weyl_mul(_x() - 1, _d()) + (p.delta + p.epsilon - 1)


def hat_generator(p: HeunParams) -> WeylOp:
    """(X-1) D + delta - 1."""
    return weyl_mul(_x() - 1, _d()) + (p.delta - 1)


def hat_partner(p: HeunParams) -> WeylOp:
    """X D + gamma + epsilon."""
    return weyl_mul(_x(), _d()) + (p.gamma + p.epsilon)


@dataclass(frozen=True)
class DivisionEngine:
    """operator * g^k = (P_k(g) u + Q_k(g)) divisor + R_k(g) with
    P' = (g-1)P, Q' = (g+1)Q, R' = rho_p(g)P + rho_q(g)Q + g R."""

    operator: WeylOp
    divisor: WeylOp
    generator: WeylOp
    multiplier: WeylOp
    seeds: Tuple[Poly, Poly, Poly]
    rho_p: Poly
    rho_q: Poly
    shift: Fraction
    symbol: str


def division_engine(p: HeunParams) -> DivisionEngine:
    s = division_seeds(p)
    if p.variant == "heun":
        v = HEUN_SYMBOL
        g = Poly([0, 1], v)
        return DivisionEngine(
            operator=heun_operator(p),
            divisor=heun_hyp_operator(p),
            generator=a_generator(p),
            multiplier=_x(),
            seeds=(Poly([1], v), Poly([-p.a], v), Poly([s.c1, p.epsilon * (p.a - 1)], v)),
            rho_p=-((g - p.gamma) * (g - 1)),
            rho_q=-(g * g + g.scale(s.c3) + s.c2),
            shift=p.gamma,
            symbol=v,
        )
    if p.variant == "heun-hat":
        v = HAT_SYMBOL
        g = Poly([0, 1], v)
        return DivisionEngine(
            operator=heun_operator(p),
            divisor=heun_hat_operator(p),
            generator=hat_generator(p),
            multiplier=_x() - 1,
            seeds=(Poly([1], v), Poly([1 - p.a], v), Poly([s.c1, p.epsilon * p.a], v)),
            rho_p=g * (g - (p.delta - 1)),
            rho_q=-(g * g - g.scale(s.c3) + s.c2),
            shift=p.delta - 1,
            symbol=v,
        )
    v = HEUN_SYMBOL
    g = Poly([0, 1], v)
    return DivisionEngine(
        operator=confluent_heun_operator(p),
        divisor=confluent_hyp_operator(p),
        generator=a_generator(p),
        multiplier=_x(),
        seeds=(Poly([1], v), Poly([-1], v), Poly([s.c1, p.delta], v)),
        rho_p=(g - 1) * (g - p.gamma),
        rho_q=-(g.scale(s.c3) + s.c2),
        shift=p.gamma,
        symbol=v,
    )


@dataclass(frozen=True)
class ABasisTriple:
    P: Poly
    Q: Poly
    R: Poly


def eval_at_operator(p: Poly, g: WeylOp) -> WeylOp:
    out = WeylOp.zero(g.pair)
    for coeff in reversed(p.coeffs):
        out = weyl_mul(out, g) + coeff
    return out


def _monomial_triples(engine: DivisionEngine, degree: int) -> List[ABasisTriple]:
    v = engine.symbol
    g = Poly([0, 1], v)
    P, Q, R = engine.seeds
    triples = [ABasisTriple(P, Q, R)]
    for _ in range(degree):
        P, Q, R = (g - 1) * P, (g + 1) * Q, engine.rho_p * P + engine.rho_q * Q + g * R
        triples.append(ABasisTriple(P, Q, R))
    return triples


def verify_triple(engine: DivisionEngine, s: Poly, triple: ABasisTriple) -> bool:
    lhs = weyl_mul(engine.operator, eval_at_operator(s, engine.generator))
    left = weyl_mul(eval_at_operator(triple.P, engine.generator), engine.multiplier) + eval_at_operator(
        triple.Q, engine.generator
    )
    rhs = weyl_mul(left, engine.divisor) + eval_at_operator(triple.R, engine.generator)
    return lhs == rhs


def div_in_A(params: HeunParams, s: Poly, verify: Optional[bool] = None) -> ABasisTriple:
    """(P, Q, R) with operator * s(g) = (P(g) u + Q(g)) * divisor + R(g)."""
    if s.is_zero():
        raise AlgebraError("invalid_input", "s must be nonzero")
    engine = division_engine(params)
    s = s.with_var(engine.symbol)
    zero = Poly([], engine.symbol)
    P, Q, R = zero, zero, zero
    for k, triple in enumerate(_monomial_triples(engine, s.degree)):
        c = s[k]
        if c == 0:
            continue
        P, Q, R = P + triple.P.scale(c), Q + triple.Q.scale(c), R + triple.R.scale(c)
    out = ABasisTriple(P, Q, R)
    if (config.VERIFY_DIVISIONS if verify is None else verify) and not verify_triple(engine, s, out):
        raise AlgebraError("verification_failed", f"division of the {params.variant} operator did not re-multiply")
    return out


def invariance_condition(params: HeunParams, basis: str) -> str:
    if basis == "X":
        return "alpha = -n or beta = -n" if params.variant != "confluent" else "alpha = -n"
    return "delta = -n" if params.variant == "confluent" else "epsilon = -n"


def remainder_matrix(params: HeunParams, n: int, basis: str = "A") -> Matrix:
    """Matrix of the remainder map on span{1, g, ..., g^n}; column j holds the image of g^j."""
    if n < 0:
        raise AlgebraError("invalid_input", "dimension must be nonnegative")
    if basis == "A":
        engine = division_engine(params)
        columns = [t.R for t in _monomial_triples(engine, n)]
    elif basis == "X":
        op = heun_operator(params) if params.variant != "confluent" else confluent_heun_operator(params)
        columns = [apply_to_poly(op, Poly.monomial(j, 1, "x")) for j in range(n + 1)]
    else:
        raise AlgebraError("invalid_input", f"unknown basis {basis!r}")
    for j, col in enumerate(columns):
        if col.degree > n:
            raise AlgebraError(
                "invariance_violated",
                f"image of basis element {j} has degree {col.degree} > {n}; needs {invariance_condition(params, basis)}",
            )
    return [[columns[j][i] for j in range(n + 1)] for i in range(n + 1)]


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    size = len(a)
    out: Matrix = []
    for i in range(size):
        row = []
        for j in range(size):
            acc: Any = Fraction(0)
            for k in range(size):
                acc = sadd(acc, smul(a[i][k], b[k][j]))
            row.append(acc)
        out.append(row)
    return out


def charpoly(matrix: Matrix, var: str = "q") -> Poly:
    """det(q I - M) by Faddeev-LeVerrier; exact for rational entries."""
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise AlgebraError("invalid_input", "matrix must be square")
    coeffs: List[Any] = [Fraction(0)] * (size + 1)
    coeffs[size] = Fraction(1)
    work: Matrix = [[Fraction(0)] * size for _ in range(size)]
    for k in range(1, size + 1):
        product = _matmul(matrix, work)
        work = [
            [sadd(product[i][j], coeffs[size - k + 1]) if i == j else product[i][j] for j in range(size)]
            for i in range(size)
        ]
        trace: Any = Fraction(0)
        for i, row in enumerate(_matmul(matrix, work)):
            trace = sadd(trace, row[i])
        coeffs[size - k] = sdiv(-trace, k)
    return Poly(coeffs, var)


def _is_zero(value: Any, tol: Any) -> bool:
    if value == 0:
        return True
    return tol is not None and is_big(value) and magnitude(value) <= tol


def nullspace(matrix: Matrix, tol: Any = None) -> List[List[Scalar]]:
    """Basis of the kernel by pivoted elimination; entries at or below tol count as zero."""
    rows = [list(r) for r in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        best = None
        for i in range(r, nrows):
            if _is_zero(rows[i][col], tol):
                continue
            if best is None or magnitude(rows[i][col]) > magnitude(rows[best][col]):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        pivot = rows[r][col]
        rows[r] = [sdiv(v, pivot) for v in rows[r]]
        for i in range(nrows):
            if i != r and not _is_zero(rows[i][col], None):
                factor = rows[i][col]
                rows[i] = [ssub(v, smul(factor, w)) for v, w in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    basis: List[List[Scalar]] = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec: List[Any] = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for row_index, pc in enumerate(pivots):
            vec[pc] = -rows[row_index][free]
        basis.append(vec)
    return basis


@dataclass
class EigenSolution:
    qstar: Scalar
    sstar: Optional[Poly]
    e_list: List[Scalar] = field(default_factory=list)
    residual: Any = Fraction(0)
    multiplicity: int = 1
    defective: bool = False
    note: Optional[str] = None


def _group_roots(roots: Sequence[Scalar], tol: Any) -> List[Tuple[Scalar, int]]:
    groups: List[Tuple[Scalar, int]] = []
    for root in roots:
        for index, (seen, count) in enumerate(groups):
            if root == seen or (is_big(root) or is_big(seen)) and magnitude(ssub(root, seen)) <= tol:
                groups[index] = (seen, count + 1)
                break
        else:
            groups.append((root, 1))
    return groups


def eigen_solve(matrix: Matrix, digits: Optional[int] = None, symbol: str = HEUN_SYMBOL) -> List[EigenSolution]:
    digits = digits or config.DEFAULT_DIGITS
    size = len(matrix)
    if size == 0 or any(len(row) != size for row in matrix):
        raise AlgebraError("invalid_input", "matrix must be square and nonempty")
    poly = charpoly(matrix)
    tol = tolerance(digits // 2)
    scale = max([magnitude(v) for row in matrix for v in row] + [1])
    solutions: List[EigenSolution] = []
    with mp.workdps(digits + config.ROOT_GUARD_DIGITS):
        for root, mult in _group_roots(roots_exact_first(poly, digits), tol * scale):
            shifted = [[ssub(matrix[i][j], root) if i == j else matrix[i][j] for j in range(size)] for i in range(size)]
            basis = nullspace(shifted, tol * scale if is_big(root) else None)
            if not basis:
                logger.warning("no eigenvector for q* = %s at tolerance", format_scalar(root))
                solutions.append(EigenSolution(root, None, residual=None, multiplicity=mult, defective=True))
                continue
            note = f"geometric multiplicity {len(basis)} of {mult}" if len(basis) < mult else None
            for vec in basis:
                lead_index = max(i for i, v in enumerate(vec) if not _is_zero(v, tol))
                lead = vec[lead_index]
                vec = [sdiv(v, lead) for v in vec[: lead_index + 1]]
                image = [
                    ssub(sum_row(matrix[i], vec), smul(root, vec[i] if i < len(vec) else 0)) for i in range(size)
                ]
                residual = max(magnitude(v) for v in image) if is_big(root) else Fraction(0)
                if not is_big(root) and any(v != 0 for v in image):
                    raise AlgebraError("verification_failed", "exact eigenvector check failed")
                solutions.append(EigenSolution(root, Poly(vec, symbol), residual=residual, multiplicity=mult, note=note))
    return solutions


def sum_row(row: Sequence[Scalar], vec: Sequence[Scalar]) -> Scalar:
    acc: Any = Fraction(0)
    for a, b in zip(row, vec):
        acc = sadd(acc, smul(a, b))
    return acc


def extract_e(sstar: Poly, shift: Any, digits: Optional[int] = None) -> List[Scalar]:
    """e_k = shift - r_k for the roots r_k of sstar, from (g - shift + e)/e = (X/e) D + 1."""
    if sstar.is_zero():
        raise AlgebraError("invalid_input", "sstar must be nonzero")
    if sstar.degree == 0:
        return []
    tol = tolerance((digits or config.DEFAULT_DIGITS) // 2)
    out: List[Scalar] = []
    for root in roots_exact_first(sstar, digits):
        e = ssub(shift, root)
        if _is_zero(e, tol * max(1, magnitude(shift))):
            raise AlgebraError("degenerate_factor", f"root {format_scalar(root)} of sstar equals the shift {format_scalar(shift)}")
        out.append(e)
    return out


@dataclass
class HeunEigenReport:
    params: HeunParams
    n: int
    basis: str
    matrix: Matrix
    charpoly: Poly
    solutions: List[EigenSolution]


def default_dimension(params: HeunParams, basis: str = "A") -> int:
    if basis == "X":
        for value in (params.alpha, params.beta) if params.variant != "confluent" else (params.alpha,):
            if value <= 0 and value.denominator == 1:
                return int(-value)
    else:
        value = params.delta if params.variant == "confluent" else params.epsilon
        if value <= 0 and value.denominator == 1:
            return int(-value)
    raise AlgebraError("invariance_violated", f"no invariant subspace: needs {invariance_condition(params, basis)}")


def heun_eigen(params: HeunParams, n: Optional[int] = None, basis: str = "A", digits: Optional[int] = None) -> HeunEigenReport:
    n = default_dimension(params, basis) if n is None else n
    matrix = remainder_matrix(params, n, basis)
    symbol = "x" if basis == "X" else division_engine(params).symbol
    solutions = eigen_solve(matrix, digits, symbol)
    if basis == "A":
        shift = division_engine(params).shift
        for sol in solutions:
            if sol.sstar is None:
                continue
            try:
                sol.e_list = extract_e(sol.sstar, shift, digits)
            except AlgebraError as exc:
                if exc.code != "degenerate_factor":
                    raise
                sol.note = exc.message
    return HeunEigenReport(params, n, basis, matrix, charpoly(matrix), solutions)


@dataclass
class FactorizationCheck:
    verified: bool
    quotient: OreOp
    remainder: OreOp
    residual: Any


def verify_factorization(gen: WeylOp, heun: WeylOp, qstar: Any, digits: Optional[int] = None) -> FactorizationCheck:
    """gen = Q (heun - qstar) over C(x)[D]: exact for rational data, fraction-free with a tolerance otherwise."""
    divisor = heun - qstar
    if not (gen.is_big or divisor.is_big):
        q, r = ore_right_divide(weyl_to_ore(gen), weyl_to_ore(divisor))
        return FactorizationCheck(r.is_zero(), q, r, Fraction(0) if r.is_zero() else r.max_norm())
    tol = tolerance(digits or config.FLOAT_TOLERANCE_DIGITS)
    with mp.workdps((digits or config.DEFAULT_DIGITS) + config.ROOT_GUARD_DIGITS):
        lhs = weyl_to_ore(gen, polynomial=True)
        c, q, r = ore_pseudo_divide(lhs, weyl_to_ore(divisor, polynomial=True))
        scale = max(1, _scaled_norm(lhs, c))
        residual = r.max_norm() / scale if not r.is_zero() else magnitude(0)
    return FactorizationCheck(residual <= tol, q, r, residual)


def _scaled_norm(op: OreOp, c: Poly) -> Any:
    return OreOp([c * coeff for coeff in op.coeffs], op.var).max_norm()


def reducible_parameters(alpha: Any, beta: Any, gamma: Any, e: Any) -> Tuple[HeunParams, Fraction]:
    """Heun data (epsilon = -1) whose local solution is 3F2(alpha, beta, e+1; gamma, e; x)."""
    alpha, beta, gamma, e = (exact(v) for v in (alpha, beta, gamma, e))
    denom = (e - alpha) * (e - beta)
    if denom == 0:
        raise AlgebraError("invalid_input", "e must differ from alpha and beta")
    a = e * (e - gamma + 1) / denom
    qstar = alpha * beta * (e + 1) * (e - gamma + 1) / denom
    epsilon = Fraction(-1)
    delta = alpha + beta - gamma - epsilon + 1
    params = HeunParams(variant="heun", a=a, alpha=alpha, beta=beta, gamma=gamma, delta=delta, epsilon=epsilon)
    return params, qstar


def confluent_e1(params: HeunParams, qstar: Any) -> Scalar:
    """e_1 = (q* + 2 gamma delta - alpha epsilon + gamma - epsilon + 1) / delta for the delta = -1 matrix."""
    p = params
    top = sadd(qstar, 2 * p.gamma * p.delta - p.alpha * p.epsilon + p.gamma - p.epsilon + 1)
    return sdiv(top, p.delta)
