"""Command layer: one pydantic request model and one executor per CLI command, all returning JSON envelopes."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, Literal, Optional

from mpmath import mp, mpf
from pydantic import BaseModel, Field

from . import config, telemetry
from .command_catalog import list_commands
from .opdsl import parse_operator
from .policy import check_request_policy, policy_denied_response
from .tools.adic import series_payload
from .tools.common.results import AlgebraError, from_exception, success
from .tools.common.scalars import Scalar, exact, format_scalar, is_big, magnitude, scalar_payload, ssub
from .tools.fixtures import run_fixtures
from .tools.heun import (
    HeunEigenReport,
    HeunParams,
    EigenSolution,
    division_engine,
    heun_eigen,
    verify_factorization,
)
from .tools.hypergeometric import (
    SolvedSeries,
    factored_series,
    factorization_operator,
    heun_identity_series,
    heun_local_series,
    verify_identity_series,
)
from .tools.newton import classify_point, indicial_polynomial, radius_bound
from .tools.ore import ore_right_divide, weyl_to_ore
from .tools.realizations import (
    apply_difference,
    bessel_operator,
    difference_bessel,
    difference_bessel_table,
    realize_difference,
)
from .tools.solvers import seed_poly, solve_by_divisor
from .tools.weyl import OrderSpec, divide_first_order, divide_nonmonic

logger = logging.getLogger(__name__)

OrderName = Literal["standard", "dual", "graded"]


def _bindings(params: Dict[str, str]) -> Dict[str, Fraction]:
    return {name: exact(value) for name, value in params.items()}


def _execute_command(name: str, payload: Dict[str, Any], fn: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
    allowed, reason = check_request_policy(name, payload)
    if not allowed:
        result = policy_denied_response(name, reason or "denied")
        result["inputs"] = payload
    else:
        try:
            result = fn()
        except Exception as exc:
            if not isinstance(exc, AlgebraError):
                logger.exception("command %s failed", name)
            result = from_exception(exc, command=name, inputs=payload)
    telemetry.record_command(name, payload, result)
    return result


# -- solve -------------------------------------------------------------------


class SolveRequest(BaseModel):
    operator: str
    divisor: str = "d"
    order: Optional[OrderName] = None
    seed: str = "1"
    precision: int = Field(default=config.DEFAULT_PRECISION, ge=1)
    params: Dict[str, str] = Field(default_factory=dict)


def _solve(req: SolveRequest) -> Dict[str, Any]:
    bindings = _bindings(req.params)
    op = parse_operator(req.operator, bindings)
    seed = seed_poly(parse_operator(req.seed, bindings), req.divisor)
    result = solve_by_divisor(op, req.divisor, seed, req.precision, bindings, req.order, label="solve")
    return success(
        command="solve",
        inputs=req.model_dump(),
        operator=op.format(),
        certified_operator=result.certified_operator or op.format(),
        series=series_payload(result.series, result.prefactor),
        residual_valuations=[v.to_json() for v in result.residual_valuations],
        iterations=result.iterations,
        certificate=result.certificate.to_json() if result.certificate else None,
        verified=result.converged,
    )


def solve(req: SolveRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("solve", payload, lambda: _solve(req))


# -- indicial ----------------------------------------------------------------


class IndicialRequest(BaseModel):
    operator: str
    params: Dict[str, str] = Field(default_factory=dict)
    order: Literal["standard", "dual"] = "standard"
    digits: int = Field(default=config.DEFAULT_DIGITS, ge=1)


def _indicial(req: IndicialRequest) -> Dict[str, Any]:
    op = parse_operator(req.operator, _bindings(req.params))
    point = classify_point(op, OrderSpec(req.order))
    data = indicial_polynomial(op, digits=req.digits)
    roots = []
    for root in data.roots:
        roots.append({"root": scalar_payload(root, req.digits), "resonances": data.resonances(root)})
    radius = radius_bound(op)
    return success(
        command="indicial",
        inputs=req.model_dump(),
        point=point,
        indicial_polynomial=data.polynomial.format(),
        left_power=data.left_power,
        roots=roots,
        radius_bound=None if radius == mp.inf else mp.nstr(radius, 20),
        verified=True,
    )


def indicial(req: IndicialRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("indicial", payload, lambda: _indicial(req))


# -- divide ------------------------------------------------------------------


class DivideRequest(BaseModel):
    operator: str
    by: str
    order: OrderName = "standard"
    params: Dict[str, str] = Field(default_factory=dict)
    ore: bool = False
    nonmonic: bool = False


def _divide(req: DivideRequest) -> Dict[str, Any]:
    bindings = _bindings(req.params)
    f = parse_operator(req.operator, bindings)
    k = parse_operator(req.by, bindings)
    if req.ore:
        q, r = ore_right_divide(weyl_to_ore(f), weyl_to_ore(k))
        return success(
            command="divide",
            inputs=req.model_dump(),
            ring="ore",
            quotient=q.format(),
            remainder=r.format(),
            verified=True,
        )
    divide = divide_nonmonic if req.nonmonic else divide_first_order
    q, r = divide(f, k, OrderSpec(req.order))
    return success(
        command="divide",
        inputs=req.model_dump(),
        ring="weyl",
        quotient=q.format(),
        remainder=r.format(),
        remainder_coefficients=[{"power": p, **scalar_payload(c)} for p, c in r.items()],
        verified=config.VERIFY_DIVISIONS,
    )


def divide(req: DivideRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("divide", payload, lambda: _divide(req))


# -- heun-eigen / factor-check / identity-check --------------------------------


class HeunRequest(BaseModel):
    variant: Literal["heun", "heun-hat", "confluent"] = "heun"
    a: str = "0"
    alpha: str
    beta: str = "0"
    gamma: str
    delta: Optional[str] = None
    epsilon: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=0)
    basis: Literal["A", "X"] = "A"
    digits: int = Field(default=config.DEFAULT_DIGITS, ge=1)

    def heun_params(self) -> HeunParams:
        values = {
            "a": exact(self.a),
            "alpha": exact(self.alpha),
            "beta": exact(self.beta),
            "gamma": exact(self.gamma),
        }
        delta = exact(self.delta) if self.delta is not None else None
        epsilon = exact(self.epsilon) if self.epsilon is not None else None
        if self.variant == "confluent":
            if delta is None or epsilon is None:
                raise AlgebraError("invalid_input", "the confluent variant needs both delta and epsilon")
        else:
            # alpha + beta - gamma - delta - epsilon + 1 = 0 fixes the missing one
            free = values["alpha"] + values["beta"] - values["gamma"] + 1
            if delta is None and epsilon is None:
                raise AlgebraError("invalid_input", "give delta or epsilon")
            if delta is None:
                delta = free - epsilon
            elif epsilon is None:
                epsilon = free - delta
        return HeunParams(variant=self.variant, delta=delta, epsilon=epsilon, **values)


def _scalar_or_none(value: Any, digits: int) -> Any:
    return None if value is None else scalar_payload(value, digits)


def _eigen_payload(sol: EigenSolution, digits: int) -> Dict[str, Any]:
    return {
        "qstar": scalar_payload(sol.qstar, digits),
        "sstar_coeffs": [scalar_payload(c, digits) for c in sol.sstar.coeffs] if sol.sstar is not None else None,
        "e_list": [scalar_payload(e, digits) for e in sol.e_list],
        "residual": None if sol.residual is None else format_scalar(sol.residual, 5),
        "multiplicity": sol.multiplicity,
        "defective": sol.defective,
        "note": sol.note,
    }


def _report(req: HeunRequest) -> HeunEigenReport:
    return heun_eigen(req.heun_params(), req.n, req.basis, req.digits)


def _heun_eigen(req: HeunRequest) -> Dict[str, Any]:
    report = _report(req)
    return success(
        command="heun-eigen",
        inputs=req.model_dump(),
        dimension=report.n + 1,
        matrix=[[scalar_payload(v, req.digits) for v in row] for row in report.matrix],
        charpoly=report.charpoly.format(req.digits),
        eigen=[_eigen_payload(sol, req.digits) for sol in report.solutions],
        verified=not any(sol.defective for sol in report.solutions),
    )


def heun_eigen_command(req: HeunRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("heun-eigen", payload, lambda: _heun_eigen(req))


def parse_scalar(text: str) -> Scalar:
    """Exact rational when the text is one, otherwise a big float."""
    try:
        return exact(text)
    except AlgebraError:
        try:
            return mpf(text)
        except (ValueError, TypeError) as exc:
            raise AlgebraError("invalid_input", f"not a number: {text!r}") from exc


def _selected(report: HeunEigenReport, qstar: Optional[str], digits: int) -> List[EigenSolution]:
    usable = [sol for sol in report.solutions if sol.sstar is not None and sol.e_list]
    if qstar is None:
        if not usable:
            raise AlgebraError("defective_eigenvalue", "no eigenvalue with a usable factor")
        return usable
    target = parse_scalar(qstar)
    with mp.workdps(digits):
        best = min(usable, key=lambda sol: magnitude(ssub(sol.qstar, target)), default=None)
        if best is None or magnitude(ssub(best.qstar, target)) > mpf(10) ** (-(digits // 2)) * max(1, magnitude(target)):
            raise AlgebraError("invalid_input", f"q* = {qstar} is not an eigenvalue of the remainder matrix")
    return [best]


class FactorCheckRequest(HeunRequest):
    qstar: Optional[str] = None


def _factor_check(req: FactorCheckRequest) -> Dict[str, Any]:
    if req.basis != "A":
        raise AlgebraError("invalid_input", "factor-check works on the A basis")
    params = req.heun_params()
    report = _report(req)
    operator = division_engine(params).operator
    checks = []
    for sol in _selected(report, req.qstar, req.digits):
        gen = factorization_operator(params, sol.e_list)
        result = verify_factorization(gen, operator, sol.qstar, req.digits)
        checks.append(
            {
                "qstar": scalar_payload(sol.qstar, req.digits),
                "e_list": [scalar_payload(e, req.digits) for e in sol.e_list],
                "quotient": result.quotient.format(),
                "remainder": result.remainder.format(),
                "residual": format_scalar(result.residual, 5),
                "verified": result.verified,
            }
        )
    return success(
        command="factor-check",
        inputs=req.model_dump(),
        checks=checks,
        verified=all(item["verified"] for item in checks),
    )


def factor_check(req: FactorCheckRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("factor-check", payload, lambda: _factor_check(req))


class IdentityCheckRequest(HeunRequest):
    qstar: Optional[str] = None
    terms: int = Field(default=30, ge=1)
    local: bool = False


def _identity_check(req: IdentityCheckRequest) -> Dict[str, Any]:
    if req.basis != "A":
        raise AlgebraError("invalid_input", "identity-check works on the A basis")
    params = req.heun_params()
    report = _report(req)
    checks = []
    for sol in _selected(report, req.qstar, req.digits):
        target = heun_identity_series(params, sol.e_list)
        comparisons = [("factorization", verify_identity_series(factored_series(params, sol.e_list), target, req.terms, req.digits))]
        if req.local:
            local = heun_local_series(params, sol.qstar, req.terms)
            comparisons.append(("local", verify_identity_series(SolvedSeries(local.series), target, req.terms, req.digits)))
        for kind, result in comparisons:
            checks.append(
                {
                    "kind": kind,
                    "qstar": scalar_payload(sol.qstar, req.digits),
                    "e_list": [scalar_payload(e, req.digits) for e in sol.e_list],
                    "compared": result.compared,
                    "first_mismatch": result.index,
                    "lhs": _scalar_or_none(result.lhs_value, req.digits),
                    "rhs": _scalar_or_none(result.rhs_value, req.digits),
                    "verified": result.equal,
                }
            )
    return success(
        command="identity-check",
        inputs=req.model_dump(),
        checks=checks,
        verified=all(item["verified"] for item in checks),
    )


def identity_check(req: IdentityCheckRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("identity-check", payload, lambda: _identity_check(req))


# -- difference --------------------------------------------------------------


class DifferenceRequest(BaseModel):
    x: int = Field(ge=0)
    bessel: Optional[int] = Field(default=None, ge=0)
    check: bool = False
    operator: Optional[str] = None
    seed: str = "1"
    precision: Optional[int] = Field(default=None, ge=1)
    params: Dict[str, str] = Field(default_factory=dict)


def _difference(req: DifferenceRequest) -> Dict[str, Any]:
    if req.bessel is not None:
        value = difference_bessel(req.bessel, req.x)
        data: Dict[str, Any] = {"value": scalar_payload(value)}
        verified = True
        if req.check:
            # X^2 shifts twice and D^2 reads two points ahead, so the table runs two past x
            table = difference_bessel_table(req.bessel, req.x + 2)
            image = apply_difference(bessel_operator(req.bessel), table)
            residuals = {x: image[x] for x in image.domain if x <= req.x}
            data["check"] = [{"x": x, **scalar_payload(v)} for x, v in residuals.items()]
            verified = all(v == 0 for v in residuals.values())
        return success(command="difference", inputs=req.model_dump(), **data, verified=verified)

    if req.operator is None:
        raise AlgebraError("invalid_input", "difference needs --bessel or --operator")
    bindings = _bindings(req.params)
    op = parse_operator(req.operator, bindings)
    # falling factorials of degree > x vanish at x, so precision x + 1 makes the value exact
    precision = req.precision or req.x + 1
    result = solve_by_divisor(op, "d", seed_poly(parse_operator(req.seed, bindings), "d"), precision, bindings, label="difference")
    value = realize_difference(result.series).evaluate(req.x)
    return success(
        command="difference",
        inputs=req.model_dump(),
        series=series_payload(result.series),
        value=scalar_payload(value),
        exact=req.x < precision and not is_big(value),
        verified=result.converged,
    )


def difference(req: DifferenceRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("difference", payload, lambda: _difference(req))


# -- fixtures / commands -------------------------------------------------------


class FixturesRequest(BaseModel):
    name: Optional[str] = None
    directory: Optional[str] = None


def _fixtures(req: FixturesRequest) -> Dict[str, Any]:
    reports = run_fixtures(req.name, req.directory)
    return success(
        command="fixtures",
        inputs=req.model_dump(),
        reports=[report.to_json() for report in reports],
        passed=sum(1 for report in reports if report.passed),
        total=len(reports),
        verified=all(report.passed for report in reports),
    )


def fixtures(req: FixturesRequest) -> Dict[str, Any]:
    payload = req.model_dump()
    return _execute_command("fixtures", payload, lambda: _fixtures(req))


def commands() -> Dict[str, Any]:
    return _execute_command(
        "commands", {}, lambda: success(command="commands", inputs={}, commands=list_commands(), verified=True)
    )
