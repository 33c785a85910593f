"""Regression corpus: operator, divisor and seed plus a closed-form coefficient oracle per fixture."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from .. import config
from ..opdsl import parse_bindings, parse_operator
from .adic import Valuation
from .common.expressions import evaluate_expression
from .common.results import AlgebraError
from .common.scalars import exact, format_scalar
from .hypergeometric import valuation_band
from .newton import SolveResult
from .solvers import seed_poly, solve_by_divisor

logger = logging.getLogger(__name__)


class Fixture(BaseModel):
    name: str
    description: str = ""
    operator: Optional[str] = None
    operator_file: Optional[str] = None
    bindings: Dict[str, str] = Field(default_factory=dict)
    divisor: str = "d"
    seed: str = "1"
    precision: int = Field(default=12, ge=1)
    power: str = "k"
    oracle: Optional[str] = None
    valuation_band: bool = False
    note: Optional[str] = None

    @model_validator(mode="after")
    def _one_operator(self) -> "Fixture":
        if (self.operator is None) == (self.operator_file is None):
            raise ValueError("fixture needs exactly one of operator / operator_file")
        if self.oracle is None and not self.valuation_band:
            raise ValueError("fixture needs an oracle or the valuation band check")
        return self

    def exact_bindings(self) -> Dict[str, Fraction]:
        return {name: exact(value) for name, value in self.bindings.items()}


def load_fixture(path: Path) -> Fixture:
    fixture = Fixture.model_validate_json(path.read_text(encoding="utf-8"))
    if fixture.operator_file is not None:
        text = (path.parent / fixture.operator_file).read_text(encoding="utf-8").strip()
        fixture = fixture.model_copy(update={"operator": text})
    return fixture


def load_fixtures(directory: Optional[Path] = None) -> List[Fixture]:
    directory = Path(directory or config.FIXTURES_DIR)
    if not directory.is_dir():
        raise AlgebraError("invalid_input", f"fixture directory {directory} does not exist")
    return [load_fixture(path) for path in sorted(directory.glob("*.json"))]


@dataclass
class FixtureReport:
    name: str
    passed: bool
    checked: int = 0
    mismatches: List[Dict[str, Any]] = field(default_factory=list)
    residual_valuations: List[Valuation] = field(default_factory=list)
    certificate: Optional[Valuation] = None
    error: Optional[Dict[str, str]] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "mismatches": self.mismatches,
            "residual_valuations": [v.to_json() for v in self.residual_valuations],
            "certificate": self.certificate.to_json() if self.certificate else None,
            "error": self.error,
        }


def solve_fixture(fixture: Fixture) -> SolveResult:
    bindings = fixture.exact_bindings()
    op = parse_operator(fixture.operator or "", bindings)
    seed = seed_poly(parse_operator(fixture.seed, bindings), fixture.divisor)
    return solve_by_divisor(op, fixture.divisor, seed, fixture.precision, bindings, label=fixture.name)


def _compare(fixture: Fixture, result: SolveResult, report: FixtureReport) -> None:
    env: Dict[str, Any] = dict(fixture.exact_bindings())
    expected: Dict[int, Fraction] = {}
    k = 0
    while True:
        env["k"] = k
        power = evaluate_expression(fixture.power, env)
        if power.denominator != 1 or power < 0:
            raise AlgebraError("invalid_input", f"power expression gave {power} at k = {k}")
        if power >= fixture.precision:
            break
        expected[int(power)] = evaluate_expression(fixture.oracle or "0", env)
        k += 1
        if k > fixture.precision:
            raise AlgebraError("invalid_input", "power expression does not grow with k")
    for power in range(fixture.precision):
        got = result.series.coefficient(power)
        want = expected.get(power, Fraction(0))
        report.checked += 1
        if got != want:
            report.mismatches.append({"power": power, "expected": format_scalar(want), "got": format_scalar(got)})


def run_fixture(fixture: Fixture) -> FixtureReport:
    report = FixtureReport(fixture.name, passed=False)
    try:
        result = solve_fixture(fixture)
    except AlgebraError as exc:
        report.error = {"code": exc.code, "message": exc.message}
        return report
    report.residual_valuations = result.residual_valuations
    report.certificate = result.certificate
    if fixture.oracle is not None:
        _compare(fixture, result, report)
    if fixture.valuation_band:
        for n, v, inside in valuation_band(result):
            report.checked += 1
            if not inside:
                report.mismatches.append({"iterate": n, "valuation": v, "band": [n + 1, 2 * n + 2]})
    report.passed = result.converged and not report.mismatches
    if not report.passed:
        logger.warning("fixture %s failed with %d mismatches", fixture.name, len(report.mismatches))
    return report


def run_fixtures(name: Optional[str] = None, directory: Optional[Path] = None) -> List[FixtureReport]:
    fixtures = load_fixtures(directory)
    if name is not None:
        fixtures = [f for f in fixtures if f.name == name]
        if not fixtures:
            raise AlgebraError("invalid_input", f"no fixture named {name!r}")
    return [run_fixture(f) for f in fixtures]


def fixture_from_text(operator: str, bindings: str = "", **fields: Any) -> Fixture:
    """Ad-hoc fixture built from CLI-style strings."""
    values = {k: str(v) for k, v in parse_bindings(bindings).items()}
    return Fixture(name=fields.pop("name", "adhoc"), operator=operator, bindings=values, **fields)
