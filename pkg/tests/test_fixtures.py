import json
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError

from dmodule.tools.common.results import AlgebraError
from dmodule.tools.fixtures import (
    Fixture,
    fixture_from_text,
    load_fixtures,
    run_fixture,
    run_fixtures,
    solve_fixture,
)


class CorpusTests(unittest.TestCase):
    def test_corpus_loads(self):
        names = [fixture.name for fixture in load_fixtures()]

        self.assertEqual(len(names), 10)
        self.assertIn("airy_seed_one", names)
        self.assertIn("heun_band", names)

    def test_whole_corpus_passes(self):
        reports = run_fixtures()

        self.assertEqual(len(reports), 10)
        for report in reports:
            self.assertTrue(report.passed, f"{report.name}: {report.mismatches or report.error}")
            self.assertGreater(report.checked, 0)

    def test_airy_coefficients_to_forty(self):
        report = run_fixtures("airy_seed_one")[0]
        result = solve_fixture(load_fixtures()[0])

        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 121)
        self.assertEqual(result.series.coefficient(3), Fraction(1, 6))
        self.assertEqual(result.series.coefficient(6), Fraction(1, 180))
        self.assertEqual(result.series.coefficient(4), 0)

    def test_operator_file_fixture_checks_valuation_band(self):
        fixture = [f for f in load_fixtures() if f.name == "heun_band"][0]
        report = run_fixture(fixture)

        self.assertTrue(fixture.operator)
        self.assertTrue(report.passed)
        self.assertEqual(report.mismatches, [])

    def test_unknown_name(self):
        with self.assertRaises(AlgebraError) as ctx:
            run_fixtures("nope")
        self.assertEqual(ctx.exception.code, "invalid_input")

    def test_missing_directory(self):
        with self.assertRaises(AlgebraError) as ctx:
            run_fixtures(directory=Path(tempfile.gettempdir()) / "dmodule-no-such-dir")
        self.assertEqual(ctx.exception.code, "invalid_input")


class FixtureModelTests(unittest.TestCase):
    def test_needs_exactly_one_operator(self):
        with self.assertRaises(ValidationError):
            Fixture(name="x", oracle="1")
        with self.assertRaises(ValidationError):
            Fixture(name="x", operator="D", operator_file="d.op", oracle="1")

    def test_needs_an_oracle_or_band(self):
        with self.assertRaises(ValidationError):
            Fixture(name="x", operator="D")
        self.assertTrue(Fixture(name="x", operator="D", valuation_band=True).valuation_band)

    def test_precision_must_be_positive(self):
        with self.assertRaises(ValidationError):
            Fixture(name="x", operator="D", oracle="1", precision=0)


class AdHocFixtureTests(unittest.TestCase):
    def test_airy_from_text(self):
        fixture = fixture_from_text("D^2 - X", power="3*k", oracle="3**k*poch(1/3, k)/fact(3*k)", precision=30)
        report = run_fixture(fixture)

        self.assertEqual(fixture.name, "adhoc")
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 30)

    def test_bindings_reach_the_oracle(self):
        fixture = fixture_from_text("D - a", "a=2", oracle="a**k/fact(k)", precision=8)

        self.assertEqual(fixture.bindings, {"a": "2"})
        self.assertTrue(run_fixture(fixture).passed)

    def test_wrong_oracle_reports_mismatches(self):
        report = run_fixture(fixture_from_text("D^2 - X", power="3*k", oracle="1", precision=7))

        self.assertFalse(report.passed)
        self.assertEqual([m["power"] for m in report.mismatches], [3, 6])
        self.assertEqual(report.mismatches[0]["got"], "1/6")

    def test_solver_error_is_captured(self):
        report = run_fixture(fixture_from_text("D^2 - b*X", oracle="1", precision=5))

        self.assertFalse(report.passed)
        self.assertEqual(report.error["code"], "unbound_identifier")

    def test_power_expression_must_be_integral(self):
        fixture = fixture_from_text("D - 1", power="k/2", oracle="1", precision=4)
        with self.assertRaises(AlgebraError):
            run_fixture(fixture)

    def test_directory_with_operator_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            (root / "exp.op").write_text("D - 1\n", encoding="utf-8")
            (root / "exp.json").write_text(
                json.dumps({"name": "exp", "operator_file": "exp.op", "oracle": "1/fact(k)", "precision": 6}),
                encoding="utf-8",
            )
            reports = run_fixtures(directory=root)

        self.assertEqual([r.name for r in reports], ["exp"])
        self.assertTrue(reports[0].passed)


if __name__ == '__main__':
    unittest.main()
