import random
import unittest
from fractions import Fraction

from dmodule.tools.adic import AdicSeries
from dmodule.tools.common.results import AlgebraError
from dmodule.tools.realizations import (
    FallingSeries,
    FunctionTable,
    apply_difference,
    bessel_operator,
    bessel_series,
    difference_bessel,
    difference_bessel_table,
    falling,
    realize_difference,
    realize_differential,
)
from dmodule.tools.newton import solve_frobenius
from dmodule.tools.weyl import AA, XD, WeylOp, weyl_mul

X = WeylOp.raising(XD)
D = WeylOp.lowering(XD)


def random_op(rng, top=2):
    terms = {}
    for i in range(top + 1):
        for j in range(top + 1):
            if rng.random() < 0.5:
                terms[(i, j)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return WeylOp(XD, terms)


class FallingFactorialTests(unittest.TestCase):
    def test_values(self):
        self.assertEqual(falling(5, 0), 1)
        self.assertEqual(falling(5, 3), 60)
        self.assertEqual(falling(2, 3), 0)
        self.assertEqual(falling(Fraction(1, 2), 2), Fraction(-1, 4))

    def test_falling_series_stops_at_x(self):
        series = FallingSeries({0: 1, 1: 2, 4: 7})
        self.assertEqual(series.evaluate(3), 1 + 2 * 3)
        self.assertEqual(series.evaluate(4), 1 + 2 * 4 + 7 * 24)

    def test_table(self):
        table = FallingSeries({2: 1}).table(0, 4)
        self.assertEqual(table.values, (0, 0, 2, 6, 12))
        self.assertEqual(table.domain, [0, 1, 2, 3, 4])


class FunctionTableTests(unittest.TestCase):
    def test_difference(self):
        table = FunctionTable(0, (0, 1, 4, 9))
        self.assertEqual(table.difference(), FunctionTable(0, (1, 3, 5)))

    def test_raise_x_keeps_origin(self):
        table = FunctionTable(0, (Fraction(1), Fraction(2), Fraction(3)))
        # (X f)(x) = x f(x-1)
        self.assertEqual(table.raise_x(), FunctionTable(0, (0, 1, 4)))
        self.assertEqual(FunctionTable(2, (Fraction(1), Fraction(1))).raise_x(), FunctionTable(3, (3,)))

    def test_out_of_range(self):
        table = FunctionTable(1, (Fraction(1),))
        with self.assertRaises(AlgebraError) as ctx:
            table[0]
        self.assertEqual(ctx.exception.code, "domain_too_small")
        with self.assertRaises(AlgebraError):
            table.difference()

    def test_canonical_commutation_on_tables(self):
        f = FallingSeries({0: 3, 1: -1, 2: Fraction(1, 2), 3: 2}).table(0, 10)
        dx = apply_difference(D, apply_difference(X, f))
        xd = apply_difference(X, apply_difference(D, f))
        for x in range(10):
            self.assertEqual(dx[x] - xd[x], f[x])

    def test_monomials_act_on_falling_factorials(self):
        # X . x^(d) = x^(d+1) and D . x^(d) = d x^(d-1)
        f = FallingSeries({3: 1}).table(0, 8)
        self.assertEqual(apply_difference(X, f), FallingSeries({4: 1}).table(0, 8))
        self.assertEqual(apply_difference(D, f), FallingSeries({2: 3}).table(0, 7))

    def test_realization_respects_products(self):
        rng = random.Random(2718)
        for _ in range(100):
            a, b = random_op(rng), random_op(rng)
            f = FunctionTable(0, tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(15)))
            product = apply_difference(weyl_mul(a, b), f)
            nested = apply_difference(a, apply_difference(b, f))

            self.assertEqual(product.start, 0)
            self.assertEqual(nested.start, 0)
            self.assertGreaterEqual(min(product.stop, nested.stop), 10)
            for x in range(min(product.stop, nested.stop) + 1):
                self.assertEqual(product[x], nested[x])

    def test_table_too_narrow(self):
        with self.assertRaises(AlgebraError) as ctx:
            apply_difference(D ** 3, FunctionTable(0, (Fraction(1), Fraction(2))))
        self.assertEqual(ctx.exception.code, "domain_too_small")

    def test_pair_must_be_xd(self):
        with self.assertRaises(AlgebraError):
            apply_difference(WeylOp.lowering(AA), FunctionTable(0, (Fraction(1),) * 4))


class BesselTests(unittest.TestCase):
    def test_series_matches_frobenius_solution(self):
        for n in (1, 2):
            result = solve_frobenius(bessel_operator(n), n, precision=16)
            expected = bessel_series(n, 16 + n)
            scale = expected.coefficient(n)
            for k in range(0, 16, 2):
                self.assertEqual(result.series.coefficient(k) * scale, expected.coefficient(n + k))

    def test_bessel_series_terms(self):
        series = bessel_series(0, 5)
        self.assertEqual(series, AdicSeries({0: 1, 2: Fraction(-1, 4), 4: Fraction(1, 64)}, precision=5))

    def test_realizations_share_coefficients(self):
        series = bessel_series(1, 6)
        self.assertEqual(realize_differential(series), [0, Fraction(1, 2), 0, Fraction(-1, 16), 0, Fraction(1, 384)])
        self.assertEqual(realize_difference(series).evaluate(1), Fraction(1, 2))

    def test_difference_bessel_values(self):
        self.assertEqual(difference_bessel(0, 0), 1)
        self.assertEqual(difference_bessel(0, 2), 1 - Fraction(2, 4))
        self.assertEqual(difference_bessel(1, 1), Fraction(1, 2))

    def test_difference_bessel_equation(self):
        for n in range(4):
            table = difference_bessel_table(n, 14)
            image = apply_difference(bessel_operator(n), table)

            self.assertLessEqual(image.start, 0)
            self.assertGreaterEqual(image.stop, 12)
            for x in range(13):
                self.assertEqual(image[x], 0, f"n={n} x={x}")

    def test_negative_arguments(self):
        with self.assertRaises(AlgebraError):
            difference_bessel(-1, 3)
        with self.assertRaises(AlgebraError):
            bessel_series(-2, 4)


if __name__ == '__main__':
    unittest.main()
