import json
import math
import random
import unittest
from fractions import Fraction

from dmodule.tools.adic import (
    AdicSeries,
    Valuation,
    distance_valuation,
    series_from_payload,
    series_payload,
    ultrametric_check,
    valuation,
)
from dmodule.tools.common.results import AlgebraError
from dmodule.tools.poly import Poly


def random_poly(rng, var="X"):
    size = rng.randint(0, 8)
    return Poly([Fraction(rng.randint(-3, 3), rng.randint(1, 4)) if rng.random() < 0.6 else 0 for _ in range(size)], var)


class ValuationTests(unittest.TestCase):
    def test_ordering_and_text(self):
        self.assertLess(Valuation(2), Valuation(3))
        self.assertLess(Valuation(2), 5)
        self.assertEqual(str(Valuation(4, exact=False)), ">=4")
        self.assertEqual(str(Valuation(math.inf)), "inf")
        self.assertEqual(Valuation(4, exact=False).to_json(), ">=4")
        self.assertEqual(Valuation(4).to_json(), 4)

    def test_valuation_is_additive_on_products(self):
        rng = random.Random(11)
        for _ in range(200):
            f, g = random_poly(rng), random_poly(rng)
            if f.is_zero() or g.is_zero():
                self.assertTrue(valuation(f * g).is_infinite)
                continue
            self.assertEqual(valuation(f * g).value, valuation(f).value + valuation(g).value)

    def test_valuation_of_sum_is_at_least_the_minimum(self):
        rng = random.Random(12)
        for _ in range(200):
            f, g = random_poly(rng), random_poly(rng)
            self.assertGreaterEqual(valuation(f + g).value, min(valuation(f).value, valuation(g).value))

    def test_strong_triangle_inequality(self):
        rng = random.Random(13)
        for _ in range(200):
            a, b, c = random_poly(rng), random_poly(rng), random_poly(rng)
            self.assertTrue(ultrametric_check(a, b, c))

    def test_distance_is_symmetric_and_separates(self):
        rng = random.Random(14)
        for _ in range(50):
            a, b = random_poly(rng), random_poly(rng)
            self.assertEqual(distance_valuation(a, b), distance_valuation(b, a))
            self.assertTrue(distance_valuation(a, a).is_infinite)


class AdicSeriesTests(unittest.TestCase):
    def test_truncation_below_precision(self):
        s = AdicSeries([1, 2, 3, 4], precision=3)
        self.assertEqual(s.coefficient(2), 3)
        with self.assertRaises(AlgebraError):
            s.coefficient(3)
        self.assertEqual(s.to_poly(), Poly([1, 2, 3], "X"))

    def test_product_precision(self):
        f = AdicSeries([1, 1], precision=3)
        g = AdicSeries({1: 1}, precision=4)
        product = f * g
        # min(3 + 1, 4 + 0)
        self.assertEqual(product.precision, 4)
        self.assertEqual(product, AdicSeries({1: 1, 2: 1}, precision=4))

    def test_sum_takes_smaller_precision(self):
        total = AdicSeries([1], precision=5) + AdicSeries([0, 1], precision=2)
        self.assertEqual(total.precision, 2)

    def test_valuation_of_unknown_tail(self):
        self.assertEqual(AdicSeries([], precision=6).valuation(), Valuation(6, exact=False))
        self.assertTrue(AdicSeries([]).valuation().is_infinite)

    def test_shift_moves_precision(self):
        shifted = AdicSeries([1, 2], precision=4).shift(2)
        self.assertEqual(shifted.precision, 6)
        self.assertEqual(shifted.coefficient(3), 2)

    def test_generators_do_not_mix(self):
        with self.assertRaises(AlgebraError):
            AdicSeries([1], generator="X") + AdicSeries([1], generator="D")

    def test_payload_survives_json(self):
        series = AdicSeries({0: 1, 3: Fraction(1, 6), 6: Fraction(1, 180)}, precision=9)
        payload = json.loads(json.dumps(series_payload(series, prefactor="X^(1/3)")))

        self.assertEqual(payload["coefficients"][1], {"power": 3, "num": "1", "den": "6"})
        self.assertEqual(payload["prefactor"], "X^(1/3)")
        self.assertEqual(series_from_payload(payload), series)


if __name__ == '__main__':
    unittest.main()
