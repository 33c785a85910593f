import random
import unittest
from fractions import Fraction

from dmodule.tools.common.results import AlgebraError
from dmodule.tools.poly import Poly
from dmodule.tools.weyl import (
    AA,
    DUAL,
    GRADED,
    STANDARD,
    XD,
    GeneratorPair,
    GradedDivisor,
    Substitution,
    WeylOp,
    aa_to_xd,
    apply_to_poly,
    change_basis,
    commutator,
    divide_first_order,
    divide_nonmonic,
    f0_op,
    fourier,
    from_graded,
    is_monic,
    leading_coefficient,
    normal_form,
    order_of,
    swap_pair,
    to_graded,
    weyl_mul,
    xd_to_aa,
)

X = WeylOp.raising(XD)
D = WeylOp.lowering(XD)


def random_op(rng, pair, top=2):
    terms = {}
    for i in range(top + 1):
        for j in range(top + 1):
            if rng.random() < 0.5:
                terms[(i, j)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return WeylOp(pair, terms)


def random_poly(rng, degree, var):
    return Poly([Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(degree + 1)], var)


class WeylProductTests(unittest.TestCase):
    def test_canonical_commutation(self):
        self.assertEqual(commutator(D, X), WeylOp.scalar(XD, 1))
        a = WeylOp.lowering(AA)
        adag = WeylOp.raising(AA)
        self.assertEqual(commutator(a, adag), WeylOp.scalar(AA, -2))

    def test_normal_ordering_of_words(self):
        self.assertEqual(normal_form(XD, [(1, "DX")]), weyl_mul(X, D) + 1)
        self.assertEqual(normal_form(XD, [(1, "DDX")]), weyl_mul(X, D ** 2) + D.scale(2))

    def test_unknown_generator_in_word(self):
        with self.assertRaises(AlgebraError):
            normal_form(XD, [(1, "DY")])

    def test_pairs_do_not_mix(self):
        with self.assertRaises(AlgebraError) as ctx:
            weyl_mul(X, WeylOp.lowering(AA))
        self.assertEqual(ctx.exception.code, "pair_mismatch")

    def test_zero_commutator_is_rejected(self):
        with self.assertRaises(AlgebraError):
            GeneratorPair("P", "Q", 0)

    def test_associativity_property(self):
        rng = random.Random(20240611)
        for index in range(200):
            pair = XD if index % 2 else AA
            a, b, c = (random_op(rng, pair) for _ in range(3))
            self.assertEqual(weyl_mul(weyl_mul(a, b), c), weyl_mul(a, weyl_mul(b, c)))

    def test_power_matches_repeated_product(self):
        op = X + D
        self.assertEqual(op ** 3, weyl_mul(op, weyl_mul(op, op)))
        self.assertEqual(op ** 0, WeylOp.scalar(XD, 1))

    def test_format(self):
        self.assertEqual((weyl_mul(X, D ** 2) - X.scale(Fraction(1, 2)) + 3).format(), "X*D^2 - 1/2*X + 3")
        self.assertEqual(WeylOp.zero(XD).format(), "0")


class SwapAndGradingTests(unittest.TestCase):
    def test_swap_pair_round_trip(self):
        rng = random.Random(7)
        for _ in range(50):
            op = random_op(rng, XD)
            swapped = swap_pair(op)
            self.assertEqual(swapped.pair, XD.swapped())
            self.assertEqual(swap_pair(swapped), op)

    def test_graded_form_of_monomials(self):
        op = weyl_mul(X ** 2, D ** 2)
        self.assertEqual(to_graded(op), {0: Poly([0, -1, 1], "G")})
        self.assertEqual(to_graded(X ** 3), {3: Poly([1], "G")})

    def test_graded_round_trip(self):
        rng = random.Random(99)
        for _ in range(50):
            terms = {}
            for i in range(4):
                for j in range(i + 1):
                    if rng.random() < 0.5:
                        terms[(i, j)] = rng.randint(-4, 4)
            op = WeylOp(XD, terms)
            self.assertEqual(from_graded(XD, to_graded(op)), op)

    def test_negative_grade_is_not_graded(self):
        with self.assertRaises(AlgebraError) as ctx:
            to_graded(D)
        self.assertEqual(ctx.exception.code, "not_graded")

    def test_grade_shift_over_ladder_pair(self):
        g = WeylOp.grade(AA)
        adag = WeylOp.raising(AA)
        self.assertEqual(weyl_mul(g, adag), weyl_mul(adag, g + AA.shift))


class DivisionTests(unittest.TestCase):
    def test_standard_division_property(self):
        rng = random.Random(31337)
        for _ in range(200):
            f = random_op(rng, XD, top=3)
            k = D + WeylOp.from_poly(XD, random_poly(rng, rng.randint(0, 2), "X"))
            q, r = divide_first_order(f, k, STANDARD)
            self.assertEqual(weyl_mul(q, k) + f0_op(XD, r, STANDARD), f)
            self.assertEqual(r.var, "X")

    def test_dual_division_property(self):
        rng = random.Random(4242)
        for _ in range(200):
            f = random_op(rng, XD, top=3)
            k = X + WeylOp.from_poly(XD, random_poly(rng, rng.randint(0, 2), "D"), side="lower")
            q, r = divide_first_order(f, k, DUAL)
            self.assertEqual(weyl_mul(q, k) + f0_op(XD, r, DUAL), f)

    def test_division_by_d_keeps_polynomial_part(self):
        f = D ** 2 - X
        q, r = divide_first_order(f, D, STANDARD)
        self.assertEqual(q, D)
        self.assertEqual(r, Poly([0, -1], "X"))

    def test_graded_division(self):
        g = WeylOp.grade(XD)
        divisor = GradedDivisor(XD, 3)
        q, r = divide_first_order(weyl_mul(g, g), divisor.op, GRADED)
        self.assertEqual(q, g + 3)
        self.assertEqual(r, 9)

    def test_graded_division_keeps_raised_terms(self):
        divisor = GradedDivisor(XD, Fraction(1, 2))
        f = weyl_mul(X ** 2, WeylOp.grade(XD)) + X
        q, r = divide_first_order(f, divisor.op, GRADED)
        self.assertEqual(weyl_mul(q, divisor.op) + f0_op(XD, r, GRADED), f)
        self.assertEqual(r, Poly([0, 1, Fraction(1, 2)], "X"))

    def test_non_monic_divisor(self):
        with self.assertRaises(AlgebraError) as ctx:
            divide_first_order(D ** 2, weyl_mul(X, D), STANDARD)
        self.assertEqual(ctx.exception.code, "not_monic")

    def test_order_mismatch(self):
        with self.assertRaises(AlgebraError) as ctx:
            divide_first_order(D ** 3, D ** 2, STANDARD)
        self.assertEqual(ctx.exception.code, "order_mismatch")
        with self.assertRaises(AlgebraError):
            is_monic(D ** 2, STANDARD)

    def test_nonmonic_division_needs_exact_steps(self):
        k = weyl_mul(X, D) + 1
        q, r = divide_nonmonic(weyl_mul(weyl_mul(X, D), k), k, STANDARD)
        self.assertEqual(q, weyl_mul(X, D))
        self.assertTrue(r.is_zero())
        with self.assertRaises(AlgebraError) as ctx:
            divide_nonmonic(D, k, STANDARD)
        self.assertEqual(ctx.exception.code, "not_divisible")

    def test_leading_coefficient_and_order(self):
        op = weyl_mul(X ** 2 - 1, D ** 2) + D
        self.assertEqual(order_of(op, STANDARD), 2)
        self.assertEqual(leading_coefficient(op, STANDARD), Poly([-1, 0, 1], "X"))
        self.assertEqual(order_of(op, DUAL), 2)
        self.assertEqual(leading_coefficient(op, DUAL), Poly([0, 0, 1], "D"))
        self.assertTrue(is_monic(D + X, STANDARD))


class RealizationAndSubstitutionTests(unittest.TestCase):
    def test_apply_to_poly(self):
        airy = D ** 2 - X
        p = Poly([1, 0, 0, Fraction(1, 6)], "x")
        self.assertEqual(apply_to_poly(airy, p), Poly([0, 0, 0, 0, Fraction(-1, 6)], "x"))

    def test_ladder_operators_act_on_polynomials(self):
        p = Poly([0, 0, 1], "x")

        self.assertEqual(apply_to_poly(WeylOp.lowering(AA), p), Poly([0, 2, 0, 1], "x"))
        self.assertEqual(apply_to_poly(WeylOp.raising(AA), p), Poly([0, 2, 0, -1], "x"))

    def test_realization_respects_products(self):
        rng = random.Random(4471)
        for index in range(120):
            pair = XD if index % 2 else AA
            a, b = random_op(rng, pair), random_op(rng, pair)
            p = random_poly(rng, rng.randint(0, 6), "x")

            self.assertEqual(apply_to_poly(weyl_mul(a, b), p), apply_to_poly(a, apply_to_poly(b, p)))

    def test_ladder_round_trip(self):
        forward, back = xd_to_aa(), aa_to_xd()
        rng = random.Random(5)
        for _ in range(30):
            op = random_op(rng, XD)
            self.assertEqual(change_basis(change_basis(op, forward), back), op)

    def test_ladder_images(self):
        shift = aa_to_xd()
        self.assertEqual(shift.apply(WeylOp.lowering(AA)), D + X)
        self.assertEqual(shift.apply(WeylOp.raising(AA)), D - X)

    def test_fourier_exchanges_generators(self):
        airy = D ** 2 - X
        self.assertEqual(fourier().apply(airy), X ** 2 - D)

    def test_inverse_of_affine_substitution(self):
        sub = fourier()
        inv = sub.inverse()
        op = weyl_mul(X, D ** 2) + X
        self.assertEqual(inv.apply(sub.apply(op)), op)

    def test_non_invertible_substitution(self):
        with self.assertRaises(AlgebraError) as ctx:
            Substitution(XD, XD, X, D.scale(2))
        self.assertEqual(ctx.exception.code, "non_invertible_substitution")


if __name__ == '__main__':
    unittest.main()
