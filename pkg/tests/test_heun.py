import random
import unittest
from fractions import Fraction

from dmodule.tools.common.results import AlgebraError
from dmodule.tools.heun import (
    HeunParams,
    charpoly,
    confluent_e1,
    default_dimension,
    div_in_A,
    division_engine,
    eigen_solve,
    extract_e,
    heun_eigen,
    heun_operator,
    reducible_parameters,
    nullspace,
    remainder_matrix,
    verify_factorization,
    verify_triple,
)
from dmodule.tools.hypergeometric import factored_series, factorization_operator, heun_identity_series, verify_identity_series
from dmodule.tools.poly import Poly


def random_rational(rng, low=-9, high=9):
    return Fraction(rng.randint(low, high), rng.randint(1, 5))


def random_params(rng, variant):
    alpha, beta, gamma, epsilon = (random_rational(rng) for _ in range(4))
    a = random_rational(rng, 1, 9) + 1
    if variant == "confluent":
        return HeunParams(variant=variant, alpha=alpha, gamma=gamma, delta=random_rational(rng), epsilon=epsilon)
    delta = alpha + beta - gamma - epsilon + 1
    return HeunParams(variant=variant, a=a, alpha=alpha, beta=beta, gamma=gamma, delta=delta, epsilon=epsilon)


def close(x, y, tol=1e-20):
    return abs(complex(x) - complex(y)) <= tol * max(1.0, abs(complex(y)))


class HeunParamsTests(unittest.TestCase):
    def test_constraint_is_enforced(self):
        with self.assertRaises(AlgebraError) as ctx:
            HeunParams(variant="heun", a=2, alpha=1, beta=1, gamma=1, delta=1, epsilon=2)
        self.assertEqual(ctx.exception.code, "constraint_violated")

    def test_confluent_ignores_the_constraint(self):
        p = HeunParams(variant="confluent", alpha=1, gamma=2, delta=-1, epsilon=3)
        self.assertEqual(p.beta, 0)

    def test_floats_are_rejected(self):
        with self.assertRaises(AlgebraError):
            HeunParams(variant="confluent", alpha=0.5, gamma=2, delta=-1, epsilon=3)

    def test_rational_strings_are_accepted(self):
        p = HeunParams(variant="confluent", alpha="1/3", gamma=2, delta=-1, epsilon=3)
        self.assertEqual(p.alpha, Fraction(1, 3))


class DivisionTests(unittest.TestCase):
    def test_division_re_multiplies(self):
        rng = random.Random(1889)
        for index in range(210):
            variant = ("heun", "heun-hat", "confluent")[index % 3]
            params = random_params(rng, variant)
            s = Poly([random_rational(rng) for _ in range(rng.randint(1, 3))])
            if s.is_zero():
                s = Poly([1])
            triple = div_in_A(params, s, verify=True)
            self.assertTrue(verify_triple(division_engine(params), s.with_var(division_engine(params).symbol), triple))

    def test_monomial_division_leading_terms(self):
        rng = random.Random(6151)
        for index in range(60):
            variant = ("heun", "heun-hat", "confluent")[index % 3]
            params = random_params(rng, variant)
            n = rng.randint(0, 8)
            engine = division_engine(params)
            g = Poly([0, 1], engine.symbol)
            triple = div_in_A(params, Poly.monomial(n, 1, engine.symbol), verify=False)
            q_seed = {"heun": -params.a, "heun-hat": 1 - params.a, "confluent": Fraction(-1)}[variant]
            lead = {
                "heun": (params.epsilon + n) * (params.a - 1),
                "heun-hat": (params.epsilon + n) * params.a,
                "confluent": params.delta + n,
            }[variant]

            self.assertEqual(triple.P, (g - 1) ** n)
            self.assertEqual(triple.Q, ((g + 1) ** n).scale(q_seed))
            self.assertLessEqual(triple.R.degree, n + 1)
            self.assertEqual(triple.R[n + 1], lead)

    def test_zero_multiplier(self):
        params = random_params(random.Random(0), "heun")
        with self.assertRaises(AlgebraError):
            div_in_A(params, Poly([]))


class ReducibleExampleTests(unittest.TestCase):
    def setUp(self):
        self.params, self.qstar = reducible_parameters(1, 2, 3, 4)

    def test_parameters(self):
        self.assertEqual(self.params.a, Fraction(4, 3))
        self.assertEqual(self.params.delta, 2)
        self.assertEqual(self.params.epsilon, -1)
        self.assertEqual(self.qstar, Fraction(10, 3))

    def test_remainder_matrix(self):
        matrix = remainder_matrix(self.params, 1)

        self.assertEqual(matrix, [[Fraction(11, 3), Fraction(-1, 3)], [Fraction(-1, 3), Fraction(11, 3)]])
        self.assertEqual(charpoly(matrix), Poly([Fraction(40, 3), Fraction(-22, 3), 1], "q"))

    def test_eigen_data(self):
        report = heun_eigen(self.params)
        by_q = {sol.qstar: sol for sol in report.solutions}

        self.assertEqual(report.n, 1)
        self.assertEqual(set(by_q), {Fraction(10, 3), Fraction(4)})
        self.assertEqual(by_q[Fraction(10, 3)].sstar, Poly([1, 1], "A"))
        self.assertEqual(by_q[Fraction(10, 3)].e_list, [4])
        self.assertEqual(by_q[Fraction(4)].e_list, [2])

    def test_identity_series(self):
        check = verify_identity_series(factored_series(self.params, [4]), heun_identity_series(self.params, [4]), 30)
        self.assertTrue(check.equal)
        self.assertEqual(check.compared, 30)

    def test_factorization(self):
        check = verify_factorization(factorization_operator(self.params, [4]), heun_operator(self.params), self.qstar)

        self.assertTrue(check.verified)
        self.assertTrue(check.remainder.is_zero())

    def test_wrong_accessory_parameter_fails(self):
        check = verify_factorization(factorization_operator(self.params, [4]), heun_operator(self.params), 4)
        self.assertFalse(check.verified)

    def test_other_rational_data(self):
        params, qstar = reducible_parameters(Fraction(1, 2), Fraction(1, 3), Fraction(3, 4), Fraction(2, 5))
        report = heun_eigen(params)
        hits = [sol for sol in report.solutions if sol.qstar == qstar]

        self.assertEqual(len(hits), 1)
        self.assertEqual(hits[0].e_list, [Fraction(2, 5)])
        check = verify_factorization(factorization_operator(params, [Fraction(2, 5)]), heun_operator(params), qstar)
        self.assertTrue(check.verified)

    def test_e_must_differ_from_alpha(self):
        with self.assertRaises(AlgebraError):
            reducible_parameters(1, 2, 3, 1)


class InvarianceTests(unittest.TestCase):
    def test_subspace_too_small(self):
        params, _ = reducible_parameters(1, 2, 3, 4)
        with self.assertRaises(AlgebraError) as ctx:
            remainder_matrix(params, 0)
        self.assertEqual(ctx.exception.code, "invariance_violated")

    def test_default_dimension_needs_integer_epsilon(self):
        params = HeunParams(variant="heun", a=2, alpha=1, beta=2, gamma=3, delta=Fraction(1, 2), epsilon=Fraction(1, 2))
        with self.assertRaises(AlgebraError) as ctx:
            default_dimension(params)
        self.assertEqual(ctx.exception.code, "invariance_violated")

    def test_x_basis_matrix(self):
        params = HeunParams(variant="heun", a=2, alpha=-1, beta=2, gamma=3, delta=Fraction(-3, 2), epsilon=Fraction(1, 2))

        self.assertEqual(default_dimension(params, "X"), 1)
        self.assertEqual(remainder_matrix(params, 1, "X"), [[0, 6], [-2, Fraction(-13, 2)]])

    def test_unknown_basis(self):
        params, _ = reducible_parameters(1, 2, 3, 4)
        with self.assertRaises(AlgebraError):
            remainder_matrix(params, 1, "B")


class ConfluentMatrixTests(unittest.TestCase):
    def test_matrix_and_characteristic_polynomial(self):
        rng = random.Random(1926)
        for _ in range(10):
            alpha, gamma, eps = random_rational(rng), random_rational(rng), random_rational(rng)
            params = HeunParams(variant="confluent", alpha=alpha, gamma=gamma, delta=-1, epsilon=eps)
            matrix = remainder_matrix(params, 1)

            self.assertEqual(
                matrix,
                [[alpha * eps + gamma, gamma + alpha * eps - gamma * eps], [-1, alpha * eps + eps - 1]],
            )
            trace = 2 * alpha * eps + gamma + eps - 1
            det = alpha ** 2 * eps ** 2 + alpha * eps ** 2 + alpha * gamma * eps
            self.assertEqual(charpoly(matrix), Poly([det, -trace, 1], "q"))

    def test_e1_matches_eigenvector_roots(self):
        rng = random.Random(1927)
        for _ in range(10):
            params = HeunParams(
                variant="confluent",
                alpha=random_rational(rng),
                gamma=random_rational(rng),
                delta=-1,
                epsilon=random_rational(rng),
            )
            for sol in heun_eigen(params).solutions:
                if sol.sstar is None or sol.note:
                    continue
                self.assertEqual(len(sol.e_list), 1)
                self.assertTrue(close(sol.e_list[0], confluent_e1(params, sol.qstar)))


class LinearAlgebraTests(unittest.TestCase):
    def test_charpoly_of_triangular_matrix(self):
        matrix = [[1, 2, 3], [0, 4, 5], [0, 0, 6]]
        self.assertEqual(charpoly(matrix), Poly.from_roots([1, 4, 6], "q"))

    def test_nullspace(self):
        basis = nullspace([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]])
        self.assertEqual(basis, [[-2, 1]])

    def test_eigen_solve_exact(self):
        solutions = eigen_solve([[Fraction(2), Fraction(1)], [Fraction(0), Fraction(3)]])
        self.assertEqual(sorted(sol.qstar for sol in solutions), [2, 3])

    def test_eigen_solve_jordan_block(self):
        one, zero = Fraction(1), Fraction(0)
        solutions = eigen_solve([[one, one, zero], [zero, one, one], [zero, zero, one]])

        self.assertEqual(len(solutions), 1)
        self.assertEqual(solutions[0].qstar, 1)
        self.assertIsInstance(solutions[0].qstar, Fraction)
        self.assertEqual(solutions[0].multiplicity, 3)
        self.assertEqual(solutions[0].sstar, Poly([1], "A"))
        self.assertFalse(solutions[0].defective)
        self.assertEqual(solutions[0].note, "geometric multiplicity 1 of 3")

    def test_eigen_solve_repeated_third(self):
        third, zero = Fraction(1, 3), Fraction(0)
        matrix = [[third, Fraction(2), zero], [zero, third, zero], [zero, zero, third]]
        solutions = eigen_solve(matrix)

        self.assertEqual(charpoly(matrix), Poly.from_roots([third] * 3, "q"))
        self.assertEqual([sol.qstar for sol in solutions], [third, third])
        self.assertTrue(all(isinstance(sol.qstar, Fraction) for sol in solutions))
        self.assertEqual([sol.multiplicity for sol in solutions], [3, 3])

    def test_extract_e_rejects_degenerate_root(self):
        with self.assertRaises(AlgebraError) as ctx:
            extract_e(Poly([-3, 1], "A"), 3)
        self.assertEqual(ctx.exception.code, "degenerate_factor")
        self.assertEqual(extract_e(Poly([1], "A"), 3), [])


class FloatingEigenTests(unittest.TestCase):
    def test_three_dimensional_problem(self):
        alpha, beta, gamma = Fraction(1, 3), Fraction(3, 4), Fraction(5, 2)
        epsilon = Fraction(-2)
        params = HeunParams(
            variant="heun",
            a=3,
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            delta=alpha + beta - gamma - epsilon + 1,
            epsilon=epsilon,
        )
        report = heun_eigen(params, digits=50)

        self.assertEqual(report.n, 2)
        self.assertEqual(len(report.solutions), 3)
        for sol in report.solutions:
            self.assertEqual(len(sol.e_list), 2)
            identity = verify_identity_series(
                factored_series(params, sol.e_list), heun_identity_series(params, sol.e_list), 30, digits=50
            )
            self.assertTrue(identity.equal)
            check = verify_factorization(
                factorization_operator(params, sol.e_list), heun_operator(params), sol.qstar, digits=50
            )
            self.assertTrue(check.verified)
            self.assertLess(float(abs(check.residual)), 1e-25)


if __name__ == '__main__':
    unittest.main()
