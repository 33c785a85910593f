import unittest
from fractions import Fraction

from dmodule.opdsl import (
    BinOp,
    DSLSyntaxError,
    Gen,
    Num,
    Pow,
    free_identifiers,
    lower,
    parse_bindings,
    parse_expr,
    parse_operator,
    pretty,
    target_pair,
    tokenize,
)
from dmodule.tools.common.results import AlgebraError
from dmodule.tools.weyl import AA, XD, WeylOp, weyl_mul

X = WeylOp.raising(XD)
D = WeylOp.lowering(XD)


class ParseTests(unittest.TestCase):
    def test_tree_shape(self):
        node = parse_expr("X*D^2 - X")
        self.assertEqual(node, BinOp("-", BinOp("*", Gen("X"), Pow(Gen("D"), 2)), Gen("X")))

    def test_rational_literal(self):
        self.assertEqual(parse_expr("3/4"), Num(Fraction(3, 4)))

    def test_pretty_round_trip(self):
        texts = [
            "X*D^2 - X",
            "a - (b - c)",
            "(1/2)^2*X",
            "-X^2 + (-D)^3",
            "(X + D)*(X - D)",
            "ADAG^2*(A - ADAG)^2*(ADAG*A - 1 + alpha)",
            "X*(D*X)*D",
        ]
        for text in texts:
            node = parse_expr(text)
            self.assertEqual(parse_expr(pretty(node)), node, text)

    def test_pretty_drops_redundant_parentheses(self):
        self.assertEqual(pretty(parse_expr("((X))*(D^2)")), "X*D^2")
        self.assertEqual(pretty(parse_expr("a - (b - c)")), "a - (b - c)")


class SyntaxErrorTests(unittest.TestCase):
    def assertSyntaxError(self, text, offset):
        with self.assertRaises(DSLSyntaxError) as ctx:
            parse_expr(text)
        self.assertEqual(ctx.exception.code, "syntax_error")
        self.assertEqual(ctx.exception.offset, offset)
        self.assertIn(f"at byte {offset}", ctx.exception.message)

    def test_unexpected_character(self):
        self.assertSyntaxError("X + ?", 4)

    def test_non_ascii_character(self):
        with self.assertRaises(DSLSyntaxError) as ctx:
            tokenize("X + é")
        self.assertEqual(ctx.exception.offset, 4)

    def test_exponent_must_be_an_integer(self):
        self.assertSyntaxError("D^1/2", 2)
        self.assertSyntaxError("X + 2^(1)", 6)

    def test_unclosed_parenthesis(self):
        self.assertSyntaxError("(X + D", 6)

    def test_juxtaposition_is_not_a_product(self):
        self.assertSyntaxError("X D", 2)

    def test_zero_denominator(self):
        self.assertSyntaxError("X + 1/0", 4)

    def test_empty_input(self):
        self.assertSyntaxError("", 0)


class LoweringTests(unittest.TestCase):
    def test_airy(self):
        self.assertEqual(parse_operator("D^2 - X"), D ** 2 - X)

    def test_written_order_is_kept(self):
        self.assertEqual(parse_operator("D*X"), weyl_mul(X, D) + 1)

    def test_bindings(self):
        op = parse_operator("X*D + lam", {"lam": Fraction(1, 3)})
        self.assertEqual(op, weyl_mul(X, D) + Fraction(1, 3))
        with self.assertRaises(AlgebraError) as ctx:
            parse_operator("X*D + lam")
        self.assertEqual(ctx.exception.code, "unbound_identifier")

    def test_ladder_only_text_stays_on_its_pair(self):
        op = parse_operator("A*ADAG")
        self.assertEqual(op.pair, AA)
        self.assertEqual(op, WeylOp.grade(AA) - 2)

    def test_mixed_text_lowers_onto_xd(self):
        self.assertEqual(parse_operator("A + X"), D + X.scale(2))
        self.assertEqual(parse_operator("ADAG*A"), WeylOp.grade(AA))
        self.assertEqual(parse_operator("ADAG*A + 0*X"), weyl_mul(D - X, D + X))

    def test_grading_element(self):
        self.assertEqual(parse_operator("G"), weyl_mul(X, D))
        self.assertEqual(target_pair(parse_expr("G - A")), AA)

    def test_explicit_pair(self):
        self.assertEqual(lower(parse_expr("A"), {}, AA), WeylOp.lowering(AA))
        with self.assertRaises(AlgebraError) as ctx:
            lower(parse_expr("X"), {}, AA)
        self.assertEqual(ctx.exception.code, "pair_mismatch")

    def test_free_identifiers(self):
        self.assertEqual(free_identifiers(parse_expr("a*X + b - a")), ["a", "b"])


class BindingTests(unittest.TestCase):
    def test_parse_bindings(self):
        self.assertEqual(parse_bindings("a=1/2, b=-3"), {"a": Fraction(1, 2), "b": Fraction(-3)})
        self.assertEqual(parse_bindings(None), {})
        self.assertEqual(parse_bindings(" , "), {})

    def test_bad_bindings(self):
        for text in ("X=1", "a", "a=half", "1a=2"):
            with self.assertRaises(AlgebraError) as ctx:
                parse_bindings(text)
            self.assertEqual(ctx.exception.code, "invalid_input", text)


if __name__ == '__main__':
    unittest.main()
