"""Exact evaluation of small closed-form expressions such as "3**k*poch(1/3, k)/fact(3*k)"."""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Any, Callable, Dict, Mapping

from .results import AlgebraError
from .scalars import exact, pochhammer


def _fact(n: Any) -> Fraction:
    n = exact(n)
    if n.denominator != 1 or n < 0:
        raise AlgebraError("invalid_input", f"fact needs a nonnegative integer, got {n}")
    return Fraction(math.factorial(int(n)))


def _poch(a: Any, n: Any) -> Fraction:
    n = exact(n)
    if n.denominator != 1 or n < 0:
        raise AlgebraError("invalid_input", f"poch needs a nonnegative integer count, got {n}")
    return exact(pochhammer(exact(a), int(n)))


def _binom(n: Any, k: Any) -> Fraction:
    k = exact(k)
    if k.denominator != 1 or k < 0:
        raise AlgebraError("invalid_input", f"binom needs a nonnegative integer k, got {k}")
    return _poch(exact(n) - k + 1, k) / _fact(k)


FUNCTIONS: Dict[str, Callable[..., Fraction]] = {"fact": _fact, "poch": _poch, "binom": _binom}


def evaluate_expression(text: str, env: Mapping[str, Any]) -> Fraction:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise AlgebraError("syntax_error", f"bad expression {text!r}: {exc.msg}") from exc
    values = {name: exact(value) for name, value in env.items()}

    def walk(node: ast.AST) -> Fraction:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in values:
                raise AlgebraError("unbound_identifier", f"identifier {node.id!r} has no binding")
            return values[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = walk(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right == 0:
                    raise AlgebraError("invalid_input", f"division by zero in {text!r}")
                return left / right
            if isinstance(node.op, ast.Pow):
                if right.denominator != 1:
                    raise AlgebraError("invalid_input", f"non-integer power in {text!r}")
                return left ** int(right)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in FUNCTIONS:
            if node.keywords:
                raise AlgebraError("syntax_error", f"keyword arguments are not supported in {text!r}")
            return FUNCTIONS[node.func.id](*(walk(arg) for arg in node.args))
        raise AlgebraError("syntax_error", f"unsupported construct {type(node).__name__} in {text!r}")

    return walk(tree)
