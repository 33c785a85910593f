"""Divisor selection for the series solvers: d, x, xd:LAMBDA and the two special Heun divisors."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import List, Mapping, Optional

from .. import config
from .common.expressions import evaluate_expression
from .common.results import AlgebraError
from .confluent import (
    biconfluent_operator,
    doubly_confluent_operator,
    lifted_biconfluent,
    solve_biconfluent,
    solve_doubly_confluent,
)
from .newton import SolveResult, solve_dual, solve_frobenius, solve_ordinary
from .poly import Poly
from .weyl import WeylOp

logger = logging.getLogger(__name__)

DIVISOR_KINDS = ("d", "x", "xd:LAMBDA", "special-dc", "special-bc")
ORDER_FOR_DIVISOR = {"d": "standard", "x": "dual", "xd": "graded", "special-dc": "dual", "special-bc": "graded"}


def _kind(divisor: str) -> str:
    return "xd" if divisor.startswith("xd:") else divisor


def order_for(divisor: str) -> str:
    kind = _kind(divisor)
    if kind not in ORDER_FOR_DIVISOR:
        raise AlgebraError("invalid_input", f"unknown divisor {divisor!r}; expected one of {', '.join(DIVISOR_KINDS)}")
    return ORDER_FOR_DIVISOR[kind]


def seed_poly(seed: Optional[WeylOp], divisor: str) -> Optional[Poly]:
    """Seed operator as a polynomial in the generator the chosen order expands in."""
    if seed is None:
        return None
    if order_for(divisor) == "dual":
        return seed.lower_poly()
    return seed.raise_poly()


def _need(bindings: Mapping[str, Fraction], *names: str) -> List[Fraction]:
    missing = [n for n in names if n not in bindings]
    if missing:
        raise AlgebraError("unbound_identifier", f"divisor needs bindings for {', '.join(missing)}")
    return [bindings[n] for n in names]


def solve_by_divisor(
    op: WeylOp,
    divisor: str,
    seed: Optional[Poly] = None,
    precision: Optional[int] = None,
    bindings: Optional[Mapping[str, Fraction]] = None,
    order: Optional[str] = None,
    label: str = "",
) -> SolveResult:
    bindings = bindings or {}
    expected = order_for(divisor)
    if order is not None and order != expected:
        raise AlgebraError("invalid_input", f"divisor {divisor!r} expands in the {expected} order, not {order}")
    precision = precision or config.DEFAULT_PRECISION
    kind = _kind(divisor)
    logger.debug("solving %s with divisor %s at precision %d", label or op.format(), divisor, precision)
    if kind == "d":
        return solve_ordinary(op, seed, precision, label)
    if kind == "x":
        return solve_dual(op, seed, precision, label)
    if kind == "xd":
        lam = evaluate_expression(divisor[3:], bindings)
        return solve_frobenius(op, lam, precision, seed, label)
    if kind == "special-dc":
        a, b, c, q = _need(bindings, "a", "b", "c", "q")
        if op != doubly_confluent_operator(a, b, c, q):
            raise AlgebraError("invalid_input", "operator is not the doubly confluent operator of the bound a, b, c, q")
        return solve_doubly_confluent(a, b, c, q, precision, seed)
    alpha, beta, gamma = _need(bindings, "alpha", "beta", "gamma")
    if op != biconfluent_operator(alpha, beta, gamma) and op != lifted_biconfluent(alpha, beta, gamma):
        raise AlgebraError("invalid_input", "operator is not the biconfluent operator of the bound alpha, beta, gamma")
    return solve_biconfluent(alpha, beta, gamma, precision)
