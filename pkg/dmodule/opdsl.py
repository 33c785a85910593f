"""Text syntax for operators.

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | factor
    factor := atom ('^' uint)?
    atom   := 'X' | 'D' | 'A' | 'ADAG' | 'G' | rational | identifier | '(' expr ')'

Products keep their written order. Expressions that use only A/ADAG lower onto the (ADAG, A)
pair; anything mentioning X or D lowers onto (X, D) with A = D + X and ADAG = D - X. G is the
grading element of the chosen pair.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Mapping, Optional, Union

from .tools.common.results import AlgebraError
from .tools.common.scalars import exact
from .tools.weyl import AA, XD, GeneratorPair, WeylOp, aa_to_xd, weyl_mul

GENERATORS = ("X", "D", "A", "ADAG", "G")

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


class DSLSyntaxError(AlgebraError):
    def __init__(self, message: str, offset: int):
        super().__init__("syntax_error", f"{message} at byte {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        offset = len(text[:pos].encode("utf-8"))
        if match is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", offset)
        kind = match.lastgroup or ""
        if kind != "space":
            tokens.append(Token(kind, match.group(), offset))
        pos = match.end()
    tokens.append(Token("end", "", len(text.encode("utf-8"))))
    return tokens


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Num, Ident, Gen, Neg, Pow, BinOp]


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str) -> Token:
        if self.current.text != text:
            found = self.current.text or "end of input"
            raise DSLSyntaxError(f"expected {text!r}, found {found!r}", self.current.offset)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != "end":
            raise DSLSyntaxError(f"unexpected {self.current.text!r}", self.current.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.current.text == "*":
            self.advance()
            node = BinOp("*", node, self.unary())
        return node

    def unary(self) -> Node:
        if self.current.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> Node:
        node = self.atom()
        if self.current.text == "^":
            self.advance()
            token = self.current
            if token.kind != "number" or "/" in token.text:
                raise DSLSyntaxError("exponent must be a nonnegative integer", token.offset)
            self.advance()
            node = Pow(node, int(token.text))
        return node

    def atom(self) -> Node:
        token = self.current
        if token.kind == "number":
            self.advance()
            try:
                return Num(Fraction(token.text))
            except ZeroDivisionError:
                raise DSLSyntaxError("zero denominator", token.offset) from None
        if token.kind == "name":
            self.advance()
            return Gen(token.text) if token.text in GENERATORS else Ident(token.text)
        if token.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = token.text or "end of input"
        raise DSLSyntaxError(f"unexpected {found!r}", token.offset)


def parse_expr(text: str) -> Node:
    return _Parser(text).parse()


_PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def _precedence(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def pretty(node: Node, minimum: int = 0) -> str:
    """Inverse of parse_expr up to whitespace and redundant parentheses."""
    if isinstance(node, Num):
        text = str(node.value)
        if minimum >= 5 and node.value.denominator != 1:
            return f"({text})"
        return text
    if isinstance(node, (Ident, Gen)):
        text = node.name
    elif isinstance(node, Neg):
        text = "-" + pretty(node.operand, 3)
    elif isinstance(node, Pow):
        text = f"{pretty(node.base, 5)}^{node.exponent}"
    else:
        level = _PRECEDENCE[node.op]
        joiner = "*" if node.op == "*" else f" {node.op} "
        text = pretty(node.left, level) + joiner + pretty(node.right, level + 1)
    if _precedence(node) < minimum:
        return f"({text})"
    return text


def _walk(node: Node) -> Iterator[Node]:
    yield node
    if isinstance(node, Neg):
        yield from _walk(node.operand)
    elif isinstance(node, Pow):
        yield from _walk(node.base)
    elif isinstance(node, BinOp):
        yield from _walk(node.left)
        yield from _walk(node.right)


def free_identifiers(node: Node) -> List[str]:
    seen: List[str] = []
    for item in _walk(node):
        if isinstance(item, Ident) and item.name not in seen:
            seen.append(item.name)
    return seen


def target_pair(node: Node) -> GeneratorPair:
    names = {item.name for item in _walk(node) if isinstance(item, Gen)}
    if names & {"X", "D"}:
        return XD
    if names & {"A", "ADAG"}:
        return AA
    return XD


def lower(node: Node, bindings: Mapping[str, Any], pair: Optional[GeneratorPair] = None) -> WeylOp:
    pair = pair or target_pair(node)
    values = {name: exact(value) for name, value in bindings.items()}
    if pair == XD:
        shift = aa_to_xd()
        images = {
            "X": WeylOp.raising(XD),
            "D": WeylOp.lowering(XD),
            "A": shift.lower_image,
            "ADAG": shift.raise_image,
        }
    else:
        images = {"A": WeylOp.lowering(AA), "ADAG": WeylOp.raising(AA)}
    images["G"] = WeylOp.grade(pair)

    def build(item: Node) -> WeylOp:
        if isinstance(item, Num):
            return WeylOp.scalar(pair, item.value)
        if isinstance(item, Ident):
            if item.name not in values:
                raise AlgebraError("unbound_identifier", f"identifier {item.name!r} has no binding")
            return WeylOp.scalar(pair, values[item.name])
        if isinstance(item, Gen):
            if item.name not in images:
                raise AlgebraError("pair_mismatch", f"{item.name} is not available over {pair.describe()}")
            return images[item.name]
        if isinstance(item, Neg):
            return -build(item.operand)
        if isinstance(item, Pow):
            return build(item.base) ** item.exponent
        left, right = build(item.left), build(item.right)
        if item.op == "+":
            return left + right
        if item.op == "-":
            return left - right
        return weyl_mul(left, right)

    return build(node)


def parse_operator(text: str, bindings: Optional[Mapping[str, Any]] = None) -> WeylOp:
    return lower(parse_expr(text), bindings or {})


def parse_bindings(text: Optional[str]) -> Dict[str, Fraction]:
    """'a=1/2, b=-3' -> {'a': Fraction(1, 2), 'b': Fraction(-3)}."""
    out: Dict[str, Fraction] = {}
    if not text:
        return out
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, value = chunk.partition("=")
        name = name.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in GENERATORS:
            raise AlgebraError("invalid_input", f"bad binding {chunk!r}; expected name=rational")
        out[name] = exact(value.strip())
    return out
