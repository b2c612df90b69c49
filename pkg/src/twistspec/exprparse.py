"""Small expression language for complex coefficient functions on [0, 1].

The grammar is part of the public configuration contract and is documented
verbatim in the README:

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' factor)?
    unary  := '-'? atom
    atom   := decimal-number | 'i' | 'x' | fname '(' expr ')' | '(' expr ')'

``fname`` is one of ``sqrt``, ``sin``, ``cos``, ``exp``, ``log``.  ``^`` is
right associative and accepts integer literal exponents only (optionally
negated).  Implicit multiplication ("2x") is rejected.  ``sqrt`` and ``log``
use the principal branch.

ASTs are immutable after parsing and may be evaluated concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "ExprAst",
    "Num",
    "Imag",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "Call",
    "ParseError",
    "DomainError",
    "parse_expr",
    "eval_expr",
    "eval_expr_array",
    "format_expr",
    "FUNCTION_NAMES",
]

FUNCTION_NAMES = ("sqrt", "sin", "cos", "exp", "log")

# Exponents are integer literals; cap the magnitude so evaluation stays sane.
MAX_EXPONENT = 512


class ParseError(ValueError):
    """Malformed source text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class DomainError(ArithmeticError):
    """Runtime domain violation (division by zero, log of zero)."""


@dataclass(frozen=True)
class Num:
    value: float
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Imag:
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "ExprAst"
    right: "ExprAst"
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Pow:
    base: "ExprAst"
    exponent: int
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    name: str
    arg: "ExprAst"
    span: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


ExprAst = Union[Num, Imag, Var, Neg, BinOp, Pow, Call]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_]+")
_OPERATORS = set("+-*/^()")


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "name" | "op" | "end"
    text: str
    pos: int


def _tokenize(src: str) -> list[_Token]:
    if not src.isascii():
        bad = next(i for i, ch in enumerate(src) if not ch.isascii())
        raise ParseError("non-ASCII character", bad)
    tokens: list[_Token] = []
    pos = 0
    while pos < len(src):
        ch = src[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        m = _NUMBER_RE.match(src, pos)
        if m:
            tokens.append(_Token("number", m.group(), pos))
            pos = m.end()
            continue
        m = _NAME_RE.match(src, pos)
        if m:
            tokens.append(_Token("name", m.group(), pos))
            pos = m.end()
            continue
        if ch in _OPERATORS:
            tokens.append(_Token("op", ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("end", "", len(src)))
    return tokens


# ---------------------------------------------------------------------------
# Recursive descent parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._index = 0

    def _current(self) -> _Token:
        return self._tokens[self._index]

    def _advance(self) -> _Token:
        tok = self._tokens[self._index]
        self._index += 1
        return tok

    def _at_op(self, *ops: str) -> bool:
        tok = self._current()
        return tok.kind == "op" and tok.text in ops

    def _expect_op(self, op: str) -> _Token:
        tok = self._current()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}", tok.pos)
        return self._advance()

    def parse(self) -> ExprAst:
        node = self._expr()
        tok = self._current()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos)
        return node

    def _expr(self) -> ExprAst:
        node = self._term()
        while self._at_op("+", "-"):
            op = self._advance().text
            right = self._term()
            node = BinOp(op, node, right, span=(node.span[0], right.span[1]))
        return node

    def _term(self) -> ExprAst:
        node = self._factor()
        while self._at_op("*", "/"):
            op = self._advance().text
            right = self._factor()
            node = BinOp(op, node, right, span=(node.span[0], right.span[1]))
        return node

    def _factor(self) -> ExprAst:
        base = self._unary()
        if self._at_op("^"):
            self._advance()
            exp_tok = self._current()
            exponent = self._factor()
            k = _integer_literal(exponent)
            if k is None:
                raise ParseError("non-integer exponent", exp_tok.pos)
            if abs(k) > MAX_EXPONENT:
                raise ParseError("exponent too large", exp_tok.pos)
            return Pow(base, k, span=(base.span[0], exponent.span[1]))
        return base

    def _unary(self) -> ExprAst:
        if self._at_op("-"):
            tok = self._advance()
            operand = self._atom()
            return Neg(operand, span=(tok.pos, operand.span[1]))
        return self._atom()

    def _atom(self) -> ExprAst:
        tok = self._current()
        if tok.kind == "number":
            self._advance()
            return Num(float(tok.text), span=(tok.pos, tok.pos + len(tok.text)))
        if tok.kind == "name":
            self._advance()
            if tok.text == "i":
                return Imag(span=(tok.pos, tok.pos + 1))
            if tok.text == "x":
                return Var(span=(tok.pos, tok.pos + 1))
            if tok.text in FUNCTION_NAMES:
                self._expect_op("(")
                arg = self._expr()
                close = self._expect_op(")")
                return Call(tok.text, arg, span=(tok.pos, close.pos + 1))
            raise ParseError(f"unknown function name {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self._expr()
            close = self._expect_op(")")
            # Keep the parenthesized span so errors point at the full group.
            return _with_span(node, (tok.pos, close.pos + 1))
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.pos)
        raise ParseError(f"unexpected {tok.text!r}", tok.pos)


def _with_span(node: ExprAst, span: tuple[int, int]) -> ExprAst:
    object.__setattr__(node, "span", span)
    return node


def _integer_literal(node: ExprAst) -> int | None:
    """Accept ``Num`` with integral value, optionally under a unary minus."""
    if isinstance(node, Neg):
        inner = _integer_literal(node.operand)
        return None if inner is None else -inner
    if isinstance(node, Num) and float(node.value).is_integer():
        return int(node.value)
    return None


def parse_expr(src: str) -> ExprAst:
    """Parse ``src`` into an immutable AST (raises ParseError with position)."""
    return _Parser(_tokenize(src)).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _canonical(value):
    # +0.0 normalizes a -0.0 imaginary part so that sqrt/log take the
    # principal branch on the negative real axis.
    return value + 0.0


def _evaluate(node: ExprAst, x):
    # Leaves are numpy scalars (or arrays) so that every operation follows
    # IEEE semantics: overflow gives inf instead of raising.
    if isinstance(node, Num):
        return np.complex128(node.value)
    if isinstance(node, Imag):
        return np.complex128(1j)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_evaluate(node.operand, x)
    if isinstance(node, BinOp):
        left = _evaluate(node.left, x)
        right = _evaluate(node.right, x)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if np.any(right == 0):
            raise DomainError(f"division by zero at position {node.span[0]}")
        return left / right
    if isinstance(node, Pow):
        base = _evaluate(node.base, x)
        if node.exponent < 0 and np.any(base == 0):
            raise DomainError(f"division by zero at position {node.span[0]}")
        return base ** node.exponent
    if isinstance(node, Call):
        arg = _evaluate(node.arg, x)
        if node.name == "sqrt":
            return np.sqrt(_canonical(arg))
        if node.name == "sin":
            return np.sin(arg)
        if node.name == "cos":
            return np.cos(arg)
        if node.name == "exp":
            return np.exp(arg)
        if np.any(arg == 0):
            raise DomainError(f"log of zero at position {node.span[0]}")
        return np.log(_canonical(arg))
    raise TypeError(f"not an expression node: {node!r}")


def eval_expr(ast: ExprAst, x: float) -> complex:
    """Evaluate at a single point x in [0, 1]."""
    with np.errstate(all="ignore"):
        return complex(_evaluate(ast, np.complex128(x)))


def eval_expr_array(ast: ExprAst, xs: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on an array of sample points."""
    xs = np.asarray(xs, dtype=np.complex128)
    with np.errstate(all="ignore"):
        out = _evaluate(ast, xs)
    return np.broadcast_to(np.asarray(out, dtype=np.complex128), xs.shape).copy()


# ---------------------------------------------------------------------------
# Pretty printer (inverse of parse_expr up to structural identity)
# ---------------------------------------------------------------------------

_ATOMIC = (Num, Imag, Var, Call)
_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_number(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _fmt(node: ExprAst) -> str:
    if isinstance(node, Num):
        return _fmt_number(node.value)
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.name}({_fmt(node.arg)})"
    if isinstance(node, Neg):
        if isinstance(node.operand, _ATOMIC):
            return "-" + _fmt(node.operand)
        return "-(" + _fmt(node.operand) + ")"
    if isinstance(node, Pow):
        if isinstance(node.base, _ATOMIC) or (
            isinstance(node.base, Neg) and isinstance(node.base.operand, _ATOMIC)
        ):
            base = _fmt(node.base)
        else:
            base = "(" + _fmt(node.base) + ")"
        return f"{base}^{node.exponent}"
    if isinstance(node, BinOp):
        prec = _PRECEDENCE[node.op]
        left = _fmt(node.left)
        if isinstance(node.left, BinOp) and _PRECEDENCE[node.left.op] < prec:
            left = "(" + left + ")"
        right = _fmt(node.right)
        if isinstance(node.right, BinOp) and _PRECEDENCE[node.right.op] <= prec:
            right = "(" + right + ")"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


def format_expr(ast: ExprAst) -> str:
    """Render an AST as source text that reparses to an identical AST."""
    return _fmt(ast)
