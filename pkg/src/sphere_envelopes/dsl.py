"""Scalar expression language in (u, v), evaluated to jets.

Grammar v1 (whitespace is insignificant)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" exponent)?
    exponent:= "-" exponent | primary ("^" exponent)?     (must be constant)
    primary := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"

NAME is one of the variables ``u``, ``v``, the constants ``pi``, ``e``, or a
caller-supplied binding.  FUNC is one of sin, cos, tan, sqrt, exp, log,
atan.  Multiplication is always explicit: ``sin(u)cos(v)`` is rejected.

``^`` is right associative and binds tighter than unary minus, so ``-u^2``
means ``-(u^2)``.  The exponent has to fold to a constant.  Integer
exponents accept any base; other exponents are evaluated as
``exp(k*log(base))`` and need a positive base.

There is no ``abs``.  Writing ``sqrt(x^2)`` gives a kink at x = 0 where the
jet is undefined and evaluation raises a domain error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import core
from .core import Jet2, Vec3J
from .errors import DomainError, DslSyntaxError, UnknownIdentifierError

GRAMMAR_VERSION = 1

FUNCTIONS = {
    "sin": core.sin,
    "cos": core.cos,
    "tan": core.tan,
    "sqrt": core.sqrt,
    "exp": core.exp,
    "log": core.log,
    "atan": core.atan,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("u", "v")
RESERVED = frozenset(FUNCTIONS) | frozenset(CONSTANTS) | frozenset(VARIABLES)


# AST -----------------------------------------------------------------------


class Expr:
    """Base class of AST nodes.  Nodes are immutable and compare structurally."""

    def __call__(self, u, v) -> Jet2:
        return evaluate(self, u, v)

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    name: str
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: float
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class VecExpr:
    """Three component expressions; evaluates to a :class:`Vec3J`."""

    cx: Expr
    cy: Expr
    cz: Expr

    def __call__(self, u, v) -> Vec3J:
        return Vec3J(evaluate(self.cx, u, v), evaluate(self.cy, u, v), evaluate(self.cz, u, v))

    def __str__(self) -> str:
        return "(" + ", ".join(to_source(c) for c in (self.cx, self.cy, self.cz)) + ")"


# tokenizer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int  # byte offset


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    i = 0
    n = len(src)
    while True:
        m = _TOKEN_RE.match(src, i)
        if m is None or m.end() == i and i < n:
            j = i
            while j < n and src[j].isspace():
                j += 1
            if j >= n:
                break
            raise DslSyntaxError(f"unexpected character {src[j]!r}", len(src[:j].encode()),
                                 frozenset({"number", "identifier", "operator"}))
        if m.lastgroup is None:
            break
        start = m.start(m.lastgroup)
        toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), len(src[:start].encode())))
        i = m.end()
    toks.append(_Tok("end", "", len(src.encode())))
    return toks


# parser --------------------------------------------------------------------

_PRIMARY_START = frozenset({"number", "identifier", "'('"})


class _Parser:
    def __init__(self, src: str, bindings: Mapping[str, float] | None):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.bindings = dict(bindings or {})
        for name in self.bindings:
            if name in RESERVED:
                raise ValueError(f"binding {name!r} shadows a reserved name")

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def _is_op(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def _fail(self, expected) -> None:
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise DslSyntaxError(f"unexpected {what}", t.pos, frozenset(expected))

    def _expect(self, text: str) -> _Tok:
        if not self._is_op(text):
            self._fail({f"'{text}'"})
        return self._advance()

    def parse_all(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self._fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return e

    def parse_vector(self) -> VecExpr:
        self._expect("(")
        comps = [self.expr()]
        for _ in range(2):
            if not self._is_op(","):
                self._fail({"','", "'+'", "'-'", "'*'", "'/'", "'^'"})
            self._advance()
            comps.append(self.expr())
        self._expect(")")
        if self.tok.kind != "end":
            self._fail({"end of input"})
        return VecExpr(*comps)

    def expr(self) -> Expr:
        left = self.term()
        while self._is_op("+") or self._is_op("-"):
            t = self._advance()
            left = BinOp(t.text, left, self.term(), pos=t.pos)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self._is_op("*") or self._is_op("/"):
            t = self._advance()
            left = BinOp(t.text, left, self.unary(), pos=t.pos)
        return left

    def unary(self) -> Expr:
        if self._is_op("-"):
            t = self._advance()
            return Neg(self.unary(), pos=t.pos)
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self._is_op("^"):
            t = self._advance()
            return Pow(base, self.exponent(), pos=t.pos)
        return base

    def exponent(self) -> float:
        start = self.tok.pos
        if self._is_op("-"):
            self._advance()
            return -self.exponent()
        node = self.primary()
        if self._is_op("^"):
            self._advance()
            node = Pow(node, self.exponent())
        value = _fold_constant(node)
        if value is None:
            raise DslSyntaxError("exponent must be a constant (use exp(k*log(x)) for variable powers)",
                                 start, frozenset({"constant exponent"}))
        return value

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self._advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise DslSyntaxError(f"numeric literal {t.text!r} overflows", t.pos)
            return Num(value, pos=t.pos)
        if t.kind == "name":
            self._advance()
            name = t.text
            if name in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(name, arg, pos=t.pos)
            if self._is_op("("):
                raise UnknownIdentifierError(name, t.pos)
            if name in VARIABLES:
                return Var(name, pos=t.pos)
            if name in CONSTANTS:
                return Const(name, pos=t.pos)
            if name in self.bindings:
                return Num(float(self.bindings[name]), pos=t.pos)
            raise UnknownIdentifierError(name, t.pos)
        if self._is_op("("):
            self._advance()
            e = self.expr()
            self._expect(")")
            return e
        self._fail(_PRIMARY_START | ({"'-'"} if t.kind == "end" else set()))
        raise AssertionError("unreachable")


def _fold_constant(node: Expr) -> float | None:
    """Value of a variable-free expression, or None if it mentions u or v."""
    if _mentions_variable(node):
        return None
    try:
        with np.errstate(all="ignore"):
            val = float(evaluate(node, 0.0, 0.0).val)
    except DomainError:
        return None
    return val if math.isfinite(val) else None


def _mentions_variable(node: Expr) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, (Neg,)):
        return _mentions_variable(node.arg)
    if isinstance(node, Call):
        return _mentions_variable(node.arg)
    if isinstance(node, Pow):
        return _mentions_variable(node.base)
    if isinstance(node, BinOp):
        return _mentions_variable(node.left) or _mentions_variable(node.right)
    raise TypeError(node)


def parse(src: str, bindings: Mapping[str, float] | None = None) -> Expr:
    """Parse a scalar expression.

    ``bindings`` maps extra names to numeric literals; they are substituted
    while parsing and may not shadow u, v, pi, e or a function name.
    """
    if not src or not src.strip():
        raise DslSyntaxError("empty expression", 0, _PRIMARY_START)
    return _Parser(src, bindings).parse_all()


def parse_vector(src: str, bindings: Mapping[str, float] | None = None) -> VecExpr:
    """Parse ``"(ex, ey, ez)"`` into a :class:`VecExpr`."""
    if not src or not src.strip():
        raise DslSyntaxError("empty expression", 0, frozenset({"'('"}))
    return _Parser(src, bindings).parse_vector()


def as_expr(e, bindings=None):
    """Accept an Expr, a string or a number."""
    if isinstance(e, Expr):
        return e
    if isinstance(e, str):
        return parse(e, bindings)
    if isinstance(e, (int, float)):
        return Num(float(e)) if e >= 0 else Neg(Num(-float(e)))
    raise TypeError(f"cannot interpret {e!r} as an expression")


def as_vector(e, bindings=None):
    if isinstance(e, VecExpr):
        return e
    if isinstance(e, str):
        return parse_vector(e, bindings)
    if isinstance(e, (tuple, list)) and len(e) == 3:
        return VecExpr(*(as_expr(c, bindings) for c in e))
    raise TypeError(f"cannot interpret {e!r} as a vector expression")


# printing ------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    if isinstance(node, Pow):
        return _POW_PREC
    return _ATOM_PREC


def format_number(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def to_source(node: Expr) -> str:
    """Canonical source text; parsing it gives back an equal AST."""
    if isinstance(node, Num):
        return format_number(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.arg)
        return "-" + (inner if _prec(node.arg) >= _NEG_PREC else f"({inner})")
    if isinstance(node, Pow):
        base = to_source(node.base)
        if _prec(node.base) <= _POW_PREC:
            base = f"({base})"
        k = format_number(node.exponent)
        if node.exponent < 0:
            k = f"({k})"
        return f"{base}^{k}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left, right = to_source(node.left), to_source(node.right)
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    raise TypeError(node)


# evaluation ----------------------------------------------------------------


def evaluate(node: Expr, u, v) -> Jet2:
    """Evaluate with ``u`` and ``v`` bound to jets (or plain numbers).

    Domain violations raise :class:`DomainError` carrying the byte offset of
    the offending node.
    """
    U = u if isinstance(u, Jet2) else Jet2(u)
    V = v if isinstance(v, Jet2) else Jet2(v)
    return _eval(node, U, V)


def _point(U: Jet2, V: Jet2):
    return float(np.ravel(U.val)[0]), float(np.ravel(V.val)[0])


def _eval(node: Expr, U: Jet2, V: Jet2) -> Jet2:
    if isinstance(node, Num):
        return Jet2(node.value)
    if isinstance(node, Var):
        return U if node.name == "u" else V
    if isinstance(node, Const):
        return Jet2(CONSTANTS[node.name])
    try:
        if isinstance(node, Neg):
            return -_eval(node.arg, U, V)
        if isinstance(node, BinOp):
            a, b = _eval(node.left, U, V), _eval(node.right, U, V)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a * core.reciprocal(b)
        if isinstance(node, Pow):
            return core.power(_eval(node.base, U, V), node.exponent)
        if isinstance(node, Call):
            return FUNCTIONS[node.func](_eval(node.arg, U, V))
    except DomainError as exc:
        if exc.offset is not None:
            raise
        raise DomainError(exc.primitive, exc.message, node.pos, _point(U, V)) from None
    raise TypeError(node)
