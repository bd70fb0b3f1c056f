"""Closed-form test functions of a single variable t.

A tiny expression language (numbers, t, + - * /, ^ with a constant
exponent, unary minus, sin/cos/exp) parsed by recursive descent into an
immutable AST that is closed under symbolic differentiation.  The
constant-exponent restriction on ``^`` is what keeps the derivative
inside the node set: d/dt u^c = c * u^(c-1) * u' needs no log nodes.

Grammar (whitespace insignificant, ASCII only)::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := unary ("^" number)?
    unary  := "-" unary | atom
    atom   := number | "t" | ident "(" expr ")" | "(" expr ")"
    ident  := "sin" | "cos" | "exp"
    number := digits, optional "." fraction, optional e/E exponent

Note that the base of ``^`` is the whole ``unary`` production, so
``-t^2`` parses as ``(-t)^2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ExprNode",
    "ParseError",
    "EvalError",
    "DerivativeCapError",
    "MAX_DERIVATIVE_ORDER",
    "parse",
    "evaluate",
    "evaluate_array",
    "differentiate",
    "to_infix",
]

#: Practical cap on symbolic differentiation order; repeated product/chain
#: rules beyond this blow up the AST without any consumer needing it.
MAX_DERIVATIVE_ORDER = 12


class ParseError(ValueError):
    """Syntax error; carries the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvalError(ArithmeticError):
    """Evaluation failure: division by zero or an invalid power."""


class DerivativeCapError(ValueError):
    """Requested derivative order exceeds MAX_DERIVATIVE_ORDER."""


# --- AST nodes -------------------------------------------------------------
#
# Nodes are frozen dataclasses; trees are shared freely and never mutated.

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Add:
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Sub:
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Mul:
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Div:
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Pow:
    base: "ExprNode"
    exponent: float  # numeric literal only


@dataclass(frozen=True)
class Neg:
    arg: "ExprNode"


@dataclass(frozen=True)
class Fn:
    name: str  # "sin" | "cos" | "exp"
    arg: "ExprNode"


ExprNode = Union[Const, Var, Add, Sub, Mul, Div, Pow, Neg, Fn]

_T = Var()


# --- tokenizer / parser ----------------------------------------------------

_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z]+")
_FUNCTIONS = ("sin", "cos", "exp")


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, expected: str) -> ParseError:
        found = self.src[self.pos] if self.pos < len(self.src) else "end of input"
        return ParseError(f"expected {expected}, found {found!r}", self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.accept(ch):
            raise self.error(f"'{ch}'")

    def number(self) -> float:
        self.skip_ws()
        mo = _NUMBER_RE.match(self.src, self.pos)
        if mo is None:
            raise self.error("number")
        self.pos = mo.end()
        return float(mo.group())

    def expr(self) -> ExprNode:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> ExprNode:
        node = self.factor()
        while True:
            if self.accept("*"):
                node = Mul(node, self.factor())
            elif self.accept("/"):
                node = Div(node, self.factor())
            else:
                return node

    def factor(self) -> ExprNode:
        node = self.unary()
        if self.accept("^"):
            node = Pow(node, self.number())
        return node

    def unary(self) -> ExprNode:
        if self.accept("-"):
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> ExprNode:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch.isdigit():
            return Const(self.number())
        mo = _IDENT_RE.match(self.src, self.pos)
        if mo is not None:
            name = mo.group()
            if name == "t":
                self.pos = mo.end()
                return _T
            if name in _FUNCTIONS:
                self.pos = mo.end()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Fn(name, arg)
            raise self.error("'t', 'sin', 'cos' or 'exp'")
        raise self.error("number, 't', function call or '('")


def parse(src: str) -> ExprNode:
    """Parse source text into an AST; raises ParseError with an offset."""
    p = _Parser(src)
    node = p.expr()
    p.skip_ws()
    if p.pos != len(src):
        raise p.error("end of input")
    return node


# --- evaluation ------------------------------------------------------------

def evaluate(e: ExprNode, t: float) -> float:
    """Evaluate at a scalar t in IEEE double precision.

    Division by zero and powers of a negative base with a non-integer
    exponent raise EvalError instead of producing inf/nan.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return float(t)
    if isinstance(e, Add):
        return evaluate(e.left, t) + evaluate(e.right, t)
    if isinstance(e, Sub):
        return evaluate(e.left, t) - evaluate(e.right, t)
    if isinstance(e, Mul):
        return evaluate(e.left, t) * evaluate(e.right, t)
    if isinstance(e, Div):
        den = evaluate(e.right, t)
        if den == 0.0:
            raise EvalError(f"division by zero at t = {t!r}")
        return evaluate(e.left, t) / den
    if isinstance(e, Pow):
        base = evaluate(e.base, t)
        c = e.exponent
        if base == 0.0 and c < 0.0:
            raise EvalError(f"zero raised to negative power at t = {t!r}")
        if base < 0.0 and c != round(c):
            raise EvalError(
                f"negative base {base!r} with non-integer exponent {c!r}"
            )
        return base ** c
    if isinstance(e, Neg):
        return -evaluate(e.arg, t)
    if isinstance(e, Fn):
        v = evaluate(e.arg, t)
        if e.name == "sin":
            return math.sin(v)
        if e.name == "cos":
            return math.cos(v)
        return math.exp(v)
    raise TypeError(f"not an ExprNode: {e!r}")


def evaluate_array(e: ExprNode, ts: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on an array of t values.

    Used by the quadrature sweeps; domain violations surface as a single
    EvalError after the fact (non-finite result check) rather than
    per-element exceptions.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = _eval_vec(e, np.asarray(ts, dtype=float))
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        raise EvalError("expression not finite over the requested points")
    return out


def _eval_vec(e: ExprNode, ts: np.ndarray):
    if isinstance(e, Const):
        return np.full_like(ts, e.value)
    if isinstance(e, Var):
        return ts
    if isinstance(e, Add):
        return _eval_vec(e.left, ts) + _eval_vec(e.right, ts)
    if isinstance(e, Sub):
        return _eval_vec(e.left, ts) - _eval_vec(e.right, ts)
    if isinstance(e, Mul):
        return _eval_vec(e.left, ts) * _eval_vec(e.right, ts)
    if isinstance(e, Div):
        return _eval_vec(e.left, ts) / _eval_vec(e.right, ts)
    if isinstance(e, Pow):
        return np.power(_eval_vec(e.base, ts), e.exponent)
    if isinstance(e, Neg):
        return -_eval_vec(e.arg, ts)
    if isinstance(e, Fn):
        v = _eval_vec(e.arg, ts)
        return {"sin": np.sin, "cos": np.cos, "exp": np.exp}[e.name](v)
    raise TypeError(f"not an ExprNode: {e!r}")


# --- differentiation -------------------------------------------------------

def _simplify(e: ExprNode) -> ExprNode:
    """Constant folding plus the obvious identity folds.

    Keeps derivative ASTs from growing without bound; deliberately does
    not attempt any canonicalization beyond these local rules.  Folding
    0*x -> 0 may widen the domain at removable singular points.
    """
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Neg):
        a = _simplify(e.arg)
        if isinstance(a, Const):
            return Const(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(e, Add):
        l, r = _simplify(e.left), _simplify(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value + r.value)
        if isinstance(l, Const) and l.value == 0.0:
            return r
        if isinstance(r, Const) and r.value == 0.0:
            return l
        return Add(l, r)
    if isinstance(e, Sub):
        l, r = _simplify(e.left), _simplify(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value - r.value)
        if isinstance(r, Const) and r.value == 0.0:
            return l
        if isinstance(l, Const) and l.value == 0.0:
            return _simplify(Neg(r))
        return Sub(l, r)
    if isinstance(e, Mul):
        l, r = _simplify(e.left), _simplify(e.right)
        if isinstance(l, Const) and isinstance(r, Const):
            return Const(l.value * r.value)
        if (isinstance(l, Const) and l.value == 0.0) or (
            isinstance(r, Const) and r.value == 0.0
        ):
            return Const(0.0)
        if isinstance(l, Const) and l.value == 1.0:
            return r
        if isinstance(r, Const) and r.value == 1.0:
            return l
        return Mul(l, r)
    if isinstance(e, Div):
        l, r = _simplify(e.left), _simplify(e.right)
        if isinstance(l, Const) and l.value == 0.0:
            return Const(0.0)
        if isinstance(r, Const) and r.value == 1.0:
            return l
        if isinstance(l, Const) and isinstance(r, Const) and r.value != 0.0:
            return Const(l.value / r.value)
        return Div(l, r)
    if isinstance(e, Pow):
        b = _simplify(e.base)
        if e.exponent == 0.0:
            return Const(1.0)
        if e.exponent == 1.0:
            return b
        if isinstance(b, Const):
            c = e.exponent
            if b.value > 0.0 or c == round(c):
                return Const(b.value ** c)
        return Pow(b, e.exponent)
    if isinstance(e, Fn):
        return Fn(e.name, _simplify(e.arg))
    raise TypeError(f"not an ExprNode: {e!r}")


def _d(e: ExprNode) -> ExprNode:
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Add):
        return Add(_d(e.left), _d(e.right))
    if isinstance(e, Sub):
        return Sub(_d(e.left), _d(e.right))
    if isinstance(e, Mul):
        return Add(Mul(_d(e.left), e.right), Mul(e.left, _d(e.right)))
    if isinstance(e, Div):
        num = Sub(Mul(_d(e.left), e.right), Mul(e.left, _d(e.right)))
        return Div(num, Pow(e.right, 2.0))
    if isinstance(e, Pow):
        return Mul(Mul(Const(e.exponent), Pow(e.base, e.exponent - 1.0)), _d(e.base))
    if isinstance(e, Neg):
        return Neg(_d(e.arg))
    if isinstance(e, Fn):
        da = _d(e.arg)
        if e.name == "sin":
            return Mul(Fn("cos", e.arg), da)
        if e.name == "cos":
            return Neg(Mul(Fn("sin", e.arg), da))
        return Mul(Fn("exp", e.arg), da)
    raise TypeError(f"not an ExprNode: {e!r}")


def differentiate(e: ExprNode, order: int = 1) -> ExprNode:
    """order-th symbolic derivative; order 0 returns the input unchanged."""
    if order < 0:
        raise ValueError(f"derivative order must be >= 0, got {order}")
    if order > MAX_DERIVATIVE_ORDER:
        raise DerivativeCapError(
            f"derivative order {order} exceeds cap {MAX_DERIVATIVE_ORDER}"
        )
    node = e
    for _ in range(order):
        node = _simplify(_d(node))
    return node


# --- printing --------------------------------------------------------------

def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_infix(e: ExprNode) -> str:
    """Render an AST back to parseable source text (round-trips via parse)."""
    return _print(e)


def _print(e: ExprNode) -> str:
    if isinstance(e, Const):
        if e.value < 0.0:
            return f"(-{_fmt_number(-e.value)})"
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Add):
        return f"({_print(e.left)} + {_print(e.right)})"
    if isinstance(e, Sub):
        return f"({_print(e.left)} - {_print(e.right)})"
    if isinstance(e, Mul):
        return f"({_print(e.left)} * {_print(e.right)})"
    if isinstance(e, Div):
        return f"({_print(e.left)} / {_print(e.right)})"
    if isinstance(e, Pow):
        base_txt = _print(e.base)
        if isinstance(e.base, Pow):
            base_txt = f"({base_txt})"  # only one '^' allowed per factor
        if e.exponent < 0.0:
            # grammar has no negative exponents; print 1/u^|c| instead
            return f"(1 / {base_txt}^{_fmt_number(-e.exponent)})"
        return f"{base_txt}^{_fmt_number(e.exponent)}"
    if isinstance(e, Neg):
        return f"(-{_print(e.arg)})"
    if isinstance(e, Fn):
        return f"{e.name}({_print(e.arg)})"
    raise TypeError(f"not an ExprNode: {e!r}")
