"""A tiny expression language for surface charts in the parameters u, v.

Grammar (whitespace insensitive):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := number | "u" | "v" | "pi" | "e"
            | ident "(" expr ")" | "(" expr ")"

"^" is right associative and there is no implicit multiplication.
Known functions: sin cos tan exp log sqrt sinh cosh tanh abs.

Expressions are immutable trees; `differentiate` produces a new tree,
`evaluate` walks a tree with plain floats, and `to_text` prints a string
that parses back to the identical tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .charts import Chart
from .errors import EvalError, ExprSyntaxError, UnknownIdentifier

__all__ = [
    "Expr", "Num", "Const", "Var", "Neg", "BinOp", "Call",
    "parse", "differentiate", "evaluate", "to_text", "compile_chart",
]


# --- AST ------------------------------------------------------------------

class Expr:
    """Base class for expression nodes."""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Const(Expr):
    name: str  # "pi" | "e"


@dataclass(frozen=True)
class Var(Expr):
    name: str  # "u" | "v"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # "+" | "-" | "*" | "/" | "^"
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


_CONSTANTS = {"pi": math.pi, "e": math.e}
_VARIABLES = ("u", "v")


def _sign(x: float) -> float:
    if x == 0.0:
        return 0.0
    return math.copysign(1.0, x)


# `sign` is produced by differentiation of `abs` but is deliberately not
# part of the surface grammar, so user input can never contain it.
_FUNCTIONS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
    "sinh": math.sinh, "cosh": math.cosh, "tanh": math.tanh,
    "abs": abs, "sign": _sign,
}
_PARSEABLE_FUNCTIONS = frozenset(_FUNCTIONS) - {"sign"}


# --- smart constructors (constant folding of literal subtrees) -------------

def _fold_unary(fn: str, x: float) -> Expr | None:
    try:
        val = _FUNCTIONS[fn](x)
    except (ValueError, OverflowError, ZeroDivisionError):
        return None
    return Num(val) if math.isfinite(val) else None


def _fold_binary(op: str, a: float, b: float) -> Expr | None:
    try:
        val = _apply(op, a, b)
    except (ValueError, OverflowError, ZeroDivisionError):
        return None
    return Num(val) if math.isfinite(val) else None


def _apply(op: str, a: float, b: float) -> float:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    if op == "^":
        return math.pow(a, b)
    raise AssertionError(op)


def _is_num(e: Expr, value: float | None = None) -> bool:
    return isinstance(e, Num) and (value is None or e.value == value)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _fold_binary("+", a.value, b.value)
        if folded is not None:
            return folded
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _fold_binary("-", a.value, b.value)
        if folded is not None:
            return folded
    return BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return Num(0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _fold_binary("*", a.value, b.value)
        if folded is not None:
            return folded
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 1.0):
        return a
    if _is_num(a, 0.0) and not _is_num(b, 0.0):
        return Num(0.0)
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _fold_binary("/", a.value, b.value)
        if folded is not None:
            return folded
    return BinOp("/", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 1.0):
        return a
    if _is_num(b, 0.0):
        return Num(1.0)
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _fold_binary("^", a.value, b.value)
        if folded is not None:
            return folded
    return BinOp("^", a, b)


def _call(fn: str, arg: Expr) -> Expr:
    if isinstance(arg, Num):
        folded = _fold_unary(fn, arg.value)
        if folded is not None:
            return folded
    return Call(fn, arg)


_CONSTRUCT = {"+": _add, "-": _sub, "*": _mul, "/": _div, "^": _pow}


# --- tokenizer and parser ---------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def match_op(self, *ops: str) -> str | None:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] in ops:
            self.pos += 1
            return tok[1]
        return None

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok is None or tok[0] != "op" or tok[1] != op:
            at = tok[2] if tok else len(self.text)
            raise ExprSyntaxError(f"expected {op!r}", at)
        self.pos += 1

    def expr(self) -> Expr:
        node = self.term()
        while (op := self.match_op("+", "-")) is not None:
            node = _CONSTRUCT[op](node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while (op := self.match_op("*", "/")) is not None:
            node = _CONSTRUCT[op](node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.match_op("-"):
            return _neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.match_op("^"):
            return _pow(base, self.factor())
        return base

    def atom(self) -> Expr:
        kind, text, at = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if self.match_op("("):
                if text not in _PARSEABLE_FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {text!r} at offset {at}")
                arg = self.expr()
                self.expect_op(")")
                return _call(text, arg)
            if text in _VARIABLES:
                return Var(text)
            if text in _CONSTANTS:
                return Const(text)
            raise UnknownIdentifier(f"unknown identifier {text!r} at offset {at}")
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ExprSyntaxError(f"unexpected token {text!r}", at)


def parse(text: str) -> Expr:
    """Parse `text` into an Expr tree, folding literal-only subtrees."""
    parser = _Parser(text)
    node = parser.expr()
    tok = parser.peek()
    if tok is not None:
        raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
    return node


# --- calculus ---------------------------------------------------------------

_CHAIN = {
    "sin": lambda a: _call("cos", a),
    "cos": lambda a: _neg(_call("sin", a)),
    "tan": lambda a: _div(Num(1.0), _pow(_call("cos", a), Num(2.0))),
    "exp": lambda a: _call("exp", a),
    "log": lambda a: _div(Num(1.0), a),
    "sqrt": lambda a: _div(Num(1.0), _mul(Num(2.0), _call("sqrt", a))),
    "sinh": lambda a: _call("cosh", a),
    "cosh": lambda a: _call("sinh", a),
    "tanh": lambda a: _div(Num(1.0), _pow(_call("cosh", a), Num(2.0))),
    "abs": lambda a: _call("sign", a),
    "sign": lambda a: Num(0.0),
}


def variables(e: Expr) -> frozenset[str]:
    match e:
        case Var(name):
            return frozenset((name,))
        case Neg(arg) | Call(_, arg):
            return variables(arg)
        case BinOp(_, lhs, rhs):
            return variables(lhs) | variables(rhs)
        case _:
            return frozenset()


def differentiate(e: Expr, var: str) -> Expr:
    """Exact partial derivative of `e` with respect to "u" or "v".

    The result is constant-folded but not otherwise simplified.  abs
    differentiates to an internal step function that evaluates to 0 at the
    origin, so second derivatives of abs exist everywhere as trees.
    """
    if var not in _VARIABLES:
        raise ValueError(f"unknown variable {var!r}")
    match e:
        case Num(_) | Const(_):
            return Num(0.0)
        case Var(name):
            return Num(1.0 if name == var else 0.0)
        case Neg(arg):
            return _neg(differentiate(arg, var))
        case BinOp("+", lhs, rhs):
            return _add(differentiate(lhs, var), differentiate(rhs, var))
        case BinOp("-", lhs, rhs):
            return _sub(differentiate(lhs, var), differentiate(rhs, var))
        case BinOp("*", lhs, rhs):
            return _add(_mul(differentiate(lhs, var), rhs),
                        _mul(lhs, differentiate(rhs, var)))
        case BinOp("/", lhs, rhs):
            return _div(_sub(_mul(differentiate(lhs, var), rhs),
                             _mul(lhs, differentiate(rhs, var))),
                        _pow(rhs, Num(2.0)))
        case BinOp("^", lhs, rhs):
            if var not in variables(rhs):
                # d(f^c) = c * f^(c-1) * f'
                return _mul(_mul(rhs, _pow(lhs, _sub(rhs, Num(1.0)))),
                            differentiate(lhs, var))
            # general case via f^g = exp(g log f)
            return _mul(_pow(lhs, rhs),
                        _add(_mul(differentiate(rhs, var), _call("log", lhs)),
                             _div(_mul(rhs, differentiate(lhs, var)), lhs)))
        case Call(fn, arg):
            return _mul(_CHAIN[fn](arg), differentiate(arg, var))
    raise TypeError(f"not an Expr: {e!r}")


def evaluate(e: Expr, u: float, v: float) -> float:
    """Evaluate a tree at (u, v); raises EvalError on any numeric failure."""
    try:
        val = _eval(e, u, v)
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise EvalError(f"cannot evaluate {to_text(e)!r} at ({u}, {v}): {exc}") from exc
    if not math.isfinite(val):
        raise EvalError(f"non-finite value of {to_text(e)!r} at ({u}, {v})")
    return val


def _eval(e: Expr, u: float, v: float) -> float:
    match e:
        case Num(value):
            return value
        case Const(name):
            return _CONSTANTS[name]
        case Var(name):
            return u if name == "u" else v
        case Neg(arg):
            return -_eval(arg, u, v)
        case BinOp(op, lhs, rhs):
            return _apply(op, _eval(lhs, u, v), _eval(rhs, u, v))
        case Call(fn, arg):
            return _FUNCTIONS[fn](_eval(arg, u, v))
    raise TypeError(f"not an Expr: {e!r}")


# --- printing ---------------------------------------------------------------

def _prec(e: Expr) -> int:
    match e:
        case BinOp("+" | "-", _, _):
            return 1
        case BinOp("*" | "/", _, _):
            return 2
        case Neg(_):
            return 2
        case Num(value) if value < 0:
            return 2  # prints with a leading minus
        case BinOp("^", _, _):
            return 3
        case _:
            return 9


def _is_factor_shape(e: Expr) -> bool:
    """True when the printed form is a valid grammar `factor` on its own."""
    return not (isinstance(e, BinOp) and e.op != "^")


def _paren(s: str) -> str:
    return f"({s})"


def to_text(e: Expr) -> str:
    """Render a tree so that parse(to_text(e)) reproduces it exactly."""
    match e:
        case Num(value):
            if value == int(value) and abs(value) < 1e16:
                return str(int(value))
            return repr(value)
        case Const(name) | Var(name):
            return name
        case Neg(arg):
            inner = to_text(arg)
            if _prec(arg) <= 2:
                inner = _paren(inner)
            return f"-{inner}"
        case BinOp("^", lhs, rhs):
            left = to_text(lhs)
            if _prec(lhs) < 9:  # base must print as an atom
                left = _paren(left)
            right = to_text(rhs)
            if not _is_factor_shape(rhs):
                right = _paren(right)
            return f"{left}^{right}"
        case BinOp(op, lhs, rhs):
            prec = _prec(e)
            left = to_text(lhs)
            if _prec(lhs) < prec:
                left = _paren(left)
            right = to_text(rhs)
            if _prec(rhs) <= prec:
                right = _paren(right)
            return f"{left}{op}{right}"
        case Call(fn, arg):
            return f"{fn}({to_text(arg)})"
    raise TypeError(f"not an Expr: {e!r}")


# --- compilation to charts ---------------------------------------------------

def _emit(e: Expr) -> str:
    match e:
        case Num(value):
            return repr(value)
        case Const(name):
            return f"math.{name if name == 'pi' else 'e'}"
        case Var(name):
            return name
        case Neg(arg):
            return f"(-{_emit(arg)})"
        case BinOp("^", lhs, rhs):
            return f"math.pow({_emit(lhs)}, {_emit(rhs)})"
        case BinOp(op, lhs, rhs):
            return f"({_emit(lhs)}{op}{_emit(rhs)})"
        case Call(fn, arg):
            if fn == "abs":
                return f"abs({_emit(arg)})"
            if fn == "sign":
                return f"_sign({_emit(arg)})"
            return f"math.{fn}({_emit(arg)})"
    raise TypeError(f"not an Expr: {e!r}")


def compile_scalar(e: Expr):
    """Compile a tree to a fast (u, v) -> float.  May raise native numeric
    errors; use `evaluate` when EvalError semantics are needed directly."""
    code = f"def _f(u, v):\n    return {_emit(e)}\n"
    env = {"math": math, "_sign": _sign, "abs": abs}
    exec(code, env)  # code is generated from our own validated AST
    return env["_f"]


def _vector_fn(exprs, compiled):
    import numpy as np

    def call(u: float, v: float) -> "np.ndarray":
        out = np.empty(4)
        for i, fn in enumerate(compiled):
            try:
                out[i] = fn(u, v)
            except (ValueError, OverflowError, ZeroDivisionError) as exc:
                raise EvalError(
                    f"cannot evaluate {to_text(exprs[i])!r} at ({u}, {v}): {exc}"
                ) from exc
        return out

    return call


def compile_chart(x1, x2, x3, x4, domain, name: str = "user") -> Chart:
    """Build an exact-jet Chart from four coordinate expressions.

    Each coordinate may be a string (parsed here) or an Expr.  First and
    second partials are produced symbolically, so the chart carries exact
    derivative evaluators rather than finite-difference fallbacks.
    """
    coords = tuple(parse(c) if isinstance(c, str) else c for c in (x1, x2, x3, x4))
    for c in coords:
        if not isinstance(c, Expr):
            raise TypeError(f"coordinate is not an Expr or str: {c!r}")

    def derive(cs, var):
        return tuple(differentiate(c, var) for c in cs)

    du = derive(coords, "u")
    dv = derive(coords, "v")
    duu = derive(du, "u")
    duv = derive(du, "v")
    dvv = derive(dv, "v")

    def bundle(cs):
        return _vector_fn(cs, tuple(compile_scalar(c) for c in cs))

    return Chart(
        name=name,
        position=bundle(coords),
        domain=domain,
        partials=(bundle(du), bundle(dv), bundle(duu), bundle(duv), bundle(dvv)),
    )
