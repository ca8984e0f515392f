"""Closed-form real expressions: parsing, evaluation and dual-number derivatives.

Grammar (``^`` binds tighter than unary minus and is right-associative)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := number | ident | ident "(" expr ")" | "(" expr ")"

Identifiers are the variable ``x``, the constants ``pi`` and ``e``, the
functions in :data:`FUNCTIONS`, and named parameters declared at parse time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Union

import numpy as np

FUNCTIONS = ("exp", "ln", "tan", "atan", "sin", "cos", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLE = "x"
DEFAULT_PARAMS = frozenset({"c"})


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownFunctionError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class UnboundParameterError(ExprError):
    pass


class DomainError(ExprError, ArithmeticError):
    pass


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Const, Param, Neg, BinOp, Call]


@dataclass(frozen=True)
class Expr:
    """A parsed expression. Immutable; compiled evaluators are cached."""

    root: Node
    source: str = field(default="", compare=False)

    def __str__(self) -> str:
        return to_string(self)

    @cached_property
    def param_names(self) -> frozenset:
        return frozenset(_params_in(self.root))

    @cached_property
    def _scalar_source(self) -> str:
        return _emit(self.root, "m")

    @cached_property
    def _array_source(self) -> str:
        return _emit(self.root, "np")


def _params_in(node: Node):
    if isinstance(node, Param):
        yield node.name
    elif isinstance(node, Neg):
        yield from _params_in(node.arg)
    elif isinstance(node, BinOp):
        yield from _params_in(node.left)
        yield from _params_in(node.right)
    elif isinstance(node, Call):
        yield from _params_in(node.arg)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN = re.compile(
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
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, params: frozenset):
        self.tokens = _tokenize(text)
        self.i = 0
        self.params = params

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise UnknownFunctionError(f"unknown function {text!r} at position {pos}")
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in FUNCTIONS:
                raise ExprSyntaxError(f"function {text!r} needs an argument", pos)
            if text == VARIABLE:
                return Var()
            if text in CONSTANTS:
                return Const(text)
            if text in self.params:
                return Param(text)
            raise UnknownIdentifierError(f"unknown identifier {text!r} at position {pos}")
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", pos)


def parse(text: str, params: Iterable[str] = DEFAULT_PARAMS) -> Expr:
    """Parse ``text``; identifiers other than ``x``, constants, functions and
    the names in ``params`` are rejected."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    names = frozenset(params)
    bad = names & (set(FUNCTIONS) | set(CONSTANTS) | {VARIABLE})
    if bad:
        raise ExprError(f"reserved parameter names: {sorted(bad)}")
    return Expr(_Parser(text, names).parse(), text)


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _fmt(node: Node) -> tuple[str, int]:
    if isinstance(node, Num):
        return repr(node.value), 5
    if isinstance(node, Var):
        return VARIABLE, 5
    if isinstance(node, (Const, Param)):
        return node.name, 5
    if isinstance(node, Call):
        return f"{node.func}({_fmt(node.arg)[0]})", 5
    if isinstance(node, Neg):
        s, p = _fmt(node.arg)
        return "-" + (s if p >= _PREC["neg"] else f"({s})"), _PREC["neg"]
    prec = _PREC[node.op]
    ls, lp = _fmt(node.left)
    rs, rp = _fmt(node.right)
    if node.op == "^":
        # right-assoc; the base must be an atom so that -a^b stays -(a^b)
        ls = ls if lp > prec else f"({ls})"
        rs = rs if rp >= _PREC["neg"] else f"({rs})"
    else:
        ls = ls if lp >= prec else f"({ls})"
        rs = rs if rp > prec else f"({rs})"
    return f"{ls} {node.op} {rs}", prec


def to_string(e: Expr) -> str:
    return _fmt(e.root)[0]


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

_SCALAR_FUNCS = {
    "exp": "m.exp", "ln": "m.log", "tan": "m.tan", "atan": "m.atan",
    "sin": "m.sin", "cos": "m.cos", "sqrt": "m.sqrt", "abs": "abs",
}
_ARRAY_FUNCS = {
    "exp": "np.exp", "ln": "np.log", "tan": "np.tan", "atan": "np.arctan",
    "sin": "np.sin", "cos": "np.cos", "sqrt": "np.sqrt", "abs": "np.abs",
}


def _emit(node: Node, lib: str) -> str:
    funcs = _SCALAR_FUNCS if lib == "m" else _ARRAY_FUNCS
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Const):
        return repr(CONSTANTS[node.name])
    if isinstance(node, Param):
        return f"_p_{node.name}"
    if isinstance(node, Neg):
        return f"(-{_emit(node.arg, lib)})"
    if isinstance(node, Call):
        return f"{funcs[node.func]}({_emit(node.arg, lib)})"
    left, right = _emit(node.left, lib), _emit(node.right, lib)
    if node.op == "^":
        # math.pow raises on negative**fractional instead of going complex
        return f"{'m.pow' if lib == 'm' else 'np.power'}({left}, {right})"
    return f"({left} {node.op} {right})"


def _bind(e: Expr, params: Mapping[str, float] | None) -> dict:
    params = params or {}
    missing = e.param_names - set(params)
    if missing:
        raise UnboundParameterError(f"unbound parameters: {sorted(missing)}")
    return {f"_p_{k}": float(params[k]) for k in e.param_names}


def compile_scalar(e: Expr, params: Mapping[str, float] | None = None) -> Callable[[float], float]:
    """Return ``x -> value`` raising :class:`DomainError` off the domain."""
    env = {"m": math, **_bind(e, params)}
    raw = eval(f"lambda x: {e._scalar_source}", env)  # noqa: S307 - source is generated from the AST

    def call(x: float) -> float:
        try:
            value = raw(float(x))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"{to_string(e)} undefined at x={x!r}: {exc}") from None
        if not math.isfinite(value):
            raise DomainError(f"{to_string(e)} is not finite at x={x!r}")
        return value

    return call


def compile_array(e: Expr, params: Mapping[str, float] | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized evaluator. Non-finite entries are returned as nan/inf, not raised."""
    env = {"np": np, **_bind(e, params)}
    raw = eval(f"lambda x: {e._array_source}", env)  # noqa: S307

    def call(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.broadcast_to(raw(x), x.shape).astype(float)

    return call


def evaluate(e: Expr, x: float, params: Mapping[str, float] | None = None) -> float:
    return compile_scalar(e, params)(x)


# --------------------------------------------------------------------------
# Dual numbers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Dual:
    """``re + eps·ε`` with ε² = 0; parts may be floats or numpy arrays."""

    re: object
    eps: object = 0.0

    @staticmethod
    def lift(v) -> "Dual":
        return v if isinstance(v, Dual) else Dual(v, 0.0)

    def __add__(self, other):
        o = Dual.lift(other)
        return Dual(self.re + o.re, self.eps + o.eps)

    __radd__ = __add__

    def __sub__(self, other):
        o = Dual.lift(other)
        return Dual(self.re - o.re, self.eps - o.eps)

    def __rsub__(self, other):
        return Dual.lift(other) - self

    def __neg__(self):
        return Dual(-self.re, -self.eps)

    def __mul__(self, other):
        o = Dual.lift(other)
        return Dual(self.re * o.re, self.re * o.eps + self.eps * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Dual.lift(other)
        return Dual(self.re / o.re, (self.eps * o.re - self.re * o.eps) / (o.re * o.re))

    def __rtruediv__(self, other):
        return Dual.lift(other) / self

    def __pow__(self, other):
        o = Dual.lift(other)
        value = np.power(self.re, o.re)
        if np.all(np.asarray(o.eps) == 0):
            return Dual(value, o.re * np.power(self.re, o.re - 1) * self.eps)
        return Dual(value, value * (o.eps * np.log(self.re) + o.re * self.eps / self.re))

    def __rpow__(self, other):
        return Dual.lift(other) ** self


def _dual_abs(d: Dual) -> Dual:
    sign = np.sign(d.re)
    # |x| has no derivative at 0
    return Dual(np.abs(d.re), np.where(sign == 0, np.nan, sign * d.eps))


_DUAL_FUNCS: dict[str, Callable[[Dual], Dual]] = {
    "exp": lambda d: Dual(np.exp(d.re), np.exp(d.re) * d.eps),
    "ln": lambda d: Dual(np.log(d.re), d.eps / d.re),
    "tan": lambda d: Dual(np.tan(d.re), d.eps / np.cos(d.re) ** 2),
    "atan": lambda d: Dual(np.arctan(d.re), d.eps / (1.0 + d.re**2)),
    "sin": lambda d: Dual(np.sin(d.re), np.cos(d.re) * d.eps),
    "cos": lambda d: Dual(np.cos(d.re), -np.sin(d.re) * d.eps),
    "sqrt": lambda d: Dual(np.sqrt(d.re), d.eps / (2.0 * np.sqrt(d.re))),
    "abs": _dual_abs,
}


def eval_dual(node: Node, x: Dual, params: Mapping[str, float]) -> Dual:
    if isinstance(node, Num):
        return Dual(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return Dual(CONSTANTS[node.name])
    if isinstance(node, Param):
        return Dual(float(params[node.name]))
    if isinstance(node, Neg):
        return -eval_dual(node.arg, x, params)
    if isinstance(node, Call):
        return _DUAL_FUNCS[node.func](eval_dual(node.arg, x, params))
    left = eval_dual(node.left, x, params)
    right = eval_dual(node.right, x, params)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        return left / right
    return left**right


def derivative_array(e: Expr, xs, params: Mapping[str, float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Values and exact forward-mode derivatives at every point of ``xs``.

    Points outside the domain come back as nan; callers decide what to do.
    """
    _bind(e, params)
    xs = np.asarray(xs, dtype=float)
    with np.errstate(all="ignore"):
        d = eval_dual(e.root, Dual(xs, np.ones_like(xs)), params or {})
        re = np.broadcast_to(np.asarray(d.re, dtype=float), xs.shape)
        eps = np.broadcast_to(np.asarray(d.eps, dtype=float), xs.shape)
    return re, eps


def derivative_at(e: Expr, x: float, params: Mapping[str, float] | None = None) -> float:
    value, slope = derivative_array(e, np.float64(x), params)
    if not (np.isfinite(value) and np.isfinite(slope)):
        raise DomainError(f"{to_string(e)} is not differentiable at x={x!r}")
    return float(slope)
