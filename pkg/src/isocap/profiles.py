"""Radial profile expressions: parsing, printing, and exact derivatives.

Profiles are written in a small arithmetic language over the radial variable
``r`` plus named parameters, e.g. ``"1 - 2*m/r"`` or
``"r + 1.5*exp(-4*(r-3)^2)"``.  Evaluation returns the value together with
the first and second derivative in ``r``, computed with second-order dual
numbers (exact to rounding, not finite differences).
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from typing import Dict, Tuple, Union

from .errors import EvalError, ProfileSyntaxError, UnknownIdentifier

__all__ = ["ProfileExpr", "parse", "eval_d2", "to_text", "NonSmoothTie"]

ParamSet = Dict[str, float]


class NonSmoothTie(UserWarning):
    """Emitted when min/max is differentiated at a tie of its arguments."""


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    ident: str  # "r", "pi", or a parameter name


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Node", ...]


Node = Union[Num, Name, Neg, Bin, Call]

_FUNCTIONS = {"sqrt": 1, "exp": 1, "log": 1, "sin": 1, "cos": 1,
              "tanh": 1, "pow": 2, "min": 2, "max": 2}


@dataclass(frozen=True)
class ProfileExpr:
    """A parsed, immutable profile expression."""

    ast: Node
    text: str

    def names(self):
        """All parameter names referenced (excludes ``r`` and ``pi``)."""
        out = set()

        def walk(n):
            if isinstance(n, Name) and n.ident not in ("r", "pi"):
                out.add(n.ident)
            elif isinstance(n, Neg):
                walk(n.operand)
            elif isinstance(n, Bin):
                walk(n.left)
                walk(n.right)
            elif isinstance(n, Call):
                for a in n.args:
                    walk(a)
        walk(self.ast)
        return out


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(r"""
    (?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ProfileSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group()), pos))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group(), pos))
        elif m.lastgroup == "op":
            tokens.append((m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ProfileSyntaxError(f"unexpected token {tok[1]!r}", tok[2], {kind})
        self.i += 1
        return tok

    # expr := term (('+'|'-') term)*
    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = Bin(op, node, self.term())
        return node

    # term := unary (('*'|'/') unary)*
    def term(self) -> Node:
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = Bin(op, node, self.unary())
        return node

    # unary := '-' unary | power      (so -r^2 parses as -(r^2))
    def unary(self) -> Node:
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    # power := atom ('^' unary)?      (right-associative)
    def power(self) -> Node:
        node = self.atom()
        if self.peek()[0] == "^":
            self.take()
            node = Bin("^", node, self.unary())
        return node

    def atom(self) -> Node:
        kind, value, offset = self.peek()
        if kind == "num":
            self.take()
            return Num(value)
        if kind == "ident":
            self.take()
            if self.peek()[0] == "(":
                if value not in _FUNCTIONS:
                    raise UnknownIdentifier(
                        f"unknown function {value!r} at offset {offset}")
                self.take("(")
                args = [self.expr()]
                while self.peek()[0] == ",":
                    self.take()
                    args.append(self.expr())
                self.take(")")
                if len(args) != _FUNCTIONS[value]:
                    raise ProfileSyntaxError(
                        f"{value} takes {_FUNCTIONS[value]} argument(s), "
                        f"got {len(args)}", offset)
                return Call(value, tuple(args))
            return Name(value)
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        raise ProfileSyntaxError(f"unexpected token {value!r}", offset,
                                 {"num", "ident", "(", "-"})


def parse(text: str) -> ProfileExpr:
    """Parse expression text; raises ProfileSyntaxError / UnknownIdentifier."""
    if not text or not text.strip():
        raise ProfileSyntaxError("empty expression", 0)
    p = _Parser(text)
    node = p.expr()
    p.take("end")
    return ProfileExpr(node, text)


def to_text(expr: ProfileExpr) -> str:
    """Canonical fully parenthesized rendering; parse(to_text(e)) == e."""

    def render(n: Node) -> str:
        if isinstance(n, Num):
            return repr(n.value)
        if isinstance(n, Name):
            return n.ident
        if isinstance(n, Neg):
            return f"(-{render(n.operand)})"
        if isinstance(n, Bin):
            return f"({render(n.left)}{n.op}{render(n.right)})"
        return f"{n.func}({','.join(render(a) for a in n.args)})"

    return render(expr.ast)


# ---------------------------------------------------------------------------
# Second-order dual numbers

class Dual2:
    """Value with first and second derivative in the flow variable."""

    __slots__ = ("v", "d1", "d2")

    def __init__(self, v: float, d1: float = 0.0, d2: float = 0.0):
        self.v = v
        self.d1 = d1
        self.d2 = d2

    def __add__(self, o):
        return Dual2(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    def __sub__(self, o):
        return Dual2(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)

    def __mul__(self, o):
        return Dual2(self.v * o.v,
                     self.d1 * o.v + self.v * o.d1,
                     self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)

    def __truediv__(self, o):
        if o.v == 0.0:
            raise EvalError("division by zero")
        w = self.v / o.v
        wd1 = (self.d1 - w * o.d1) / o.v
        wd2 = (self.d2 - 2.0 * wd1 * o.d1 - w * o.d2) / o.v
        return Dual2(w, wd1, wd2)

    def chain(self, f: float, df: float, d2f: float) -> "Dual2":
        """Compose with a scalar map given (f, f', f'') at self.v."""
        return Dual2(f, df * self.d1, d2f * self.d1 * self.d1 + df * self.d2)


def _dual_pow(base: Dual2, expo: Dual2) -> Dual2:
    if expo.d1 == 0.0 and expo.d2 == 0.0:
        c = expo.v
        x = base.v
        if x == 0.0 and c < 2.0:
            if c < 0.0:
                raise EvalError("zero raised to a negative power")
            # derivatives of x^c blow up at 0 for c < 2; value is still fine
            if c in (0.0, 1.0):
                return base.chain(x ** c, c * (x ** (c - 1.0) if c else 0.0), 0.0)
            raise EvalError(f"non-smooth power 0^{c}")
        if x < 0.0 and c != round(c):
            raise EvalError(f"negative base {x} with non-integer exponent {c}")
        f = x ** c
        df = c * x ** (c - 1.0) if c != 0.0 else 0.0
        d2f = c * (c - 1.0) * x ** (c - 2.0) if c not in (0.0, 1.0) else 0.0
        return base.chain(f, df, d2f)
    if base.v <= 0.0:
        raise EvalError("variable exponent requires a positive base")
    # x^y = exp(y*log x)
    return _dual_exp(expo * _dual_log(base))


def _dual_exp(x: Dual2) -> Dual2:
    e = math.exp(x.v)
    return x.chain(e, e, e)


def _dual_log(x: Dual2) -> Dual2:
    if x.v <= 0.0:
        raise EvalError(f"log of non-positive value {x.v}")
    return x.chain(math.log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v))


def _dual_sqrt(x: Dual2) -> Dual2:
    if x.v < 0.0:
        raise EvalError(f"sqrt of negative value {x.v}")
    if x.v == 0.0:
        if x.d1 == 0.0 and x.d2 == 0.0:
            return Dual2(0.0)
        raise EvalError("sqrt not differentiable at 0")
    s = math.sqrt(x.v)
    return x.chain(s, 0.5 / s, -0.25 / (s * x.v))


def _dual_minmax(func: str, a: Dual2, b: Dual2) -> Dual2:
    if a.v == b.v:
        warnings.warn(f"{func} differentiated one-sidedly at a tie", NonSmoothTie,
                      stacklevel=4)
        return a
    if (a.v < b.v) == (func == "min"):
        return a
    return b


_FUNC_EVAL = {
    "exp": _dual_exp,
    "log": _dual_log,
    "sqrt": _dual_sqrt,
    "sin": lambda x: x.chain(math.sin(x.v), math.cos(x.v), -math.sin(x.v)),
    "cos": lambda x: x.chain(math.cos(x.v), -math.sin(x.v), -math.cos(x.v)),
    "tanh": lambda x: x.chain(math.tanh(x.v),
                              1.0 - math.tanh(x.v) ** 2,
                              -2.0 * math.tanh(x.v) * (1.0 - math.tanh(x.v) ** 2)),
}


def _eval_node(n: Node, r: Dual2, params: ParamSet) -> Dual2:
    if isinstance(n, Num):
        return Dual2(n.value)
    if isinstance(n, Name):
        if n.ident == "r":
            return r
        if n.ident == "pi":
            return Dual2(math.pi)
        try:
            return Dual2(float(params[n.ident]))
        except KeyError:
            raise UnknownIdentifier(f"unbound parameter {n.ident!r}") from None
    if isinstance(n, Neg):
        x = _eval_node(n.operand, r, params)
        return Dual2(-x.v, -x.d1, -x.d2)
    if isinstance(n, Bin):
        a = _eval_node(n.left, r, params)
        b = _eval_node(n.right, r, params)
        if n.op == "+":
            return a + b
        if n.op == "-":
            return a - b
        if n.op == "*":
            return a * b
        if n.op == "/":
            return a / b
        return _dual_pow(a, b)
    # Call
    if n.func == "pow":
        return _dual_pow(_eval_node(n.args[0], r, params),
                         _eval_node(n.args[1], r, params))
    if n.func in ("min", "max"):
        return _dual_minmax(n.func,
                            _eval_node(n.args[0], r, params),
                            _eval_node(n.args[1], r, params))
    return _FUNC_EVAL[n.func](_eval_node(n.args[0], r, params))


def eval_d2(expr: ProfileExpr, r: float, params: ParamSet | None = None
            ) -> Tuple[float, float, float]:
    """Evaluate expr at radius r: returns (value, d/dr, d^2/dr^2)."""
    out = _eval_node(expr.ast, Dual2(float(r), 1.0, 0.0), params or {})
    if not (math.isfinite(out.v) and math.isfinite(out.d1) and math.isfinite(out.d2)):
        raise EvalError(f"non-finite evaluation at r={r}")
    return out.v, out.d1, out.d2
