"""Expression language for real functions of one variable ``x``.

Grammar (unary minus sits at term level so ``-x^2/2`` means ``-(x^2/2)``)::

    expr    := term (("+" | "-") term)*
    term    := "-" term | factor (("*" | "/") factor)*
    factor  := "-" factor | primary ("^" factor)?
    primary := NUMBER | "x" | "pi" | IDENT "(" expr ")" | "(" expr ")"

``^`` is right-associative. Evaluation is vectorized over numpy arrays and
second derivatives come from forward-mode jets, never finite differences.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import gamma as _gamma
from .errors import DerivativeUndefined, DomainError, ExpressionSyntaxError, UnknownIdentifier

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "tan", "atan", "abs", "gamma")
CONSTANTS = {"pi": math.pi}
MAX_DEPTH = 200


class ZeroPowerWarning(RuntimeWarning):
    """Emitted when ``0^0`` is evaluated (result is 1)."""


# ---------------------------------------------------------------- nodes


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


Node = Union[Num, Var, Const, Neg, BinOp, Call]


def render(node: Node) -> str:
    """Fully parenthesized text that re-parses to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Neg):
        return f"(-{render(node.arg)})"
    if isinstance(node, BinOp):
        return f"({render(node.left)} {node.op} {render(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({render(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def is_constant(node: Node) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, (Num, Const)):
        return True
    if isinstance(node, (Neg, Call)):
        return is_constant(node.arg)
    return is_constant(node.left) and is_constant(node.right)


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            bad = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {source[bad]!r}", bad, source)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.depth = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, expected: str):
        kind, text, pos = self.peek()
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"expected {expected}, found {found}", pos, self.source)

    def expect(self, op: str):
        kind, text, _ = self.peek()
        if kind == "op" and text == op:
            self.advance()
        else:
            self.error(repr(op))

    def _enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExpressionSyntaxError("expression nested too deeply", self.peek()[2], self.source)

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.error("operator or end of input")
        return node

    def expr(self) -> Node:
        self._enter()
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        self.depth -= 1
        return node

    def term(self) -> Node:
        self._enter()
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            node = Neg(self.term())
        else:
            node = self.factor()
            while self.peek()[0] == "op" and self.peek()[1] in "*/":
                op = self.advance()[1]
                node = BinOp(op, node, self.factor())
        self.depth -= 1
        return node

    def factor(self) -> Node:
        self._enter()
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            node = Neg(self.factor())
        else:
            node = self.primary()
            if self.peek()[:2] == ("op", "^"):
                self.advance()
                node = BinOp("^", node, self.factor())
        self.depth -= 1
        return node

    def primary(self) -> Node:
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            value = float(text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError("numeric literal out of range", pos, self.source)
            return Num(value)
        if kind == "name":
            self.advance()
            if text == "x":
                return Var()
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise UnknownIdentifier(f"unknown identifier {text!r}", pos, self.source)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.error("number, 'x', 'pi', function call or '('")


# ---------------------------------------------------------------- jets


class Jet2:
    """Truncated Taylor jet (value, first derivative, second derivative).

    Components may be floats or equally-shaped numpy arrays.
    """

    __slots__ = ("value", "d1", "d2")

    def __init__(self, value, d1=0.0, d2=0.0):
        self.value = value
        self.d1 = d1
        self.d2 = d2

    def __iter__(self):
        return iter((self.value, self.d1, self.d2))

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, d1={self.d1!r}, d2={self.d2!r})"

    @staticmethod
    def _lift(other) -> "Jet2":
        return other if isinstance(other, Jet2) else Jet2(other)

    def __add__(self, other):
        o = Jet2._lift(other)
        return Jet2(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __sub__(self, other):
        o = Jet2._lift(other)
        return Jet2(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, other):
        return Jet2._lift(other) - self

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __mul__(self, other):
        o = Jet2._lift(other)
        return Jet2(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        inv = 1.0 / self.value
        return self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        return self * Jet2._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return Jet2._lift(other) * self.reciprocal()

    def chain(self, f0, f1, f2) -> "Jet2":
        """Compose with an outer function given its value and derivatives at self.value."""
        return Jet2(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)


# ---------------------------------------------------------------- evaluation


def _fail(cls, node: Node, x, mask, what: str):
    shape = np.broadcast_shapes(np.shape(mask), np.shape(x))
    pts = np.broadcast_to(np.asarray(x, dtype=float), shape)[np.broadcast_to(mask, shape)]
    point = float(pts.flat[0]) if pts.size else float("nan")
    sub = render(node)
    raise cls(f"{what} in {sub} at x = {point!r}", sub, point)


def _any(mask) -> bool:
    return bool(np.any(mask))


def _check_nan(node: Node, x, value):
    bad = np.isnan(value)
    if _any(bad):
        _fail(DomainError, node, x, bad, "undefined result")


class _Evaluator:
    """Walks a tree computing values (jets=False) or Jet2 objects (jets=True)."""

    def __init__(self, x, jets: bool):
        self.x = x
        self.jets = jets

    def run(self, node: Node):
        with np.errstate(all="ignore"):
            return self.visit(node)

    def visit(self, node: Node):
        if isinstance(node, Num):
            return Jet2(node.value) if self.jets else node.value
        if isinstance(node, Const):
            v = CONSTANTS[node.name]
            return Jet2(v) if self.jets else v
        if isinstance(node, Var):
            if self.jets:
                return Jet2(self.x, np.ones_like(self.x), np.zeros_like(self.x))
            return self.x
        if isinstance(node, Neg):
            return -self.visit(node.arg)
        if isinstance(node, BinOp):
            return self.binop(node)
        return self.call(node)

    def _value(self, v):
        return v.value if self.jets else v

    def binop(self, node: BinOp):
        if node.op == "^":
            return self.power(node)
        a = self.visit(node.left)
        b = self.visit(node.right)
        if node.op == "+":
            out = a + b
        elif node.op == "-":
            out = a - b
        elif node.op == "*":
            out = a * b
        else:
            zero = np.asarray(self._value(b)) == 0
            if _any(zero):
                _fail(DomainError, node, self.x, zero, "division by zero")
            out = a / b
        if self.jets:
            self._check_jet(node, out)
        else:
            _check_nan(node, self.x, out)
        return out

    def power(self, node: BinOp):
        base = self.visit(node.left)
        expo = self.visit(node.right)
        u = np.asarray(self._value(base), dtype=float)
        c = np.asarray(self._value(expo), dtype=float)
        non_integer = c != np.floor(c)
        if _any((u < 0) & non_integer):
            _fail(DomainError, node, self.x, (u < 0) & non_integer, "fractional power of negative base")
        if _any((u == 0) & (c < 0)):
            _fail(DomainError, node, self.x, (u == 0) & (c < 0), "negative power of zero")
        if _any((u == 0) & (c == 0)):
            warnings.warn("0^0 evaluated as 1", ZeroPowerWarning, stacklevel=4)
        value = np.power(u, c)
        if not self.jets:
            value = value if np.ndim(value) else float(value)
            _check_nan(node, self.x, value)
            return value
        if is_constant(node.right):
            # u^c with constant c: power rule, skipping terms whose coefficient vanishes
            c0 = float(c)
            f1 = c0 * np.power(u, c0 - 1.0) if c0 != 0.0 else np.zeros_like(u)
            if c0 * (c0 - 1.0) != 0.0:
                f2 = c0 * (c0 - 1.0) * np.power(u, c0 - 2.0)
            else:
                f2 = np.zeros_like(u)
            out = base.chain(value, f1, f2)
        else:
            if _any(u <= 0):
                _fail(DomainError, node, self.x, u <= 0, "variable exponent needs a positive base")
            out = self._exp(expo * self._log(base))
        self._check_jet(node, out)
        return out

    @staticmethod
    def _exp(j: Jet2) -> Jet2:
        e = np.exp(j.value)
        return j.chain(e, e, e)

    @staticmethod
    def _log(j: Jet2) -> Jet2:
        inv = 1.0 / j.value
        return j.chain(np.log(j.value), inv, -inv * inv)

    def _check_jet(self, node: Node, j: Jet2):
        _check_nan(node, self.x, j.value)
        bad = ~(np.isfinite(j.d1) & np.isfinite(j.d2))
        if _any(bad):
            _fail(DomainError, node, self.x, bad, "singular derivative")

    def call(self, node: Call):
        arg = self.visit(node.arg)
        u = np.asarray(self._value(arg), dtype=float)
        name = node.func
        if name == "log" and _any(u <= 0):
            _fail(DomainError, node, self.x, u <= 0, "log of non-positive argument")
        if name == "sqrt" and _any(u < 0):
            _fail(DomainError, node, self.x, u < 0, "sqrt of negative argument")
        if name == "gamma" and _any((u <= 0) & (u == np.floor(u))):
            _fail(DomainError, node, self.x, (u <= 0) & (u == np.floor(u)), "gamma pole")
        if name == "abs" and self.jets and _any(u == 0):
            _fail(DerivativeUndefined, node, self.x, u == 0, "abs is not differentiable")

        f0, f1, f2 = _UNARY[name](u, self.jets)
        if not self.jets:
            value = f0 if np.ndim(f0) else float(f0)
            _check_nan(node, self.x, value)
            return value
        out = arg.chain(f0, f1, f2)
        self._check_jet(node, out)
        return out


def _u_exp(u, d):
    e = np.exp(u)
    return e, e, e


def _u_log(u, d):
    if not d:
        return np.log(u), None, None
    inv = 1.0 / u
    return np.log(u), inv, -inv * inv


def _u_sqrt(u, d):
    s = np.sqrt(u)
    if not d:
        return s, None, None
    return s, 0.5 / s, -0.25 / (s * u)


def _u_sin(u, d):
    s = np.sin(u)
    if not d:
        return s, None, None
    return s, np.cos(u), -s


def _u_cos(u, d):
    c = np.cos(u)
    if not d:
        return c, None, None
    return c, -np.sin(u), -c


def _u_tan(u, d):
    t = np.tan(u)
    if not d:
        return t, None, None
    sec2 = 1.0 + t * t
    return t, sec2, 2.0 * t * sec2


def _u_atan(u, d):
    a = np.arctan(u)
    if not d:
        return a, None, None
    q = 1.0 / (1.0 + u * u)
    return a, q, -2.0 * u * q * q


def _u_abs(u, d):
    a = np.abs(u)
    if not d:
        return a, None, None
    return a, np.sign(u), np.zeros_like(u)


def _u_gamma(u, d):
    g = _gamma.gamma(u)
    if not d:
        return g, None, None
    psi, psi1 = _gamma.polygamma01(u)
    return g, g * psi, g * (psi * psi + psi1)


_UNARY = {
    "exp": _u_exp,
    "log": _u_log,
    "sqrt": _u_sqrt,
    "sin": _u_sin,
    "cos": _u_cos,
    "tan": _u_tan,
    "atan": _u_atan,
    "abs": _u_abs,
    "gamma": _u_gamma,
}


# ---------------------------------------------------------------- public API


class Expression:
    """Parsed expression; immutable and safe to share between threads."""

    __slots__ = ("root", "source")

    def __init__(self, root: Node, source: str | None = None):
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "source", source if source is not None else render(root))

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    def __eq__(self, other) -> bool:
        return isinstance(other, Expression) and self.root == other.root

    def __hash__(self) -> int:
        return hash(self.root)

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"

    def __str__(self) -> str:
        return self.source

    def render(self) -> str:
        return render(self.root)

    @property
    def is_constant(self) -> bool:
        return is_constant(self.root)

    def __call__(self, x):
        return evaluate(self, x)

    def jet2(self, x) -> Jet2:
        return eval_jet2(self, x)


def parse(source: str) -> Expression:
    """Parse ``source`` into an :class:`Expression`.

    Raises ExpressionSyntaxError (with a character position) or
    UnknownIdentifier.
    """
    if not isinstance(source, str):
        raise TypeError("expression source must be a string")
    if source.strip() == "":
        raise ExpressionSyntaxError("empty expression", 0, source)
    return Expression(_Parser(source).parse(), source)


def _substitute(node: Node, repl: Node) -> Node:
    if isinstance(node, Var):
        return repl
    if isinstance(node, (Num, Const)):
        return node
    if isinstance(node, Neg):
        return Neg(_substitute(node.arg, repl))
    if isinstance(node, Call):
        return Call(node.func, _substitute(node.arg, repl))
    return BinOp(node.op, _substitute(node.left, repl), _substitute(node.right, repl))


def substitute(e: Expression, replacement: "Expression | str") -> Expression:
    """Return ``e`` with every occurrence of ``x`` replaced by ``replacement``."""
    if isinstance(replacement, str):
        replacement = parse(replacement)
    return Expression(_substitute(e.root, replacement.root))


def _as_points(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def evaluate(e: Expression, x):
    """Value of ``e`` at ``x`` (scalar or array). Out-of-domain points raise DomainError."""
    arr, scalar = _as_points(x)
    out = _Evaluator(arr, jets=False).run(e.root)
    out = np.broadcast_to(np.asarray(out, dtype=float), arr.shape)
    return float(out) if scalar else np.array(out)


def eval_jet2(e: Expression, x) -> Jet2:
    """Exact (value, d/dx, d²/dx²) of ``e`` at ``x`` by forward-mode propagation."""
    arr, scalar = _as_points(x)
    j = _Evaluator(arr, jets=True).run(e.root)
    parts = [np.broadcast_to(np.asarray(p, dtype=float), arr.shape) for p in (j.value, j.d1, j.d2)]
    if scalar:
        return Jet2(*(float(p) for p in parts))
    return Jet2(*(np.array(p) for p in parts))


def as_function(f):
    """Accept an Expression, expression text or a vectorized callable."""
    if isinstance(f, Expression):
        return f.__call__
    if isinstance(f, str):
        return parse(f).__call__
    if callable(f):
        return f
    raise TypeError(f"cannot use {f!r} as a function of x")
