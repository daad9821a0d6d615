"""Complex scalar expressions with forward-mode differentiation.

Grammar (highest precedence first)::

    power   := primary ('^' ['-'] power)?      right associative, integer exponent
    unary   := '-' unary | '+' unary | power
    term    := unary (('*' | '/') unary)*
    expr    := term (('+' | '-') term)*
    primary := number | 'i' | name | func '(' expr ')' | '(' expr ')'

Functions: ``sin cos exp sqrt conj``. ``i`` is the imaginary unit and cannot be
used as a variable name. Evaluation is vectorised: variables may be bound to
numpy arrays, in which case every operation broadcasts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "sqrt", "conj")
RESERVED = frozenset(FUNCTIONS) | {"i"}


class ExprError(Exception):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message, source, pos):
        line = source.count("\n", 0, pos) + 1
        col = pos - (source.rfind("\n", 0, pos) + 1) + 1
        self.line, self.column = line, col
        super().__init__(f"{message} at line {line}, column {col}")


class EvalError(ExprError):
    pass


# ---------------------------------------------------------------------------
# AST


class Node:
    __slots__ = ()

    def __str__(self):
        return to_source(self)

    def variables(self) -> frozenset[str]:
        out: set[str] = set()
        _collect_vars(self, out)
        return frozenset(out)


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Imag(Node):
    pass


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True)
class Call(Node):
    fn: str
    arg: Node


Expr = Node


def _collect_vars(node, out):
    if isinstance(node, Var):
        out.add(node.name)
    elif isinstance(node, (Neg, Call)):
        _collect_vars(node.arg, out)
    elif isinstance(node, Pow):
        _collect_vars(node.base, out)
    elif isinstance(node, BinOp):
        _collect_vars(node.left, out)
        _collect_vars(node.right, out)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source):
    tokens = []
    pos = 0
    n = len(source)
    while True:
        while pos < n and source[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", source, pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(message, self.source, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] != "op":
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {value!r}, found {found}", tok)

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise self.error(f"unexpected {tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if tok[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[:2] != ("op", "^"):
            return base
        self.take()
        tok = self.peek()
        negate = False
        if tok[:2] == ("op", "-"):
            self.take()
            negate = True
        rhs = self.power()
        k = _const_int(rhs)
        if k is None:
            raise self.error("non-integer exponent literal", tok)
        return Pow(base, -k if negate else k)

    def primary(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise self.error(f"unknown function {text!r}", tok)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text == "i":
                return Imag()
            if text in FUNCTIONS:
                raise self.error(f"function {text!r} requires an argument", tok)
            return Var(text)
        if tok[:2] == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise self.error(f"unexpected {found}", tok)


def _const_int(node):
    """Fold an exponent subtree to an int, or return None."""
    if isinstance(node, Num):
        v = node.value
        return int(v) if float(v).is_integer() else None
    if isinstance(node, Neg):
        k = _const_int(node.arg)
        return None if k is None else -k
    if isinstance(node, Pow):
        b = _const_int(node.base)
        if b is None or node.exponent < 0:
            return None
        return b ** node.exponent
    return None


def parse(source: str, variables: Sequence[str] | None = None) -> Node:
    """Parse ``source`` into an expression tree.

    If ``variables`` is given, every identifier in the expression must be one
    of them.
    """
    node = _Parser(source).parse()
    if variables is not None:
        unknown = sorted(node.variables() - set(variables))
        if unknown:
            raise ExprError(
                f"undeclared variable(s) {', '.join(unknown)} in {source!r}"
            )
    return node


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _fmt_num(v):
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_source(node: Node) -> str:
    """Render ``node`` with the minimal parentheses needed to reparse it."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.arg)
        if _prec(node.arg) < _PREC_NEG:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(node, Pow):
        base = to_source(node.base)
        if _prec(node.base) < _PREC_ATOM:
            base = f"({base})"
        k = node.exponent
        return f"{base}^{k}" if k >= 0 else f"{base}^({k})"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = to_source(node.left)
        if _prec(node.left) < p:
            left = f"({left})"
        right = to_source(node.right)
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# dual numbers


class Dual:
    """Value with first derivatives along ``k`` tangent directions.

    ``der`` has shape ``val.shape + (k,)`` so that values and derivatives
    broadcast together with the direction axis last.
    """

    __slots__ = ("val", "der")

    def __init__(self, val, der):
        self.val = val
        self.der = der

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.der + other.der)
        return Dual(self.val + other, self.der)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.der - other.der)
        return Dual(self.val - other, self.der)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.der)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.val * other.val,
                self.der * _col(other.val) + _col(self.val) * other.der,
            )
        return Dual(self.val * other, self.der * _col(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            q = self.val / other.val
            return Dual(q, (self.der - _col(q) * other.der) / _col(other.val))
        return Dual(self.val / other, self.der / _col(other))

    def __rtruediv__(self, other):
        q = other / self.val
        return Dual(q, -_col(q / self.val) * self.der)

    def ipow(self, k: int):
        if k == 0:
            return Dual(np.ones_like(self.val), np.zeros_like(self.der))
        v = self.val ** (k - 1)
        return Dual(v * self.val, _col(k * v) * self.der)

    def chain(self, f, df):
        return Dual(f, _col(df) * self.der)


def _col(a):
    return np.asarray(a)[..., None]


def _ipow(x, k):
    if isinstance(x, Dual):
        return x.ipow(k)
    if k < 0:
        return 1.0 / _ipow(x, -k)
    return x**k


def _apply(fn, x):
    if isinstance(x, Dual):
        v = x.val
        if fn == "sin":
            return x.chain(np.sin(v), np.cos(v))
        if fn == "cos":
            return x.chain(np.cos(v), -np.sin(v))
        if fn == "exp":
            e = np.exp(v)
            return x.chain(e, e)
        if fn == "sqrt":
            s = np.sqrt(v)
            return x.chain(s, 0.5 / s)
        raise EvalError("conj is not holomorphic and cannot be differentiated")
    if fn == "conj":
        return np.conj(x)
    return getattr(np, fn)(x)


def _has_zero(v):
    return bool(np.any(np.asarray(v) == 0))


class _Evaluator:
    def __init__(self, env, active=frozenset()):
        self.env = env
        self.active = active

    def __call__(self, node):
        if isinstance(node, Num):
            return complex(node.value)
        if isinstance(node, Imag):
            return 1j
        if isinstance(node, Var):
            try:
                return self.env[node.name]
            except KeyError:
                raise EvalError(f"unbound variable {node.name!r}") from None
        if isinstance(node, Neg):
            return -self(node.arg)
        if isinstance(node, BinOp):
            a = self(node.left)
            b = self(node.right)
            op = node.op
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            den = b.val if isinstance(b, Dual) else b
            if _has_zero(den):
                raise EvalError(
                    f"division by zero in {to_source(node)!r} "
                    f"with bindings {self._describe(den)}"
                )
            return a / b
        if isinstance(node, Pow):
            base = self(node.base)
            if node.exponent < 0:
                bv = base.val if isinstance(base, Dual) else base
                if _has_zero(bv):
                    raise EvalError(
                        f"division by zero in {to_source(node)!r} "
                        f"with bindings {self._describe(bv)}"
                    )
            return _ipow(base, node.exponent)
        if isinstance(node, Call):
            if node.fn == "conj" and node.arg.variables() & self.active:
                raise EvalError(
                    f"conj applied to active variable(s) in {to_source(node)!r}"
                )
            return _apply(node.fn, self(node.arg))
        raise TypeError(f"not an expression node: {node!r}")

    def _describe(self, den):
        """Bindings at the first point where ``den`` vanishes."""
        den = np.asarray(den)
        idx = np.argwhere(den == 0)[0] if den.ndim else ()
        out = {}
        for name, v in self.env.items():
            v = v.val if isinstance(v, Dual) else v
            v = np.asarray(v)
            out[name] = complex(v[tuple(idx[-v.ndim:])] if v.ndim else v)
        return out


def evaluate(e: Node, bindings: Mapping[str, complex]):
    """Evaluate ``e`` with variables bound to scalars or arrays."""
    return _Evaluator(bindings)(e)


@dataclass(frozen=True)
class DualValue:
    value: complex | np.ndarray
    partials: np.ndarray  # last axis runs over the active variables


def eval_dual(e: Node, bindings: Mapping[str, complex], active: Sequence[str]) -> DualValue:
    """Evaluate ``e`` and its exact partial derivatives w.r.t. ``active``."""
    k = len(active)
    env = dict(bindings)
    for j, name in enumerate(active):
        if name not in env:
            raise EvalError(f"unbound variable {name!r}")
        v = np.asarray(env[name], dtype=complex)
        d = np.zeros(v.shape + (k,), dtype=complex)
        d[..., j] = 1.0
        env[name] = Dual(v, d)
    out = evaluate_jet(e, env, k)
    return DualValue(out.val, out.der)


def evaluate_jet(e: Node, env: Mapping[str, object], k: int) -> Dual:
    """Evaluate with some bindings already seeded as :class:`Dual`.

    The result is always a :class:`Dual` with ``k`` directions, even when the
    expression does not depend on any seeded variable.
    """
    active = frozenset(n for n, v in env.items() if isinstance(v, Dual))
    out = _Evaluator(env, active)(e)
    if isinstance(out, Dual):
        return out
    shape = next((np.shape(v.val) for v in env.values() if isinstance(v, Dual)), ())
    val = np.broadcast_to(np.asarray(out, dtype=complex), shape)
    return Dual(val, np.zeros(np.shape(val) + (k,), dtype=complex))


def eval_fd(e: Node, bindings: Mapping[str, complex], active: Sequence[str], h: float = 1e-5):
    """Central finite differences of ``e`` w.r.t. ``active`` (cross-check mode)."""
    parts = []
    for name in active:
        up = dict(bindings)
        dn = dict(bindings)
        up[name] = bindings[name] + h
        dn[name] = bindings[name] - h
        parts.append((evaluate(e, up) - evaluate(e, dn)) / (2 * h))
    return np.stack(np.broadcast_arrays(*parts), axis=-1)
