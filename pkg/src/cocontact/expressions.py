"""A small expression language for scalar fields on extended phase space.

Grammar (EBNF):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | base ("^" factor)?
    base   := number | ident | ident "(" expr ")" | "(" expr ")"

"+ - * /" are left-associative, "^" is right-associative and binds tighter
than unary minus, so "-x^2" is -(x^2) while "2^-3" still parses.  Identifiers
are the coordinates t, z, q1..qn, p1..pn, the function names below, or named
parameters (anything else).

Evaluation runs on plain floats or on dual numbers through the same code
path, so the value returned together with a gradient is bit-identical to a
derivative-free evaluation.  Integer-literal exponents are compiled to
repeated multiplication, which keeps negative bases legal; the general power
x^y requires x > 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .duals import Dual, dabs, dcos, dcosh, dexp, dlog, dpow, dsin, dsinh, dsqrt, dual_phase, ipow
from .geometry import Covector, PhasePoint

FUNCTIONS = {
    "exp": dexp,
    "log": dlog,
    "sin": dsin,
    "cos": dcos,
    "sinh": dsinh,
    "cosh": dcosh,
    "sqrt": dsqrt,
    "abs": dabs,
}


# -- errors --------------------------------------------------------------------


class ExpressionError(Exception):
    """Base class for all expression-language failures."""


class ExprSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprNameError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprIndexError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundParameterError(ExpressionError):
    pass


class EvalDomainError(ExpressionError):
    """A function left its domain during evaluation; carries the offending node."""

    def __init__(self, message: str, node):
        super().__init__(f"{message} in '{unparse(node)}'")
        self.node = node


# -- AST -----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Coord:
    kind: str  # "t" | "q" | "p" | "z"
    index: int  # 1-based for q/p, 0 for t/z


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


Expr = (Num, Coord, Param, Neg, Bin, Call)


# -- lexer ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            # skip leading whitespace before reporting
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            at = len(source) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {source[at]!r}", at)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


# -- parser --------------------------------------------------------------------

_COORD_RE = re.compile(r"^([qp])(\d+)$")


class _Parser:
    def __init__(self, source: str, n: int):
        if not source or not source.strip():
            raise ExprSyntaxError("empty expression", 0)
        if n < 1:
            raise ValueError("dimension n must be >= 1")
        self.tokens = _tokenize(source)
        self.i = 0
        self.n = n

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, symbol: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != symbol:
            raise ExprSyntaxError(f"expected {symbol!r}", pos)
        return self.advance()

    def parse(self):
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            if kind == "op" and text == ")":
                raise ExprSyntaxError("unbalanced parentheses", pos)
            raise ExprSyntaxError(f"unexpected token {text!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                e = Bin(text, e, self.term())
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                e = Bin(text, e, self.factor())
            else:
                return e

    def factor(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.factor())
        e = self.base()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return Bin("^", e, self.factor())
        return e

    def base(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            nk, nt, _ = self.peek()
            if nk == "op" and nt == "(":
                if text not in FUNCTIONS:
                    raise ExprNameError(f"unknown function {text!r}", pos)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            return self.identifier(text, pos)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "end":
            raise ExprSyntaxError("unexpected end of expression", pos)
        raise ExprSyntaxError(f"unexpected token {text!r}", pos)

    def identifier(self, text: str, pos: int):
        if text == "t":
            return Coord("t", 0)
        if text == "z":
            return Coord("z", 0)
        m = _COORD_RE.match(text)
        if m:
            index = int(m.group(2))
            if index < 1 or index > self.n:
                raise ExprIndexError(
                    f"coordinate {text!r} out of range for dimension n={self.n}", pos
                )
            return Coord(m.group(1), index)
        if text in ("q", "p"):
            raise ExprNameError(f"bare {text!r} needs an index (q1..q{self.n})", pos)
        if text in FUNCTIONS:
            raise ExprNameError(f"function name {text!r} used as a variable", pos)
        return Param(text)


def parse(source: str, n: int):
    """Parse a source string over n degrees of freedom into an AST."""
    return _Parser(source, n).parse()


def collect_params(e) -> set:
    """Names of all free parameters appearing in the AST."""
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, Neg):
        return collect_params(e.arg)
    if isinstance(e, Bin):
        return collect_params(e.lhs) | collect_params(e.rhs)
    if isinstance(e, Call):
        return collect_params(e.arg)
    return set()


def max_index(e) -> int:
    """Largest q/p index used (0 if none); handy for inferring a dimension."""
    if isinstance(e, Coord) and e.kind in ("q", "p"):
        return e.index
    if isinstance(e, Neg):
        return max_index(e.arg)
    if isinstance(e, Bin):
        return max(max_index(e.lhs), max_index(e.rhs))
    if isinstance(e, Call):
        return max_index(e.arg)
    return 0


def used_coord_kinds(e) -> set:
    """Which of {'t', 'q', 'p', 'z'} the AST reads."""
    if isinstance(e, Coord):
        return {e.kind}
    if isinstance(e, Neg):
        return used_coord_kinds(e.arg)
    if isinstance(e, Bin):
        return used_coord_kinds(e.lhs) | used_coord_kinds(e.rhs)
    if isinstance(e, Call):
        return used_coord_kinds(e.arg)
    return set()


# -- evaluation ------------------------------------------------------------------


def _literal_int_exponent(node):
    """Return the integer k when a ^-exponent is the literal k (possibly negated)."""
    if isinstance(node, Num) and float(node.value).is_integer():
        return int(node.value)
    if isinstance(node, Neg) and isinstance(node.arg, Num) and float(node.arg.value).is_integer():
        return -int(node.arg.value)
    return None


def _eval(node, t, q, p, z, params):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Coord):
        if node.kind == "t":
            return t
        if node.kind == "z":
            return z
        if node.kind == "q":
            return q[node.index - 1]
        return p[node.index - 1]
    if isinstance(node, Param):
        try:
            return params[node.name]
        except KeyError:
            raise UnboundParameterError(f"parameter {node.name!r} is not bound") from None
    if isinstance(node, Neg):
        return -_eval(node.arg, t, q, p, z, params)
    if isinstance(node, Bin):
        a = _eval(node.lhs, t, q, p, z, params)
        if node.op == "^":
            k = _literal_int_exponent(node.rhs)
            try:
                if k is not None:
                    return ipow(a, k)
                b = _eval(node.rhs, t, q, p, z, params)
                return dpow(a, b)
            except (ValueError, ZeroDivisionError, OverflowError) as err:
                raise EvalDomainError(str(err), node) from None
        b = _eval(node.rhs, t, q, p, z, params)
        try:
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a / b
        except (ZeroDivisionError, OverflowError) as err:
            raise EvalDomainError(str(err), node) from None
    if isinstance(node, Call):
        a = _eval(node.arg, t, q, p, z, params)
        try:
            return FUNCTIONS[node.fn](a)
        except (ValueError, ZeroDivisionError, OverflowError) as err:
            raise EvalDomainError(str(err), node) from None
    raise TypeError(f"not an expression node: {node!r}")


def eval_value(e, x: PhasePoint, params=None) -> float:
    """Plain (derivative-free) evaluation at a phase point."""
    return _eval(e, x.t, x.q, x.p, x.z, params or {})


def eval_with_grad(e, x: PhasePoint, params=None):
    """Evaluate and differentiate in one dual-number pass.

    Returns ``(value, gradient)`` where the gradient is a Covector over
    (t, q, p, z).  The value is bit-identical to :func:`eval_value`.
    """
    T, Q, P, Z = dual_phase(x.t, x.q, x.p, x.z)
    r = _eval(e, T, Q, P, Z, params or {})
    if isinstance(r, Dual):
        return r.v, Covector.from_partials(r.e, x.n)
    return float(r), Covector.zero(x.n)


def make_phase_callable(e, params=None):
    """Close the AST over fixed parameters as a function of (t, q, p, z).

    The result accepts floats or duals in any slot.
    """
    bound = dict(params or {})
    return lambda t, q, p, z: _eval(e, t, q, p, z, bound)


# -- unparsing -------------------------------------------------------------------

_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


def _unparse(node):
    """Return (text, precedence)."""
    if isinstance(node, Num):
        v = node.value
        text = repr(int(v)) if float(v).is_integer() and abs(v) < 1e16 else repr(v)
        return text, _ATOM
    if isinstance(node, Coord):
        if node.kind in ("t", "z"):
            return node.kind, _ATOM
        return f"{node.kind}{node.index}", _ATOM
    if isinstance(node, Param):
        return node.name, _ATOM
    if isinstance(node, Call):
        inner, _ = _unparse(node.arg)
        return f"{node.fn}({inner})", _ATOM
    if isinstance(node, Neg):
        inner, prec = _unparse(node.arg)
        if prec < _NEG:
            inner = f"({inner})"
        return f"-{inner}", _NEG
    if isinstance(node, Bin):
        lt, lp = _unparse(node.lhs)
        rt, rp = _unparse(node.rhs)
        if node.op in "+-":
            if lp < _ADD:
                lt = f"({lt})"
            # + and - are left-associative: parenthesize a same-level right child
            if rp <= _ADD:
                rt = f"({rt})"
            return f"{lt} {node.op} {rt}", _ADD
        if node.op in "*/":
            if lp < _MUL:
                lt = f"({lt})"
            if rp <= _MUL:
                rt = f"({rt})"
            return f"{lt}{node.op}{rt}", _MUL
        # ^ is right-associative and its left side must be a base
        if lp <= _POW:
            lt = f"({lt})"
        if rp <= _MUL:
            rt = f"({rt})"
        return f"{lt}^{rt}", _POW
    raise TypeError(f"not an expression node: {node!r}")


def unparse(e) -> str:
    """Render an AST back to source that reparses to the identical tree."""
    return _unparse(e)[0]
