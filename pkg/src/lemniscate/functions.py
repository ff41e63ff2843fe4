"""Expression parsing and the analytic-function model.

Functions of one complex variable are given as text in a small grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' unary)?
    unary  := '-'? atom
    atom   := number | 'z' | 'i' | 'pi' | ident '(' expr ')' | '(' expr ')'
    ident  := 'exp' | 'log' | 'sin' | 'cos' | 'sqrt'

Exponents of '^' are restricted to (possibly negated) number literals or
'pi'. Parsed functions carry a list of declared singularities. Poles of
rational subexpressions and branch points of log/sqrt arguments with
polynomial arguments are detected automatically; anything else is the
caller's responsibility to declare.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import DomainError, ExpressionSyntaxError
from .jets import Jet, WindowError

__all__ = [
    "AnalyticFunction",
    "Singularity",
    "parse_function",
    "parse_expression",
    "to_text",
    "evaluate",
    "jet_eval",
]


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str  # exp log sin cos sqrt
    arg: "Node"


Node = Union[Num, Pi, ImagUnit, Var, Neg, BinOp, Call]

_FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


# --------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[a-zA-Z]+)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ExpressionSyntaxError(f"expected {op!r}", pos)
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {text!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                node = BinOp(text, node, rhs)
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                rhs = self.factor()
                node = BinOp(text, node, rhs)
            else:
                return node

    def factor(self) -> Node:
        node = self.unary()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            _, _, pos = self.peek()
            exponent = self.unary()
            if not _is_real_const(exponent):
                raise ExpressionSyntaxError(
                    "exponent must be an integer or real constant", pos
                )
            node = BinOp("^", node, exponent)
        return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.atom())
        return self.atom()

    def atom(self) -> Node:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "z":
                return Var()
            if text == "i":
                return ImagUnit()
            if text == "pi":
                return Pi()
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise ExpressionSyntaxError(f"unknown name {text!r}", pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {text!r}" if text else "unexpected end of input", pos)


def _is_real_const(node: Node) -> bool:
    if isinstance(node, (Num, Pi)):
        return True
    return isinstance(node, Neg) and isinstance(node.arg, (Num, Pi))


def _exponent_value(node: Node) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Pi):
        return math.pi
    if isinstance(node, Neg):
        return -_exponent_value(node.arg)
    raise TypeError("not a constant exponent")


def parse_expression(text: str) -> Node:
    """Parse text into an expression tree (no singularity analysis)."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Canonical printer

# precedence levels: 0 expr, 1 term, 2 factor, 3 unary, 4 atom


def _level(node: Node) -> int:
    if isinstance(node, (Num, Pi, ImagUnit, Var, Call)):
        return 4
    if isinstance(node, Neg):
        return 3
    if node.op == "^":
        return 2
    if node.op in "*/":
        return 1
    return 0


def _print(node: Node, need: int) -> str:
    if isinstance(node, Num):
        v = node.value
        text = str(int(v)) if v.is_integer() and abs(v) < 1e16 else repr(v)
    elif isinstance(node, Pi):
        text = "pi"
    elif isinstance(node, ImagUnit):
        text = "i"
    elif isinstance(node, Var):
        text = "z"
    elif isinstance(node, Call):
        text = f"{node.name}({_print(node.arg, 0)})"
    elif isinstance(node, Neg):
        text = "-" + _print(node.arg, 4)
    elif node.op == "^":
        text = f"{_print(node.left, 3)}^{_print(node.right, 3)}"
    elif node.op in "*/":
        text = f"{_print(node.left, 1)} {node.op} {_print(node.right, 2)}"
    else:
        text = f"{_print(node.left, 0)} {node.op} {_print(node.right, 1)}"
    if _level(node) < need:
        return f"({text})"
    return text


def to_text(node: Node) -> str:
    """Canonical text form; parse(to_text(ast)) is structurally equal to ast."""
    return _print(node, 0)


# --------------------------------------------------------------------------
# Evaluation (complex scalars, numpy arrays, jets)

_NUMPY_FUNCS = {"exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos, "sqrt": np.sqrt}


def _eval_node(node: Node, z):
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Pi):
        return complex(math.pi)
    if isinstance(node, ImagUnit):
        return 1j
    if isinstance(node, Var):
        return z
    if isinstance(node, Neg):
        return -_eval_node(node.arg, z)
    if isinstance(node, Call):
        v = _eval_node(node.arg, z)
        if isinstance(v, Jet):
            return getattr(v, node.name)()
        return _NUMPY_FUNCS[node.name](v)
    l = _eval_node(node.left, z)
    if node.op == "^":
        return l ** _exponent_value(node.right)
    r = _eval_node(node.right, z)
    if node.op == "+":
        return l + r
    if node.op == "-":
        return l - r
    if node.op == "*":
        return l * r
    return l / r


# --------------------------------------------------------------------------
# Polynomial extraction and singularity detection


def _poly(node: Node) -> Optional[np.ndarray]:
    """Coefficients (low to high) if node is a polynomial in z, else None."""
    if isinstance(node, Num):
        return np.array([node.value], dtype=complex)
    if isinstance(node, Pi):
        return np.array([math.pi], dtype=complex)
    if isinstance(node, ImagUnit):
        return np.array([1j])
    if isinstance(node, Var):
        return np.array([0.0, 1.0], dtype=complex)
    if isinstance(node, Neg):
        p = _poly(node.arg)
        return None if p is None else -p
    if isinstance(node, Call):
        return None
    if node.op in "+-":
        a, b = _poly(node.left), _poly(node.right)
        if a is None or b is None:
            return None
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=complex)
        out[: len(a)] += a
        out[: len(b)] += b if node.op == "+" else -b
        return out
    if node.op == "*":
        a, b = _poly(node.left), _poly(node.right)
        if a is None or b is None:
            return None
        return np.convolve(a, b)
    if node.op == "^":
        e = _exponent_value(node.right)
        if not float(e).is_integer() or e < 0:
            return None
        a = _poly(node.left)
        if a is None:
            return None
        out = np.array([1.0 + 0j])
        for _ in range(int(e)):
            out = np.convolve(out, a)
        return out
    # division stays polynomial only for a constant nonzero divisor
    a, b = _poly(node.left), _poly(node.right)
    if a is None or b is None:
        return None
    b = _trim_poly(b)
    if len(b) == 1 and b[0] != 0:
        return a / b[0]
    return None


def _rational(node: Node):
    """(num, den) coefficient arrays if node is rational in z, else None."""
    if isinstance(node, Neg):
        r = _rational(node.arg)
        return None if r is None else (-r[0], r[1])
    if isinstance(node, BinOp):
        if node.op == "^":
            e = _exponent_value(node.right)
            if not float(e).is_integer():
                return None
            r = _rational(node.left)
            if r is None:
                return None
            num, den = (r[0], r[1]) if e >= 0 else (r[1], r[0])
            on, od = np.array([1.0 + 0j]), np.array([1.0 + 0j])
            for _ in range(abs(int(e))):
                on, od = np.convolve(on, num), np.convolve(od, den)
            return on, od
        a, b = _rational(node.left), _rational(node.right)
        if a is None or b is None:
            return None
        if node.op == "+":
            return np.polyadd(np.convolve(a[0], b[1])[::-1], np.convolve(b[0], a[1])[::-1])[::-1], np.convolve(a[1], b[1])
        if node.op == "-":
            return np.polysub(np.convolve(a[0], b[1])[::-1], np.convolve(b[0], a[1])[::-1])[::-1], np.convolve(a[1], b[1])
        if node.op == "*":
            return np.convolve(a[0], b[0]), np.convolve(a[1], b[1])
        return np.convolve(a[0], b[1]), np.convolve(a[1], b[0])
    p = _poly(node)
    if p is None:
        return None
    return p, np.array([1.0 + 0j])


def _trim_poly(p: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(p))) if len(p) else 0.0
    if scale == 0.0:
        return p[:1] * 0.0 if len(p) else np.zeros(1, dtype=complex)
    n = len(p)
    while n > 1 and abs(p[n - 1]) <= 1e-14 * scale:
        n -= 1
    return p[:n]


def _poly_roots_with_mult(p: np.ndarray):
    """Roots with multiplicities; clustered means of numpy roots."""
    p = _trim_poly(np.asarray(p, dtype=complex))
    if len(p) <= 1:
        return []
    if len(p) == 2:
        return [(complex(-p[0] / p[1]), 1)]
    roots = np.roots(p[::-1])
    scale = 1.0 + float(np.max(np.abs(roots)))
    tol = 1e-5 * scale
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda w: (w.real, w.imag)):
        for cl in clusters:
            if abs(r - np.mean(cl)) < tol:
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(cl)), len(cl)) for cl in clusters]


def _root_order_at(p: np.ndarray, w0: complex) -> int:
    """Multiplicity of w0 as a root of the polynomial p (0 if not a root)."""
    p = _trim_poly(p)
    scale = float(np.max(np.abs(p))) or 1.0
    order = 0
    cur = p.copy()
    while len(cur) > 0:
        # synthetic division by (w - w0); remainder is cur evaluated at w0
        rem = 0j
        for k in range(len(cur) - 1, -1, -1):
            rem = rem * w0 + cur[k]
        if abs(rem) > 1e-8 * scale * max(1.0, abs(w0)) ** max(len(cur) - 1, 1):
            break
        q = np.zeros(len(cur) - 1, dtype=complex)
        acc = 0j
        for k in range(len(cur) - 1, 0, -1):
            acc = acc * w0 + cur[k]
            q[k - 1] = acc
        cur = q
        order += 1
        if len(cur) == 0:
            break
    return order


@dataclass(frozen=True)
class Singularity:
    location: complex
    kind: str  # 'pole' | 'essential' | 'branch-point'
    order: Optional[int] = None  # pole order, when kind == 'pole'

    def __post_init__(self):
        if self.kind == "pole" and (self.order is None or self.order < 1):
            raise ValueError("pole needs a positive integer order")


def _denominator_pole_sites(num: Optional[np.ndarray], den: Node):
    """Pole candidates (location, order) from one denominator subtree."""

    def factors(node: Node, power: int, out: list):
        if isinstance(node, BinOp) and node.op == "*":
            return factors(node.left, power, out) and factors(node.right, power, out)
        if isinstance(node, BinOp) and node.op == "^":
            e = _exponent_value(node.right)
            if float(e).is_integer() and e > 0:
                return factors(node.left, power * int(e), out)
            return False
        p = _poly(node)
        if p is None:
            return False
        out.append((p, power))
        return True

    sites: list[tuple[complex, int]] = []
    collected: list = []
    if factors(den, 1, collected):
        for p, power in collected:
            p = _trim_poly(p)
            if len(p) == 1 and p[0] == 0:
                raise DomainError("denominator is identically zero")
            for loc, mult in _poly_roots_with_mult(p):
                sites.append((loc, mult * power))
    else:
        r = _rational(den)
        if r is None:
            return []  # not analyzable; user must declare
        dnum = _trim_poly(r[0])
        if len(dnum) == 1 and dnum[0] == 0:
            raise DomainError("denominator is identically zero")
        sites = [(loc, mult) for loc, mult in _poly_roots_with_mult(dnum)]
    # aggregate repeated locations within this denominator
    agg: list[tuple[complex, int]] = []
    for loc, order in sites:
        for i, (l0, o0) in enumerate(agg):
            if abs(loc - l0) < 1e-9 * (1.0 + abs(l0)):
                agg[i] = (l0, o0 + order)
                break
        else:
            agg.append((loc, order))
    # cancel against a polynomial numerator where possible
    out = []
    for loc, order in agg:
        if num is not None:
            order -= _root_order_at(num, loc)
        if order > 0:
            out.append((loc, order))
    return out


def _detect_singularities(node: Node) -> list[Singularity]:
    found: list[Singularity] = []

    def visit(n: Node):
        if isinstance(n, Neg):
            visit(n.arg)
        elif isinstance(n, Call):
            visit(n.arg)
            if n.name in ("log", "sqrt"):
                arg_poly = _poly(n.arg)
                if arg_poly is not None:
                    for loc, _mult in _poly_roots_with_mult(arg_poly):
                        found.append(Singularity(loc, "branch-point"))
        elif isinstance(n, BinOp):
            visit(n.left)
            if n.op == "^":
                e = _exponent_value(n.right)
                if float(e).is_integer() and e < 0:
                    base_poly = _poly(n.left)
                    if base_poly is not None:
                        for loc, mult in _poly_roots_with_mult(base_poly):
                            found.append(Singularity(loc, "pole", mult * abs(int(e))))
                elif not float(e).is_integer():
                    base_poly = _poly(n.left)
                    if base_poly is not None:
                        for loc, _mult in _poly_roots_with_mult(base_poly):
                            found.append(Singularity(loc, "branch-point"))
            else:
                visit(n.right)
                if n.op == "/":
                    for loc, order in _denominator_pole_sites(_poly(n.left), n.right):
                        found.append(Singularity(loc, "pole", order))

    visit(node)
    # merge by location: branch points dominate, pole orders take the maximum
    merged: list[Singularity] = []
    for s in found:
        for i, t in enumerate(merged):
            if abs(s.location - t.location) < 1e-9 * (1.0 + abs(t.location)):
                if t.kind == "branch-point" or s.kind == "branch-point":
                    merged[i] = Singularity(t.location, "branch-point")
                elif t.kind == "essential" or s.kind == "essential":
                    merged[i] = Singularity(t.location, "essential")
                else:
                    merged[i] = Singularity(t.location, "pole", max(t.order, s.order))
                break
        else:
            merged.append(s)
    merged.sort(key=lambda s: (s.location.real, s.location.imag))
    return merged


# --------------------------------------------------------------------------
# Analytic function model


@dataclass(frozen=True)
class AnalyticFunction:
    """A parsed expression together with its declared singularities."""

    expr: Node
    singularities: tuple[Singularity, ...] = ()

    @property
    def entire(self) -> bool:
        return len(self.singularities) == 0

    def to_text(self) -> str:
        return to_text(self.expr)

    def with_singularities(self, singularities) -> "AnalyticFunction":
        return replace(self, singularities=tuple(singularities))

    def pole_order_at(self, z: complex) -> int:
        for s in self.singularities:
            if s.kind == "pole" and abs(s.location - z) < 1e-9 * (1.0 + abs(z)):
                return s.order
        return 0

    def eval(self, z):
        """Evaluate at a complex number or elementwise on a numpy array."""
        if np.isscalar(z) or isinstance(z, complex):
            z = complex(z)
            for s in self.singularities:
                if abs(z - s.location) < 1e-14 * (1.0 + abs(s.location)):
                    raise DomainError(f"evaluation at declared singularity {s.location}")
            return complex(_eval_node(self.expr, z))
        with np.errstate(all="ignore"):
            return _eval_node(self.expr, np.asarray(z, dtype=complex))

    __call__ = eval

    def laurent_jet(self, center: complex, upto: int) -> Jet:
        """Series coefficients at the center for all exponents up to ``upto``.

        The result may carry a finite principal part when the center is a
        pole. Raises DomainError at branch points and essential
        singularities.
        """
        center = complex(center)
        rho = self.pole_order_at(center)
        pad = 8
        last = None
        for _ in range(4):
            order = max(upto + rho + pad, 1)
            try:
                jet = _eval_node(self.expr, Jet.variable(center, order))
            except WindowError as exc:
                last = exc
                pad *= 4
                continue
            if not isinstance(jet, Jet):  # constant expression
                jet = Jet(center, np.full(upto + pad + 1, 0j)) + complex(jet)
            if jet.high > upto:
                return jet
            last = WindowError("window fell short")
            pad *= 4
        raise DomainError(f"cannot expand to order {upto} at {center}: {last}")

    def jet(self, center: complex, order: int) -> Jet:
        """Scaled Taylor coefficients D^0..D^order at an analytic center."""
        center = complex(center)
        for s in self.singularities:
            if abs(center - s.location) < 1e-13 * (1.0 + abs(s.location)):
                raise DomainError(f"jet requested at declared singularity {s.location}")
        jet = self.laurent_jet(center, order)
        return Jet(center, jet.taylor_coeffs(order))


def parse_function(text: str, extra_singularities=()) -> AnalyticFunction:
    """Parse text and auto-detect singularities of its rational parts.

    ``extra_singularities`` are merged in on top of the detected ones, for
    functions whose non-rational singularities the grammar cannot see.
    """
    expr = parse_expression(text)
    sings = _detect_singularities(expr)
    for s in extra_singularities:
        sings = [t for t in sings if abs(t.location - s.location) >= 1e-9 * (1.0 + abs(s.location))]
        sings.append(s)
    sings.sort(key=lambda s: (s.location.real, s.location.imag))
    return AnalyticFunction(expr=expr, singularities=tuple(sings))


def evaluate(f: AnalyticFunction, z):
    return f.eval(z)


def jet_eval(f: AnalyticFunction, center: complex, order: int) -> Jet:
    return f.jet(center, order)
