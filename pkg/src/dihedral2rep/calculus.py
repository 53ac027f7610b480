"""Two-color Soergel diagrams: syntax, evaluation as bimodule maps, weightings and relation checks.

Diagrams are read bottom to top. ``a . b`` stacks a on top of b (b happens
first), ``a * b`` places a to the left of b. Words are tuples of colors,
leftmost strand first.
"""

from __future__ import annotations

import cmath
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .bigraph import BipartiteGraph, ade_layout
from .bimod import (BimoduleMorphism, BoundaryError, compose, identity, tensor_h, word_bimodule,
                    zero_map)
from .hecke import INFINITY, Check, Report, alternating, other
from .scalars import (CyclotomicField, FloatRing, LaurentPoly, poly_gcd,
                      quantum_integer_v)
from .zigzag import ZigzagAlgebra, build

Word = tuple[str, ...]


class DiagramSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UndefinedJWError(ValueError):
    """Raised when the Jones-Wenzl recursion would divide by [k-1]_q = 0."""


class WeightingError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# scalar expressions in q
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    """Small expression tree over q: numbers, q^k, [k]_q, +, *, /, negation."""

    op: str
    args: tuple = ()

    @staticmethod
    def number(x) -> "Scalar":
        return Scalar("num", (Fraction(x),))

    @staticmethod
    def qpow(k: int) -> "Scalar":
        return Scalar("q", (k,))

    @staticmethod
    def qint(k: int) -> "Scalar":
        return Scalar("qint", (k,))

    def __add__(self, o):
        return Scalar("add", (self, _as_scalar(o)))

    def __sub__(self, o):
        return Scalar("add", (self, Scalar("neg", (_as_scalar(o),))))

    def __mul__(self, o):
        return Scalar("mul", (self, _as_scalar(o)))

    def __truediv__(self, o):
        return Scalar("div", (self, _as_scalar(o)))

    def __neg__(self):
        return Scalar("neg", (self,))

    def value(self, ring):
        op, a = self.op, self.args
        if op == "num":
            return ring.coerce(a[0])
        if op == "q":
            return ring.q_power(a[0])
        if op == "qint":
            return ring.quantum_integer(a[0])
        if op == "neg":
            return -a[0].value(ring)
        if op == "add":
            return a[0].value(ring) + a[1].value(ring)
        if op == "mul":
            return a[0].value(ring) * a[1].value(ring)
        if op == "div":
            den = a[1].value(ring)
            if ring.is_zero(den):
                raise ZeroDivisionError(f"division by {a[1]} which vanishes")
            return a[0].value(ring) / den
        raise ValueError(op)

    def is_one(self) -> bool:
        return self.op == "num" and self.args[0] == 1

    def __str__(self):
        op, a = self.op, self.args
        if op == "num":
            x = a[0]
            return str(x) if x.denominator == 1 else f"({x})"
        if op == "q":
            return "q" if a[0] == 1 else f"q^{a[0]}"
        if op == "qint":
            return f"[{a[0]}]"
        if op == "neg":
            return f"-({a[0]})"
        if op == "add":
            return f"({a[0]} + {a[1]})"
        if op == "mul":
            return f"{a[0]} {a[1]}"
        if op == "div":
            return f"({a[0]})/({a[1]})"
        raise ValueError(op)


def _as_scalar(x) -> Scalar:
    return x if isinstance(x, Scalar) else Scalar.number(x)


ONE = Scalar.number(1)


# ---------------------------------------------------------------------------
# diagrams
# ---------------------------------------------------------------------------

GENERATORS = ("id", "enddot", "startdot", "split", "merge", "cup", "cap", "vertex2n", "jw")
_DEGREES = {"id": 0, "enddot": 1, "startdot": 1, "split": -1, "merge": -1, "cup": 0, "cap": 0,
            "vertex2n": 0, "jw": 0}


@dataclass(frozen=True)
class Diagram:
    source: Word
    target: Word
    degree: int


@dataclass(frozen=True)
class Gen(Diagram):
    kind: str = "id"
    color: str = "s"
    k: Optional[int] = None

    def __str__(self):
        if self.kind == "jw":
            return f"jw({self.k},{self.color})"
        return f"{self.kind}({self.color})"


@dataclass(frozen=True)
class HComp(Diagram):
    left: Diagram = None
    right: Diagram = None

    def __str__(self):
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class VComp(Diagram):
    top: Diagram = None
    bottom: Diagram = None

    def __str__(self):
        return f"({self.top} . {self.bottom})"


@dataclass(frozen=True)
class LinComb(Diagram):
    terms: tuple = ()  # (Scalar, Diagram) pairs

    def __str__(self):
        parts = []
        for k, (c, d) in enumerate(self.terms):
            body = str(d) if c.is_one() else f"{_scalar_text(c)} * {d}"
            parts.append(body if k == 0 else "+ " + body)
        return " ".join(parts) if len(parts) == 1 else "(" + " ".join(parts) + ")"


DiagramExpr = LinComb


def _scalar_text(c: Scalar) -> str:
    s = str(c)
    return s if s.startswith("(") or " " not in s else f"({s})"


def _word_text(w: Word) -> str:
    return "".join(w) or "∅"


def gen(kind: str, color: str, n: Optional[int] = None, k: Optional[int] = None) -> Gen:
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}")
    if color not in ("s", "t"):
        raise ValueError(f"unknown color {color!r}")
    c = color
    if kind == "id":
        src, tgt = (c,), (c,)
    elif kind == "enddot":
        src, tgt = (c,), ()
    elif kind == "startdot":
        src, tgt = (), (c,)
    elif kind == "split":
        src, tgt = (c,), (c, c)
    elif kind == "merge":
        src, tgt = (c, c), (c,)
    elif kind == "cup":
        src, tgt = (), (c, c)
    elif kind == "cap":
        src, tgt = (c, c), ()
    elif kind == "vertex2n":
        if n is None:
            raise ValueError("vertex2n needs a finite n")
        src = alternating(n, c if n % 2 else other(c))
        tgt = tuple(other(x) for x in src)
    else:
        if k is None or k < 0:
            raise ValueError("jw needs a non-negative strand count")
        src = tgt = alternating(k, c)
    return Gen(src, tgt, _DEGREES[kind], kind, c, k)


def hcomp(left: Diagram, right: Diagram) -> HComp:
    return HComp(left.source + right.source, left.target + right.target,
                 left.degree + right.degree, left, right)


def vcomp(top: Diagram, bottom: Diagram) -> VComp:
    if top.source != bottom.target:
        raise BoundaryError(f"boundary mismatch: bottom ends in {_word_text(bottom.target)}, "
                            f"top starts at {_word_text(top.source)}")
    return VComp(bottom.source, top.target, top.degree + bottom.degree, top, bottom)


def lincomb(terms: Iterable[tuple[Scalar, Diagram]]) -> LinComb:
    terms = tuple(terms)
    if not terms:
        raise ValueError("empty linear combination")
    d0 = terms[0][1]
    for _, d in terms[1:]:
        if (d.source, d.target) != (d0.source, d0.target):
            raise BoundaryError(f"boundary mismatch in sum: {_word_text(d0.source)}->"
                                f"{_word_text(d0.target)} vs {_word_text(d.source)}->{_word_text(d.target)}")
        if d.degree != d0.degree:
            raise BoundaryError(f"degree mismatch in sum: {d0.degree} vs {d.degree}")
    return LinComb(d0.source, d0.target, d0.degree, terms)


def cup(color: str) -> Diagram:
    """Split with a start dot below: ∅ -> cc, degree 0."""
    return vcomp(gen("split", color), gen("startdot", color))


def cap(color: str) -> Diagram:
    """Merge with an end dot above: cc -> ∅, degree 0."""
    return vcomp(gen("enddot", color), gen("merge", color))


def identity_diagram(word: Word) -> Optional[Diagram]:
    d = None
    for c in word:
        g = gen("id", c)
        d = g if d is None else hcomp(d, g)
    return d


def hcomp_all(*ds: Optional[Diagram]) -> Diagram:
    out = None
    for d in ds:
        if d is None:
            continue
        out = d if out is None else hcomp(out, d)
    return out


def jw_gadget_diagram(outer: str) -> Diagram:
    """Degree-zero gadget on three strands (outer, inner, outer): dot the middle, merge, split, re-dot."""
    inner = other(outer)
    o = gen("id", outer)
    bottom = hcomp_all(o, gen("enddot", inner), o)
    top = hcomp_all(o, gen("startdot", inner), o)
    return vcomp(top, vcomp(gen("split", outer), vcomp(gen("merge", outer), bottom)))


def jw_expr(k: int, color: str) -> Diagram:
    """Explicit recursive expression of JW_k whose rightmost strand has the given color."""
    if k < 1:
        raise ValueError("explicit JW expressions need k >= 1")
    if k == 1:
        return gen("id", color)
    prev = jw_expr(k - 1, color)
    word = alternating(k, color)
    ext = hcomp(gen("id", word[0]), prev)
    if k == 2:
        return lincomb([(ONE, ext)])
    coef = Scalar.qint(k - 2) / Scalar.qint(k - 1)
    middle = hcomp_all(jw_gadget_diagram(word[0]), identity_diagram(word[3:]))
    return lincomb([(ONE, ext), (coef, vcomp(ext, vcomp(middle, ext)))])


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos or m.lastindex is None:
            break
        if m.group(1):
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            out.append(("sym", m.group(3), m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, n: Optional[int]):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self, value: Optional[str] = None) -> bool:
        kind, v, _ = self.toks[self.i]
        return kind != "end" and (value is None or v == value)

    @property
    def pos(self) -> int:
        return self.toks[self.i][2]

    def take(self, value: Optional[str] = None) -> str:
        kind, v, pos = self.toks[self.i]
        if kind == "end" or (value is not None and v != value):
            want = repr(value) if value else "a token"
            raise DiagramSyntaxError(f"expected {want}, found {v!r}" if kind != "end"
                                     else f"expected {want}, found end of input", pos)
        self.i += 1
        return v

    # diagrams
    def expr(self) -> Diagram:
        terms = []
        sign = 1
        if self.peek("+") or self.peek("-"):
            sign = -1 if self.take() == "-" else 1
        while True:
            c, d = self.term()
            terms.append((c if sign == 1 else -c if not c.is_one() else Scalar.number(-1), d))
            if self.peek("+") or self.peek("-"):
                sign = -1 if self.take() == "-" else 1
            else:
                break
        try:
            return lincomb(terms) if len(terms) > 1 or not terms[0][0].is_one() else terms[0][1]
        except BoundaryError as e:
            raise BoundaryError(f"{e} (near position {self.pos})") from None

    def term(self) -> tuple[Scalar, Diagram]:
        save = self.i
        try:
            c = self.scalar()
            if self.peek("*"):
                self.take("*")
                return c, self.factor()
        except DiagramSyntaxError:
            pass
        self.i = save
        return ONE, self.factor()

    def factor(self) -> Diagram:
        d = self.atom()
        while self.peek("."):
            pos = self.pos
            self.take(".")
            below = self.atom()
            try:
                d = vcomp(d, below)
            except BoundaryError as e:
                raise BoundaryError(f"{e} (at position {pos})") from None
        return d

    def atom(self) -> Diagram:
        d = self.primary()
        while self.peek("*"):
            self.take("*")
            d = hcomp(d, self.primary())
        return d

    def primary(self) -> Diagram:
        if self.peek("("):
            self.take("(")
            d = self.expr()
            self.take(")")
            return d
        pos = self.pos
        kind, name, _ = self.toks[self.i]
        if kind != "name" or name not in GENERATORS:
            raise DiagramSyntaxError(f"expected a generator, found {name!r}", pos)
        self.take()
        self.take("(")
        k = None
        if name == "jw":
            k = int(self._number())
            self.take(",")
        c = self.take()
        if c not in ("s", "t"):
            raise DiagramSyntaxError(f"expected color s or t, found {c!r}", pos)
        self.take(")")
        if name == "cup":
            return cup(c)
        if name == "cap":
            return cap(c)
        if name == "vertex2n" and self.n is None:
            raise DiagramSyntaxError("vertex2n requires a finite n", pos)
        return gen(name, c, self.n, k)

    def _number(self) -> str:
        kind, v, pos = self.toks[self.i]
        if kind != "num":
            raise DiagramSyntaxError(f"expected a number, found {v!r}", pos)
        self.i += 1
        return v

    # scalars
    def scalar(self) -> Scalar:
        neg = False
        if self.peek("-") or self.peek("+"):
            neg = self.take() == "-"
        s = self.sterm()
        if neg:
            s = -s
        while self.peek("+") or self.peek("-"):
            save = self.i
            op = self.take()
            try:
                rhs = self.sterm()
            except DiagramSyntaxError:
                self.i = save
                break
            s = s + rhs if op == "+" else s - rhs
        return s

    def sterm(self) -> Scalar:
        s = self.sfactor()
        while True:
            if self.peek("/"):
                self.take("/")
                s = s / self.sfactor()
                continue
            save = self.i
            try:
                s = s * self.sfactor()
            except DiagramSyntaxError:
                self.i = save
                return s

    def sfactor(self) -> Scalar:
        kind, v, pos = self.toks[self.i]
        if kind == "num":
            self.i += 1
            base = Scalar.number(int(v))
        elif kind == "name" and v == "q":
            self.i += 1
            base = Scalar.qpow(1)
            if self.peek("^"):
                self.take("^")
                sign = -1 if self.peek("-") and self.take() == "-" else 1
                base = Scalar.qpow(sign * int(self._number()))
            return base
        elif v == "[":
            self.i += 1
            k = int(self._number())
            self.take("]")
            base = Scalar.qint(k)
        elif v == "(":
            self.i += 1
            base = self.scalar()
            self.take(")")
        else:
            raise DiagramSyntaxError(f"expected a scalar, found {v!r}", pos)
        if self.peek("^"):
            self.take("^")
            e = int(self._number())
            out = ONE
            for _ in range(e):
                out = out * base
            base = out
        return base


def parse(text: str, n: Optional[int] = None) -> Diagram:
    """Parse a diagram expression; n fixes the boundary of vertex2n."""
    p = _Parser(text, n)
    if not p.peek():
        raise DiagramSyntaxError("empty expression", 0)
    d = p.expr()
    if p.peek():
        raise DiagramSyntaxError(f"unexpected {p.toks[p.i][1]!r}", p.pos)
    return d


def to_text(d: Diagram) -> str:
    s = str(d)
    if isinstance(d, LinComb) and s.startswith("(") and s.endswith(")") and len(d.terms) > 1:
        return s[1:-1]
    return s


# ---------------------------------------------------------------------------
# weightings
# ---------------------------------------------------------------------------

@dataclass
class Weighting:
    ring: object  # CyclotomicField or FloatRing
    weights: dict[int, object]

    def __post_init__(self):
        self.weights = {v: self.ring.coerce(x) for v, x in self.weights.items()}
        for v, x in self.weights.items():
            if self.ring.is_zero(x):
                raise WeightingError(f"weight of vertex {v} is zero")

    @property
    def q(self):
        return self.ring.gen()

    @property
    def exact(self) -> bool:
        return isinstance(self.ring, CyclotomicField)

    def __getitem__(self, v: int):
        try:
            return self.weights[v]
        except KeyError:
            raise WeightingError(f"missing weight for vertex {v}") from None

    def flipped(self, v: int) -> "Weighting":
        w = dict(self.weights)
        w[v] = -w[v]
        return Weighting(self.ring, w)

    def to_strings(self) -> dict[int, str]:
        return {v: str(x) for v, x in self.weights.items()}


def _ade_values(family: str, rank: int, ring) -> tuple[list, list]:
    qi = ring.quantum_integer

    def alt(k):  # (-1)^(k-1) [k]
        return qi(k) if k % 2 else -qi(k)

    if family == "A":
        return [alt(k) for k in range(1, rank + 1)], []
    if family == "D":
        m = rank
        fork = qi(m - 1) * ring.coerce(Fraction(1, 2))
        if m % 2:
            fork = -fork
        return [alt(k) for k in range(1, m - 1)], [fork, fork]
    if family == "E":
        if rank == 6:
            path = [qi(1), -qi(2), qi(3), -qi(2), qi(1)]
            extra = [-qi(3) / qi(2)]
        elif rank == 7:
            path = [qi(1), -qi(2), qi(3), -qi(4), qi(6) / qi(2), -qi(4) / qi(3)]
            extra = [qi(4) / qi(2)]
        elif rank == 8:
            path = [qi(1), -qi(2), qi(3), -qi(4), qi(5), -qi(7) / qi(2), qi(5) / qi(3)]
            extra = [-qi(5) / qi(2)]
        else:
            raise ValueError(f"no E{rank}")
        return path, extra
    raise ValueError(f"unknown family {family!r}")


def weighting_table_ade(g: BipartiteGraph, ring=None) -> Weighting:
    """Table weighting of an ADE graph, placed along its canonical vertex enumeration.

    Defaults to the cyclotomic field of the graph's Coxeter number.
    """
    layout = ade_layout(g)
    if layout is None:
        raise WeightingError("graph is not of ADE type")
    h = layout.ade.coxeter
    if ring is None:
        ring = CyclotomicField(h)
    if isinstance(ring, CyclotomicField) and ring.n != h:
        raise WeightingError(f"Coxeter number of {layout.ade} is {h}, field has n = {ring.n}")
    path, extra = _ade_values(layout.ade.family, layout.ade.rank, ring)
    weights = dict(zip(layout.path, path))
    weights.update(zip(layout.extra, extra))
    return Weighting(ring, weights)


def bf2_residuals(g: BipartiteGraph, w: Weighting) -> dict[int, object]:
    """-[2]_q lambda_i - sum over neighbours of lambda_j, per vertex."""
    two = w.ring.quantum_integer(2)
    out = {}
    for v in g.order:
        acc = -two * w[v]
        for u in g.neighbors[v]:
            acc = acc - w[u]
        out[v] = acc
    return out


def check_bf2(g: BipartiteGraph, w: Weighting) -> bool:
    if any(v not in w.weights for v in g.order):
        return False
    if any(w.ring.is_zero(x) for x in w.weights.values()):
        return False
    return all(w.ring.is_zero(r) for r in bf2_residuals(g, w).values())


def bf2_condition(g: BipartiteGraph, weights: dict[int, LaurentPoly]) -> list:
    """Monic gcd (lowest degree first) of the residual numerators for Laurent weights in q.

    Its roots are the values of q at which the weighting satisfies the
    barbell-forcing condition; an empty list means it holds identically.
    """
    two = quantum_integer_v(2)
    g_poly: list = []
    for v in g.order:
        r = -(two * weights[v])
        for u in g.neighbors[v]:
            r = r - weights[u]
        if r:
            num = [Fraction(x) for x in r.numerator()]
            while num and num[0] == 0:
                num.pop(0)
            g_poly = num if not g_poly else poly_gcd(g_poly, num)
    return g_poly


def admissible_q(g: BipartiteGraph, weights: dict[int, LaurentPoly], tol: float = 1e-9) -> list[complex]:
    """Distinct roots of bf2_condition at which no weight vanishes."""
    cond = bf2_condition(g, weights)
    if not cond:
        raise ValueError("condition holds for every q")
    if len(cond) == 1:
        return []
    roots = np.roots([float(c) for c in reversed(cond)])
    out: list[complex] = []
    for r in roots:
        r = complex(r)
        if abs(r) < tol or any(abs(z - r) < 1e-6 for z in out):
            continue
        if all(abs(x.evaluate(r)) > tol for x in weights.values()):
            out.append(r)
    return sorted(out, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def pf_eigenvector(g: BipartiteGraph, tol: float = 1e-12, max_iter: int = 100000) -> tuple[float, np.ndarray]:
    """Perron-Frobenius eigenvalue and positive unit eigenvector by power iteration on A + I."""
    a = g.adjacency().astype(float)
    size = len(g)
    if size == 1:
        return 0.0, np.ones(1)
    m = a + np.eye(size)
    x = np.ones(size) / math.sqrt(size)
    for _ in range(max_iter):
        y = m @ x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < tol:
            x = y
            break
        x = y
    else:
        raise ConvergenceError("power iteration did not converge")
    alpha = float(x @ a @ x)
    return alpha, x


def q_from_alpha(alpha: float) -> complex:
    """The root of q^2 + alpha q + 1 = 0 with the larger real part (nonnegative imaginary part if complex)."""
    disc = alpha * alpha - 4
    if abs(disc) < 1e-12:
        disc = 0.0
    return (-alpha + cmath.sqrt(disc)) / 2


def weighting_pf(g: BipartiteGraph, tol: float = 1e-9) -> tuple[float, complex, Weighting]:
    alpha, vec = pf_eigenvector(g)
    q = q_from_alpha(alpha)
    ring = FloatRing(q, tol)
    return alpha, q, Weighting(ring, {v: float(vec[g.index[v]]) for v in g.order})


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scaling:
    """Alternative assignment: start dot times tau, merge times tau^-1, end dot times upsilon, split times upsilon^-1."""

    tau: object = 1
    upsilon: object = 1


def scaled_assignment(tau, upsilon) -> Scaling:
    for x in (tau, upsilon):
        if x == 0 or (hasattr(x, "__bool__") and not x):
            raise ValueError("scaling factors must be invertible")
    return Scaling(tau, upsilon)


class Realization:
    """Evaluates diagrams as bimodule maps over the zigzag algebra of a weighted graph."""

    def __init__(self, graph: BipartiteGraph, weighting: Weighting, n=None,
                 scaling: Optional[Scaling] = None):
        self.graph = graph
        self.algebra: ZigzagAlgebra = build(graph)
        self.w = weighting
        self.ring = weighting.ring
        if n == INFINITY:
            n = None
        if n is None and isinstance(self.ring, CyclotomicField):
            n = self.ring.n
        self.n = n
        missing = [v for v in graph.order if v not in weighting.weights]
        if missing:
            raise WeightingError(f"missing weight for vertices {missing}")
        scaling = scaling or Scaling()
        self.tau = self.ring.coerce(scaling.tau)
        self.upsilon = self.ring.coerce(scaling.upsilon)
        self._gens: dict[tuple[str, str], BimoduleMorphism] = {}
        self._ids: dict[Word, BimoduleMorphism] = {}
        self._jw: dict[tuple[int, str], BimoduleMorphism] = {}

    def bimodule(self, word: Iterable[str]):
        return word_bimodule(self.algebra, word)

    def identity(self, word: Iterable[str]) -> BimoduleMorphism:
        word = tuple(word)
        m = self._ids.get(word)
        if m is None:
            m = identity(self.bimodule(word), self.ring)
            self._ids[word] = m
        return m

    # generators ---------------------------------------------------------------
    def generator(self, kind: str, color: str) -> BimoduleMorphism:
        key = (kind, color)
        m = self._gens.get(key)
        if m is None:
            m = self._build_generator(kind, color)
            self._gens[key] = m
        return m

    def _build_generator(self, kind: str, c: str) -> BimoduleMorphism:
        alg, g, ring = self.algebra, self.graph, self.ring
        own = g.color_class(c)
        e, loop, arrow = alg.idem, alg.loop, alg.arrow
        B = self.bimodule
        if kind == "id":
            return self.identity((c,))
        if kind == "enddot":
            images = {(e[i], e[i]): {(e[i],): self.upsilon} for i in own}
            return BimoduleMorphism(B((c,)), B(()), 1, images, ring)
        if kind == "startdot":
            images = {}
            for v in g.order:
                if v in own:
                    lam = self.tau * self.w[v]
                    images[(e[v],)] = {(e[v], loop[v]): lam, (loop[v], e[v]): lam}
                else:
                    images[(e[v],)] = {(arrow[(v, i)], arrow[(i, v)]): self.tau * self.w[i]
                                       for i in g.neighbors[v]}
            return BimoduleMorphism(B(()), B((c,)), 1, images, ring)
        if kind == "split":
            inv = 1 / self.upsilon
            images = {(e[i], e[i]): {(e[i], e[i], e[i]): inv} for i in own}
            return BimoduleMorphism(B((c,)), B((c, c)), -1, images, ring)
        if kind == "merge":
            images = {(e[i], loop[i], e[i]): {(e[i], e[i]): 1 / (self.tau * self.w[i])} for i in own}
            return BimoduleMorphism(B((c, c)), B((c,)), -1, images, ring)
        if kind == "cup":
            return compose(self.generator("split", c), self.generator("startdot", c))
        if kind == "cap":
            return compose(self.generator("enddot", c), self.generator("merge", c))
        if kind == "vertex2n":
            d = gen("vertex2n", c, self._finite_n())
            return zero_map(B(d.source), B(d.target), 0, ring)
        raise ValueError(f"unknown generator {kind!r}")

    def _finite_n(self) -> int:
        if self.n is None:
            raise ValueError("2n-vertex needs a finite n")
        return int(self.n)

    # composites ---------------------------------------------------------------
    def barbell(self, c: str) -> BimoduleMorphism:
        return compose(self.generator("enddot", c), self.generator("startdot", c))

    def gadget(self, outer: str) -> BimoduleMorphism:
        inner = other(outer)
        io = self.identity((outer,))
        bottom = tensor_h(tensor_h(io, self.generator("enddot", inner)), io)
        top = tensor_h(tensor_h(io, self.generator("startdot", inner)), io)
        mid = compose(self.generator("split", outer), self.generator("merge", outer))
        return compose(top, compose(mid, bottom))

    def jw(self, k: int, color: str) -> BimoduleMorphism:
        """JW_k with rightmost strand of the given color, by memoized recursion."""
        key = (k, color)
        if key in self._jw:
            return self._jw[key]
        if k == 0:
            out = self.identity(())
        elif k == 1:
            out = self.identity((color,))
        else:
            word = alternating(k, color)
            prev = self.jw(k - 1, color)
            ext = tensor_h(self.identity(word[:1]), prev)
            if k == 2:
                out = ext
            else:
                den = self.ring.quantum_integer(k - 1)
                if self.ring.is_zero(den):
                    raise UndefinedJWError(f"JW_{k} undefined: [{k - 1}]_q = 0")
                coef = self.ring.quantum_integer(k - 2) / den
                gadget = self.gadget(word[0])
                if k > 3:
                    gadget = tensor_h(gadget, self.identity(word[3:]))
                out = ext + compose(ext, compose(gadget, ext)).scale(coef)
        self._jw[key] = out
        return out

    # evaluation ---------------------------------------------------------------
    def evaluate(self, d: Diagram) -> BimoduleMorphism:
        if isinstance(d, Gen):
            if d.kind == "jw":
                return self.jw(d.k, d.color)
            return self.generator(d.kind, d.color)
        if isinstance(d, HComp):
            return tensor_h(self.evaluate(d.left), self.evaluate(d.right))
        if isinstance(d, VComp):
            return compose(self.evaluate(d.top), self.evaluate(d.bottom))
        if isinstance(d, LinComb):
            out = None
            for c, term in d.terms:
                m = self.evaluate(term)
                if not c.is_one():
                    m = m.scale(c.value(self.ring))
                out = m if out is None else out + m
            return out
        raise TypeError(f"not a diagram: {d!r}")


def evaluate(expr: Diagram, graph: BipartiteGraph, w: Weighting, n=None,
             scaling: Optional[Scaling] = None) -> BimoduleMorphism:
    return Realization(graph, w, n, scaling).evaluate(expr)


# ---------------------------------------------------------------------------
# relation suite
# ---------------------------------------------------------------------------

RELATION_GROUPS = ("EH", "Fr1", "Fr2", "Ne", "BF1", "BF2", "BF2'", "isotopy", "2nv1", "2nv2", "2nv3")
N_INDEPENDENT = ("EH", "Fr1", "Fr2", "Ne", "BF1", "BF2", "BF2'", "isotopy")


def _h(*ms: BimoduleMorphism) -> BimoduleMorphism:
    out = ms[0]
    for m in ms[1:]:
        out = tensor_h(out, m)
    return out


def _v(*ms: BimoduleMorphism) -> BimoduleMorphism:
    """Vertical stack, topmost first."""
    out = ms[-1]
    for m in reversed(ms[:-1]):
        out = compose(m, out)
    return out


def _equal(name: str, a: BimoduleMorphism, b: BimoduleMorphism) -> Check:
    diff = a.describe_difference(b)
    return Check(name, diff is None, diff)


def _zero(name: str, a: BimoduleMorphism) -> Check:
    ok = a.is_zero()
    detail = None
    if not ok:
        gen_, vec = next((g, v) for g, v in a.images.items() if v)
        t, c = next(iter(vec.items()))
        detail = f"nonzero at generator {a.source.label(gen_)}: {a.target.label(t)} with coefficient {c}"
    return Check(name, ok, detail)


def relation_suite(g: BipartiteGraph, w: Weighting, n=None, relations: Optional[Iterable[str]] = None,
                   scaling: Optional[Scaling] = None) -> Report:
    """Evaluate both sides of every defining relation and compare exactly (or to tolerance)."""
    if n == INFINITY:
        n = None
    wanted = set(relations) if relations else set(RELATION_GROUPS if n is not None else N_INDEPENDENT)
    unknown = wanted - set(RELATION_GROUPS)
    if unknown:
        raise ValueError(f"unknown relations {sorted(unknown)}")
    if n is None:
        wanted -= {"2nv1", "2nv2", "2nv3"}
    R = Realization(g, w, n, scaling)
    G, I = R.generator, R.identity
    ring = R.ring
    two = ring.coerce(2)
    q2 = ring.quantum_integer(2)
    checks: list[Check] = []
    for c in ("s", "t"):
        d = other(c)
        ic = I((c,))
        split, merge = G("split", c), G("merge", c)
        sd, ed = G("startdot", c), G("enddot", c)
        cp, cu = G("cap", c), G("cup", c)
        if "Fr1" in wanted:
            a = _v(_h(merge, ic), _h(ic, split))
            b = compose(split, merge)
            cc = _v(_h(ic, merge), _h(split, ic))
            checks.append(_equal(f"Fr1[{c}] left=middle", a, b))
            checks.append(_equal(f"Fr1[{c}] middle=right", b, cc))
        if "Fr2" in wanted:
            checks.append(_equal(f"Fr2[{c}] left", _v(_h(ed, ic), split), ic))
            checks.append(_equal(f"Fr2[{c}] right", _v(_h(ic, ed), split), ic))
            checks.append(_equal(f"Fr2[{c}] mirror left", _v(merge, _h(sd, ic)), ic))
            checks.append(_equal(f"Fr2[{c}] mirror right", _v(merge, _h(ic, sd)), ic))
        if "Ne" in wanted:
            checks.append(_zero(f"Ne[{c}]", compose(cp, split)))
            checks.append(_zero(f"Ne[{c}] mirror", compose(merge, cu)))
        bc, bd = R.barbell(c), R.barbell(d)
        dots = compose(sd, ed)
        if "BF1" in wanted:
            lhs = _h(bc, ic)
            rhs = dots.scale(two) - _h(ic, bc)
            checks.append(_equal(f"BF1[{c}]", lhs, rhs))
        if "BF2" in wanted:
            lhs = (_h(bd, ic) - _h(ic, bd)).scale(two)
            rhs = (_h(bc, ic) - _h(ic, bc)).scale(-q2)
            checks.append(_equal(f"BF2[{c}]", lhs, rhs))
        if "BF2'" in wanted:
            lhs = _h(bd, ic)
            rhs = _h(ic, bd) + _h(ic, bc).scale(q2) - dots.scale(q2)
            checks.append(_equal(f"BF2'[{c}]", lhs, rhs))
        if "isotopy" in wanted:
            checks.append(_equal(f"zigzag[{c}] left", _v(_h(cp, ic), _h(ic, cu)), ic))
            checks.append(_equal(f"zigzag[{c}] right", _v(_h(ic, cp), _h(cu, ic)), ic))
            checks.append(_equal(f"dot-rotation[{c}] left", _v(cp, _h(ic, sd)), ed))
            checks.append(_equal(f"dot-rotation[{c}] right", _v(cp, _h(sd, ic)), ed))
            checks.append(_equal(f"split-rotation[{c}] left", _v(_h(merge, ic), _h(ic, cu)), split))
            checks.append(_equal(f"split-rotation[{c}] right", _v(_h(ic, merge), _h(cu, ic)), split))
        if n is not None:
            vert = G("vertex2n", c)
            src, tgt = vert.source.word, vert.target.word
            if "2nv1" in wanted:
                # a dot on any boundary strand of the 2n-vertex: both sides are sent to zero
                for pos in range(len(tgt)):
                    dot = _h(*[I(tgt[:pos])] * bool(pos), G("enddot", tgt[pos]),
                             *[I(tgt[pos + 1:])] * bool(pos + 1 < len(tgt)))
                    checks.append(_zero(f"2nv1[{c}] dot on top strand {pos + 1}", compose(dot, vert)))
            if "2nv3" in wanted:
                # rotating the 2n-vertex by one strand with a cup and a cap
                last = src[-1]
                rot = _v(_h(vert, I((last,))), _h(I(src[:-1]), G("cup", last)))
                checks.append(_zero(f"2nv3[{c}] rotation", rot))
                first = tgt[0]
                rot2 = _v(_h(G("cap", first), I(tgt[1:])), _h(I((first,)), vert))
                checks.append(_zero(f"2nv3[{c}] mirror rotation", rot2))
            if "2nv2" in wanted:
                try:
                    checks.append(_zero(f"2nv2[{c}] JW_{n} = 0", R.jw(int(n), c)))
                except UndefinedJWError as e:
                    checks.append(Check(f"2nv2[{c}] JW_{n} = 0", False, str(e)))
    if "EH" in wanted:
        gens = [G(k, c) for c in ("s", "t") for k in ("startdot", "enddot", "split", "merge")]
        for f in gens:
            for h in gens:
                a = _v(_h(f, I(h.target.word)), _h(I(f.source.word), h))
                b = _v(_h(I(f.target.word), h), _h(f, I(h.source.word)))
                name = (f"EH {_word_text(f.source.word)}->{_word_text(f.target.word)} | "
                        f"{_word_text(h.source.word)}->{_word_text(h.target.word)}")
                checks.append(_equal(name, a, b))
    return Report(checks)


def jw_checks(g: BipartiteGraph, w: Weighting, n: int, scaling: Optional[Scaling] = None) -> Report:
    """JW_n vanishes and JW_(n-1) does not, for both rightmost colors."""
    R = Realization(g, w, n, scaling)
    checks = []
    for c in ("s", "t"):
        checks.append(_zero(f"JW_{n}[{c}] = 0", R.jw(n, c)))
        prev = R.jw(n - 1, c)
        checks.append(Check(f"JW_{n - 1}[{c}] != 0", not prev.is_zero(),
                            None if not prev.is_zero() else "vanishes"))
    return Report(checks)


# ---------------------------------------------------------------------------
# barbells and coinvariants
# ---------------------------------------------------------------------------

def barbell_endo(color: str, g: BipartiteGraph, w: Weighting, n=None) -> BimoduleMorphism:
    return Realization(g, w, n).barbell(color)


Poly2 = dict[tuple[int, int], object]  # (power of b_s, power of b_t) -> coefficient


def _poly_mul(a: Poly2, b: Poly2, ring) -> Poly2:
    out: Poly2 = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, ring.zero()) + x * y
    return {k: v for k, v in out.items() if not ring.is_zero(v)}


def _linear(form: tuple, ring) -> Poly2:
    return {k: v for k, v in (((1, 0), form[0]), ((0, 1), form[1])) if not ring.is_zero(v)}


def _act(letter: str, form: tuple, ring) -> tuple:
    """Listed action on x b_s + y b_t: s fixes b_s and sends b_t to b_t - [2] b_s; t symmetric."""
    x, y = form
    q2 = ring.quantum_integer(2)
    if letter == "s":
        return (x - q2 * y, y)
    return (x, y - q2 * x)


def _reflect(letter: str, form: tuple, ring) -> tuple:
    """Reflection action: s(b_s) = -b_s, s(b_t) = b_t + [2] b_s; t symmetric."""
    x, y = form
    q2 = ring.quantum_integer(2)
    if letter == "s":
        return (-x + q2 * y, y)
    return (x, -y + q2 * x)


def dihedral_words(n: int) -> list[tuple[str, ...]]:
    """One reduced word per element of the dihedral group of order 2n."""
    words = [()]
    for k in range(1, n):
        words.append(alternating(k, "s"))
        words.append(alternating(k, "t"))
    words.append(alternating(n, "t" if n % 2 == 0 else "s"))
    return words


def reflection_group(n: int, ring) -> list[tuple]:
    """Closure of the reflection matrices (row-major 2x2) under multiplication."""
    q2 = ring.quantum_integer(2)
    one, zero = ring.one(), ring.zero()
    s = (-one, q2, zero, one)
    t = (one, zero, q2, -one)

    def mul(a, b):
        return (a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3])

    elems = [(one, zero, zero, one)]
    seen = {_mkey(elems[0], ring)}
    frontier = list(elems)
    while frontier:
        nxt = []
        for m in frontier:
            for gm in (s, t):
                p = mul(gm, m)
                k = _mkey(p, ring)
                if k not in seen:
                    seen.add(k)
                    elems.append(p)
                    nxt.append(p)
        frontier = nxt
        if len(elems) > 4 * (n + 1) * 4:
            raise RuntimeError("reflection group closure does not terminate")
    return elems


def _mkey(m, ring):
    if isinstance(ring, FloatRing):
        return tuple((round(complex(x).real, 7), round(complex(x).imag, 7)) for x in m)
    return m


@dataclass
class CoinvariantResult:
    z: Poly2
    Z: Poly2
    Z_reflection: Poly2
    group_order: int
    report: Report


def coinvariant_checks(g: BipartiteGraph, w: Weighting, n: int) -> CoinvariantResult:
    """Images of the invariants z and Z under the realization vanish."""
    ring = w.ring
    R = Realization(g, w, n)
    q2 = ring.quantum_integer(2)
    one = ring.one()
    z = {(2, 0): one, (1, 1): -q2, (0, 2): one}
    base = (ring.coerce(2), q2)

    def product_over(forms):
        out: Poly2 = {(0, 0): one}
        for f in forms:
            out = _poly_mul(out, _linear(f, ring), ring)
        return out

    forms = []
    for word in dihedral_words(n):
        f = base
        for letter in reversed(word):
            f = _act(letter, f, ring)
        forms.append(f)
    Z = product_over(forms)
    group = reflection_group(n, ring)
    Zr = product_over([(m[0] * base[0] + m[1] * base[1], m[2] * base[0] + m[3] * base[1]) for m in group])

    bs, bt = R.barbell("s"), R.barbell("t")
    cache: dict[tuple[int, int], BimoduleMorphism] = {(0, 0): R.identity(())}

    def monomial(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = compose(bs, monomial(i - 1, j)) if i else compose(bt, monomial(i, j - 1))
        return cache[(i, j)]

    def image_zero(name, p):
        imgs = [(k, monomial(*k).scale(c)) for k, c in p.items()]
        bad = [(k, m) for k, m in imgs if not m.is_zero()]
        if not bad:
            return Check(name, True)
        return Check(name, False, f"monomial b_s^{bad[0][0][0]} b_t^{bad[0][0][1]} survives")

    checks = [
        image_zero("G(z) = 0", z),
        image_zero("G(Z) = 0", Z),
        image_zero("G(Z) = 0 (reflection action)", Zr),
        Check("z, Z have no monomials below degree 2",
              all(i + j >= 2 for p in (z, Z, Zr) for (i, j) in p)),
        Check("reflection group has order 2n", len(group) == 2 * n, len(group)),
        Check("b_s^2 = b_s b_t = b_t^2 = 0", all(monomial(*k).is_zero() for k in ((2, 0), (1, 1), (0, 2)))),
    ]
    # (2 b_s + [2] b_t) * s(2 b_s + [2] b_t) and its stated expansion
    sf = _act("s", base, ring)
    expected = (ring.coerce(2) - q2 * q2, q2)
    checks.append(Check("s(2b_s+[2]b_t) = (2-[2]^2)b_s + [2]b_t",
                        all(ring.is_zero(a - b) for a, b in zip(sf, expected))))
    checks.append(image_zero("(2b_s+[2]b_t) s(2b_s+[2]b_t) -> 0",
                             _poly_mul(_linear(base, ring), _linear(sf, ring), ring)))
    return CoinvariantResult(z, Z, Zr, len(group), Report(checks))


# ---------------------------------------------------------------------------
# random diagrams
# ---------------------------------------------------------------------------

def _random_layer(rng: random.Random, word: Word, max_len: int) -> Diagram:
    """A row of generators whose bottom boundary is word."""
    pieces: list[Diagram] = []
    i = 0
    length = len(word)
    while i < len(word):
        c = word[i]
        options = ["id", "id", "enddot"]
        if length < max_len:
            options += ["split", "cup_after"]
        if i + 1 < len(word) and word[i + 1] == c:
            options += ["merge", "cap"]
        if length < max_len:
            options.append("startdot_before")
        choice = rng.choice(options)
        if choice == "merge":
            pieces.append(gen("merge", c))
            length -= 1
            i += 2
            continue
        if choice == "cap":
            pieces.append(cap(c))
            length -= 2
            i += 2
            continue
        if choice == "startdot_before":
            pieces.append(gen("startdot", rng.choice("st")))
            length += 1
            pieces.append(gen("id", c))
        elif choice == "cup_after":
            pieces.append(gen("id", c))
            pieces.append(cup(rng.choice("st")))
            length += 2
            if length > max_len:
                pieces.pop()
                length -= 2
        elif choice == "split":
            pieces.append(gen("split", c))
            length += 1
        elif choice == "enddot":
            pieces.append(gen("enddot", c))
            length -= 1
        else:
            pieces.append(gen("id", c))
        i += 1
    if not pieces:
        return gen("startdot", rng.choice("st"))
    return hcomp_all(*pieces)


def random_diagram(rng: random.Random, depth: int = 6, max_len: int = 4) -> Diagram:
    """Random stack of generator rows; every intermediate word has length <= max_len."""
    start_len = rng.randint(0, min(2, max_len))
    word = tuple(rng.choice("st") for _ in range(start_len))
    d: Optional[Diagram] = identity_diagram(word)
    layers = rng.randint(1, depth)
    for _ in range(layers):
        cur = d.target if d is not None else ()
        layer = _random_layer(rng, cur, max_len)
        if len(layer.target) > max_len:
            continue
        d = layer if d is None else vcomp(layer, d)
    return d


__all__ = [
    "Scalar", "Diagram", "Gen", "HComp", "VComp", "LinComb", "DiagramExpr", "DiagramSyntaxError",
    "UndefinedJWError", "WeightingError", "ConvergenceError", "gen", "hcomp", "vcomp", "lincomb",
    "cup", "cap", "identity_diagram", "jw_expr", "jw_gadget_diagram", "parse", "to_text", "Weighting",
    "weighting_table_ade", "check_bf2", "bf2_residuals", "bf2_condition", "admissible_q",
    "pf_eigenvector", "q_from_alpha", "weighting_pf", "Scaling", "scaled_assignment", "Realization",
    "evaluate", "relation_suite", "jw_checks", "barbell_endo", "coinvariant_checks",
    "dihedral_words", "reflection_group", "random_diagram", "RELATION_GROUPS", "N_INDEPENDENT",
]
