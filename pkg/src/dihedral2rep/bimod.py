"""Bimodules attached to words in s and t, and morphisms between them.

For a word c_0 c_1 ... c_{l-1} (leftmost letter first) the bimodule is the
direct sum, over vertex sequences (v_0, ..., v_{l-1}) with v_p of color c_p,
of

    P_{v_0} (x) e_{v_0} Q e_{v_1} (x) ... (x) e_{v_{l-2}} Q e_{v_{l-1}} (x) _{v_{l-1}}P

Basis elements are tuples of algebra basis indices
``(p_left, m_0, ..., m_{l-2}, p_right)``; for the empty word they are
1-tuples ``(p,)`` and the bimodule is the regular bimodule. The degree of an
element is the total path length minus l.

For l >= 1 the bimodule is free on the elements whose outer factors are
idempotents ("generators"); for the empty word the generators are the
idempotents e_v. Morphisms are stored by their values on generators and
extended by the actions: f(p_left . g . p_right) = p_left . f(g) . p_right,
and on the regular bimodule f(p) = p . f(e_source(p)).
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Optional

from .bigraph import BipartiteGraph
from .hecke import Matrix, mat_mul, mat_zero, alternating
from .scalars import LaurentPoly, quantum_integer_v
from .zigzag import ZigzagAlgebra, build

Element = tuple[int, ...]
Vector = dict[Element, object]


class BoundaryError(ValueError):
    """Raised when morphisms with incompatible boundary words are combined."""


class WordBimodule:
    def __init__(self, algebra: ZigzagAlgebra, word: Iterable[str]):
        self.algebra = algebra
        self.word = tuple(word)
        for c in self.word:
            if c not in ("s", "t"):
                raise ValueError(f"unknown color {c!r}")
        self._generators: Optional[list[Element]] = None
        self._basis: Optional[list[Element]] = None
        self._index: Optional[dict[Element, int]] = None

    @property
    def length(self) -> int:
        return len(self.word)

    def __repr__(self):
        return f"WordBimodule({''.join(self.word) or '∅'})"

    # enumeration ------------------------------------------------------------
    def summands(self) -> list[tuple[int, ...]]:
        """Vertex sequences (v_0, ..., v_{l-1}) with nonzero middle factors."""
        g = self.algebra.graph
        seqs: list[tuple[int, ...]] = [()]
        for c in self.word:
            nxt = []
            for seq in seqs:
                for v in g.color_class(c):
                    if not seq or seq[-1] == v or g.adjacent(seq[-1], v):
                        nxt.append(seq + (v,))
            seqs = nxt
        return seqs if self.word else []

    def generators(self) -> list[Element]:
        if self._generators is None:
            alg = self.algebra
            if not self.word:
                gens = [(alg.idem[v],) for v in alg.graph.order]
            else:
                gens = []
                for seq in self.summands():
                    partial: list[tuple[int, ...]] = [(alg.idem[seq[0]],)]
                    for a, b in zip(seq, seq[1:]):
                        mids = alg.between.get((a, b), [])
                        partial = [p + (m,) for p in partial for m in mids]
                    gens.extend(p + (alg.idem[seq[-1]],) for p in partial)
            self._generators = gens
        return self._generators

    def basis(self) -> list[Element]:
        if self._basis is None:
            alg = self.algebra
            if not self.word:
                out = [(k,) for k in range(len(alg))]
            else:
                out = []
                for gen in self.generators():
                    v0 = alg.source[gen[0]]
                    vl = alg.target[gen[-1]]
                    for p in alg.from_vertex[v0]:
                        for r in alg.to_vertex[vl]:
                            out.append((p,) + gen[1:-1] + (r,))
            self._basis = out
        return self._basis

    def index(self) -> dict[Element, int]:
        if self._index is None:
            self._index = {b: k for k, b in enumerate(self.basis())}
        return self._index

    def dimension(self) -> int:
        return len(self.basis())

    def degree(self, elt: Element) -> int:
        deg = self.algebra.degree
        return sum(deg[k] for k in elt) - self.length

    def contains(self, elt: Element) -> bool:
        alg = self.algebra
        g = alg.graph
        if len(elt) != self.length + 1 and not (self.length == 0 and len(elt) == 1):
            return False
        if not self.word:
            return 0 <= elt[0] < len(alg)
        seq = [alg.source[elt[0]]]
        for m in elt[1:-1]:
            if alg.target[m] != seq[-1]:
                return False
            seq.append(alg.source[m])
        if alg.target[elt[-1]] != seq[-1]:
            return False
        return all(g.colors[v] == c for v, c in zip(seq, self.word))

    def label(self, elt: Element) -> str:
        return " ⊗ ".join(self.algebra.label(k) for k in elt)

    # actions ----------------------------------------------------------------
    def generator_of(self, elt: Element) -> tuple[Element, Optional[int], Optional[int]]:
        """Split elt as left . gen . right (right is None for the empty word)."""
        alg = self.algebra
        if not self.word:
            return (alg.idem[alg.source[elt[0]]],), elt[0], None
        gen = (alg.idem[alg.source[elt[0]]],) + elt[1:-1] + (alg.idem[alg.target[elt[-1]]],)
        return gen, elt[0], elt[-1]

    def left_act(self, a: int, elt: Element) -> Optional[Element]:
        c = self.algebra.table[a][elt[0]]
        return None if c is None else (c,) + elt[1:]

    def right_act(self, elt: Element, a: int) -> Optional[Element]:
        c = self.algebra.table[elt[-1]][a]
        return None if c is None else elt[:-1] + (c,)


_BIMODULES: dict[tuple[int, tuple[str, ...]], WordBimodule] = {}


def word_bimodule(algebra: ZigzagAlgebra, word: Iterable[str]) -> WordBimodule:
    word = tuple(word)
    key = (id(algebra), word)
    wb = _BIMODULES.get(key)
    if wb is None or wb.algebra is not algebra:
        wb = WordBimodule(algebra, word)
        _BIMODULES[key] = wb
    return wb


def _lmul(table, a: int, t: Element) -> Optional[Element]:
    c = table[a][t[0]]
    return None if c is None else (c,) + t[1:]


def _rmul(table, t: Element, a: int) -> Optional[Element]:
    c = table[t[-1]][a]
    return None if c is None else t[:-1] + (c,)


def _accumulate(acc: dict, key, value) -> None:
    cur = acc.get(key)
    acc[key] = value if cur is None else cur + value


def _prune(vec: dict) -> dict:
    return {k: v for k, v in vec.items() if v != 0}


class BimoduleMorphism:
    """Homogeneous bimodule map stored by its values on generators."""

    def __init__(self, source: WordBimodule, target: WordBimodule, degree: int,
                 images: dict[Element, Vector], ring, explicit: Optional[dict[Element, Vector]] = None):
        if source.algebra is not target.algebra:
            raise ValueError("source and target live over different algebras")
        self.source = source
        self.target = target
        self.degree = degree
        self.images = {g: v for g, v in ((g, _prune(v)) for g, v in images.items()) if v}
        self.ring = ring
        self.explicit = explicit

    @property
    def algebra(self) -> ZigzagAlgebra:
        return self.source.algebra

    def __repr__(self):
        s = "".join(self.source.word) or "∅"
        t = "".join(self.target.word) or "∅"
        return f"BimoduleMorphism({s} -> {t}, degree {self.degree}, {self.nnz()} generator entries)"

    def nnz(self) -> int:
        return sum(len(v) for v in self.images.values())

    # evaluation ---------------------------------------------------------------
    def apply(self, elt: Element) -> Vector:
        if self.explicit is not None:
            return self.explicit.get(elt, {})
        gen, left, right = self.source.generator_of(elt)
        img = self.images.get(gen)
        if not img:
            return {}
        table = self.algebra.table
        out: Vector = {}
        for t, c in img.items():
            t2 = _lmul(table, left, t)
            if t2 is None:
                continue
            if right is not None:
                t2 = _rmul(table, t2, right)
                if t2 is None:
                    continue
            _accumulate(out, t2, c)
        return out

    def apply_vector(self, vec: Vector) -> Vector:
        out: Vector = {}
        for elt, c in vec.items():
            for t, d in self.apply(elt).items():
                _accumulate(out, t, c * d)
        return _prune(out)

    def full_map(self) -> dict[Element, Vector]:
        return {b: _prune(self.apply(b)) for b in self.source.basis()}

    def to_matrix(self) -> dict[tuple[int, int], object]:
        """Sparse matrix {(target index, source index): coefficient} on full bases."""
        tidx = self.target.index()
        out = {}
        for j, b in enumerate(self.source.basis()):
            for t, c in self.apply(b).items():
                if c != 0:
                    out[(tidx[t], j)] = c
        return out

    # comparison -------------------------------------------------------------
    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for v in self.images.values() for c in v.values())

    def difference(self, other: "BimoduleMorphism"):
        """First generator where the maps differ, as (generator, element, lhs, rhs), or None."""
        _check_same_boundary(self, other)
        zero = self.ring.zero()
        for gen in set(self.images) | set(other.images):
            a = self.images.get(gen, {})
            b = other.images.get(gen, {})
            for t in set(a) | set(b):
                x, y = a.get(t, zero), b.get(t, zero)
                if not self.ring.is_zero(x - y):
                    return gen, t, x, y
        return None

    def equals(self, other: "BimoduleMorphism") -> bool:
        return self.difference(other) is None

    def describe_difference(self, other: "BimoduleMorphism") -> Optional[str]:
        d = self.difference(other)
        if d is None:
            return None
        gen, t, x, y = d
        return (f"at generator {self.source.label(gen)}: coefficient of "
                f"{self.target.label(t)} is {x} vs {y}")

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other: "BimoduleMorphism") -> "BimoduleMorphism":
        _check_same_boundary(self, other)
        images = {g: dict(v) for g, v in self.images.items()}
        for g, v in other.images.items():
            tgt = images.setdefault(g, {})
            for t, c in v.items():
                _accumulate(tgt, t, c)
        return BimoduleMorphism(self.source, self.target, self.degree, images, self.ring)

    def __neg__(self) -> "BimoduleMorphism":
        return self.scale(-1)

    def __sub__(self, other: "BimoduleMorphism") -> "BimoduleMorphism":
        return self + other.scale(-1)

    def scale(self, c) -> "BimoduleMorphism":
        c = self.ring.coerce(c)
        images = {g: {t: c * x for t, x in v.items()} for g, v in self.images.items()}
        return BimoduleMorphism(self.source, self.target, self.degree, images, self.ring)

    def __rmul__(self, c):
        return self.scale(c)


def _check_same_boundary(f: BimoduleMorphism, g: BimoduleMorphism) -> None:
    if f.source.word != g.source.word or f.target.word != g.target.word:
        raise BoundaryError(
            f"boundary mismatch: {''.join(f.source.word) or '∅'}->{''.join(f.target.word) or '∅'} vs "
            f"{''.join(g.source.word) or '∅'}->{''.join(g.target.word) or '∅'}")
    if f.degree != g.degree and not (f.is_zero() or g.is_zero()):
        raise BoundaryError(f"degree mismatch: {f.degree} vs {g.degree}")


def add(f: BimoduleMorphism, g: BimoduleMorphism) -> BimoduleMorphism:
    return f + g


def scale(c, f: BimoduleMorphism) -> BimoduleMorphism:
    return f.scale(c)


def identity(wb: WordBimodule, ring) -> BimoduleMorphism:
    one = ring.one()
    return BimoduleMorphism(wb, wb, 0, {g: {g: one} for g in wb.generators()}, ring)


def zero_map(source: WordBimodule, target: WordBimodule, degree: int, ring) -> BimoduleMorphism:
    return BimoduleMorphism(source, target, degree, {}, ring)


def compose(f: BimoduleMorphism, g: BimoduleMorphism) -> BimoduleMorphism:
    """f after g (g is applied first)."""
    if g.target.word != f.source.word:
        raise BoundaryError(
            f"cannot compose: target {''.join(g.target.word) or '∅'} "
            f"!= source {''.join(f.source.word) or '∅'}")
    images = {}
    for gen, vec in g.images.items():
        out: Vector = {}
        for y, c in vec.items():
            for z, d in f.apply(y).items():
                _accumulate(out, z, c * d)
        images[gen] = out
    return BimoduleMorphism(g.source, f.target, f.degree + g.degree, images, f.ring)


def _combine(table, left: Element, right: Element) -> Optional[Element]:
    c = table[left[-1]][right[0]]
    return None if c is None else left[:-1] + (c,) + right[1:]


def tensor_h(f: BimoduleMorphism, g: BimoduleMorphism) -> BimoduleMorphism:
    """Horizontal product with f on the left and g on the right."""
    alg = f.algebra
    if g.algebra is not alg:
        raise ValueError("morphisms over different algebras")
    table = alg.table
    la, lb = f.source.length, g.source.length
    source = word_bimodule(alg, f.source.word + g.source.word)
    target = word_bimodule(alg, f.target.word + g.target.word)
    # index g's generators by their leftmost vertex
    by_first: dict[int, list[tuple[Element, Vector]]] = {}
    for gy, vy in g.images.items():
        by_first.setdefault(alg.source[gy[0]], []).append((gy, vy))
    images: dict[Element, Vector] = {}

    def emit(gen: Element, fx: Vector, gyv: Vector) -> None:
        out = images.setdefault(gen, {})
        for tl, c in fx.items():
            for tr, d in gyv.items():
                t = _combine(table, tl, tr)
                if t is not None:
                    _accumulate(out, t, c * d)

    for gx, fx in f.images.items():
        if la == 0:
            v = alg.source[gx[0]]
            for gy, gyv in by_first.get(v, []):
                emit(gy if lb else gx, fx, gyv)
            continue
        last = alg.target[gx[-1]]
        if lb == 0:
            for gy, gyv in by_first.get(last, []):
                emit(gx, fx, gyv)
            continue
        for first, entries in by_first.items():
            mids = alg.between.get((last, first))
            if not mids:
                continue
            for m in mids:
                fxm: Vector = {}
                for t, c in fx.items():
                    t2 = _rmul(table, t, m)
                    if t2 is not None:
                        _accumulate(fxm, t2, c)
                if not fxm:
                    continue
                for gy, gyv in entries:
                    emit(gx[:-1] + (m,) + gy[1:], fxm, gyv)
    return BimoduleMorphism(source, target, f.degree + g.degree, images, f.ring)


def from_basis_map(source: WordBimodule, target: WordBimodule, degree: int,
                   mapping: dict[Element, Vector], ring) -> BimoduleMorphism:
    """Morphism given by its values on every source basis element (not assumed equivariant)."""
    gens = set(source.generators())
    images = {b: dict(v) for b, v in mapping.items() if b in gens}
    return BimoduleMorphism(source, target, degree, images, ring,
                            explicit={b: dict(v) for b, v in mapping.items()})


def check_degree(f: BimoduleMorphism) -> Optional[str]:
    for b in f.source.basis():
        db = f.source.degree(b)
        for t, c in f.apply(b).items():
            if not f.ring.is_zero(c) and f.target.degree(t) != db + f.degree:
                return (f"{f.source.label(b)} (degree {db}) maps to {f.target.label(t)} "
                        f"(degree {f.target.degree(t)}), expected shift {f.degree}")
    return None


def check_equivariance(f: BimoduleMorphism) -> tuple[bool, Optional[str]]:
    """Verify f(a.b) = a.f(b), f(b.a) = f(b).a and degree homogeneity on full bases."""
    msg = check_degree(f)
    if msg:
        return False, "degree: " + msg
    alg = f.algebra
    src, tgt = f.source, f.target
    ring = f.ring
    values = {b: f.apply(b) for b in src.basis()}
    zero = ring.zero()

    def act(vec: Vector, a: int, left: bool) -> Vector:
        out: Vector = {}
        for t, c in vec.items():
            t2 = tgt.left_act(a, t) if left else tgt.right_act(t, a)
            if t2 is not None:
                _accumulate(out, t2, c)
        return out

    def differs(u: Vector, w: Vector) -> bool:
        return any(not ring.is_zero(u.get(k, zero) - w.get(k, zero)) for k in set(u) | set(w))

    for b, fb in values.items():
        for a in range(len(alg)):
            for left in (True, False):
                ab = src.left_act(a, b) if left else src.right_act(b, a)
                lhs = values[ab] if ab is not None else {}
                rhs = act(fb, a, left)
                if differs(lhs, rhs):
                    side = "left" if left else "right"
                    return False, (f"{side} action of {alg.label(a)} on {src.label(b)} "
                                   f"does not commute with the map")
    return True, None


# ---------------------------------------------------------------------------
# decategorification
# ---------------------------------------------------------------------------

ProjectiveDecomposition = Counter  # (vertex id, shift) -> multiplicity


def theta_apply(graph: BipartiteGraph, color: str, d: Counter) -> Counter:
    """Decomposition of Theta_color applied to a sum of shifted indecomposable projectives."""
    out: Counter = Counter()
    for (v, shift), mult in d.items():
        if graph.colors[v] == color:
            out[(v, shift - 1)] += mult
            out[(v, shift + 1)] += mult
        else:
            for w in graph.neighbors[v]:
                out[(w, shift)] += mult
    return +out


def theta_word(graph: BipartiteGraph, word: Iterable[str], vertex: int) -> Counter:
    """Apply the letters of word to P_vertex, rightmost letter first."""
    d = Counter({(vertex, 0): 1})
    for c in reversed(tuple(word)):
        d = theta_apply(graph, c, d)
    return d


def word_decomposition(algebra: ZigzagAlgebra, word: Iterable[str], vertex: int) -> Counter:
    """Left-module decomposition of (word bimodule) (x) P_vertex by brute-force basis counting.

    Each generator of the word bimodule together with a path of e_last Q e_vertex
    spans one shifted copy of P_first; its shift is the degree of that element.
    """
    word = tuple(word)
    if not word:
        return Counter({(vertex, 0): 1})
    wb = word_bimodule(algebra, word)
    out: Counter = Counter()
    for gen in wb.generators():
        vl = algebra.target[gen[-1]]
        for r in algebra.between.get((vl, vertex), []):
            elt = gen[:-1] + (r,)
            out[(algebra.source[gen[0]], wb.degree(elt))] += 1
    return out


def theta_matrix(obj, color: str) -> Matrix:
    """Matrix of [Theta_color] on the basis [P_v] (canonical order); column j is the image of [P_j]."""
    graph = obj.graph if isinstance(obj, ZigzagAlgebra) else obj
    order = graph.order
    idx = {v: k for k, v in enumerate(order)}
    m = mat_zero(len(order))
    for j, v in enumerate(order):
        for (w, shift), mult in theta_apply(graph, color, Counter({(v, 0): 1})).items():
            m[idx[w]][j] = m[idx[w]][j] + LaurentPoly.monomial(shift, mult)
    return m


def theta_alternating(graph: BipartiteGraph, length: int, leftmost: str) -> Matrix:
    ms, mt = theta_matrix(graph, "s"), theta_matrix(graph, "t")
    word = alternating(length, leftmost if length % 2 else ("t" if leftmost == "s" else "s"))
    size = len(graph)
    out = [[LaurentPoly.const(1) if i == j else LaurentPoly() for j in range(size)] for i in range(size)]
    for c in word:
        out = mat_mul(out, ms if c == "s" else mt)
    return out


def theta_closed_form(graph: BipartiteGraph, length: int) -> Matrix:
    """Block formula for the alternating product of length k >= 1 starting (on the left) with s.

    With A the S x T adjacency block: for odd k the top block row is
    (AA^T)^((k-1)/2) [ [2] | A ], for even k it is (AA^T)^((k-2)/2) [ AA^T | [2] A ];
    the bottom block row vanishes.
    """
    s, t = graph.s_vertices, graph.t_vertices
    a = [[LaurentPoly.const(1) if graph.adjacent(u, w) else LaurentPoly() for w in t] for u in s]
    at = [list(col) for col in zip(*a)] if a and t else [[] for _ in t]
    two = quantum_integer_v(2)
    aat = mat_mul(a, at) if t else mat_zero(len(s))
    ns = len(s)
    power = [[LaurentPoly.const(1) if i == j else LaurentPoly() for j in range(ns)] for i in range(ns)]
    reps = (length - 1) // 2 if length % 2 else (length - 2) // 2
    for _ in range(reps):
        power = mat_mul(power, aat)
    if length % 2:
        left = [[two if i == j else LaurentPoly() for j in range(ns)] for i in range(ns)]
        right = a
    else:
        left = aat
        right = [[x * two for x in row] for row in a]
    top = [lrow + rrow for lrow, rrow in zip(mat_mul(power, left), mat_mul(power, right) if t else [[]] * ns)]
    bottom = [[LaurentPoly() for _ in range(len(graph))] for _ in t]
    return top + bottom


__all__ = [
    "WordBimodule", "BimoduleMorphism", "BoundaryError", "word_bimodule", "compose", "tensor_h",
    "add", "scale", "identity", "zero_map", "from_basis_map", "check_equivariance", "check_degree",
    "theta_apply", "theta_word", "word_decomposition", "theta_matrix", "theta_alternating",
    "theta_closed_form", "ProjectiveDecomposition", "build",
]
