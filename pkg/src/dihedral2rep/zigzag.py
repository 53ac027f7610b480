"""The zigzag (quiver) algebra of a bipartite graph.

Basis: an idempotent e_i and a loop i|i for every vertex, and an arrow j|i
(starting at i, ending at j) for each direction of each edge. Products are
written in operator order: ``multiply(a, b)`` is "first b, then a".
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .bigraph import BipartiteGraph

IDEMPOTENT, ARROW, LOOP = "e", "arrow", "loop"
_DEGREE = {IDEMPOTENT: 0, ARROW: 1, LOOP: 2}


class PathElement(NamedTuple):
    kind: str
    target: int
    source: int

    @property
    def degree(self) -> int:
        return _DEGREE[self.kind]

    def __str__(self):
        if self.kind == IDEMPOTENT:
            return f"e{self.source}"
        return f"{self.target}|{self.source}"


class ZigzagAlgebra:
    """Finite basis with an exact multiplication table.

    Basis elements are addressed by integer index; every nonzero product of
    two basis elements is again a basis element with coefficient one.
    """

    def __init__(self, graph: BipartiteGraph):
        self.graph = graph
        basis: list[PathElement] = []
        for v in graph.order:
            basis.append(PathElement(IDEMPOTENT, v, v))
        for v in graph.order:
            for w in graph.neighbors[v]:
                basis.append(PathElement(ARROW, w, v))
        for v in graph.order:
            basis.append(PathElement(LOOP, v, v))
        self.basis = basis
        self.index = {p: k for k, p in enumerate(basis)}
        self.idem = {v: self.index[PathElement(IDEMPOTENT, v, v)] for v in graph.order}
        self.loop = {v: self.index[PathElement(LOOP, v, v)] for v in graph.order}
        self.arrow = {(p.target, p.source): k for k, p in enumerate(basis) if p.kind == ARROW}
        self.source = [p.source for p in basis]
        self.target = [p.target for p in basis]
        self.degree = [p.degree for p in basis]
        size = len(basis)
        table: list[list[Optional[int]]] = [[None] * size for _ in range(size)]
        for a, pa in enumerate(basis):
            for b, pb in enumerate(basis):
                table[a][b] = self._product(pa, pb)
        self.table = table
        # paths with a fixed source / target
        self.from_vertex = {v: [k for k in range(size) if self.source[k] == v] for v in graph.order}
        self.to_vertex = {v: [k for k in range(size) if self.target[k] == v] for v in graph.order}
        self.between = {}
        for k in range(size):
            self.between.setdefault((self.target[k], self.source[k]), []).append(k)

    def _product(self, a: PathElement, b: PathElement) -> Optional[int]:
        if a.source != b.target:
            return None
        if a.kind == IDEMPOTENT:
            return self.index[b]
        if b.kind == IDEMPOTENT:
            return self.index[a]
        if a.kind == ARROW and b.kind == ARROW and a.target == b.source:
            # partners: b goes i -> j and a goes back j -> i
            return self.loop[a.target]
        return None

    def __len__(self):
        return len(self.basis)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def mul(self, a: int, b: int) -> Optional[int]:
        """Index of a*b, or None when the product vanishes."""
        return self.table[a][b]

    def multiply(self, a: PathElement, b: PathElement) -> Optional[PathElement]:
        ia, ib = self.index.get(a), self.index.get(b)
        if ia is None or ib is None:
            raise ValueError("element does not belong to this algebra")
        c = self.table[ia][ib]
        return None if c is None else self.basis[c]

    def element(self, text: str) -> int:
        """Index from a label such as 'e3', '2|1' or '1|1'."""
        if text.startswith("e"):
            return self.idem[int(text[1:])]
        tgt, src = (int(x) for x in text.split("|"))
        if tgt == src:
            return self.loop[tgt]
        return self.arrow[(tgt, src)]

    def label(self, k: int) -> str:
        return str(self.basis[k])

    def projective_left_basis(self, v: int) -> list[PathElement]:
        """Basis of P_v: paths starting at v (degrees 0, 1 per neighbor, 2)."""
        if v not in self.idem:
            raise KeyError(f"unknown vertex {v}")
        return [self.basis[k] for k in self.from_vertex[v]]

    def projective_right_basis(self, v: int) -> list[PathElement]:
        """Basis of _vP: paths ending at v."""
        if v not in self.idem:
            raise KeyError(f"unknown vertex {v}")
        return [self.basis[k] for k in self.to_vertex[v]]


_CACHE: dict[BipartiteGraph, ZigzagAlgebra] = {}


def build(g: BipartiteGraph) -> ZigzagAlgebra:
    alg = _CACHE.get(g)
    if alg is None:
        alg = ZigzagAlgebra(g)
        _CACHE[g] = alg
    return alg
