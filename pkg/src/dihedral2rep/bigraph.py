"""Two-colored (bipartite) graphs, spectra and ADE recognition."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .hecke import COLORS


class GraphError(ValueError):
    """Raised for malformed or invalid graph input."""


@dataclass(frozen=True)
class ADEType:
    family: str
    rank: int

    @property
    def coxeter(self) -> int:
        return coxeter_number(self.family, self.rank)

    def __str__(self):
        return f"{self.family}{self.rank}"


def coxeter_number(family: str, rank: int) -> int:
    if family == "A":
        return rank + 1
    if family == "D":
        return 2 * rank - 2
    if family == "E":
        return {6: 12, 7: 18, 8: 30}[rank]
    raise ValueError(f"unknown family {family!r}")


class BipartiteGraph:
    """Finite simple connected graph with a proper two-coloring by s and t.

    Vertices are kept in canonical order: s-vertices, then t-vertices, each
    ascending by id.
    """

    def __init__(self, vertices: Iterable[tuple[int, str]], edges: Iterable[Iterable[int]]):
        colors: dict[int, str] = {}
        for vid, col in vertices:
            if not isinstance(vid, int) or isinstance(vid, bool):
                raise GraphError(f"vertex id {vid!r} is not an integer")
            if col not in COLORS:
                raise GraphError(f"vertex {vid}: color {col!r} is not 's' or 't'")
            if vid in colors:
                raise GraphError(f"duplicate vertex id {vid}")
            colors[vid] = col
        if not colors:
            raise GraphError("graph has no vertices")
        edge_set: set[tuple[int, int]] = set()
        for e in edges:
            e = tuple(e)
            if len(e) != 2:
                raise GraphError(f"edge {list(e)} does not have two endpoints")
            a, b = e
            for x in (a, b):
                if x not in colors:
                    raise GraphError(f"edge {[a, b]} uses unknown vertex {x}")
            if a == b:
                raise GraphError(f"loop at vertex {a}")
            key = (min(a, b), max(a, b))
            if key in edge_set:
                raise GraphError(f"duplicate edge {list(key)}")
            if colors[a] == colors[b]:
                raise GraphError(f"monochrome edge {list(key)}")
            edge_set.add(key)
        self.colors = colors
        self.edges = frozenset(edge_set)
        self.order = sorted(colors, key=lambda v: (colors[v], v))
        self.index = {v: i for i, v in enumerate(self.order)}
        self.neighbors: dict[int, tuple[int, ...]] = {v: () for v in colors}
        adj: dict[int, list[int]] = {v: [] for v in colors}
        for a, b in edge_set:
            adj[a].append(b)
            adj[b].append(a)
        self.neighbors = {v: tuple(sorted(ns, key=self.index.__getitem__)) for v, ns in adj.items()}
        self._check_connected()

    def _check_connected(self) -> None:
        start = self.order[0]
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.neighbors[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.colors):
            missing = sorted(set(self.colors) - seen)
            raise GraphError(f"graph is disconnected (vertex {missing[0]} unreachable)")

    # basic accessors ------------------------------------------------------
    @property
    def vertices(self) -> list[int]:
        return list(self.order)

    @property
    def s_vertices(self) -> list[int]:
        return [v for v in self.order if self.colors[v] == "s"]

    @property
    def t_vertices(self) -> list[int]:
        return [v for v in self.order if self.colors[v] == "t"]

    def color_class(self, color: str) -> list[int]:
        return self.s_vertices if color == "s" else self.t_vertices

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def __len__(self):
        return len(self.order)

    def __eq__(self, other):
        return isinstance(other, BipartiteGraph) and self.colors == other.colors and self.edges == other.edges

    def __hash__(self):
        return hash((frozenset(self.colors.items()), self.edges))

    def __repr__(self):
        cs = "".join(self.colors[v] for v in self.order)
        return f"BipartiteGraph({len(self)} vertices, {cs}, {len(self.edges)} edges)"

    def block(self) -> np.ndarray:
        """The |S| x |T| block A of the adjacency matrix."""
        s, t = self.s_vertices, self.t_vertices
        a = np.zeros((len(s), len(t)), dtype=np.int64)
        for i, u in enumerate(s):
            for j, w in enumerate(t):
                if self.adjacent(u, w):
                    a[i, j] = 1
        return a

    def adjacency(self) -> np.ndarray:
        n = len(self.order)
        m = np.zeros((n, n), dtype=np.int64)
        for a, b in self.edges:
            m[self.index[a], self.index[b]] = 1
            m[self.index[b], self.index[a]] = 1
        return m

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v, "color": self.colors[v]} for v in self.order],
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BipartiteGraph":
        try:
            verts = [(v["id"], v["color"]) for v in data["vertices"]]
            edges = [tuple(e) for e in data.get("edges", [])]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph description: {exc}") from exc
        return cls(verts, edges)

    @classmethod
    def from_path(cls, colors: str, start_id: int = 1) -> "BipartiteGraph":
        """Path graph with the given color string, ids start_id, start_id+1, ..."""
        ids = list(range(start_id, start_id + len(colors)))
        return cls(zip(ids, colors), zip(ids, ids[1:]))


def load(data: bytes | str) -> BipartiteGraph:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise GraphError("graph JSON must be an object")
    return BipartiteGraph.from_dict(obj)


def save(g: BipartiteGraph) -> bytes:
    return json.dumps(g.to_dict()).encode()


def opposite_coloring(g: BipartiteGraph) -> BipartiteGraph:
    swap = {"s": "t", "t": "s"}
    return BipartiteGraph(((v, swap[c]) for v, c in g.colors.items()), g.edges)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def char_poly(g: BipartiteGraph) -> list[int]:
    """Characteristic polynomial det(x - A(G)), lowest degree first.

    Faddeev-LeVerrier recursion; all divisions are exact over the integers.
    """
    a = [[int(x) for x in row] for row in g.adjacency()]
    n = len(a)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    m = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        am = [[sum(a[i][r] * m[r][j] for r in range(n) if a[i][r]) for j in range(n)] for i in range(n)]
        for i in range(n):
            am[i][i] += coeffs[n - k + 1]
        m = am
        tr = sum(sum(a[i][r] * m[r][i] for r in range(n)) for i in range(n))
        assert tr % k == 0
        coeffs[n - k] = -tr // k
    return coeffs


def spectrum_float(g: BipartiteGraph) -> list[float]:
    return sorted(float(x) for x in np.linalg.eigvalsh(g.adjacency().astype(float)))


def char_poly_roots(g: BipartiteGraph) -> list[float]:
    """Numerical roots of the exact characteristic polynomial."""
    roots = np.roots(list(reversed(char_poly(g))))
    return sorted(float(r.real) for r in roots)


def spectral_radius(g: BipartiteGraph) -> float:
    return max(abs(x) for x in spectrum_float(g))


# ---------------------------------------------------------------------------
# ADE recognition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ADELayout:
    """An ADE graph with a fixed vertex enumeration.

    ``path`` runs from the leaf of the longest arm through the branch point
    (if any) and on along the second-longest arm; ``extra`` holds the remaining
    leaves (one for E-types and for D-types beyond the path, none for A).
    """

    ade: ADEType
    path: tuple[int, ...]
    extra: tuple[int, ...]
    branch_index: Optional[int]


def _arms(g: BipartiteGraph, center: int) -> list[list[int]]:
    arms = []
    for start in g.neighbors[center]:
        arm = [start]
        prev, cur = center, start
        while True:
            nxt = [w for w in g.neighbors[cur] if w != prev]
            if len(nxt) != 1:
                if nxt:
                    return []
                break
            prev, cur = cur, nxt[0]
            arm.append(cur)
        arms.append(arm)
    return arms


def ade_layout(g: BipartiteGraph) -> Optional[ADELayout]:
    n = len(g)
    if n == 1:
        return ADELayout(ADEType("A", 1), (g.order[0],), (), None)
    if len(g.edges) != n - 1:
        return None
    degs = {v: len(g.neighbors[v]) for v in g.order}
    if max(degs.values()) > 3:
        return None
    branches = [v for v in g.order if degs[v] == 3]
    if not branches:
        leaves = [v for v in g.order if degs[v] == 1]
        start = min(leaves, key=g.index.__getitem__)
        path = [start]
        prev = None
        while True:
            nxt = [w for w in g.neighbors[path[-1]] if w != prev]
            if not nxt:
                break
            prev = path[-1]
            path.append(nxt[0])
        return ADELayout(ADEType("A", n), tuple(path), (), None)
    if len(branches) != 1:
        return None
    center = branches[0]
    arms = _arms(g, center)
    if len(arms) != 3:
        return None
    arms.sort(key=lambda a: (-len(a), g.index[a[-1]]))
    lengths = sorted(len(a) for a in arms)
    long_arm, mid_arm, short_arm = arms
    path = tuple(reversed(long_arm)) + (center,)
    if lengths[0] == 1 and lengths[1] == 1:
        ade = ADEType("D", n)
        # path = long arm + branch point; the two forks are extra
        return ADELayout(ade, path, (mid_arm[0], short_arm[0]), len(long_arm))
    shapes = {(1, 2, 2): 6, (1, 2, 3): 7, (1, 2, 4): 8}
    rank = shapes.get(tuple(lengths))
    if rank is None:
        return None
    return ADELayout(ADEType("E", rank), path + tuple(mid_arm), tuple(short_arm), len(long_arm))


def recognize_ade(g: BipartiteGraph) -> Optional[ADEType]:
    """ADE type of g, or None; the structural answer is cross-checked spectrally."""
    layout = ade_layout(g)
    ade = layout.ade if layout else None
    if len(g) > 1:
        spectral = spectral_radius(g) < 2 - 1e-9
        if spectral != (ade is not None):
            raise AssertionError("structural and spectral ADE tests disagree")
    return ade


# ---------------------------------------------------------------------------
# isomorphism and cospectrality
# ---------------------------------------------------------------------------

def _to_networkx(g: BipartiteGraph):
    import networkx as nx

    h = nx.Graph()
    for v, c in g.colors.items():
        h.add_node(v, color=c)
    h.add_edges_from(g.edges)
    return h


def is_isomorphic_bipartite(g1: BipartiteGraph, g2: BipartiteGraph) -> Optional[dict[int, int]]:
    """A color- and edge-preserving bijection g1 -> g2, or None."""
    if len(g1) != len(g2) or len(g1.edges) != len(g2.edges):
        return None
    if len(g1.s_vertices) != len(g2.s_vertices):
        return None
    from networkx.algorithms.isomorphism import GraphMatcher

    gm = GraphMatcher(_to_networkx(g1), _to_networkx(g2),
                      node_match=lambda a, b: a["color"] == b["color"])
    for mapping in gm.isomorphisms_iter():
        return dict(sorted(mapping.items()))
    return None


def spectrum_color_equivalent(g1: BipartiteGraph, g2: BipartiteGraph) -> bool:
    return (len(g1.s_vertices) == len(g2.s_vertices)
            and len(g1.t_vertices) == len(g2.t_vertices)
            and char_poly(g1) == char_poly(g2))


# ---------------------------------------------------------------------------
# standard graphs
# ---------------------------------------------------------------------------

def _alt(first: str, length: int) -> str:
    out = []
    c = first
    for _ in range(length):
        out.append(c)
        c = "t" if c == "s" else "s"
    return "".join(out)


def type_a(m: int, first: str = "s") -> BipartiteGraph:
    return BipartiteGraph.from_path(_alt(first, m))


def _tree_with_arms(arm_lengths: tuple[int, ...], center_color: str) -> BipartiteGraph:
    """Star-like tree: center vertex 1, arms numbered consecutively outwards."""
    verts = [(1, center_color)]
    edges = []
    nxt = 2
    for length in arm_lengths:
        prev, col = 1, center_color
        for _ in range(length):
            col = "t" if col == "s" else "s"
            verts.append((nxt, col))
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return BipartiteGraph(verts, edges)


def type_d(m: int, center: str = "s") -> BipartiteGraph:
    if m < 4:
        raise ValueError("type D needs rank >= 4")
    return _tree_with_arms((m - 3, 1, 1), center)


def type_e(m: int, center: str = "s") -> BipartiteGraph:
    arms = {6: (2, 2, 1), 7: (3, 2, 1), 8: (4, 2, 1)}[m]
    return _tree_with_arms(arms, center)


def cycle(length: int) -> BipartiteGraph:
    if length % 2 or length < 4:
        raise ValueError("bipartite cycles have even length >= 4")
    ids = list(range(1, length + 1))
    return BipartiteGraph(((i, "s" if i % 2 else "t") for i in ids),
                          [(i, i % length + 1) for i in ids])
