"""ADE bipartite graphs by Coxeter number, their equivalence classes and SVD witnesses."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bigraph import (ADEType, BipartiteGraph, ade_layout, is_isomorphic_bipartite, opposite_coloring,
                      spectrum_color_equivalent, type_a, type_d, type_e)


class PreconditionError(ValueError):
    pass


def graphs_for_coxeter(n: int) -> list[BipartiteGraph]:
    """ADE graphs with Coxeter number n in both colorings (before isomorphism reduction)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    out = [type_a(n - 1, "s"), type_a(n - 1, "t")]
    if n % 2 == 0 and n >= 6:
        m = n // 2 + 1
        out += [type_d(m, "s"), type_d(m, "t")]
    e_rank = {12: 6, 18: 7, 30: 8}.get(n)
    if e_rank:
        out += [type_e(e_rank, "s"), type_e(e_rank, "t")]
    return out


def coloring_tag(g: BipartiteGraph) -> str:
    layout = ade_layout(g)
    if layout is None:
        return "non-ADE"
    if layout.branch_index is not None:
        return f"branch {g.colors[layout.path[layout.branch_index]]}"
    ends = sorted({g.colors[layout.path[0]], g.colors[layout.path[-1]]})
    return "ends " + ",".join(ends)


@dataclass
class ClassEntry:
    graph: BipartiteGraph
    ade: ADEType
    coloring: str
    decat_class_id: int = -1

    def to_dict(self) -> dict:
        return {"graph": self.graph.to_dict(), "ade": {"family": self.ade.family, "rank": self.ade.rank},
                "coloring": self.coloring, "decat_class_id": self.decat_class_id}


@dataclass
class ClassificationReport:
    n: int
    classes: list[ClassEntry]
    decat_classes: list[list[int]]
    rank_one: list[BipartiteGraph] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "classes": [c.to_dict() for c in self.classes],
            "decat_classes": self.decat_classes,
            "rank_one": [g.to_dict() for g in self.rank_one],
        }


def equivalence_classes(n: int) -> ClassificationReport:
    reps: list[BipartiteGraph] = []
    for g in graphs_for_coxeter(n):
        if not any(is_isomorphic_bipartite(g, h) is not None for h in reps):
            reps.append(g)
    classes = [ClassEntry(g, ade_layout(g).ade, coloring_tag(g)) for g in reps]
    decat: list[list[int]] = []
    for k, entry in enumerate(classes):
        for cell in decat:
            if spectrum_color_equivalent(classes[cell[0]].graph, entry.graph):
                cell.append(k)
                break
        else:
            decat.append([k])
    for cid, cell in enumerate(decat):
        for k in cell:
            classes[k].decat_class_id = cid
    rank_one = [BipartiteGraph([(1, "s")], []), BipartiteGraph([(1, "t")], [])]
    return ClassificationReport(n, classes, decat, rank_one)


# ---------------------------------------------------------------------------
# SVD witness
# ---------------------------------------------------------------------------

@dataclass
class SVDWitness:
    uw: np.ndarray  # U W*, acts on the s-vertices
    vx: np.ndarray  # V X*, acts on the t-vertices
    singular_values: np.ndarray
    residual_s: float
    residual_t: float

    @property
    def residual(self) -> float:
        return max(self.residual_s, self.residual_t)


def _gauged_svd(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    u, sig, vh = np.linalg.svd(a)
    v = vh.conj().T
    for k in range(u.shape[1]):
        col = u[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]].real < 0:
            u[:, k] = -col
            if k < v.shape[1] and k < len(sig):
                v[:, k] = -v[:, k]
    for k in range(len(sig), v.shape[1]):
        col = v[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]].real < 0:
            v[:, k] = -col
    return u, sig, v


def theta_numeric(g: BipartiteGraph, color: str, two: float = 2.0) -> np.ndarray:
    """[Theta_color] in the s-then-t vertex basis with [2]_v replaced by the number two."""
    a = g.block().astype(float)
    ns, nt = a.shape
    m = np.zeros((ns + nt, ns + nt))
    if color == "s":
        m[:ns, :ns] = two * np.eye(ns)
        m[:ns, ns:] = a
    else:
        m[ns:, ns:] = two * np.eye(nt)
        m[ns:, :ns] = a.T
    return m


def svd_change_of_basis(g1: BipartiteGraph, g2: BipartiteGraph) -> SVDWitness:
    if not spectrum_color_equivalent(g1, g2):
        raise PreconditionError("graphs are not spectrum-color-equivalent")
    a1, a2 = g1.block().astype(float), g2.block().astype(float)
    u, sig1, v = _gauged_svd(a1)
    w, sig2, x = _gauged_svd(a2)
    if not np.allclose(sig1, sig2, atol=1e-9):
        raise PreconditionError("singular values differ")
    if len(sig1) > 1 and np.min(np.abs(np.diff(sig1))) < 1e-9:
        warnings.warn("repeated singular values: the conjugator is not unique", RuntimeWarning)
    uw = u @ w.conj().T
    vx = v @ x.conj().T
    ns, nt = a1.shape
    p = np.block([[uw, np.zeros((ns, nt))], [np.zeros((nt, ns)), vx]])
    pinv = np.block([[uw.conj().T, np.zeros((ns, nt))], [np.zeros((nt, ns)), vx.conj().T]])
    res = []
    # the [2]_v blocks are checked with two unrelated numeric stand-ins
    for color in ("s", "t"):
        r = 0.0
        for two in (2.0, np.pi):
            lhs = pinv @ theta_numeric(g1, color, two) @ p
            r = max(r, float(np.max(np.abs(lhs - theta_numeric(g2, color, two)))))
        res.append(r)
    return SVDWitness(uw, vx, sig1, res[0], res[1])


def opposite_pairs(n: int) -> list[tuple[BipartiteGraph, BipartiteGraph]]:
    """Pairs inside one decategorification class of equivalence_classes(n)."""
    rep = equivalence_classes(n)
    out = []
    for cell in rep.decat_classes:
        for i in cell:
            for j in cell:
                if i < j:
                    out.append((rep.classes[i].graph, rep.classes[j].graph))
    return out


__all__ = ["graphs_for_coxeter", "equivalence_classes", "ClassificationReport", "ClassEntry",
           "svd_change_of_basis", "SVDWitness", "PreconditionError", "theta_numeric", "opposite_pairs",
           "coloring_tag", "opposite_coloring"]
