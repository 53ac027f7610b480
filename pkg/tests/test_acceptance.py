"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (the lines are repeated in the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import os
import random
import sys
import time
from dataclasses import dataclass, field

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from dihedral2rep import bigraph, calculus, classify, hecke  # noqa: E402
from dihedral2rep.bigraph import cycle, type_a, type_d, type_e  # noqa: E402
from dihedral2rep.bimod import check_degree, check_equivariance, theta_matrix  # noqa: E402
from dihedral2rep.scalars import FloatRing, LaurentPoly  # noqa: E402

import oracles  # noqa: E402

SUITE_CASES = [(type_a(2), 3), (type_a(3), 4), (type_a(4), 5), (type_a(5), 6), (type_d(4), 6), (type_d(5), 8)]


def case_name(g, n) -> str:
    return f"{bigraph.recognize_ade(g)}/n={n}"


@dataclass
class Outcome:
    number: int
    title: str
    budget: float
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    def check(self, name: str, ok: bool, detail=None) -> None:
        self.checks.append((name, bool(ok), detail))

    @property
    def failures(self) -> list:
        out = [f"{name}: {detail}" if detail is not None else name for name, ok, detail in self.checks if not ok]
        if self.elapsed >= self.budget:
            out.append(f"time {self.elapsed:.2f}s exceeds {self.budget}s")
        return out

    @property
    def passed(self) -> bool:
        return bool(self.checks) and not self.failures

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        head = f"criterion {self.number:2d} [{mark}] {self.title} ({self.elapsed:.2f}s, budget {self.budget}s)"
        if self.failures:
            head += " -- " + "; ".join(self.failures[:3])
        return head


CRITERIA = {}
RESULTS: dict[int, Outcome] = {}


def criterion(number: int, title: str, budget: float):
    def wrap(fn):
        CRITERIA[number] = (title, budget, fn)
        return fn
    return wrap


def run_criterion(number: int) -> Outcome:
    if number in RESULTS:
        return RESULTS[number]
    title, budget, fn = CRITERIA[number]
    out = Outcome(number, title, budget)
    start = time.perf_counter()
    fn(out)
    out.elapsed = time.perf_counter() - start
    RESULTS[number] = out
    return out


# ---------------------------------------------------------------------------

D_TABLE_ROWS = {
    1: {1: 1},
    2: {2: 1},
    3: {3: 1, 1: -1},
    4: {4: 1, 2: -2},
    5: {5: 1, 3: -3, 1: 1},
    6: {6: 1, 4: -4, 2: 3},
}


@criterion(1, "d-table reproduction", 0.1)
def c1(out: Outcome):
    table = hecke.d_table(6)
    for l, row in D_TABLE_ROWS.items():
        out.check(f"row {l}", table.row(l) == row, table.row(l))
    out.check("no other entries", len(table.entries) == sum(len(r) for r in D_TABLE_ROWS.values()))


def _lp_matrix(rows):
    two = hecke.quantum_integer_v(2)
    return [[two if x == "[2]" else LaurentPoly.const(x) for x in row] for row in rows]


A3_S = [["[2]", 0, 1], [0, "[2]", 1], [0, 0, 0]]
A3_T = [[0, 0, 0], [0, 0, 0], [1, 1, "[2]"]]
AT3_S = [["[2]", 0, 1, 1], [0, "[2]", 1, 1], [0, 0, 0, 0], [0, 0, 0, 0]]
AT3_T = [[0, 0, 0, 0], [0, 0, 0, 0], [1, 1, "[2]", 0], [1, 1, 0, "[2]"]]


def _h4_residual(ms, mt):
    """Theta_s Theta_t Theta_s Theta_t - 2 Theta_s Theta_t - (same with s, t swapped), by dict arithmetic."""
    st = oracles.lmat_mul(ms, mt)
    ts = oracles.lmat_mul(mt, ms)
    lhs = oracles.lmat_add(oracles.lmat_mul(st, st), oracles.lmat_scale(st, 2), -1)
    rhs = oracles.lmat_add(oracles.lmat_mul(ts, ts), oracles.lmat_scale(ts, 2), -1)
    return oracles.lmat_add(lhs, rhs, -1)


@criterion(2, "Theta matrices of A3 and affine A3, H4 relation", 0.1)
def c2(out: Outcome):
    a3, at3 = type_a(3), cycle(4)
    out.check("A3 basis order P1, P3, P2", a3.order == [1, 3, 2])
    out.check("affine A3 basis order 0, 2, 1, 3", at3.order == [1, 3, 2, 4])
    for name, g, printed_s, printed_t in (("A3", a3, A3_S, A3_T), ("affine A3", at3, AT3_S, AT3_T)):
        ms, mt = theta_matrix(g, "s"), theta_matrix(g, "t")
        out.check(f"{name} Theta_s", ms == _lp_matrix(printed_s))
        out.check(f"{name} Theta_t", mt == _lp_matrix(printed_t))
        residual = _h4_residual(oracles.lmat_from(printed_s), oracles.lmat_from(printed_t))
        nonzero = any(p for row in residual for p in row)
        impl = hecke.verify_bs_relations(ms, mt, 4)["longest_element"].passed
        if name == "A3":
            out.check("H4 relation holds on A3 (oracle)", not nonzero)
            out.check("H4 relation holds on A3", impl)
        else:
            out.check("H4 relation fails on affine A3 (oracle)", nonzero)
            out.check("H4 relation fails on affine A3", not impl)
    out.check("coefficient -2 is d(2, 4)", hecke.d_table(4)(2, 4) == -2)


@criterion(3, "Hecke descent for ADE graphs, failure for cycles", 5.0)
def c3(out: Outcome):
    for n in range(3, 31):
        for g in classify.graphs_for_coxeter(n):
            rep = hecke.verify_bs_relations(theta_matrix(g, "s"), theta_matrix(g, "t"), n)
            if not rep.passed:
                out.check(f"{bigraph.recognize_ade(g)} at n={n}", False)
    out.check("all ADE graphs descend", True)
    for length in (4, 6):
        g = cycle(length)
        ms, mt = theta_matrix(g, "s"), theta_matrix(g, "t")
        holds = [n for n in range(2, 13) if hecke.verify_bs_relations(ms, mt, n).passed]
        out.check(f"{length}-cycle fails for every n <= 12", not holds, holds or None)


@criterion(4, "spectra of A, D, E", 1.0)
def c4(out: Outcome):
    cases = ([("A", m, type_a) for m in range(1, 10)] + [("D", m, type_d) for m in range(4, 7)]
             + [("E", m, type_e) for m in (6, 7, 8)])
    for family, rank, builder in cases:
        roots = bigraph.char_poly_roots(builder(rank))
        expected = oracles.ade_spectrum(family, rank)
        err = max(abs(a - b) for a, b in zip(roots, expected))
        out.check(f"{family}{rank}", len(roots) == len(expected) and err <= 1e-9, f"{err:.2e}")


@criterion(5, "table weightings satisfy BF2, sign flips do not", 1.0)
def c5(out: Outcome):
    graphs = [type_a(m) for m in range(2, 8)] + [type_d(m) for m in (4, 5, 6)] + [type_e(m) for m in (6, 7, 8)]
    for g in graphs:
        w = calculus.weighting_table_ade(g)
        name = str(bigraph.recognize_ade(g))
        out.check(f"{name} table", calculus.check_bf2(g, w))
        flips = [v for v in g.order if calculus.check_bf2(g, w.flipped(v))]
        out.check(f"{name} sign flips fail", not flips, flips or None)


@criterion(6, "relation suite on A2..A5, D4, D5", 60.0)
def c6(out: Outcome):
    for g, n in SUITE_CASES:
        rep = calculus.relation_suite(g, calculus.weighting_table_ade(g), n)
        bad = [c.name for c in rep.checks if not c.passed]
        out.check(case_name(g, n), not bad, bad[:3] or None)
        groups = {c.name.split("[")[0].split(" ")[0] for c in rep.checks}
        need = {"EH", "Fr1", "Fr2", "Ne", "BF1", "BF2", "zigzag", "2nv1", "2nv2", "2nv3"}
        out.check(f"{case_name(g, n)} covers all relation groups", need <= groups, sorted(need - groups) or None)


@criterion(7, "JW_n vanishes, JW_(n-1) does not; rank two cancellation", 120.0)
def c7(out: Outcome):
    for g, n in SUITE_CASES:
        rep = calculus.jw_checks(g, calculus.weighting_table_ade(g), n)
        bad = [c.name for c in rep.checks if not c.passed]
        out.check(case_name(g, n), not bad, bad or None)
    g = type_a(2)
    w = calculus.weighting_table_ade(g)
    R = calculus.Realization(g, w, 3)
    lam1, lam2 = w[1], w[2]
    for outer, scalar, label in (("s", lam2 / lam1, "lambda1^-1 lambda2"), ("t", lam1 / lam2, "lambda1 lambda2^-1")):
        gadget = R.gadget(outer)
        ident = R.identity(gadget.source.word)
        out.check(f"gadget[{outer}] = {label} * ID", gadget.equals(ident.scale(scalar)))
        # second summand of JW_3 is ([1]/[2]) * gadget and cancels the identity summand
        coef = w.ring.quantum_integer(1) / w.ring.quantum_integer(2)
        out.check(f"JW_3[{outer}] summands cancel", (ident + gadget.scale(coef)).is_zero())
    out.check("lambda1^-1 lambda2 = -1", lam2 / lam1 == -w.ring.one())


@criterion(8, "hexagon and star graphs", 10.0)
def c8(out: Outcome):
    hexagon = cycle(6)
    signed = {v: LaurentPoly.const(1 if hexagon.colors[v] == "s" else -1) for v in hexagon.order}
    cond = calculus.bf2_condition(hexagon, signed)
    out.check("hexagon condition is (q - 1)^2", [c / cond[-1] for c in cond] == [1, -2, 1], cond)
    out.check("hexagon admissible q = {1}", calculus.admissible_q(hexagon, signed) == [1])
    ring = FloatRing(1.0, 1e-9)
    w = calculus.Weighting(ring, {v: float(c.eval_at_one()) for v, c in signed.items()})
    rep = calculus.relation_suite(hexagon, w, None)
    bad = [c.name for c in rep.checks if not c.passed]
    out.check("hexagon n=inf relations at q=1 (float)", not bad, bad[:3] or None)
    star = bigraph.BipartiteGraph(
        [(1, "s")] + [(v, "t") for v in (2, 4, 6, 8)] + [(v, "s") for v in (3, 5, 7, 9)],
        [(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7), (1, 8), (8, 9)])
    alpha, q, pf = calculus.weighting_pf(star)
    out.check("star alpha = sqrt 5", abs(alpha - math.sqrt(5)) <= 1e-9, alpha)
    out.check("star q = (1 - sqrt 5)/2", abs(q - (1 - math.sqrt(5)) / 2) <= 1e-9, q)
    out.check("star PF weighting satisfies BF2", calculus.check_bf2(star, pf))
    two, three = hecke.quantum_integer_v(2), hecke.quantum_integer_v(3)
    depth = {1: three, 2: -two, 4: -two, 6: -two, 8: -two, 3: LaurentPoly.const(1), 5: LaurentPoly.const(1),
             7: LaurentPoly.const(1), 9: LaurentPoly.const(1)}
    roots = calculus.admissible_q(star, depth)
    phi = (1 + math.sqrt(5)) / 2
    expected = [phi, 1 - phi, -phi, phi - 1]
    out.check("star admissible q = +-(1 +- sqrt 5)/2",
              len(roots) == 4 and all(min(abs(r - e) for r in roots) <= 1e-9 for e in expected), roots)
    out.check("PF q lies on the (1 +- sqrt 5)/2 branch", min(abs(q - e) for e in expected[:2]) <= 1e-9)


EXPECTED_COUNTS = {**{n: 1 for n in (3, 5, 7, 9)}, 2: 2, 4: 2, **{n: 4 for n in (6, 8, 10, 14, 16, 20)},
                   **{n: 6 for n in (12, 18, 30)}}


@criterion(9, "classification counts and decategorification classes", 5.0)
def c9(out: Outcome):
    for n, count in sorted(EXPECTED_COUNTS.items()):
        rep = classify.equivalence_classes(n)
        out.check(f"n={n}: {count} classes", len(rep.classes) == count, len(rep.classes))
    for n in range(2, 31):
        rep = classify.equivalence_classes(n)
        for cell in rep.decat_classes:
            if len(cell) < 2:
                continue
            names = {str(rep.classes[k].ade) for k in cell}
            ok = (n, names) in ((12, {"E6"}), (30, {"E8"}))
            if not ok:
                graphs = [rep.classes[k].graph for k in cell]
                ok = all(bigraph.opposite_coloring(graphs[0]) == h or
                         bigraph.is_isomorphic_bipartite(bigraph.opposite_coloring(graphs[0]), h)
                         for h in graphs[1:])
            out.check(f"n={n}: merged cell {sorted(names)}", ok)
    out.check("E6 pair merged", len(classify.equivalence_classes(12).decat_classes) == 5)
    out.check("E8 pair merged", len(classify.equivalence_classes(30).decat_classes) == 5)
    out.check("E7 pair not merged", len(classify.equivalence_classes(18).decat_classes) == 6)


@criterion(10, "SVD witness for the E6 pair", 1.0)
def c10(out: Outcome):
    (g1, g2), = classify.opposite_pairs(12)
    w = classify.svd_change_of_basis(g1, g2)
    out.check("residual Theta_s <= 1e-9", w.residual_s <= 1e-9, w.residual_s)
    out.check("residual Theta_t <= 1e-9", w.residual_t <= 1e-9, w.residual_t)
    a1, a2 = g1.block().astype(float), g2.block().astype(float)
    dist, mismatches, _ = oracles.best_printed_match(a1, a2, oracles.PRINTED_E6_UW)
    out.check("UW* equals the printed matrix up to sign/permutation gauge", dist <= 1e-9,
              f"closest gauge representative differs in {mismatches} entry, max deviation {dist:.3f}")


@criterion(11, "coinvariant descent", 10.0)
def c11(out: Outcome):
    for g, n in SUITE_CASES:
        res = calculus.coinvariant_checks(g, calculus.weighting_table_ade(g), n)
        bad = [c.name for c in res.report.checks if not c.passed]
        out.check(case_name(g, n), not bad, bad or None)
        names = {c.name for c in res.report.checks}
        out.check(f"{case_name(g, n)} intermediate identity checked",
                  "(2b_s+[2]b_t) s(2b_s+[2]b_t) -> 0" in names)


@criterion(12, "scaling invariance", 30.0)
def c12(out: Outcome):
    for g, n in SUITE_CASES[:2]:
        w = calculus.weighting_table_ade(g)
        q = w.q
        for label, (tau, ups) in (("(2,1)", (2, 1)), ("(1,2)", (1, 2)), ("(q,q^-1)", (q, 1 / q))):
            sc = calculus.scaled_assignment(tau, ups)
            rep = calculus.relation_suite(g, w, n, scaling=sc)
            bad = [c.name for c in rep.checks if not c.passed]
            out.check(f"{case_name(g, n)} {label}", not bad, bad[:3] or None)


@criterion(13, "equivariance fuzzing", 60.0)
def c13(out: Outcome):
    for g, n in SUITE_CASES:
        rng = random.Random(1000 + n + len(g))
        R = calculus.Realization(g, calculus.weighting_table_ade(g), n)
        failures = []
        for k in range(200):
            d = calculus.random_diagram(rng)
            f = R.evaluate(d)
            ok, msg = check_equivariance(f)
            boundary = (f.source.word, f.target.word, f.degree) == (d.source, d.target, d.degree)
            if not (ok and boundary and check_degree(f) is None):
                failures.append((k, msg))
        out.check(f"{case_name(g, n)}: 200 diagrams", not failures, failures[:2] or None)


# ---------------------------------------------------------------------------
# pytest entry points
# ---------------------------------------------------------------------------

PRINTED_MATRIX_REASON = ("the printed UW* is not orthogonal (rows 1 and 2 have inner product 2/3); "
                         "the closest member of the gauge class differs from it only in the sign of entry (2,3)")


@pytest.mark.parametrize("number", [
    *range(1, 10),
    pytest.param(10, marks=pytest.mark.xfail(strict=True, reason=PRINTED_MATRIX_REASON)),
    *range(11, 14),
])
def test_criterion(number):
    out = run_criterion(number)
    print(out.line())
    assert out.passed, out.line()


def test_criterion_10_residuals():
    """The attainable part of criterion 10 (conjugation residuals) is gated on its own."""
    out = run_criterion(10)
    residuals = [c for c in out.checks if c[0].startswith("residual")]
    assert residuals and all(ok for _, ok, _ in residuals)
    assert out.elapsed < out.budget


def test_criterion_10_printed_matrix_diagnostic():
    """Document exactly how the printed matrix deviates from the computed gauge class."""
    (g1, g2), = classify.opposite_pairs(12)
    a1, a2 = g1.block().astype(float), g2.block().astype(float)
    printed = oracles.PRINTED_E6_UW
    assert abs(printed[0] @ printed[1] - 2 / 3) < 1e-12
    dist, mismatches, cand = oracles.best_printed_match(a1, a2, printed)
    assert mismatches == 1
    diff = np.argwhere(np.abs(cand - printed) > 1e-9)
    assert diff.tolist() == [[1, 2]]
    assert abs(cand[1, 2] + printed[1, 2]) < 1e-12


def main() -> int:
    ok = True
    for number in sorted(CRITERIA):
        out = run_criterion(number)
        print(out.line())
        ok &= out.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
