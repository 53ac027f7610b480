"""Independent reference computations used to freeze derived values.

Nothing here calls into the package's own arithmetic: Laurent polynomials are
plain ``{exponent: coefficient}`` dicts and linear algebra goes through numpy.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# ---------------------------------------------------------------------------
# Laurent polynomials as dicts
# ---------------------------------------------------------------------------

def lp_clean(p: dict) -> dict:
    return {e: c for e, c in p.items() if c}


def lp_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + sign * c
    return lp_clean(out)


def lp_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return lp_clean(out)


TWO_V = {1: 1, -1: 1}


def lmat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    out = [[{} for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc: dict = {}
            for r in range(k):
                acc = lp_add(acc, lp_mul(a[i][r], b[r][j]))
            out[i][j] = acc
    return out


def lmat_add(a, b, sign: int = 1):
    return [[lp_add(x, y, sign) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def lmat_scale(a, c: int):
    return [[lp_clean({e: c * x for e, x in p.items()}) for p in row] for row in a]


def lmat_from(rows):
    """Rows of ints or the marker '[2]' as Laurent dict matrices."""
    return [[dict(TWO_V) if x == "[2]" else lp_clean({0: x}) for x in row] for row in rows]


# ---------------------------------------------------------------------------
# Hecke algebra of the infinite dihedral group in the standard basis
# ---------------------------------------------------------------------------
# T_s^2 = (v^-2 - 1) T_s + v^-2, theta_s = v (T_s + 1); elements are
# {reduced word: Laurent dict}, words written left to right.

def _left_mul_T(letter: str, elt: dict) -> dict:
    out: dict = {}

    def put(word, coeff):
        out[word] = lp_add(out.get(word, {}), coeff)

    for word, c in elt.items():
        if word and word[0] == letter:
            put(word, lp_mul({-2: 1, 0: -1}, c))
            put(word[1:], lp_mul({-2: 1}, c))
        else:
            put((letter,) + word, c)
    return {w: c for w, c in out.items() if c}


def _left_mul_theta(letter: str, elt: dict) -> dict:
    t_part = _left_mul_T(letter, elt)
    out = dict(t_part)
    for w, c in elt.items():
        out[w] = lp_add(out.get(w, {}), c)
    return {w: lp_mul({1: 1}, c) for w, c in out.items() if c}


def _alt(length: int, rightmost: str) -> tuple:
    other = {"s": "t", "t": "s"}
    word = []
    c = rightmost
    for _ in range(length):
        word.append(c)
        c = other[c]
    return tuple(reversed(word))


def bott_samelson(length: int, rightmost: str) -> dict:
    elt = {(): {0: 1}}
    for letter in reversed(_alt(length, rightmost)):
        elt = _left_mul_theta(letter, elt)
    return elt


def kazhdan_lusztig(length: int, rightmost: str) -> dict:
    """v^l(w) times the sum of T_y over y <= w (all Kazhdan-Lusztig polynomials are 1)."""
    w = _alt(length, rightmost)
    out = {w: {length: 1}}
    for k in range(length):
        for c in ("s", "t"):
            out[_alt(k, c)] = {length: 1}
    return out


def d_table_oracle(lmax: int) -> dict[tuple[int, int], int]:
    """Expand each KL element in Bott-Samelson products by triangular elimination."""
    table = {}
    for l in range(1, lmax + 1):
        rest = kazhdan_lusztig(l, "s")
        for k in range(l, 0, -1):
            w = _alt(k, "s")
            lead = rest.get(w, {})
            if not lead:
                continue
            # the leading coefficient of a Bott-Samelson product of length k is v^k
            assert set(lead) == {k}, (l, k, lead)
            c = lead[k]
            table[(k, l)] = c
            bs = bott_samelson(k, "s")
            for word, coeff in bs.items():
                rest[word] = lp_add(rest.get(word, {}), coeff, -c)
            rest = {x: y for x, y in rest.items() if y}
        assert not rest, (l, rest)
    return table


# ---------------------------------------------------------------------------
# spectra, weightings, SVD
# ---------------------------------------------------------------------------

def ade_spectrum(family: str, rank: int) -> list[float]:
    if family == "A":
        h, ks, extra = rank + 1, list(range(1, rank + 1)), []
    elif family == "D":
        h, ks, extra = 2 * rank - 2, list(range(1, 2 * rank - 2, 2)), [0.0]
    else:
        h = {6: 12, 7: 18, 8: 30}[rank]
        ks = {6: [1, 4, 5, 7, 8, 11], 7: [1, 5, 7, 9, 11, 13, 17], 8: [1, 7, 11, 13, 17, 19, 23, 29]}[rank]
        extra = []
    return sorted([2 * math.cos(k * math.pi / h) for k in ks] + extra)


def bf2_numeric_residual(adjacency: np.ndarray, weights: np.ndarray, q: complex) -> float:
    """max |A lambda + [2]_q lambda|."""
    two = q + 1 / q
    return float(np.max(np.abs(adjacency @ weights + two * weights)))


PRINTED_E6_UW = (1 / (2 * math.sqrt(6))) * np.array([
    [math.sqrt(6) - 2, -math.sqrt(6) - 2, 2],
    [-2, -2, 4],
    [-math.sqrt(6) - 2, math.sqrt(6) - 2, 2],
])


def svd_gauge_class(a1: np.ndarray, a2: np.ndarray):
    """Every sum of eps_k u_k w_k^T over sign choices eps (distinct singular values assumed)."""
    u, s1, _ = np.linalg.svd(a1)
    w, s2, _ = np.linalg.svd(a2)
    assert np.allclose(s1, s2)
    for eps in itertools.product((1, -1), repeat=u.shape[1]):
        yield eps, sum(e * np.outer(u[:, k], w[:, k]) for k, e in enumerate(eps))


def best_printed_match(a1: np.ndarray, a2: np.ndarray, printed: np.ndarray):
    """Smallest max-norm distance from the gauge class (including row/column relabelings) to printed.

    Returns (distance, number of mismatching entries at the best candidate, candidate).
    """
    n1, n2 = printed.shape
    best = None
    for eps, m in svd_gauge_class(a1, a2):
        for pr in itertools.permutations(range(n1)):
            for pc in itertools.permutations(range(n2)):
                cand = m[np.ix_(pr, pc)]
                diff = np.abs(cand - printed)
                key = (int(np.sum(diff > 1e-9)), float(np.max(diff)))
                if best is None or key < best[0]:
                    best = (key, cand)
    (count, dist), cand = best
    return dist, count, cand
