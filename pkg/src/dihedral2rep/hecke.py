"""Dihedral words, the d-coefficient table and Hecke relation checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .scalars import LaurentPoly, quantum_integer_v

COLORS = ("s", "t")
INFINITY = "inf"


def other(color: str) -> str:
    if color not in COLORS:
        raise ValueError(f"unknown color {color!r}")
    return "t" if color == "s" else "s"


def alternating(length: int, rightmost: str) -> tuple[str, ...]:
    """Alternating word of the given length ending (on the right) in ``rightmost``."""
    word = []
    c = rightmost
    for _ in range(length):
        word.append(c)
        c = other(c)
    return tuple(reversed(word))


@dataclass(frozen=True, order=True)
class DihedralWord:
    rightmost: str
    length: int

    def __post_init__(self):
        if self.rightmost not in COLORS:
            raise ValueError(f"unknown color {self.rightmost!r}")
        if self.length < 0:
            raise ValueError("length must be non-negative")

    @property
    def letters(self) -> tuple[str, ...]:
        return alternating(self.length, self.rightmost)

    def __str__(self):
        return "".join(self.letters) or "∅"


@dataclass
class DTable:
    lmax: int
    entries: dict[tuple[int, int], int] = field(default_factory=dict)

    def __call__(self, k: int, l: int) -> int:
        return self.entries.get((k, l), 0)

    def row(self, l: int) -> dict[int, int]:
        return {k: c for (k, ll), c in self.entries.items() if ll == l and c}


def d_table(lmax: int) -> DTable:
    """Coefficients d(k, l) with d(1,1) = 1 and d(k,l) = d(k-1,l-1) - d(k,l-2)."""
    if lmax < 1:
        raise ValueError("lmax must be positive")
    t: dict[tuple[int, int], int] = {(1, 1): 1}
    for l in range(2, lmax + 1):
        for k in range(1, l + 1):
            val = t.get((k - 1, l - 1), 0) - t.get((k, l - 2), 0)
            if val:
                t[(k, l)] = val
    return DTable(lmax, t)


@dataclass
class BSExpansion:
    terms: dict[DihedralWord, int]

    def __str__(self):
        parts = [f"{c:+d}*{w}" for w, c in sorted(self.terms.items(), key=lambda x: -x[0].length)]
        return " ".join(parts)


def kl_in_bs(l: int, rightmost: str) -> BSExpansion:
    """Kazhdan-Lusztig element of the alternating word of length l in the Bott-Samelson basis."""
    if l < 1:
        raise ValueError("l must be positive")
    dt = d_table(l)
    return BSExpansion({DihedralWord(rightmost, k): c for k, c in dt.row(l).items()})


def chebyshev(k: int) -> list[int]:
    """Normalized Chebyshev polynomial U~_k (coefficients, lowest degree first)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    prev, cur = [1], [0, 1]
    if k == 0:
        return prev
    for _ in range(k - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


# ---------------------------------------------------------------------------
# matrices over Laurent polynomials
# ---------------------------------------------------------------------------

Matrix = list[list[LaurentPoly]]
_ZERO = LaurentPoly()  # shared; LaurentPoly values are never mutated


def mat_zero(n: int, m: int | None = None) -> Matrix:
    return [[LaurentPoly() for _ in range(n if m is None else m)] for _ in range(n)]


def mat_identity(n: int) -> Matrix:
    out = mat_zero(n)
    for i in range(n):
        out[i][i] = LaurentPoly.const(1)
    return out


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Row-sparse product accumulating raw coefficient dictionaries."""
    m = len(b[0]) if b else 0
    b_rows = [[(j, x.coeffs) for j, x in enumerate(row) if x] for row in b]
    out = []
    for row in a:
        acc: dict[int, dict[int, int]] = {}
        for r, x in enumerate(row):
            if not x:
                continue
            xc = x.coeffs.items()
            for j, yc in b_rows[r]:
                d = acc.setdefault(j, {})
                for e1, c1 in xc:
                    for e2, c2 in yc.items():
                        d[e1 + e2] = d.get(e1 + e2, 0) + c1 * c2
        out.append([LaurentPoly(acc[j]) if j in acc else _ZERO for j in range(m)])
    return out


def mat_add(a: Matrix, b: Matrix, scale: LaurentPoly | int = 1) -> Matrix:
    return [[x + y * scale if y else x for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def first_difference(a: Matrix, b: Matrix):
    for i, (ra, rb) in enumerate(zip(a, b)):
        for j, (x, y) in enumerate(zip(ra, rb)):
            if x != y:
                return (i, j, str(x), str(y))
    return None


def alternating_product(ms: Matrix, mt: Matrix, length: int, rightmost: str) -> Matrix:
    """Matrix of the alternating word (leftmost factor first in the product)."""
    size = len(ms)
    out = mat_identity(size)
    for c in alternating(length, rightmost):
        out = mat_mul(out, ms if c == "s" else mt)
    return out


def kl_matrix(ms: Matrix, mt: Matrix, l: int, rightmost: str) -> Matrix:
    """sum_k d(k,l) * M(alternating word of length k) for the given rightmost color.

    Words with a fixed rightmost letter are built by prepending letters, so the
    products are accumulated with one multiplication per length.
    """
    size = len(ms)
    row = d_table(l).row(l)
    out = mat_zero(size)
    prod = mat_identity(size)
    for k in range(1, l + 1):
        letter = alternating(k, rightmost)[0]
        prod = mat_mul(ms if letter == "s" else mt, prod)
        c = row.get(k)
        if c:
            out = mat_add(out, prod, c)
    return out


@dataclass
class Check:
    name: str
    passed: bool
    detail: object = None


@dataclass
class Report:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify_bs_relations(ms: Matrix, mt: Matrix, n) -> Report:
    """Check the quadratic relations and, for finite n, the dihedral braid-type relation."""
    size = len(ms)
    if len(mt) != size or any(len(r) != size for r in ms) or any(len(r) != size for r in mt):
        raise ValueError("theta matrices must be square of equal shape")
    two = quantum_integer_v(2)
    checks = []
    for name, m in (("quadratic_s", ms), ("quadratic_t", mt)):
        lhs = mat_mul(m, m)
        rhs = mat_scale(m, two)
        diff = first_difference(lhs, rhs)
        checks.append(Check(name, diff is None, diff))
    if n != INFINITY and n is not None:
        lhs = kl_matrix(ms, mt, int(n), "s")
        rhs = kl_matrix(ms, mt, int(n), "t")
        diff = first_difference(lhs, rhs)
        checks.append(Check("longest_element", diff is None, diff))
    return Report(checks)


def laurent_matrix_to_strings(m: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in m]


def integer_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[x if isinstance(x, LaurentPoly) else LaurentPoly.const(int(x)) for x in r] for r in rows]
