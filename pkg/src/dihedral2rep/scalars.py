"""Exact coefficient rings.

Three kinds of scalars are used throughout the package:

* rationals, via :class:`fractions.Fraction`;
* integer Laurent polynomials in ``v`` (:class:`LaurentPoly`), the ground ring
  of the decategorified Hecke modules;
* the cyclotomic field Q(q) with q a primitive 2n-th root of unity
  (:class:`CyclotomicField`, :class:`CyclotomicNumber`).

A floating point stand-in (:class:`FloatRing`) offers the same small interface
as :class:`CyclotomicField` so that evaluation code can run on graphs whose
weights are not cyclotomic.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

Rational = Fraction


# ---------------------------------------------------------------------------
# dense polynomial helpers (coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------

def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Division with remainder over the rationals (exact for monic integer b)."""
    a = [Fraction(x) for x in a]
    _trim(a)
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b):
        c = a[-1] / lead
        shift = len(a) - len(b)
        quot[shift] = c
        for i, y in enumerate(b):
            a[shift + i] -= c * y
        a.pop()
        _trim(a)
    return _trim(quot), a


def poly_gcd(a: Sequence, b: Sequence) -> list:
    """Monic gcd over the rationals."""
    a = _trim([Fraction(x) for x in a])
    b = _trim([Fraction(x) for x in b])
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [x / lead for x in a]


def poly_to_str(p: Sequence, var: str = "x") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and c == 1:
            s = mono
        elif mono and c == -1:
            s = "-" + mono
        else:
            s = f"{c}{mono}" if not mono else f"{c}*{mono}"
        terms.append(s)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


@lru_cache(maxsize=None)
def _cyclotomic(m: int) -> tuple[int, ...]:
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            q, r = poly_divmod(num, _cyclotomic(d))
            assert not r
            num = q
    return tuple(int(c) for c in num)


def cyclotomic_polynomial(m: int) -> list[int]:
    """Coefficients (lowest degree first) of the m-th cyclotomic polynomial."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return list(_cyclotomic(m))


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------

class LaurentPoly:
    """Integer Laurent polynomial, stored as ``{exponent: coefficient}``."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: dict[int, int] | None = None):
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if c}
        self._hash = None

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, e: int, c: int = 1) -> "LaurentPoly":
        return cls({e: c})

    @staticmethod
    def _coerce(x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int):
            return LaurentPoly({0: x})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = LaurentPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    def eval_at_one(self) -> int:
        return sum(self.coeffs.values())

    def evaluate(self, x):
        return sum(c * x ** e for e, c in self.coeffs.items())

    def min_degree(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    def max_degree(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def numerator(self) -> list[int]:
        """Ordinary polynomial x^(-min_degree) * self, lowest degree first."""
        if not self.coeffs:
            return []
        lo = self.min_degree()
        out = [0] * (self.max_degree() - lo + 1)
        for e, c in self.coeffs.items():
            out[e - lo] = c
        return out

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            mono = "" if e == 0 else ("v" if e == 1 else f"v^{e}")
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{mono}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"LaurentPoly({self})"

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Inverse of ``str``: accepts sums of terms like ``2v^-3``, ``-v``, ``5``."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls()
        if s[0] not in "+-":
            s = "+" + s
        out: dict[int, int] = {}
        i = 0
        while i < len(s):
            sign = -1 if s[i] == "-" else 1
            j = i + 1
            while j < len(s) and not (s[j] in "+-" and s[j - 1] != "^"):
                j += 1
            term = s[i + 1:j]
            if "v" in term:
                c, _, e = term.partition("v")
                coef = int(c) if c else 1
                exp = int(e[1:]) if e else 1
            else:
                coef, exp = int(term), 0
            out[exp] = out.get(exp, 0) + sign * coef
            i = j
        return cls(out)


def quantum_integer_v(k: int) -> LaurentPoly:
    """[k]_v = v^(k-1) + v^(k-3) + ... + v^(1-k); [0]_v = 0, [-k]_v = -[k]_v."""
    if k < 0:
        return -quantum_integer_v(-k)
    return LaurentPoly({k - 1 - 2 * a: 1 for a in range(k)})


# ---------------------------------------------------------------------------
# cyclotomic field
# ---------------------------------------------------------------------------

class CyclotomicField:
    """Q(q) with q a primitive 2n-th root of unity, realized as Q[x]/Phi_2n."""

    _instances: dict[int, "CyclotomicField"] = {}

    def __new__(cls, n: int):
        if n < 1:
            raise ValueError("n must be a positive integer")
        inst = cls._instances.get(n)
        if inst is None:
            inst = super().__new__(cls)
            inst._setup(n)
            cls._instances[n] = inst
        return inst

    def _setup(self, n: int) -> None:
        self.n = n
        self.modulus = tuple(cyclotomic_polynomial(2 * n))
        self.degree = len(self.modulus) - 1
        d = self.degree
        # x^k mod Phi for d <= k <= 2d - 2, used by multiplication
        red = []
        cur_high = list(-c for c in self.modulus[:d])  # x^d
        for _ in range(max(d - 1, 0)):
            red.append(tuple(cur_high))
            top = cur_high[-1]
            nxt = [0] + cur_high[:-1]
            if top:
                for j in range(d):
                    nxt[j] -= top * self.modulus[j]
            cur_high = nxt
        self._reductions = red
        self._powers = []
        for k in range(2 * n):
            self._powers.append(self._x_power(k))

    def _x_power(self, k: int) -> "CyclotomicNumber":
        vec = [0] * (k + 1)
        vec[k] = 1
        return CyclotomicNumber._from_int_poly(self, vec, 1)

    def __reduce__(self):
        return (CyclotomicField, (self.n,))

    def __repr__(self):
        return f"CyclotomicField(n={self.n})"

    # constructors -----------------------------------------------------------
    def zero(self) -> "CyclotomicNumber":
        return CyclotomicNumber(self, (0,) * self.degree, 1)

    def one(self) -> "CyclotomicNumber":
        return self.from_rational(1)

    def from_rational(self, r) -> "CyclotomicNumber":
        r = Fraction(r)
        return CyclotomicNumber(self, (r.numerator,) + (0,) * (self.degree - 1), r.denominator)

    def from_coeffs(self, coeffs: Iterable) -> "CyclotomicNumber":
        """Element sum c_k q^k for an arbitrary-length rational coefficient list."""
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return CyclotomicNumber._from_int_poly(self, [int(c * den) for c in fr], den)

    def gen(self) -> "CyclotomicNumber":
        return self.q_power(1)

    def q_power(self, k: int) -> "CyclotomicNumber":
        return self._powers[k % (2 * self.n)]

    def quantum_integer(self, k: int) -> "CyclotomicNumber":
        return quantum_integer_q(self, k)

    def embed(self, x: "CyclotomicNumber") -> complex:
        return embed_complex(x)

    def is_zero(self, x) -> bool:
        return not x

    def coerce(self, x) -> "CyclotomicNumber":
        if isinstance(x, CyclotomicNumber):
            if x.field is not self:
                raise ValueError("elements of different cyclotomic fields")
            return x
        return self.from_rational(x)


class CyclotomicNumber:
    """Element of Q(q) stored as integer numerators over a common denominator."""

    __slots__ = ("field", "nums", "den", "_hash")

    def __init__(self, field: CyclotomicField, nums: tuple, den: int):
        self.field = field
        self.nums = nums
        self.den = den
        self._hash = None

    @classmethod
    def _from_int_poly(cls, field: CyclotomicField, poly: list, den: int) -> "CyclotomicNumber":
        d = field.degree
        poly = list(poly)
        if len(poly) > d:
            mod = field.modulus
            for k in range(len(poly) - 1, d - 1, -1):
                c = poly[k]
                if c:
                    base = k - d
                    for j in range(d):
                        poly[base + j] -= c * mod[j]
            poly = poly[:d]
        elif len(poly) < d:
            poly = poly + [0] * (d - len(poly))
        return cls._normalized(field, poly, den)

    @classmethod
    def _normalized(cls, field, nums: list, den: int) -> "CyclotomicNumber":
        if den < 0:
            nums = [-c for c in nums]
            den = -den
        g = den
        for c in nums:
            if c:
                g = math.gcd(g, c)
                if g == 1:
                    break
        if not any(nums):
            return cls(field, tuple([0] * len(nums)), 1)
        if g != 1:
            nums = [c // g for c in nums]
            den //= g
        return cls(field, tuple(nums), den)

    # coercion ---------------------------------------------------------------
    def _other(self, other):
        if isinstance(other, CyclotomicNumber):
            if other.field is not self.field:
                raise ValueError("elements of different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return None

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.nums)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return CyclotomicNumber._normalized(
                self.field, [a + b for a, b in zip(self.nums, o.nums)], self.den)
        return CyclotomicNumber._normalized(
            self.field, [a * o.den + b * self.den for a, b in zip(self.nums, o.nums)],
            self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.field, tuple(-c for c in self.nums), self.den)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicNumber._normalized(self.field, [c * other for c in self.nums], self.den)
        o = self._other(other)
        if o is None:
            return NotImplemented
        d = self.field.degree
        a, b = self.nums, o.nums
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        low = prod[:d]
        for k, c in enumerate(prod[d:]):
            if c:
                r = self.field._reductions[k]
                for j in range(d):
                    low[j] += c * r[j]
        return CyclotomicNumber._normalized(self.field, low, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        return invert(self)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * invert(o)

    def __rtruediv__(self, other):
        return self._other(other) * invert(self)

    def __pow__(self, k: int):
        if k < 0:
            return invert(self) ** (-k)
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return any(self.nums)

    def __eq__(self, other):
        o = self._other(other) if not isinstance(other, CyclotomicNumber) else other
        if o is None:
            return NotImplemented
        return self.field is o.field and self.den == o.den and self.nums == o.nums

    def __hash__(self):
        if self._hash is None:
            if not any(self.nums[1:]):
                self._hash = hash(Fraction(self.nums[0], self.den))
            else:
                self._hash = hash((self.field.n, self.nums, self.den))
        return self._hash

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def __complex__(self):
        return embed_complex(self)

    def __str__(self):
        return poly_to_str(self.coeffs, "q")

    def __repr__(self):
        return f"CyclotomicNumber(n={self.field.n}, {self})"


def invert(x: CyclotomicNumber) -> CyclotomicNumber:
    """Multiplicative inverse via the extended Euclidean algorithm against Phi_2n."""
    if not x:
        raise ZeroDivisionError("inverse of zero in a cyclotomic field")
    field = x.field
    r0, r1 = [Fraction(c) for c in field.modulus], _trim(list(x.coeffs))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        quo, rem = poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, poly_sub(s0, poly_mul(quo, s1))
    # r1 is a nonzero constant since Phi_2n is irreducible
    c = r1[0]
    return field.from_coeffs([a / c for a in s1])


def quantum_integer_q(field: CyclotomicField, k: int) -> CyclotomicNumber:
    """[k]_q = q^(k-1) + q^(k-3) + ... + q^(1-k) in Q(q); [0]_q = 0."""
    if k < 0:
        return -quantum_integer_q(field, -k)
    out = field.zero()
    for a in range(k):
        out = out + field.q_power(k - 1 - 2 * a)
    return out


def embed_complex(x: CyclotomicNumber) -> complex:
    """Image of x under q -> exp(i pi / n)."""
    n = x.field.n
    z = 0j
    for k, c in enumerate(x.nums):
        if c:
            z += c * cmath.exp(1j * math.pi * k / n)
    return z / x.den


# ---------------------------------------------------------------------------
# floating point stand-in
# ---------------------------------------------------------------------------

class FloatRing:
    """Complex double scalars with a chosen value of q.

    Offers the same constructor helpers as :class:`CyclotomicField`; equality is
    decided up to ``tol``.
    """

    def __init__(self, q: complex, tol: float = 1e-9):
        if q == 0:
            raise ValueError("q must be nonzero")
        self.q = complex(q)
        self.tol = tol
        self.n = None

    def __repr__(self):
        return f"FloatRing(q={self.q})"

    def zero(self) -> complex:
        return 0j

    def one(self) -> complex:
        return 1 + 0j

    def from_rational(self, r) -> complex:
        return complex(Fraction(r))

    def from_coeffs(self, coeffs: Iterable) -> complex:
        return sum(complex(Fraction(c)) * self.q ** k for k, c in enumerate(coeffs))

    def gen(self) -> complex:
        return self.q

    def q_power(self, k: int) -> complex:
        return self.q ** k

    def quantum_integer(self, k: int) -> complex:
        if k < 0:
            return -self.quantum_integer(-k)
        return sum((self.q ** (k - 1 - 2 * a) for a in range(k)), 0j)

    def embed(self, x) -> complex:
        return complex(x)

    def is_zero(self, x) -> bool:
        return abs(x) <= self.tol

    def coerce(self, x) -> complex:
        if isinstance(x, CyclotomicNumber):
            return embed_complex(x)
        return complex(Fraction(x)) if isinstance(x, (int, Fraction)) else complex(x)
