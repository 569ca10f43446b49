"""Exact arithmetic in a formal variable q.

LaurentPoly is an integer Laurent polynomial in q, QRat a reduced quotient of
two of them. Both are immutable and hashable. q is never given a numeric value
except through ``QRat.at`` which evaluates at an exact rational point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd
from typing import Iterable, Sequence


def _trim(coeffs: Sequence[int], min_exp: int) -> tuple[int, tuple[int, ...]]:
    lo, hi = 0, len(coeffs)
    while lo < hi and coeffs[lo] == 0:
        lo += 1
    while hi > lo and coeffs[hi - 1] == 0:
        hi -= 1
    if lo == hi:
        return 0, ()
    return min_exp + lo, tuple(coeffs[lo:hi])


class LaurentPoly:
    """sum_i coeffs[i] * q**(min_exp + i), stored trimmed."""

    __slots__ = ("min_exp", "coeffs", "_hash")

    def __init__(self, coeffs: Iterable[int] = (), min_exp: int = 0):
        self.min_exp, self.coeffs = _trim(list(coeffs), min_exp)
        self._hash = None

    @classmethod
    def _raw(cls, min_exp: int, coeffs: tuple[int, ...]) -> "LaurentPoly":
        # caller guarantees trimming
        p = object.__new__(cls)
        p.min_exp, p.coeffs, p._hash = min_exp, coeffs, None
        return p

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls._raw(0, (c,)) if c else ZERO_POLY

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "LaurentPoly":
        return cls._raw(k, (c,)) if c else ZERO_POLY

    # basic queries

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def max_exp(self) -> int:
        return self.min_exp + len(self.coeffs) - 1

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.min_exp == other.min_exp and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.min_exp, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({list(self.coeffs)}, min_exp={self.min_exp})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c}*q^{self.min_exp + i}")
        return " + ".join(parts)

    # ring operations

    def __neg__(self):
        return LaurentPoly._raw(self.min_exp, tuple(-c for c in self.coeffs))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        lo = min(self.min_exp, other.min_exp)
        hi = max(self.max_exp, other.max_exp)
        out = [0] * (hi - lo + 1)
        off = self.min_exp - lo
        for i, c in enumerate(self.coeffs):
            out[off + i] = c
        off = other.min_exp - lo
        for i, c in enumerate(other.coeffs):
            out[off + i] += c
        return LaurentPoly(out, lo)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZERO_POLY
        if len(a) == 1:
            c = a[0]
            return LaurentPoly._raw(self.min_exp + other.min_exp, tuple(c * x for x in b))
        if len(b) == 1:
            c = b[0]
            return LaurentPoly._raw(self.min_exp + other.min_exp, tuple(c * x for x in a))
        return LaurentPoly._raw(self.min_exp + other.min_exp, tuple(_pmul(a, b)))

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q**k."""
        if not self.coeffs or k == 0:
            return self
        return LaurentPoly._raw(self.min_exp + k, self.coeffs)

    def scale(self, c: int) -> "LaurentPoly":
        if c == 0:
            return ZERO_POLY
        return LaurentPoly._raw(self.min_exp, tuple(c * x for x in self.coeffs))

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient self/other; raises ArithmeticError if it is not a Laurent polynomial."""
        if not other.coeffs:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.coeffs:
            return ZERO_POLY
        q = _pdiv_exact(self.coeffs, other.coeffs)
        if q is None:
            raise ArithmeticError("inexact Laurent polynomial division")
        return LaurentPoly(q, self.min_exp - other.min_exp)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = igcd(g, c)
        return g

    def evaluate(self, x):
        """Evaluate at x (Fraction, int or float)."""
        if not self.coeffs:
            return 0 * x
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * x ** self.min_exp

    def to_json(self) -> dict:
        return {"min_exp": self.min_exp, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentPoly":
        coeffs = [int(c) for c in obj["coeffs"]]
        p = cls(coeffs, int(obj["min_exp"]))
        if p.coeffs != tuple(coeffs) or (not coeffs and obj["min_exp"] != 0):
            raise ValueError("LaurentPoly JSON is not in trimmed form")
        return p


ZERO_POLY = LaurentPoly._raw(0, ())
ONE_POLY = LaurentPoly._raw(0, (1,))


def _pmul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, y in enumerate(b):
        if y:
            for i, x in enumerate(a):
                out[i + j] += x * y
    return out


def _pdiv_exact(a: Sequence[int], b: Sequence[int]):
    """Exact quotient of ordinary integer polynomials (low to high), or None."""
    n, m = len(a), len(b)
    if n < m:
        return None
    rem = list(a)
    lead = b[-1]
    q = [0] * (n - m + 1)
    for k in range(n - m, -1, -1):
        c = rem[k + m - 1]
        if c:
            t, r = divmod(c, lead)
            if r:
                return None
            q[k] = t
            for i in range(m):
                rem[k + i] -= t * b[i]
    if any(rem[: m - 1]):
        return None
    return q


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of a by b (low to high)."""
    rem = list(a)
    lead = b[-1]
    m = len(b)
    while len(rem) >= m and rem:
        c = rem[-1]
        shift = len(rem) - m
        rem = [lead * x for x in rem]
        for i in range(m):
            rem[shift + i] -= c * b[i]
        while rem and rem[-1] == 0:
            rem.pop()
    return rem


def _primitive(p: list[int]) -> list[int]:
    g = 0
    for c in p:
        g = igcd(g, c)
    if p[-1] < 0:
        g = -g
    return [c // g for c in p]


@lru_cache(maxsize=1 << 16)
def _poly_gcd(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """gcd in Z[q] of ordinary polynomials with nonzero constant terms."""
    ca = cb = 0
    for c in a:
        ca = igcd(ca, c)
    for c in b:
        cb = igcd(cb, c)
    cont = igcd(ca, cb)
    x, y = _primitive(list(a)), _primitive(list(b))
    if len(x) < len(y):
        x, y = y, x
    while len(y) > 1:
        r = _prem(x, y)
        if not r:
            x = y
            break
        x, y = y, _primitive(r)
    else:
        if y and len(y) == 1:
            return (cont,)
    return tuple(cont * c for c in _primitive(x))


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """gcd up to units q**k; result has min_exp 0 and positive leading coefficient."""
    if a.is_zero():
        return b.shift(-b.min_exp) if not b.is_zero() else ZERO_POLY
    if b.is_zero():
        return a.shift(-a.min_exp)
    if len(a.coeffs) == 1 or len(b.coeffs) == 1:
        return LaurentPoly.const(igcd(a.content(), b.content()))
    return LaurentPoly(_poly_gcd(a.coeffs, b.coeffs), 0)


class QRat:
    """Reduced quotient num/den of Laurent polynomials.

    Canonical form: gcd(num, den) = 1, den.min_exp = 0 and the lowest
    coefficient of den is positive.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        if isinstance(num, int):
            num = LaurentPoly.const(num)
        if den is None:
            den = ONE_POLY
        elif isinstance(den, int):
            den = LaurentPoly.const(den)
        n, d = _normalize(num, den)
        self.num, self.den, self._hash = n, d, None

    @classmethod
    def _raw(cls, num: LaurentPoly, den: LaurentPoly) -> "QRat":
        r = object.__new__(cls)
        r.num, r.den, r._hash = num, den, None
        return r

    @classmethod
    def poly(cls, p: LaurentPoly) -> "QRat":
        return cls._raw(p, ONE_POLY)

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "QRat":
        return cls._raw(LaurentPoly.monomial(k, c), ONE_POLY)

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def __bool__(self):
        return bool(self.num.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = QRat(other)
        if not isinstance(other, QRat):
            return NotImplemented
        # canonical forms are unique, cross-multiplication is the fallback
        if self.num == other.num and self.den == other.den:
            return True
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        if self.den == ONE_POLY:
            return f"QRat({self.num})"
        return f"QRat(({self.num}) / ({self.den}))"

    def __neg__(self):
        return QRat._raw(-self.num, self.den)

    def __add__(self, other):
        if isinstance(other, int):
            other = QRat(other)
        if not other.num.coeffs:
            return self
        if not self.num.coeffs:
            return other
        if self.den == other.den:
            if self.den == ONE_POLY:
                return QRat._raw(self.num + other.num, ONE_POLY)
            return QRat(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g == ONE_POLY:
            return QRat(self.num * other.den + other.num * self.den, self.den * other.den)
        da, db = self.den.exact_div(g), other.den.exact_div(g)
        return QRat(self.num * db + other.num * da, da * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = QRat(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return ZERO
            return QRat(self.num.scale(other), self.den)
        if isinstance(other, LaurentPoly):
            other = QRat.poly(other)
        if not self.num.coeffs or not other.num.coeffs:
            return ZERO
        a, b = self, other
        if a.den == ONE_POLY and b.den == ONE_POLY:
            return QRat._raw(a.num * b.num, ONE_POLY)
        # cross-cancel so the product stays reduced
        g1 = poly_gcd(a.num, b.den)
        g2 = poly_gcd(b.num, a.den)
        n1 = a.num.exact_div(g1) if g1 != ONE_POLY else a.num
        d2 = b.den.exact_div(g1) if g1 != ONE_POLY else b.den
        n2 = b.num.exact_div(g2) if g2 != ONE_POLY else b.num
        d1 = a.den.exact_div(g2) if g2 != ONE_POLY else a.den
        return QRat._fix_unit(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "QRat":
        if not self.num.coeffs:
            raise ZeroDivisionError("division by zero QRat")
        return QRat._fix_unit(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = QRat(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "QRat":
        """Multiply by q**k."""
        return QRat._raw(self.num.shift(k), self.den)

    @staticmethod
    def _fix_unit(num: LaurentPoly, den: LaurentPoly) -> "QRat":
        # num/den coprime already; only move q-powers and sign into num
        if not num.coeffs:
            return ZERO
        k = den.min_exp
        if den.coeffs[0] < 0:
            num, den = -num, -den
        return QRat._raw(num.shift(-k), den.shift(-k))

    def at(self, x) -> Fraction:
        """Specialize q to the exact value x."""
        x = Fraction(x)
        d = self.den.evaluate(x)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at this specialization")
        return Fraction(self.num.evaluate(x)) / d

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "QRat":
        num = LaurentPoly.from_json(obj["num"])
        den = LaurentPoly.from_json(obj["den"])
        r = cls(num, den)
        if r.num != num or r.den != den:
            raise ValueError("QRat JSON is not canonical")
        return r


def _normalize(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if not den.coeffs:
        raise ZeroDivisionError("zero denominator")
    if not num.coeffs:
        return ZERO_POLY, ONE_POLY
    g = poly_gcd(num, den)
    if g != ONE_POLY:
        num, den = num.exact_div(g), den.exact_div(g)
    k = den.min_exp
    if den.coeffs[0] < 0:
        num, den = -num, -den
    return num.shift(-k), den.shift(-k)


ZERO = QRat._raw(ZERO_POLY, ONE_POLY)
ONE = QRat._raw(ONE_POLY, ONE_POLY)
Q = QRat.monomial(1)


def qsum(terms: Iterable[QRat]) -> QRat:
    """Sum many QRats, adding numerators over shared denominators first."""
    groups: dict[LaurentPoly, LaurentPoly] = {}
    for t in terms:
        if t.num.coeffs:
            groups[t.den] = groups.get(t.den, ZERO_POLY) + t.num
    out = ZERO
    for den, num in groups.items():
        if num.coeffs:
            out = out + QRat(num, den)
    return out


@lru_cache(maxsize=None)
def qnum(m: int) -> QRat:
    """q-integer (q^m - q^-m)/(q - q^-1), by exact division."""
    if m == 0:
        return ZERO
    top = LaurentPoly.monomial(m) - LaurentPoly.monomial(-m)
    bot = LaurentPoly.monomial(1) - LaurentPoly.monomial(-1)
    return QRat.poly(top.exact_div(bot))


@lru_cache(maxsize=None)
def qfact(n: int) -> QRat:
    if n < 0:
        raise ValueError("q-factorial of a negative integer")
    out = ONE
    for k in range(2, n + 1):
        out = out * qnum(k)
    return out


def qbinom(n: int, k: int) -> QRat:
    if k < 0 or k > n:
        return ZERO
    return qfact(n) / (qfact(k) * qfact(n - k))


def parse_qrat(text: str) -> QRat:
    """Read a QRat from its JSON text."""
    import json

    return QRat.from_json(json.loads(text))
