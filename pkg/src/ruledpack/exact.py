"""Exact numbers: rationals (``fractions.Fraction``) and real quadratic surds.

A :class:`QuadExt` holds ``a + b*sqrt(d)`` with rational ``a, b`` and a
squarefree integer radicand ``d``.  Values whose radicand is a rational square
collapse to the rational case, so every comparison can be decided exactly.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

__all__ = [
    "QuadExt",
    "UnsupportedRadicandMix",
    "as_fraction",
    "ceil_exact",
    "floor_exact",
    "format_number",
    "parse_number",
    "qx_compare",
    "qx_sign",
    "sqrt_of",
    "to_qx",
]


class UnsupportedRadicandMix(ArithmeticError):
    """Raised when a result would need two independent square roots."""


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _rational_sqrt(q: Fraction):
    """Return sqrt(q) as a Fraction if q is a rational square, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


_SMALL_PRIMES_LIMIT = 100_000


def _split_square(n: int):
    """Write n = s*s*r with r squarefree (best effort above the trial bound)."""
    s, r = 1, 1
    m = n
    f = 2
    while f * f <= m and f <= _SMALL_PRIMES_LIMIT:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                r *= f
        f += 1 if f == 2 else 2
    # leftover: prime, square of a prime, or an unfactored composite
    t = math.isqrt(m)
    if t * t == m:
        s *= t
    else:
        r *= m
    return s, r


def _sign_surd(a: Fraction, b: Fraction, d: int) -> int:
    """Exact sign of a + b*sqrt(d), d >= 0."""
    sa, sb = _sign(a), _sign(b)
    if sb == 0 or d == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    lhs, rhs = a * a, b * b * d
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def _sign_two_surds(a, b, d, e, f) -> int:
    """Exact sign of a + b*sqrt(d) + e*sqrt(f) using at most two squarings."""
    sx = _sign_surd(a, b, d)
    sy = _sign(e) if f else 0
    if sy == 0:
        return sx
    if sx == 0 or sx == sy:
        return sy
    # opposite signs: compare X^2 with e^2 f, where X = a + b sqrt(d)
    diff = _sign_surd(a * a + b * b * d - e * e * f, 2 * a * b, d)
    if diff > 0:
        return sx
    if diff < 0:
        return sy
    return 0


class QuadExt:
    """Immutable real number ``a + b*sqrt(d)`` with rational a, b."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=0):
        a = Fraction(a)
        b = Fraction(b)
        d = Fraction(d)
        if d < 0:
            raise ValueError("negative radicand")
        if b == 0 or d == 0:
            b, rad = Fraction(0), 0
        else:
            root = _rational_sqrt(d)
            if root is not None:
                a, b, rad = a + b * root, Fraction(0), 0
            else:
                # sqrt(p/q) = sqrt(p*q)/q, then pull squares out of p*q
                num = d.numerator * d.denominator
                s, rad = _split_square(num)
                b = b * s / d.denominator
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", rad)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    # construction helpers
    @classmethod
    def sqrt(cls, q) -> "QuadExt":
        return cls(0, 1, q)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def rational(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return self.a

    # arithmetic -------------------------------------------------------
    def _common(self, other: "QuadExt"):
        """Return (b1, b2, d) expressing both surd parts over one radicand."""
        if other.b == 0 or self.d == other.d:
            return self.b, other.b, self.d
        if self.b == 0:
            return self.b, other.b, other.d
        prod = self.d * other.d
        t = math.isqrt(prod)
        if t * t == prod:
            # sqrt(d2) = t/d1 * sqrt(d1)
            return self.b, other.b * Fraction(t, self.d), self.d
        raise UnsupportedRadicandMix(f"sqrt({self.d}) and sqrt({other.d})")

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        b1, b2, d = self._common(other)
        return QuadExt(self.a + other.a, b1 + b2, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if qx_sign(self) < 0 else self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        b1, b2, d = self._common(other)
        return QuadExt(self.a * other.a + b1 * b2 * d, self.a * b2 + b1 * other.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.b == 0:
            if other.a == 0:
                raise ZeroDivisionError("QuadExt division by zero")
            return QuadExt(self.a / other.a, self.b / other.a, self.d)
        n = other.norm()
        return self * other.conjugate() * QuadExt(1 / n)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return QuadExt(1) / self ** (-e)
        out = QuadExt(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sqrt_exact(self) -> "QuadExt":
        """Square root inside the same field; ValueError if it leaves it."""
        return sqrt_of(self)

    # ordering ---------------------------------------------------------
    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError
        return qx_compare(self, other)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return qx_compare(self, other) == 0

    def __lt__(self, other):
        if _coerce(other) is NotImplemented:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if _coerce(other) is NotImplemented:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if _coerce(other) is NotImplemented:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if _coerce(other) is NotImplemented:
            return NotImplemented
        return self._cmp(other) >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __floor__(self):
        return floor_exact(self)

    def __ceil__(self):
        return ceil_exact(self)

    def __repr__(self):
        return f"QuadExt({format_number(self)!r})"

    def __str__(self):
        return format_number(self)


def _coerce(x):
    if isinstance(x, QuadExt):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadExt(x)
    return NotImplemented


def to_qx(x) -> QuadExt:
    out = _coerce(x)
    if out is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to QuadExt")
    return out


def as_fraction(x) -> Fraction:
    """Return x as a Fraction; raises ValueError for irrational surds."""
    if isinstance(x, QuadExt):
        return x.rational()
    return Fraction(x)


def qx_sign(x) -> int:
    x = to_qx(x)
    return _sign_surd(x.a, x.b, x.d)


def qx_compare(x, y) -> int:
    """-1, 0 or 1 according to the real order of x and y."""
    x, y = to_qx(x), to_qx(y)
    try:
        diff = x - y
    except UnsupportedRadicandMix:
        return _sign_two_surds(x.a - y.a, x.b, x.d, -y.b, y.d)
    return _sign_surd(diff.a, diff.b, diff.d)


def sqrt_of(x) -> QuadExt:
    """Exact square root of a nonnegative rational or denestable surd.

    For a rational argument the result is ``sqrt(q)``.  For ``a + b*sqrt(d)``
    the root is returned only when it lies in the same quadratic field.
    """
    x = to_qx(x)
    if qx_sign(x) < 0:
        raise ValueError("square root of a negative number")
    if x.b == 0:
        return QuadExt.sqrt(x.a)
    # (u + v sqrt d)^2 = u^2 + v^2 d + 2uv sqrt d
    n = _rational_sqrt(x.norm())
    if n is not None:
        for u2 in ((x.a + n) / 2, (x.a - n) / 2):
            u = _rational_sqrt(u2)
            if u:
                v = x.b / (2 * u)
                root = QuadExt(u, v, x.d)
                if qx_sign(root) < 0:
                    root = -root
                if root * root == x:
                    return root
    raise ValueError(f"sqrt({x}) is not in Q(sqrt({x.d}))")


def floor_exact(x) -> int:
    x = to_qx(x)
    if x.b == 0:
        return math.floor(x.a)
    m = math.floor(float(x))
    while qx_compare(QuadExt(m), x) > 0:
        m -= 1
    while qx_compare(QuadExt(m + 1), x) <= 0:
        m += 1
    return m


def ceil_exact(x) -> int:
    return -floor_exact(-to_qx(x))


# text format ----------------------------------------------------------------

def format_number(x) -> str:
    """Canonical text: "p/q", "n", or "(A+B*sqrt(D))/Q" with integers."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if x.b == 0:
        return str(x.a)
    q = math.lcm(x.a.denominator, x.b.denominator)
    A = int(x.a * q)
    B = int(x.b * q)
    op = "+" if B >= 0 else "-"
    return f"({A}{op}{abs(B)}*sqrt({x.d}))/{q}"


_RAT = r"[+-]?\d+(?:/\d+)?"
_SURD_RE = re.compile(
    r"^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+(?:/\d+)?)\s*\)\s*\)\s*/\s*(\d+)$"
)
_SQRT_RE = re.compile(r"^([+-]?)(?:(\d+(?:/\d+)?)\*)?sqrt\(\s*(\d+(?:/\d+)?)\s*\)$")


def parse_number(text: str):
    """Parse a Fraction or QuadExt from its text form.

    Rationals come back as ``Fraction``; surds as ``QuadExt``.  Besides the
    canonical surd form, ``sqrt(q)`` and ``b*sqrt(q)`` are accepted.
    """
    s = text.strip()
    if re.fullmatch(_RAT, s):
        return Fraction(s)
    m = _SURD_RE.match(s)
    if m:
        a, op, b, d, q = m.groups()
        b = Fraction(b) if op == "+" else -Fraction(b)
        val = QuadExt(Fraction(a) / int(q), b / int(q), Fraction(d))
        return val.a if val.is_rational else val
    m = _SQRT_RE.match(s)
    if m:
        sgn, coef, d = m.groups()
        b = Fraction(coef) if coef else Fraction(1)
        val = QuadExt(0, -b if sgn == "-" else b, Fraction(d))
        return val.a if val.is_rational else val
    if re.fullmatch(r"[+-]?\d*\.\d+|[+-]?\d+\.\d*", s):
        # decimal literals are exact decimal fractions
        return Fraction(s)
    raise ValueError(f"cannot parse exact number: {text!r}")
