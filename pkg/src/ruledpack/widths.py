"""Closed-form k-ball widths, packing numbers, stability numbers and obstructions.

Widths are returned as QuadExt.  Each piece of a width function records which
exceptional class (if any) cuts it out; volume pieces carry no class.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact import QuadExt, ceil_exact, qx_compare, sqrt_of, to_qx
from .lattice import HClass, exceptional, canonical, pairing, k_pairing, self_intersection
from .recurrence import INFINITY, engine, interval_index, lambda_of
from .reducer import Bundle, BundleSpec, ball_vector

F = Fraction


# ---------------------------------------------------------------------------
# formulas and pieces

@dataclass(frozen=True)
class Constant:
    value: Fraction

    def __call__(self, b, k, mu):
        return to_qx(self.value)

    def describe(self):
        return {"kind": "constant", "value": str(self.value)}


@dataclass(frozen=True)
class Linear:
    slope: Fraction
    intercept: Fraction

    def __call__(self, b, k, mu):
        return to_qx(mu) * self.slope + self.intercept

    def describe(self):
        return {"kind": "linear", "slope": str(self.slope), "intercept": str(self.intercept)}


@dataclass(frozen=True)
class VolumeBound:
    def __call__(self, b, k, mu):
        return volume_bound(b.kind, k, mu)

    def describe(self):
        return {"kind": "volume"}


@dataclass(frozen=True)
class Accumulating:
    """Infinitely many linear pieces accumulating at one end; evaluated lazily."""

    def __call__(self, b, k, mu):
        return width_at(BundleSpec(b.kind, mu), k)

    def describe(self):
        return {"kind": "accumulating"}


@dataclass(frozen=True)
class WidthPiece:
    lo: object            # QuadExt endpoint
    hi: object            # QuadExt endpoint or None for +infinity
    lo_closed: bool
    hi_closed: bool
    formula: object
    tag: str = ""

    def contains(self, mu) -> bool:
        c = qx_compare(mu, self.lo)
        if c < 0 or (c == 0 and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        c = qx_compare(mu, self.hi)
        return c < 0 or (c == 0 and self.hi_closed)

    def to_json(self):
        return {
            "muLo": str(self.lo),
            "muHi": "inf" if self.hi is None else str(self.hi),
            "loClosed": self.lo_closed,
            "hiClosed": self.hi_closed,
            "formula": self.formula.describe(),
            "tag": self.tag,
        }


@dataclass
class WidthProfile:
    kind: Bundle
    k: int
    pieces: list

    def piece_for(self, mu) -> WidthPiece:
        for pc in self.pieces:
            if pc.contains(mu):
                return pc
        raise ValueError(f"mu={mu} outside the profile")

    def value(self, mu):
        b = _spec_any(self.kind, mu)
        return self.piece_for(mu).formula(b, self.k, mu)

    def to_json(self):
        return {"bundle": self.kind.value, "k": self.k, "pieces": [p.to_json() for p in self.pieces]}


class _AnySpec:
    """BundleSpec stand-in that accepts QuadExt mu (breakpoint evaluation)."""

    def __init__(self, kind, mu):
        self.kind = Bundle(kind)
        self.mu = mu


def _spec_any(kind, mu):
    return _AnySpec(kind, mu)


# ---------------------------------------------------------------------------
# basic quantities

def volume(kind, mu):
    return mu if Bundle(kind) is Bundle.TRIVIAL else mu + F(1, 2)


def volume_bound(kind, k: int, mu) -> QuadExt:
    """Capacity at which k equal balls fill the volume exactly."""
    return sqrt_of(to_qx(volume(kind, to_qx(mu))) * F(2, k))


def _check_domain(b: BundleSpec, k: int):
    if k < 1:
        raise ValueError("k must be positive")


@dataclass
class Located:
    value: QuadExt
    tag: str
    classes: list = field(default_factory=list)

    @property
    def is_volume(self) -> bool:
        return not self.classes


def _tail(*blocks):
    out = []
    for value, count in blocks:
        out.extend([value] * count)
    return out


def fiber_class(k_tail: int) -> HClass:
    return HClass(1, _tail((1, 2), (0, k_tail - 2)))


# ---------------------------------------------------------------------------
# k <= 7: piecewise-linear tables, as (lo, hi, lo_closed, hi_closed, slope, intercept)

_SMALL_TRIVIAL = {
    1: [(1, None, True, False, 0, 1)],
    2: [(1, None, True, False, 0, 1)],
    3: [(1, 2, True, False, F(1, 3), F(1, 3)), (2, None, True, False, 0, 1)],
    4: [(1, 2, True, False, F(1, 3), F(1, 3)), (2, None, True, False, 0, 1)],
    5: [(1, 3, True, False, F(1, 5), F(2, 5)), (3, None, True, False, 0, 1)],
    6: [(1, F(4, 3), True, False, F(2, 7), F(2, 7)),
        (F(4, 3), 3, True, False, F(1, 5), F(2, 5)),
        (3, None, True, False, 0, 1)],
    7: [(1, F(8, 7), True, False, F(4, 15), F(4, 15)),
        (F(8, 7), F(11, 8), True, False, F(3, 13), F(4, 13)),
        (F(11, 8), 4, True, False, F(1, 7), F(3, 7)),
        (4, None, True, False, 0, 1)],
}

_SMALL_TWISTED = {
    1: [(0, None, False, False, 0, 1)],
    2: [(0, 1, False, False, F(1, 2), F(1, 2)), (1, None, True, False, 0, 1)],
    3: [(0, 1, False, False, F(1, 2), F(1, 2)), (1, None, True, False, 0, 1)],
    4: [(0, 2, False, False, F(1, 4), F(1, 2)), (2, None, True, False, 0, 1)],
    5: [(0, F(2, 3), False, True, F(2, 5), F(2, 5)),
        (F(2, 3), 2, False, True, F(1, 4), F(1, 2)),
        (2, None, False, False, 0, 1)],
    6: [(0, F(1, 4), False, True, F(2, 5), F(2, 5)),
        (F(1, 4), F(3, 5), False, True, F(2, 7), F(3, 7)),
        (F(3, 5), 3, False, True, F(1, 6), F(1, 2)),
        (3, None, False, False, 0, 1)],
    7: [(0, F(1, 7), False, True, F(3, 8), F(3, 8)),
        (F(1, 7), F(3, 8), False, True, F(4, 13), F(5, 13)),
        (F(3, 8), F(6, 11), False, True, F(4, 15), F(6, 15)),
        (F(6, 11), F(3, 2), False, True, F(3, 14), F(6, 14)),
        (F(3, 2), 3, False, True, F(1, 6), F(1, 2)),
        (3, None, False, False, 0, 1)],
}

# exceptional classes of the blow-up at up to 8 points, up to tail permutation
EXCEPTIONAL_TYPES = [
    (0, [-1]),
    (1, [1, 1]),
    (2, [1] * 5),
    (3, [2] + [1] * 6),
    (4, [2] * 3 + [1] * 5),
    (5, [2] * 6 + [1] * 2),
    (6, [3] + [2] * 7),
]


def _small_table(kind, k):
    return (_SMALL_TRIVIAL if Bundle(kind) is Bundle.TRIVIAL else _SMALL_TWISTED)[k]


def _block_layout(kind, k):
    """Tail slots of the ball vector: (special slot indices, c-block indices)."""
    n_tail = max(k + 1, 3)
    if Bundle(kind) is Bundle.TRIVIAL:
        special = [0, k]
        block = list(range(1, k))
    else:
        special = [0]
        block = list(range(1, k + 1))
    pad = list(range(k + 1, n_tail))
    return n_tail, special, block, pad


def exceptional_representatives(kind, k: int) -> list:
    """Exceptional classes of the listed types, one per orbit of the c-block.

    Entries inside the block of equal balls are kept nonincreasing, so every
    class that differs only by permuting equal balls appears once.
    """
    n_tail, special, block, pad = _block_layout(kind, k)
    real = special + block
    seen = set()
    out = []
    for a0, entries in EXCEPTIONAL_TYPES:
        if len(entries) > len(real):
            continue
        multiset = entries + [0] * (len(real) - len(entries))
        for pick in set(itertools.permutations(multiset, len(special))):
            rest = list(multiset)
            for x in pick:
                rest.remove(x)
            rest.sort(reverse=True)
            tail = [0] * n_tail
            for idx, x in zip(special, pick):
                tail[idx] = x
            for idx, x in zip(block, rest):
                tail[idx] = x
            key = (a0, tuple(tail))
            if key not in seen:
                seen.add(key)
                out.append(HClass(a0, tail))
    return out


def _class_bound(b, k, E):
    """Largest c with pairing(ball_vector(c), E) >= 0, or None if no bound."""
    v0 = pairing(ball_vector(b, k, F(1, 2)), E)
    v1 = pairing(ball_vector(b, k, F(1)), E)
    slope = (v1 - v0) * 2
    at0 = v0 - slope / 2
    if slope >= 0:
        return None
    return at0 / -slope


def brute_force_width(b: BundleSpec, k: int):
    """min over listed exceptional classes (and the volume) of the capacity bound.

    Independent of the piecewise tables; valid for k <= 7.
    Returns (width, binding classes).
    """
    best = volume_bound(b.kind, k, b.mu)
    binding = []
    for E in exceptional_representatives(b.kind, k):
        c = _class_bound(b, k, E)
        if c is None:
            continue
        cmp = qx_compare(c, best)
        if cmp < 0:
            best, binding = to_qx(c), [E]
        elif cmp == 0:
            binding.append(E)
    return best, binding


def _quadratic_roots(A, B, C) -> list:
    """Real roots of A x^2 + B x + C with rational coefficients, as QuadExt."""
    if A == 0:
        return [] if B == 0 else [to_qx(-C / B)]
    D = B * B - 4 * A * C
    if D < 0:
        return []
    D = F(D)
    root = _rat_sqrt(D)
    if root is not None:
        return sorted({to_qx((-B + root) / (2 * A)), to_qx((-B - root) / (2 * A))})
    q = D.denominator
    # sqrt(D) = sqrt(num * q) / q
    return [QuadExt(-B / (2 * A), sg / (2 * A * q), D.numerator * q) for sg in (1, -1)]


def derive_small_full_packings(kind) -> set:
    """(mu, k) with k <= 7 where k balls fill the volume, from the class list alone.

    Each class bound c(mu) is linear in mu; a full packing needs some bound
    to touch the volume curve, so the candidates are the roots of
    c(mu)^2 = 2 vol(mu)/k.  Each candidate is then confirmed by the brute-force
    width.
    """
    kind = Bundle(kind)
    found = set()
    delta = F(0) if kind is Bundle.TRIVIAL else F(1, 2)
    for k in range(1, 8):
        for E in exceptional_representatives(kind, k):
            c0 = _class_bound(_AnySpec(kind, F(0)), k, E)
            if c0 is None:
                continue
            s = _class_bound(_AnySpec(kind, F(1)), k, E) - c0
            for mu in _quadratic_roots(s * s, 2 * c0 * s - F(2, k), c0 * c0 - 2 * delta / k):
                if (kind is Bundle.TRIVIAL and mu < 1) or mu <= 0:
                    continue
                b = _AnySpec(kind, mu)
                if brute_force_width(b, k)[0] == volume_bound(kind, k, mu):
                    found.add((mu.a if mu.is_rational else mu, k))
    return found


# ---------------------------------------------------------------------------
# k >= 8 obstruction templates (tail order matches ball_vector)

def trivial_odd_class(p: int) -> HClass:
    return HClass(p, _tail((p - 1, 1), (1, 2 * p), (0, 1)))


def trivial_even_class(p: int, n: int) -> HClass:
    eng = engine(p)
    a1, a0 = eng.a(n), eng.a(n - 1)
    x = eng.x(n)
    assert x.denominator == 1
    x = int(x)
    d = a1 + a0 - x
    z = a1 - x
    y = x - (-1) ** n
    t = a0 - x
    return HClass(d, _tail((z, 1), (y, 1), (x, 2 * p - 2), (t, 1)))


def twisted_odd_middle_class(p: int) -> HClass:
    return HClass(p * (p - 1), _tail((p * (p - 2), 1), (p - 1, 2 * p + 1)))


def twisted_upper_class(p: int, k: int) -> HClass:
    """(p; p-1, 1^(2p)) padded with zeros to k+1 tail slots."""
    return HClass(p, _tail((p - 1, 1), (1, 2 * p), (0, k - 2 * p)))


def e8_family(tag: str, n: int) -> HClass:
    """The three families of exceptional classes cutting out the 8-ball width."""
    tag = tag.upper()
    if tag == "I":
        return HClass(n * (12 * n - 1), _tail((n * (4 * n - 3), 1), (4 * n * n - 1, 1), (4 * n * n, 7)))
    if tag == "II":
        return HClass(4 * n * (3 * n + 2), _tail((4 * n * n - 1, 1), (n * (4 * n + 3), 8)))
    if tag == "III":
        m = 2 * (n + 1) * (2 * n + 1)
        return HClass((3 * n + 2) * (4 * n + 3), _tail((n * (4 * n + 3), 1), (m + 1, 1), (m, 7)))
    raise ValueError(f"unknown family {tag!r}")


def _e8_roots():
    roots = [HClass(1, (1, 1, 1, 0, 0, 0, 0, 0, 0))]
    for i in range(7):
        roots.append(_transposition(9, i))
    return roots


def _transposition(n, i):
    tail = [0] * n
    tail[i], tail[i + 1] = -1, 1
    return HClass(0, tail)


def e8_bijection(alpha) -> HClass:
    """Root-lattice vector (coordinates on the simple roots) -> exceptional class.

    T(alpha) = E9 - alpha - (alpha.alpha / 2) K.
    """
    if len(alpha) != 8:
        raise ValueError("need 8 root coordinates")
    vec = HClass(0, (0,) * 9)
    for c, r in zip(alpha, _e8_roots()):
        vec = vec + r.scale(c)
    half = pairing(vec, vec) // 2
    return exceptional(9, 8) - vec - canonical(9).scale(half)


def e8_inverse(E: HClass) -> tuple:
    """Inverse of e8_bijection: E -> E9 - E + (1 + E.E9) K in root coordinates."""
    X = exceptional(9, 8) - E + canonical(9).scale(1 + pairing(E, exceptional(9, 8)))
    x = (X.a0,) + X.tail
    c = [0] * 8
    c[0] = x[0]
    c[1] = c[0] - x[1]
    c[2] = c[0] + c[1] - x[2]
    c[3] = c[0] + c[2] - x[3]
    for j in range(4, 8):
        c[j] = c[j - 1] - x[j]
    if x[8] != c[7] or x[9] != 0:
        raise ValueError("class is not in the image of the root lattice")
    return tuple(c)


def u_functions(mu, n: int):
    mu = F(mu)
    u1 = (2 * n * (4 * n + 1) * mu + 12 * n * n - n) / F(32 * n * n - 1) if n else None
    u2 = ((8 * n * n + 8 * n + 1) * mu + 12 * n * n + 8 * n) / F(8 * n * (4 * n + 3)) if n else None
    u3 = (2 * (4 * n * n + 7 * n + 3) * mu + 12 * n * n + 17 * n + 6) / F(32 * n * n + 48 * n + 17)
    return u1, u2, u3


def s_functions(n: int):
    s1 = F(4 * n * (3 * n - 2), 24 * n * n + 8 * n + 1)
    s2 = F(4 * n * (3 * n + 2), 24 * n * n + 40 * n + 17)
    s3 = INFINITY if n == -1 else F(8 * n * n + 8 * n + 1, 16 * (n + 1) ** 2)
    return s1, s2, s3


def _s3(n):
    return s_functions(n)[2]


def full_set_points(n_max: int) -> list:
    """Points of the set where 8 balls fill the twisted bundle, for n <= n_max."""
    pts = {F(1, 2)}
    for n in range(1, n_max + 1):
        pts.add(F(8 * n * n - 8 * n + 1, 16 * n * n))
        pts.add(F(8 * n * n + 8 * n + 1, 16 * n * n))
    return sorted(pts)


def in_full_set(mu) -> bool:
    """Membership in {(8n^2 -+ 8n + 1)/(16 n^2) : n >= 1} and {1/2}."""
    mu = F(mu)
    if mu == F(1, 2):
        return True
    # (16 mu - 8) n^2 +- 8 n - 1 = 0, discriminant 32(1 + 2 mu)
    A = 16 * mu - 8
    disc = 32 * (1 + 2 * mu)
    root = _rat_sqrt(disc)
    if root is None:
        return False
    for sgn in (1, -1):
        for r in (root, -root):
            n = (-sgn * 8 + r) / (2 * A)
            if n.denominator == 1 and n >= 1 and A * n * n + sgn * 8 * n - 1 == 0:
                return True
    return False


def _rat_sqrt(q: Fraction):
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return F(a, b)
    return None


def _first_true(pred, start: int) -> int:
    """Smallest n >= start with pred(n), for a monotone predicate."""
    if pred(start):
        return start
    lo, hi = start, start + 1
    while not pred(hi):
        lo, hi = hi, hi + (hi - start + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _locate_twisted8(mu: Fraction) -> Located:
    half = F(1, 2)
    if mu == half:
        return Located(volume_bound(Bundle.TWISTED, 8, mu), "volume")
    if mu < half:
        m = _first_true(lambda j: mu <= _s3(j), 0)
        s1, s2, s3 = s_functions(m)
        if mu == s3:
            return Located(volume_bound(Bundle.TWISTED, 8, mu), "volume")
        if mu > s2:
            return _e8_piece(mu, "III", m)
        s1 = s_functions(m)[0]
        return _e8_piece(mu, "I", m) if mu <= s1 else _e8_piece(mu, "II", m)
    n = _first_true(lambda j: mu >= _s3(-(j + 1)), 1)
    if mu == _s3(-(n + 1)):
        return Located(volume_bound(Bundle.TWISTED, 8, mu), "volume")
    s1, s2, _ = s_functions(-n)
    if mu > s2:
        return _e8_piece(mu, "III", -n)
    if mu > s1:
        return _e8_piece(mu, "II", -n)
    return _e8_piece(mu, "I", -n)


def _e8_piece(mu, tag, n) -> Located:
    u1, u2, u3 = u_functions(mu, n)
    val = {"I": u1, "II": u2, "III": u3}[tag]
    return Located(to_qx(val), f"e8-family-{tag}({n})", [e8_family(tag, n)])


def twisted_odd_breakpoint(p: int) -> QuadExt:
    """Left end of the first linear piece for k = 2p+1 balls in the twisted bundle."""
    return QuadExt(F(p ** 3 - 2 * p * p + 1, p * p), F(-(p - 1), p * p), 2 * p + 1)


def _locate(b: BundleSpec, k: int) -> Located:
    mu = b.mu
    kind = b.kind
    if k <= 7:
        for lo, hi, lc, hc, slope, icpt in _small_table(kind, k):
            if WidthPiece(to_qx(lo), None if hi is None else to_qx(hi), lc, hc, None).contains(mu):
                val = to_qx(slope * mu + icpt)
                return Located(val, "small-k", [])
        raise AssertionError("small-k table has a gap")
    vol = lambda: Located(volume_bound(kind, k, mu), "volume")
    p, odd = divmod(k, 2)
    if kind is Bundle.TRIVIAL:
        if odd:
            if QuadExt(mu) < QuadExt(p + 1, -1, 2 * p + 1):
                return vol()
            if mu < p + 1:
                return Located(to_qx((mu + p) / F(2 * p + 1)), "trivial-odd-linear", [trivial_odd_class(p)])
            return Located(to_qx(1), "fiber", [fiber_class(k + 1)])
        n = interval_index(p, mu)
        if n == INFINITY:
            return vol()
        if n == 0:
            return Located(to_qx(1), "fiber", [fiber_class(k + 1)])
        return Located(to_qx(engine(p).w(n, mu)), f"trivial-even-recursive({n})", [trivial_even_class(p, n)])
    if k == 8:
        return _locate_twisted8(mu)
    if mu <= F(1, 2):
        return vol()
    if odd:
        if QuadExt(mu) < twisted_odd_breakpoint(p):
            return vol()
        if mu < F(p * (p - 1), p + 1):
            return Located(to_qx(p * (p + mu - 1) / F(2 * p * p - p - 1)), "twisted-odd-middle",
                           [twisted_odd_middle_class(p)])
        if mu < p:
            return Located(to_qx((p + mu) / F(2 * p)), "twisted-upper", [twisted_upper_class(p, k)])
        return Located(to_qx(1), "fiber", [fiber_class(k + 1)])
    if QuadExt(mu) < QuadExt(p, -1, 2 * p):
        return vol()
    if mu < p:
        return Located(to_qx((p + mu) / F(2 * p)), "twisted-upper", [twisted_upper_class(p, k)])
    return Located(to_qx(1), "fiber", [fiber_class(k + 1)])


def width_at(b: BundleSpec, k: int) -> QuadExt:
    """The k-ball width of the bundle b (capacity of each ball)."""
    _check_domain(b, k)
    return _locate(b, k).value


@dataclass
class Obstructions:
    classes: list
    reason: str      # "class" or "volume"
    tag: str = ""

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)


def obstructions(b: BundleSpec, k: int) -> Obstructions:
    """Exceptional classes cutting out the width at b.mu, each verified exactly."""
    _check_domain(b, k)
    loc = _locate(b, k)
    classes = loc.classes
    if k <= 7:
        classes = brute_force_width(b, k)[1]
    if not classes:
        return Obstructions([], "volume", loc.tag)
    w = loc.value
    for E in classes:
        _verify_obstruction(b, k, w, E)
    return Obstructions(classes, "class", loc.tag)


class ObstructionCheckFailed(AssertionError):
    pass


def _verify_obstruction(b, k, w, E):
    if self_intersection(E) != -1 or k_pairing(E) != 1:
        raise ObstructionCheckFailed(f"{E} is not exceptional")
    if pairing(ball_vector(b, k, w), E) != 0:
        raise ObstructionCheckFailed(f"{E} does not vanish at the width")


# ---------------------------------------------------------------------------
# profiles

def _q(x):
    return None if x is None else to_qx(x)


def width(kind, k: int, depth: int = 6) -> WidthProfile:
    """Piecewise description of the width as a function of mu.

    Regions holding infinitely many pieces are cut off after ``depth`` pieces
    and covered by one lazily evaluated piece.
    """
    kind = Bundle(kind)
    P = []
    vol, one = VolumeBound(), Constant(F(1))
    p, odd = divmod(k, 2)
    if k <= 7:
        for lo, hi, lc, hc, slope, icpt in _small_table(kind, k):
            f = Constant(F(icpt)) if slope == 0 else Linear(F(slope), F(icpt))
            P.append(WidthPiece(to_qx(lo), _q(hi), lc, hc, f, "small-k"))
        return WidthProfile(kind, k, P)
    if kind is Bundle.TRIVIAL and odd:
        bp = QuadExt(p + 1, -1, 2 * p + 1)
        P += [WidthPiece(to_qx(1), bp, True, False, vol, "volume"),
              WidthPiece(bp, to_qx(p + 1), True, False, Linear(F(1, 2 * p + 1), F(p, 2 * p + 1)),
                         "trivial-odd-linear"),
              WidthPiece(to_qx(p + 1), None, True, False, one, "fiber")]
    elif kind is Bundle.TRIVIAL:
        eng = engine(p)
        lam = lambda_of(p)
        P.append(WidthPiece(to_qx(1), lam, True, True, vol, "volume"))
        P.append(WidthPiece(lam, to_qx(eng.ratio(depth + 1)), False, False, Accumulating(), "accumulating"))
        for n in range(depth + 1, 1, -1):
            a1, a0, bn = eng.a(n), eng.a(n - 1), eng.beta(n)
            P.append(WidthPiece(to_qx(eng.ratio(n)), to_qx(eng.ratio(n - 1)), True, False,
                                Linear(F(a0, bn), F(a1, bn)), f"trivial-even-recursive({n})"))
        P.append(WidthPiece(to_qx(p), None, True, False, one, "fiber"))
        if p == 4:
            # the limit ratio is 1: the volume piece is the single point mu = 1
            P[0] = WidthPiece(to_qx(1), to_qx(1), True, True, vol, "volume")
    elif k == 8:
        P = _twisted8_pieces(depth)
    elif odd:
        b1 = twisted_odd_breakpoint(p)
        mid = to_qx(F(p * (p - 1), p + 1))
        den = 2 * p * p - p - 1
        P += [WidthPiece(to_qx(0), b1, False, False, vol, "volume"),
              WidthPiece(b1, mid, True, False, Linear(F(p, den), F(p * (p - 1), den)), "twisted-odd-middle"),
              WidthPiece(mid, to_qx(p), True, False, Linear(F(1, 2 * p), F(1, 2)), "twisted-upper"),
              WidthPiece(to_qx(p), None, True, False, one, "fiber")]
    else:
        bp = QuadExt(p, -1, 2 * p)
        P += [WidthPiece(to_qx(0), bp, False, False, vol, "volume"),
              WidthPiece(bp, to_qx(p), True, False, Linear(F(1, 2 * p), F(1, 2)), "twisted-upper"),
              WidthPiece(to_qx(p), None, True, False, one, "fiber")]
    return WidthProfile(kind, k, P)


def _u_linear(tag, n):
    u0 = u_functions(0, n)
    u1 = u_functions(1, n)
    i = {"I": 0, "II": 1, "III": 2}[tag]
    return Linear(u1[i] - u0[i], u0[i])


def _twisted8_pieces(depth: int) -> list:
    vol = VolumeBound()
    P = []
    z = to_qx(0)
    # below 1/2
    P.append(WidthPiece(z, to_qx(_s3(0)), False, False, _u_linear("III", 0), "e8-family-III(0)"))
    P.append(WidthPiece(to_qx(_s3(0)), to_qx(_s3(0)), True, True, vol, "volume"))
    for n in range(1, depth + 1):
        s1, s2, s3 = s_functions(n)
        prev = _s3(n - 1)
        P += [WidthPiece(to_qx(prev), to_qx(s1), False, True, _u_linear("I", n), f"e8-family-I({n})"),
              WidthPiece(to_qx(s1), to_qx(s2), False, True, _u_linear("II", n), f"e8-family-II({n})"),
              WidthPiece(to_qx(s2), to_qx(s3), False, False, _u_linear("III", n), f"e8-family-III({n})"),
              WidthPiece(to_qx(s3), to_qx(s3), True, True, vol, "volume")]
    half = to_qx(F(1, 2))
    P.append(WidthPiece(to_qx(_s3(depth)), half, False, False, Accumulating(), "accumulating"))
    P.append(WidthPiece(half, half, True, True, vol, "volume"))
    P.append(WidthPiece(half, to_qx(_s3(-(depth + 2))), False, False, Accumulating(), "accumulating"))
    for n in range(depth + 1, 0, -1):
        s1, s2, s3 = s_functions(-n)
        left = _s3(-(n + 1))
        P += [WidthPiece(to_qx(left), to_qx(left), True, True, vol, "volume"),
              WidthPiece(to_qx(left), to_qx(s1), False, True, _u_linear("I", -n), f"e8-family-I({-n})"),
              WidthPiece(to_qx(s1), to_qx(s2), False, True, _u_linear("II", -n), f"e8-family-II({-n})"),
              WidthPiece(to_qx(s2), _q(None if s3 == INFINITY else s3), False, False,
                         _u_linear("III", -n), f"e8-family-III({-n})")]
    return P


def breakpoint_values(profile: WidthProfile):
    """(mu, left value, right value) at each shared endpoint of explicit pieces."""
    out = []
    for left, right in zip(profile.pieces, profile.pieces[1:]):
        if left.hi is None:
            continue
        mu = left.hi
        if isinstance(left.formula, Accumulating) or isinstance(right.formula, Accumulating):
            continue
        b = _spec_any(profile.kind, mu)
        out.append((mu, left.formula(b, profile.k, mu), right.formula(b, profile.k, mu)))
    return out


# ---------------------------------------------------------------------------
# packing numbers, full packings, stability

def packing_number(b: BundleSpec, k: int):
    """Fraction of the volume filled by k balls of the maximal size."""
    w = width_at(b, k)
    return w * w * F(k, 2) / to_qx(b.volume)


def full_packing_set_contains(b: BundleSpec, k: int) -> bool:
    return width_at(b, k) == volume_bound(b.kind, k, b.mu)


def _nested_ceiling(mu: Fraction) -> int:
    """ceil of (mu + 2 + sqrt((mu+2)^2 + 4 sqrt(2 mu + 1)))/2, decided exactly.

    r <= m  iff  2m - mu - 2 >= 0  and  (mu+2)^2 + 4 sqrt(2mu+1) <= (2m - mu - 2)^2.
    """
    def at_most(m):
        t = 2 * m - mu - 2
        if t < 0:
            return False
        return QuadExt((mu + 2) ** 2 - t * t, 4, 2 * mu + 1) <= 0
    approx = (float(mu) + 2 + math.sqrt((float(mu) + 2) ** 2 + 4 * math.sqrt(2 * float(mu) + 1))) / 2
    m = max(0, math.floor(approx) - 1)
    while at_most(m):
        m -= 1
    while not at_most(m):
        m += 1
    return m


def stability_odd(b: BundleSpec) -> int:
    mu = b.mu
    if b.kind is Bundle.TRIVIAL:
        if mu == F(8, 7):
            return 7
        if mu <= 2:
            return 9
        return 2 * ceil_exact(QuadExt(mu, 1, 2 * mu)) + 1
    if mu in (F(1, 7), F(3, 8)):
        return 7
    if mu < 1:
        return 9
    return 2 * _nested_ceiling(mu) + 1


def stability_even(b: BundleSpec) -> int:
    mu = b.mu
    if b.kind is Bundle.TRIVIAL:
        return 2 * math.ceil(mu + 2 + 1 / mu)
    if in_full_set(mu):
        return 8
    if mu <= F(3, 2):
        return 10
    return 2 * ceil_exact(QuadExt(mu + 1, 1, 2 * mu + 1))


def stability(b: BundleSpec, parity: str = "all") -> int:
    """Least N (of the parity class) with full packings by every j >= N balls."""
    parity = parity.lower()
    if parity == "odd":
        return stability_odd(b)
    if parity == "even":
        return stability_even(b)
    if parity != "all":
        raise ValueError(f"unknown parity {parity!r}")
    # the last failure of the later class sits right below its threshold
    return max(stability_odd(b), stability_even(b)) - 1


def default_search_horizon(mu) -> int:
    mu = F(mu)
    return 4 * math.ceil(mu + 1 / mu) + 30


def stability_by_search(b: BundleSpec, parity: str = "all", horizon: Optional[int] = None) -> int:
    """Direct search over the width catalog: least N with p_j = 1 for all
    admissible j in [N, horizon]."""
    if horizon is None:
        horizon = default_search_horizon(b.mu)
    parity = parity.lower()
    ok = lambda j: parity == "all" or (j % 2 == 1) == (parity == "odd")
    ks = [j for j in range(1, horizon + 1) if ok(j)]
    N = None
    for j in reversed(ks):
        if not full_packing_set_contains(b, j):
            break
        N = j
    if N is None:
        raise ValueError("no full packing below the search horizon")
    return N
