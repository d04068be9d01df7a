"""ECH capacity sequences of ellipsoids and polydisks, and embedding checks.

Sequences are zero-indexed with entry 0 equal to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import as_fraction, qx_compare
from .recurrence import engine
from .reducer import trivial
from .widths import width_at


def _pos(x, name):
    x = as_fraction(x)
    if x <= 0:
        raise ValueError(f"{name} must be positive")
    return x


def ellipsoid_caps(a, b, count: int) -> list:
    """First ``count`` values of {a m + b n : m, n >= 0} sorted with repetition."""
    a, b = _pos(a, "a"), _pos(b, "b")
    if count < 1:
        raise ValueError("count must be positive")
    D = math.lcm(a.denominator, b.denominator)
    A, B = sorted((int(a * D), int(b * D)))
    # about V^2 / (2AB) lattice points lie below V
    cutoff = math.isqrt(2 * A * B * count) + A + B
    while True:
        vals = []
        for n in range(cutoff // B + 1):
            base = B * n
            vals.extend(range(base, cutoff + 1, A))
        # every value <= cutoff is present, so a long enough sorted prefix is exact
        if len(vals) >= count:
            vals.sort()
            return [Fraction(v, D) for v in vals[:count]]
        cutoff *= 2


def _lattice_count(A: int, B: int, V: int) -> int:
    """#{(m, n) >= 0 : A m + B n <= V}."""
    if V < 0:
        return 0
    return sum((V - B * n) // A + 1 for n in range(V // B + 1))


def ellipsoid_cap(a, b, i: int):
    """Entry i of the ellipsoid sequence without building the prefix.

    On integer-scaled parameters the answer is the least integer V whose
    lattice count exceeds i.
    """
    a, b = _pos(a, "a"), _pos(b, "b")
    if i < 0:
        raise ValueError("index must be nonnegative")
    D = math.lcm(a.denominator, b.denominator)
    A, B = int(a * D), int(b * D)
    if A > B:
        A, B = B, A
    lo, hi = -1, A * i
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _lattice_count(A, B, mid) >= i + 1:
            hi = mid
        else:
            lo = mid
    return Fraction(hi, D)


def polydisk_cap(s, t, i: int):
    """min{s m + t n : (m+1)(n+1) >= i+1}.

    At a minimizer one side is as small as possible given the other, which
    forces min(m, n) <= isqrt(i+1); scanning both small sides suffices.
    """
    s, t = _pos(s, "s"), _pos(t, "t")
    if i < 0:
        raise ValueError("index must be nonnegative")
    r = math.isqrt(i + 1)
    best = None
    for m in range(r + 1):
        n = -(-(i + 1) // (m + 1)) - 1
        for v in (s * m + t * n, s * n + t * m):
            if best is None or v < best:
                best = v
    return best


def polydisk_caps(s, t, count: int) -> list:
    s, t = _pos(s, "s"), _pos(t, "t")
    if count < 1:
        raise ValueError("count must be positive")
    # same scan as polydisk_cap, on integer-scaled parameters
    D = math.lcm(s.denominator, t.denominator)
    S, T = int(s * D), int(t * D)
    out = []
    for i in range(count):
        best = None
        for m in range(math.isqrt(i + 1) + 1):
            n = -(-(i + 1) // (m + 1)) - 1
            v = min(S * m + T * n, S * n + T * m)
            if best is None or v < best:
                best = v
        out.append(Fraction(best, D))
    return out


@dataclass
class CapSequence:
    """Lazily extended capacity prefix of an ellipsoid or a polydisk."""

    shape: str          # "ellipsoid" or "polydisk"
    params: tuple
    scale: Fraction = Fraction(1)
    _cache: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.shape not in ("ellipsoid", "polydisk"):
            raise ValueError(f"unknown shape {self.shape!r}")
        self.params = tuple(_pos(x, "parameter") for x in self.params)

    def prefix(self, count: int) -> list:
        if len(self._cache) < count:
            fn = ellipsoid_caps if self.shape == "ellipsoid" else polydisk_caps
            self._cache = fn(*self.params, count)
        return [self.scale * x for x in self._cache[:count]]

    def __getitem__(self, i: int):
        return self.prefix(i + 1)[i]

    def scaled(self, lam) -> "CapSequence":
        return CapSequence(self.shape, self.params, self.scale * as_fraction(lam), list(self._cache))

    def clone(self) -> "CapSequence":
        return self.scaled(1)


def ellipsoid(a, b) -> CapSequence:
    return CapSequence("ellipsoid", (a, b))


def polydisk(s, t) -> CapSequence:
    return CapSequence("polydisk", (s, t))


def first_violation(A: CapSequence, B: CapSequence, prefix_len: int):
    """Least i < prefix_len with A_i > B_i, or None."""
    if prefix_len < 1:
        raise ValueError("prefix length must be positive")
    for i, (x, y) in enumerate(zip(A.prefix(prefix_len), B.prefix(prefix_len))):
        if x > y:
            return i
    return None


def dominates(A: CapSequence, B: CapSequence, prefix_len: int) -> bool:
    """A_i <= B_i for every i < prefix_len."""
    return first_violation(A, B, prefix_len) is None


@dataclass
class EmbedVerdict:
    embeds: bool
    method: str                 # "width-exact" or "prefix"
    prefix_len: int | None = None
    witness_index: int | None = None
    certified: bool = True      # False for prefix "true" answers

    def to_json(self):
        out = {"embeds": self.embeds, "method": self.method}
        if self.prefix_len is not None:
            out["prefixLen"] = self.prefix_len
        if self.witness_index is not None:
            out["witnessIndex"] = self.witness_index
        if self.method == "prefix" and self.embeds:
            out["qualifier"] = "prefix-certified"
        return out


def default_prefix(k) -> int:
    return max(200, 4 * math.ceil(k) ** 2)


def embeds_ellipsoid_in_polydisk(a, b, s, t, prefix_len: int | None = None) -> EmbedVerdict:
    """Does E(a, b) embed into P(s, t)?

    Integer ratio b/a >= 8 goes through the ball-packing width of the trivial
    bundle (exact); anything else compares ECH capacities on a finite prefix.
    """
    a, b, s, t = (_pos(x, n) for x, n in ((a, "a"), (b, "b"), (s, "s"), (t, "t")))
    if a > b:
        a, b = b, a
    if s > t:
        s, t = t, s
    k = b / a
    if k.denominator == 1 and k >= 8:
        w = width_at(trivial(t / s), int(k))
        return EmbedVerdict(qx_compare(a / s, w) <= 0, "width-exact")
    if prefix_len is None:
        prefix_len = default_prefix(k)
    i = first_violation(ellipsoid(a, b), polydisk(s, t), prefix_len)
    if i is not None:
        return EmbedVerdict(False, "prefix", prefix_len, i)
    return EmbedVerdict(True, "prefix", prefix_len, certified=False)


# index windows ----------------------------------------------------------------

@dataclass
class WindowReport:
    k: int
    x: int
    value_minus: int
    claimed_minus: tuple
    actual_minus: tuple | None
    value_plus: int
    claimed_plus: tuple
    actual_plus: tuple | None

    @property
    def agrees_minus(self) -> bool:
        return self.claimed_minus == self.actual_minus

    @property
    def agrees_plus(self) -> bool:
        return self.claimed_plus == self.actual_plus

    @property
    def lower_agrees(self) -> bool:
        return (self.actual_minus is not None and self.claimed_minus[0] == self.actual_minus[0]
                and self.actual_plus is not None and self.claimed_plus[0] == self.actual_plus[0])


def _index_range(seq: list, value):
    idx = [i for i, v in enumerate(seq) if v == value]
    return (idx[0], idx[-1]) if idx else None


def index_window_check(k: int, x: int) -> WindowReport:
    """Claimed index windows for the values kx-1 and kx+1 of N(1, k),
    next to the windows found by direct enumeration."""
    if k < 2 or x < 1:
        raise ValueError("need k >= 2 and x >= 1")
    tri = k * x * (x + 1) // 2
    claimed_minus = (tri - x, tri - 1)
    claimed_plus = (tri + x + 1, tri + 2 * x + 2)
    seq = ellipsoid_caps(1, k, claimed_plus[1] + 4 * (x + 2))
    return WindowReport(
        k, x,
        k * x - 1, claimed_minus, _index_range(seq, k * x - 1),
        k * x + 1, claimed_plus, _index_range(seq, k * x + 1),
    )


def ech_index(p: int, n: int) -> int:
    return engine(p).index_value(n)


@dataclass
class RecursiveIndexCheck:
    p: int
    n: int
    mu: Fraction
    index: int
    ellipsoid_value: Fraction
    ellipsoid_expected: int
    polydisk_value: Fraction
    polydisk_expected: Fraction
    ratio: Fraction
    width: Fraction

    @property
    def ok(self) -> bool:
        return (self.ellipsoid_value == self.ellipsoid_expected
                and self.polydisk_value == self.polydisk_expected
                and self.ratio == self.width)


def recursive_index_check(p: int, n: int, mu) -> RecursiveIndexCheck:
    """ECH capacities of E(1, 2p) and P(1, mu) at the index tied to the n-th
    linear piece of the 2p-ball width."""
    eng = engine(p)
    mu = as_fraction(mu)
    i = eng.index_value(n)
    N = ellipsoid_cap(1, 2 * p, i)
    M = polydisk_cap(1, mu, i)
    return RecursiveIndexCheck(
        p, n, mu, i,
        N, 2 * (eng.a(n) + eng.a(n - 1)) - 1,
        M, eng.a(n) + eng.a(n - 1) * mu,
        M / N, eng.w(n, mu),
    )
