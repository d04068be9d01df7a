"""Third-order recurrences and 2x2 orbit dynamics behind the even-k widths.

All four integer sequences obey u(n+3) = (p-1)u(n+2) - (p-1)u(n+1) + u(n);
they differ only in their starting values.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .exact import QuadExt


class Kind(str, Enum):
    A = "a"
    BETA = "beta"
    GAMMA = "gamma"
    X = "x"


INFINITY = float("inf")  # marker for the accumulation interval


class RecurrenceEngine:
    """Memoized sequences for one value of p (p >= 4).

    Index 0 of the internal tables is n = -1, so gamma(-1) and a(-1) are
    available for the identities.
    """

    def __init__(self, p: int):
        if p < 4:
            raise ValueError("p must be at least 4")
        self.p = p
        q = p - 1
        # a(-1) = a(2) - q a(1) + q a(0) = 0
        self._a = [0, 0, 1, q]
        self._gamma = [0, 1, p, q * p - q]
        self._beta: dict = {}

    def _extend(self, table: list, n: int):
        q = self.p - 1
        while len(table) <= n + 1:
            table.append(q * table[-1] - q * table[-2] + table[-3])

    def a(self, n: int) -> int:
        if n < -1:
            raise ValueError("index below -1")
        if self.p == 4:
            return n * (n + 1) // 2  # closed form of the recurrence at p = 4
        self._extend(self._a, n)
        return self._a[n + 1]

    def beta(self, n: int) -> int:
        p = self.p
        tab = self._beta
        if not tab:
            tab.update({1: 1, 2: 2 * p - 1, 3: 2 * p * p - 4 * p + 1})
        q = p - 1
        while n > max(tab):
            m = max(tab) + 1
            tab[m] = q * tab[m - 1] - q * tab[m - 2] + tab[m - 3]
        while n < min(tab):
            m = min(tab) - 1
            tab[m] = tab[m + 3] - q * tab[m + 2] + q * tab[m + 1]
        return tab[n]

    def gamma(self, n: int) -> int:
        if n < -1:
            raise ValueError("index below -1")
        if self.p == 4:
            return (n + 1) ** 2  # closed form of the recurrence at p = 4
        self._extend(self._gamma, n)
        return self._gamma[n + 1]

    def x(self, n: int) -> Fraction:
        return Fraction(2 * (self.a(n) + self.a(n - 1)) - 1 + (-1) ** n, 2 * self.p)

    def seq(self, kind, n: int):
        kind = Kind(kind)
        if kind is Kind.A:
            return self.a(n)
        if kind is Kind.BETA:
            return self.beta(n)
        if kind is Kind.GAMMA:
            return self.gamma(n)
        return self.x(n)

    def w(self, n: int, mu) -> Fraction:
        """Candidate width on the n-th interval: (a_n + a_{n-1} mu)/beta_n."""
        if n < 1:
            raise ValueError("n must be positive")
        return (self.a(n) + self.a(n - 1) * Fraction(mu)) / self.beta(n)

    def ratio(self, n: int) -> Fraction:
        """Left endpoint gamma_n/gamma_{n-1} of the n-th interval."""
        return Fraction(self.gamma(n), self.gamma(n - 1))

    def index_value(self, n: int) -> int:
        """ECH index (a_n + 1)(a_{n-1} + 1) - 1."""
        return (self.a(n) + 1) * (self.a(n - 1) + 1) - 1


_ENGINES: dict = {}


def engine(p: int) -> RecurrenceEngine:
    eng = _ENGINES.get(p)
    if eng is None:
        eng = _ENGINES[p] = RecurrenceEngine(p)
    return eng


def seq(p: int, kind, n: int):
    return engine(p).seq(kind, n)


def w_n(p: int, n: int, mu) -> Fraction:
    return engine(p).w(n, mu)


def lambda_of(p: int) -> QuadExt:
    """Limit of gamma_n/gamma_{n-1}: (p - 2 + sqrt(p^2 - 4p))/2."""
    return QuadExt(Fraction(p - 2, 2), Fraction(1, 2), p * p - 4 * p)


def interval_index(p: int, mu):
    """0 if mu >= p; n >= 2 if gamma_n/gamma_{n-1} <= mu < gamma_{n-1}/gamma_{n-2};
    INFINITY when mu is at or below the limit ratio."""
    mu = Fraction(mu)
    if mu < 1:
        raise ValueError("mu must be at least 1")
    if mu >= p:
        return 0
    if QuadExt(mu) <= lambda_of(p):
        return INFINITY
    eng = engine(p)
    # ratios decrease to lambda; find the first n with ratio(n) <= mu
    hi = 2
    while eng.ratio(hi) > mu:
        hi *= 2
    lo = hi // 2  # ratio(lo) > mu (ratio(1) = p > mu)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if eng.ratio(mid) > mu:
            lo = mid
        else:
            hi = mid
    return hi


# orbit dynamics -------------------------------------------------------------

@dataclass(frozen=True)
class OrbitState:
    R: Fraction
    S: Fraction


def orbit_matrix(p: int):
    return ((p - 3, -1), (-(p - 4), 1))


def orbit_step(p: int, s: OrbitState) -> OrbitState:
    (m11, m12), (m21, m22) = orbit_matrix(p)
    return OrbitState(m11 * s.R + m12 * s.S, m21 * s.R + m22 * s.S)


def orbit_trace(p: int, s: OrbitState, steps: int) -> list:
    out = [s]
    for _ in range(steps):
        s = orbit_step(p, s)
        out.append(s)
    return out


def initial_state(p: int, mu, c) -> OrbitState:
    mu, c = Fraction(mu), Fraction(c)
    return OrbitState(1 - mu + (p - 1) * (2 * c - 1), mu - 1 - (p - 2) * (2 * c - 1))


def orbit_form(p: int, s: OrbitState) -> Fraction:
    """Quadratic form det[v, Mv] = S^2 - (p-4)RS - (p-4)R^2, fixed by the step."""
    return s.S * s.S - (p - 4) * s.R * s.S - (p - 4) * s.R * s.R


def triple_matrix(p: int):
    return ((0, 0, 1), (-p + 3, p - 2, 0), (-1, 1, 1))


def triple_step(p: int, bcd: tuple) -> tuple:
    return tuple(sum(m * x for m, x in zip(row, bcd)) for row in triple_matrix(p))


def initial_triple(p: int, mu, c) -> tuple:
    """(B, C, D) read off the class reached after the first p-2 Cremona rounds."""
    mu, c = Fraction(mu), Fraction(c)
    lead = mu + 1 - c - (p - 2) * (2 * c - 1)
    return (c, lead - 1, 1 - c)


def volume_curve(p: int, cs) -> list:
    """Points (R, S) at (mu, c) = (c^2 p, c): where the volume bound is tight."""
    return [initial_state(p, Fraction(c) ** 2 * p, c) for c in cs]


# identities -----------------------------------------------------------------

@dataclass
class IdentityReport:
    p: int
    n_max: int
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def first_failure(self):
        return self.failures[0] if self.failures else None


def _satisfies_recurrence(p: int, f, n: int) -> bool:
    q = p - 1
    return f(n + 3) == q * f(n + 2) - q * f(n + 1) + f(n)


def verify_identities(p: int, n_max: int) -> IdentityReport:
    eng = engine(p)
    rep = IdentityReport(p, n_max)
    a, beta, gamma = eng.a, eng.beta, eng.gamma

    def check(name, n, ok):
        rep.checked += 1
        if not ok:
            rep.failures.append((name, n))

    for n in range(1, n_max + 1):
        s = a(n) + a(n - 1)
        check("beta-square", n, beta(n) ** 2 == 4 * p * a(n) * a(n - 1) + 1)
        check("sum-square", n, Fraction(s * s - s, p) == a(n) * a(n - 1))
        check("beta-from-a", n, beta(n) == 2 * s - 1)
        check("gamma-cross", n, gamma(n) == a(n) * beta(n + 1) - a(n + 1) * beta(n))
        for y_name, y in (("beta", beta), ("gamma", gamma)):
            for n0 in (1, 2):
                phi = (lambda m, y=y, n0=n0: a(m) * y(m) - a(m + n0) * y(m - n0))
                check(f"crossed-a-{y_name}-{n0}", n, _satisfies_recurrence(p, phi, n))
        check("beta-recurrence", n, _satisfies_recurrence(p, beta, n))
        check("x-recurrence", n,
              eng.x(n + 3) == (p - 1) * eng.x(n + 2) - (p - 1) * eng.x(n + 1) + eng.x(n)
              + (-1) ** (n + 1))
    return rep


# CSV emitters ---------------------------------------------------------------

def sequence_table_csv(p: int, n_max: int) -> str:
    eng = engine(p)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["n", "a", "beta", "gamma", "x"])
    for n in range(0, n_max + 1):
        w.writerow([n, eng.a(n), eng.beta(n), eng.gamma(n), str(eng.x(n))])
    return buf.getvalue()


def orbit_csv(states) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["n", "R", "S"])
    for i, s in enumerate(states, start=1):
        w.writerow([i, str(s.R), str(s.S)])
    return buf.getvalue()
