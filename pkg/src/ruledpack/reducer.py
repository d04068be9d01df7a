"""Cone membership by Cremona reduction, obstruction extraction, bisection widths."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .exact import QuadExt, as_fraction
from .lattice import (
    CREMONA,
    HClass,
    Permute,
    adjoint_apply,
    exceptional,
    format_class,
    iterate_word,
)

MAX_ITER_ENV = "RULEDPACK_MAX_ITER"
DEFAULT_MAX_ITER = 10**6


def default_max_iter() -> int:
    raw = os.environ.get(MAX_ITER_ENV)
    return int(raw) if raw else DEFAULT_MAX_ITER


class IterationBudgetExhausted(RuntimeError):
    pass


class Verdict(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


class Bundle(str, Enum):
    TRIVIAL = "trivial"
    TWISTED = "twisted"


@dataclass(frozen=True)
class BundleSpec:
    kind: Bundle
    mu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "kind", Bundle(self.kind))
        object.__setattr__(self, "mu", as_fraction(self.mu))
        if self.kind is Bundle.TRIVIAL and self.mu < 1:
            raise ValueError("trivial bundle needs mu >= 1")
        if self.kind is Bundle.TWISTED and self.mu <= 0:
            raise ValueError("twisted bundle needs mu > 0")

    @property
    def volume(self) -> Fraction:
        return self.mu if self.kind is Bundle.TRIVIAL else self.mu + Fraction(1, 2)


def trivial(mu) -> BundleSpec:
    return BundleSpec(Bundle.TRIVIAL, mu)


def twisted(mu) -> BundleSpec:
    return BundleSpec(Bundle.TWISTED, mu)


def ball_vector(b: BundleSpec, k: int, c) -> HClass:
    """Class of the blow-up carrying k equal balls of capacity c.

    Trivial: (mu+1-c; mu-c, c^(k-1), 1-c).  Twisted: (mu+1; mu, c^k).
    Tails shorter than three entries are padded with zeros (balls of size 0).
    """
    if k < 1:
        raise ValueError("k must be positive")
    if c <= 0:
        raise ValueError("capacity must be positive")
    mu = b.mu
    if b.kind is Bundle.TRIVIAL:
        a0, tail = mu + 1 - c, [mu - c] + [c] * (k - 1) + [1 - c]
    else:
        a0, tail = mu + 1, [mu] + [c] * k
    tail += [0] * (3 - len(tail))
    return HClass(a0, tail)


@dataclass
class ReductionOutcome:
    verdict: Verdict
    input_class: HClass
    final_class: HClass
    word: list
    iterations: int
    reason: str = ""

    def zero_indices(self) -> list:
        return [i for i, x in enumerate(self.final_class.tail) if x == 0]

    def trace_records(self) -> list:
        out = []
        for m, A in iterate_word(self.word, self.input_class):
            rec = {"move": "cremona" if m is CREMONA else "permute"}
            if isinstance(m, Permute):
                rec["sigma"] = list(m.sigma)
            rec["class"] = format_class(A)
            out.append(rec)
        return out

    def trace_jsonl(self) -> str:
        return "\n".join(json.dumps(r) for r in self.trace_records())


def _integer_scale(A: HClass):
    """Common positive denominator turning all entries into integers."""
    try:
        vals = [as_fraction(x) for x in A.coords()]
    except ValueError:
        raise ValueError("reduction needs rational coordinates") from None
    den = 1
    for v in vals:
        den = math.lcm(den, v.denominator)
    ints = [int(v * den) for v in vals]
    return den, ints[0], ints[1:]


def _run(a0: int, tail: list, max_iter: int, record: bool):
    """Reduction loop on an integer class; mutates tail.

    Returns (verdict, reason, a0, tail, moves, cremona_count).
    """
    moves = []
    if a0 * a0 - sum(x * x for x in tail) < 0:
        return Verdict.EXTERIOR, "negative-square", a0, tail, moves, 0
    if a0 < 0:
        return Verdict.EXTERIOR, "negative-a0", a0, tail, moves, 0
    n = len(tail)
    count = 0
    while True:
        if record:
            sigma = sorted(range(n), key=tail.__getitem__, reverse=True)
            if any(i != s for i, s in enumerate(sigma)):
                moves.append(Permute(tuple(sigma)))
                tail = [tail[s] for s in sigma]
        else:
            tail.sort(reverse=True)
        if tail[-1] < 0:
            return Verdict.EXTERIOR, "negative-entry", a0, tail, moves, count
        d = tail[0] + tail[1] + tail[2] - a0
        if d <= 0:
            v = Verdict.INTERIOR if tail[-1] > 0 else Verdict.BOUNDARY
            return v, "reduced", a0, tail, moves, count
        if count >= max_iter:
            raise IterationBudgetExhausted(f"no reduced form after {max_iter} Cremona moves")
        a0 -= d
        tail[0] -= d
        tail[1] -= d
        tail[2] -= d
        count += 1
        if record:
            moves.append(CREMONA)


def reduce(v: HClass, max_iter: int | None = None) -> ReductionOutcome:
    """Decide whether v lies in the closure of the symplectic cone.

    Works on a rescaled integer copy of v; every move commutes with positive
    scaling, so the recorded word applies verbatim to v.
    """
    if max_iter is None:
        max_iter = default_max_iter()
    den, a0, tail = _integer_scale(v)
    verdict, reason, a0, tail, moves, count = _run(a0, list(tail), max_iter, True)
    final = HClass(Fraction(a0, den), [Fraction(x, den) for x in tail])
    return ReductionOutcome(verdict, v, final, moves, count, reason)


def classify(v: HClass, max_iter: int | None = None) -> Verdict:
    """Verdict only; skips move recording."""
    if max_iter is None:
        max_iter = default_max_iter()
    _, a0, tail = _integer_scale(v)
    return _run(a0, tail, max_iter, False)[0]


class NotBoundary(ValueError):
    pass


def obstruction_from_outcome(o: ReductionOutcome, zero_index: int | None = None) -> HClass:
    """Exceptional class whose pairing with the input vanishes.

    Pulls back the exceptional class at a zero entry of the reduced class.
    By default takes the last zero entry whose pullback is not a bare E_j
    (those only record a ball of size zero); falls back to the last zero.
    """
    if o.verdict is not Verdict.BOUNDARY:
        raise NotBoundary(f"verdict is {o.verdict.value}, not Boundary")
    if zero_index is None:
        zeros = o.zero_indices()
        for i in reversed(zeros):
            E = adjoint_apply(o.word, exceptional(o.final_class.n, i))
            if E.a0 != 0:
                return E
        zero_index = zeros[-1]
    if o.final_class.tail[zero_index] != 0:
        raise NotBoundary(f"entry {zero_index} of the reduced class is nonzero")
    E = adjoint_apply(o.word, exceptional(o.final_class.n, zero_index))
    return HClass(E.a0, E.tail)


def _feasible(b: BundleSpec, k: int, c: Fraction, max_iter: int) -> bool:
    v = ball_vector(b, k, c)
    _, a0, tail = _integer_scale(v)
    return _run(a0, tail, max_iter, False)[0] is not Verdict.EXTERIOR


def width_by_bisection(b: BundleSpec, k: int, precision_denom: int = 2**40,
                       max_iter: int | None = None):
    """Bracket [lo, hi] of the k-ball width using only the reduction verdicts.

    lo is feasible, everything above hi is infeasible, hi - lo <= 1/denom.
    Capacities never exceed 1 (the fibre class bounds them), so the search
    starts on (0, 1].
    """
    if precision_denom < 2:
        raise ValueError("precision denominator must be at least 2")
    if max_iter is None:
        max_iter = default_max_iter()
    one = Fraction(1)
    if _feasible(b, k, one, max_iter):
        return one, one
    lo, hi = Fraction(0), one
    step = Fraction(1, precision_denom)
    while hi - lo > step:
        mid = (lo + hi) / 2
        if _feasible(b, k, mid, max_iter):
            lo = mid
        else:
            hi = mid
    return lo, hi


def bracket_contains(bracket, value) -> bool:
    lo, hi = bracket
    return QuadExt(lo) <= value <= QuadExt(hi)
