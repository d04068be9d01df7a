"""Self-check suites behind ``ruledpack verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .ech import index_window_check, recursive_index_check
from .lattice import is_exceptional_type, pairing
from .recurrence import engine, verify_identities
from .reducer import Bundle, BundleSpec, Verdict, ball_vector, bracket_contains, obstruction_from_outcome, reduce, width_by_bisection
from .widths import (
    e8_family,
    exceptional_representatives,
    obstructions,
    width_at,
)

F = Fraction


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f" ({self.detail})" if self.detail else "")


def mu_grid(kind, k: int, step=F(1, 8)) -> list:
    kind = Bundle(kind)
    start = F(1) if kind is Bundle.TRIVIAL else step
    out = []
    mu = start
    while mu <= k:
        out.append(mu)
        mu += step
    return out


def identities_suite(p_values=range(4, 13), n_max: int = 50) -> list:
    out = []
    for p in p_values:
        rep = verify_identities(p, n_max)
        out.append(Check(f"identities p={p}", rep.ok,
                         f"{rep.checked} checked" if rep.ok else f"first failure {rep.first_failure()}"))
    return out


def oracle_suite(ks=range(8, 17), denom: int = 2**40) -> list:
    out = []
    for kind in Bundle:
        for k in ks:
            misses = []
            t0 = time.perf_counter()
            grid = mu_grid(kind, k)
            for mu in grid:
                b = BundleSpec(kind, mu)
                if not bracket_contains(width_by_bisection(b, k, denom), width_at(b, k)):
                    misses.append(str(mu))
            dt = time.perf_counter() - t0
            out.append(Check(f"oracle {kind.value} k={k}", not misses,
                             f"{len(grid)} points in {dt:.2f}s" + (f", misses {misses[:5]}" if misses else "")))
    return out


def obstructions_suite(ks=range(1, 17), family_range=range(-50, 51)) -> list:
    out = []
    bad = [(t, n) for t in ("I", "II", "III") for n in family_range
           if not is_exceptional_type(e8_family(t, n))]
    out.append(Check("e8 families exceptional", not bad, str(bad[:5]) if bad else ""))
    for kind in Bundle:
        bad = [k for k in range(1, 8) for E in exceptional_representatives(kind, k) if not is_exceptional_type(E)]
        out.append(Check(f"small-k class list {kind.value}", not bad))
        failures = []
        for k in ks:
            for mu in mu_grid(kind, k, F(1, 4)):
                b = BundleSpec(kind, mu)
                try:
                    obstructions(b, k)
                except AssertionError as exc:
                    failures.append(f"k={k} mu={mu}: {exc}")
                w = width_at(b, k)
                if w.is_rational:
                    o = reduce(ball_vector(b, k, w.a))
                    if o.verdict is Verdict.BOUNDARY:
                        E = obstruction_from_outcome(o)
                        if not is_exceptional_type(E) or pairing(E, o.input_class) != 0:
                            failures.append(f"extracted k={k} mu={mu}")
        out.append(Check(f"obstructions {kind.value}", not failures, "; ".join(failures[:3])))
    return out


def ech_suite(p_values=range(4, 9), n_max: int = 6) -> list:
    out = []
    for p in p_values:
        eng = engine(p)
        bad = []
        for n in range(2, n_max + 1):
            lo, hi = eng.ratio(n), eng.ratio(n - 1)
            for j in range(4):
                mu = lo + (hi - lo) * F(j, 4)
                r = recursive_index_check(p, n, mu)
                if not r.ok:
                    bad.append((n, str(mu)))
        out.append(Check(f"ech recursive indices p={p}", not bad, str(bad[:3]) if bad else ""))
    lower = all(index_window_check(k, x).lower_agrees for k in range(8, 17) for x in range(1, 6))
    out.append(Check("ech window lower endpoints", lower))
    return out


SUITES = {
    "identities": identities_suite,
    "oracle": oracle_suite,
    "obstructions": obstructions_suite,
    "ech": ech_suite,
}
