"""Classes in the second homology of an n-fold blow-up of the projective plane.

A class ``(a0; a1, ..., an)`` stands for ``a0*L - sum(ai*Ei)``; the tail holds
the positive multipliers of the subtracted exceptional classes.  Entries may be
ints, Fractions or QuadExt values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .exact import QuadExt, format_number, parse_number


MIN_TAIL = 3


@dataclass(frozen=True)
class HClass:
    a0: object
    tail: tuple

    def __post_init__(self):
        object.__setattr__(self, "tail", tuple(self.tail))
        if len(self.tail) < MIN_TAIL:
            raise ValueError(f"need at least {MIN_TAIL} tail entries, got {len(self.tail)}")

    @property
    def n(self) -> int:
        return len(self.tail)

    def coords(self) -> tuple:
        return (self.a0,) + self.tail

    def __add__(self, other: "HClass") -> "HClass":
        _same_dim(self, other)
        return HClass(self.a0 + other.a0, [x + y for x, y in zip(self.tail, other.tail)])

    def __sub__(self, other: "HClass") -> "HClass":
        _same_dim(self, other)
        return HClass(self.a0 - other.a0, [x - y for x, y in zip(self.tail, other.tail)])

    def __neg__(self) -> "HClass":
        return HClass(-self.a0, [-x for x in self.tail])

    def scale(self, s) -> "HClass":
        return HClass(s * self.a0, [s * x for x in self.tail])

    def __str__(self):
        return format_class(self)


def _same_dim(A: HClass, B: HClass):
    if A.n != B.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {B.n}")


def canonical(n: int) -> HClass:
    """K = (3; 1, ..., 1)."""
    return HClass(3, (1,) * n)


def exceptional(n: int, idx: int) -> HClass:
    """The class E_idx, i.e. coordinate -1 at tail position idx."""
    tail = [0] * n
    tail[idx] = -1
    return HClass(0, tail)


def pairing(A: HClass, B: HClass):
    _same_dim(A, B)
    return A.a0 * B.a0 - sum(x * y for x, y in zip(A.tail, B.tail))


def self_intersection(A: HClass):
    return pairing(A, A)


def k_pairing(A: HClass):
    return pairing(canonical(A.n), A)


def is_exceptional_type(A: HClass) -> bool:
    return self_intersection(A) == -1 and k_pairing(A) == 1


def defect(A: HClass):
    t = A.tail
    return t[0] + t[1] + t[2] - A.a0


def cremona(A: HClass) -> HClass:
    d = defect(A)
    t = A.tail
    return HClass(A.a0 - d, (t[0] - d, t[1] - d, t[2] - d) + t[3:])


def permute(A: HClass, sigma: Sequence[int]) -> HClass:
    """New tail entry i is old entry sigma[i]."""
    return HClass(A.a0, [A.tail[j] for j in sigma])


def invert_permutation(sigma: Sequence[int]) -> tuple:
    inv = [0] * len(sigma)
    for i, j in enumerate(sigma):
        inv[j] = i
    return tuple(inv)


def sort_permutation(tail: Sequence) -> tuple:
    # Python's sort is stable even with reverse=True
    return tuple(sorted(range(len(tail)), key=tail.__getitem__, reverse=True))


def reorder(A: HClass):
    sigma = sort_permutation(A.tail)
    return permute(A, sigma), sigma


def reflect(A: HClass, root: HClass) -> HClass:
    rr = self_intersection(root)
    if rr == 0:
        raise ValueError("cannot reflect about a root of zero square")
    coef = 2 * pairing(root, A) / _as_div(rr)
    return A - root.scale(coef)


def _as_div(x):
    return Fraction(x) if isinstance(x, int) else x


def cremona_root(n: int) -> HClass:
    """alpha_0 = L - E1 - E2 - E3."""
    return HClass(1, (1, 1, 1) + (0,) * (n - 3))


def transposition_root(n: int, i: int) -> HClass:
    """alpha_i = E_i - E_{i+1} (0-based tail index i)."""
    tail = [0] * n
    tail[i], tail[i + 1] = -1, 1
    return HClass(0, tail)


def is_reduced(A: HClass) -> bool:
    t = A.tail
    if any(t[i] < t[i + 1] for i in range(len(t) - 1)):
        return False
    return t[-1] >= 0 and A.a0 >= t[0] + t[1] + t[2]


# move words -----------------------------------------------------------------

@dataclass(frozen=True)
class Cremona:
    def __str__(self):
        return "cremona"


@dataclass(frozen=True)
class Permute:
    sigma: tuple

    def __str__(self):
        return f"permute{list(self.sigma)}"


Move = Union[Cremona, Permute]
CREMONA = Cremona()


def apply_move(m: Move, A: HClass) -> HClass:
    if isinstance(m, Cremona):
        return cremona(A)
    if len(m.sigma) != A.n:
        raise ValueError("permutation length does not match dimension")
    return permute(A, m.sigma)


def inverse_move(m: Move) -> Move:
    if isinstance(m, Cremona):
        return m
    return Permute(invert_permutation(m.sigma))


def apply_word(word: Sequence[Move], A: HClass) -> HClass:
    for m in word:
        A = apply_move(m, A)
    return A


def adjoint_apply(word: Sequence[Move], A: HClass) -> HClass:
    """Adjoint of ``apply_word`` for the intersection pairing.

    Every move is an isometry, so the adjoint is the inverse word.
    """
    for m in reversed(word):
        A = apply_move(inverse_move(m), A)
    return A


def iterate_word(word: Sequence[Move], A: HClass):
    """Yield (move, class after move) pairs."""
    for m in word:
        A = apply_move(m, A)
        yield m, A


# text format ----------------------------------------------------------------

def format_class(A: HClass) -> str:
    return f"{format_number(A.a0)}; " + ", ".join(format_number(x) for x in A.tail)


_REPEAT = re.compile(r"^(.*\S)\s*\^\s*(\d+)$")


def _parse_entry(tok: str):
    m = _REPEAT.match(tok)
    if m:
        body = m.group(1)
        if body.startswith("(") and body.endswith(")") and "sqrt" not in body:
            body = body[1:-1]
        return [parse_number(body)] * int(m.group(2))
    return [parse_number(tok)]


def parse_class(text: str) -> HClass:
    """Parse "a0; a1, a2, ..." with exact entries.

    ``x^m`` repeats entry x m times, e.g. "7; 4, 3, 2^6, 1".
    """
    if ";" not in text:
        raise ValueError("class literal needs ';' after a0")
    head, rest = text.split(";", 1)
    tail = []
    for tok in rest.split(","):
        tok = tok.strip()
        if tok:
            tail.extend(_parse_entry(tok))
    return HClass(parse_number(head), tail)


def normalized(x):
    """Turn rational QuadExt values into Fractions (and ints into Fractions)."""
    if isinstance(x, QuadExt):
        return x.a if x.is_rational else x
    return Fraction(x)
