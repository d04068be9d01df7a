from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from ruledpack.lattice import (
    CREMONA,
    HClass,
    Permute,
    adjoint_apply,
    apply_word,
    canonical,
    cremona,
    cremona_root,
    defect,
    is_reduced,
    pairing,
    parse_class,
    format_class,
    reflect,
    reorder,
    transposition_root,
)

N = 9


def test_pairing_examples():
    K = canonical(9)
    assert pairing(K, K) == 0
    E = HClass(1, (1, 1, 0))
    assert pairing(E, E) == -1
    v = parse_class("5/2; 3/2, 1/2^8")
    assert pairing(v, v) == 2


def test_defect_examples():
    assert defect(HClass(3, (1, 1, 1, 0))) == 0
    mu, c = 1, F(3, 5)
    assert defect(HClass(mu + 1, (mu, c, c))) == F(1, 5)
    assert defect(parse_class("5/2; 3/2, 1/2, 1/2, 1/2")) == 0


def test_cremona_examples():
    assert cremona(HClass(3, (1, 1, 1))) == HClass(3, (1, 1, 1))
    A = parse_class("12/5; 7/5, 3/5, 3/5, 3/5, 2/5")
    assert cremona(A) == parse_class("11/5; 6/5, 2/5, 2/5, 3/5, 2/5")


def test_reorder_examples():
    B, sigma = reorder(HClass(3, (0, 2, 1)))
    assert B == HClass(3, (2, 1, 0)) and sigma == (1, 2, 0)
    mu, c = 2, F(1, 2)
    v = HClass(mu + 1 - c, [mu - c] + [c] * 7 + [1 - c])
    B, sigma = reorder(v)
    assert B == parse_class("5/2; 3/2, 1/2^8")
    assert sigma == tuple(range(9))


def test_reflect_examples():
    A = HClass(5, (3, 2, 1, 1))
    assert reflect(A, transposition_root(4, 0)) == HClass(5, (2, 3, 1, 1))
    assert reflect(A, cremona_root(4)) == cremona(A)


def test_is_reduced_examples():
    assert is_reduced(HClass(3, (1, 1, 1, 0)))
    assert not is_reduced(HClass(2, (1, 1, 1)))
    assert is_reduced(parse_class("5/2; 3/2, 1/2^8"))


def test_adjoint_examples():
    A = HClass(3, (1, 1, 1, 0))
    assert apply_word([], A) == A
    assert adjoint_apply([CREMONA], A) == cremona(A)


def test_parse_format_round_trip():
    A = parse_class("7; 4, 3, 2^6, 1")
    assert A.tail == (4, 3, 2, 2, 2, 2, 2, 2, 1)
    assert parse_class(format_class(A)) == A
    with pytest.raises(ValueError):
        HClass(1, (1, 1))


ints = st.integers(-20, 20)
classes = st.builds(lambda a0, t: HClass(a0, t), ints, st.lists(ints, min_size=N, max_size=N))
moves = st.one_of(st.just(CREMONA), st.permutations(list(range(N))).map(lambda p: Permute(tuple(p))))
words = st.lists(moves, max_size=50)


@given(words, classes)
def test_words_preserve_forms(w, A):
    B = apply_word(w, A)
    K = canonical(N)
    assert pairing(B, B) == pairing(A, A)
    assert pairing(B, K) == pairing(A, K)


@settings(max_examples=100)
@given(words, classes, classes)
def test_adjoint_duality(w, A, B):
    assert pairing(apply_word(w, A), B) == pairing(A, adjoint_apply(w, B))


@given(words, classes)
def test_adjoint_inverts(w, A):
    assert adjoint_apply(w, apply_word(w, A)) == A


@given(classes)
def test_cremona_involution(A):
    assert cremona(cremona(A)) == A


@given(classes, classes)
def test_reflect_involution(A, r):
    if pairing(r, r) in (-1, -2, 1, 2):
        assert reflect(reflect(A, r), r) == A


@given(classes)
def test_reorder_keeps_multiset(A):
    B, sigma = reorder(A)
    assert B.a0 == A.a0 and sorted(B.tail) == sorted(A.tail)
    assert list(B.tail) == sorted(A.tail, reverse=True)
