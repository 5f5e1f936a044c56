from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qvdc import pairs
from qvdc.pairs import (
    SEED,
    ExponentTriple,
    ProcessWord,
    apply_A,
    apply_B,
    apply_word,
    inverse_A,
    triple,
)

TABLE = {
    "A": (F(1, 6), F(2, 3)),
    "A2": (F(1, 14), F(11, 14)),
    "A3": (F(1, 30), F(13, 15)),
    "BA2": (F(2, 7), F(4, 7)),
    "BA3": (F(11, 30), F(8, 15)),
    "ABA2": (F(1, 9), F(13, 18)),
    "A2BA2": (F(1, 20), F(33, 40)),
    "BABA2": (F(2, 9), F(11, 18)),
}


@pytest.mark.parametrize("word, expected", sorted(TABLE.items()))
def test_listed_words(word, expected):
    assert apply_word(word).pair == expected


def test_table_words_match_listing():
    assert set(pairs.table1_words()) == set(TABLE)


def test_long_word_exact():
    t = apply_word("BA3BA2BABABA2")
    assert (t.kappa, t.lam) == (F(591, 1535), F(808, 1535))


def test_seed_maps():
    assert apply_A(SEED) == triple(F(1, 6), F(2, 3), F(1, 2))
    assert apply_B(SEED) == triple(0, 1, 0)


def test_parse_and_compact_roundtrip():
    w = ProcessWord.parse("BA3BA2BABABA2")
    assert w.letters == "BAAABAABABABAA"
    assert w.compact() == "BA3BA2BABABA2"
    assert ProcessWord.parse(" A 2 ").letters == "AA"


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        ProcessWord.parse("AC")
    with pytest.raises(ValueError):
        ProcessWord("AX")


def test_canonical_cancels_bb():
    assert ProcessWord("ABBA").canonical().letters == "AA"
    assert ProcessWord("BBB").canonical().letters == "B"
    assert apply_word("ABBA") == apply_word("A2")


def test_words_apply_right_to_left():
    # "AB" means B first, then A
    assert apply_word("AB") == apply_A(apply_B(SEED))
    assert apply_word("BA") == apply_B(apply_A(SEED))


def test_out_of_box_rejected():
    with pytest.raises(ValueError):
        apply_B(triple(F(9, 10), F(1, 5)))
    with pytest.raises(ValueError):
        inverse_A(SEED)


def test_json_roundtrip():
    t = apply_word("BA3")
    assert ExponentTriple.from_json(t.to_json()) == t


def test_bbfree_enumeration_counts():
    words = list(pairs.bbfree_words(6))
    assert all("BB" not in w.letters for w in words)
    assert len({w.letters for w in words}) == len(words)
    # counts per length follow the Fibonacci recursion
    by_len = [sum(1 for w in words if len(w) == n) for n in range(7)]
    assert by_len[:3] == [1, 2, 3]
    for n in range(3, 7):
        assert by_len[n] == by_len[n - 1] + by_len[n - 2]


def test_box_closure_short_words():
    for w in pairs.bbfree_words(10):
        assert apply_word(w).in_box(), w


def test_sequence_ops():
    s = pairs.sequence_apply_A(pairs.sequence_initial())
    assert len(s) == 2
    assert s[0] == ExponentTriple(F(1, 2), F(1), F(0))
    assert s[1] == ExponentTriple(F(1, 4), F(3, 4), F(1, 2))
    akb = pairs.sequence_AkB(3)
    assert [e.kappa for e in akb] == [F(1, 2), F(1, 4), F(1, 8)]
    assert akb[-1].lam == F(7, 8)
    with pytest.raises(ValueError):
        pairs.sequence_AkB(0)


def test_constraint_check_logs():
    t = apply_word("A")
    assert pairs.constraint_check(t, "Ak", 1e30, 1e10, 1.0)
    assert not pairs.constraint_check(t, "Ak", 10.0, 10.0, 1e40)
    with pytest.raises(ValueError):
        pairs.constraint_check(SEED, "Ak", 10, 10, 10)
    with pytest.raises(ValueError):
        pairs.constraint_check(t, "Zk", 10, 10, 10)


fractions_01 = st.fractions(min_value=0, max_value=1, max_denominator=10**6)


@st.composite
def box_triples(draw):
    k = draw(st.fractions(min_value=0, max_value=F(1, 2), max_denominator=10**6))
    l = draw(st.fractions(min_value=max(k, F(1, 2)), max_value=1, max_denominator=10**6))
    nu = draw(fractions_01)
    return triple(k, l, nu)


@settings(max_examples=300, deadline=None)
@given(box_triples())
def test_b_is_involution(t):
    assert apply_B(apply_B(t)) == t


@settings(max_examples=300, deadline=None)
@given(box_triples())
def test_inverse_a_undoes_a(t):
    assert inverse_A(apply_A(t)) == t


@settings(max_examples=200, deadline=None)
@given(box_triples())
def test_maps_preserve_box(t):
    assert apply_A(t).in_box()
    assert apply_B(t).in_box()


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet="AB", max_size=12))
def test_canonical_preserves_value(letters):
    w = ProcessWord(letters)
    assert apply_word(w) == apply_word(w.canonical())
