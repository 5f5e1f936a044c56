from fractions import Fraction as F

import pytest

from qvdc import search
from qvdc.pairs import ProcessWord, apply_word, bbfree_words
from qvdc.search import Objective, optimize_word


def brute_best(obj: Objective, depth: int):
    best = None
    for w in bbfree_words(depth):
        t = apply_word(w)
        sc = obj.score(t.kappa, t.lam)
        if best is None or sc < best:
            best = sc
    return -best if obj.maximize else best


@pytest.mark.parametrize("obj", list(Objective))
@pytest.mark.parametrize("depth", [0, 1, 4, 9, 13])
def test_matches_exhaustive(obj, depth):
    rep = optimize_word(obj, depth, time_cap=None)
    assert rep.best_value == brute_best(obj, depth)
    t = rep.best_triple
    assert obj.evaluate(t.kappa, t.lam) == rep.best_value


def test_depth_zero_returns_seed():
    rep = optimize_word(Objective.MinKappaPlusLambda, 0)
    assert rep.best_word.letters == ""
    assert rep.best_value == 1
    assert rep.nodes_expanded == 0


def test_word_matrix_agrees_with_maps():
    for w in ["A", "B", "BA3", "ABA2", "BA3BA2BABABA2"]:
        m = search.word_matrix(ProcessWord.parse(w).letters)
        assert search._apply(m, search._SEED_VEC) == apply_word(w).pair


def test_box_bound_is_a_true_bound():
    # every word below a prefix scores no better than the prefix's bound
    for prefix in ["A", "BA", "AB", "ABA"]:
        m = search.word_matrix(prefix)
        for obj in Objective:
            b = search.box_bound(obj, m)
            for tail in bbfree_words(6):
                if prefix.endswith("B") and tail.letters.startswith("B"):
                    continue
                t = apply_word(prefix + tail.letters)
                assert obj.score(t.kappa, t.lam) >= b


def test_pruned_sample_is_sound():
    obj = Objective.MinKappaPlusLambda
    rep = optimize_word(obj, 24, time_cap=None, pruned_sample_size=32, seed=3)
    incumbent = obj.score(*rep.best_triple.pair)
    assert rep.pruned_sample
    for word, bound in rep.pruned_sample:
        assert bound >= incumbent
        assert search.reexpand_pruned(obj, word, incumbent)


def test_objective_names():
    assert Objective.from_name("divisor") is Objective.MaxDivisorLevel
    assert Objective.from_name("MinKappaPlusLambda") is Objective.MinKappaPlusLambda
    with pytest.raises(ValueError):
        Objective.from_name("nope")


def test_divisor_level_of_long_word():
    assert search.divisor_level(apply_word("BA3BA2BABABA2")) == F(55, 12756)
    assert F(55, 12756) >= F(1, 232)


def test_report_json():
    doc = optimize_word(Objective.MaxSubconvexDelta, 6).to_json()
    assert doc["objective"] == "subconvex"
    assert "/" in doc["best_value"]


def test_negative_depth():
    with pytest.raises(ValueError):
        optimize_word(Objective.MinKappaPlusLambda, -1)


def test_subconvex_delta_classical_pair():
    from qvdc.pairs import triple

    assert search.subconvex_delta(triple(F(11, 82), F(57, 82))) == F(7, 82)
    # lambda = 57/88 would not give 7/82
    assert search.subconvex_delta(triple(F(11, 82), F(57, 88))) != F(7, 82)
