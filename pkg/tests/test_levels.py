import random
from fractions import Fraction as F

import pytest

from qvdc import levels
from qvdc.levels import LevelProblem, Variant, gamma_of_theta, level_max_gamma, validity_range
from qvdc.pairs import SEED, apply_word

PIECES = [
    ("A", F(1, 2), F(16, 17), lambda t: (19 - 18 * t) / 14),
    ("A2", F(1, 2), F(8, 9), lambda t: (86 - 83 * t) / 60),
    ("A3", F(1, 2), F(112, 131), lambda t: (91 - 89 * t) / 62),
]


def grid_optimum(pair, theta, variant, family, n=400):
    """Crude oracle: best alpha + beta over a rational grid of feasible points."""
    cons = levels.constraints(pair, variant, family)
    best = None
    for i in range(n + 1):
        a = F(i, n)
        for j in range(n + 1):
            b = F(3 * j, 2 * n)
            if all(c.slack(a, b, theta) >= 0 for c in cons):
                if best is None or a + b > best:
                    best = a + b
    return best


@pytest.mark.parametrize("word, lo, hi, formula", PIECES)
def test_pieces_symbolic(word, lo, hi, formula):
    rng = random.Random(word)
    pair = apply_word(word)
    for _ in range(20):
        theta = lo + (hi - lo) * F(rng.randrange(1, 10**6), 10**6)
        r = level_max_gamma(LevelProblem(theta, pair))
        assert r.gamma == formula(theta)


def test_validity_ranges_table2():
    got = [validity_range(apply_word(w)) for w in ("A", "A2", "A3")]
    assert got == [F(16, 17), F(8, 9), F(112, 131)]


def test_validity_ranges_as_stated_differ():
    got = [validity_range(apply_word(w), Variant.AsStated) for w in ("A", "A2", "A3")]
    assert got == [F(8, 9), F(4, 5), F(56, 75)]


def test_gamma_labels():
    assert gamma_of_theta(F(1, 2)) == F(3, 4)
    assert gamma_of_theta(F(64, 97)) == F(101, 194)
    assert gamma_of_theta(F(32, 41)) == F(29, 82)
    assert levels.gamma_left_limit(F(16, 17)) == F(5, 34)


def test_gamma_matches_formula_on_grid():
    t = F(1, 2)
    while t < F(16, 17):
        assert gamma_of_theta(t) == levels.gamma_formula(t)
        t += F(1, 97)


def test_gamma_domain():
    with pytest.raises(ValueError):
        gamma_of_theta(F(16, 17))
    with pytest.raises(ValueError):
        gamma_of_theta(F(2, 5))


@pytest.mark.parametrize("word", ["A", "A2", "BA2"])
@pytest.mark.parametrize("theta", [F(1, 2), F(3, 5), F(7, 10)])
def test_vertex_beats_grid(word, theta):
    pair = apply_word(word)
    r = level_max_gamma(LevelProblem(theta, pair, Variant.Table2, None))
    g = grid_optimum(pair, theta, Variant.Table2, None, n=120)
    assert r.feasible
    assert g <= r.gamma <= g + F(3, 120)


def test_infeasible_and_seed():
    with pytest.raises(ValueError):
        LevelProblem(F(1, 2), SEED)
    with pytest.raises(ValueError):
        LevelProblem(F(3, 2), apply_word("A"))


def test_gamma_curve_includes_left_limit():
    rows = levels.gamma_curve(F(15, 17), F(16, 17), F(1, 17))
    assert rows[-1] == (F(16, 17), F(5, 34))
    assert levels.bt_constant(F(1, 2)) == F(8, 3)


def test_optimal_split_balances():
    t = apply_word("A")
    q1, q2 = levels.optimal_split(1e12, 1e5, t)
    assert q1 * q2 == pytest.approx(1e12)
    k, l = float(t.kappa), float(t.lam)
    # q1^(k+1) = q N^(k-l)
    assert q1 ** (k + 1) == pytest.approx(1e12 * 1e5 ** (k - l), rel=1e-9)


def test_bound_evals_positive():
    assert levels.bound_eval_AkB([100.0, 200.0], 1.0, 50.0, 1.0) > 0
    assert levels.bound_eval_BAkB([100.0, 200.0], 1.0, 50.0, 1.0) > 0
    with pytest.raises(ValueError):
        levels.bound_eval_AkB([], 1.0, 50.0, 1.0)
