import cmath
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qvdc import quadratic as qd
from qvdc.ntheory import factorize


def test_roots_examples():
    assert qd.roots_minus_one(5).roots == (2, 3)
    assert qd.roots_minus_one(65).roots == (8, 18, 47, 57)
    assert qd.roots_minus_one(2).roots == (1,)
    assert qd.roots_minus_one(1).roots == (0,)
    assert qd.roots_minus_one(4).rho == 0
    assert qd.roots_minus_one(21).rho == 0
    assert qd.roots_minus_one(125).roots == (57, 68)


def test_sqrt_minus_one():
    for p in (5, 13, 17, 29, 1000033 if 1000033 % 4 == 1 else 1000037):
        if p % 4 == 1:
            r = qd.sqrt_minus_one_mod_p(p)
            assert (r * r + 1) % p == 0
    with pytest.raises(ValueError):
        qd.sqrt_minus_one_mod_p(7)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 20000))
def test_roots_vs_bruteforce(ell):
    assert qd.roots_minus_one(ell) == qd.roots_minus_one_bruteforce(ell)


def test_roots_sampled_large():
    rng = random.Random(4)
    for _ in range(20):
        ell = rng.randint(10**5, 2 * 10**6)
        assert qd.roots_minus_one(ell) == qd.roots_minus_one_bruteforce(ell)


def test_two_squares():
    assert [(r.r, r.s) for r in qd.two_squares(5)] == [(1, 2), (2, 1)]
    assert [(r.r, r.s) for r in qd.two_squares(65)] == [(1, 8), (4, 7), (7, 4), (8, 1)]
    assert qd.two_squares(25) == [qd.TwoSquaresRep(3, 4, 25), qd.TwoSquaresRep(4, 3, 25)]
    assert qd.two_squares(3) == []
    with pytest.raises(ValueError):
        qd.TwoSquaresRep(2, 2, 8)


def test_rep_count_matches_rho():
    for ell in range(2, 3000):
        assert len(qd.two_squares(ell)) == qd.roots_minus_one(ell).rho


def test_correspondence_examples():
    pairing = qd.correspondence(65)
    assert set(pairing) == {8, 18, 47, 57}
    for a, rep in pairing.items():
        assert qd.rep_fraction(rep) == F(a, 65)
    with pytest.raises(ValueError):
        qd.correspondence(3)


def test_correspondence_range():
    for ell in range(2, 2500):
        if qd.roots_minus_one(ell).rho:
            qd.correspondence(ell)


def test_weyl_rho_against_definition():
    for ell in (5, 65, 130):
        roots = qd.roots_minus_one(ell).roots
        for n in (0, 1, 7):
            want = sum(cmath.exp(2j * math.pi * a * n / ell) for a in roots)
            assert abs(qd.weyl_rho(n, ell) - want) < 1e-12
    assert qd.weyl_rho(0, 65) == pytest.approx(4)


def _squarefree(n):
    return all(e == 1 for _, e in factorize(n))


def test_decomposition_random():
    rng = random.Random(9)
    done = 0
    while done < 150:
        ell = rng.randint(2, 5000)
        roots = qd.roots_minus_one(ell).roots
        d = rng.randint(1, 3000)
        if not roots or math.gcd(d, ell) != 1:
            continue
        rep = qd.decompose_fraction(d, rng.choice(roots), ell)
        assert rep.exact, rep
        assert rep.d1 * rep.d2 == d
        assert (rep.rhs_two_term is not None) == _squarefree(d)
        done += 1


def test_decomposition_guards():
    with pytest.raises(ValueError):
        qd.decompose_fraction(5, 2, 5)
    with pytest.raises(ValueError):
        qd.decompose_fraction(3, 4, 5)
