import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qvdc import trace
from qvdc.ntheory import primitive_root
from qvdc.pairs import apply_word
from qvdc.trace import (
    AdditiveRational,
    CompositeTraceSpec,
    HyperKloosterman,
    MultiplicativeChar,
    Table,
    eval_composite,
    eval_trace,
    fourier_transform_p,
    incomplete_sum,
)

SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def e(x):
    return cmath.exp(2j * math.pi * x)


def additive_direct(f1, f2, p, x):
    num = sum(c * x**i for i, c in enumerate(f1)) % p
    den = sum(c * x**i for i, c in enumerate(f2)) % p
    if den == 0:
        return 0j
    return e(num * pow(den, -1, p) % p / p)


def mult_direct(r, f, p, x):
    v = sum(c * x**i for i, c in enumerate(f)) % p
    if v == 0:
        return 0j
    g = primitive_root(p)
    ind = next(k for k in range(p - 1) if pow(g, k, p) == v)
    return e(r * ind / (p - 1))


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from(SMALL_PRIMES),
    st.lists(st.integers(-20, 20), min_size=1, max_size=4),
    st.lists(st.integers(-20, 20), min_size=1, max_size=3),
)
def test_additive_matches_direct(p, f1, f2):
    if all(c % p == 0 for c in f2):
        return
    spec = AdditiveRational(tuple(f1), tuple(f2))
    for x in range(p):
        assert abs(eval_trace(spec, p, x) - additive_direct(f1, f2, p, x)) < 1e-12


@pytest.mark.parametrize("p", [3, 7, 31])
@pytest.mark.parametrize("r, f", [(1, (0, 1)), (3, (1, 0, 1)), (2, (5, 2))])
def test_multiplicative_matches_direct(p, r, f):
    spec = MultiplicativeChar(r, f)
    for x in range(p):
        assert abs(eval_trace(spec, p, x) - mult_direct(r, f, p, x)) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("p", [5, 7, 13])
def test_kloosterman_line_vs_bruteforce(k, p):
    line = trace.kloosterman_line(k, p)
    for x in range(p):
        assert abs(line[x] - trace.kloosterman_bruteforce(k, x, p)) < 1e-12


def test_kloosterman_examples():
    # Kl_2(0) = -1/sqrt(p); Kl_2(1, 5) is real
    assert trace.kloosterman_line(2, 5)[0] == pytest.approx(-1 / math.sqrt(5))
    assert abs(trace.kloosterman_line(2, 5)[1].imag) < 1e-12
    assert trace.kloosterman_line(2, 5)[1].real == pytest.approx(0.17082039, abs=1e-8)


def test_kloosterman_weil_bound():
    for p in (101, 199):
        for k in (2, 3):
            assert np.abs(trace.kloosterman_line(k, p)[1:]).max() <= k + 1e-9


def test_line_is_read_only_and_cached():
    spec = HyperKloosterman(2)
    v = spec.values(7)
    with pytest.raises(ValueError):
        v[0] = 1
    assert spec.values(7) is v


def test_table_and_conductors():
    t = Table(tuple(range(5)))
    assert eval_trace(t, 5, 7) == 2
    assert t.conductor == 5
    assert AdditiveRational((0, 0, 1), (1, 1)).conductor == 4
    assert MultiplicativeChar(1, (1, 0, 1), conductor_bound=9).conductor == 9
    assert HyperKloosterman(3).conductor == 6
    with pytest.raises(ValueError):
        eval_trace(t, 7, 0)


def test_non_prime_rejected():
    with pytest.raises(ValueError):
        eval_trace(HyperKloosterman(2), 9, 1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([5, 7, 11, 101, 499]), st.integers(0, 2**32))
def test_fourier_vs_naive_and_involution(p, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=p) + 1j * rng.normal(size=p)
    ft = fourier_transform_p(f, p)
    if p <= 101:
        x = np.arange(p)
        for t in range(0, p, max(1, p // 7)):
            naive = -np.sum(f * np.exp(2j * np.pi * t * x / p)) / math.sqrt(p)
            assert abs(ft[t] - naive) < 1e-9
    back = fourier_transform_p(ft, p)
    assert np.allclose(back, f[(-np.arange(p)) % p], atol=1e-9)
    assert np.linalg.norm(ft) == pytest.approx(np.linalg.norm(f), rel=1e-9)


def test_fourier_shape_check():
    with pytest.raises(ValueError):
        fourier_transform_p(np.zeros(4), 5)


def _comp():
    return CompositeTraceSpec(
        (3, 5, 7),
        {3: MultiplicativeChar(1), 5: HyperKloosterman(2), 7: AdditiveRational((1, 2), (0, 1))},
    )


def test_incomplete_sum_vs_loop():
    spec = _comp()
    for M, N in [(0, 1), (0, 105), (17, 300), (10**6, 2000)]:
        naive = sum(eval_composite(spec, n) for n in range(M + 1, M + N + 1))
        assert abs(incomplete_sum(spec, M, N) - naive) < 1e-9


def test_full_period_matches_product():
    spec = _comp()
    assert abs(incomplete_sum(spec, 0, spec.q) - trace.complete_sum_product(spec)) < 1e-9


def test_incomplete_sum_thread_invariance():
    spec = trace.fraction_phase(5, (101, 103, 107))
    N = 3 * trace.BLOCK + 12345
    ref = incomplete_sum(spec, 99, N, workers=1)
    for w in (2, 3, 8):
        assert incomplete_sum(spec, 99, N, workers=w) == ref


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("VDC_THREADS", "3")
    assert trace.thread_count() == 3
    assert trace.thread_count(5) == 5
    monkeypatch.setenv("VDC_THREADS", "x")
    with pytest.raises(ValueError):
        trace.thread_count()


def test_pairwise_sum_order_fixed():
    v = np.array([1e16, 1.0, -1e16, 1.0])
    assert trace.pairwise_sum(v) == (1e16 + 1.0) + (-1e16 + 1.0)
    assert trace.pairwise_sum(np.array([])) == 0


def test_fraction_phase_matches_definition():
    primes = (3, 5, 7)
    q = 105
    spec = trace.fraction_phase(2, primes)
    for n in range(1, q):
        want = e(2 * pow(n, -1, q) / q) if math.gcd(n, q) == 1 else None
        got = eval_composite(spec, n)
        if want is None:
            assert got == 0
        else:
            assert abs(got - want) < 1e-12
    lin = trace.fraction_phase(2, primes, inverse=False)
    assert abs(eval_composite(lin, 11) - e(22 / q)) < 1e-12


def test_composite_validation():
    with pytest.raises(ValueError):
        CompositeTraceSpec((3, 3), {3: HyperKloosterman(2)})
    with pytest.raises(ValueError):
        CompositeTraceSpec((4,), {4: HyperKloosterman(2)})
    with pytest.raises(ValueError):
        CompositeTraceSpec((3, 5), {3: HyperKloosterman(2)})


def test_quasi_orthogonality_cases():
    p = 101
    same = trace.quasi_orthogonality_check(HyperKloosterman(2), HyperKloosterman(2), p)
    assert same.proportional and abs(same.alpha - 1) < 1e-9 and same.passed
    other = trace.quasi_orthogonality_check(AdditiveRational((0, 1)), AdditiveRational((0, 2)), p)
    assert not other.proportional and other.lhs < 1e-9
    mixed = trace.quasi_orthogonality_check(HyperKloosterman(2), MultiplicativeChar(1, (1, 0, 1)), p)
    assert mixed.passed


def test_weyl_differencing_random():
    rng = random.Random(5)
    for _ in range(40):
        q1, q2 = rng.choice([(5, 7), (7, 3), (11, 4), (9, 10)])
        a1 = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(q1)]
        a2 = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(q2)]
        lhs, rhs, ok = trace.weyl_differencing_check(a1, a2, rng.randrange(100), rng.randrange(1, 80))
        assert ok, (lhs, rhs)


def test_weyl_differencing_equality_case():
    lhs, rhs, ok = trace.weyl_differencing_check([1, 1, 1], [1, 1, 1, 1, 1], 0, 20)
    assert lhs == 400 and rhs == 400 and ok
    with pytest.raises(ValueError):
        trace.weyl_differencing_check([1, 1], [1, 1], 0, 5)


def test_empirical_pair_check_small():
    spec = trace.fraction_phase(3, (3, 5, 7, 11, 13))
    rep = trace.empirical_pair_check(spec, apply_word("A"), [100, 1000], shifts=8)
    assert len(rep.rows) == 2
    assert 0 < rep.max_ratio < 50
    assert rep.to_json()["pair"]["kappa"] == "1/6"


def test_parse_trace_spec():
    s = trace.parse_trace_spec("addrat:f1=1,0,1;f2=0,1")
    assert s == AdditiveRational((1, 0, 1), (0, 1))
    assert trace.parse_trace_spec("mult:r=2;f=0,1") == MultiplicativeChar(2, (0, 1))
    assert trace.parse_trace_spec("kloo:k=3") == HyperKloosterman(3)
    c = trace.parse_trace_spec("q=3*5;3=mult:r=2;f=0,1;5=kloo:k=2")
    assert c.q == 15 and c.per_prime[5] == HyperKloosterman(2)
    for bad in ["", "foo:k=1", "kloo:k", "q=3*5;7=kloo:k=2;3=kloo:k=2;5=kloo:k=2"]:
        with pytest.raises(ValueError):
            trace.parse_trace_spec(bad)
