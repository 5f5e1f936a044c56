import math

import numpy as np
import pytest

from qvdc import sieve
from qvdc.sieve import TWO_EG, build_table


@pytest.fixture(scope="module")
def table():
    return build_table(12.0, 1 / 1024)


def test_closed_forms(table):
    for s in np.linspace(1.0, 3.0, 41):
        assert abs(table.F(s, grid=True) - TWO_EG / s) < 1e-10
    for s in np.linspace(2.0, 4.0, 57):
        assert abs(table.f(s, grid=True) - float(sieve.f_closed(s))) < 1e-10
    assert table.F(0.5) == TWO_EG / 0.5


def test_F_beyond_three_by_quadrature(table):
    # s F(s) = 2 e^gamma + int_3^s f(t - 1) dt with f(t - 1) in closed form
    for s in (3.5, 4.2, 5.0):
        t = np.linspace(3.0, s, 200001)
        y = sieve.f_closed(t - 1)
        integral = (t[1] - t[0]) * (y.sum() - (y[0] + y[-1]) / 2)
        assert table.F(s) == pytest.approx((TWO_EG + integral) / s, abs=1e-9)


def test_reference_values(table):
    assert table.F(1.5) == pytest.approx(2.37476322, abs=1e-8)
    assert table.F(3) == pytest.approx(1.18738161, abs=1e-8)
    assert table.f(3) == pytest.approx(0.82303022, abs=1e-8)


def test_convergence_to_one(table):
    assert abs(table.F(10) - 1) < 1e-3
    assert abs(table.f(10) - 1) < 1e-3
    assert table.f(10) < 1 < table.F(10)


def test_delay_equations_hold(table):
    # (s F(s))' = f(s - 1) and (s f(s))' = F(s - 1), checked by central differences
    h = 1e-4
    for s in (3.7, 5.2, 8.9):
        dG = ((s + h) * table.F(s + h) - (s - h) * table.F(s - h)) / (2 * h)
        dH = ((s + h) * table.f(s + h) - (s - h) * table.f(s - h)) / (2 * h)
        assert dG == pytest.approx(table.f(s - 1), abs=1e-6)
        assert dH == pytest.approx(table.F(s - 1), abs=1e-6)


def test_monotone(table):
    F_vals = np.array([table.F(s) for s in np.linspace(3, 12, 200)])
    f_vals = np.array([table.f(s) for s in np.linspace(2, 12, 200)])
    assert np.all(np.diff(F_vals) <= 1e-12)
    assert np.all(np.diff(f_vals) >= -1e-12)


def test_richardson():
    assert sieve.richardson_delta(10.0, 1 / 256) < 1e-8


def test_cumulative_rule_exact_on_cubics():
    h = 0.1
    for n in (3, 4, 7, 10):
        x = np.arange(n + 1) * h
        y = 1 + 2 * x - x**2 + 3 * x**3
        exact = x + x**2 - x**3 / 3 + 0.75 * x**4
        assert np.allclose(sieve._cumulative(y, h), exact, atol=1e-12)
    # three samples: exact for quadratics
    x = np.arange(3) * h
    assert np.allclose(sieve._cumulative(1 + x - 2 * x**2, h), x + x**2 / 2 - 2 * x**3 / 3, atol=1e-12)


def test_table_guards(table):
    with pytest.raises(ValueError):
        build_table(12, 1 / 32)
    with pytest.raises(ValueError):
        build_table(12, 1 / 99)
    with pytest.raises(ValueError):
        build_table(2, 1 / 64)
    with pytest.raises(ValueError):
        table.F(13)
    assert table.f(1.5) == 0.0


def test_rows_stride(table):
    rows = list(table.rows(stride=1024))
    assert rows[0][0] == 1.0 and rows[-1][0] == 12.0
    assert len(rows) == 12


def test_bt_constant():
    from fractions import Fraction as F

    assert sieve.bt_upper_constant(F(1, 2)) == F(8, 3)
    assert sieve.bt_upper_constant(F(64, 97)) == F(388, 101)


@pytest.mark.parametrize("X, d, ell", [(1e4, 3, 5), (5e4, 7, 65), (2e4, 1, 13)])
def test_congruence_sum(X, d, ell):
    rep = sieve.congruence_sum_check(X, d, ell)
    assert rep.passed
    direct = 0.0
    from qvdc.windows import get_window

    g = get_window("bump")
    for n in range(math.ceil(X), math.floor(2 * X) + 1):
        if n % d == 0 and (n * n + 1) % ell == 0:
            direct += float(g(np.array([n / X]))[0])
    assert rep.A_d == pytest.approx(direct, rel=1e-12, abs=1e-12)
    assert abs(rep.remainder) < 0.05 * rep.main + 1


def test_congruence_guards():
    with pytest.raises(ValueError):
        sieve.congruence_sum_check(1e4, 5, 5)
    with pytest.raises(ValueError):
        sieve.congruence_sum_check(1e8, 1, 5)
