"""Linear sieve functions F, f and the quadratic Brun-Titchmarsh constant.

The functions solve

    s F(s) = 2 e^gamma              (0 < s <= 3),   (s F(s))' = f(s - 1)  (s > 3),
    s f(s) = 0                      (0 < s <= 2),   (s f(s))' = F(s - 1)  (s > 2).

The grid step divides 1, so the delayed integrand on each unit interval
[m, m + 1] is a table slice computed on the previous interval.  Both
F and f are smooth inside unit intervals (only derivatives jump at the
integers), so each interval is integrated on its own with composite
Simpson and the 3/8 rule for odd sample counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .levels import gamma_of_theta
from .ntheory import crt_pair, poisson_check
from .quadratic import roots_minus_one
from .windows import Window, get_window

EULER_GAMMA = 0.577215664901532860606512090082
TWO_EG = 2 * math.exp(EULER_GAMMA)

MAX_STEP = 1 / 64


def F_closed(s):
    """2 e^gamma / s, valid on (0, 3]."""
    return TWO_EG / np.asarray(s, dtype=np.float64)


def f_closed(s):
    """2 e^gamma log(s - 1) / s on [2, 4], zero below 2."""
    s = np.asarray(s, dtype=np.float64)
    return np.where(s <= 2, 0.0, TWO_EG * np.log(np.maximum(s - 1, 1.0)) / s)


def _cumulative(y: np.ndarray, h: float) -> np.ndarray:
    """I[j] = integral of the interpolant of y over [0, j h], fourth order."""
    n = len(y) - 1
    out = np.zeros(n + 1)
    if n >= 2:
        pairs = h / 3 * (y[0:-2:2] + 4 * y[1:-1:2] + y[2::2])
        out[2::2] = np.cumsum(pairs)
    if n == 2:
        out[1] = h * (5 * y[0] + 8 * y[1] - y[2]) / 12
    if n >= 3:
        out[1] = h * (9 * y[0] + 19 * y[1] - 5 * y[2] + y[3]) / 24
        j = np.arange(3, n + 1, 2)
        out[j] = out[j - 3] + 3 * h / 8 * (y[j - 3] + 3 * y[j - 2] + 3 * y[j - 1] + y[j])
    return out


@dataclass
class SieveTable:
    s_max: float
    h: float
    s: np.ndarray  # grid from 1 to s_max
    F_values: np.ndarray
    f_values: np.ndarray

    @property
    def per_unit(self) -> int:
        return round(1 / self.h)

    def _lookup(self, values: np.ndarray, x: float) -> float:
        """Cubic Lagrange interpolation using nodes from x's own unit interval."""
        if not 1 <= x <= self.s_max:
            raise ValueError(f"s = {x} outside the table range [1, {self.s_max}]")
        n = self.per_unit
        pos = (x - 1) * n
        i = int(round(pos))
        if abs(pos - i) < 1e-9:
            return float(values[i])
        base = int(math.floor(pos))
        unit = base // n
        lo_unit, hi_unit = unit * n, min(unit * n + n, len(values) - 1)
        start = min(max(base - 1, lo_unit), hi_unit - 3)
        nodes = np.arange(start, start + 4)
        xs = nodes.astype(np.float64)
        total = 0.0
        for k in range(4):
            w = 1.0
            for m in range(4):
                if m != k:
                    w *= (pos - xs[m]) / (xs[k] - xs[m])
            total += w * values[nodes[k]]
        return float(total)

    def F(self, x: float, *, grid: bool = False) -> float:
        """F(x); ``grid=True`` reads the solver table even where F is closed form."""
        if 0 < x <= 3 and not (grid and x >= 1):
            return float(TWO_EG / x)
        return self._lookup(self.F_values, x)

    def f(self, x: float, *, grid: bool = False) -> float:
        if 0 < x <= 2 and not (grid and x >= 1):
            return 0.0
        return self._lookup(self.f_values, x)

    def rows(self, stride: int = 1):
        for i in range(0, len(self.s), stride):
            yield float(self.s[i]), float(self.F_values[i]), float(self.f_values[i])


def build_table(s_max: float = 12.0, h: float = 1 / 1024) -> SieveTable:
    if h > MAX_STEP:
        raise ValueError(f"step {h} is too coarse; need h <= 1/64")
    n = round(1 / h)
    if abs(n * h - 1) > 1e-12 or n % 2:
        raise ValueError("1/h must be an even integer so breakpoints sit on the grid")
    if not 3 <= s_max <= 20:
        raise ValueError("s_max must lie in [3, 20]")
    units = math.ceil(s_max - 1)
    s = 1 + np.arange(units * n + 1) / n
    G = np.empty_like(s)  # s F(s)
    Hs = np.empty_like(s)  # s f(s)
    G[: 2 * n + 1] = TWO_EG  # s in [1, 3]
    Hs[: n + 1] = 0.0  # s in [1, 2]
    # unit interval [m, m + 1] occupies indices (m - 1) n ... m n
    for m in range(2, units + 1):
        a, b = (m - 1) * n, m * n
        F_prev = G[a - n : b - n + 1] / s[a - n : b - n + 1]
        Hs[a : b + 1] = Hs[a] + _cumulative(F_prev, h)
        if m >= 3:
            f_prev = Hs[a - n : b - n + 1] / s[a - n : b - n + 1]
            G[a : b + 1] = G[a] + _cumulative(f_prev, h)
    keep = s <= s_max + 1e-12
    return SieveTable(float(s_max), h, s[keep], (G / s)[keep], (Hs / s)[keep])


def richardson_delta(s_max: float = 10.0, h: float = 1 / 1024, points=None) -> float:
    """Largest change in F, f at sample points when the step is halved."""
    coarse, fine = build_table(s_max, h), build_table(s_max, h / 2)
    pts = points if points is not None else np.linspace(2.0, s_max, 97)
    return max(
        max(abs(coarse.F(x) - fine.F(x)), abs(coarse.f(x) - fine.f(x))) for x in pts
    )


def bt_upper_constant(theta) -> Fraction:
    return 2 / gamma_of_theta(theta)


@dataclass(frozen=True)
class CongruenceReport:
    A_d: float
    main: float
    remainder: float
    poisson: float
    poisson_diff: float
    tail_bound: float

    @property
    def passed(self) -> bool:
        return self.poisson_diff <= self.tail_bound


def congruence_sum_check(X: float, d: int, ell: int, g: Window | str = "bump") -> CongruenceReport:
    """A_d = sum over n = 0 mod d with n^2 + 1 = 0 mod l of g(n / X).

    The main term is g_hat(0) rho(l) X / (d l); the Poisson side sums, over
    each root, the dual series with H = ceil(2 d l X^(-0.9)) frequencies.
    """
    if math.gcd(d, ell) != 1:
        raise ValueError("need gcd(d, ell) = 1")
    if X > 1e7 or X <= 0:
        raise ValueError("X must lie in (0, 10^7]")
    win = get_window(g) if isinstance(g, str) else g
    roots = roots_minus_one(ell).roots
    q = d * ell
    A = 0.0
    dual = 0.0
    bound = 0.0
    for a in roots:
        b, _ = crt_pair(0, d, a, ell)
        lhs, rhs, _, tail = poisson_check(win, X, q, b)
        A += lhs
        dual += rhs.real
        bound += tail
    main = float(win.ft(0.0)[0].real) * len(roots) * X / q
    return CongruenceReport(A, main, A - main, dual, abs(A - dual), bound)
