"""Compactly supported smooth windows on [1, 2] with their Fourier transforms.

Convention: ``ft(xi) = integral g(x) e(-x xi) dx`` with ``e(t) = exp(2 pi i t)``.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

# Every derivative of each window vanishes (bump) or the first four vanish
# (plateau) at the support endpoints, so the uniform trapezoid rule is
# spectrally accurate for the transform.
_FT_NODES = 1 << 13


class Window:
    name = "window"
    support = (1.0, 2.0)
    max_order = 8

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    def derivative_l1(self, k: int) -> float:
        """Upper estimate of the L1 norm of the k-th derivative."""
        raise NotImplementedError

    def _nodes(self, xi_max: float):
        lo, hi = self.support
        m = max(_FT_NODES, int(64 * xi_max * (hi - lo)))
        x = np.linspace(lo, hi, m + 1)
        return x, self(x), (hi - lo) / m

    def ft(self, xi) -> np.ndarray:
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        x, gx, h = self._nodes(float(np.max(np.abs(xi))) if xi.size else 0.0)
        out = np.empty(xi.shape, dtype=np.complex128)
        flat_xi, flat_out = xi.ravel(), out.reshape(-1)
        # chunk so the phase matrix stays small
        step = max(1, (1 << 22) // len(x))
        for s in range(0, len(flat_xi), step):
            ph = np.exp(-2j * np.pi * np.outer(flat_xi[s : s + step], x))
            flat_out[s : s + step] = h * (ph @ gx)
        return out

    def tail_bound(self, scale: float, H: int) -> float:
        """Bound for scale * sum_{|h| > H} |ft(h * scale)|.

        Uses |ft(xi)| <= ||g^(k)||_1 / (2 pi |xi|)^k and the integral bound
        sum_{h > H} h^-k <= H^(1-k)/(k-1), minimised over k.  For H = 0
        the zeta bound k/(k-1) replaces the integral bound.
        """
        best = math.inf
        for k in range(2, self.max_order + 1):
            c = self.derivative_l1(k)
            tail = H ** (1 - k) / (k - 1) if H >= 1 else k / (k - 1)
            b = 2 * scale * c * (2 * math.pi * scale) ** (-k) * tail
            best = min(best, b)
        return best


class Bump(Window):
    """exp(-1/(1 - u^2)) with u = 2x - 3, a C-infinity bump on (1, 2)."""

    name = "bump"
    max_order = 12

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        u = 2 * x - 3
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    @cached_property
    def _derivs(self) -> dict[int, float]:
        # spectral differentiation on a periodic extension (the function is
        # flat to all orders at the endpoints); 2% headroom on the norms
        m = 1 << 15
        lo, period = 0.5, 2.0
        x = lo + period * np.arange(m) / m
        coeffs = np.fft.rfft(self(x))
        freq = 2j * np.pi * np.fft.rfftfreq(m, d=period / m)
        out = {}
        for k in range(0, self.max_order + 1):
            d = np.fft.irfft(coeffs * freq**k, n=m)
            out[k] = 1.02 * float(np.abs(d).sum() * period / m)
        return out

    def derivative_l1(self, k: int) -> float:
        return self._derivs[k]


def _smootherstep() -> Polynomial:
    # 126t^5 - 420t^6 + 540t^7 - 315t^8 + 70t^9: C^4 step from 0 to 1
    return Polynomial([0, 0, 0, 0, 0, 126, -420, 540, -315, 70])


class Plateau(Window):
    """Piecewise polynomial: rises on [1, 1+w], flat 1, falls on [2-w, 2]."""

    name = "plateau"
    max_order = 5

    def __init__(self, ramp: float = 0.25):
        if not 0 < ramp <= 0.5:
            raise ValueError("ramp width must be in (0, 1/2]")
        self.ramp = ramp
        self._step = _smootherstep()

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        w = self.ramp
        up = np.clip((x - 1.0) / w, 0.0, 1.0)
        down = np.clip((2.0 - x) / w, 0.0, 1.0)
        out = self._step(up) * self._step(down)
        out[(x <= 1.0) | (x >= 2.0)] = 0.0
        return out

    def derivative_l1(self, k: int) -> float:
        # each ramp contributes w^(1-k) * int_0^1 |s^(k)(t)| dt; the plateau
        # itself contributes nothing for k >= 1.  The k = 5 derivative jumps
        # but is still integrable, which is all the estimate needs.
        w = self.ramp
        if k == 0:
            return 1.0
        t = np.linspace(0.0, 1.0, 20001)
        d = np.abs(self._step.deriv(k)(t))
        integral = float(np.trapezoid(d, t)) * 1.01
        return 2 * w ** (1 - k) * integral


WINDOWS = {"bump": Bump, "plateau": Plateau}


def get_window(name: str) -> Window:
    try:
        return WINDOWS[name]()
    except KeyError:
        raise ValueError(f"unknown window {name!r}; choose from {sorted(WINDOWS)}") from None
