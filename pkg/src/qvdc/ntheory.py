"""Number-theoretic kernels shared by the exponential-sum engines."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache, reduce
from math import gcd, isqrt
from typing import Iterable, Sequence

import numpy as np

# --------------------------------------------------------------------------
# Primality and factorisation
# --------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 10**6


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(_TRIAL_LIMIT))


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _pollard_rho(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        c = rng.randrange(1, n)
        f = lambda x: (x * x + c) % n  # noqa: E731
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = gcd(abs(x - y), n)
        if d != n:
            return d


@dataclass(frozen=True)
class Factorization:
    pairs: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return math.prod(p**e for p, e in self.pairs)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def omega(self) -> int:
        return len(self.pairs)

    def tau(self, k: int = 2) -> int:
        """Number of ordered factorisations into k positive factors."""
        return math.prod(math.comb(e + k - 1, k - 1) for _, e in self.pairs)

    def flat(self) -> int:
        return math.prod(p for p, e in self.pairs if e == 1)

    def sharp(self) -> int:
        return math.prod(p**e for p, e in self.pairs if e >= 2)

    def xi(self) -> int:
        return math.prod(p**e for p, e in self.pairs if e >= 4)

    def ddagger(self) -> int:
        """Product of p over p^2 || n and p^3 || n."""
        return math.prod(p for p, e in self.pairs if e in (2, 3))

    def __iter__(self):
        return iter(self.pairs)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    counts: dict[int, int] = {}
    m = n
    for p in _small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            counts[p] = e
    if m > 1:
        stack = [m]
        rng = random.Random(n)
        while stack:
            x = stack.pop()
            if x == 1:
                continue
            if is_prime(x):
                counts[x] = counts.get(x, 0) + 1
                continue
            r = isqrt(x)
            if r * r == x:
                stack += [r, r]
                continue
            d = _pollard_rho(x, rng)
            stack += [d, x // d]
    return Factorization(tuple(sorted(counts.items())))


def omega(n: int) -> int:
    return factorize(n).omega()


def tau(n: int, k: int = 2) -> int:
    return factorize(n).tau(k)


def split_flat_sharp(n: int) -> tuple[int, int]:
    """(squarefree part, squarefull part) with n = flat * sharp."""
    f = factorize(n)
    return f.flat(), f.sharp()


def xi(n: int) -> int:
    return factorize(n).xi()


def d_infinity(d: int, r: int) -> int:
    """Largest divisor of d built from primes dividing r."""
    if d < 1 or r < 1:
        raise ValueError("d_infinity needs d, r >= 1")
    out = 1
    g = gcd(d, r)
    while g > 1:
        out *= g
        d //= g
        g = gcd(d, g)
    return out


def phi(n: int) -> int:
    return math.prod((p - 1) * p ** (e - 1) for p, e in factorize(n))


@lru_cache(maxsize=4096)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^x for prime p."""
    if p == 2:
        return 1
    qs = factorize(p - 1).primes
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ValueError(f"{p} is not prime")


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    g = gcd(m1, m2)
    if g != 1:
        raise ValueError("moduli must be coprime")
    m = m1 * m2
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % m, m


# --------------------------------------------------------------------------
# Vectorised modular arithmetic
# --------------------------------------------------------------------------

_DIRECT_LIMIT = 1 << 31


def mulmod(a, b, m: int) -> np.ndarray:
    """(a*b) mod m elementwise for int64 arrays with entries in [0, m).

    Direct product below 2^31; double-and-add over the bits of b up to
    2^62, where every intermediate stays below 2^63.
    """
    a = np.asarray(a, dtype=np.int64) % m
    b = np.asarray(b, dtype=np.int64) % m
    if m <= _DIRECT_LIMIT:
        return (a * b) % m
    if m >= 1 << 62:
        raise OverflowError("mulmod supports moduli below 2^62")
    a, b = np.broadcast_arrays(a, b)
    a, b = a.copy(), b.copy()
    out = np.zeros_like(a)
    while np.any(b):
        odd = (b & 1).astype(bool)
        out = np.where(odd, (out + a) % m, out)
        a = (a << 1) % m
        b = b >> 1
    return out


def polyval_mod(coeffs: Sequence[int], x: np.ndarray, m: int) -> np.ndarray:
    """Horner evaluation of an ascending coefficient list modulo m."""
    x = np.asarray(x, dtype=np.int64) % m
    cs = [int(c) % m for c in reversed(list(coeffs))]
    if m <= _DIRECT_LIMIT:
        # acc * x + c < 2^62 stays exact in int64
        acc = np.full_like(x, cs[0])
        for c in cs[1:]:
            acc *= x
            acc += c
            acc %= m
        return acc
    acc = np.zeros_like(x)
    for c in cs:
        acc = (mulmod(acc, x, m) + c) % m
    return acc


def invmod_array(x: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised extended Euclid.

    Returns ``(inv, ok)`` where ``ok`` marks entries with gcd(x, m) == 1 and
    ``inv`` holds their inverses in [0, m) (zero elsewhere).
    """
    x = np.asarray(x, dtype=np.int64) % m
    if m == 1:
        return np.zeros_like(x), np.ones(x.shape, dtype=bool)
    flat = x.ravel()
    g = np.empty_like(flat)
    s_out = np.empty_like(flat)
    # invariant: old_s * x == old_r and s * x == r (mod m), |s| <= m.
    # A finished lane (one of old_r, r zero) sees the quotient 0 through the
    # sentinel divisor and just swaps back and forth, so lanes are only
    # dropped once at least half of them are done.
    big = np.int64(m + 1)
    idx = np.arange(flat.size)
    old_r, r = flat.copy(), np.full_like(flat, m)
    old_s, s = np.ones_like(flat), np.zeros_like(flat)
    while idx.size:
        fin = (r == 0) | (old_r == 0)
        n_fin = int(np.count_nonzero(fin))
        if n_fin * 2 >= idx.size:
            at = idx[fin]
            g[at] = (old_r + r)[fin]
            s_out[at] = np.where(r == 0, old_s, s)[fin]
            keep = ~fin
            idx, old_r, r, old_s, s = idx[keep], old_r[keep], r[keep], old_s[keep], s[keep]
            if not idx.size:
                break
        qt = old_r // np.where(r == 0, big, r)
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
    old_r = g.reshape(x.shape)
    old_s = s_out.reshape(x.shape)
    ok = old_r == 1
    inv = np.where(ok, old_s % m, 0)
    return inv, ok


# --------------------------------------------------------------------------
# Elementary inequality checks
# --------------------------------------------------------------------------

def gcd_average_check(x: int, q: int) -> tuple[int, int, bool]:
    """sum_{n <= x} gcd(n, q) against tau(q) * x, exactly."""
    n = np.arange(1, x + 1, dtype=np.int64)
    lhs = int(np.gcd(n, q).sum())
    rhs = tau(q) * x
    return lhs, rhs, lhs <= rhs


def sharp_parts(x: int) -> np.ndarray:
    """Array s with s[n] = squarefull part of n for 1 <= n <= x (s[0] unused)."""
    out = np.ones(x + 1, dtype=np.int64)
    for p in primes_up_to(isqrt(x)):
        p = int(p)
        out[p * p :: p * p] *= p * p
        pe = p**3
        while pe <= x:
            out[pe::pe] *= p
            pe *= p
    return out


def xi_parts(x: int) -> np.ndarray:
    out = np.ones(x + 1, dtype=np.int64)
    for p in primes_up_to(int(round(x**0.25)) + 1):
        p = int(p)
        p4 = p**4
        if p4 > x:
            continue
        out[p4::p4] *= p4
        pe = p**5
        while pe <= x:
            out[pe::pe] *= p
            pe *= p
    return out


def avg_sharp_check(x: int, t, *, which: str = "sharp", cap: float = 10.0, checkpoints: int = 8):
    """Ratio sum_{n <= y} f(n)^t / (y log y) at logarithmically spaced y <= x.

    ``which`` selects f = n -> squarefull part (``"sharp"``) or
    f = Xi (``"xi"``).  Returns ``(rows, passed)`` with rows of (y, ratio).
    """
    t = float(t)
    limit = 0.5 if which == "sharp" else 0.75
    if t > limit:
        raise ValueError(f"exponent t must be <= {limit} for {which}")
    parts = sharp_parts(x) if which == "sharp" else xi_parts(x)
    vals = parts[1:].astype(np.float64) ** t
    csum = np.cumsum(vals)
    ys = sorted({int(round(v)) for v in np.geomspace(10, x, checkpoints)})
    rows = [(y, float(csum[y - 1] / (y * math.log(y)))) for y in ys]
    return rows, all(r <= cap for _, r in rows)


def normalized_dft(values: np.ndarray) -> np.ndarray:
    """F_hat(t) = q^{-1/2} sum_x F(x) e(-tx/q)."""
    v = np.asarray(values, dtype=np.complex128)
    return np.fft.fft(v) / math.sqrt(len(v))


def uncertainty_check(values: Sequence[complex], rel_tol: float = 1e-9) -> tuple[int, bool]:
    """|supp F| * |supp F_hat| >= q on Z/qZ."""
    v = np.asarray(values, dtype=np.complex128)
    if not np.any(v != 0):
        raise ValueError("uncertainty principle needs a non-zero function")
    q = len(v)
    f_hat = normalized_dft(v)
    supp = int(np.count_nonzero(np.abs(v) > rel_tol * np.abs(v).max()))
    supp_hat = int(np.count_nonzero(np.abs(f_hat) > rel_tol * np.abs(f_hat).max()))
    product = supp * supp_hat
    return product, product >= q


def poisson_check(g, X: float, q: int, a: int, H: int | None = None):
    """Compare sum_{n = a mod q} g(n/X) with its truncated Poisson dual.

    ``g`` is a :class:`qvdc.windows.Window`.  With ``H=None`` the truncation
    is ``ceil(2 q X^{-1} X^{0.1})``.  Returns ``(lhs, rhs, diff, bound)`` where
    ``bound`` is the analytic tail of the dropped frequencies plus a
    rounding allowance; the check passes when ``diff <= bound``.
    """
    if H is None:
        H = max(1, math.ceil(2 * q / X * X**0.1))
    lo, hi = g.support
    n0 = math.ceil(lo * X)
    n0 += (a - n0) % q
    n = np.arange(n0, math.floor(hi * X) + 1, q, dtype=np.float64)
    lhs = float(g(n / X).sum())
    h = np.arange(-H, H + 1)
    ft = g.ft(h * X / q)
    rhs = (X / q) * np.sum(ft * np.exp(2j * np.pi * ((a * h) % q) / q))
    tail = g.tail_bound(X / q, H)
    # double-precision floor: both sides are sums of O(X/q) terms of size <= 1
    roundoff = 64 * np.finfo(float).eps * (len(n) + (X / q) * float(np.abs(ft).sum()) + 1)
    return lhs, complex(rhs), float(abs(lhs - rhs)), tail + roundoff


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n):
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def lcm(values: Iterable[int]) -> int:
    return reduce(lambda x, y: x * y // gcd(x, y), values, 1)
