"""Complete exponential sums of rational functions modulo c.

Sigma(lam, c) = sum over a mod c, f2(a) invertible mod c, of
e(f1(a) * f2(a)^{-1} / c).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Sequence

import numpy as np

from .ntheory import Factorization, factorize, invmod_array, is_prime, mulmod, polyval_mod

TAU = 2 * math.pi


# --------------------------------------------------------------------------
# Small polynomial helpers (ascending integer coefficient tuples)
# --------------------------------------------------------------------------

def _trim(c: Sequence) -> list:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly_deg(c: Sequence[int]) -> int:
    c = _trim(c)
    return -1 if c == [0] else len(c) - 1


def poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def poly_sub(a: Sequence[int], b: Sequence[int]) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def poly_deriv(a: Sequence[int]) -> list[int]:
    return _trim([i * a[i] for i in range(1, len(a))] or [0])


def poly_shift(a: Sequence[int], y: int) -> list[int]:
    """Coefficients of a(y + t) in t."""
    out = [0] * len(a)
    for i, ai in enumerate(a):
        if ai:
            for k in range(i + 1):
                out[k] += ai * comb(i, k) * y ** (i - k)
    return out


def _poly_gcd(a: list, b: list, inv, red) -> list:
    """Monic gcd by Euclid over a field given by ``inv`` and ``red``."""
    a, b = _trim([red(x) for x in a]), _trim([red(x) for x in b])
    while any(b):
        lb = inv(b[-1])
        r = list(a)
        while len(r) >= len(b) and any(r):
            f = red(r[-1] * lb)
            shift = len(r) - len(b)
            for i, x in enumerate(b):
                r[shift + i] = red(r[shift + i] - f * x)
            r = _trim(r)
            if len(r) == 1 and r[0] == 0:
                break
        a, b = b, r
    if not any(a):
        return [0]
    la = inv(a[-1])
    return [red(x * la) for x in a]


def poly_gcd_q(a: Sequence[int], b: Sequence[int]) -> list[Fraction]:
    return _poly_gcd([Fraction(x) for x in a], [Fraction(x) for x in b], lambda x: 1 / x, lambda x: x)


def poly_gcd_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    return _poly_gcd(list(a), list(b), lambda x: pow(x, -1, p), lambda x: x % p)


# --------------------------------------------------------------------------
# Types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalFunctionZ:
    """lam = f1 / f2 with integer coefficients, coprime over Q."""

    f1: tuple[int, ...]
    f2: tuple[int, ...] = (1,)

    def __post_init__(self):
        f1 = tuple(_trim([int(x) for x in self.f1] or [0]))
        f2 = tuple(_trim([int(x) for x in self.f2] or [0]))
        if not any(f2):
            raise ValueError("denominator must not be the zero polynomial")
        if any(f1) and poly_deg(poly_gcd_q(f1, f2)) > 0:
            raise ValueError("f1 and f2 must be coprime over Q")
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)

    @property
    def d(self) -> int:
        return max(poly_deg(self.f1), 0) + poly_deg(self.f2)

    def derivative_numerator(self) -> list[int]:
        """f1' f2 - f1 f2', the numerator of the quotient-rule derivative."""
        return poly_sub(poly_mul(poly_deriv(self.f1), self.f2), poly_mul(self.f1, poly_deriv(self.f2)))

    def scaled(self, u: int) -> "RationalFunctionZ":
        return RationalFunctionZ(tuple(u * x for x in self.f1), self.f2)

    def content_gcd(self, c: int) -> int:
        """gcd of c with the non-constant coefficients of f1 and f2 together.

        This is the convention for (lam, c) once the denominator is cleared;
        with no non-constant terms it is c itself.
        """
        g = c
        for poly in (self.f1, self.f2):
            for x in poly[1:]:
                g = gcd(g, x)
        return g

    def nondegenerate_mod(self, p: int) -> bool:
        """lam mod p is a genuine non-constant rational function.

        Requires f1, f2 both non-zero mod p, coprime over F_p, and not both
        constant after reduction.
        """
        r1 = _trim([x % p for x in self.f1])
        r2 = _trim([x % p for x in self.f2])
        if not any(r1) or not any(r2):
            return False
        if len(r1) == 1 and len(r2) == 1:
            return False
        return len(poly_gcd_mod(r1, r2, p)) == 1

    def __str__(self):
        return f"({','.join(map(str, self.f1))})/({','.join(map(str, self.f2))})"


@dataclass(frozen=True)
class SumValue:
    value: complex
    c: int
    excluded_count: int
    flags: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "modulus": self.c,
            "excluded": self.excluded_count,
            "flags": list(self.flags),
        }


# --------------------------------------------------------------------------
# Evaluation paths
# --------------------------------------------------------------------------

def _phase_sum(residues: np.ndarray, c: int) -> complex:
    return complex(np.sum(np.exp(1j * TAU * (residues % c) / c)))


def sigma_direct(lam: RationalFunctionZ, c: int) -> SumValue:
    if c < 1:
        raise ValueError("modulus must be >= 1")
    a = np.arange(c, dtype=np.int64)
    num = polyval_mod(lam.f1, a, c)
    if len(lam.f2) == 1:
        # constant denominator: one scalar inverse instead of a vector of them
        if gcd(lam.f2[0], c) != 1:
            return SumValue(0j, c, c)
        return SumValue(_phase_sum(mulmod(num, pow(lam.f2[0], -1, c), c), c), c, 0)
    den = polyval_mod(lam.f2, a, c)
    inv, ok = invmod_array(den, c)
    phase = mulmod(num[ok], inv[ok], c)
    return SumValue(_phase_sum(phase, c), c, int(c - np.count_nonzero(ok)))


def sigma_crt(lam: RationalFunctionZ, factorization: Factorization, c: int | None = None) -> SumValue:
    """Product over p^b || c of Sigma(u lam, p^b) with u = (c / p^b)^{-1} mod p^b."""
    n = factorization.n
    if c is not None and c != n:
        raise ValueError(f"factorisation multiplies to {n}, not {c}")
    ps = [p for p, _ in factorization.pairs]
    if ps != sorted(set(ps)) or not all(is_prime(p) and e >= 1 for p, e in factorization.pairs):
        raise ValueError("inconsistent factorisation")
    value, kept = 1 + 0j, 1
    for p, e in factorization.pairs:
        pe = p**e
        u = pow(n // pe, -1, pe) if pe > 1 else 0
        part = sigma_direct(lam.scaled(u), pe)
        value *= part.value
        kept *= pe - part.excluded_count
    return SumValue(value, n, n - kept)


def _taylor2(lam: RationalFunctionZ, y: int, m: int):
    """(c0, c1, c2) with lam(y + t) = c0 + c1 t + c2 t^2 + O(t^3) mod m.

    None when f2(y) is not a unit.  c1 is lam'(y) and c2 is lam''(y)/2; both
    are exact because the shifted quotient is a p-integral power series.
    """
    a = poly_shift(lam.f1, y) + [0, 0, 0]
    b = poly_shift(lam.f2, y) + [0, 0, 0]
    if gcd(b[0], m) != 1:
        return None
    ib = pow(b[0], -1, m)
    c0 = a[0] * ib % m
    c1 = (a[1] - c0 * b[1]) * ib % m
    c2 = (a[2] - c0 * b[2] - c1 * b[1]) * ib % m
    return c0, c1, c2


def sigma_prime_power(lam: RationalFunctionZ, p: int, beta: int) -> SumValue:
    """Stationary-phase evaluation of Sigma(lam, p^beta) for odd p.

    Writing a = y + p^alpha z with y < p^alpha collapses the z-sum to the
    stationary points lam'(y) = 0 mod p^alpha.  For odd beta = 2 alpha + 1
    the leftover quadratic term gives a Gauss sum mod p, and the phase is
    lam(y) / p^(2 alpha + 1).
    """
    if p == 2 or not is_prime(p):
        raise ValueError("stationary phase needs an odd prime")
    if beta < 2:
        raise ValueError("stationary phase needs beta >= 2")
    c = p**beta
    if beta > 5:
        sv = sigma_direct(lam, c)
        return SumValue(sv.value, c, sv.excluded_count, ("fallback_direct",))
    alpha = beta // 2
    pa = p**alpha
    flags: list[str] = []
    total = 0j
    excluded_y = 0
    for y in range(pa):
        t = _taylor2(lam, y, c)
        if t is None:
            excluded_y += 1
            continue
        c0, c1, c2 = t
        if c1 % pa:
            continue
        phase = np.exp(1j * TAU * c0 / c)
        if beta % 2 == 0:
            total += phase
        else:
            lin = (c1 // pa) % p
            quad = c2 % p
            if quad == 0:
                flags.append(f"degenerate_gauss:y={y}")
            z = np.arange(p)
            g = complex(np.sum(np.exp(1j * TAU * ((quad * z * z + lin * z) % p) / p)))
            total += phase * g
    # each excluded y mod p^alpha accounts for p^(beta - alpha) residues mod c
    return SumValue(complex(pa * total), c, excluded_y * p ** (beta - alpha), tuple(flags))


# --------------------------------------------------------------------------
# Inequality checks
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.bound * (1 + 1e-12) + 1e-9

    def __iter__(self):
        return iter((self.lhs, self.bound, self.passed))


def weil_check(lam: RationalFunctionZ, p: int) -> BoundCheck:
    """|Sigma(lam, p)| against 2 d sqrt(p) sqrt((lam, p)).

    d is clamped to >= 1: for constant lam the bound with d = 0 would be 0
    while the sum has modulus up to p.
    """
    lhs = abs(sigma_direct(lam, p).value)
    d = max(1, lam.d)
    return BoundCheck(lhs, 2 * d * math.sqrt(p) * math.sqrt(lam.content_gcd(p)))


def derivative_content_gcd(lam: RationalFunctionZ, c: int) -> int:
    """(lam', c): gcd of c with the non-constant coefficients of f1' f2 - f1 f2'."""
    g = c
    for x in lam.derivative_numerator()[1:]:
        g = gcd(g, x)
    return g


def thmB3_bound(lam: RationalFunctionZ, c: int) -> float:
    f = factorize(c)
    d = max(1, lam.d)
    return (
        math.sqrt(c)
        * math.sqrt(lam.content_gcd(f.flat()))
        * derivative_content_gcd(lam, f.ddagger())
        * (2 * d) ** f.omega()
        * math.sqrt(f.xi())
    )


def thmB3_check(lam: RationalFunctionZ, c: int) -> BoundCheck:
    if c > 10**6:
        raise ValueError("thmB3_check is limited to c <= 10^6")
    return BoundCheck(abs(sigma_direct(lam, c).value), thmB3_bound(lam, c))


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------

def random_rational(
    rng: random.Random,
    max_deg1: int = 3,
    max_deg2: int = 2,
    coeff: int = 50,
    avoid_primes: Sequence[int] = (),
) -> RationalFunctionZ:
    """Random coprime f1/f2, non-degenerate modulo each prime in ``avoid_primes``.

    Non-degenerate means f2's leading coefficient is a unit and f1, f2 stay
    coprime after reduction; otherwise lam can collapse to a constant mod p
    (e.g. (x + 1 + p)/(x + 1)) and the square-root bounds do not apply.
    """
    while True:
        d1 = rng.randint(0, max_deg1)
        d2 = rng.randint(0, max_deg2)
        f1 = [rng.randint(-coeff, coeff) for _ in range(d1 + 1)]
        f2 = [rng.randint(-coeff, coeff) for _ in range(d2 + 1)]
        if f1[-1] == 0 or f2[-1] == 0 or (d1 == 0 and d2 == 0):
            continue
        if poly_deg(poly_gcd_q(f1, f2)) > 0:
            continue
        lam = RationalFunctionZ(tuple(f1), tuple(f2))
        if all(f2[-1] % p and lam.nondegenerate_mod(p) for p in avoid_primes):
            return lam
