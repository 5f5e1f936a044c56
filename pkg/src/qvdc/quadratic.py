"""Roots of a^2 + 1 mod l, proper two-square representations, and the
fraction identities linking them."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .ntheory import crt_pair, d_infinity, factorize, is_prime, primitive_root


@dataclass(frozen=True)
class TwoSquaresRep:
    r: int
    s: int
    ell: int

    def __post_init__(self):
        if self.r <= 0 or self.s <= 0:
            raise ValueError("proper representations need r, s > 0")
        if self.r * self.r + self.s * self.s != self.ell or gcd(self.r, self.s) != 1:
            raise ValueError(f"({self.r}, {self.s}) is not a proper representation of {self.ell}")


@dataclass(frozen=True)
class RootSet:
    ell: int
    roots: tuple[int, ...]

    @property
    def rho(self) -> int:
        return len(self.roots)


def sqrt_minus_one_mod_p(p: int) -> int:
    """g^((p-1)/4) for the least primitive root g, p = 1 mod 4."""
    if p % 4 != 1 or not is_prime(p):
        raise ValueError(f"-1 is not a square mod {p}")
    return pow(primitive_root(p), (p - 1) // 4, p)


def _roots_prime_power(p: int, e: int) -> list[int]:
    if p == 2:
        return [1] if e == 1 else []
    if p % 4 == 3:
        return []
    r = sqrt_minus_one_mod_p(p)
    m = p
    # Hensel: f(r) = r^2 + 1, f'(r) = 2r is a unit for odd p
    for _ in range(1, e):
        m *= p
        r = (r - (r * r + 1) * pow(2 * r, -1, m)) % m
    return sorted({r, (-r) % m})


def roots_minus_one(ell: int) -> RootSet:
    if ell < 1:
        raise ValueError("ell must be >= 1")
    sols, mod = [0], 1
    for p, e in factorize(ell):
        local = _roots_prime_power(p, e)
        if not local:
            return RootSet(ell, ())
        pe = p**e
        sols = [crt_pair(a, mod, b, pe)[0] for a in sols for b in local]
        mod *= pe
    return RootSet(ell, tuple(sorted(sols)))


def roots_minus_one_bruteforce(ell: int) -> RootSet:
    if not 1 <= ell <= 10**7:
        raise ValueError("brute force is limited to 1 <= ell <= 10^7")
    a = np.arange(ell, dtype=np.int64)
    return RootSet(ell, tuple(int(x) for x in np.flatnonzero((a * a + 1) % ell == 0)))


def two_squares(ell: int) -> list[TwoSquaresRep]:
    """All ordered proper representations ell = r^2 + s^2 with r, s > 0."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    out = []
    for r in range(1, isqrt(ell) + 1):
        s2 = ell - r * r
        s = isqrt(s2)
        if s > 0 and s * s == s2 and gcd(r, s) == 1:
            out.append(TwoSquaresRep(r, s, ell))
    return out


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def rep_fraction(rep: TwoSquaresRep) -> Fraction:
    """sbar/r - s/(r l) mod 1, with s sbar = 1 mod r l."""
    r, s, ell = rep.r, rep.s, rep.ell
    sbar = pow(s, -1, r * ell) if r * ell > 1 else 0
    return _mod1(Fraction(sbar, r) - Fraction(s, r * ell))


def correspondence(ell: int) -> dict[int, TwoSquaresRep]:
    """Root a -> the representation whose fraction is a/l mod 1.

    Raises AssertionError if the pairing is not a bijection.
    """
    roots = roots_minus_one(ell).roots
    if not roots:
        raise ValueError(f"a^2 + 1 = 0 has no solution mod {ell}")
    reps = two_squares(ell)
    pairing: dict[int, TwoSquaresRep] = {}
    root_set = set(roots)
    for rep in reps:
        x = rep_fraction(rep) * ell
        assert x.denominator == 1, f"{rep} gives a non-integral numerator"
        a = int(x) % ell
        assert a in root_set, f"{rep} maps to {a}, not a root"
        assert a not in pairing, f"root {a} hit twice"
        pairing[a] = rep
    assert len(pairing) == len(roots), f"{len(roots)} roots but {len(reps)} representations"
    return pairing


def weyl_rho(n: int, ell: int) -> complex:
    return sum((cmath.exp(2j * math.pi * ((a * n) % ell) / ell) for a in roots_minus_one(ell).roots), 0j)


@dataclass(frozen=True)
class DecompositionReport:
    d: int
    d1: int
    d2: int
    lhs: Fraction
    rhs: Fraction
    rhs_two_term: Fraction | None

    @property
    def exact(self) -> bool:
        ok = self.lhs == self.rhs
        if self.rhs_two_term is not None:
            ok = ok and self.lhs == self.rhs_two_term
        return ok


def _inv(x: int, m: int) -> int:
    return pow(x, -1, m) if m > 1 else 0


def decompose_fraction(d: int, a: int, ell: int, rep: TwoSquaresRep | None = None) -> DecompositionReport:
    """Check dbar a / l against its three-term split with d = d1 d2, d2 = (d, r^inf)."""
    if d < 1 or gcd(d, ell) != 1:
        raise ValueError("need d >= 1 coprime to ell")
    if (a * a + 1) % ell:
        raise ValueError(f"{a} is not a root of a^2 + 1 mod {ell}")
    if rep is None:
        rep = correspondence(ell)[a % ell]
    r, s = rep.r, rep.s
    d2 = d_infinity(d, r)
    d1 = d // d2
    lhs = _mod1(Fraction(_inv(d, ell) * a, ell))
    first = -Fraction(r * _inv(d2 * ell, d1 * s), d1 * s)
    middle = Fraction(r, d * s * ell)
    last = -Fraction(r * _inv(d1 * s * ell, d2), d2)
    rhs = _mod1(first + middle + last)
    squarefree = all(e == 1 for _, e in factorize(d))
    two = _mod1(first + middle) if squarefree else None
    return DecompositionReport(d, d1, d2, lhs, rhs, two)
