"""Trace functions modulo primes and squarefree composites, and their sums."""

from __future__ import annotations

import cmath
import itertools
import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .ntheory import invmod_array, is_prime, mulmod, polyval_mod, primitive_root
from .pairs import ExponentTriple

TAU = 2 * math.pi


def e_frac(a: int, q: int) -> complex:
    """e(a/q) with the residue reduced first, so the argument is exact."""
    return cmath.exp(1j * TAU * ((a % q) / q))


def _phases(residues: np.ndarray, q: int) -> np.ndarray:
    return np.exp(1j * TAU * (np.asarray(residues, dtype=np.int64) % q) / q)


def _coeffs(values) -> tuple[int, ...]:
    out = tuple(int(v) for v in values)
    if not out:
        raise ValueError("polynomial needs at least one coefficient")
    return out


def _degree(coeffs: Sequence[int]) -> int:
    d = len(coeffs) - 1
    while d > 0 and coeffs[d] == 0:
        d -= 1
    return d


# --------------------------------------------------------------------------
# Per-prime trace functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceSpec:
    """Base class; ``amiability_hint`` and ``conductor_bound`` are metadata."""

    def values(self, p: int) -> np.ndarray:
        """The full line x = 0, ..., p-1."""
        return _full_line(self, p)

    def default_conductor(self) -> int:
        raise NotImplementedError

    @property
    def conductor(self) -> int:
        c = getattr(self, "conductor_bound", None)
        return c if c is not None else self.default_conductor()


@dataclass(frozen=True)
class AdditiveRational(TraceSpec):
    """x -> e(f1(x) / f2(x) / p), zero at the poles of f1/f2."""

    f1: tuple[int, ...]
    f2: tuple[int, ...] = (1,)
    amiability_hint: int | None = None
    conductor_bound: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "f1", _coeffs(self.f1))
        object.__setattr__(self, "f2", _coeffs(self.f2))

    def default_conductor(self) -> int:
        return 1 + _degree(self.f1) + _degree(self.f2)

    def _line(self, p: int) -> np.ndarray:
        if all(c % p == 0 for c in self.f2):
            raise ValueError(f"f2 vanishes identically mod {p}")
        x = np.arange(p, dtype=np.int64)
        num = polyval_mod(self.f1, x, p)
        den = polyval_mod(self.f2, x, p)
        inv, ok = invmod_array(den, p)
        out = _phases(mulmod(num, inv, p), p)
        out[~ok] = 0
        return out


@dataclass(frozen=True)
class MultiplicativeChar(TraceSpec):
    """x -> e(r * ind_g(f(x)) / (p - 1)), g the least primitive root; 0 when p | f(x)."""

    r: int
    f: tuple[int, ...] = (0, 1)
    amiability_hint: int | None = None
    conductor_bound: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "f", _coeffs(self.f))

    def default_conductor(self) -> int:
        return 1 + _degree(self.f)

    def _line(self, p: int) -> np.ndarray:
        if p == 2:
            raise ValueError("multiplicative characters need an odd prime")
        ind = index_table(p)
        fx = polyval_mod(self.f, np.arange(p, dtype=np.int64), p)
        out = _phases((self.r % (p - 1)) * ind[fx], p - 1)
        out[fx == 0] = 0
        return out


@dataclass(frozen=True)
class HyperKloosterman(TraceSpec):
    """Normalised hyper-Kloosterman sum Kl_k(a*x, p)."""

    k: int
    a: int = 1
    amiability_hint: int | None = None
    conductor_bound: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("hyper-Kloosterman needs k >= 1")

    def default_conductor(self) -> int:
        return self.k + 3

    def _line(self, p: int) -> np.ndarray:
        base = kloosterman_line(self.k, p)
        x = np.arange(p, dtype=np.int64)
        return base[(x * (self.a % p)) % p]


@dataclass(frozen=True)
class Table(TraceSpec):
    values_: tuple[complex, ...]
    amiability_hint: int | None = None
    conductor_bound: int | None = None

    def default_conductor(self) -> int:
        return len(self.values_)

    def _line(self, p: int) -> np.ndarray:
        if len(self.values_) != p:
            raise ValueError(f"table has {len(self.values_)} entries, need {p}")
        return np.asarray(self.values_, dtype=np.complex128)


@lru_cache(maxsize=256)
def _full_line(spec: TraceSpec, p: int) -> np.ndarray:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    out = spec._line(p)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=256)
def index_table(p: int) -> np.ndarray:
    """ind[g^j mod p] = j for the least primitive root g; ind[0] = 0 unused."""
    g = primitive_root(p)
    ind = np.zeros(p, dtype=np.int64)
    v = 1
    for j in range(p - 1):
        ind[v] = j
        v = v * g % p
    return ind


@lru_cache(maxsize=64)
def kloosterman_line(k: int, p: int) -> np.ndarray:
    """Kl_k(x, p) for every x, by the recursion over the last variable.

    U_1(x) = e(x/p) and U_k(x) = sum_{y != 0} e(y/p) U_{k-1}(x / y) for the
    unnormalised sums; then Kl_k = p^{-(k-1)/2} U_k, and Kl_k(0) takes the
    conventional value (-1)^(k-1) p^{-(k-1)/2}.
    """
    x = np.arange(p, dtype=np.int64)
    u = _phases(x, p)
    if k > 1:
        ys = np.arange(1, p, dtype=np.int64)
        inv, _ = invmod_array(ys, p)
        ey = _phases(ys, p)
        for _ in range(k - 1):
            nxt = np.zeros(p, dtype=np.complex128)
            for y, yi, w in zip(ys, inv, ey):
                nxt += w * u[(x * yi) % p]
            u = nxt
    out = u * p ** (-(k - 1) / 2)
    out[0] = (-1) ** (k - 1) * p ** (-(k - 1) / 2)
    return out


def kloosterman_bruteforce(k: int, x: int, p: int) -> complex:
    """Direct nested summation over x_1 ... x_{k-1}; the oracle for the line."""
    x %= p
    if x == 0:
        return (-1) ** (k - 1) * p ** (-(k - 1) / 2)
    total = 0j
    for xs in itertools.product(range(1, p), repeat=k - 1):
        prod = 1
        for v in xs:
            prod = prod * v % p
        last = x * pow(prod, -1, p) % p
        total += e_frac(sum(xs) + last, p)
    return total * p ** (-(k - 1) / 2)


def eval_trace(spec: TraceSpec, p: int, x: int) -> complex:
    return complex(spec.values(p)[x % p])


# --------------------------------------------------------------------------
# Composite moduli
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CompositeTraceSpec:
    primes: tuple[int, ...]
    per_prime: Mapping[int, TraceSpec] = field(default_factory=dict)

    def __post_init__(self):
        primes = tuple(int(p) for p in self.primes)
        if len(set(primes)) != len(primes):
            raise ValueError("primes must be distinct")
        for p in primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p not in self.per_prime:
                raise ValueError(f"no trace function given for p = {p}")
        object.__setattr__(self, "primes", primes)

    @property
    def q(self) -> int:
        return math.prod(self.primes)

    def __hash__(self):
        return hash((self.primes, tuple(self.per_prime[p] for p in self.primes)))


def eval_composite(spec: CompositeTraceSpec, n: int) -> complex:
    out = 1 + 0j
    for p in spec.primes:
        out *= eval_trace(spec.per_prime[p], p, n)
    return out


def fraction_phase(h: int, primes: Sequence[int], inverse: bool = True) -> CompositeTraceSpec:
    """K(n) = e(h * nbar / q) (or e(h n / q)) split into per-prime factors by CRT."""
    q = math.prod(primes)
    per = {}
    for p in primes:
        c = h * pow(q // p, -1, p) % p
        per[p] = AdditiveRational((c,), (0, 1)) if inverse else AdditiveRational((0, c))
    return CompositeTraceSpec(tuple(primes), per)


BLOCK = 1 << 16


def thread_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("VDC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"VDC_THREADS must be an integer, got {env!r}") from None
    return 1


def pairwise_sum(values: np.ndarray) -> complex:
    """Fixed-topology pairwise reduction: the order depends only on the length."""
    v = list(values)
    if not v:
        return 0j
    while len(v) > 1:
        nxt = [v[i] + v[i + 1] for i in range(0, len(v) - 1, 2)]
        if len(v) % 2:
            nxt.append(v[-1])
        v = nxt
    return complex(v[0])


def _block_sum(lines, primes, start: int, stop: int) -> complex:
    n = np.arange(start, stop, dtype=np.int64)
    acc = None
    for p, line in zip(primes, lines):
        vals = line[n % p]
        acc = vals if acc is None else acc * vals
    if acc is None:
        return complex(stop - start)
    return complex(np.sum(acc))


def incomplete_sum(spec: CompositeTraceSpec, M: int, N: int, workers: int | None = None) -> complex:
    """Sum of K(n) over M < n <= M + N.

    The range is cut into blocks of fixed length anchored at M + 1, each block
    is summed by numpy's pairwise kernel, and block sums are reduced by
    :func:`pairwise_sum`.  The result is therefore independent of the number
    of worker threads.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    lines = [spec.per_prime[p].values(p) for p in spec.primes]
    starts = list(range(M + 1, M + N + 1, BLOCK))
    bounds = [(s, min(s + BLOCK, M + N + 1)) for s in starts]
    nthreads = min(thread_count(workers), len(bounds))
    if nthreads <= 1:
        sums = [_block_sum(lines, spec.primes, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            sums = list(ex.map(lambda ab: _block_sum(lines, spec.primes, *ab), bounds))
    return pairwise_sum(np.asarray(sums, dtype=np.complex128))


def complete_sum_product(spec: CompositeTraceSpec) -> complex:
    """Product of the per-prime complete sums (equals the sum over one period)."""
    out = 1 + 0j
    for p in spec.primes:
        out *= complex(np.sum(spec.per_prime[p].values(p)))
    return out


# --------------------------------------------------------------------------
# Fourier transform and inequality checks
# --------------------------------------------------------------------------

def fourier_transform_p(values: Sequence[complex], p: int) -> np.ndarray:
    """FT(f)(t) = -p^{-1/2} sum_x f(x) e(tx/p)."""
    v = np.asarray(values, dtype=np.complex128)
    if v.shape != (p,):
        raise ValueError(f"expected {p} values, got shape {v.shape}")
    return -math.sqrt(p) * np.fft.ifft(v)


@dataclass(frozen=True)
class OrthogonalityReport:
    correlation: complex
    alpha: complex
    lhs: float
    bound: float
    proportional: bool

    @property
    def passed(self) -> bool:
        return self.lhs <= self.bound


def _proportionality(v1: np.ndarray, v2: np.ndarray, tol: float = 1e-9):
    """Scalar c with v1 = c * v2, or None."""
    n2 = np.vdot(v2, v2).real
    if n2 == 0:
        return None
    c = np.vdot(v2, v1) / n2
    scale = max(np.abs(v1).max(), 1.0)
    return c if np.abs(v1 - c * v2).max() <= tol * scale else None


def quasi_orthogonality_check(spec1: TraceSpec, spec2: TraceSpec, p: int) -> OrthogonalityReport:
    v1, v2 = spec1.values(p), spec2.values(p)
    corr = complex(np.vdot(v2, v1))
    c = _proportionality(v1, v2)
    alpha = 0j if c is None else complex(c)
    lhs = abs(corr - alpha * p)
    bound = 3 * spec1.conductor**2 * spec2.conductor**2 * math.sqrt(p)
    return OrthogonalityReport(corr, alpha, lhs, bound, c is not None)


def _delta(values: np.ndarray, shift: np.ndarray) -> np.ndarray:
    return values * np.conj(shift)


def weyl_differencing_check(psi1: Sequence[complex], psi2: Sequence[complex], M: int, N: int):
    """Both sides of the Cauchy-Schwarz differencing inequality.

    Psi(n) = psi1(n mod q1) psi2(n mod q2) on I = (M, M+N].  The inequality
    is homogeneous in psi2 but not in psi1 (the diagonal term), so psi1 is
    scaled to sup norm 1 and psi2 to sup norm 1 before comparing.
    Returns ``(lhs, rhs, passed)``.
    """
    a1 = np.asarray(psi1, dtype=np.complex128)
    a2 = np.asarray(psi2, dtype=np.complex128)
    q1, q2 = len(a1), len(a2)
    if math.gcd(q1, q2) != 1:
        raise ValueError("moduli must be coprime")
    if N < 1:
        raise ValueError("N must be >= 1")
    for a in (a1, a2):
        m = np.abs(a).max()
        if m == 0:
            raise ValueError("psi must not vanish identically")
        a /= m
    n = np.arange(M + 1, M + N + 1, dtype=np.int64)
    s = complex(np.sum(a1[n % q1] * a2[n % q2]))
    lhs = abs(s) ** 2
    total = float(N)
    for l in range(1, N // q2 + 1):
        for sgn in (1, -1):
            h = sgn * l * q2
            lo, hi = max(M + 1, M + 1 - h), min(M + N, M + N - h)
            if lo > hi:
                continue
            m_ = np.arange(lo, hi + 1, dtype=np.int64)
            total += abs(complex(np.sum(_delta(a1[m_ % q1], a1[(m_ + h) % q1]))))
    rhs = float(np.abs(a2).max() ** 2) * q2 * total
    return lhs, rhs, lhs <= rhs * (1 + 1e-12) + 1e-9


@dataclass
class BoundReport:
    triple: ExponentTriple
    rows: list[tuple[int, float, int]]  # (N, max ratio, worst shift M)

    @property
    def max_ratio(self) -> float:
        return max(r for _, r, _ in self.rows)

    def to_json(self) -> dict:
        return {
            "pair": self.triple.to_json(),
            "rows": [{"N": n, "max_ratio": r, "worst_M": m} for n, r, m in self.rows],
            "max_ratio": self.max_ratio,
        }


def empirical_pair_check(
    spec: CompositeTraceSpec,
    t: ExponentTriple,
    N_list: Sequence[int],
    shifts: int = 32,
    seed: int = 0,
    workers: int | None = None,
) -> BoundReport:
    """Max over random shifts of |S| / ((q/N)^kappa N^lambda), delta = 1."""
    q = spec.q
    rng = random.Random(seed)
    k, l = float(t.kappa), float(t.lam)
    rows = []
    for N in N_list:
        N = int(N)
        scale = (q / N) ** k * N**l
        worst, worst_m = -1.0, 0
        for _ in range(shifts):
            M = rng.randrange(q)
            r = abs(incomplete_sum(spec, M, N, workers)) / scale
            if r > worst:
                worst, worst_m = r, M
        rows.append((N, worst, worst_m))
    return BoundReport(t, rows)


# --------------------------------------------------------------------------
# Spec mini-grammar
# --------------------------------------------------------------------------

def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _single(kind: str, fields: dict[str, str]) -> TraceSpec:
    try:
        if kind == "addrat":
            return AdditiveRational(_ints(fields["f1"]), _ints(fields.get("f2", "1")))
        if kind == "mult":
            return MultiplicativeChar(int(fields["r"]), _ints(fields.get("f", "0,1")))
        if kind == "kloo":
            return HyperKloosterman(int(fields["k"]), int(fields.get("a", "1")))
    except KeyError as exc:
        raise ValueError(f"{kind}: missing field {exc.args[0]}") from None
    raise ValueError(f"unknown trace kind {kind!r}")


def parse_trace_spec(text: str) -> TraceSpec | CompositeTraceSpec:
    """Parse ``addrat:f1=..;f2=..``, ``mult:r=..;f=..``, ``kloo:k=..`` or a
    composite ``q=p1*p2;p1=<spec>;p2=<spec>``."""
    tokens = [t.strip() for t in text.split(";") if t.strip()]
    if not tokens:
        raise ValueError("empty trace spec")
    if tokens[0].startswith("q="):
        primes = tuple(int(x) for x in tokens[0][2:].split("*"))
        groups: dict[int, list[str]] = {}
        current = None
        for tok in tokens[1:]:
            key, _, rest = tok.partition("=")
            if key.strip().isdigit() and ":" in rest:
                current = int(key)
                groups[current] = [rest]
            elif current is None:
                raise ValueError(f"field {tok!r} before any prime")
            else:
                groups[current].append(tok)
        extra = set(groups) - set(primes)
        if extra:
            raise ValueError(f"specs given for primes not in q: {sorted(extra)}")
        per = {p: parse_trace_spec(";".join(g)) for p, g in groups.items()}
        return CompositeTraceSpec(primes, per)
    kind, _, first = tokens[0].partition(":")
    fields = {}
    for tok in [first] + tokens[1:]:
        if not tok:
            continue
        key, sep, val = tok.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {tok!r}")
        fields[key.strip()] = val.strip()
    return _single(kind.strip(), fields)
