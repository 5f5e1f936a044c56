"""The twelve acceptance criteria as runnable checks.

Each check returns a :class:`CriterionResult`; wall-clock limits are part of
the pass condition.  Randomised checks draw from ``random.Random`` seeded by
the master seed and the criterion number, so reruns are reproducible.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import complete_sums as cs
from . import levels, pairs, quadratic, search, sieve, trace
from .ntheory import factorize, gcd_average_check, primes_up_to, uncertainty_check

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    elapsed: float = 0.0
    limit: float = math.inf

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name} ({self.elapsed:.2f}s / {self.limit:g}s)"

    def to_json(self, timings: bool = False) -> dict:
        doc = {"criterion": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}
        if timings:
            doc["elapsed"] = round(self.elapsed, 3)
            doc["limit"] = self.limit
        return doc


def _rng(seed: int, number: int) -> random.Random:
    return random.Random(f"{seed}:{number}")


# --------------------------------------------------------------------------

LISTED_PAIRS = {
    "A": ("1/6", "2/3"),
    "A2": ("1/14", "11/14"),
    "A3": ("1/30", "13/15"),
    "BA2": ("2/7", "4/7"),
    "BA3": ("11/30", "8/15"),
    "ABA2": ("1/9", "13/18"),
    "A2BA2": ("1/20", "33/40"),
    "BABA2": ("2/9", "11/18"),
}


def c1_listed_pairs(seed: int) -> tuple[bool, dict]:
    wrong = {}
    for w, (k, l) in LISTED_PAIRS.items():
        t = pairs.apply_word(w)
        if t.pair != (Fraction(k), Fraction(l)):
            wrong[w] = str(t)
    return not wrong, {"words": len(LISTED_PAIRS), "mismatches": wrong}


def c2_divisor_word(seed: int) -> tuple[bool, dict]:
    t = pairs.apply_word("BA3BA2BABABA2")
    lvl = search.divisor_level(t)
    ok = t.pair == (Fraction(591, 1535), Fraction(808, 1535)) and lvl == Fraction(55, 12756)
    ok = ok and lvl >= Fraction(1, 232)
    return ok, {"pair": t.to_json(), "divisor_level": pairs.format_fraction(lvl)}


def c3_rankin(seed: int) -> tuple[bool, dict]:
    rep = search.optimize_word(search.Objective.MinKappaPlusLambda, 40, 60.0, seed=seed)
    delta = search.subconvex_delta(rep.best_triple)
    ok = rep.best_value <= Fraction(8291, 10000) and delta >= Fraction(85489, 10**6)
    return ok, {
        "best_word": rep.best_word.compact(),
        "best_value": float(rep.best_value),
        "subconvex_delta": float(delta),
        "nodes": rep.nodes_expanded,
    }


_PIECES = (
    ("A", Fraction(1, 2), Fraction(16, 17), lambda t: (19 - 18 * t) / 14),
    ("A2", Fraction(1, 2), Fraction(8, 9), lambda t: (86 - 83 * t) / 60),
    ("A3", Fraction(1, 2), Fraction(112, 131), lambda t: (91 - 89 * t) / 62),
)
_GAMMA_PIECES = (
    (Fraction(1, 2), Fraction(64, 97)),
    (Fraction(64, 97), Fraction(32, 41)),
    (Fraction(32, 41), Fraction(16, 17)),
)


def _sample(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    den = rng.randint(2, 10**4)
    return lo + (hi - lo) * Fraction(rng.randrange(den), den)


def c4_levels(seed: int) -> tuple[bool, dict]:
    rng = _rng(seed, 4)
    bad = []
    for w, lo, hi, formula in _PIECES:
        t = pairs.apply_word(w)
        for _ in range(50):
            th = _sample(rng, lo, hi)
            got = levels.level_max_gamma(levels.LevelProblem(th, t)).gamma
            if got != formula(th):
                bad.append((w, str(th)))
    for lo, hi in _GAMMA_PIECES:
        for _ in range(50):
            th = _sample(rng, lo, hi)
            if levels.gamma_of_theta(th) != levels.gamma_formula(th):
                bad.append(("gamma", str(th)))
    ranges = [levels.validity_range(pairs.apply_word(w)) for w in ("A", "A2", "A3")]
    labels = [
        levels.gamma_of_theta(Fraction(1, 2)),
        levels.gamma_of_theta(Fraction(64, 97)),
        levels.gamma_of_theta(Fraction(32, 41)),
        levels.gamma_left_limit(Fraction(16, 17)),
    ]
    ok = (
        not bad
        and ranges == [Fraction(16, 17), Fraction(8, 9), Fraction(112, 131)]
        and labels == [Fraction(3, 4), Fraction(101, 194), Fraction(29, 82), Fraction(5, 34)]
    )
    return ok, {
        "mismatches": bad[:10],
        "validity_ranges": [str(r) for r in ranges],
        "figure_labels": [str(x) for x in labels],
    }


def _random_triple(rng: random.Random) -> pairs.ExponentTriple:
    den = rng.randint(1, 500)
    k = Fraction(rng.randint(0, den), 2 * den)
    l = Fraction(1, 2) + Fraction(rng.randint(0, den), 2 * den)
    n = Fraction(rng.randint(-den, 2 * den), den)
    return pairs.ExponentTriple(k, l, n)


def c5_algebra(seed: int) -> tuple[bool, dict]:
    rng = _rng(seed, 5)
    bad = 0
    for _ in range(1000):
        t = _random_triple(rng)
        if pairs.apply_B(pairs.apply_B(t)) != t or pairs.inverse_A(pairs.apply_A(t)) != t:
            bad += 1
    # every word of length <= 12, grown by acting with one more letter
    count, escaped = 0, 0
    layer = [pairs.SEED]
    for _ in range(12):
        nxt = []
        for t in layer:
            for f in (pairs.apply_A, pairs.apply_B):
                try:
                    nxt.append(f(t))
                except ValueError:
                    escaped += 1
        count += len(nxt)
        layer = nxt
    return bad == 0 and escaped == 0, {"identity_failures": bad, "words": count, "left_box": escaped}


def c6_stationary(seed: int) -> tuple[bool, dict]:
    rng = _rng(seed, 6)
    bad_pp = bad_crt = 0
    for _ in range(200):
        p = rng.choice((3, 5, 7, 11))
        beta = rng.choice((2, 3, 4, 5))
        lam = cs.random_rational(rng, max_deg1=4, max_deg2=2)
        while lam.f2[-1] % p == 0:
            lam = cs.random_rational(rng, max_deg1=4, max_deg2=2)
        a = cs.sigma_prime_power(lam, p, beta)
        b = cs.sigma_direct(lam, p**beta)
        if abs(a.value - b.value) > 1e-8 * p**beta or a.excluded_count != b.excluded_count:
            bad_pp += 1
    for _ in range(200):
        while True:
            c = rng.randint(6, 10**4)
            if factorize(c).omega() >= 2:
                break
        lam = cs.random_rational(rng)
        a = cs.sigma_crt(lam, factorize(c), c)
        b = cs.sigma_direct(lam, c)
        if abs(a.value - b.value) > 1e-8 * c or a.excluded_count != b.excluded_count:
            bad_crt += 1
    return bad_pp == 0 and bad_crt == 0, {"stationary_failures": bad_pp, "crt_failures": bad_crt}


def _weyl_instance(rng: random.Random):
    while True:
        q1, q2 = rng.randint(2, 30), rng.randint(2, 30)
        if math.gcd(q1, q2) == 1:
            break
    nr = np.random.default_rng(rng.getrandbits(32))
    psi1 = nr.normal(size=q1) + 1j * nr.normal(size=q1)
    psi2 = nr.normal(size=q2) + 1j * nr.normal(size=q2)
    return psi1, psi2, rng.randint(-100, 100), rng.randint(1, 400)


def _sparse_signal(rng: random.Random):
    q = rng.randint(2, 512)
    nr = np.random.default_rng(rng.getrandbits(32))
    v = np.zeros(q, dtype=np.complex128)
    k = rng.randint(1, max(1, q // 8))
    idx = nr.choice(q, size=k, replace=False)
    v[idx] = nr.normal(size=k) + 1j * nr.normal(size=k)
    if rng.random() < 0.3:
        # sparse in frequency instead: invert a sparse spectrum
        v = np.fft.ifft(v) * math.sqrt(q)
    return v


def c7_inequalities(seed: int) -> tuple[bool, dict]:
    rng = _rng(seed, 7)
    fails = {"weil": 0, "composite_bound": 0, "weyl_differencing": 0, "gcd_average": 0, "uncertainty": 0}
    ps = [int(p) for p in primes_up_to(500)]
    for _ in range(500):
        p = rng.choice(ps)
        lam = cs.random_rational(rng, avoid_primes=(p,))
        fails["weil"] += not cs.weil_check(lam, p).passed
    for _ in range(300):
        c = rng.randint(1, 10**4)
        lam = cs.random_rational(rng, avoid_primes=factorize(c).primes)
        fails["composite_bound"] += not cs.thmB3_check(lam, c).passed
    for _ in range(200):
        fails["weyl_differencing"] += not trace.weyl_differencing_check(*_weyl_instance(rng))[2]
    for q in range(1, 201):
        n = np.arange(1, 501, dtype=np.int64)
        partial = np.cumsum(np.gcd(n, q))
        tq = factorize(q).tau()
        fails["gcd_average"] += int(np.count_nonzero(partial > tq * n))
    fails["gcd_average"] += not gcd_average_check(500, 200)[2]
    for _ in range(200):
        fails["uncertainty"] += not uncertainty_check(_sparse_signal(rng))[1]
    return not any(fails.values()), {"failures": fails}


def c8_gauss(seed: int) -> tuple[bool, dict]:
    rng = _rng(seed, 8)
    checked = 0
    for ell in range(2, 10**4 + 1):
        if quadratic.roots_minus_one(ell).rho:
            quadratic.correspondence(ell)  # asserts the bijection
            checked += 1
    bad = 0
    n = 0
    while n < 200:
        ell = rng.randint(2, 2000)
        roots = quadratic.roots_minus_one(ell).roots
        d = rng.randint(1, 10**4)
        if not roots or math.gcd(d, ell) != 1:
            continue
        bad += not quadratic.decompose_fraction(d, rng.choice(roots), ell).exact
        n += 1
    return bad == 0, {"moduli_with_roots": checked, "decomposition_failures": bad}


def c9_sieve(seed: int) -> tuple[bool, dict]:
    table = sieve.build_table(12.0, 1 / 1024)
    # below s = 1 only the closed form exists; from 1 on read the solver grid
    xs_F = np.linspace(1.0, 3.0, 400)
    xs_f = np.linspace(2.0, 4.0, 400)
    err_F = max(abs(table.F(x, grid=True) - float(sieve.F_closed(x))) for x in xs_F)
    err_f = max(abs(table.f(x, grid=True) - float(sieve.f_closed(x))) for x in xs_f)
    lim_F, lim_f = abs(table.F(10) - 1), abs(table.f(10) - 1)
    rich = sieve.richardson_delta(10.0, 1 / 1024)
    ok = err_F < 1e-10 and err_f < 1e-10 and lim_F < 1e-3 and lim_f < 1e-3 and rich < 1e-8
    return ok, {"F_err": err_F, "f_err": err_f, "F10_minus_1": lim_F, "f10_minus_1": lim_f, "richardson": rich}


def c10_fourier(seed: int) -> tuple[bool, dict]:
    rng = _rng(seed, 10)
    ps = [int(p) for p in primes_up_to(499)]
    worst_inv = worst_par = 0.0
    for _ in range(100):
        p = rng.choice(ps)
        nr = np.random.default_rng(rng.getrandbits(32))
        f = nr.normal(size=p) + 1j * nr.normal(size=p)
        ff = trace.fourier_transform_p(trace.fourier_transform_p(f, p), p)
        worst_inv = max(worst_inv, float(np.abs(ff - f[(-np.arange(p)) % p]).max()))
        lhs = float(np.sum(np.abs(trace.fourier_transform_p(f, p)) ** 2))
        rhs = float(np.sum(np.abs(f) ** 2))
        worst_par = max(worst_par, abs(lhs - rhs) / rhs)
    return worst_inv < 1e-9 and worst_par < 1e-9, {"involution_err": worst_inv, "parseval_rel_err": worst_par}


EMPIRICAL_PRIMES = (3, 5, 7, 11, 13)


def c11_empirical(seed: int) -> tuple[bool, dict]:
    spec = trace.fraction_phase(3, EMPIRICAL_PRIMES)
    q = spec.q
    Ns = [math.floor(q**x) for x in (0.4, 0.5, 0.6)]
    out = {}
    worst = 0.0
    for w in ("A", "A2", "BA2"):
        rep = trace.empirical_pair_check(spec, pairs.apply_word(w), Ns, shifts=32, seed=seed)
        out[w] = rep.max_ratio
        worst = max(worst, rep.max_ratio)
    return worst <= 50, {"max_ratio": out, "N": Ns}


PERF_PRIMES = (101, 103, 107, 109, 113)


def perf_spec() -> trace.CompositeTraceSpec:
    return trace.CompositeTraceSpec(
        PERF_PRIMES,
        {
            101: trace.HyperKloosterman(2),
            103: trace.AdditiveRational((0, 1), (1, 0, 1)),
            107: trace.MultiplicativeChar(3, (1, 1)),
            109: trace.HyperKloosterman(3),
            113: trace.AdditiveRational((5,), (0, 1)),
        },
    )


def c12_performance(seed: int) -> tuple[bool, dict]:
    lam = cs.RationalFunctionZ((1, 2, 3, 4), (5, 0, 1))
    t0 = time.perf_counter()
    cs.sigma_direct(lam, 10**6)
    t_sigma = time.perf_counter() - t0
    spec = perf_spec()
    for p in spec.primes:  # warm the per-prime tables outside the timed region
        spec.per_prime[p].values(p)
    t0 = time.perf_counter()
    four = trace.incomplete_sum(spec, 12345, 10**7, workers=4)
    t_sum = time.perf_counter() - t0
    one = trace.incomplete_sum(spec, 12345, 10**7, workers=1)
    identical = four == one
    ok = t_sigma < 1.0 and t_sum < 20.0 and identical
    return ok, {
        "sigma_direct_seconds": round(t_sigma, 3),
        "incomplete_sum_seconds": round(t_sum, 3),
        "bit_identical": identical,
    }


CRITERIA: dict[int, tuple[str, float, Callable[[int], tuple[bool, dict]]]] = {
    1: ("listed-pairs-exact", 1.0, c1_listed_pairs),
    2: ("divisor-word", 1.0, c2_divisor_word),
    3: ("rankin-search", 60.0, c3_rankin),
    4: ("level-lp-gamma", 5.0, c4_levels),
    5: ("calculus-algebra", 5.0, c5_algebra),
    6: ("stationary-phase-crt", 30.0, c6_stationary),
    7: ("inequality-suites", 60.0, c7_inequalities),
    8: ("gauss-correspondence", 30.0, c8_gauss),
    9: ("linear-sieve", 10.0, c9_sieve),
    10: ("fourier-properties", 10.0, c10_fourier),
    11: ("empirical-pairs", 60.0, c11_empirical),
    12: ("performance", 60.0, c12_performance),
}


def run_criterion(number: int, seed: int = DEFAULT_SEED) -> CriterionResult:
    name, limit, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(seed)
    except Exception as exc:  # a crash is a failure, reported with its message
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = time.perf_counter() - t0
    # criterion 12 times its own kernels; its overall limit is just a guard
    passed = bool(ok) and elapsed < limit
    return CriterionResult(number, name, passed, detail, elapsed, limit)


def run_all(numbers=None, seed: int = DEFAULT_SEED, workers: int | None = None) -> list[CriterionResult]:
    nums = sorted(numbers or CRITERIA)
    n = min(trace.thread_count(workers), len(nums))
    if n <= 1:
        return [run_criterion(k, seed) for k in nums]
    with ThreadPoolExecutor(max_workers=n) as ex:
        results = list(ex.map(lambda k: run_criterion(k, seed), nums))
    return sorted(results, key=lambda r: r.number)
