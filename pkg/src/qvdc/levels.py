"""Sieve level optimisation and explicit bound evaluators.

The level problem maximises ``gamma = alpha + beta`` (with ``M = X**alpha``,
``N = X**beta``, ``D = MN``, ``L = X**theta``) over a two-variable polygon.
Everything is exact: each constraint is ``a*alpha + b*beta <= c0 + c1*theta``
with rational coefficients, the optimum is found by enumerating pairwise
intersections of constraint lines, and the parametric walk in theta used for
validity ranges follows one optimal basis at a time.

Strict inequalities of the original problem are relaxed to ``<=``; the
results are suprema.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .pairs import HALF, SEED, ExponentTriple, apply_word, as_fraction, format_fraction


class Variant(Enum):
    AsStated = "as-stated"
    Table2 = "table2"


class Family(Enum):
    Ak = "Ak"
    BAk = "BAk"


@dataclass(frozen=True)
class Constraint:
    name: str
    a: Fraction
    b: Fraction
    c0: Fraction
    c1: Fraction = Fraction(0)

    def rhs(self, theta: Fraction) -> Fraction:
        return self.c0 + self.c1 * theta

    def slack(self, alpha: Fraction, beta: Fraction, theta: Fraction) -> Fraction:
        return self.rhs(theta) - self.a * alpha - self.b * beta


@dataclass(frozen=True)
class LevelProblem:
    theta: Fraction
    pair: ExponentTriple
    variant: Variant = Variant.Table2
    family: Family | None = Family.Ak

    def __post_init__(self):
        object.__setattr__(self, "theta", as_fraction(self.theta))
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if self.pair.pair == SEED.pair:
            raise ValueError("the seed pair gives no level")


@dataclass(frozen=True)
class LevelResult:
    gamma: Fraction | None
    alpha: Fraction | None
    beta: Fraction | None
    binding: tuple[str, ...] = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return self.gamma is not None

    def to_json(self) -> dict:
        if not self.feasible:
            return {"feasible": False}
        return {
            "feasible": True,
            "gamma": format_fraction(self.gamma),
            "alpha": format_fraction(self.alpha),
            "beta": format_fraction(self.beta),
            "gamma_decimal": float(self.gamma),
            "binding": list(self.binding),
        }


INFEASIBLE = LevelResult(None, None, None, ())


def constraints(pair: ExponentTriple, variant: Variant, family: Family | None) -> list[Constraint]:
    k, l = pair.kappa, pair.lam
    F = Fraction
    cons = [
        Constraint("alpha>=0", F(-1), F(0), F(0)),
        Constraint("beta>=0", F(0), F(-1), F(0)),
        Constraint("alpha+beta+theta<=3/2", F(1), F(1), F(3, 2), F(-1)),
        Constraint("alpha+theta<=1", F(1), F(0), F(1), F(-1)),
    ]
    extra = F(1) if variant is Variant.AsStated else F(0)
    cons.append(
        Constraint("bilinear", (k + 1) + extra, 2 * (k + 1), F(2), -(l + 3) / 2)
    )
    if family is Family.Ak:
        cons.append(Constraint("family", -(1 - 2 * k), -2 * (1 - 2 * k), F(0), -(l - HALF)))
    elif family is Family.BAk:
        cons.append(Constraint("family", -2 * (1 - l), -4 * (1 - l), F(0), -k))
    return cons


def _intersect(c: Constraint, d: Constraint, theta: Fraction):
    det = c.a * d.b - c.b * d.a
    if det == 0:
        return None
    rc, rd = c.rhs(theta), d.rhs(theta)
    alpha = (rc * d.b - c.b * rd) / det
    beta = (c.a * rd - rc * d.a) / det
    return alpha, beta


def _solve(cons: Sequence[Constraint], theta: Fraction):
    """Optimal vertex and the pair of constraints defining it."""
    best = None
    for c, d in combinations(cons, 2):
        pt = _intersect(c, d, theta)
        if pt is None:
            continue
        alpha, beta = pt
        if any(e.slack(alpha, beta, theta) < 0 for e in cons):
            continue
        # deterministic tie-break: larger gamma, then larger alpha
        key = (alpha + beta, alpha)
        if best is None or key > best[0]:
            best = (key, alpha, beta, (c, d))
    return best


def level_max_gamma(p: LevelProblem) -> LevelResult:
    cons = constraints(p.pair, p.variant, p.family)
    best = _solve(cons, p.theta)
    if best is None:
        return INFEASIBLE
    _, alpha, beta, _ = best
    binding = tuple(c.name for c in cons if c.slack(alpha, beta, p.theta) == 0)
    return LevelResult(alpha + beta, alpha, beta, binding)


def _basis_linear(c: Constraint, d: Constraint):
    """alpha(theta), beta(theta) as (value at 0, slope) for a fixed basis."""
    det = c.a * d.b - c.b * d.a
    a0 = (c.c0 * d.b - c.b * d.c0) / det
    a1 = (c.c1 * d.b - c.b * d.c1) / det
    b0 = (c.a * d.c0 - c.c0 * d.a) / det
    b1 = (c.a * d.c1 - c.c1 * d.a) / det
    return (a0, a1), (b0, b1)


def optimum_pieces(pair: ExponentTriple, variant: Variant, start: Fraction = HALF, stop: Fraction = Fraction(1)):
    """Piecewise-linear optimum (without the family constraint) on [start, stop].

    Yields ``(lo, hi, (a0, a1), (b0, b1))`` so that on ``[lo, hi]`` the optimum
    is ``alpha = a0 + a1*theta`` and ``beta = b0 + b1*theta``.
    """
    cons = constraints(pair, variant, None)
    theta = start
    while theta < stop:
        # probe just right of theta so a degenerate vertex at a breakpoint
        # resolves to the basis that is optimal on the next piece
        probe = theta + (stop - theta) / 10**9
        best = _solve(cons, probe)
        if best is None:
            return
        c, d = best[3]
        (a0, a1), (b0, b1) = _basis_linear(c, d)
        hi = stop
        for e in cons:
            s0 = e.c0 - e.a * a0 - e.b * b0
            s1 = e.c1 - e.a * a1 - e.b * b1
            if s1 < 0:
                root = -s0 / s1
                if root > probe:
                    hi = min(hi, root)
        yield theta, hi, (a0, a1), (b0, b1)
        theta = hi


def validity_range(pair: ExponentTriple, variant: Variant = Variant.Table2, family: Family = Family.Ak) -> Fraction:
    """Largest theta at which the unconstrained optimum still meets the family condition."""
    fam = constraints(pair, variant, family)[-1]
    for lo, hi, (a0, a1), (b0, b1) in optimum_pieces(pair, variant):
        s0 = fam.c0 - fam.a * a0 - fam.b * b0
        s1 = fam.c1 - fam.a * a1 - fam.b * b1
        if s0 + s1 * lo < 0:
            return lo
        if s1 < 0:
            root = -s0 / s1
            if root <= hi:
                return root
    return Fraction(1)


GAMMA_WORDS = ("A", "A2", "A3")
GAMMA_DOMAIN = (HALF, Fraction(16, 17))


def _gamma_candidates(theta: Fraction, closed: bool):
    out = []
    for w in GAMMA_WORDS:
        pair = apply_word(w)
        v = validity_range(pair)
        if theta < v or (closed and theta == v):
            r = level_max_gamma(LevelProblem(theta, pair, Variant.Table2, Family.Ak))
            if r.feasible:
                out.append((r.gamma, w))
    return out


def gamma_of_theta(theta) -> Fraction:
    """Best sieve level exponent from the pairs A, A^2, A^3 of the seed."""
    theta = as_fraction(theta)
    lo, hi = GAMMA_DOMAIN
    if not lo <= theta < hi:
        raise ValueError(f"theta must lie in [1/2, 16/17), got {theta}")
    return max(_gamma_candidates(theta, closed=False))[0]


def gamma_left_limit(theta) -> Fraction:
    """lim gamma(t) as t -> theta from the left; defined on (1/2, 16/17]."""
    theta = as_fraction(theta)
    lo, hi = GAMMA_DOMAIN
    if not lo < theta <= hi:
        raise ValueError(f"left limit needs theta in (1/2, 16/17], got {theta}")
    return max(_gamma_candidates(theta, closed=True))[0]


def gamma_formula(theta) -> Fraction:
    """Closed-form piecewise expression for the sieve level exponent."""
    theta = as_fraction(theta)
    if Fraction(1, 2) <= theta < Fraction(64, 97):
        return (91 - 89 * theta) / 62
    if Fraction(64, 97) <= theta < Fraction(32, 41):
        return (86 - 83 * theta) / 60
    if Fraction(32, 41) <= theta < Fraction(16, 17):
        return (19 - 18 * theta) / 14
    raise ValueError("theta outside [1/2, 16/17)")


def bt_constant(theta) -> Fraction:
    return 2 / gamma_of_theta(theta)


def gamma_curve(start, stop, step) -> list[tuple[Fraction, Fraction]]:
    """Samples of gamma on [start, stop); a sample at 16/17 reports the left limit."""
    start, stop, step = as_fraction(start), as_fraction(stop), as_fraction(step)
    if step <= 0:
        raise ValueError("step must be positive")
    rows = []
    t = start
    while t <= stop:
        if t == GAMMA_DOMAIN[1]:
            rows.append((t, gamma_left_limit(t)))
        else:
            rows.append((t, gamma_of_theta(t)))
        t += step
    return rows


# --------------------------------------------------------------------------
# Explicit bounds
# --------------------------------------------------------------------------

def optimal_split(q: float, N: float, t: ExponentTriple) -> tuple[float, float]:
    """Balanced factorisation q = q1*q2 for one A-process step."""
    k, l = float(t.kappa), float(t.lam)
    log_q1 = (math.log(q) + (k - l) * math.log(N)) / (k + 1)
    q1 = math.exp(log_q1)
    return q1, q / q1


def bound_eval_AkB(q_factors: Sequence[float], delta: float, N: float, What_sup: float) -> float:
    """A^k B estimate with the implied constant set to 1 and epsilon = 0.

    ``q_factors`` is ``[q_1, ..., q_J]``.
    """
    qs = [float(x) for x in q_factors]
    if not qs or min(qs) <= 0 or delta <= 0 or N < 1:
        raise ValueError("factors and delta must be positive, N >= 1")
    J = len(qs)
    q = math.prod(qs)
    omega0 = 1.0 if N > q * delta else 0.0
    bracket = omega0 / math.sqrt(q * delta)
    for j in range(1, J):
        bracket += (qs[J - j] / N) ** (2.0**-j)
    bracket += (delta**2 * qs[0] / N**2) ** (2.0**-J)
    return N * What_sup * bracket


def bound_eval_BAkB(q_factors: Sequence[float], delta: float, N: float, What_sup: float) -> float:
    """B A^k B estimate with the implied constant set to 1 and epsilon = 0."""
    qs = [float(x) for x in q_factors]
    if not qs or min(qs) <= 0 or delta <= 0 or N <= 0:
        raise ValueError("factors, delta and N must be positive")
    J = len(qs)
    q = math.prod(qs)
    qd = q * delta
    omega0 = 1.0 if N > qd else 0.0
    bracket = N * omega0 / qd
    for j in range(1, J):
        bracket += (N * qs[J - j] / qd) ** (2.0**-j)
    bracket += (N**2 * qs[0] / q**2) ** (2.0**-J)
    return math.sqrt(qd) * What_sup * bracket
