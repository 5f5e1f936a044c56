"""Branch-and-bound over process words.

Both processes act on ``(kappa, lambda)`` as projective-linear maps of the
homogeneous vector ``(kappa, lambda, 1)``::

    A = [[1, 0, 0],        B ~ [[0, 2, -1],
         [1, 1, 1],             [2, 0,  1],
         [2, 0, 2]]             [0, 0,  2]]

so a word is a 3x3 integer matrix and extending a word on the inner side is
one matrix product.  A projective map with positive denominator on the box
sends the box ``[0, 1/2] x [1/2, 1]`` onto the convex hull of the images of
its four corners.  Every objective used here is linear-fractional in
``(kappa, lambda)``, so its extremum over a convex polygon sits at a vertex:
the bound computed from the four image corners is exact for the box and
sound for the reachable set (which lies in the box).
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd

from .pairs import HALF, SEED, ExponentTriple, ProcessWord, apply_word

Matrix = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

_IDENTITY: Matrix = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
_LETTER: dict[str, Matrix] = {
    "A": ((1, 0, 0), (1, 1, 1), (2, 0, 2)),
    "B": ((0, 2, -1), (2, 0, 1), (0, 0, 2)),
}
# box corners and the seed, scaled to integer homogeneous coordinates
_CORNERS = ((0, 1, 2), (0, 2, 2), (1, 1, 2), (1, 2, 2))
_SEED_VEC = (1, 1, 2)


def _matmul(m: Matrix, n: Matrix) -> Matrix:
    rows = tuple(
        tuple(sum(m[i][k] * n[k][j] for k in range(3)) for j in range(3)) for i in range(3)
    )
    g = 0
    for r in rows:
        for x in r:
            g = gcd(g, x)
    if g > 1:
        rows = tuple(tuple(x // g for x in r) for r in rows)
    return rows  # type: ignore[return-value]


def _apply(m: Matrix, v) -> tuple[Fraction, Fraction]:
    x = m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2]
    y = m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2]
    z = m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]
    return Fraction(x, z), Fraction(y, z)


def word_matrix(letters: str) -> Matrix:
    m = _IDENTITY
    for c in letters:
        m = _matmul(m, _LETTER[c])
    return m


class Objective(Enum):
    MinKappaPlusLambda = "rankin"
    MaxDivisorLevel = "divisor"
    MaxSubconvexDelta = "subconvex"

    @property
    def maximize(self) -> bool:
        return self is not Objective.MinKappaPlusLambda

    def evaluate(self, kappa: Fraction, lam: Fraction) -> Fraction:
        if self is Objective.MinKappaPlusLambda:
            return kappa + lam
        if self is Objective.MaxDivisorLevel:
            return (2 - kappa - 3 * lam) / (6 * (kappa + 1))
        return HALF - (kappa + lam) / 2

    def score(self, kappa: Fraction, lam: Fraction) -> Fraction:
        """Value oriented so that smaller is better."""
        v = self.evaluate(kappa, lam)
        return -v if self.maximize else v

    @classmethod
    def from_name(cls, name: str) -> "Objective":
        for o in cls:
            if name in (o.value, o.name):
                return o
        raise ValueError(f"unknown objective {name!r}")


def divisor_level(t: ExponentTriple) -> Fraction:
    """Gain over 2/3 in the level of distribution of the divisor function."""
    return Objective.MaxDivisorLevel.evaluate(t.kappa, t.lam)


def subconvex_delta(t: ExponentTriple) -> Fraction:
    """Saving delta in L(1/2, chi) << q^(1/4 - delta)."""
    return Objective.MaxSubconvexDelta.evaluate(t.kappa, t.lam)


@dataclass
class SearchReport:
    objective: Objective
    best_word: ProcessWord
    best_value: Fraction
    nodes_expanded: int
    depth_cap: int
    timed_out: bool = False
    pruned_sample: list[tuple[str, Fraction]] = field(default_factory=list, repr=False)

    @property
    def best_triple(self) -> ExponentTriple:
        return apply_word(self.best_word)

    def to_json(self) -> dict:
        t = self.best_triple
        return {
            "objective": self.objective.value,
            "best_word": self.best_word.compact(),
            "best_value": f"{self.best_value.numerator}/{self.best_value.denominator}",
            "best_value_decimal": float(self.best_value),
            "pair": t.to_json(),
            "nodes_expanded": self.nodes_expanded,
            "depth_cap": self.depth_cap,
            "timed_out": self.timed_out,
        }


def box_bound(obj: Objective, m: Matrix) -> Fraction:
    """Best achievable score over the image of the whole box under ``m``."""
    return min(obj.score(*_apply(m, c)) for c in _CORNERS)


def optimize_word(
    obj: Objective,
    depth_cap: int,
    time_cap: float | None = 60.0,
    *,
    pruned_sample_size: int = 64,
    seed: int = 0,
) -> SearchReport:
    """Best-first branch-and-bound over BB-free words of length <= depth_cap.

    A node is an outer prefix P; its subtree is {P u (seed)}.  The node is
    pruned when the exact bound over P(box) cannot beat the incumbent.
    """
    if depth_cap < 0:
        raise ValueError("depth_cap must be >= 0")
    rng = random.Random(seed)
    deadline = None if time_cap is None else time.monotonic() + time_cap

    best_word = ""
    best_score = obj.score(SEED.kappa, SEED.lam)
    expanded = 0
    timed_out = False
    pruned: list[tuple[str, Fraction]] = []
    n_pruned = 0
    seen: set = set()

    heap: list = [(box_bound(obj, _IDENTITY), 0, "", _IDENTITY)]
    while heap:
        bound, _, word, m = heapq.heappop(heap)
        if bound >= best_score:
            # everything left is no better: the heap is ordered by bound
            n_pruned += 1 + len(heap)
            for b, _, w, _m in [(bound, 0, word, m)] + heap[: pruned_sample_size]:
                if len(pruned) < pruned_sample_size:
                    pruned.append((w, b))
            break
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        if len(word) >= depth_cap:
            continue
        expanded += 1
        for c in ("A", "B"):
            if c == "B" and word.endswith("B"):
                continue
            w2 = word + c
            m2 = _matmul(m, _LETTER[c])
            if m2 in seen:
                continue
            seen.add(m2)
            sc = obj.score(*_apply(m2, _SEED_VEC))
            if sc < best_score or (sc == best_score and len(w2) < len(best_word)):
                best_score, best_word = sc, w2
            b2 = box_bound(obj, m2)
            if b2 >= best_score:
                n_pruned += 1
                if len(pruned) < pruned_sample_size:
                    pruned.append((w2, b2))
                elif rng.random() < pruned_sample_size / n_pruned:
                    pruned[rng.randrange(pruned_sample_size)] = (w2, b2)
                continue
            if len(w2) >= depth_cap:
                continue
            heapq.heappush(heap, (b2, len(w2), w2, m2))

    best_value = -best_score if obj.maximize else best_score
    return SearchReport(
        objective=obj,
        best_word=ProcessWord(best_word),
        best_value=best_value,
        nodes_expanded=expanded,
        depth_cap=depth_cap,
        timed_out=timed_out,
        pruned_sample=pruned,
    )


def reexpand_pruned(obj: Objective, word: str, incumbent_score: Fraction) -> bool:
    """True when both children of a pruned node are also no better than the incumbent."""
    m = word_matrix(word)
    for c in ("A", "B"):
        if c == "B" and word.endswith("B"):
            continue
        m2 = _matmul(m, _LETTER[c])
        if box_bound(obj, m2) < incumbent_score:
            return False
        if obj.score(*_apply(m2, _SEED_VEC)) < incumbent_score:
            return False
    return True
