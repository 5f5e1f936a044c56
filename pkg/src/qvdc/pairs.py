"""Exact-rational calculus of arithmetic exponent triples.

A triple ``(kappa, lambda, nu)`` encodes a bound of the shape
``(q/N)**kappa * N**lambda * delta**nu`` for an incomplete sum of length N of
a composite trace function modulo a squarefree q, deformed by a factor of
modulus delta.  New triples are produced from old ones by the A-process
(Weyl differencing with a free factorisation of q) and the B-process
(completion / Poisson summation).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

HALF = Fraction(1, 2)


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: every exponent in this calculus is rational and a
    float would silently lose exactness.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, order=True)
class ExponentTriple:
    kappa: Fraction
    lam: Fraction
    nu: Fraction

    def __post_init__(self):
        for name in ("kappa", "lam", "nu"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    @property
    def pair(self) -> tuple[Fraction, Fraction]:
        return (self.kappa, self.lam)

    def in_box(self) -> bool:
        """0 <= kappa <= 1/2 <= lambda <= 1 and kappa <= lambda."""
        k, l = self.kappa, self.lam
        return 0 <= k <= HALF and HALF <= l <= 1 and k <= l

    def to_json(self) -> dict:
        return {
            "kappa": format_fraction(self.kappa),
            "lambda": format_fraction(self.lam),
            "nu": format_fraction(self.nu),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ExponentTriple":
        return cls(Fraction(doc["kappa"]), Fraction(doc["lambda"]), Fraction(doc["nu"]))

    def __str__(self):
        return "({}, {}, {})".format(*(format_fraction(x) for x in (self.kappa, self.lam, self.nu)))


def triple(kappa, lam, nu=HALF) -> ExponentTriple:
    return ExponentTriple(as_fraction(kappa), as_fraction(lam), as_fraction(nu))


SEED = ExponentTriple(HALF, HALF, HALF)


def seed_triple() -> ExponentTriple:
    return SEED


def _check_box(t: ExponentTriple, what: str) -> None:
    if not t.in_box():
        raise ValueError(f"{what} left the admissible box: {t}")


def apply_A(t: ExponentTriple) -> ExponentTriple:
    k, l, n = t.kappa, t.lam, t.nu
    out = ExponentTriple(k / (2 * (k + 1)), (k + l + 1) / (2 * (k + 1)), n / 2 + Fraction(1, 4))
    _check_box(out, "A-process image")
    return out


def apply_B(t: ExponentTriple) -> ExponentTriple:
    k, l, n = t.kappa, t.lam, t.nu
    out = ExponentTriple(l - HALF, k + HALF, n + l - k - HALF)
    _check_box(out, "B-process image")
    return out


def inverse_A(t: ExponentTriple) -> ExponentTriple:
    """Undo one A-process step.

    Undefined at kappa = 1/2 (which includes the seed itself).
    """
    k, l, n = t.kappa, t.lam, t.nu
    if t == SEED or k == HALF:
        raise ValueError("inverse A-process is undefined at kappa = 1/2")
    return ExponentTriple(2 * k / (1 - 2 * k), (2 * l - 1) / (1 - 2 * k), 2 * n - HALF)


# --------------------------------------------------------------------------
# Process words
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"([AB])(\d*)")


@dataclass(frozen=True)
class ProcessWord:
    """A word over {A, B}; the rightmost letter acts first."""

    letters: str = ""

    def __post_init__(self):
        if set(self.letters) - {"A", "B"}:
            raise ValueError(f"invalid letters in process word: {self.letters!r}")

    @classmethod
    def parse(cls, text: str) -> "ProcessWord":
        """Parse run-length notation such as ``"BA3BA2BABABA2"``."""
        s = "".join(text.split())
        pos, out = 0, []
        while pos < len(s):
            m = _TOKEN.match(s, pos)
            if m is None:
                raise ValueError(f"cannot parse process word {text!r} at position {pos}")
            count = int(m.group(2)) if m.group(2) else 1
            out.append(m.group(1) * count)
            pos = m.end()
        return cls("".join(out))

    def canonical(self) -> "ProcessWord":
        """Cancel adjacent ``BB`` pairs (B is an involution)."""
        stack: list[str] = []
        for c in self.letters:
            if c == "B" and stack and stack[-1] == "B":
                stack.pop()
            else:
                stack.append(c)
        return ProcessWord("".join(stack))

    def compact(self) -> str:
        if not self.letters:
            return ""
        parts = []
        for m in re.finditer(r"A+|B+", self.letters):
            run = m.group(0)
            parts.append(run[0] + (str(len(run)) if len(run) > 1 else ""))
        return "".join(parts)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.compact() or "(empty)"


_MAPS = {"A": apply_A, "B": apply_B}


def apply_word(w: ProcessWord | str, t: ExponentTriple = SEED) -> ExponentTriple:
    if isinstance(w, str):
        w = ProcessWord.parse(w)
    for c in reversed(w.letters):
        t = _MAPS[c](t)
    return t


def constraint_check(t: ExponentTriple, family: str, q: float, N: float, Q: float) -> bool:
    """Size condition allowing a constrained factor of size Q in the modulus.

    ``family`` is ``"Ak"`` for pairs A^k(seed) and ``"BAk"`` for BA^k(seed).
    Compared in logarithms so that large q, N do not overflow.
    """
    import math

    if t == SEED:
        raise ValueError("the seed triple carries no factorisation constraint")
    if min(q, N, Q) <= 0:
        raise ValueError("q, N, Q must be positive")
    k, l = t.kappa, t.lam
    if family == "Ak":
        a, b = 1 - 2 * k, 2 * k - 2 * l + 1
    elif family == "BAk":
        a, b = 2 - 2 * l, 2 * l - 2 * k - 1
    else:
        raise ValueError(f"unknown family {family!r}")
    lhs = float(a) * math.log(q) + float(b) * math.log(N)
    return lhs >= math.log(Q) - 1e-12 * max(1.0, abs(math.log(Q)))


# --------------------------------------------------------------------------
# Multi-pair sequences (one triple per factor of q)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentSequence:
    """Entry j is paired with the factor q_{J+1-j} of the modulus."""

    entries: tuple[ExponentTriple, ...]

    def __post_init__(self):
        if len(self.entries) < 1:
            raise ValueError("an exponent sequence needs at least one entry")
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def sequence_initial() -> ExponentSequence:
    return ExponentSequence((SEED,))


def sequence_apply_A(s: ExponentSequence) -> ExponentSequence:
    head = ExponentTriple(HALF, Fraction(1), Fraction(0))
    rest = tuple(ExponentTriple(t.kappa / 2, (t.lam + 1) / 2, t.nu) for t in s)
    return ExponentSequence((head,) + rest)


def sequence_AkB(J: int) -> ExponentSequence:
    if J < 1:
        raise ValueError("J must be >= 1")
    entries = [ExponentTriple(Fraction(1, 2**j), Fraction(1), Fraction(0)) for j in range(1, J)]
    last = Fraction(1, 2**J)
    entries.append(ExponentTriple(last, 1 - last, HALF))
    return ExponentSequence(tuple(entries))


def bbfree_words(max_len: int) -> Iterable[ProcessWord]:
    """All words without adjacent B's, of length 0..max_len, shortest first."""
    layer = [""]
    yield ProcessWord("")
    for _ in range(max_len):
        nxt = []
        for w in layer:
            nxt.append("A" + w)
            if not w.startswith("B"):
                nxt.append("B" + w)
        for w in nxt:
            yield ProcessWord(w)
        layer = nxt


def table1_words() -> Sequence[str]:
    return ("A", "A2", "A3", "BA2", "BA3", "ABA2", "A2BA2", "BABA2")
