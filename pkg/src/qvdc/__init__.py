"""Arithmetic exponent pairs, complete and incomplete exponential sums, and
the linear-sieve level computations built on them."""

from .pairs import (
    SEED,
    ExponentSequence,
    ExponentTriple,
    ProcessWord,
    apply_A,
    apply_B,
    apply_word,
    inverse_A,
)

__version__ = "0.1.0"

__all__ = [
    "SEED",
    "ExponentSequence",
    "ExponentTriple",
    "ProcessWord",
    "apply_A",
    "apply_B",
    "apply_word",
    "inverse_A",
]
