"""Exact Quicksort comparison counts and a rejection sampler for their limit law."""

from fractions import Fraction

from . import _qslimit
from ._qslimit import (
    DomainError,
    TableInvariantError,
    delta,
    envelope_cdf,
    envelope_mass,
    moments,
    remainder_bound,
    run_cli,
    sample_envelope,
    sample_quicksort,
    sample_synthetic,
    support_bounds,
    toll,
)

__all__ = [
    "DomainError",
    "TableInvariantError",
    "brute_force_counts",
    "counts",
    "delta",
    "density",
    "envelope_cdf",
    "envelope_mass",
    "expected_comparisons",
    "first_decidable_level",
    "moments",
    "remainder_bound",
    "run_cli",
    "sample_envelope",
    "sample_quicksort",
    "sample_synthetic",
    "support_bounds",
    "toll",
]


def _as_dict(min_cost, counts):
    return {min_cost + j: int(c) for j, c in enumerate(counts) if c != "0"}


def counts(n, threads=1, convolution="schoolbook"):
    """{i: N(n, i)} over the nonzero entries."""
    return _as_dict(*_qslimit.counts(n, threads, convolution))


def brute_force_counts(n):
    """Same as counts(n), by running Quicksort on all n! permutations (n <= 9)."""
    return _as_dict(*_qslimit.brute_force_counts(n))


def expected_comparisons(n):
    return Fraction(_qslimit.expected_comparisons(n))


def first_decidable_level():
    return int(_qslimit.first_decidable_level())


def density(n, x):
    """f_n(x) as a dict with the exact window mass and enclosures of f_n and R_n."""
    d = _qslimit.density(n, str(Fraction(x)))
    d["window_mass"] = Fraction(d["window_mass"])
    return d
