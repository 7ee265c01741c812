"""qdwork: exact verification of q-congruences and Dwork-type supercongruences.

The package checks truncated q-hypergeometric sums against cyclotomic moduli
with exact integer arithmetic, evaluates parametric root identities, and
verifies classical p-adic supercongruences obtained in the q -> 1 limit.
"""

__version__ = "0.1.0"

from .polycore import (
    DivisibilityFailure,
    LaurentPoly,
    RationalFn,
    exact_div,
    gcd_q,
    monomial,
    q_power,
)
from .qkit import (
    CyclotomicMultiset,
    NonCyclotomicFactor,
    PochhammerSpec,
    cyclotomic,
    kronecker,
    least_nonneg_residue,
    pochhammer,
    q_binomial,
    q_integer,
)

__all__ = [
    "DivisibilityFailure",
    "LaurentPoly",
    "RationalFn",
    "exact_div",
    "gcd_q",
    "monomial",
    "q_power",
    "CyclotomicMultiset",
    "NonCyclotomicFactor",
    "PochhammerSpec",
    "cyclotomic",
    "kronecker",
    "least_nonneg_residue",
    "pochhammer",
    "q_binomial",
    "q_integer",
    "__version__",
]
