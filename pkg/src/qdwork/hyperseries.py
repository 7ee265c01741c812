"""Exact evaluation of truncated basic hypergeometric series.

An ``(s+1)phi_s`` series with numerator parameters a_0..a_s, denominator
parameters b_1..b_s, base Q and argument z is the sum over k >= 0 of

    (a_0; Q)_k ... (a_s; Q)_k / ((Q; Q)_k (b_1; Q)_k ... (b_s; Q)_k) * z^k.

Every parameter, the base and the argument are signed q-powers
``sign * q^exponent``, so each Pochhammer factor is (1 -+ q^e) and terms stay
in factored form until they are accumulated exactly.  ``eval_phi`` sums the
terms k = 0..truncation; it stops earlier if a numerator Pochhammer factor
vanishes (the series has terminated), and a vanishing denominator factor
before that point raises :class:`VanishingDenominator`.

``watson_instance_check`` verifies, for a given odd n, the two chains of
identities used to prove the fourth-power congruences: a terminating
very-well-poised 8phi7 equals its transformed 4phi3 side, and both collapse
to the stated closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exprs import FactoredTerm
from .polycore import LaurentPoly, RationalFn
from .qkit import kronecker

__all__ = [
    "QParam",
    "HyperSeriesSpec",
    "VanishingDenominator",
    "eval_phi",
    "poch_param",
    "watson_instance_check",
]


class VanishingDenominator(ArithmeticError):
    """A denominator Pochhammer factor vanished before the series ended."""


@dataclass(frozen=True)
class QParam:
    """The signed q-power ``sign * q^exponent`` (sign is +1 or -1)."""

    exponent: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("QParam sign must be +1 or -1")

    def factor(self, shift=0):
        """(1 - self * q^shift) as a FactoredTerm."""
        e = self.exponent + shift
        if self.sign == 1:
            return FactoredTerm.one_minus_q(e)
        return FactoredTerm.one_plus_q(e)

    def vanishes_at(self, shift=0):
        """True when 1 - self * q^shift is identically zero."""
        return self.sign == 1 and self.exponent + shift == 0


@dataclass(frozen=True)
class HyperSeriesSpec:
    """A truncated basic hypergeometric series with monomial parameters."""

    upper: tuple
    lower: tuple
    base_scale: int
    argument: QParam
    truncation: int

    def __post_init__(self):
        if self.base_scale < 1:
            raise ValueError("base exponent must be >= 1")
        if len(self.upper) != len(self.lower) + 1:
            raise ValueError("series must have one more upper than lower parameter")
        if self.truncation < 0:
            raise ValueError("truncation must be >= 0")


def poch_param(param, base, length):
    """(a; q^base)_length as a FactoredTerm, for a = sign * q^exponent."""
    out = FactoredTerm(1)
    for i in range(length):
        out = out * param.factor(base * i)
    return out


def eval_phi(spec):
    """Sum terms k = 0..truncation exactly, returning a RationalFn."""
    base_param = QParam(spec.base_scale)
    acc = RationalFn(LaurentPoly([]), LaurentPoly([1]))
    term = FactoredTerm(1)
    for k in range(spec.truncation + 1):
        acc = acc + term.as_rational()
        if k == spec.truncation:
            break
        shift = spec.base_scale * k
        if any(p.vanishes_at(shift) for p in spec.upper):
            break  # terminated: all remaining terms are zero
        for p in spec.lower + (base_param,):
            if p.vanishes_at(shift):
                raise VanishingDenominator(
                    f"denominator parameter {p} vanishes at term {k + 1}")
        ratio = FactoredTerm(spec.argument.sign, spec.argument.exponent)
        for p in spec.upper:
            ratio = ratio * p.factor(shift)
        for p in spec.lower + (base_param,):
            ratio = ratio / p.factor(shift)
        term = term * ratio
    return acc


# ---------------------------------------------------------------------------
# the two Watson-transformation instances behind the fourth-power congruences
# ---------------------------------------------------------------------------

def _qi(x, s=1):
    """[x]_{q^s} as a FactoredTerm (x may be negative)."""
    return FactoredTerm.one_minus_q(s * x) / FactoredTerm.one_minus_q(s)


def _one():
    return RationalFn(LaurentPoly([1]), LaurentPoly([1]))


def _sum_terms(terms):
    acc = RationalFn(LaurentPoly([]), LaurentPoly([1]))
    for t in terms:
        acc = acc + t.as_rational()
    return acc


def _first_instance(n):
    """The 8phi7 -> 4phi3 chain for the [4k+1] sums; returns the four
    evaluations (plain sum, 8phi7, transformed side, closed form)."""
    m = (n - 1) // 2
    plain = []
    for k in range(m + 1):
        plain.append(
            FactoredTerm(-1 if k % 2 else 1, -4 * k)
            * _qi(4 * k + 1, 2) * _qi(4 * k + 1) ** 2
            * poch_param(QParam(2 - 2 * n), 4, k)
            * poch_param(QParam(2 + 2 * n), 4, k)
            * poch_param(QParam(4), 8, k)
            / poch_param(QParam(4 - 2 * n), 4, k)
            / poch_param(QParam(4 + 2 * n), 4, k)
            / poch_param(QParam(8), 8, k))
    plain_sum = _sum_terms(plain)

    big = eval_phi(HyperSeriesSpec(
        upper=(QParam(2), QParam(5), QParam(5, -1), QParam(5), QParam(5),
               QParam(2, -1), QParam(2 + 2 * n), QParam(2 - 2 * n)),
        lower=(QParam(1), QParam(1, -1), QParam(1), QParam(1),
               QParam(4, -1), QParam(4 - 2 * n), QParam(4 + 2 * n)),
        base_scale=4, argument=QParam(-4, -1), truncation=m))

    prefactor = (poch_param(QParam(6), 4, m)
                 * poch_param(QParam(2 - 2 * n, -1), 4, m)
                 / poch_param(QParam(4, -1), 4, m)
                 / poch_param(QParam(4 - 2 * n), 4, m))
    small = eval_phi(HyperSeriesSpec(
        upper=(QParam(-4), QParam(2, -1), QParam(2 + 2 * n), QParam(2 - 2 * n)),
        lower=(QParam(1), QParam(1), QParam(4, -1)),
        base_scale=4, argument=QParam(4), truncation=1))
    transformed = prefactor.as_rational() * small

    eps = kronecker(-1, n)
    bracket = _one() - (
        FactoredTerm.one_plus_q(2) * FactoredTerm.one_minus_q(2 - 2 * n)
        * FactoredTerm.one_minus_q(2 + 2 * n)
        / FactoredTerm.one_plus_q(4) / FactoredTerm.one_minus_q(1) ** 2
    ).as_rational()
    closed = (FactoredTerm(eps, 1 - n) * _qi(n, 2)).as_rational() * bracket
    return plain_sum, big, transformed, closed


def _second_instance(n):
    """The analogous chain for the [4k-1] sums."""
    m = (n + 1) // 2
    plain = []
    for k in range(m + 1):
        plain.append(
            FactoredTerm(-1 if k % 2 else 1, 4 * k)
            * _qi(4 * k - 1, 2) * _qi(4 * k - 1) ** 2
            * poch_param(QParam(2 * n - 2), 4, k)
            * poch_param(QParam(-2 - 2 * n), 4, k)
            * poch_param(QParam(-4), 8, k)
            / poch_param(QParam(4 + 2 * n), 4, k)
            / poch_param(QParam(4 - 2 * n), 4, k)
            / poch_param(QParam(8), 8, k))
    plain_sum = _sum_terms(plain)

    big = eval_phi(HyperSeriesSpec(
        upper=(QParam(-2), QParam(3), QParam(3, -1), QParam(3), QParam(3),
               QParam(-2, -1), QParam(-2 + 2 * n), QParam(-2 - 2 * n)),
        lower=(QParam(-1), QParam(-1, -1), QParam(-1), QParam(-1),
               QParam(4, -1), QParam(4 - 2 * n), QParam(4 + 2 * n)),
        base_scale=4, argument=QParam(4, -1), truncation=m))
    big = RationalFn(LaurentPoly([-1], -4), LaurentPoly([1])) * big

    prefactor = (poch_param(QParam(2), 4, m)
                 * poch_param(QParam(6 - 2 * n, -1), 4, m)
                 / poch_param(QParam(4, -1), 4, m)
                 / poch_param(QParam(4 - 2 * n), 4, m)
                 * FactoredTerm(-1, -4))
    small = eval_phi(HyperSeriesSpec(
        upper=(QParam(-4), QParam(-2, -1), QParam(-2 + 2 * n), QParam(-2 - 2 * n)),
        lower=(QParam(-1), QParam(-1), QParam(-4, -1)),
        base_scale=4, argument=QParam(4), truncation=1))
    transformed = prefactor.as_rational() * small

    eps = kronecker(-1, n)
    bracket = _one() - (
        FactoredTerm(1, 4) * FactoredTerm.one_plus_q(2)
        * FactoredTerm.one_minus_q(-2 + 2 * n)
        * FactoredTerm.one_minus_q(-2 - 2 * n)
        / FactoredTerm.one_plus_q(4) / FactoredTerm.one_minus_q(1) ** 2
    ).as_rational()
    closed = (FactoredTerm(-2 * eps, n - 5) * _qi(n, 2)
              * FactoredTerm.one_plus_q(4)
              / FactoredTerm.one_plus_q(2 * n - 2)
              / FactoredTerm.one_plus_q(2 * n + 2)).as_rational() * bracket
    return plain_sum, big, transformed, closed


def watson_instance_check(n):
    """Verify both transformation chains at odd n > 1; True iff every link
    of both chains is an exact rational-function identity."""
    if n < 3 or n % 2 == 0:
        raise ValueError("check requires an odd integer n > 1")
    for chain in (_first_instance(n), _second_instance(n)):
        plain_sum, big, transformed, closed = chain
        if not (plain_sum == big == transformed == closed):
            return False
    return True
