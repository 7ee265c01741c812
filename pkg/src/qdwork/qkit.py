"""q-arithmetic toolkit: cyclotomics, Pochhammer symbols, Kronecker symbols.

This module supplies the number-theoretic vocabulary the congruence engine
works in: cyclotomic polynomials Phi_n(q), q-integers [n]_{q^s}, q-shifted
factorials (Pochhammer products), Gaussian binomials, Kronecker symbols and
least nonnegative residues of rationals, plus the normalization of symbolic
modulus products into multisets of cyclotomic powers.

All polynomial values are exact ``LaurentPoly`` objects.  Nothing here is
numeric/floating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd as _int_gcd

from .polycore import LaurentPoly, ONE, ZERO, exact_div, q_power

__all__ = [
    "NonCyclotomicFactor",
    "PochhammerSpec",
    "CyclotomicMultiset",
    "cyclotomic",
    "q_integer",
    "pochhammer",
    "q_binomial",
    "kronecker",
    "least_nonneg_residue",
    "divisors",
    "expand_phi",
    "expand_q_integer",
    "modulus_from_terms",
    "phi_valuation_of_cyclotomic_product",
]


class NonCyclotomicFactor(ValueError):
    """A symbolic modulus factor cannot be written as a cyclotomic product."""


def divisors(n):
    """Sorted positive divisors of n >= 1."""
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@lru_cache(maxsize=None)
def cyclotomic(n):
    """The n-th cyclotomic polynomial Phi_n(q) as a LaurentPoly."""
    if n < 1:
        raise NonCyclotomicFactor(f"cyclotomic index must be positive, got {n}")
    if n == 1:
        return LaurentPoly([-1, 1])
    rest = ONE
    for d in divisors(n)[:-1]:
        rest = rest * cyclotomic(d)
    qn_minus_1 = LaurentPoly([-1] + [0] * (n - 1) + [1])
    return exact_div(qn_minus_1, rest)


def one_minus_qpow(e):
    """The Laurent polynomial 1 - q^e (e any integer; e = 0 gives zero)."""
    return ONE - q_power(e)


def one_plus_qpow(e):
    """The Laurent polynomial 1 + q^e."""
    return ONE + q_power(e)


def q_integer(n, s=1):
    """The q-integer [n]_{q^s} = (1 - q^{sn}) / (1 - q^s) as a LaurentPoly.

    Defined for any integer n (with [0] = 0 and negative n giving the
    Laurent value -q^{sn} [|n|]_{q^s}); the scale s must be nonzero.
    """
    if s == 0:
        raise ValueError("q-integer scale must be nonzero")
    if n == 0:
        return ZERO
    if n < 0:
        return -q_power(s * n) * q_integer(-n, s)
    base = LaurentPoly([1] * n)  # [n]_q
    return base.subst_power(s)


@dataclass(frozen=True)
class PochhammerSpec:
    """A q-shifted factorial: the product over 0 <= i < length of
    (1 - q^{start + step*i}) for kind "standard", or
    (1 + q^{start + step*i}) for kind "signed".

    ``start`` may be negative or zero; ``step`` must be >= 1 and
    ``length`` >= 0.
    """

    kind: str
    start: int
    step: int
    length: int

    def __post_init__(self):
        if self.kind not in ("standard", "signed"):
            raise ValueError(f"unknown Pochhammer kind {self.kind!r}")
        if self.step < 1:
            raise ValueError("Pochhammer step must be >= 1")
        if self.length < 0:
            raise ValueError("Pochhammer length must be >= 0")

    def exponents(self):
        return [self.start + self.step * i for i in range(self.length)]


def pochhammer(spec):
    """Evaluate a PochhammerSpec to an exact LaurentPoly."""
    out = ONE
    build = one_minus_qpow if spec.kind == "standard" else one_plus_qpow
    for e in spec.exponents():
        out = out * build(e)
        if out.is_zero:
            return ZERO
    return out


def q_binomial(n, k, s=1):
    """Gaussian binomial coefficient [n choose k]_{q^s} (zero if k<0 or k>n)."""
    if k < 0 or k > n:
        return ZERO
    k = min(k, n - k)
    num = ONE
    den = ONE
    for i in range(1, k + 1):
        num = num * one_minus_qpow(n - k + i)
        den = den * one_minus_qpow(i)
    result = exact_div(num, den)
    return result.subst_power(s) if s != 1 else result


def kronecker(a, n):
    """The Kronecker symbol (a / n), defined for all integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # n odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def least_nonneg_residue(x, n):
    """Least nonnegative residue <x>_n of a rational x modulo n >= 1.

    The denominator of x must be coprime to n.
    """
    if n < 1:
        raise ValueError("modulus must be >= 1")
    x = Fraction(x)
    den = x.denominator % n
    if _int_gcd(den, n) != 1:
        raise ValueError(f"denominator of {x} is not invertible modulo {n}")
    return x.numerator * pow(den, -1, n) % n if n > 1 else 0


# ---------------------------------------------------------------------------
# cyclotomic multisets and modulus normalization
# ---------------------------------------------------------------------------

class CyclotomicMultiset:
    """A product of cyclotomic powers prod Phi_m(q)^{e_m}, stored as a
    sorted tuple of (index, exponent) pairs with distinct indices and
    exponents >= 1."""

    __slots__ = ("pairs",)

    def __init__(self, pairs=()):
        acc = {}
        for m, e in dict(pairs).items() if isinstance(pairs, dict) else pairs:
            if m < 1:
                raise NonCyclotomicFactor(f"bad cyclotomic index {m}")
            if e < 0:
                raise NonCyclotomicFactor(f"negative exponent for Phi_{m}")
            if e:
                acc[m] = acc.get(m, 0) + e
        object.__setattr__(self, "pairs", tuple(sorted(acc.items())))

    def __setattr__(self, *a):
        raise AttributeError("CyclotomicMultiset is immutable")

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __bool__(self):
        return bool(self.pairs)

    def __eq__(self, other):
        return isinstance(other, CyclotomicMultiset) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def exponent(self, m):
        for i, e in self.pairs:
            if i == m:
                return e
        return 0

    def __mul__(self, other):
        return CyclotomicMultiset(self.pairs + other.pairs)

    def __pow__(self, k):
        if k < 0:
            raise NonCyclotomicFactor("negative multiset power")
        return CyclotomicMultiset([(m, e * k) for m, e in self.pairs])

    def as_poly(self):
        out = ONE
        for m, e in self.pairs:
            out = out * cyclotomic(m) ** e
        return out

    def total_degree(self):
        deg = 0
        for m, e in self.pairs:
            deg += e * (cyclotomic(m).degree)
        return deg

    def __repr__(self):
        return f"CyclotomicMultiset({list(self.pairs)!r})"

    def __str__(self):
        if not self.pairs:
            return "1"
        return " * ".join(f"Phi_{m}^{e}" if e > 1 else f"Phi_{m}"
                          for m, e in self.pairs)


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _expand_scale(indices, s):
    """Indices of the cyclotomic factorization of prod Phi_d(q^s)."""
    for p in _prime_factors(s):
        nxt = []
        for d in indices:
            if d % p == 0:
                nxt.append(d * p)
            else:
                nxt.append(d * p)
                nxt.append(d)
        indices = nxt
    return indices


def _negate_index(d):
    """Index list and unit sign of Phi_d(-q) as a cyclotomic product."""
    if d == 1:
        return [2], -1
    if d == 2:
        return [1], -1
    if d % 2 == 1:
        return [2 * d], 1
    if d % 4 == 2:
        return [d // 2], 1
    return [d], 1


def expand_phi(index, scale=1, negate=False):
    """Write Phi_index((-q)^scale or q^scale) as a unit times a product of
    cyclotomics of q.  Returns (CyclotomicMultiset, sign)."""
    if index < 1:
        raise NonCyclotomicFactor(f"bad cyclotomic index {index}")
    if scale < 1:
        raise NonCyclotomicFactor(f"bad substitution scale {scale}")
    sign = 1
    indices = [index]
    if negate and scale % 2 == 1:
        indices, sign = _negate_index(index)
    out = []
    for d in indices:
        out.extend(_expand_scale([d], scale))
    return CyclotomicMultiset([(m, 1) for m in out]), sign


def expand_q_integer(m, scale=1):
    """The cyclotomic multiset of [m]_{q^scale} (m >= 1)."""
    if m < 1:
        raise NonCyclotomicFactor(f"bad q-integer index {m}")
    out = CyclotomicMultiset()
    for d in divisors(m):
        if d > 1:
            part, _ = expand_phi(d, scale)
            out = out * part
    return out


def modulus_from_terms(terms):
    """Normalize a list of concrete modulus factors into one multiset.

    Each term is a tuple:
      ("qint", m, scale, power)            -> [m]_{q^scale} ^ power
      ("phi",  index, scale, neg, power)   -> Phi_index((-q if neg)^scale) ^ power
    """
    out = CyclotomicMultiset()
    for term in terms:
        if term[0] == "qint":
            _, m, scale, power = term
            out = out * expand_q_integer(m, scale) ** power
        elif term[0] == "phi":
            _, index, scale, neg, power = term
            part, _ = expand_phi(index, scale, neg)
            out = out * part ** power
        else:
            raise NonCyclotomicFactor(f"unknown modulus term {term!r}")
    return out


def phi_valuation_of_cyclotomic_product(spec, d):
    """Order of vanishing of pochhammer(spec) at the primitive d-th roots
    of unity, i.e. the Phi_d-adic valuation of the product.

    Each factor 1 - q^e is squarefree with Phi_d | (1 - q^e) iff d | e, and
    1 + q^e picks up Phi_d iff d | 2e but d does not divide e; so the
    valuation is a counting problem over the exponent progression.
    """
    if d < 1:
        raise ValueError("cyclotomic index must be >= 1")
    c, m, k = spec.start, spec.step, spec.length
    if spec.kind == "standard":
        return _count_divisible(c, m, k, d)
    # signed: Phi_d | (1 + q^e) iff d | 2e but d does not divide e.  For odd
    # d the two conditions coincide, so signed factors never vanish there.
    if d % 2 == 1:
        return 0
    return _count_divisible(c, m, k, d // 2) - _count_divisible(c, m, k, d)


def _count_divisible(c, m, k, d):
    """Count i in [0, k) with d | (c + m*i)."""
    if k <= 0:
        return 0
    g = _int_gcd(m, d)
    if c % g:
        return 0
    dd = d // g
    i0 = (-(c // g)) * pow(m // g, -1, dd) % dd if dd > 1 else 0
    if i0 >= k:
        return 0
    return (k - 1 - i0) // dd + 1
