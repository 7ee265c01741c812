import random
from fractions import Fraction
from math import comb, gcd

import pytest

from qdwork.polycore import DivisibilityFailure, LaurentPoly, ONE, ZERO, exact_div
from qdwork.qkit import (
    CyclotomicMultiset,
    NonCyclotomicFactor,
    PochhammerSpec,
    cyclotomic,
    divisors,
    expand_phi,
    expand_q_integer,
    kronecker,
    least_nonneg_residue,
    modulus_from_terms,
    phi_valuation_of_cyclotomic_product,
    pochhammer,
    q_binomial,
    q_integer,
)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def mobius(n):
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    if n > 1:
        out = -out
    return out


def cyclotomic_oracle(n):
    """Phi_n via the Mobius product prod_{d|n} (q^{n/d} - 1)^{mu(d)}."""
    num, den = ONE, ONE
    for d in divisors(n):
        mu = mobius(d)
        factor = LaurentPoly([-1] + [0] * (n // d - 1) + [1])
        if mu == 1:
            num = num * factor
        elif mu == -1:
            den = den * factor
    return exact_div(num, den)


def kronecker_oracle(a, n):
    """(a/n) from the definition: Euler's criterion at odd primes, the
    standard table at 2, multiplicativity over the factorization of n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    out = 1
    if n < 0:
        out = -1 if a < 0 else 1
        n = -n
    d = 2
    while n > 1:
        while n % d == 0:
            n //= d
            if d == 2:
                if a % 2 == 0:
                    return 0
                out *= 1 if a % 8 in (1, 7) else -1
            else:
                e = pow(a % d, (d - 1) // 2, d)
                if e == 0:
                    return 0
                out *= 1 if e == 1 else -1
        d += 1
    return out


# ---------------------------------------------------------------------------
# cyclotomic polynomials
# ---------------------------------------------------------------------------

def test_cyclotomic_small_known_values():
    assert str(cyclotomic(1)) == "-1 + q"
    assert cyclotomic(2) == LaurentPoly([1, 1])
    assert cyclotomic(4) == LaurentPoly([1, 0, 1])
    assert cyclotomic(6) == LaurentPoly([1, -1, 1])
    assert cyclotomic(12) == LaurentPoly([1, 0, -1, 0, 1])


def test_cyclotomic_matches_mobius_oracle():
    for n in list(range(1, 40)) + [45, 60, 105]:
        assert cyclotomic(n) == cyclotomic_oracle(n)


def test_cyclotomic_product_recovers_qn_minus_1():
    for n in range(1, 201):
        prod = ONE
        for d in divisors(n):
            prod = prod * cyclotomic(d)
        assert prod == LaurentPoly([-1] + [0] * (n - 1) + [1]), n


def test_cyclotomic_rejects_bad_index():
    with pytest.raises(NonCyclotomicFactor):
        cyclotomic(0)


# ---------------------------------------------------------------------------
# q-integers, Pochhammers, Gaussian binomials
# ---------------------------------------------------------------------------

def test_q_integer_values():
    assert q_integer(0) == ZERO
    assert q_integer(1) == ONE
    assert q_integer(4) == LaurentPoly([1, 1, 1, 1])
    assert q_integer(3, 2) == LaurentPoly([1, 0, 1, 0, 1])
    # [-m] = -q^{-m} [m]
    assert q_integer(-3) == -LaurentPoly([1, 1, 1], -3)
    assert q_integer(-2, 3) == -LaurentPoly([1, 0, 0, 1], -6)


def test_q_integer_at_one_is_n():
    for n in range(-6, 7):
        for s in (1, 2, 3):
            assert q_integer(n, s).evaluate(Fraction(1)) == n


def test_pochhammer_standard_and_signed():
    # (q; q)_3 = (1-q)(1-q^2)(1-q^3)
    p = pochhammer(PochhammerSpec("standard", 1, 1, 3))
    expected = (ONE - LaurentPoly([1], 1))
    expected = expected * (ONE - LaurentPoly([1], 2)) * (ONE - LaurentPoly([1], 3))
    assert p == expected
    # (-q; q^2)_2 = (1+q)(1+q^3)
    p = pochhammer(PochhammerSpec("signed", 1, 2, 2))
    assert p == LaurentPoly([1, 1]) * LaurentPoly([1, 0, 0, 1])
    # zero-length product is 1
    assert pochhammer(PochhammerSpec("standard", 5, 2, 0)) == ONE
    # a zero exponent kills a standard product but doubles a signed one
    assert pochhammer(PochhammerSpec("standard", 0, 2, 3)) == ZERO
    assert pochhammer(PochhammerSpec("signed", 0, 2, 1)) == ONE * 2


def test_pochhammer_splitting_identity():
    # (a; q)_{m+n} = (a; q)_m * (a q^m; q)_n on the exponent level
    rng = random.Random(5150)
    for _ in range(50):
        c = rng.randint(-6, 8)
        m = rng.randint(1, 4)
        k1 = rng.randint(0, 6)
        k2 = rng.randint(0, 6)
        kind = rng.choice(["standard", "signed"])
        whole = pochhammer(PochhammerSpec(kind, c, m, k1 + k2))
        left = pochhammer(PochhammerSpec(kind, c, m, k1))
        right = pochhammer(PochhammerSpec(kind, c + m * k1, m, k2))
        assert whole == left * right


def test_q_binomial_at_one_is_binomial():
    for n in range(0, 10):
        for k in range(-1, n + 2):
            val = q_binomial(n, k)
            want = comb(n, k) if 0 <= k <= n else 0
            assert val.evaluate(Fraction(1)) == want


def test_q_binomial_known_and_scaled():
    assert q_binomial(4, 2) == LaurentPoly([1, 1, 2, 1, 1])
    assert q_binomial(4, 2, 2) == LaurentPoly([1, 1, 2, 1, 1]).subst_power(2)
    # Pascal recurrence: [n k] = [n-1 k] + q^{n-k} [n-1 k-1]
    for n in range(1, 9):
        for k in range(0, n + 1):
            lhs = q_binomial(n, k)
            rhs = q_binomial(n - 1, k) + LaurentPoly([1], n - k) * q_binomial(n - 1, k - 1)
            assert lhs == rhs


# ---------------------------------------------------------------------------
# Kronecker symbol, residues
# ---------------------------------------------------------------------------

def test_kronecker_matches_euler_oracle():
    rng = random.Random(777)
    for _ in range(1000):
        a = rng.randint(-60, 60)
        n = rng.randint(-60, 60)
        assert kronecker(a, n) == kronecker_oracle(a, n), (a, n)


def test_kronecker_classical_values():
    # (-1/p) = 1 iff p = 1 mod 4; (-3/p) = 1 iff p = 1 mod 3; (-2/p) = 1
    # iff p = 1, 3 mod 8 -- for odd primes p.
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if p > 2:
            assert kronecker(-1, p) == (1 if p % 4 == 1 else -1)
        if p != 3:
            assert kronecker(-3, p) == (1 if p % 3 == 1 else -1)
        assert kronecker(-2, p) == (1 if p % 8 in (1, 3) else -1)
    assert kronecker(-3, 3) == 0


def test_least_nonneg_residue():
    assert least_nonneg_residue(7, 5) == 2
    assert least_nonneg_residue(-1, 5) == 4
    assert least_nonneg_residue(Fraction(1, 2), 5) == 3
    assert least_nonneg_residue(Fraction(-1, 3), 7) == 2
    assert least_nonneg_residue(Fraction(9, 4), 1) == 0
    with pytest.raises(ValueError):
        least_nonneg_residue(Fraction(1, 5), 10)


# ---------------------------------------------------------------------------
# modulus normalization
# ---------------------------------------------------------------------------

def test_expand_phi_scale_rules():
    # Phi_3(q^2) = Phi_3 Phi_6
    ms, sign = expand_phi(3, 2)
    assert sign == 1 and ms == CyclotomicMultiset([(3, 1), (6, 1)])
    # Phi_2(q^2) = q^2 + 1 = Phi_4
    ms, sign = expand_phi(2, 2)
    assert sign == 1 and ms == CyclotomicMultiset([(4, 1)])
    # Phi_1(q^6) = q^6 - 1 = product over all divisors
    ms, _ = expand_phi(1, 6)
    assert ms == CyclotomicMultiset([(1, 1), (2, 1), (3, 1), (6, 1)])


def test_expand_phi_negation_rules():
    # Phi_5(-q) = Phi_10
    ms, sign = expand_phi(5, 1, negate=True)
    assert sign == 1 and ms == CyclotomicMultiset([(10, 1)])
    # Phi_6(-q) = Phi_3
    ms, sign = expand_phi(6, 1, negate=True)
    assert sign == 1 and ms == CyclotomicMultiset([(3, 1)])
    # Phi_4(-q) = Phi_4
    ms, sign = expand_phi(4, 1, negate=True)
    assert sign == 1 and ms == CyclotomicMultiset([(4, 1)])
    # Phi_1(-q) = -(q + 1), Phi_2(-q) = -(q - 1)
    ms, sign = expand_phi(1, 1, negate=True)
    assert sign == -1 and ms == CyclotomicMultiset([(2, 1)])
    ms, sign = expand_phi(2, 1, negate=True)
    assert sign == -1 and ms == CyclotomicMultiset([(1, 1)])
    # even scale absorbs the negation: Phi_3((-q)^2) = Phi_3(q^2)
    assert expand_phi(3, 2, negate=True) == expand_phi(3, 2)


def test_expand_phi_multiply_back():
    # unit * product of expanded factors must reproduce Phi_index((+-q)^scale)
    for index in range(1, 16):
        for scale in (1, 2, 3, 4, 6):
            for neg in (False, True):
                ms, sign = expand_phi(index, scale, neg)
                base = cyclotomic(index).subst_power(scale)
                if neg:
                    base = base.subst_negate()
                got = ms.as_poly() * sign
                # q^scale substitution of a negated argument can differ by a
                # unit power of q only when the result is a Laurent monomial
                # shift; cyclotomic expansions here are plain polynomials.
                assert got == base, (index, scale, neg)


def test_modulus_from_terms_frozen_examples():
    # [n^r]_q * prod_{j=1}^{r} Phi_{n^j}(q)^2 at n=5, r=2
    terms = [("qint", 25, 1, 1), ("phi", 5, 1, False, 2), ("phi", 25, 1, False, 2)]
    assert modulus_from_terms(terms) == CyclotomicMultiset([(5, 3), (25, 3)])
    # [9]_{q} = Phi_3 Phi_9
    assert expand_q_integer(9) == CyclotomicMultiset([(3, 1), (9, 1)])
    # [3]_{q^2} = Phi_3 Phi_6
    assert expand_q_integer(3, 2) == CyclotomicMultiset([(3, 1), (6, 1)])


def test_modulus_multiply_back_small():
    # For n <= 15 check [n]_{q^s} against the expanded multiset directly.
    for n in range(1, 16):
        for s in (1, 2, 3):
            assert expand_q_integer(n, s).as_poly() == q_integer(n, s), (n, s)


def test_modulus_rejects_garbage():
    with pytest.raises(NonCyclotomicFactor):
        expand_phi(0, 1)
    with pytest.raises(NonCyclotomicFactor):
        expand_phi(3, 0)
    with pytest.raises(NonCyclotomicFactor):
        expand_q_integer(-2)
    with pytest.raises(NonCyclotomicFactor):
        modulus_from_terms([("bogus", 1)])


def test_multiset_behaviour():
    a = CyclotomicMultiset([(5, 1), (3, 2)])
    b = CyclotomicMultiset([(5, 2)])
    assert (a * b).pairs == ((3, 2), (5, 3))
    assert (b ** 3).pairs == ((5, 6),)
    assert a.exponent(3) == 2 and a.exponent(7) == 0
    assert str(b ** 2) == "Phi_5^4"
    assert str(CyclotomicMultiset()) == "1"
    assert a.total_degree() == 2 * 2 + 4
    assert a.as_poly() == cyclotomic(3) ** 2 * cyclotomic(5)


# ---------------------------------------------------------------------------
# Pochhammer valuations at roots of unity
# ---------------------------------------------------------------------------

def valuation_oracle(spec, d):
    """Phi_d-adic valuation by repeated exact division on the full product."""
    poly = pochhammer(spec)
    assert not poly.is_zero
    phi = cyclotomic(d)
    v = 0
    while True:
        try:
            poly = exact_div(poly, phi)
        except DivisibilityFailure:
            return v
        v += 1


def test_phi_valuation_frozen_example():
    # (q; q^2)_12 has exponents 1,3,...,23; multiples of 5 are 5 and 15.
    spec = PochhammerSpec("standard", 1, 2, 12)
    assert phi_valuation_of_cyclotomic_product(spec, 5) == 2
    assert valuation_oracle(spec, 5) == 2


def test_phi_valuation_matches_division_oracle():
    rng = random.Random(31337)
    for _ in range(60):
        kind = rng.choice(["standard", "signed"])
        c = rng.randint(1, 9)  # keep exponents positive so products are polys
        m = rng.randint(1, 4)
        k = rng.randint(0, 12)
        d = rng.randint(1, 12)
        spec = PochhammerSpec(kind, c, m, k)
        v = phi_valuation_of_cyclotomic_product(spec, d)
        assert v == valuation_oracle(spec, d), (spec, d)


def test_phi_valuation_signed_even_index():
    # (-q; q^2)_k: exponents odd, so Phi_4 | (1 + q^e) iff e = 2 mod 4 never;
    # Phi_2 | (1 + q^e) iff e odd: all k factors.
    spec = PochhammerSpec("signed", 1, 2, 7)
    assert phi_valuation_of_cyclotomic_product(spec, 2) == 7
    assert phi_valuation_of_cyclotomic_product(spec, 4) == 0
    assert phi_valuation_of_cyclotomic_product(spec, 3) == 0
