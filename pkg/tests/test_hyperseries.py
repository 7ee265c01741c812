import random

import pytest

from qdwork.exprs import FactoredTerm
from qdwork.hyperseries import (
    HyperSeriesSpec,
    QParam,
    VanishingDenominator,
    eval_phi,
    poch_param,
    watson_instance_check,
    _first_instance,
)
from qdwork.polycore import LaurentPoly, RationalFn


ONE_RF = RationalFn(LaurentPoly([1]), LaurentPoly([1]))


def rf(term):
    return term.as_rational()


def direct_sum(spec, count):
    """Oracle: sum the first `count` terms as literal Pochhammer ratios."""
    acc = RationalFn(LaurentPoly([]), LaurentPoly([1]))
    for k in range(count):
        t = FactoredTerm(spec.argument.sign ** k, spec.argument.exponent * k)
        for p in spec.upper:
            t = t * poch_param(p, spec.base_scale, k)
        for p in spec.lower + (QParam(spec.base_scale),):
            t = t / poch_param(p, spec.base_scale, k)
        acc = acc + rf(t)
    return acc


def test_qparam_factors():
    assert QParam(3).factor() == FactoredTerm.one_minus_q(3)
    assert QParam(3, -1).factor(4) == FactoredTerm.one_plus_q(7)
    assert QParam(-4).vanishes_at(4)
    assert not QParam(-4, -1).vanishes_at(4)
    with pytest.raises(ValueError):
        QParam(1, 2)


def test_poch_param_matches_product():
    got = poch_param(QParam(2, -1), 4, 3)
    want = (FactoredTerm.one_plus_q(2) * FactoredTerm.one_plus_q(6)
            * FactoredTerm.one_plus_q(10))
    assert got == want
    assert poch_param(QParam(5), 3, 0) == FactoredTerm(1)


def test_spec_shape_validation():
    with pytest.raises(ValueError):
        HyperSeriesSpec(upper=(QParam(1),), lower=(QParam(2),),
                        base_scale=1, argument=QParam(1), truncation=3)
    with pytest.raises(ValueError):
        HyperSeriesSpec(upper=(QParam(1), QParam(2)), lower=(QParam(3),),
                        base_scale=0, argument=QParam(1), truncation=3)
    with pytest.raises(ValueError):
        HyperSeriesSpec(upper=(QParam(1), QParam(2)), lower=(QParam(3),),
                        base_scale=1, argument=QParam(1), truncation=-1)


def test_truncation_zero_gives_one():
    spec = HyperSeriesSpec(upper=(QParam(2), QParam(7)), lower=(QParam(3),),
                           base_scale=2, argument=QParam(1), truncation=0)
    assert eval_phi(spec) == ONE_RF


def test_unit_upper_parameter_kills_tail():
    # (1; q)_k = 0 for k >= 1, so the series is exactly 1
    spec = HyperSeriesSpec(upper=(QParam(0), QParam(2)), lower=(QParam(3),),
                           base_scale=1, argument=QParam(1), truncation=9)
    assert eval_phi(spec) == ONE_RF


def test_truncated_sum_against_direct_terms():
    spec = HyperSeriesSpec(
        upper=(QParam(1), QParam(2), QParam(3, -1)),
        lower=(QParam(1, -1), QParam(5)),
        base_scale=2, argument=QParam(3), truncation=5)
    assert eval_phi(spec) == direct_sum(spec, 6)


def test_truncation_linearity():
    rng = random.Random(4711)
    for _ in range(10):
        upper = tuple(QParam(rng.randint(1, 8), rng.choice((1, -1)))
                      for _ in range(3))
        lower = tuple(QParam(rng.randint(1, 8), rng.choice((1, -1)))
                      for _ in range(2))
        N = rng.randint(1, 5)
        spec = HyperSeriesSpec(upper=upper, lower=lower, base_scale=2,
                               argument=QParam(rng.randint(-3, 3)), truncation=N)
        prev = HyperSeriesSpec(upper=upper, lower=lower, base_scale=2,
                               argument=spec.argument, truncation=N - 1)
        last = FactoredTerm(spec.argument.sign ** N, spec.argument.exponent * N)
        for p in upper:
            last = last * poch_param(p, 2, N)
        for p in lower + (QParam(2),):
            last = last / poch_param(p, 2, N)
        assert eval_phi(spec) == eval_phi(prev) + rf(last)


def test_early_termination_matches_natural_bound():
    # (q^-6; q^2)_k terminates after k = 3; a larger truncation changes nothing
    def spec(N):
        return HyperSeriesSpec(
            upper=(QParam(-6), QParam(2), QParam(3, -1)),
            lower=(QParam(1), QParam(5)),
            base_scale=2, argument=QParam(3), truncation=N)
    assert eval_phi(spec(3)) == eval_phi(spec(12)) == direct_sum(spec(3), 4)


def test_q_chu_vandermonde():
    # 2phi1(q^-N, b; c; q, c q^N / b) = (c/b; q)_N / (c; q)_N
    # with b = q^2, c = q^3: argument q^{N+1}
    for N in range(0, 7):
        spec = HyperSeriesSpec(
            upper=(QParam(-N), QParam(2)),
            lower=(QParam(3),),
            base_scale=1, argument=QParam(N + 1), truncation=N)
        got = eval_phi(spec)
        want = rf(poch_param(QParam(1), 1, N) / poch_param(QParam(3), 1, N))
        assert got == want, N


def test_vanishing_denominator_is_detected():
    # lower parameter q^-2 vanishes at term 3, numerator only at term 6
    spec = HyperSeriesSpec(
        upper=(QParam(-5), QParam(1)),
        lower=(QParam(-2),),
        base_scale=1, argument=QParam(1), truncation=8)
    with pytest.raises(VanishingDenominator):
        eval_phi(spec)


def test_numerator_termination_shields_denominator():
    # numerator dies at k = 3 before the denominator zero at k = 6
    spec = HyperSeriesSpec(
        upper=(QParam(-2), QParam(1)),
        lower=(QParam(-5),),
        base_scale=1, argument=QParam(1), truncation=8)
    assert isinstance(eval_phi(spec), RationalFn)


def test_watson_instances_small_n():
    assert watson_instance_check(3)
    assert watson_instance_check(5)


def test_watson_instance_mutation_breaks():
    # shifting the 8phi7 argument exponent by one must break the chain
    n = 3
    _, big, transformed, closed = _first_instance(n)
    assert big == transformed == closed
    mutated = eval_phi(HyperSeriesSpec(
        upper=(QParam(2), QParam(5), QParam(5, -1), QParam(5), QParam(5),
               QParam(2, -1), QParam(2 + 2 * n), QParam(2 - 2 * n)),
        lower=(QParam(1), QParam(1, -1), QParam(1), QParam(1),
               QParam(4, -1), QParam(4 - 2 * n), QParam(4 + 2 * n)),
        base_scale=4, argument=QParam(-3, -1), truncation=(n - 1) // 2))
    assert mutated != transformed


def test_watson_instance_rejects_bad_n():
    with pytest.raises(ValueError):
        watson_instance_check(4)
    with pytest.raises(ValueError):
        watson_instance_check(1)
