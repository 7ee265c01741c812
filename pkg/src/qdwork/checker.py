"""Congruence verification engines.

Given a catalog case and concrete parameters, this module builds both sides
of the congruence, forms Delta = LHS - RHS (prefactor included), and decides
divisibility by each cyclotomic factor power of the modulus.  Two independent
engines implement the decision:

* the **localized** engine computes Delta as a :class:`LocalizedValue` — a
  Phi_m-adic valuation plus a unit residue modulo Phi_m(q)^e — per modulus
  factor, never expanding full polynomials (performance path);
* the **naive** engine reduces Delta to a single normalized
  :class:`~qdwork.polycore.RationalFn`, checks the denominator is coprime to
  the modulus, and performs exact integer polynomial division (trust anchor).

Divisibility over the rationals suffices by primitivity of cyclotomic
polynomials (Gauss's lemma); the naive path re-asserts it with exact integer
division.

Parametric cases (an ``a = q^t`` slot) are verified by
:func:`check_parametric_sampled`: exact root identities at every stated
a = q^{+-E}, plus the cyclotomic component at sampled integer exponents t
chosen pairwise non-congruent modulo every modulus index; the report records
the sample count against the a-degree bound (the soundness margin).
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd, inf, lcm

from .polycore import (LaurentPoly, ONE, q_power, gcd_q,
                       exact_div, DivisibilityFailure)
from .qkit import cyclotomic
from .exprs import FactoredTerm, parse
from .hyperseries import VanishingDenominator
from . import catalog
from .catalog import (ConstraintError, modulus_multiset, root_exponents,
                      side_terms, prefactor_value, validate_params)

__all__ = [
    "LocalizedValue", "FactorOutcome", "VerificationReport",
    "ModulusNotInvertible", "InsufficientSamples", "DegreeGuardExceeded",
    "PrecisionLoss",
    "build_side", "delta_rational", "delta_expanded", "phi_valuation",
    "localize_poly", "localize_factored",
    "check_congruence", "check_identity", "check_parametric_sampled",
    "oracle_crosscheck", "a_degree_bound", "choose_samples", "mutate",
    "NAIVE_DEGREE_ENV", "DEFAULT_NAIVE_DEGREE_LIMIT",
]

NAIVE_DEGREE_ENV = "QDWORK_NAIVE_DEGREE_LIMIT"
DEFAULT_NAIVE_DEGREE_LIMIT = 6000


class ModulusNotInvertible(ArithmeticError):
    """Delta's reduced denominator shares a factor with the modulus."""


class InsufficientSamples(ValueError):
    """No admissible sample set of the requested size exists."""


class DegreeGuardExceeded(RuntimeError):
    """The naive engine refused an instance above its degree limit."""


class PrecisionLoss(ArithmeticError):
    """Localized arithmetic cancelled beyond the working precision."""


# ---------------------------------------------------------------------------
# residue rings Z[q] / Phi_m(q)^k   (dense coefficient lists, ints until an
# inverse introduces Fractions; schoolbook arithmetic — degrees stay small)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _phi_coeffs(m):
    p = cyclotomic(m)
    assert p.offset == 0
    return tuple(p.coeffs)


@lru_cache(maxsize=None)
def _mod_coeffs(m, k):
    """Coefficients of Phi_m(q)^k (monic)."""
    p = cyclotomic(m) ** k
    return tuple(p.coeffs)


def _rem(coeffs, mod):
    """Remainder of a dense coefficient list modulo a monic modulus."""
    n, d = len(coeffs), len(mod)
    if n < d:
        return list(coeffs)
    out = list(coeffs)
    for i in range(n - d, -1, -1):
        c = out[i + d - 1]
        if c:
            out[i + d - 1] = 0
            for j in range(d - 1):
                out[i + j] -= c * mod[j]
    del out[d - 1:]
    while out and not out[-1]:
        out.pop()
    return out


def _mul(a, b, mod):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _rem(out, mod)


def _pow(a, e, mod):
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _mul(result, base, mod)
        base = _mul(base, base, mod)
        e >>= 1
    return result


def _poly_divmod_frac(a, b):
    """Division with remainder over Q[q] (dense lists, b != 0)."""
    a = [Fraction(x) for x in a]
    while a and not a[-1]:
        a.pop()
    db = len(b) - 1
    lead = Fraction(b[-1])
    quo = [Fraction(0)] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] / lead
        quo[len(a) - 1 - db] = c
        for j in range(db + 1):
            a[len(a) - db - 1 + j] -= c * b[j]
        while a and not a[-1]:
            a.pop()
    return quo, a


def _inv(a, mod):
    """Inverse modulo the monic modulus, over Q (extended Euclid)."""
    r0, r1 = [Fraction(c) for c in mod], [Fraction(c) for c in a]
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _poly_divmod_frac(r0, r1)
        # s_next = s0 - q * s1
        prod = [Fraction(0)] * (len(q) + len(s1) - 1) if q and s1 else []
        for i, x in enumerate(q):
            if x:
                for j, y in enumerate(s1):
                    prod[i + j] += x * y
        ln = max(len(s0), len(prod))
        s_next = [(s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)
                  for i in range(ln)]
        while s_next and not s_next[-1]:
            s_next.pop()
        r0, r1, s0, s1 = r1, r, s1, s_next
    if len(r0) != 1:
        raise ModulusNotInvertible("residue shares a factor with the modulus")
    c = r0[0]
    return _rem([x / c for x in s0], mod)


def phi_valuation(poly, m):
    """Exact multiplicity of Phi_m(q) in a nonzero LaurentPoly."""
    if poly.is_zero:
        raise ValueError("zero polynomial has infinite valuation")
    phi = cyclotomic(m)
    v = 0
    while True:
        try:
            poly = exact_div(poly, phi)
        except DivisibilityFailure:
            return v
        v += 1


# ---------------------------------------------------------------------------
# LocalizedValue
# ---------------------------------------------------------------------------

def _content_normalize(coeffs, den):
    """Canonical (int coeffs, positive int den) with content coprime to den."""
    if den < 0:
        coeffs = [-c for c in coeffs]
        den = -den
    if den != 1:
        g = den
        for c in coeffs:
            g = gcd(g, c)
            if g == 1:
                break
        if g > 1:
            coeffs = [c // g for c in coeffs]
            den //= g
    return coeffs, den


def _divide_out_phi_int(coeffs, m):
    """(coeffs / Phi_m, True) for an exact integer division, else unchanged."""
    phi = _phi_coeffs(m)
    db = len(phi) - 1
    if len(coeffs) <= db:
        return coeffs, False
    work = list(coeffs)
    quo = [0] * (len(work) - db)
    for i in range(len(work) - db - 1, -1, -1):
        c = work[i + db]
        quo[i] = c
        if c:
            for j in range(db + 1):
                work[i + j] -= c * phi[j]
    if any(work[:db]):
        return coeffs, False
    while quo and not quo[-1]:
        quo.pop()
    return quo, True


@dataclass(frozen=True)
class LocalizedValue:
    """A value in the Phi_m-adic localization: Phi_m(q)^valuation * unit.

    The unit part is the rational-coefficient polynomial ``residue / den``
    reduced modulo Phi_m(q)^precision (dense integer coefficients over a
    single positive denominator, canonical by content); it is not divisible
    by Phi_m.  The value is known modulo Phi_m^(valuation + precision).
    A locally-zero value carries ``valuation = inf`` and uses ``precision``
    as the absolute exponent below which the value is known to vanish.
    """
    phi_index: int
    precision: int
    valuation: object       # int, or math.inf
    residue: tuple = ()
    den: int = 1

    @staticmethod
    def make(m, k, v, coeffs, den=1):
        coeffs, den = _content_normalize(list(coeffs), den)
        return LocalizedValue(m, k, v, tuple(coeffs), den)

    @property
    def is_zero(self):
        return self.valuation == inf

    @property
    def known_below(self):
        """Absolute exponent: the value is known modulo Phi^known_below."""
        if self.is_zero:
            return self.precision
        return self.valuation + self.precision

    @property
    def rational_residue(self):
        """The unit part as a tuple of Fractions."""
        return tuple(Fraction(c, self.den) for c in self.residue)

    def _require_same(self, other):
        if self.phi_index != other.phi_index:
            raise ValueError("mixed localization indices")

    def __mul__(self, other):
        self._require_same(other)
        m = self.phi_index
        if self.is_zero or other.is_zero:
            if self.is_zero and other.is_zero:
                floor = self.precision + other.precision
            elif self.is_zero:
                floor = self.precision + other.valuation
            else:
                floor = other.precision + self.valuation
            return LocalizedValue(m, max(floor, 0), inf)
        k = min(self.precision, other.precision)
        mod = _mod_coeffs(m, k)
        return LocalizedValue.make(
            m, k, self.valuation + other.valuation,
            _mul(list(self.residue), list(other.residue), mod),
            self.den * other.den)

    def inverse(self):
        if self.is_zero:
            raise ModulusNotInvertible(
                f"locally zero value modulo Phi_{self.phi_index} has no inverse")
        w, c = _inv_unit(self.phi_index, self.precision, list(self.residue))
        return LocalizedValue.make(self.phi_index, self.precision,
                                   -self.valuation,
                                   [self.den * x for x in w], c)

    def __neg__(self):
        if self.is_zero:
            return self
        return LocalizedValue(self.phi_index, self.precision, self.valuation,
                              tuple(-c for c in self.residue), self.den)

    def scale(self, c):
        """Multiply by a nonzero rational constant."""
        if self.is_zero:
            return self
        c = Fraction(c)
        if not c:
            raise ValueError("scaling a unit by zero")
        return LocalizedValue.make(
            self.phi_index, self.precision, self.valuation,
            [c.numerator * x for x in self.residue], self.den * c.denominator)

    def __add__(self, other):
        self._require_same(other)
        m = self.phi_index
        if self.is_zero and other.is_zero:
            return LocalizedValue(m, min(self.precision, other.precision), inf)
        if self.is_zero or other.is_zero:
            zero, val = (self, other) if self.is_zero else (other, self)
            # the zero side is negligible iff it vanishes past the other's
            # absolute knowledge
            if zero.precision >= val.known_below:
                return val
            k = zero.precision - val.valuation
            if k <= 0:
                # the sum is only known to vanish below the zero side's floor
                return LocalizedValue(m, zero.precision, inf)
            mod = _mod_coeffs(m, k)
            return LocalizedValue.make(m, k, val.valuation,
                                       _rem(list(val.residue), mod), val.den)
        v = min(self.valuation, other.valuation)
        know = min(self.known_below, other.known_below)
        k = know - v
        mod = _mod_coeffs(m, k)
        den = lcm(self.den, other.den)
        total = [0] * (k * _phi_degree(m))
        for part in (self, other):
            mult = den // part.den
            if part.valuation > v:
                shifted = _mul(list(part.residue),
                               _pow(list(_phi_coeffs(m)), part.valuation - v,
                                    mod), mod)
            else:
                shifted = _rem(list(part.residue), mod)
            for i, c in enumerate(shifted):
                total[i] += mult * c
        coeffs = total
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        if not coeffs:
            return LocalizedValue(m, know, inf)
        # cancellation: pull out explicit Phi factors
        while True:
            quo, ok = _divide_out_phi_int(coeffs, m)
            if not ok:
                break
            v += 1
            k -= 1
            coeffs = quo
            if not coeffs:
                return LocalizedValue(m, know, inf)
            if k <= 0:
                raise PrecisionLoss("cancellation exhausted working precision")
        return LocalizedValue.make(m, k, v, _rem(coeffs, _mod_coeffs(m, k)),
                                   den)

    def __sub__(self, other):
        return self + (-other)


@lru_cache(maxsize=None)
def _phi_degree(m):
    return len(_phi_coeffs(m)) - 1


def _int_scaled(coeffs):
    """(int coefficient list, common denominator) for rational coefficients."""
    den = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    return [int(c * den) for c in coeffs], den


def _inv_unit(m, k, coeffs):
    """(w, c) with w/c the inverse of an integer unit modulo Phi_m^k.

    Newton lifting from a rational extended-Euclid base inverse mod Phi_m;
    all lift arithmetic stays in integers.
    """
    base = _inv(_rem(list(coeffs), _mod_coeffs(m, 1)), _mod_coeffs(m, 1))
    w, c = _int_scaled([Fraction(x) for x in base])
    have = 1
    while have < k:
        have = min(2 * have, k)
        mod = _mod_coeffs(m, have)
        u = _rem(list(coeffs), mod)
        s = _mul(u, w, mod)                      # u*w = c - eps
        s = [-x for x in s]
        if s:
            s[0] += 2 * c
        else:
            s = [2 * c]
        w = _mul(w, s, mod)                      # w(2c - u w)
        c = c * c
        w, c = _content_normalize(w, c)
    return w, c


@lru_cache(maxsize=None)
def _unit_piece(m, k, j, e):
    """(valuation, int residue, denominator) of (1 - q^j)^e, Phi_m ring.

    The unit part of the factor equals residue / denominator mod Phi_m^k.
    """
    mod = _mod_coeffs(m, k)
    if e < 0:
        val, w, c = _unit_piece(m, k, j, -e)
        wi, ci = _inv_unit(m, k, list(w))
        wi, ci = _content_normalize([c * x for x in wi], ci)
        return -val, tuple(wi), ci
    poly = ONE - q_power(j)
    if j % m == 0:
        poly = exact_div(poly, cyclotomic(m))
        val = 1
    else:
        val = 0
    return val * e, tuple(_pow(list(poly.coeffs), e, mod)), 1


@lru_cache(maxsize=None)
def _q_power_piece(m, k, e):
    """(int residue, denominator) of q^e (any sign) in the Phi_m ring."""
    mod = _mod_coeffs(m, k)
    if e >= 0:
        return tuple(_rem([0] * e + [1], mod)), 1
    w, c = _inv_unit(m, k, _rem([0] * (-e) + [1], mod))
    return tuple(w), c


def localize_factored(ft, m, k):
    """The LocalizedValue of a FactoredTerm at Phi_m, working precision k."""
    if ft.is_zero:
        return LocalizedValue(m, k, inf)
    mod = _mod_coeffs(m, k)
    val = 0
    den = ft.const.denominator
    residue = [ft.const.numerator]
    if ft.qpow:
        piece, c = _q_power_piece(m, k, ft.qpow)
        residue = _mul(residue, list(piece), mod)
        den *= c
    for j, e in sorted(ft.factors.items()):
        piece_val, piece, c = _unit_piece(m, k, j, e)
        val += piece_val
        residue = _mul(residue, list(piece), mod)
        den *= c
    return LocalizedValue.make(m, k, val, residue, den)


def localize_poly(poly, m, k):
    """The LocalizedValue of a nonzero integer LaurentPoly."""
    if poly.is_zero:
        return LocalizedValue(m, k, inf)
    val = 0
    body = LaurentPoly(poly.coeffs, 0)
    phi = cyclotomic(m)
    while True:
        try:
            body = exact_div(body, phi)
            val += 1
        except DivisibilityFailure:
            break
    residue = _rem(list(body.coeffs), _mod_coeffs(m, k))
    den = 1
    if poly.offset:
        piece, c = _q_power_piece(m, k, poly.offset)
        residue = _mul(residue, list(piece), _mod_coeffs(m, k))
        den = c
    return LocalizedValue.make(m, k, val, residue, den)


# ---------------------------------------------------------------------------
# building sides
# ---------------------------------------------------------------------------

def _case_env(n, r, d, t=None):
    env = {"n": n, "r": r, "d": d}
    if t is not None:
        env["t"] = t
    return env


def build_side(case, side, n, r, d, a_subst=None):
    """The exact summand list of one side as RationalFn values.

    ``side`` is "lhs" or "rhs"; ``a_subst`` is the integer t of a = q^t for
    parametric cases.  The prefactor is not included.
    """
    spec = getattr(case, side)
    env = _case_env(n, r, d, a_subst)
    try:
        return [t.as_rational() for t in side_terms(spec, env)]
    except ZeroDivisionError as err:
        raise VanishingDenominator(str(err)) from err


def _side_factored(side, env):
    """(terms, prefactor) with factored prefactors folded into the terms.

    Returns (list of FactoredTerm, RationalFn-or-None leftover prefactor).
    """
    try:
        terms = side_terms(side, env)
        w = prefactor_value(side.prefactor, env)
    except ZeroDivisionError as err:
        raise VanishingDenominator(str(err)) from err
    if isinstance(w, FactoredTerm):
        return [w * t for t in terms], None
    return terms, w


def _side_rational(side, env):
    terms, w = _side_factored(side, env)
    total = None
    for t in terms:
        rt = t.as_rational()
        total = rt if total is None else total + rt
    if w is not None:
        total = w * total
    return total


def delta_rational(case, n, r, d, t=None):
    """LHS - RHS as a fully normalized RationalFn (naive route)."""
    env = _case_env(n, r, d, t)
    return _side_rational(case.lhs, env) - _side_rational(case.rhs, env)


# -- expanded common-denominator route (exact zero tests without gcds) -------

def _side_common(side, env):
    """One side as (num poly, den factor dict, den const, den poly or None).

    The side equals num / (c * den_poly * prod_j (1-q^j)^den[j]); the num
    LaurentPoly carries any negative q-powers in its offset.
    """
    terms, w = _side_factored(side, env)
    terms = [t for t in terms if not t.is_zero]
    if not terms:
        return LaurentPoly(), {}, 1, (w.den if w is not None else None)
    den = {}
    for t in terms:
        for j, e in t.factors.items():
            if e < 0:
                den[j] = max(den.get(j, 0), -e)
    c = lcm(*(t.const.denominator for t in terms))
    num = None
    for t in terms:
        f2 = dict(den)
        for j, e in t.factors.items():
            f2[j] = den.get(j, 0) + e
        p = FactoredTerm(t.const * c, t.qpow, f2).as_rational().num
        num = p if num is None else num + p
    if w is not None:
        num = num * w.num
        return num, den, c, w.den
    return num, den, c, None


def _expand_factors(factors):
    out = ONE
    for j, e in sorted(factors.items()):
        out = out * (ONE - q_power(j)) ** e
    return out


def delta_expanded(case, n, r, d, t=None):
    """(num, den_factors, den_polys): Delta = num / (unit * c * den).

    ``num`` is an integer LaurentPoly; ``den_factors`` maps j to the exponent
    of (1 - q^j) in the common denominator; ``den_polys`` lists expanded
    denominator polynomials contributed by non-product prefactors.
    """
    env = _case_env(n, r, d, t)
    nl, dl, cl, wl = _side_common(case.lhs, env)
    nr, dr, cr, wr = _side_common(case.rhs, env)
    joint = {j: max(dl.get(j, 0), dr.get(j, 0)) for j in set(dl) | set(dr)}
    defl = {j: e - dl.get(j, 0) for j, e in joint.items() if e > dl.get(j, 0)}
    defr = {j: e - dr.get(j, 0) for j, e in joint.items() if e > dr.get(j, 0)}
    c = lcm(cl, cr)
    left = nl * _expand_factors(defl) * (c // cl)
    right = nr * _expand_factors(defr) * (c // cr)
    if wl is not None:
        right = right * wl
    if wr is not None:
        left = left * wr
    num = left - right
    den_polys = [w for w in (wl, wr) if w is not None and w != ONE]
    return num, joint, den_polys


def _den_valuation(m, den_factors, den_polys):
    v = sum(e for j, e in den_factors.items() if j % m == 0)
    for p in den_polys:
        v += phi_valuation(p, m)
    return v


def _den_profile(case, env):
    """Merged template-denominator profile {(j, a_power): multiplicity}.

    Built from the summand templates as written (before any cancellation and
    including summands whose numerator vanishes), so multiplying a sampled
    difference by the profile product always clears it back to one fixed
    bivariate polynomial, whatever the sample.
    """
    dens = {}
    for side in (case.lhs, case.rhs):
        prof = {}
        bound = parse(side.bound).eval_int(env)
        for k in range(bound + 1):
            for key, e in catalog.term_denominator(side.term, k, env).items():
                prof[key] = max(prof.get(key, 0), e)
        for key, e in prof.items():
            dens[key] = max(dens.get(key, 0), e)
    return dens


def _parametric_credit(m, dens, t):
    """Phi_m-valuation that specializing a = q^t adds to the denominator.

    Only parameter-carrying factors count: a pure factor's valuation is the
    same before and after specializing, so it cancels against the bivariate
    congruence's own denominator and earns no credit.
    """
    v = 0
    for (j, p), e in dens.items():
        x = j + p * t
        if p and x and x % m == 0:
            v += e
    return v


def _sample_guard(dens, t):
    """Reject exponents where a denominator factor vanishes identically.

    At such t the specialized sum is undefined (terms degenerate to 0/0),
    so the sample carries no information about the congruence.
    """
    for j, p in dens:
        if p and j + p * t == 0:
            raise VanishingDenominator(
                f"denominator factor (1 - q^{j} a^{p}) vanishes at t={t}")


def _prefactor_bivariate_den(case, env):
    """Combined prefactor denominator with the parameter kept formal.

    The product of both sides' prefactor denominators, never reduced, as a
    ParamPoly: one fixed bivariate polynomial whose specializations give the
    exact extra valuation each sample owes to the prefactors.  ``env`` must
    not bind t.
    """
    den = None
    for side in (case.lhs, case.rhs):
        frac = parse(side.prefactor).eval_parametric(env)
        den = frac.den if den is None else den * frac.den
    return den


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class FactorOutcome:
    index: int              # cyclotomic index m
    required: int           # exponent e
    achieved: object        # exact valuation of Delta, or None for +infinity
    passed: bool

    def to_dict(self):
        return {"index": self.index, "required": self.required,
                "achieved": self.achieved, "passed": self.passed}


@dataclass
class VerificationReport:
    case_id: str
    params: dict
    modulus: tuple          # ((m, e), ...)
    factors: list
    engine: str
    terms: int
    ms: float
    outcome: str            # "pass" | "fail"
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.outcome == "pass"

    def to_dict(self):
        return {"case_id": self.case_id, "params": dict(self.params),
                "modulus": [list(p) for p in self.modulus],
                "factors": [f.to_dict() for f in self.factors],
                "engine": self.engine, "terms": self.terms,
                "ms": round(self.ms, 3), "outcome": self.outcome,
                "details": self.details}


# ---------------------------------------------------------------------------
# engines
# ---------------------------------------------------------------------------

def _localized_side(side, env, m, k):
    terms, w = _side_factored(side, env)
    total = LocalizedValue(m, k, inf)
    prev = value = None
    for t in terms:
        if t.is_zero:
            continue
        # chain consecutive summands through their (small) ratio: the bulk
        # of each Pochhammer product is shared with the previous summand
        if prev is not None:
            value = value * localize_factored(t / prev, m, k)
        else:
            value = localize_factored(t, m, k)
        total = total + value
        prev = t
    if w is not None:
        total = total * localize_poly(w.num, m, k)
        total = total * localize_poly(w.den, m, k).inverse()
    return total


def _localized_factor(case, env, m, e):
    """Exact Phi_m-valuation of Delta (or None for locally zero ≥ e)."""
    # working precision: target + worst-case denominator collisions + slack
    slack = 4
    k = e + slack
    for _ in range(8):
        try:
            lhs = _localized_side(case.lhs, env, m, k)
            rhs = _localized_side(case.rhs, env, m, k)
            delta = lhs - rhs
        except PrecisionLoss:
            k *= 2
            continue
        if delta.is_zero:
            if delta.precision >= e:
                return None
            k *= 2
            continue
        return delta.valuation
    raise PrecisionLoss(
        f"could not settle Phi_{m} valuation at precision {k}")


def _naive_degree_estimate(case, env):
    total = 0
    for side in (case.lhs, case.rhs):
        terms, w = _side_factored(side, env)
        den = {}
        top = 0
        for t in terms:
            if t.is_zero:
                continue
            for j, e in t.factors.items():
                if e < 0:
                    den[j] = max(den.get(j, 0), -e)
            top = max(top, abs(t.qpow) + sum(abs(e) * j
                                             for j, e in t.factors.items()))
        total += top + sum(j * e for j, e in den.items())
        if w is not None:
            total += max(len(w.num.coeffs), len(w.den.coeffs))
    return total


def _naive_guard(case, n, r, d, t=None):
    limit = int(os.environ.get(NAIVE_DEGREE_ENV, DEFAULT_NAIVE_DEGREE_LIMIT))
    est = _naive_degree_estimate(case, _case_env(n, r, d, t))
    if est > limit:
        raise DegreeGuardExceeded(
            f"estimated degree {est} exceeds the naive-engine limit {limit}"
            f" (set {NAIVE_DEGREE_ENV} to raise it)")


def _naive_delta(case, n, r, d, t=None):
    _naive_guard(case, n, r, d, t)
    return delta_rational(case, n, r, d, t)


def _check_factors(case, n, r, d, engine, t=None, numerator=False):
    """Per-factor outcomes for the cyclotomic modulus at (n, r, d[, t]).

    With ``numerator=False`` (direct congruences) Delta is treated as a
    localized value: its reduced denominator must stay coprime to the
    modulus, else ModulusNotInvertible.  With ``numerator=True`` (sampled
    parametric checks) the object under test is the expanded numerator
    Delta * D: specializing a = q^t may legitimately put modulus factors
    into the denominator D, so their valuation is added back.
    """
    pairs = sorted(modulus_multiset(case, n, r, d).pairs)
    if not pairs:
        return []
    out = []
    if engine == "localized":
        env = _case_env(n, r, d, t)
        dens = None
        if numerator:
            dens = _den_profile(case, env)
            _sample_guard(dens, t)
        for m, e in pairs:
            adj = _parametric_credit(m, dens, t) if numerator else 0
            val = _localized_factor(case, env, m, max(e - adj, 1))
            if val is None:
                out.append(FactorOutcome(m, e, None, True))
                continue
            achieved = val + adj
            if not numerator and achieved < 0:
                raise ModulusNotInvertible(
                    f"{case.id}: denominator shares Phi_{m} with the modulus"
                    f" (valuation {achieved})")
            out.append(FactorOutcome(m, e, achieved, achieved >= e))
    elif engine == "naive":
        if numerator:
            _naive_guard(case, n, r, d, t)
            env = _case_env(n, r, d, t)
            dens = _den_profile(case, env)
            _sample_guard(dens, t)
            num, joint, den_polys = delta_expanded(case, n, r, d, t)
            for m, e in pairs:
                if num.is_zero:
                    out.append(FactorOutcome(m, e, None, True))
                    continue
                # num carries the expanded common denominator, which differs
                # from the template profile by cancelled and vanished pieces;
                # translate its valuation back to the difference itself
                # before applying the specialization credit.
                vjoint = _den_valuation(m, joint, den_polys)
                adj = _parametric_credit(m, dens, t)
                val = _valuation_capped(num, m, e + vjoint)
                achieved = val - vjoint + adj
                out.append(FactorOutcome(m, e, achieved, achieved >= e))
            return out
        delta = _naive_delta(case, n, r, d, t)
        for m, e in pairs:
            phi = cyclotomic(m)
            if not delta.is_zero and len(gcd_q(delta.den, phi).coeffs) > 1:
                raise ModulusNotInvertible(
                    f"{case.id}: denominator shares Phi_{m} with the modulus")
            if delta.is_zero:
                out.append(FactorOutcome(m, e, None, True))
                continue
            val = _valuation_capped(delta.num, m, e)
            out.append(FactorOutcome(m, e, val, val >= e))
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return out


def _valuation_capped(num, m, e):
    phi = cyclotomic(m)
    val = 0
    while val < e:
        try:
            num = exact_div(num, phi)
        except DivisibilityFailure:
            break
        val += 1
    return val


def _terms_count(case, n, r, d, t=None):
    env = _case_env(n, r, d, t)
    lb = parse(case.lhs.bound).eval_int(env)
    rb = parse(case.rhs.bound).eval_int(env)
    return lb + rb + 2


def check_congruence(case, n, r=1, d=None, engine="localized", t=None):
    """Verify a congruence case at concrete parameters.

    Returns a VerificationReport whose outcome is "pass" iff every modulus
    factor achieves its required valuation.  For q_identity cases this
    reduces to the exact identity check.
    """
    if d is None:
        d = _default_d(case)
    validate_params(case, n, r, d)
    started = time.time()
    if case.kind == "q_identity":
        ok = _delta_is_zero(case, n, r, d, t)
        return VerificationReport(
            case.id, _params_dict(n, r, d, t), (), [], "exact",
            _terms_count(case, n, r, d, t), 1000 * (time.time() - started),
            "pass" if ok else "fail", {"identity": ok})
    factors = _check_factors(case, n, r, d, engine, t)
    ok = all(f.passed for f in factors)
    pairs = tuple(sorted(modulus_multiset(case, n, r, d).pairs))
    return VerificationReport(
        case.id, _params_dict(n, r, d, t), pairs, factors, engine,
        _terms_count(case, n, r, d, t), 1000 * (time.time() - started),
        "pass" if ok else "fail")


def _params_dict(n, r, d, t=None):
    params = {"n": n, "r": r, "d": d}
    if t is not None:
        params["t"] = t
    return params


def _default_d(case):
    return (case.d_values[0] if isinstance(case, catalog.ClassicalCase)
            else case.constraints.d_values[0])


def _delta_is_zero(case, n, r, d, t=None):
    num, _, _ = delta_expanded(case, n, r, d, t)
    return num.is_zero


def check_identity(case, n, r=1, d=None, t=None):
    """True iff LHS and RHS agree exactly (as rational functions)."""
    if case.kind not in ("q_identity", "parametric_roots"):
        raise ValueError(f"{case.id}: not an identity-style case")
    if d is None:
        d = _default_d(case)
    validate_params(case, n, r, d)
    return _delta_is_zero(case, n, r, d, t)


# ---------------------------------------------------------------------------
# parametric checking
# ---------------------------------------------------------------------------

def a_degree_bound(case, n, r, d):
    """Upper bound for the a-degree of Delta times its common denominator."""
    env = _case_env(n, r, d, 0)
    total = 0
    for side in (case.lhs, case.rhs):
        bound = parse(side.bound).eval_int(env)
        for tmpl in side.term.poch_num + side.term.poch_den:
            if tmpl.a_power:
                length = parse(tmpl.length).eval_int({**env, "k": bound})
                total += abs(tmpl.a_power) * max(length, 0) * tmpl.power
        total += _t_occurrences(side.prefactor)
    return total


def _t_occurrences(text):
    return _count_t(parse(text).ast)


def _count_t(node):
    tag = node[0]
    if tag == "var":
        return 1 if node[1] == "t" else 0
    if tag == "neg":
        return _count_t(node[1])
    if tag == "bin":
        return _count_t(node[2]) + _count_t(node[3])
    if tag == "call":
        return sum(_count_t(a) for a in node[2])
    return 0


def choose_samples(indices, count, forbidden=(), t_ceiling=None, existing=()):
    """Integer exponents t, pairwise non-congruent modulo every index.

    ``existing`` exponents participate in the distinctness constraint but
    do not count toward ``count``.
    """
    if count <= 0:
        return []
    indices = sorted(set(indices))
    if t_ceiling is None:
        t_ceiling = (max(indices) if indices else 1) * (count + 2) + 64
    chosen = []
    taken = list(existing)
    forbidden = set(forbidden)
    for t in range(1, t_ceiling + 1):
        if t in forbidden:
            continue
        if any(t % m == s % m for m in indices for s in taken):
            continue
        chosen.append(t)
        taken.append(t)
        if len(chosen) == count:
            return chosen
    raise InsufficientSamples(
        f"only {len(chosen)} of {count} samples available below {t_ceiling}"
        f" (indices {indices})")


def check_parametric_sampled(case, n, r=1, d=None, sample_count=None,
                             engine="localized", t_ceiling=None):
    """Verify a parametric case: exact root identities plus sampled t's.

    Root factors (1 - a q^E)(a - q^E) are verified exactly: Delta vanishes
    identically at a = q^{+-E}.  The cyclotomic component is verified at
    ``sample_count`` substitutions a = q^t with pairwise distinct exponents
    modulo every modulus index; the report records the a-degree bound, so a
    sample count above it makes the parametric claim fully verified rather
    than spot-checked.
    """
    if case.kind != "parametric_roots":
        raise ValueError(f"{case.id}: not a parametric case")
    if d is None:
        d = _default_d(case)
    validate_params(case, n, r, d)
    started = time.time()
    roots = root_exponents(case, n, r, d)
    root_results = {}
    for E in roots:
        for t in (E, -E):
            root_results[t] = _delta_is_zero(case, n, r, d, t)
    pairs = sorted(modulus_multiset(case, n, r, d).pairs)
    indices = [m for m, _ in pairs]
    bound = a_degree_bound(case, n, r, d)
    explicit = sample_count is not None
    if sample_count is None:
        want = bound + 1 if indices else 0
    else:
        want = sample_count if indices else 0
    forbidden = set(roots) | {-E for E in roots}
    wden = _prefactor_bivariate_den(case, _case_env(n, r, d))
    wfloor = {m: min(phi_valuation(c, m) for c in wden.coeffs.values())
              for m in indices}
    samples, factor_runs, credits = [], [], []
    while len(samples) < want:
        try:
            (t_next,) = choose_samples(indices, 1, forbidden, t_ceiling,
                                       existing=samples)
        except InsufficientSamples:
            if explicit:
                raise InsufficientSamples(
                    f"{case.id}: admissible samples exhausted at"
                    f" {len(samples)} of {want}")
            break
        forbidden.add(t_next)
        spec = wden.specialize(t_next)
        if spec.is_zero:
            continue            # prefactor undefined here: vacuous sample
        try:
            outcomes = _check_factors(case, n, r, d, engine, t_next,
                                      numerator=True)
        except VanishingDenominator:
            continue
        samples.append(t_next)
        factor_runs.append(outcomes)
        credits.append({m: phi_valuation(spec, m) - wfloor[m]
                        for m in indices})
    if indices and not samples and want:
        raise InsufficientSamples(
            f"{case.id}: no usable sample exponent below the ceiling")
    # Merge per-sample outcomes.  Each sample is credited with the extra
    # valuation its prefactor denominators picked up over their bivariate
    # floor; a factor passes iff the credited valuation reaches the
    # requirement at every sample.
    merged = []
    for i, (m, e) in enumerate(pairs):
        achieved = None
        for run, credit in zip(factor_runs, credits):
            a = run[i].achieved
            if a is None:
                continue
            a += credit[m]
            if achieved is None or a < achieved:
                achieved = a
        merged.append(FactorOutcome(m, e, achieved,
                                    achieved is None or achieved >= e))
    roots_ok = all(root_results.values())
    ok = roots_ok and all(f.passed for f in merged)
    report = VerificationReport(
        case.id, _params_dict(n, r, d), tuple(pairs), merged, engine,
        _terms_count(case, n, r, d, 1), 1000 * (time.time() - started),
        "pass" if ok else "fail",
        {"roots": {str(t): ok for t, ok in sorted(root_results.items())},
         "samples": samples, "a_degree_bound": bound,
         "sound": (not indices) or len(samples) > bound})
    return report


# ---------------------------------------------------------------------------
# cross-checking and mutations
# ---------------------------------------------------------------------------

def oracle_crosscheck(case, n, r=1, d=None, t=None):
    """True iff the localized and naive engines agree factor-by-factor.

    Returns None (skip) when the instance exceeds the naive degree guard.
    """
    if d is None:
        d = _default_d(case)
    if case.kind == "q_identity":
        return True
    numerator = case.kind == "parametric_roots"
    if numerator and t is None:
        t = 1

    def run(engine):
        try:
            return _check_factors(case, n, r, d, engine, t,
                                  numerator=numerator)
        except ModulusNotInvertible:
            return "not-invertible"
        except VanishingDenominator:
            return "vanishing-denominator"

    try:
        naive = run("naive")
    except DegreeGuardExceeded:
        return None
    local = run("localized")
    if isinstance(naive, str) or isinstance(local, str):
        return naive == local
    if len(naive) != len(local):
        return False
    for a, b in zip(naive, local):
        if (a.index, a.required, a.passed) != (b.index, b.required, b.passed):
            return False
        if not a.passed and a.achieved != b.achieved:
            return False
    return True


_MUTATIONS = ("prefactor_q", "bracket_shift", "qexp_shift")


def mutate(case, kind):
    """A deliberately broken variant of a congruence case (for sensitivity
    testing): multiply the prefactor by q, shift the first bracket, or shift
    the q-exponent by one."""
    if kind == "prefactor_q":
        side = case.rhs if case.rhs.prefactor != "1" else case.lhs
        new = replace(side, prefactor=f"q*({side.prefactor})")
        if side is case.rhs:
            return replace(case, id=f"{case.id}+prefactor_q", rhs=new)
        return replace(case, id=f"{case.id}+prefactor_q", lhs=new)
    if kind == "bracket_shift":
        term = case.lhs.term
        if not term.brackets:
            raise ValueError(f"{case.id}: no bracket to shift")
        first = term.brackets[0]
        brackets = (replace(first, shift=first.shift + 1),) + term.brackets[1:]
        new = replace(case.lhs, term=replace(term, brackets=brackets))
        return replace(case, id=f"{case.id}+bracket_shift", lhs=new)
    if kind == "qexp_shift":
        term = case.lhs.term
        new = replace(case.lhs,
                      term=replace(term, q_exponent=f"({term.q_exponent})+1"))
        return replace(case, id=f"{case.id}+qexp_shift", lhs=new)
    raise ValueError(f"unknown mutation {kind!r} (choose from {_MUTATIONS})")


def mutation_kinds():
    return _MUTATIONS
