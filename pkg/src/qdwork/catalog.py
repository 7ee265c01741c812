"""Case catalog: the data model for truncated q-congruences and classical
p-adic supercongruences, plus the built-in library of cases.

A *congruence case* states that a truncated q-hypergeometric sum is congruent
to a prefactor times a second truncated sum modulo a product of cyclotomic
polynomials (and, for parametric cases, modulo root factors
(1 - a*q^E)(a - q^E) in an indeterminate a).  A *classical case* states a
p-adic valuation bound for the difference of two truncated rational sums.

Everything is stored as small frozen dataclasses whose string fields are
expressions in the mini-language of :mod:`qdwork.exprs`, so cases serialize
to plain JSON and round-trip losslessly.

Conventions
-----------
* The parameter slot ``a`` is never symbolic: it is instantiated as a = q^t
  for an integer t (the variable ``t`` in expression environments), or a = 1.
* Right-hand sides of image-type cases are the exact q -> q^n image of the
  left term (with the a-slot untouched); they are constructed mechanically
  by :func:`scaled_image`.
* A modulus is a product of :class:`ModulusFactor` entries; parametric root
  factors are described separately by :class:`RootSpec`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, asdict, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .exprs import parse, ExprError, FactoredTerm
from .qkit import modulus_from_terms, CyclotomicMultiset

__all__ = [
    "PochTemplate", "BracketFactor", "TermSpec", "SideSpec", "ModulusFactor",
    "RootSpec", "Constraints", "CongruenceCase", "ClassicalCase",
    "CaseSchemaError", "ConstraintError",
    "builtin_cases", "lookup", "select_cases", "load_cases", "save_cases",
    "validate_case", "validate_params", "smallest_admissible",
    "term_factored", "side_terms", "prefactor_value",
    "modulus_terms", "modulus_multiset", "root_exponents",
    "scaled_image", "render_statement", "case_table", "is_prime",
]

KINDS = ("q_congruence", "q_identity", "parametric_roots", "conjecture")


class CaseSchemaError(ValueError):
    """A case definition violates the schema or its own constraints."""


class ConstraintError(ValueError):
    """Concrete parameters (n, r, d) / (p, r, d) violate a case's constraints."""


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PochTemplate:
    """A q-Pochhammer factor template ((+-) a^{a_power} q^start; q^step)_length.

    ``start``, ``step`` are integer expressions over n (and k for factors such
    as (1 + q^{2k})); ``length`` is over n and k.  ``kind`` is "standard" for
    (x; q^step)_length with x = a^{a_power} q^start, "signed" for the same
    with x = -a^{a_power} q^start.  ``power`` is a positive integer exponent.
    """
    start: str
    step: str = "1"
    length: str = "k"
    kind: str = "standard"
    a_power: int = 0
    power: int = 1


@dataclass(frozen=True)
class BracketFactor:
    """A q-integer factor [coef*k + shift]_{q^scale} ^ power."""
    coef: int
    shift: int
    scale: str = "1"
    power: int = 1


@dataclass(frozen=True)
class TermSpec:
    """The k-th summand of a truncated sum, as a pure product of q-factors."""
    alternating: bool = False
    const: str = "1"
    brackets: tuple = ()
    poch_num: tuple = ()
    poch_den: tuple = ()
    q_exponent: str = "0"


@dataclass(frozen=True)
class SideSpec:
    """One side of a congruence: prefactor * sum_{k=0}^{bound} term(k)."""
    bound: str
    term: TermSpec
    prefactor: str = "1"


@dataclass(frozen=True)
class ModulusFactor:
    """One cyclotomic-product factor of a modulus.

    kind "qint" is [index]_{q^scale}; kind "phi" is Phi_index(q^scale) or
    Phi_index(-q^scale) when ``negate``.  ``power`` is an integer expression
    (it may reference j, d); a factor with j_from/j_to set expands to the
    product over that inclusive j-range (empty range = no factors).  A factor
    is dropped entirely when r < min_r.
    """
    kind: str
    index: str
    scale: int = 1
    negate: bool = False
    power: str = "1"
    j_from: str = ""
    j_to: str = ""
    min_r: int = 1


@dataclass(frozen=True)
class RootSpec:
    """Root factors prod_j (1 - a q^E_j)(a - q^E_j), E_j = exponent at j."""
    exponent: str
    j_from: str
    j_to: str


@dataclass(frozen=True)
class Constraints:
    """Admissibility predicates for (n, r, d)."""
    n_min: int = 2
    n_odd: bool = False
    n_coprime: tuple = ()
    n_mod: tuple = ()          # (modulus, (residues...)) or ()
    r_min: int = 1
    r_max: int = 0             # 0 = unbounded
    d_values: tuple = (1,)
    even_ok_d1: bool = False   # allow even n when d == 1


@dataclass(frozen=True)
class CongruenceCase:
    id: str
    kind: str
    anchor: str
    lhs: SideSpec
    rhs: SideSpec
    modulus: tuple
    modulus_n3: tuple = ()     # override used when n == 3 (empty = none)
    roots: RootSpec | None = None
    constraints: Constraints = Constraints()
    notes: str = ""

    @property
    def statement(self):
        return render_statement(self)

    @property
    def is_conjecture(self):
        return self.kind == "conjecture"


@dataclass(frozen=True)
class ClassicalCase:
    """A Dwork-type p-adic supercongruence over exact rationals.

    The claim is v_p(LHS - prefactor * RHS) >= target where LHS/RHS are the
    truncated sums of ``summand`` up to lhs_bound / rhs_bound.  The proven
    and conjectured targets are tracked separately; ``proven_r_max`` (0 = no
    limit) bounds the r-range on which proven_target is asserted.
    """
    id: str
    anchor: str
    summand: str               # rational expression over k, p
    lhs_bound: str             # integer expression over p, r, d
    rhs_bound: str
    prefactor: str             # rational expression over p, r
    proven_target: str = ""    # integer expression over p, r, d ("" = none)
    conjectured_target: str = ""
    proven_r_max: int = 0
    d_values: tuple = (1,)
    p_min: int = 3
    p_mod: tuple = ()          # (modulus, (residues...)) or ()
    r_min: int = 1
    r_max: int = 0
    r_parity: str = ""         # "" or "even"
    notes: str = ""

    @property
    def kind(self):
        return "classical_padic"

    @property
    def is_conjecture(self):
        return not self.proven_target

    @property
    def statement(self):
        return render_statement(self)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _int(text, env):
    return parse(text).eval_int(env)


def _poch_factored(tmpl, env):
    start = _int(tmpl.start, env)
    step = _int(tmpl.step, env)
    length = _int(tmpl.length, env)
    if length < 0:
        raise ExprError(f"negative Pochhammer length {length}")
    if tmpl.a_power:
        if "t" not in env:
            raise ExprError("parameter slot used without a t value")
        start += tmpl.a_power * env["t"]
    build = (FactoredTerm.one_minus_q if tmpl.kind == "standard"
             else FactoredTerm.one_plus_q)
    out = FactoredTerm(1)
    for i in range(length):
        out = out * build(start + i * step)
    if tmpl.power != 1:
        out = out ** tmpl.power
    return out


def term_factored(term, k, env):
    """Evaluate a TermSpec at summation index k as a FactoredTerm.

    ``env`` supplies n, r, d (and t for parametric terms).  Raises
    ZeroDivisionError if a denominator factor vanishes identically.
    """
    e = dict(env)
    e["k"] = k
    const = Fraction(parse(term.const).eval_int(e))
    if term.alternating and k % 2:
        const = -const
    out = FactoredTerm(const, parse(term.q_exponent).eval_int(e))
    if out.is_zero:
        return out
    for b in term.brackets:
        scale = _int(b.scale, e)
        m = b.coef * k + b.shift
        bracket = (FactoredTerm.one_minus_q(scale * m)
                   / FactoredTerm.one_minus_q(scale))
        out = out * bracket ** b.power
        if out.is_zero:
            return out
    for tmpl in term.poch_num:
        out = out * _poch_factored(tmpl, e)
        if out.is_zero:
            return out
    for tmpl in term.poch_den:
        den = _poch_factored(tmpl, e)
        if den.is_zero:
            raise ZeroDivisionError(
                f"vanishing denominator factor {tmpl} at k={k}")
        out = out / den
    return out


def side_terms(side, env):
    """All summand values of one side, k = 0 .. bound."""
    bound = _int(side.bound, env)
    if bound < 0:
        raise ExprError(f"negative summation bound {bound}")
    return [term_factored(side.term, k, env) for k in range(bound + 1)]


def term_denominator(term, k, env):
    """Denominator profile {(j, p): multiplicity} of the k-th summand.

    Lists every factor (1 - q^j a^p) the summand's template puts in a
    denominator position -- before any cancellation against the numerator,
    whether or not the numerator vanishes -- so multiplying the summand by
    the product always clears its denominator.  Signed factors contribute
    the denominator of their (1 - x^2)/(1 - x) form.  The parameter slot
    stays symbolic: p is the template's a_power, never folded into j, and
    pure factors (p = 0) are stored with j > 0.
    """
    e = dict(env)
    e["k"] = k
    profile = {}

    def add(j, p, mult=1):
        if p == 0:
            if j == 0:
                raise ZeroDivisionError(
                    f"vanishing denominator factor in {term} at k={k}")
            j = abs(j)
        profile[(j, p)] = profile.get((j, p), 0) + mult

    for b in term.brackets:
        add(_int(b.scale, e), 0, b.power)
    for where, templates in (("num", term.poch_num), ("den", term.poch_den)):
        for tmpl in templates:
            if where == "num" and tmpl.kind == "standard":
                continue
            start = _int(tmpl.start, e)
            step = _int(tmpl.step, e)
            length = _int(tmpl.length, e)
            for i in range(length):
                x = start + i * step
                p = tmpl.a_power
                if tmpl.kind == "standard":
                    for _ in range(tmpl.power):
                        add(x, p)
                elif (x, p) != (0, 0):
                    # (1 + q^x a^p) = (1 - q^2x a^2p) / (1 - q^x a^p)
                    for _ in range(tmpl.power):
                        add(*((2 * x, 2 * p) if where == "den" else (x, p)))
    return profile


def prefactor_value(text, env):
    """Evaluate a prefactor: FactoredTerm when it is a pure product,
    otherwise an expanded RationalFn."""
    expr = parse(text)
    try:
        return expr.eval_factored(env)
    except ExprError as err:
        if "additive q-structure" not in str(err):
            raise
    return expr.eval_rational(env)


def modulus_terms(case, n, r, d):
    """Concrete modulus factor tuples (for qkit.modulus_from_terms)."""
    factors = case.modulus_n3 if (n == 3 and case.modulus_n3) else case.modulus
    env = {"n": n, "r": r, "d": d}
    out = []
    for f in factors:
        if r < f.min_r:
            continue
        if f.j_from:
            lo, hi = _int(f.j_from, env), _int(f.j_to, env)
            js = range(lo, hi + 1)
        else:
            js = (None,)
        for j in js:
            e = dict(env)
            if j is not None:
                e["j"] = j
            index = _int(f.index, e)
            power = _int(f.power, e)
            if power == 0:
                continue
            if power < 0:
                raise CaseSchemaError(f"negative modulus power in {case.id}")
            if f.kind == "qint":
                out.append(("qint", index, f.scale, power))
            elif f.kind == "phi":
                out.append(("phi", index, f.scale, f.negate, power))
            else:
                raise CaseSchemaError(f"unknown modulus kind {f.kind!r}")
    return out


def modulus_multiset(case, n, r, d):
    """The cyclotomic multiset of the (non-root) modulus part."""
    return modulus_from_terms(modulus_terms(case, n, r, d))


def root_exponents(case, n, r, d):
    """The exponents E_j of the root factors (1 - a q^E)(a - q^E)."""
    if case.roots is None:
        return []
    env = {"n": n, "r": r, "d": d}
    lo, hi = _int(case.roots.j_from, env), _int(case.roots.j_to, env)
    return [_int(case.roots.exponent, {**env, "j": j}) for j in range(lo, hi + 1)]


def scaled_image(term):
    """The q -> q^n image of a TermSpec (the a-slot is left untouched)."""
    return TermSpec(
        alternating=term.alternating,
        const=term.const,
        brackets=tuple(replace(b, scale=_nscale(b.scale)) for b in term.brackets),
        poch_num=tuple(replace(p, start=_nscale(p.start), step=_nscale(p.step))
                       for p in term.poch_num),
        poch_den=tuple(replace(p, start=_nscale(p.start), step=_nscale(p.step))
                       for p in term.poch_den),
        q_exponent=_nscale(term.q_exponent),
    )


def _nscale(text):
    if text == "0":
        return "0"
    if text == "1":
        return "n"
    if re.fullmatch(r"\d+", text):
        return f"{text}*n"
    return f"n*({text})"


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

def is_prime(n):
    """Deterministic primality check by trial division (desk-scale inputs)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def _check_common(case, r, d, c_r_min, c_r_max, c_parity, d_values):
    if d not in d_values:
        raise ConstraintError(
            f"{case.id}: d={d} not in declared domain {d_values}")
    if r < c_r_min:
        raise ConstraintError(f"{case.id}: r={r} below minimum {c_r_min}")
    if c_r_max and r > c_r_max:
        raise ConstraintError(f"{case.id}: r={r} above maximum {c_r_max}")
    if c_parity == "even" and r % 2:
        raise ConstraintError(f"{case.id}: r={r} must be even")


def validate_params(case, n, r=1, d=1):
    """Raise ConstraintError unless (n, r, d) (or (p, r, d)) is admissible."""
    if isinstance(case, ClassicalCase):
        _check_common(case, r, d, case.r_min, case.r_max, case.r_parity,
                      case.d_values)
        if not is_prime(n):
            raise ConstraintError(f"{case.id}: p={n} is not prime")
        if n < case.p_min:
            raise ConstraintError(f"{case.id}: p={n} below minimum {case.p_min}")
        if case.p_mod and n % case.p_mod[0] not in case.p_mod[1]:
            raise ConstraintError(
                f"{case.id}: p={n} fails p = {case.p_mod[1]} (mod {case.p_mod[0]})")
        return
    c = case.constraints
    _check_common(case, r, d, c.r_min, c.r_max, "", c.d_values)
    if n < c.n_min:
        raise ConstraintError(f"{case.id}: n={n} below minimum {c.n_min}")
    if c.n_odd and n % 2 == 0 and not (c.even_ok_d1 and d == 1):
        raise ConstraintError(f"{case.id}: n={n} must be odd")
    for m in c.n_coprime:
        if gcd(n, m) != 1:
            raise ConstraintError(f"{case.id}: gcd(n={n}, {m}) != 1")
    if c.n_mod and n % c.n_mod[0] not in c.n_mod[1]:
        raise ConstraintError(
            f"{case.id}: n={n} fails n = {c.n_mod[1]} (mod {c.n_mod[0]})")


def admissible(case, n, r=1, d=1):
    try:
        validate_params(case, n, r, d)
        return True
    except ConstraintError:
        return False


def smallest_admissible(case, d=1):
    """Smallest admissible (n, r) for the given d."""
    if isinstance(case, ClassicalCase):
        r = case.r_min if case.r_parity != "even" else max(2, case.r_min + case.r_min % 2)
        for p in range(case.p_min, case.p_min + 1000):
            if admissible(case, p, r, d):
                return p, r
    else:
        c = case.constraints
        r = c.r_min
        for n in range(c.n_min, c.n_min + 1000):
            if admissible(case, n, r, d):
                return n, r
    raise CaseSchemaError(f"{case.id}: no admissible n for d={d}")


# ---------------------------------------------------------------------------
# schema validation
# ---------------------------------------------------------------------------

def validate_case(case):
    """Validate a case definition, raising CaseSchemaError on any defect.

    For each declared d, the case is instantiated at its smallest admissible
    (n, r): all bounds must evaluate to nonnegative integers, every summand
    (and every q-exponent at every admissible k) must be well-formed with a
    nonvanishing denominator, and prefactor/modulus/root expressions must
    evaluate.
    """
    try:
        _validate_case(case)
    except CaseSchemaError:
        raise
    except (ExprError, ZeroDivisionError, ValueError, KeyError) as err:
        raise CaseSchemaError(f"{case.id}: {err}") from err


def _validate_case(case):
    if not case.id or not re.fullmatch(r"[A-Za-z0-9._-]+", case.id):
        raise CaseSchemaError(f"bad case id {case.id!r}")
    if isinstance(case, ClassicalCase):
        _validate_classical(case)
        return
    if case.kind not in KINDS:
        raise CaseSchemaError(f"{case.id}: unknown kind {case.kind!r}")
    if case.kind == "q_identity" and case.modulus:
        raise CaseSchemaError(f"{case.id}: q_identity cases take no modulus")
    if case.roots is not None and case.kind != "parametric_roots":
        raise CaseSchemaError(f"{case.id}: only parametric_roots cases take roots")
    c = case.constraints
    if not c.d_values or any(d < 1 for d in c.d_values):
        raise CaseSchemaError(f"{case.id}: bad d domain {c.d_values}")
    parametric = _uses_parameter(case)
    if parametric and case.kind not in ("parametric_roots",):
        raise CaseSchemaError(
            f"{case.id}: parameter slot only allowed in parametric_roots cases")
    for d in c.d_values:
        n, r = smallest_admissible(case, d)
        for n_try in _admissible_samples(case, d, n, r):
            env = {"n": n_try, "r": r, "d": d}
            if parametric:
                env["t"] = 1
            lhs_b = _int(case.lhs.bound, env)
            rhs_b = _int(case.rhs.bound, env)
            if lhs_b < 0 or rhs_b < 0:
                raise CaseSchemaError(f"{case.id}: negative bound at n={n_try}")
        env = {"n": n, "r": r, "d": d}
        if parametric:
            env["t"] = 1
        for side in (case.lhs, case.rhs):
            for term in side_terms(side, env):
                pass
            prefactor_value(side.prefactor, env)
        modulus_multiset(case, n, r, d)
        root_exponents(case, n, r, d)


def _validate_classical(case):
    if not case.d_values or any(d < 1 for d in case.d_values):
        raise CaseSchemaError(f"{case.id}: bad d domain {case.d_values}")
    if not case.proven_target and not case.conjectured_target:
        raise CaseSchemaError(f"{case.id}: no valuation target")
    for d in case.d_values:
        p, r = smallest_admissible(case, d)
        env = {"p": p, "r": r, "d": d}
        lhs_b = _int(case.lhs_bound, env)
        rhs_b = _int(case.rhs_bound, env)
        if lhs_b < 0 or rhs_b < 0:
            raise CaseSchemaError(f"{case.id}: negative bound at p={p}")
        for k in range(min(lhs_b, 60) + 1):
            value = parse(case.summand).eval_fraction({**env, "k": k})
            if not isinstance(value, Fraction):
                raise CaseSchemaError(f"{case.id}: summand not rational at k={k}")
        parse(case.prefactor).eval_fraction(env)
        for target in (case.proven_target, case.conjectured_target):
            if target and _int(target, env) < 1:
                raise CaseSchemaError(f"{case.id}: valuation target below 1")


def _admissible_samples(case, d, n0, r):
    out, n = [], n0
    limit = n0 + 60
    while len(out) < 3 and n < limit:
        if admissible(case, n, r, d):
            out.append(n)
        n += 1
    return out


def _uses_parameter(case):
    for side in (case.lhs, case.rhs):
        if any(p.a_power for p in side.term.poch_num + side.term.poch_den):
            return True
        if "t" in _symbols(side.prefactor):
            return True
    return case.roots is not None


def _symbols(text):
    return set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text)) - {
        "cdiv", "binom2", "kron", "sgn", "eq", "lnr", "binom", "fact",
        "qi", "poch", "pochm", "opq", "rising", "q"}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _r_exp(text):
    """Render an exponent expression, parenthesizing compound forms."""
    if re.fullmatch(r"-?\w+", text):
        return text
    return f"({text})"


def _r_base(tmpl):
    sign = "-" if tmpl.kind == "signed" else ""
    if tmpl.a_power == 1:
        a = "a*"
    elif tmpl.a_power == -1:
        a = "(1/a)*"
    elif tmpl.a_power:
        a = f"a^{tmpl.a_power}*"
    else:
        a = ""
    if tmpl.start == "0":
        q = "1" if a else ("1" if not sign else "1")
        body = f"{a}{q}" if a else "1"
    else:
        body = f"{a}q^{_r_exp(tmpl.start)}"
    return f"{sign}{body}"


def _r_poch(tmpl):
    step = "q" if tmpl.step == "1" else f"q^{_r_exp(tmpl.step)}"
    out = f"({_r_base(tmpl)};{step})_{{{tmpl.length}}}"
    if tmpl.power != 1:
        out += f"^{tmpl.power}"
    return out


def _r_bracket(b):
    if b.coef == 0:
        lin = str(b.shift)
    else:
        coef = "" if b.coef == 1 else str(b.coef)
        lin = f"{coef}k{b.shift:+d}" if b.shift else f"{coef}k"
    out = f"[{lin}]"
    if b.scale != "1":
        out += f"_{{q^{_r_exp(b.scale)}}}"
    if b.power != 1:
        out += f"^{b.power}"
    return out


def _r_term(term):
    num = []
    if term.alternating:
        num.append("(-1)^k")
    if term.const != "1":
        num.append(term.const)
    num += [_r_bracket(b) for b in term.brackets]
    num += [_r_poch(p) for p in term.poch_num]
    den = [_r_poch(p) for p in term.poch_den]
    if term.q_exponent != "0":
        num.append(f"q^{_r_exp(term.q_exponent)}")
    if not num:
        num = ["1"]
    out = " ".join(num)
    if den:
        out += " / (" + " ".join(den) + ")"
    return out


def _r_side(side):
    total = f"sum_{{k=0..{side.bound}}} {_r_term(side.term)}"
    if side.term.const == "0":
        return "0"
    if side.bound == "0" and side.term == TermSpec():
        total = "1"
    if side.prefactor != "1":
        return f"{side.prefactor} * {total}" if total != "1" else side.prefactor
    return total


def _r_modulus_factor(f):
    base = f"-q^{f.scale}" if f.negate else (f"q^{f.scale}" if f.scale != 1 else "q")
    if f.kind == "qint":
        body = f"[{f.index}]" + (f"_{{q^{f.scale}}}" if f.scale != 1 else "")
    else:
        body = f"Phi_{{{f.index}}}({base})"
    if f.power != "1":
        body += f"^{_r_exp(f.power)}"
    if f.j_from:
        body = f"prod_{{j={f.j_from}..{f.j_to}}} {body}"
    if f.min_r > 1:
        body += f" (r>={f.min_r})"
    return body


def _r_modulus(case):
    parts = [_r_modulus_factor(f) for f in case.modulus]
    if case.roots is not None:
        rs = case.roots
        parts.append(
            f"prod_{{j={rs.j_from}..{rs.j_to}}}"
            f" (1 - a q^{_r_exp(rs.exponent)})(a - q^{_r_exp(rs.exponent)})")
    out = " * ".join(parts) if parts else "1"
    if case.modulus_n3:
        out += "  [n=3: " + " * ".join(_r_modulus_factor(f) for f in case.modulus_n3) + "]"
    return out


def render_statement(case):
    """A one-line human-readable rendering of the case."""
    if isinstance(case, ClassicalCase):
        target = case.proven_target or case.conjectured_target
        out = (f"sum_{{k=0..{case.lhs_bound}}} {case.summand}"
               f" == {case.prefactor} * sum_{{k=0..{case.rhs_bound}}} (same)"
               f"  (mod p^{_r_exp(target)})")
        if case.proven_target and case.conjectured_target:
            out += f"  [conjectured: p^{_r_exp(case.conjectured_target)}]"
        return out
    rel = "=" if case.kind == "q_identity" else "=="
    out = f"{_r_side(case.lhs)} {rel} {_r_side(case.rhs)}"
    if case.kind != "q_identity":
        out += f"  (mod {_r_modulus(case)})"
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

SCHEMA_VERSION = 1


def _case_to_dict(case):
    d = asdict(case)
    d["type"] = "classical" if isinstance(case, ClassicalCase) else "congruence"
    return d


def _tuple_of(cls, items):
    return tuple(cls(**item) for item in items)


def _case_from_dict(d):
    d = dict(d)
    kind = d.pop("type", None)
    if kind == "classical":
        for key in ("d_values", "p_mod"):
            d[key] = tuple(tuple(x) if isinstance(x, list) else x for x in d.get(key, ()))
        if d.get("p_mod"):
            mod, residues = d["p_mod"]
            d["p_mod"] = (mod, tuple(residues))
        return ClassicalCase(**d)
    if kind != "congruence":
        raise CaseSchemaError(f"unknown case type {kind!r}")
    def term(t):
        return TermSpec(alternating=t["alternating"], const=t["const"],
                        brackets=_tuple_of(BracketFactor, t["brackets"]),
                        poch_num=_tuple_of(PochTemplate, t["poch_num"]),
                        poch_den=_tuple_of(PochTemplate, t["poch_den"]),
                        q_exponent=t["q_exponent"])
    def side(s):
        return SideSpec(bound=s["bound"], term=term(s["term"]),
                        prefactor=s["prefactor"])
    cons = dict(d["constraints"])
    cons["n_coprime"] = tuple(cons["n_coprime"])
    cons["d_values"] = tuple(cons["d_values"])
    if cons.get("n_mod"):
        mod, residues = cons["n_mod"]
        cons["n_mod"] = (mod, tuple(residues))
    else:
        cons["n_mod"] = ()
    return CongruenceCase(
        id=d["id"], kind=d["kind"], anchor=d["anchor"],
        lhs=side(d["lhs"]), rhs=side(d["rhs"]),
        modulus=_tuple_of(ModulusFactor, d["modulus"]),
        modulus_n3=_tuple_of(ModulusFactor, d.get("modulus_n3") or ()),
        roots=RootSpec(**d["roots"]) if d.get("roots") else None,
        constraints=Constraints(**cons), notes=d.get("notes", ""))


def save_cases(cases, path):
    """Write cases to a JSON document (the documented external format)."""
    doc = {"schema_version": SCHEMA_VERSION,
           "cases": [_case_to_dict(c) for c in cases]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_cases(path):
    """Load and validate cases from the external JSON format."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise CaseSchemaError(f"{path}: not valid JSON ({err})") from err
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise CaseSchemaError(f"{path}: missing or unsupported schema_version")
    out = []
    for i, entry in enumerate(doc.get("cases", [])):
        try:
            case = _case_from_dict(entry)
            validate_case(case)
        except CaseSchemaError as err:
            raise CaseSchemaError(f"{path}: case #{i}: {err}") from err
        except (TypeError, KeyError) as err:
            raise CaseSchemaError(f"{path}: case #{i}: bad field ({err})") from err
        out.append(case)
    ids = [c.id for c in out]
    if len(set(ids)) != len(ids):
        raise CaseSchemaError(f"{path}: duplicate case ids")
    return out


# ---------------------------------------------------------------------------
# built-in cases
# ---------------------------------------------------------------------------

def _p(start, step="1", length="k", a=0, power=1):
    return PochTemplate(start, step, length, "standard", a, power)


def _s(start, step="1", length="k", a=0, power=1):
    return PochTemplate(start, step, length, "signed", a, power)


def _b(coef, shift, scale="1", power=1):
    return BracketFactor(coef, shift, scale, power)


def _qint(index, scale=1, power="1", min_r=1):
    return ModulusFactor("qint", index, scale, False, power, min_r=min_r)


def _phi(index, scale=1, power="1", j=None, negate=False, min_r=1):
    j_from, j_to = (j if j else ("", ""))
    return ModulusFactor("phi", index, scale, negate, power, j_from, j_to, min_r)


_ZERO_SIDE = SideSpec("0", TermSpec(const="0"))
_UNIT_TERM = TermSpec()


def _image_side(bound, term, prefactor):
    return SideSpec(bound, scaled_image(term), prefactor)


def _closed_side(prefactor):
    return SideSpec("0", _UNIT_TERM, prefactor)


@lru_cache(maxsize=1)
def builtin_cases():
    """The built-in case library (immutable tuple)."""
    cases = []
    add = cases.append

    # -- the [8k+1] family --------------------------------------------------
    odd = Constraints(n_min=3, n_odd=True)
    co6 = Constraints(n_min=5, n_odd=True, n_coprime=(6,))
    std_mod = (_qint("n^r"), _phi("n^j", power="2", j=("1", "r")))

    t_81 = TermSpec(
        brackets=(_b(8, 1),),
        poch_num=(_p("1", "2", power=2), _p("1", "2", "2*k")),
        poch_den=(_p("6", "6", power=2), _p("2", "2", "2*k")),
        q_exponent="2*k^2")
    w_81 = "q^((1-n)/2)*qi(n)*kron(-3,n)"
    for suffix, dv in (("a", (2,)), ("b", (1,))):
        add(CongruenceCase(
            id=f"thm1.1{suffix}", kind="q_congruence",
            anchor=f"Theorem thm1.1 (q4{suffix})",
            lhs=SideSpec("(n^r-1)/d", t_81),
            rhs=_image_side("(n^(r-1)-1)/d", t_81, w_81),
            modulus=std_mod,
            constraints=replace(co6, d_values=dv)))

    t_81a = TermSpec(
        brackets=(_b(8, 1),),
        poch_num=(_p("1", "2", a=1), _p("1", "2", a=-1), _p("1", "2", "2*k")),
        poch_den=(_p("6", "6", a=1), _p("6", "6", a=-1), _p("2", "2", "2*k")),
        q_exponent="2*k^2")
    add(CongruenceCase(
        id="lem2.1", kind="parametric_roots", anchor="Lemma lem:1",
        lhs=SideSpec("(n-1)/d", t_81a), rhs=_ZERO_SIDE,
        modulus=(_qint("n"),),
        constraints=replace(co6, d_values=(1, 2), r_max=1),
        notes="holds for every a; verified at sampled a = q^t"))

    add(CongruenceCase(
        id="lem2.2", kind="q_identity", anchor="Lemma 2.2 (eq. 3.1)",
        lhs=SideSpec("(n-1)/2", TermSpec(
            brackets=(_b(8, 1),),
            poch_num=(_p("1-n", "2"), _p("1+n", "2"), _p("1", "2", "2*k")),
            poch_den=(_p("6-n", "6"), _p("6+n", "6"), _p("2", "2", "2*k")),
            q_exponent="2*k^2")),
        rhs=_closed_side(w_81),
        modulus=(),
        constraints=replace(co6, r_max=1)))

    add(CongruenceCase(
        id="thm2.3", kind="parametric_roots",
        anchor="Theorem thm2.3 (eq:main-1-a)",
        lhs=SideSpec("(n^r-1)/d", t_81a),
        rhs=_image_side("(n^(r-1)-1)/d", t_81a, w_81),
        modulus=(_qint("n^r"),),
        roots=RootSpec("(2*j+1)*n", "0", "(n^(r-1)-1)/d"),
        constraints=replace(co6, d_values=(1, 2)),
        notes="root values: a = q^(+-(2j+1)n) gives"
              " q^((1-(2j+1)n)/2) [(2j+1)n] kron(-3,(2j+1)n)"))

    # -- the [3k+1] (q;q^2)^3 family -----------------------------------------
    t_31 = TermSpec(
        brackets=(_b(3, 1),),
        poch_num=(_p("1", "2", power=3),),
        poch_den=(_p("1", "1", power=2), _p("2", "2")),
        q_exponent="-binom2(k+1)")
    w_31 = "q^((1-n)/2)*qi(n)"
    for suffix, dv in (("a", (2,)), ("b", (1,))):
        add(CongruenceCase(
            id=f"thm1.2{suffix}", kind="q_congruence",
            anchor=f"Theorem thm1.2 (q-div-WZ-{1 if suffix == 'a' else 2})",
            lhs=SideSpec("(n^r-1)/d", t_31),
            rhs=_image_side("(n^(r-1)-1)/d", t_31, w_31),
            modulus=std_mod,
            constraints=replace(odd, d_values=dv)))

    t_31a = TermSpec(
        brackets=(_b(3, 1),),
        poch_num=(_p("1", "2", a=1), _p("1", "2", a=-1), _p("1", "2")),
        poch_den=(_p("1", "1", a=1), _p("1", "1", a=-1), _p("2", "2")),
        q_exponent="-binom2(k+1)")
    add(CongruenceCase(
        id="lem-3-1", kind="parametric_roots", anchor="Lemma lem:3 (lem-3-1)",
        lhs=SideSpec("n-1", t_31a), rhs=_ZERO_SIDE,
        modulus=(_qint("n"),),
        constraints=replace(odd, r_max=1)))

    add(CongruenceCase(
        id="lem-3-2", kind="q_identity", anchor="Lemma lem:3 (lem-3-2)",
        lhs=SideSpec("(n-1)/2", TermSpec(
            brackets=(_b(3, 1),),
            poch_num=(_p("1-n", "2"), _p("1+n", "2"), _p("1", "2")),
            poch_den=(_p("1-n", "1"), _p("1+n", "1"), _p("2", "2")),
            q_exponent="-binom2(k+1)")),
        rhs=_closed_side(w_31),
        modulus=(),
        constraints=replace(odd, r_max=1)))

    add(CongruenceCase(
        id="main-2-par", kind="parametric_roots",
        anchor="Theorem main-2-par (eq:main-2-a)",
        lhs=SideSpec("(n^r-1)/d", t_31a),
        rhs=_image_side("(n^(r-1)-1)/d", t_31a, w_31),
        modulus=(_qint("n^r"),),
        roots=RootSpec("(2*j+1)*n", "cdiv(n^(r-1)-1,2*d)", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2)),
        notes="root values: q^((1-(2j+1)n)/2) [(2j+1)n]"))

    # -- [3k+1] with (-1;q)_k (main-new) --------------------------------------
    t_3n = TermSpec(
        brackets=(_b(3, 1),),
        poch_num=(_p("1", "2", power=3), _s("0", "1")),
        poch_den=(_p("1", "1", power=3), _s("2", "1", "2*k")),
        q_exponent="k")
    w_3n = "opq(1)*qi(n)/opq(n)"
    add(CongruenceCase(
        id="main-new", kind="q_congruence",
        anchor="Theorem main-new (eq:q-div-new-1)",
        lhs=SideSpec("(n^r-1)/d", t_3n),
        rhs=_image_side("(n^(r-1)-1)/d", t_3n, w_3n),
        modulus=std_mod,
        constraints=replace(odd, d_values=(1, 2))))

    t_3na = TermSpec(
        brackets=(_b(3, 1),),
        poch_num=(_p("1", "2", a=1), _p("1", "2", a=-1), _p("1", "2"),
                  _s("0", "1")),
        poch_den=(_p("1", "1", a=1), _p("1", "1", a=-1), _p("1", "1"),
                  _s("2", "1", "2*k")),
        q_exponent="k")
    add(CongruenceCase(
        id="div-3-new", kind="parametric_roots",
        anchor="Theorem main-new (eq:div-3-new)",
        lhs=SideSpec("(n-1)/d", t_3na),
        rhs=_closed_side(w_3n),
        modulus=(_qint("n"),),
        roots=RootSpec("n", "0", "0"),
        constraints=replace(odd, d_values=(1, 2), r_max=1)))
    add(CongruenceCase(
        id="main-new-a", kind="parametric_roots",
        anchor="Theorem main-new (eq:main-new-a)",
        lhs=SideSpec("(n^r-1)/d", t_3na),
        rhs=_image_side("(n^(r-1)-1)/d", t_3na, w_3n),
        modulus=(_qint("n^r"),),
        roots=RootSpec("(2*j+1)*n", "cdiv(n^(r-1)-1,2*d)", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2))))

    # -- [3k+1] with (-q;q)_k (main-3) ----------------------------------------
    t_33 = TermSpec(
        alternating=True,
        brackets=(_b(3, 1),),
        poch_num=(_p("1", "2", power=3), _s("1", "1")),
        poch_den=(_p("1", "1", power=3), _s("2", "2")),
        q_exponent="-binom2(k+1)")
    w_33 = "q^((1-n)/2)*qi(n)*kron(-1,n)"
    add(CongruenceCase(
        id="main-3", kind="q_congruence", anchor="Theorem main-3 (eq:div-3-2)",
        lhs=SideSpec("(n^r-1)/d", t_33),
        rhs=_image_side("(n^(r-1)-1)/d", t_33, w_33),
        modulus=std_mod,
        constraints=replace(odd, d_values=(1, 2))))

    t_33a = TermSpec(
        alternating=True,
        brackets=(_b(3, 1),),
        poch_num=(_p("1", "2", a=1), _p("1", "2", a=-1), _p("1", "2"),
                  _s("1", "1")),
        poch_den=(_p("1", "1", a=1), _p("1", "1", a=-1), _p("1", "1"),
                  _s("2", "2")),
        q_exponent="-binom2(k+1)")
    add(CongruenceCase(
        id="div-3-3", kind="parametric_roots",
        anchor="Theorem main-3 (eq:div-3-3)",
        lhs=SideSpec("(n-1)/d", t_33a),
        rhs=_closed_side(w_33),
        modulus=(_qint("n"),),
        roots=RootSpec("n", "0", "0"),
        constraints=replace(odd, d_values=(1, 2), r_max=1)))
    add(CongruenceCase(
        id="main-3-a", kind="parametric_roots",
        anchor="Theorem main-3 (eq:main-3-a)",
        lhs=SideSpec("(n^r-1)/d", t_33a),
        rhs=_image_side("(n^(r-1)-1)/d", t_33a, w_33),
        modulus=(_qint("n^r"),),
        roots=RootSpec("(2*j+1)*n", "cdiv(n^(r-1)-1,2*d)", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2))))

    # -- [4k+1] (q;q^2)^2 (q^2;q^4) (main-4) -----------------------------------
    t_41 = TermSpec(
        alternating=True,
        brackets=(_b(4, 1),),
        poch_num=(_p("1", "2", power=2), _p("2", "4")),
        poch_den=(_p("2", "2", power=2), _p("4", "4")))
    add(CongruenceCase(
        id="main-4", kind="q_congruence", anchor="Theorem main-4 (q-b3)",
        lhs=SideSpec("(n^r-1)/d", t_41),
        rhs=_image_side("(n^(r-1)-1)/d", t_41, w_33),
        modulus=std_mod,
        constraints=replace(odd, d_values=(1, 2))))

    t_41a = TermSpec(
        alternating=True,
        brackets=(_b(4, 1),),
        poch_num=(_p("1", "2", a=1), _p("1", "2", a=-1), _p("2", "4")),
        poch_den=(_p("2", "2", a=1), _p("2", "2", a=-1), _p("4", "4")))
    add(CongruenceCase(
        id="qb2-new", kind="parametric_roots",
        anchor="Theorem main-4 (qb2-new)",
        lhs=SideSpec("(n-1)/d", t_41a),
        rhs=_closed_side(w_33),
        modulus=(_qint("n"),),
        roots=RootSpec("n", "0", "0"),
        constraints=replace(odd, d_values=(1, 2), r_max=1)))
    add(CongruenceCase(
        id="main-4-a", kind="parametric_roots",
        anchor="Theorem main-4 (eq:main-4-a)",
        lhs=SideSpec("(n^r-1)/d", t_41a),
        rhs=_image_side("(n^(r-1)-1)/d", t_41a, w_33),
        modulus=(_qint("n^r"),),
        roots=RootSpec("(2*j+1)*n", "0", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2))))

    # -- [6k+1] (q;q^2)^3 (-q^2;q^4) (main-5) ----------------------------------
    t_61 = TermSpec(
        alternating=True,
        brackets=(_b(6, 1),),
        poch_num=(_p("1", "2", power=3), _s("2", "4")),
        poch_den=(_p("4", "4", power=3), _s("1", "2")),
        q_exponent="k^2")
    w_61 = "q^((1-n)/2)*qi(n)*kron(-2,n)"
    add(CongruenceCase(
        id="main-5", kind="q_congruence", anchor="Theorem main-5 (eq:div-2-1)",
        lhs=SideSpec("(n^r-1)/d", t_61),
        rhs=_image_side("(n^(r-1)-1)/d", t_61, w_61),
        modulus=std_mod,
        constraints=replace(odd, d_values=(1, 2))))

    t_61a = TermSpec(
        alternating=True,
        brackets=(_b(6, 1),),
        poch_num=(_p("1", "2", a=1), _p("1", "2", a=-1), _p("1", "2"),
                  _s("2", "4")),
        poch_den=(_p("4", "4", a=1), _p("4", "4", a=-1), _p("4", "4"),
                  _s("1", "2")),
        q_exponent="k^2")
    add(CongruenceCase(
        id="div-2-2", kind="parametric_roots",
        anchor="Theorem main-5 (eq:div-2-2)",
        lhs=SideSpec("(n-1)/d", t_61a),
        rhs=_closed_side(w_61),
        modulus=(_qint("n"),),
        roots=RootSpec("n", "0", "0"),
        constraints=replace(odd, d_values=(1, 2), r_max=1)))
    add(CongruenceCase(
        id="main-5-a", kind="parametric_roots",
        anchor="Theorem main-5 (eq:main-5-a)",
        lhs=SideSpec("(n^r-1)/d", t_61a),
        rhs=_image_side("(n^(r-1)-1)/d", t_61a, w_61),
        modulus=(_qint("n^r"),),
        roots=RootSpec("(2*j+1)*n", "0", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2))))

    # -- [6k+1]_{q^2} base-q^6 family (main-e) ---------------------------------
    mod1_6 = Constraints(n_min=7, n_odd=True, n_mod=(6, (1,)), d_values=(1, 3))
    t_e = TermSpec(
        alternating=True,
        brackets=(_b(6, 1, "2"),),
        poch_num=(_p("2", "6", power=3), _s("3", "6")),
        poch_den=(_p("6", "6", power=3), _s("5", "6")),
        q_exponent="k")
    w_e = "q^(1-n)*qi(n,2)"
    add(CongruenceCase(
        id="main-e", kind="q_congruence", anchor="Theorem main-e (q-e3)",
        lhs=SideSpec("(n^r-1)/d", t_e),
        rhs=_image_side("(n^(r-1)-1)/d", t_e, w_e),
        modulus=(_qint("n^r", 2), _phi("n^j", 2, power="2", j=("1", "r"))),
        constraints=mod1_6))

    t_ea = TermSpec(
        alternating=True,
        brackets=(_b(6, 1, "2"),),
        poch_num=(_p("2", "6", a=1), _p("2", "6", a=-1), _p("2", "6"),
                  _s("3", "6")),
        poch_den=(_p("6", "6", a=1), _p("6", "6", a=-1), _p("6", "6"),
                  _s("5", "6")),
        q_exponent="k")
    add(CongruenceCase(
        id="long-gen-e", kind="parametric_roots",
        anchor="Theorem main-e (instance of eq:q-Long-gen, m=3)",
        lhs=SideSpec("(n-1)/d", t_ea),
        rhs=_closed_side(w_e),
        modulus=(_phi("n", 2),),
        roots=RootSpec("2*n", "0", "0"),
        constraints=replace(mod1_6, r_max=1)))
    add(CongruenceCase(
        id="main-e-a", kind="parametric_roots",
        anchor="Theorem main-e (parametric)",
        lhs=SideSpec("(n^r-1)/d", t_ea),
        rhs=_image_side("(n^(r-1)-1)/d", t_ea, w_e),
        modulus=(_qint("n^r", 2),),
        roots=RootSpec("(6*j+2)*n", "0", "(n^(r-1)-1)/d"),
        constraints=mod1_6))

    # -- [8k+1] base-q^4 family (main-f) ---------------------------------------
    mod1_4 = Constraints(n_min=5, n_odd=True, n_mod=(4, (1,)), d_values=(1, 4))
    t_f = TermSpec(
        alternating=True,
        brackets=(_b(8, 1),),
        poch_num=(_p("1", "4", power=3), _s("2", "4")),
        poch_den=(_p("4", "4", power=3), _s("3", "4")),
        q_exponent="k")
    add(CongruenceCase(
        id="main-f", kind="q_congruence", anchor="Theorem main-f (q-f3)",
        lhs=SideSpec("(n^r-1)/d", t_f),
        rhs=_image_side("(n^(r-1)-1)/d", t_f, w_61),
        modulus=std_mod,
        constraints=mod1_4))

    t_fa = TermSpec(
        alternating=True,
        brackets=(_b(8, 1),),
        poch_num=(_p("1", "4", a=1), _p("1", "4", a=-1), _p("1", "4"),
                  _s("2", "4")),
        poch_den=(_p("4", "4", a=1), _p("4", "4", a=-1), _p("4", "4"),
                  _s("3", "4")),
        q_exponent="k")
    add(CongruenceCase(
        id="long-gen-f", kind="parametric_roots",
        anchor="Theorem main-f (instance of eq:q-Long-gen, m=4)",
        lhs=SideSpec("(n-1)/d", t_fa),
        rhs=_closed_side(w_61),
        modulus=(_phi("n"),),
        roots=RootSpec("n", "0", "0"),
        constraints=replace(mod1_4, r_max=1)))
    add(CongruenceCase(
        id="main-f-a", kind="parametric_roots",
        anchor="Theorem main-f (parametric)",
        lhs=SideSpec("(n^r-1)/d", t_fa),
        rhs=_image_side("(n^(r-1)-1)/d", t_fa, w_61),
        modulus=(_qint("n^r"),),
        roots=RootSpec("(4*j+1)*n", "0", "(n^(r-1)-1)/d"),
        constraints=mod1_4))

    # -- [4k+1]_{q^2}[4k+1]^2 cubic-bracket family (new-1) ----------------------
    t_c1 = TermSpec(
        alternating=True,
        brackets=(_b(4, 1, "2"), _b(4, 1, "1", 2)),
        poch_num=(_p("2", "4", power=2), _p("4", "8")),
        poch_den=(_p("4", "4", power=2), _p("8", "8")),
        q_exponent="-4*k")
    w_c1 = ("q^(2-2*n)*qi(n,2)*kron(-1,n)*qi(3)*opq(4*n)"
            "/(opq(4)*qi(3,n))")
    add(CongruenceCase(
        id="new-1", kind="q_congruence", anchor="Theorem new-1 (new-1-1)",
        lhs=SideSpec("(n^r-1)/d", t_c1),
        rhs=_image_side("(n^(r-1)-1)/d", t_c1, w_c1),
        modulus=(_qint("n^r", 2), _phi("n", 1, power="2", negate=True),
                 _phi("n^j", 2, power="2", j=("2", "r"))),
        modulus_n3=(_qint("n^r", 2), _phi("n", 2), _phi("n^2", 2, min_r=2),
                    _phi("n", 1, negate=True), _phi("n^2", 1, negate=True, min_r=2),
                    _phi("n^j", 2, power="2", j=("3", "r"))),
        constraints=replace(odd, d_values=(1, 2))))

    t_c1a = TermSpec(
        alternating=True,
        brackets=(_b(4, 1, "2"), _b(4, 1, "1", 2)),
        poch_num=(_p("2", "4", a=1), _p("2", "4", a=-1), _p("4", "8")),
        poch_den=(_p("4", "4", a=1), _p("4", "4", a=-1), _p("8", "8")),
        q_exponent="-4*k")
    w_c1l = ("q^(1-n)*qi(n,2)*kron(-1,n)"
             "*(1 - opq(2)*poch(2+t,1,1)*poch(2-t,1,1)/(opq(4)*poch(1,1,1)^2))")
    add(CongruenceCase(
        id="lem-new-1", kind="parametric_roots",
        anchor="Lemma lem:new-1 (eq:four-1)",
        lhs=SideSpec("(n-1)/2", t_c1a),
        rhs=_closed_side(w_c1l),
        modulus=(_phi("n", 2),),
        roots=RootSpec("2*n", "0", "0"),
        constraints=replace(odd, r_max=1)))
    add(CongruenceCase(
        id="new-1-2", kind="parametric_roots",
        anchor="Theorem new-1 (new-1-2)",
        lhs=SideSpec("(n^r-1)/d", t_c1a),
        rhs=_image_side(
            "(n^(r-1)-1)/d", t_c1a,
            "q^(1-n)*qi(n,2)*kron(-1,n)"
            "*(1 - opq(2)*poch(2+t,1,1)*poch(2-t,1,1)/(opq(4)*poch(1,1,1)^2))"
            "/(1 - opq(2*n)*poch(2*n+t,1,1)*poch(2*n-t,1,1)"
            "/(opq(4*n)*poch(n,1,1)^2))"),
        modulus=(_qint("n^r", 2),),
        roots=RootSpec("(4*j+2)*n", "0", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2))))
    add(CongruenceCase(
        id="new-1-3", kind="q_congruence", anchor="Theorem new-1 (new-1-3)",
        lhs=SideSpec("(n-1)/d", t_c1), rhs=_ZERO_SIDE,
        modulus=(_qint("n", 2),),
        constraints=replace(odd, d_values=(1, 2), r_max=1)))

    # -- [4k+1]_{q^2}[4k+1]^2 quartic family (new-2) ----------------------------
    t_c2 = TermSpec(
        brackets=(_b(4, 1, "2"), _b(4, 1, "1", 2)),
        poch_num=(_p("2", "4", power=4),),
        poch_den=(_p("4", "4", power=4),),
        q_exponent="-4*k")
    w_c2 = "q^(2-2*n)*qi(n,2)*opq(2*n)/opq(2)"
    add(CongruenceCase(
        id="new-2", kind="q_congruence", anchor="Theorem new-2 (new-2-1)",
        lhs=SideSpec("(n^r-1)/d", t_c2),
        rhs=_image_side("(n^(r-1)-1)/d", t_c2, w_c2),
        modulus=(_qint("n^r", 2), _phi("n", 1, power="2", negate=True),
                 _phi("n^j", 2, power="2", j=("2", "r"))),
        constraints=replace(odd, d_values=(1, 2))))

    t_c2a = TermSpec(
        brackets=(_b(4, 1, "2"), _b(4, 1, "1", 2)),
        poch_num=(_p("2", "4", a=1), _p("2", "4", a=-1), _p("2", "4", power=2)),
        poch_den=(_p("4", "4", a=1), _p("4", "4", a=-1), _p("4", "4", power=2)),
        q_exponent="-4*k")
    add(CongruenceCase(
        id="new-2-lem", kind="parametric_roots",
        anchor="Theorem new-2 (quoted lemma)",
        lhs=SideSpec("(n-1)/2", t_c2a),
        rhs=_closed_side(
            "q^(1-n)*qi(n,2)"
            "*(1 - poch(2+t,1,1)*poch(2-t,1,1)/(opq(2)*poch(1,1,1)^2))"),
        modulus=(_phi("n", 2),),
        roots=RootSpec("2*n", "0", "0"),
        constraints=replace(odd, r_max=1)))
    add(CongruenceCase(
        id="new-2-2", kind="parametric_roots",
        anchor="Theorem new-2 (new-2-2)",
        lhs=SideSpec("(n^r-1)/d", t_c2a),
        rhs=_image_side(
            "(n^(r-1)-1)/d", t_c2a,
            "q^(1-n)*qi(n,2)"
            "*(1 - poch(2+t,1,1)*poch(2-t,1,1)/(opq(2)*poch(1,1,1)^2))"
            "/(1 - poch(2*n+t,1,1)*poch(2*n-t,1,1)"
            "/(opq(2*n)*poch(n,1,1)^2))"),
        modulus=(_qint("n^r", 2),),
        roots=RootSpec("(4*j+2)*n", "0", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2))))

    # -- [4k-1]_{q^2}[4k-1]^2 family (lem-4k-2) ---------------------------------
    t_k1 = TermSpec(
        alternating=True,
        brackets=(_b(4, -1, "2"), _b(4, -1, "1", 2)),
        poch_num=(_p("-2", "4", power=2), _p("-4", "8")),
        poch_den=(_p("4", "4", power=2), _p("8", "8")),
        q_exponent="4*k")
    w_k1 = ("q^(2*n-2)*qi(n,2)*kron(-1,n)*qi(3)*opq(2*n)^2"
            "/(opq(2)^2*qi(3,n))")
    mod_k1 = (_qint("n^r", 2), _phi("n^j", 2, power="2", j=("2", "r")))
    mod_k1_n3 = (_qint("n^r", 2), _phi("n", 1), _phi("n^2", 2, min_r=2),
                 _phi("n^2", 1, negate=True, min_r=2),
                 _phi("n^j", 2, power="2", j=("3", "r")))
    for variant, lb, rb in (("m1", "(n^r+1)/2", "(n^(r-1)+1)/2"),
                            ("m2", "n^r-1", "n^(r-1)-1")):
        add(CongruenceCase(
            id=f"lem-4k-2-{variant}", kind="q_congruence",
            anchor=f"Theorem eq:lem-4k-2 ({variant})",
            lhs=SideSpec(lb, t_k1),
            rhs=_image_side(rb, t_k1, w_k1),
            modulus=mod_k1, modulus_n3=mod_k1_n3,
            constraints=odd))

    t_k1a = TermSpec(
        alternating=True,
        brackets=(_b(4, -1, "2"), _b(4, -1, "1", 2)),
        poch_num=(_p("-2", "4", a=1), _p("-2", "4", a=-1), _p("-4", "8")),
        poch_den=(_p("4", "4", a=1), _p("4", "4", a=-1), _p("8", "8")),
        q_exponent="4*k")
    w_k1l = ("-2*q^(-n-3)*qi(n,2)*kron(-1,n)*opq(4)/(opq(2+t)*opq(2-t))"
             "*(1 - opq(2)*poch(-2+t,1,1)*poch(-2-t,1,1)*q^4"
             "/(opq(4)*poch(1,1,1)^2))")
    add(CongruenceCase(
        id="lem-new-2", kind="parametric_roots",
        anchor="Lemma lem:new-2 (eq:lem-4k-1)",
        lhs=SideSpec("(n+1)/2", t_k1a),
        rhs=_closed_side(w_k1l),
        modulus=(_phi("n", 2),),
        roots=RootSpec("2*n", "0", "0"),
        constraints=replace(odd, r_max=1)))

    w_k1p = ("q^(3*n-3)*qi(n,2)*kron(-1,n)*opq(4)/(opq(2+t)*opq(2-t))"
             "*(1 - opq(2)*poch(-2+t,1,1)*poch(-2-t,1,1)*q^4"
             "/(opq(4)*poch(1,1,1)^2))"
             "*opq(2*n+t)*opq(2*n-t)/opq(4*n)"
             "/(1 - opq(2*n)*poch(-2*n+t,1,1)*poch(-2*n-t,1,1)*q^(4*n)"
             "/(opq(4*n)*poch(n,1,1)^2))")
    add(CongruenceCase(
        id="newnew-1-2-m1", kind="parametric_roots",
        anchor="Theorem eq:lem-4k-2 (parametric, m1)",
        lhs=SideSpec("(n^r+1)/2", t_k1a),
        rhs=_image_side("(n^(r-1)+1)/2", t_k1a, w_k1p),
        modulus=(_qint("n^r", 2),),
        roots=RootSpec("(4*j+2)*n", "0", "(n^(r-1)-1)/2"),
        constraints=odd))
    add(CongruenceCase(
        id="newnew-1-2-m2", kind="parametric_roots",
        anchor="Theorem eq:lem-4k-2 (parametric, m2)",
        lhs=SideSpec("n^r-1", t_k1a),
        rhs=_image_side("n^(r-1)-1", t_k1a, w_k1p),
        modulus=(_qint("n^r", 2),),
        roots=RootSpec("(4*j+2)*n", "0", "n^(r-1)-2"),
        constraints=odd))
    add(CongruenceCase(
        id="lem-4k-2-zero", kind="q_congruence",
        anchor="Theorem eq:lem-4k-2 (companion, == 0)",
        lhs=SideSpec("(n+1)/2", t_k1), rhs=_ZERO_SIDE,
        modulus=(_qint("n", 2),),
        constraints=replace(odd, r_max=1)))

    # -- the 2/(1+q^{2k}) family (q-rv) -----------------------------------------
    t_rv = TermSpec(
        const="2",
        poch_num=(_p("1", "2", power=2),),
        poch_den=(_p("2", "2", power=2), _s("2*k", "1", "1")),
        q_exponent="2*k")
    add(CongruenceCase(
        id="q-rv", kind="q_congruence", anchor="Theorem q-rv",
        lhs=SideSpec("(n^r-1)/d", t_rv),
        rhs=_image_side("(n^(r-1)-1)/d", t_rv, "kron(-1,n)"),
        modulus=(_phi("n^j", power="2", j=("1", "r")),),
        constraints=replace(odd, d_values=(1, 2))))

    t_rva = TermSpec(
        const="2",
        poch_num=(_p("1", "2", a=1), _p("1", "2", a=-1)),
        poch_den=(_p("2", "2", power=2), _s("2*k", "1", "1")),
        q_exponent="2*k")
    add(CongruenceCase(
        id="q-rv-lemma", kind="parametric_roots",
        anchor="Theorem q-rv (quoted lemma)",
        lhs=SideSpec("(n-1)/2", t_rva),
        rhs=_closed_side("kron(-1,n)"),
        modulus=(),
        roots=RootSpec("n", "0", "0"),
        constraints=replace(odd, r_max=1)))
    add(CongruenceCase(
        id="q-rv-par", kind="parametric_roots",
        anchor="Theorem q-rv (parametric)",
        lhs=SideSpec("(n^r-1)/d", t_rva),
        rhs=_image_side("(n^(r-1)-1)/d", t_rva, "kron(-1,n)"),
        modulus=(),
        roots=RootSpec("(2*j+1)*n", "0", "(n^(r-1)-1)/d"),
        constraints=replace(odd, d_values=(1, 2))))

    # -- conjectures -------------------------------------------------------------
    t_q1 = TermSpec(
        alternating=True,
        brackets=(_b(4, 1),),
        poch_num=(_p("1", "2", power=4), _p("2", "4")),
        poch_den=(_p("2", "2", power=4), _p("4", "4")),
        q_exponent="k")
    add(CongruenceCase(
        id="conj4.1", kind="conjecture", anchor="Conjecture 4.1 (q-a3 first)",
        lhs=SideSpec("(n^r-1)/d", t_q1),
        rhs=_image_side(
            "(n^(r-1)-1)/d", t_q1,
            "poch(2,4,(n^r-1)/4)^2*poch(4*n,4*n,(n^(r-1)-1)/4)^2*qi(n)"
            "/(poch(4,4,(n^r-1)/4)^2*poch(2*n,4*n,(n^(r-1)-1)/4)^2)"),
        modulus=std_mod,
        constraints=Constraints(n_min=5, n_odd=True, n_mod=(4, (1,)),
                                d_values=(1, 2))))

    t_q2 = TermSpec(
        alternating=True,
        brackets=(_b(4, 1),),
        poch_num=(_p("2", "4", power=3),),
        poch_den=(_p("4", "4", power=3),),
        q_exponent="k")
    add(CongruenceCase(
        id="conj4.2", kind="conjecture", anchor="Conjecture 4.2 (q-c3)",
        lhs=SideSpec("(n^r-1)/d", t_q2),
        rhs=_image_side(
            "(n^(r-1)-1)/d", t_q2,
            "qi(n,2)*pochm(3,4,(n^r-1)/2)*pochm(5*n,4*n,(n^(r-1)-1)/2)"
            "*sgn((1-n)/2)*q^((1-n)/2)"
            "/(pochm(5,4,(n^r-1)/2)*pochm(3*n,4*n,(n^(r-1)-1)/2))"),
        modulus=std_mod,
        constraints=replace(odd, d_values=(1, 2))))

    t_q3 = TermSpec(
        poch_num=(_p("2", "4", power=3), _s("4*k+1", "1", "1")),
        poch_den=(_p("4", "4", power=3), _s("1", "1", "1")),
        q_exponent="k")
    add(CongruenceCase(
        id="conj4.3", kind="conjecture", anchor="Conjecture 4.3 (q-a3 second)",
        lhs=SideSpec("(n^r-1)/d", t_q3),
        rhs=_image_side(
            "(n^(r-1)-1)/d", t_q3,
            "qi(n,2)*poch(3,4,(n^r-1)/2)*poch(5*n,4*n,(n^(r-1)-1)/2)"
            "*q^((1-n)/2)"
            "/(poch(5,4,(n^r-1)/2)*poch(3*n,4*n,(n^(r-1)-1)/2))"),
        modulus=(_phi("n^j", power="2", j=("1", "r")),),
        constraints=Constraints(n_min=5, n_odd=True, n_mod=(4, (1,)),
                                d_values=(1, 2))))

    t_q4 = TermSpec(
        alternating=True,
        brackets=(_b(3, 1),),
        poch_num=(_p("1", "2", power=3),),
        poch_den=(_p("1", "1", power=3),))
    w_q4 = "q^(((n^r-1)^2-n*(n^(r-1)-1)^2)/4)*qi(n)*kron(-1,n)"
    add(CongruenceCase(
        id="conj4.4", kind="conjecture", anchor="Conjecture 4.4",
        lhs=SideSpec("(n^r-1)/d", t_q4),
        rhs=_image_side("(n^(r-1)-1)/d", t_q4, w_q4),
        modulus=(_qint("n^r"), _phi("n^r"), _phi("n^j", j=("1", "r"))),
        constraints=replace(odd, d_values=(1, 2))))

    t_q5 = TermSpec(
        alternating=True,
        brackets=(_b(4, 1),),
        poch_num=(_p("1", "2", power=3),),
        poch_den=(_p("2", "2", power=3),),
        q_exponent="k^2")
    add(CongruenceCase(
        id="conj4.5", kind="conjecture", anchor="Conjecture 4.5",
        lhs=SideSpec("(n^r-1)/d", t_q5),
        rhs=_image_side("(n^(r-1)-1)/d", t_q5, w_q4),
        modulus=(_qint("n^r"), _phi("n^r"), _phi("n^j", j=("1", "r"))),
        constraints=replace(odd, d_values=(1, 2))))

    t_q6 = TermSpec(
        poch_num=(_p("1", "2", power=2),),
        poch_den=(_p("2", "2", power=2),))
    add(CongruenceCase(
        id="conj4.6", kind="conjecture", anchor="Conjecture 4.6",
        lhs=SideSpec("(n^r-1)/d", t_q6),
        rhs=_image_side("(n^(r-1)-1)/d", t_q6,
                        "q^((1-n)*(1+n^(2*r-1))/4)*kron(-1,n)"),
        modulus=(_phi("n^r"), _phi("n^j", j=("1", "r"))),
        constraints=replace(odd, d_values=(1, 2))))

    t_q7a = TermSpec(
        poch_num=(_p("1", "1", "2*k"),),
        poch_den=(_p("1", "1", power=2), _s("1", "1")),
        q_exponent="k")
    add(CongruenceCase(
        id="conj4.7a", kind="conjecture", anchor="Conjecture 4.7 (first)",
        lhs=SideSpec("(n^r-1)/d", t_q7a),
        rhs=_image_side("(n^(r-1)-1)/d", t_q7a,
                        "q^((n-1)*(1+n^(2*r-1))/4)*kron(-1,n)"),
        modulus=(_phi("n^r", power="2-d"), _phi("n^j", j=("1", "r"))),
        constraints=replace(odd, d_values=(1, 2))))

    t_q7b = TermSpec(
        poch_num=(_p("1", "1", "2*k"),),
        poch_den=(_p("1", "1", power=2),),
        q_exponent="k")
    add(CongruenceCase(
        id="conj4.7b", kind="conjecture", anchor="Conjecture 4.7 (second)",
        lhs=SideSpec("(n^r-1)/d", t_q7b),
        rhs=_image_side("(n^(r-1)-1)/d", t_q7b,
                        "q^((n-1)*(1+n^(2*r-1))/3)*kron(-3,n)"),
        modulus=(_phi("n^r", power="2-d"), _phi("n^j", j=("1", "r"))),
        constraints=Constraints(n_min=3, n_odd=True, n_coprime=(3,),
                                d_values=(1, 2), even_ok_d1=True),
        notes="for d = 1 the congruence is also asserted for even n"))

    add(CongruenceCase(
        id="tauraso-a", kind="q_congruence",
        anchor="Conjecture 4.7 (known r=1 base, first)",
        lhs=SideSpec("n-1", t_q7a),
        rhs=_closed_side("q^((n^2-1)/4)*kron(-1,n)"),
        modulus=(_phi("n", power="2"),),
        constraints=replace(odd, r_max=1)))
    add(CongruenceCase(
        id="tauraso-b", kind="q_congruence",
        anchor="Conjecture 4.7 (known r=1 base, second)",
        lhs=SideSpec("n-1", t_q7b),
        rhs=_closed_side("q^((n^2-1)/3)*kron(-3,n)"),
        modulus=(_phi("n", power="2"),),
        constraints=Constraints(n_min=3, n_odd=True, n_coprime=(3,), r_max=1)))

    for m, nmod in ((3, (3, (1, 2))), (4, (4, (1, 3)))):
        t_g = TermSpec(
            const="2",
            poch_num=(_p("1", str(m)), _p(str(m - 1), str(m))),
            poch_den=(_p(str(m), str(m), power=2), _s(f"{m}*k", "1", "1")),
            q_exponent=f"{m}*k")
        add(CongruenceCase(
            id=f"conj-qrv-{m}-1", kind="conjecture",
            anchor=f"Conjecture q-rv-conj (m={m}, s=1)",
            lhs=SideSpec("n^r-1", t_g),
            rhs=_image_side("n^(r-1)-1", t_g, f"sgn(lnr(-1,{m},n))"),
            modulus=(_phi("n^j", power="2", j=("1", "r")),),
            constraints=Constraints(n_min=3, n_odd=True, n_mod=nmod),
            notes="r = 1 is the known base congruence"))

    # -- classical p-adic cases ---------------------------------------------------
    addc = cases.append
    half = "rising(1,2,k)"

    # The r-level bounds pair half with half and full with full, exactly as
    # in the q-statements they descend from; the mixed pairings fail already
    # at (p, r) = (5, 2) by exact computation.
    addc(ClassicalCase(
        id="classical-1.4", anchor="Classical (1.4)",
        summand="(8*k+1)*binom(4*k,2*k)*binom(2*k,k)^2/(2^(8*k)*3^(2*k))",
        lhs_bound="(p^r-1)/2", rhs_bound="(p^(r-1)-1)/2",
        prefactor="p*kron(-3,p)", proven_target="3*r", p_min=5))
    addc(ClassicalCase(
        id="classical-1.5", anchor="Classical (1.5)",
        summand="(8*k+1)*binom(4*k,2*k)*binom(2*k,k)^2/(2^(8*k)*3^(2*k))",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="p*kron(-3,p)", proven_target="3*r", p_min=5))
    addc(ClassicalCase(
        id="classical-1.6", anchor="Classical (1.6)",
        summand=f"(3*k+1)*{half}^3*2^(2*k)/fact(k)^3",
        lhs_bound="(p^r-1)/2", rhs_bound="(p^(r-1)-1)/2",
        prefactor="p", proven_target="3*r", p_min=3))
    addc(ClassicalCase(
        id="classical-1.7", anchor="Classical (1.7)",
        summand=f"(3*k+1)*{half}^3*2^(2*k)/fact(k)^3",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="p", proven_target="3*r",
        conjectured_target="4*r-eq(p,3)", p_min=3))
    addc(ClassicalCase(
        id="classical-div-1", anchor="Classical (eq:div-1)",
        summand=f"(3*k+1)*{half}^3*2^(2*k)/fact(k)^3",
        lhs_bound="(p-1)/2", rhs_bound="0",
        prefactor="p", proven_target="3*r", r_max=1, p_min=3))
    addc(ClassicalCase(
        id="classical-div-3", anchor="Classical (eq:div-3)",
        summand=f"(3*k+1)*{half}^3*(-1)^k*2^(3*k)/fact(k)^3",
        lhs_bound="(p-1)/2", rhs_bound="0",
        prefactor="p*kron(-1,p)", proven_target="3*r", r_max=1, p_min=3))
    addc(ClassicalCase(
        id="classical-last-1", anchor="Classical (eq:last-1)",
        summand=f"(3*k+1)*{half}^3*(-1)^k*2^(3*k)/fact(k)^3",
        lhs_bound="(p^r-1)/2", rhs_bound="(p^(r-1)-1)/2",
        prefactor="p*kron(-1,p)", proven_target="3*r",
        conjectured_target="3*r+eq(p,3)", p_min=3))
    addc(ClassicalCase(
        id="classical-last-2", anchor="Classical (eq:last-2)",
        summand=f"(3*k+1)*{half}^3*(-1)^k*2^(3*k)/fact(k)^3",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="p*kron(-1,p)", proven_target="3*r", p_min=3))
    addc(ClassicalCase(
        id="classical-b3-new-1", anchor="Classical (eq:b3-new-1)",
        summand=f"(-1)^k*(4*k+1)*{half}^3/fact(k)^3",
        lhs_bound="(p^r-1)/2", rhs_bound="(p^(r-1)-1)/2",
        prefactor="p*kron(-1,p)", proven_target="3*r", p_min=3))
    addc(ClassicalCase(
        id="classical-b3-new-2", anchor="Classical (eq:b3-new-2)",
        summand=f"(-1)^k*(4*k+1)*{half}^3/fact(k)^3",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="p*kron(-1,p)", proven_target="3*r", p_min=3))
    addc(ClassicalCase(
        id="classical-L3-1", anchor="Classical (L3-1)",
        summand=f"(-1)^k*(6*k+1)*{half}^3/(fact(k)^3*8^k)",
        lhs_bound="(p^r-1)/2", rhs_bound="(p^(r-1)-1)/2",
        prefactor="p*kron(-2,p)", proven_target="3*r", p_min=3))
    addc(ClassicalCase(
        id="classical-L3-2", anchor="Classical (L3-2)",
        summand=f"(-1)^k*(6*k+1)*{half}^3/(fact(k)^3*8^k)",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="p*kron(-2,p)", proven_target="3*r", p_min=3))
    addc(ClassicalCase(
        id="classical-e3", anchor="Classical (e3)",
        summand="(6*k+1)*rising(1,3,k)^3*(-1)^k/fact(k)^3",
        lhs_bound="(p^r-1)/3", rhs_bound="(p^(r-1)-1)/3",
        prefactor="p", proven_target="3*r", p_min=7, p_mod=(3, (1,))))
    addc(ClassicalCase(
        id="classical-e3-extra", anchor="Classical (q -> -1 of q-e3)",
        summand=f"(6*k+1)*rising(1,3,k)^3*{half}/(fact(k)^3*rising(5,6,k))",
        lhs_bound="(p^r-1)/d", rhs_bound="(p^(r-1)-1)/d",
        prefactor="p", proven_target="3*r", d_values=(1, 3),
        p_min=7, p_mod=(3, (1,))))
    addc(ClassicalCase(
        id="classical-f3", anchor="Classical (f3)",
        summand="(8*k+1)*rising(1,4,k)^3*(-1)^k/fact(k)^3",
        lhs_bound="(p^r-1)/4", rhs_bound="(p^(r-1)-1)/4",
        prefactor="p*kron(-2,p)", proven_target="3*r",
        p_min=5, p_mod=(4, (1,))))
    addc(ClassicalCase(
        id="classical-e-even", anchor="Classical (e-even)",
        summand="(6*k+1)*rising(1,3,k)^3*(-1)^k/fact(k)^3",
        lhs_bound="(p^r-1)/3", rhs_bound="(p^(r-2)-1)/3",
        prefactor="p^2", proven_target="2*r", conjectured_target="3*r-2",
        p_min=5, r_min=2, r_parity="even"))
    addc(ClassicalCase(
        id="classical-f-even", anchor="Classical (f-even)",
        summand="(8*k+1)*rising(1,4,k)^3*(-1)^k/fact(k)^3",
        lhs_bound="(p^r-1)/4", rhs_bound="(p^(r-2)-1)/4",
        prefactor="p^2", proven_target="2*r", conjectured_target="3*r-2",
        p_min=3, r_min=2, r_parity="even"))
    addc(ClassicalCase(
        id="classical-guo-3", anchor="Classical (eq:guo-3)",
        summand=f"(-1)^k*(4*k+1)^3*{half}^3/fact(k)^3",
        lhs_bound="(p^r-1)/d", rhs_bound="(p^(r-1)-1)/d",
        prefactor="p*kron(-1,p)", proven_target="3*r-2",
        d_values=(1, 2), p_min=3))
    addc(ClassicalCase(
        id="classical-guo-4", anchor="Classical (eq:guo-4)",
        summand=f"(4*k+1)^3*{half}^4/fact(k)^4",
        lhs_bound="(p^r-1)/d", rhs_bound="(p^(r-1)-1)/d",
        prefactor="p", proven_target="3*r-2", conjectured_target="4*r-3",
        d_values=(1, 2), p_min=3))
    addc(ClassicalCase(
        id="classical-4k-1-1", anchor="Classical (4k-1-1)",
        summand="(4*k-1)^3*rising(-1,2,k)^3/fact(k)^3",
        lhs_bound="(p^r+1)/2", rhs_bound="(p^(r-1)+1)/2",
        prefactor="p*kron(-1,p)", proven_target="3*r-2", p_min=3))
    addc(ClassicalCase(
        id="classical-4k-1-2", anchor="Classical (4k-1-2)",
        summand="(4*k-1)^3*rising(-1,2,k)^3/fact(k)^3",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="p*kron(-1,p)", proven_target="3*r-2", p_min=3))
    addc(ClassicalCase(
        id="classical-4k-1-lin-1", anchor="Classical (q -> -1 of eq:lem-4k-2, m1)",
        summand="(4*k-1)*rising(-1,2,k)^3/fact(k)^3",
        lhs_bound="(p^r+1)/2", rhs_bound="(p^(r-1)+1)/2",
        prefactor="p*kron(-1,p)", proven_target="3*r-2", p_min=3))
    addc(ClassicalCase(
        id="classical-4k-1-lin-2", anchor="Classical (q -> -1 of eq:lem-4k-2, m2)",
        summand="(4*k-1)*rising(-1,2,k)^3/fact(k)^3",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="p*kron(-1,p)", proven_target="3*r-2", p_min=3))

    addc(ClassicalCase(
        id="classical-RV1", anchor="Classical (eq:RV1)",
        summand="binom(2*k,k)^2/16^k",
        lhs_bound="p-1", rhs_bound="0",
        prefactor="kron(-1,p)", proven_target="2*r", r_max=1, p_min=3))
    addc(ClassicalCase(
        id="classical-RV2", anchor="Classical (eq:RV2)",
        summand="binom(3*k,2*k)*binom(2*k,k)/27^k",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="kron(-3,p)", proven_target="2*r", proven_r_max=1,
        conjectured_target="2*r", p_min=5))
    addc(ClassicalCase(
        id="classical-RV3", anchor="Classical (eq:RV3)",
        summand="binom(4*k,2*k)*binom(2*k,k)/64^k",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="kron(-2,p)", proven_target="2*r", proven_r_max=1,
        conjectured_target="2*r", p_min=3))
    addc(ClassicalCase(
        id="classical-RV4", anchor="Classical (eq:RV4)",
        summand="binom(6*k,3*k)*binom(3*k,k)/432^k",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="kron(-1,p)", proven_target="2*r", proven_r_max=1,
        conjectured_target="2*r", p_min=5))
    addc(ClassicalCase(
        id="classical-rv1", anchor="Classical (eq:rv-1)",
        summand="binom(2*k,k)^2/16^k",
        lhs_bound="(p^r-1)/d", rhs_bound="(p^(r-1)-1)/d",
        prefactor="kron(-1,p)", proven_target="2*r",
        d_values=(1, 2), p_min=3))
    addc(ClassicalCase(
        id="classical-sun-a", anchor="Classical (Sun, first)",
        summand="binom(2*k,k)/2^k",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="kron(-1,p)", conjectured_target="2*r", p_min=3))
    addc(ClassicalCase(
        id="classical-sun-b", anchor="Classical (Sun, second)",
        summand="binom(2*k,k)",
        lhs_bound="p^r-1", rhs_bound="p^(r-1)-1",
        prefactor="kron(-3,p)", conjectured_target="2*r", p_min=5,
        notes="fails at p = 3 (sum over k < 9 is 9*2053, not divisible by 27)"))

    return tuple(cases)


_ALIASES = {
    "lem-4k-1": "lem-new-2",
    "classical-rv2": "classical-RV2",
    "classical-rv3": "classical-RV3",
    "classical-rv4": "classical-RV4",
}


@lru_cache(maxsize=1)
def _case_index():
    return {c.id: c for c in builtin_cases()}


def lookup(case_id):
    """Find a built-in case by id (a few aliases are accepted)."""
    index = _case_index()
    if case_id in index:
        return index[case_id]
    alias = _ALIASES.get(case_id)
    if alias:
        return index[alias]
    if case_id.startswith("thm-") and case_id[4:] in index:
        return index[case_id[4:]]
    near = sorted(i for i in index if i.startswith(case_id))
    hint = f" (did you mean one of {near}?)" if near else ""
    raise KeyError(f"unknown case id {case_id!r}{hint}")


def select_cases(pattern):
    """All built-in cases whose id matches exactly, via alias, or by prefix."""
    index = _case_index()
    try:
        return [lookup(pattern)]
    except KeyError:
        pass
    got = [c for i, c in index.items() if i.startswith(pattern)]
    if not got:
        raise KeyError(f"no case id matches {pattern!r}")
    return got


def case_table():
    """(id, kind, anchor, statement) rows for every built-in case."""
    return [(c.id, c.kind, c.anchor, c.statement) for c in builtin_cases()]
