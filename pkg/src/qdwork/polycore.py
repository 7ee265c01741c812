"""Exact arithmetic for Laurent polynomials and rational functions over Z.

Everything downstream (cyclotomic moduli, q-Pochhammer products, congruence
checking) reduces to exact arithmetic in Z[q, q^-1] and its fraction field.
A Laurent polynomial is stored densely as a coefficient tuple plus an offset:

    LaurentPoly((c0, c1, ..., ck), e)  ==  q^e * (c0 + c1*q + ... + ck*q^k)

The representation is canonical: the coefficient tuple never has a zero in
the first or last slot, and the zero polynomial is the empty tuple with
offset 0.  Instances are immutable and hashable.

Division is exact-or-refuse: ``exact_div`` raises ``DivisibilityFailure``
when the quotient does not exist in Z[q, q^-1]; callers treat that as a
negative answer, never as a crash.  Polynomial gcds run a small-prime
modular algorithm with a deterministic subresultant fallback.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

__all__ = [
    "DivisibilityFailure",
    "LaurentPoly",
    "RationalFn",
    "KARATSUBA_THRESHOLD",
    "ZERO",
    "ONE",
    "q_power",
    "monomial",
    "gcd_q",
    "exact_div",
    "rf_normalize",
    "rf_add",
    "rf_sub",
    "rf_mul",
    "rf_div",
    "rf_neg",
]

# Below this many coefficients, schoolbook multiplication wins in practice.
KARATSUBA_THRESHOLD = 64


class DivisibilityFailure(ArithmeticError):
    """Raised when an exact polynomial division has no exact quotient."""


# ---------------------------------------------------------------------------
# coefficient-array kernels (plain lists of ints, low degree first)
# ---------------------------------------------------------------------------

def _mul_schoolbook(a, b):
    out = [0] * (len(a) + len(b) - 1)
    if len(a) > len(b):
        a, b = b, a
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _mul_karatsuba(a, b):
    n = max(len(a), len(b))
    h = n >> 1
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    z0 = _mul_arrays(a0, b0) if a0 and b0 else []
    z2 = _mul_arrays(a1, b1) if a1 and b1 else []
    s0 = _add_arrays(a0, a1)
    s1 = _add_arrays(b0, b1)
    z1 = _mul_arrays(s0, s1) if s0 and s1 else []
    z1 = _sub_arrays(_sub_arrays(z1, z0), z2)
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] += c
    for i, c in enumerate(z1):
        if c:
            out[i + h] += c
    for i, c in enumerate(z2):
        if c:
            out[i + 2 * h] += c
    return out


def _mul_arrays(a, b):
    if not a or not b:
        return []
    if min(len(a), len(b)) < KARATSUBA_THRESHOLD:
        return _mul_schoolbook(a, b)
    return _mul_karatsuba(a, b)


def _add_arrays(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    while out and out[-1] == 0:
        out.pop()
    return out


def _sub_arrays(a, b):
    out = list(a) + [0] * (len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    while out and out[-1] == 0:
        out.pop()
    return out


def _content(coeffs):
    g = 0
    for c in coeffs:
        g = _int_gcd(g, c)
        if g == 1:
            return 1
    return g


def _exact_div_arrays(p, d):
    """Exact quotient of coefficient arrays, or DivisibilityFailure."""
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    if not p:
        return []
    if len(p) < len(d):
        raise DivisibilityFailure("degree of divisor exceeds dividend")
    rem = list(p)
    lead = d[-1]
    nd = len(d)
    out = [0] * (len(p) - nd + 1)
    for i in range(len(p) - nd, -1, -1):
        c = rem[i + nd - 1]
        if c == 0:
            continue
        if c % lead:
            raise DivisibilityFailure("leading coefficient does not divide")
        t = c // lead
        out[i] = t
        for j, dc in enumerate(d):
            if dc:
                rem[i + j] -= t * dc
    if any(rem):
        raise DivisibilityFailure("nonzero remainder")
    return out


def _rem_arrays_monic(p, d):
    """Remainder of p modulo a *monic* integer polynomial d (stays in Z)."""
    nd = len(d)
    rem = list(p)
    for i in range(len(p) - nd, -1, -1):
        t = rem[i + nd - 1]
        if t:
            for j in range(nd):
                rem[i + j] -= t * d[j]
    del rem[nd - 1:]
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


# ---------------------------------------------------------------------------
# LaurentPoly
# ---------------------------------------------------------------------------

class LaurentPoly:
    """Immutable Laurent polynomial with integer coefficients."""

    __slots__ = ("coeffs", "offset")

    def __init__(self, coeffs=(), offset=0):
        coeffs = list(coeffs)
        lo = 0
        hi = len(coeffs)
        while hi > lo and coeffs[hi - 1] == 0:
            hi -= 1
        while lo < hi and coeffs[lo] == 0:
            lo += 1
        if lo == hi:
            object.__setattr__(self, "coeffs", ())
            object.__setattr__(self, "offset", 0)
        else:
            object.__setattr__(self, "coeffs", tuple(coeffs[lo:hi]))
            object.__setattr__(self, "offset", offset + lo)

    def __setattr__(self, *a):
        raise AttributeError("LaurentPoly is immutable")

    # -- basic structure ----------------------------------------------------

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def low(self):
        """Lowest exponent with nonzero coefficient (None for zero)."""
        return self.offset if self.coeffs else None

    @property
    def degree(self):
        """Highest exponent with nonzero coefficient (None for zero)."""
        return self.offset + len(self.coeffs) - 1 if self.coeffs else None

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def trail(self):
        return self.coeffs[0] if self.coeffs else 0

    def coeff(self, e):
        i = e - self.offset
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def content(self):
        return _content(self.coeffs)

    def primitive(self):
        """Primitive part with positive leading coefficient (zero stays zero)."""
        if not self.coeffs:
            return self
        c = _content(self.coeffs)
        if self.coeffs[-1] < 0:
            c = -c
        if c == 1:
            return self
        return LaurentPoly([x // c for x in self.coeffs], self.offset)

    def shift(self, e):
        """Multiply by q^e."""
        if not self.coeffs or e == 0:
            return self if self.coeffs else ZERO
        return LaurentPoly(self.coeffs, self.offset + e)

    # -- ring operations ----------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, LaurentPoly)
                and self.coeffs == other.coeffs and self.offset == other.offset)

    def __hash__(self):
        return hash((self.coeffs, self.offset))

    def __neg__(self):
        return LaurentPoly([-c for c in self.coeffs], self.offset)

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        off = min(self.offset, other.offset)
        hi = max(self.offset + len(self.coeffs), other.offset + len(other.coeffs))
        out = [0] * (hi - off)
        for i, c in enumerate(self.coeffs):
            out[i + self.offset - off] += c
        for i, c in enumerate(other.coeffs):
            out[i + other.offset - off] += c
        return LaurentPoly(out, off)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return ZERO
            return LaurentPoly([c * other for c in self.coeffs], self.offset)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return ZERO
        return LaurentPoly(_mul_arrays(list(self.coeffs), list(other.coeffs)),
                           self.offset + other.offset)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial; use RationalFn")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- substitutions and evaluation ----------------------------------------

    def subst_power(self, s):
        """Substitute q -> q^s for a nonzero integer s."""
        if s == 0:
            raise ValueError("substitution exponent must be nonzero")
        if self.is_zero:
            return self
        if s == 1:
            return self
        n = len(self.coeffs)
        if s > 0:
            out = [0] * ((n - 1) * s + 1)
            for i, c in enumerate(self.coeffs):
                out[i * s] = c
            return LaurentPoly(out, self.offset * s)
        t = -s
        out = [0] * ((n - 1) * t + 1)
        for i, c in enumerate(self.coeffs):
            out[(n - 1 - i) * t] = c
        return LaurentPoly(out, (self.offset + n - 1) * s)

    def subst_negate(self):
        """Substitute q -> -q."""
        out = [c if (self.offset + i) % 2 == 0 else -c
               for i, c in enumerate(self.coeffs)]
        return LaurentPoly(out, self.offset)

    def evaluate(self, x):
        """Evaluate at a nonzero Fraction/int point."""
        x = Fraction(x)
        if x == 0:
            raise ZeroDivisionError("Laurent polynomials cannot be evaluated at 0")
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * x ** self.offset

    def at_q1(self):
        """Value at q = 1 (sum of coefficients)."""
        return sum(self.coeffs)

    # -- display -------------------------------------------------------------

    def __repr__(self):
        return f"LaurentPoly({self.coeffs!r}, {self.offset!r})"

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            e = self.offset + i
            if e == 0:
                term = str(abs(c))
            else:
                qs = "q" if e == 1 else f"q^{e}"
                term = qs if abs(c) == 1 else f"{abs(c)}*{qs}"
            parts.append(("- " if c < 0 else "+ ") + term)
        body = " ".join(parts)
        return body[2:] if body.startswith("+ ") else "-" + body[2:]


ZERO = LaurentPoly()
ONE = LaurentPoly((1,))


def q_power(e):
    """The monomial q^e."""
    return LaurentPoly((1,), e)


def monomial(c, e=0):
    return LaurentPoly((c,), e)


def exact_div(p, d):
    """Exact quotient p / d in Z[q, q^-1], or raise DivisibilityFailure."""
    if d.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    if p.is_zero:
        return ZERO
    q = _exact_div_arrays(list(p.coeffs), list(d.coeffs))
    return LaurentPoly(q, p.offset - d.offset)


# ---------------------------------------------------------------------------
# gcd: small-prime modular algorithm with subresultant fallback
# ---------------------------------------------------------------------------

# Deterministic prime pool for modular images (below 2^31 so products of two
# coefficients stay cheap).
_GCD_PRIMES = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549,
    2147483543, 2147483497, 2147483489, 2147483477, 2147483423, 2147483399,
    2147483353, 2147483323, 2147483269, 2147483249, 2147483237, 2147483179,
    2147483171, 2147483137, 2147483123, 2147483077, 2147483069, 2147483059,
    2147483053, 2147483033, 2147483029, 2147482951, 2147482949, 2147482943,
    2147482937, 2147482921,
)


def _gf_gcd(a, b, p):
    """Monic gcd of coefficient arrays over GF(p)."""
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    b = [c % p for c in b]
    while b and b[-1] == 0:
        b.pop()
    while b:
        inv = pow(b[-1], p - 2, p)
        nb = len(b)
        rem = a
        for i in range(len(rem) - nb, -1, -1):
            t = rem[i + nb - 1] * inv % p
            if t:
                for j in range(nb):
                    rem[i + j] = (rem[i + j] - t * b[j]) % p
        while rem and rem[-1] == 0:
            rem.pop()
        a, b = b, rem
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]


def _crt_pair(c1, m1, c2, m2):
    """Combine residue arrays via CRT; arrays must have equal length."""
    inv = pow(m1 % m2, -1, m2)
    m = m1 * m2
    out = []
    for x1, x2 in zip(c1, c2):
        t = (x2 - x1) % m2 * inv % m2
        out.append((x1 + m1 * t) % m)
    return out


def _sym_lift(coeffs, m):
    half = m >> 1
    return [c - m if c > half else c for c in coeffs]


def _divides(d, p):
    try:
        _exact_div_arrays(p, d)
        return True
    except DivisibilityFailure:
        return False


def _pseudo_rem(a, b):
    """Pseudo-remainder prem(a, b) = lc(b)^(deg a - deg b + 1) * a mod b."""
    rem = list(a)
    nb = len(b)
    lb = b[-1]
    for i in range(len(a) - nb, -1, -1):
        t = rem[i + nb - 1]
        rem = [c * lb for c in rem]
        if t:
            for j in range(nb):
                rem[i + j] -= t * b[j]
        del rem[i + nb - 1:]
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def _subresultant_gcd(a, b):
    """Deterministic subresultant PRS gcd of primitive coefficient arrays."""
    if len(a) < len(b):
        a, b = b, a
    g, h = 1, 1
    while True:
        d = len(a) - len(b)
        rem = _pseudo_rem(a, b)
        if not rem:
            break
        if len(rem) == 1:
            b = [1]
            break
        a, b = b, [c // (g * h ** d) for c in rem]
        g = a[-1]
        if d >= 1:
            h = g ** d // h ** (d - 1)
    c = _content(b)
    if b[-1] < 0:
        c = -c
    return [x // c for x in b]


def gcd_q(f, g):
    """Primitive gcd (positive leading coefficient, offset 0) of two
    Laurent polynomials.

    Powers of q are units of the Laurent ring, so the offsets are ignored
    and the result always has offset 0.  The zero polynomial acts as the
    gcd identity; ``gcd_q(0, 0)`` is zero.
    """
    if f.is_zero:
        return g.primitive().shift(-g.offset) if not g.is_zero else ZERO
    if g.is_zero:
        return f.primitive().shift(-f.offset)
    a = list(f.primitive().coeffs)
    b = list(g.primitive().coeffs)
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 1:
        return ONE
    gamma = _int_gcd(a[-1], b[-1])
    cand = None
    cand_mod = 0
    for p in _GCD_PRIMES:
        if gamma % p == 0:
            continue
        hp = _gf_gcd(list(a), list(b), p)
        if len(hp) == 1:
            return ONE
        glp = gamma % p
        hp = [c * glp % p for c in hp]
        if cand is None or len(hp) < len(cand):
            cand, cand_mod = hp, p
        elif len(hp) == len(cand):
            cand = _crt_pair(cand, cand_mod, hp, p)
            cand_mod *= p
        else:
            continue  # unlucky prime, image degree too high
        lifted = _sym_lift(cand, cand_mod)
        c = _content(lifted)
        if lifted[-1] < 0:
            c = -c
        trial = [x // c for x in lifted]
        if _divides(trial, a) and _divides(trial, b):
            return LaurentPoly(trial, 0)
    return LaurentPoly(_subresultant_gcd(a, b), 0)


# ---------------------------------------------------------------------------
# RationalFn
# ---------------------------------------------------------------------------

class RationalFn:
    """Quotient of Laurent polynomials in normalized form.

    Normalized means: the denominator is a genuine polynomial (offset 0,
    nonzero constant term) with positive leading coefficient, numerator and
    denominator share no polynomial factor, and their integer contents are
    coprime.  Powers of q are absorbed into the numerator offset.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE, _normalized=False):
        if not _normalized:
            num, den = _normalize_pair(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalFn is immutable")

    @property
    def is_zero(self):
        return self.num.is_zero

    def __eq__(self, other):
        if isinstance(other, int):
            other = RationalFn(monomial(other))
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rf(other)
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_rf(other)
        return RationalFn(self.num * other.den - other.num * self.den,
                          self.den * other.den)

    def __neg__(self):
        return RationalFn(-self.num, self.den, _normalized=True)

    def __mul__(self, other):
        other = _as_rf(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other.num.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __pow__(self, n):
        if n < 0:
            return (RationalFn(self.den, self.num)) ** (-n)
        return RationalFn(self.num ** n, self.den ** n, _normalized=(n == 1))

    def evaluate(self, x):
        return self.num.evaluate(x) / self.den.evaluate(x)

    def as_poly(self):
        """The numerator as a LaurentPoly when the denominator is 1."""
        if self.den != ONE:
            raise DivisibilityFailure("rational function is not a Laurent polynomial")
        return self.num

    def __repr__(self):
        return f"RationalFn({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den == ONE:
            return str(self.num)
        return f"({self.num}) / ({self.den})"


def _as_rf(x):
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFn(x, ONE, _normalized=True)
    if isinstance(x, int):
        return RationalFn(monomial(x), ONE, _normalized=True)
    if isinstance(x, Fraction):
        return RationalFn(monomial(x.numerator), monomial(x.denominator))
    raise TypeError(f"cannot coerce {type(x).__name__} to RationalFn")


def _normalize_pair(num, den):
    if den.is_zero:
        raise ZeroDivisionError("zero denominator")
    if num.is_zero:
        return ZERO, ONE
    num = num.shift(-den.offset)
    den = den.shift(-den.offset)
    g = gcd_q(num, den)
    if g != ONE:
        num = exact_div(num, g)
        den = exact_div(den, g)
        num = num.shift(-den.offset)
        den = den.shift(-den.offset)
    c = _int_gcd(num.content(), den.content())
    if den.lead < 0:
        c = -c
    if c != 1:
        num = LaurentPoly([x // c for x in num.coeffs], num.offset)
        den = LaurentPoly([x // c for x in den.coeffs], den.offset)
    return num, den


def rf_normalize(num, den=ONE):
    """Construct a normalized RationalFn from a numerator/denominator pair."""
    return RationalFn(num, den)


def rf_add(a, b):
    return _as_rf(a) + _as_rf(b)


def rf_sub(a, b):
    return _as_rf(a) - _as_rf(b)


def rf_mul(a, b):
    return _as_rf(a) * _as_rf(b)


def rf_div(a, b):
    return _as_rf(a) / _as_rf(b)


def rf_neg(a):
    return -_as_rf(a)
