"""Expression mini-language for case data.

Bounds, exponents, prefactors and summands in the case catalog are stored as
strings in a small arithmetic language so that case files remain plain JSON.
One parser serves every slot; the evaluation backend differs:

* ``eval_int``       -- integer arithmetic (bounds, exponents, constraints).
* ``eval_fraction``  -- exact rationals (classical p-adic summands).
* ``eval_factored``  -- a product of q-factors kept in factored form
                        ``const * q^E * prod_j (1 - q^j)^{e_j}``, the shape
                        both congruence engines consume.
* ``eval_rational``  -- a fully expanded ``RationalFn`` (identity checking).
* ``eval_parametric`` -- the parameter exponent ``t`` stays formal: values
                        are unreduced fractions of polynomials in ``a``
                        (= q^t) over exact q-polynomials, preserving the
                        denominator exactly as the expression spells it.

Grammar (precedence low to high)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/" | "//") unary)*
    unary  := ("-" unary) | power
    power  := atom ("^" unary)?
    atom   := INT | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Variables are supplied per evaluation; the name ``q`` is reserved for the
formal variable in the q-side backends.

Functions: ``cdiv(a,b)`` ceiling division, ``binom2(x)`` = x(x-1)/2,
``kron(a,b)`` Kronecker symbol, ``sgn(e)`` = (-1)^e, ``eq(a,b)`` = 1 if a = b
else 0, ``lnr(a,b,n)`` least nonnegative residue <a/b>_n,
``qi(x[,s])`` q-integer [x]_{q^s},
``poch(c,m,l)`` = (q^c; q^m)_l, ``pochm(c,m,l)`` = (-q^c; q^m)_l,
``opq(e)`` = 1 + q^e, ``binom(a,b)`` binomial coefficient,
``rising(u,v,k)`` rising factorial (u/v)_k, ``fact(x)`` factorial.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .polycore import RationalFn, LaurentPoly, q_power
from .qkit import kronecker, least_nonneg_residue

__all__ = ["ExprError", "Expr", "FactoredTerm", "ParamPoly", "ParamFraction",
           "parse"]


class ExprError(ValueError):
    """Raised for syntax errors or invalid evaluations."""


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|//|[-+*/^(),]))")


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ExprError(f"bad character at {text[pos:]!r} in {text!r}")
            break
        pos = m.end()
        if m.group(1):
            out.append(("int", int(m.group(1))))
        elif m.group(2):
            out.append(("name", m.group(2)))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op))
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if kind and tok[0] != kind or value is not None and tok[1] != value:
            raise ExprError(f"expected {value or kind} at token {tok} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ExprError(f"trailing input at {self.peek()} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/", "//"):
            op = self.take()[1]
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        # unary minus binds looser than ^, so -n^2 parses as -(n^2)
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            # the exponent may itself carry a sign: q^-4
            return ("bin", "^", node, self.unary())
        return node

    def atom(self):
        kind, value = self.peek()
        if kind == "int":
            self.take()
            return ("num", value)
        if kind == "name":
            self.take()
            if self.peek() == ("op", "("):
                self.take()
                args = [self.expr()]
                while self.peek() == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.take("op", ")")
                return ("call", value, tuple(args))
            return ("var", value)
        if (kind, value) == ("op", "("):
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        raise ExprError(f"unexpected token {value!r} in {self.text!r}")


def _collect_vars(node, acc):
    tag = node[0]
    if tag == "var":
        acc.add(node[1])
    elif tag == "neg":
        _collect_vars(node[1], acc)
    elif tag == "bin":
        _collect_vars(node[2], acc)
        _collect_vars(node[3], acc)
    elif tag == "call":
        for a in node[2]:
            _collect_vars(a, acc)


class FactoredTerm:
    """A q-expression kept as ``const * q^qpow * prod_j (1 - q^j)^{e_j}``
    with positive j and integer exponents e_j (negative = denominator).

    The zero term is represented by const == 0 with empty structure.
    """

    __slots__ = ("const", "qpow", "factors")

    def __init__(self, const=Fraction(1), qpow=0, factors=None):
        const = Fraction(const)
        if const == 0:
            qpow, factors = 0, None
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "qpow", qpow)
        object.__setattr__(self, "factors",
                           dict(factors) if factors else {})

    def __setattr__(self, *a):
        raise AttributeError("FactoredTerm is immutable")

    @property
    def is_zero(self):
        return self.const == 0

    @staticmethod
    def one_minus_q(e):
        """The factor (1 - q^e), normalized so stored exponents are > 0."""
        if e == 0:
            return FactoredTerm(0)
        if e < 0:  # 1 - q^{-x} = -q^{-x} (1 - q^x)
            return FactoredTerm(-1, e, {-e: 1})
        return FactoredTerm(1, 0, {e: 1})

    @staticmethod
    def one_plus_q(e):
        """The factor (1 + q^e) = (1 - q^{2e}) / (1 - q^e) for e != 0."""
        if e == 0:
            return FactoredTerm(2)
        return FactoredTerm.one_minus_q(2 * e) / FactoredTerm.one_minus_q(e)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FactoredTerm(other)
        if self.is_zero or other.is_zero:
            return FactoredTerm(0)
        factors = dict(self.factors)
        for j, e in other.factors.items():
            factors[j] = factors.get(j, 0) + e
            if factors[j] == 0:
                del factors[j]
        return FactoredTerm(self.const * other.const,
                            self.qpow + other.qpow, factors)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FactoredTerm(other)
        if other.is_zero:
            raise ZeroDivisionError("division by zero FactoredTerm")
        inv = FactoredTerm(1 / other.const, -other.qpow,
                           {j: -e for j, e in other.factors.items()})
        return self * inv

    def __pow__(self, k):
        if self.is_zero:
            if k < 0:
                raise ZeroDivisionError("zero FactoredTerm to negative power")
            return FactoredTerm(0) if k else FactoredTerm(1)
        return FactoredTerm(self.const ** k, self.qpow * k,
                            {j: e * k for j, e in self.factors.items()})

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        return (isinstance(other, FactoredTerm)
                and self.const == other.const and self.qpow == other.qpow
                and self.factors == other.factors)

    def split(self):
        """(numerator exponent dict, denominator exponent dict), both >= 1."""
        num = {j: e for j, e in self.factors.items() if e > 0}
        den = {j: -e for j, e in self.factors.items() if e < 0}
        return num, den

    def subst_power(self, s):
        """Substitute q -> q^s for an integer s >= 1."""
        if s < 1:
            raise ValueError("substitution exponent must be >= 1")
        if s == 1 or self.is_zero:
            return self
        return FactoredTerm(self.const, self.qpow * s,
                            {j * s: e for j, e in self.factors.items()})

    def as_rational(self):
        """Expand into an exact RationalFn."""
        if self.is_zero:
            return RationalFn(LaurentPoly([]), LaurentPoly([1]))
        num_f, den_f = self.split()
        num = LaurentPoly([self.const.numerator], self.qpow)
        for j, e in sorted(num_f.items()):
            num = num * (LaurentPoly([1]) - q_power(j)) ** e
        den = LaurentPoly([self.const.denominator])
        for j, e in sorted(den_f.items()):
            den = den * (LaurentPoly([1]) - q_power(j)) ** e
        return RationalFn(num, den)

    def __repr__(self):
        return f"FactoredTerm({self.const}, q^{self.qpow}, {sorted(self.factors.items())})"


class ParamPoly:
    """A Laurent polynomial in the parameter a over exact q-polynomials.

    ``coeffs`` maps the a-exponent to a LaurentPoly coefficient in q.
    Substituting a = q^t is exact, so one evaluation serves every sample
    exponent, and the result at each sample is the specialization of one
    fixed bivariate polynomial.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        object.__setattr__(self, "coeffs",
                           {p: c for p, c in (coeffs or {}).items()
                            if not c.is_zero})

    @staticmethod
    def const(value):
        value = int(value)
        if not value:
            return ParamPoly()
        return ParamPoly({0: LaurentPoly((value,))})

    @staticmethod
    def monomial(qexp, aexp=0):
        """q^qexp * a^aexp"""
        return ParamPoly({aexp: q_power(qexp)})

    @staticmethod
    def one_minus(qexp, aexp=0):
        """1 - q^qexp a^aexp (the zero polynomial when both are 0)."""
        return ParamPoly.const(1) - ParamPoly.monomial(qexp, aexp)

    @staticmethod
    def one_plus(qexp, aexp=0):
        return ParamPoly.const(1) + ParamPoly.monomial(qexp, aexp)

    @property
    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, ParamPoly) and self.coeffs == other.coeffs

    def __neg__(self):
        return ParamPoly({p: -c for p, c in self.coeffs.items()})

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out[p] + c if p in out else c
        return ParamPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for p1, c1 in self.coeffs.items():
            for p2, c2 in other.coeffs.items():
                p = p1 + p2
                piece = c1 * c2
                out[p] = out[p] + piece if p in out else piece
        return ParamPoly(out)

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power of a ParamPoly")
        out = ParamPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def specialize(self, t):
        """The LaurentPoly obtained by substituting a = q^t."""
        out = LaurentPoly()
        for p, c in self.coeffs.items():
            out = out + c * q_power(p * t)
        return out

    def __repr__(self):
        return f"ParamPoly({self.coeffs!r})"


class ParamFraction:
    """An unreduced fraction of ParamPoly values.

    No cancellation is ever performed: the denominator stays exactly the
    product of the denominators the expression wrote down, which is what
    valuation bookkeeping at specialized parameters needs.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = ParamPoly.const(1)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator in parametric expression")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @staticmethod
    def from_value(value):
        if isinstance(value, ParamFraction):
            return value
        if isinstance(value, ParamPoly):
            return ParamFraction(value)
        value = Fraction(value)
        return ParamFraction(ParamPoly.const(value.numerator),
                             ParamPoly.const(value.denominator))

    def __neg__(self):
        return ParamFraction(-self.num, self.den)

    def __add__(self, other):
        return ParamFraction(self.num * other.den + other.num * self.den,
                             self.den * other.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return ParamFraction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        return ParamFraction(self.num * other.den, self.den * other.num)

    def __pow__(self, e):
        if e < 0:
            return ParamFraction(self.den, self.num) ** (-e)
        num = self.num ** e
        den = self.den ** e
        return ParamFraction(num, den)

    def __repr__(self):
        return f"ParamFraction({self.num!r}, {self.den!r})"


class _LinForm:
    """An integer-linear form base + slope * t (exponent context only)."""

    __slots__ = ("base", "slope")

    def __init__(self, base, slope):
        self.base = base
        self.slope = slope


def _as_int(value, what):
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    raise ExprError(f"{what} must be an integer, got {value!r}")


def _int_call(name, args):
    if name == "cdiv":
        a, b = args
        return -((-a) // b)
    if name == "binom2":
        (x,) = args
        return x * (x - 1) // 2
    if name == "kron":
        a, b = args
        return kronecker(a, b)
    if name == "sgn":
        (e,) = args
        return -1 if e % 2 else 1
    if name == "eq":
        a, b = args
        return 1 if a == b else 0
    if name == "lnr":
        a, b, n = args
        return least_nonneg_residue(Fraction(a, b), n)
    if name == "binom":
        a, b = args
        if a < 0:
            raise ExprError("binom requires a nonnegative first argument")
        return comb(a, b) if 0 <= b <= a else 0
    if name == "fact":
        (x,) = args
        if x < 0:
            raise ExprError("fact requires a nonnegative argument")
        return factorial(x)
    return None


class Expr:
    """A parsed expression; evaluate with one of the backends."""

    __slots__ = ("text", "ast", "variables")

    def __init__(self, text):
        object.__setattr__(self, "text", text)
        object.__setattr__(self, "ast", _Parser(text).parse())
        acc = set()
        _collect_vars(self.ast, acc)
        object.__setattr__(self, "variables", frozenset(acc))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def __repr__(self):
        return f"parse({self.text!r})"

    # -- integer backend ----------------------------------------------------

    def eval_int(self, env):
        return self._int(self.ast, env)

    def _int(self, node, env):
        tag = node[0]
        if tag == "num":
            return node[1]
        if tag == "var":
            try:
                return _as_int(env[node[1]], f"variable {node[1]}")
            except KeyError:
                raise ExprError(f"unbound variable {node[1]!r} in {self.text!r}") from None
        if tag == "neg":
            return -self._int(node[1], env)
        if tag == "bin":
            op, a, b = node[1], self._int(node[2], env), self._int(node[3], env)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "//":
                return a // b
            if op == "/":
                if b == 0 or a % b:
                    raise ExprError(f"non-integral division {a}/{b} in {self.text!r}")
                return a // b
            if op == "^":
                if b < 0:
                    raise ExprError(f"negative power {b} in integer context")
                return a ** b
        if tag == "call":
            args = [self._int(a, env) for a in node[2]]
            got = _int_call(node[1], args)
            if got is None:
                raise ExprError(f"function {node[1]!r} not valid in integer context")
            return got
        raise ExprError(f"cannot evaluate {node!r}")

    # -- exact rational backend (classical side) -----------------------------

    def eval_fraction(self, env):
        return Fraction(self._frac(self.ast, env))

    def _frac(self, node, env):
        tag = node[0]
        if tag == "num":
            return Fraction(node[1])
        if tag == "var":
            try:
                return Fraction(env[node[1]])
            except KeyError:
                raise ExprError(f"unbound variable {node[1]!r} in {self.text!r}") from None
        if tag == "neg":
            return -self._frac(node[1], env)
        if tag == "bin":
            op, a, b = node[1], self._frac(node[2], env), self._frac(node[3], env)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return a / b
            if op == "//":
                return Fraction(_as_int(a, "// operand") // _as_int(b, "// operand"))
            if op == "^":
                return a ** _as_int(b, "exponent")
        if tag == "call":
            name = node[1]
            if name == "rising":
                u, v, k = (self._frac(a, env) for a in node[2])
                k = _as_int(k, "rising length")
                base = u / v
                out = Fraction(1)
                for i in range(k):
                    out *= base + i
                return out
            args = [_as_int(self._frac(a, env), f"argument of {name}")
                    for a in node[2]]
            got = _int_call(name, args)
            if got is None:
                raise ExprError(f"function {name!r} not valid in rational context")
            return Fraction(got)
        raise ExprError(f"cannot evaluate {node!r}")

    # -- factored q-product backend ------------------------------------------

    def eval_factored(self, env):
        got = self._fact(self.ast, env)
        if isinstance(got, (int, Fraction)):
            return FactoredTerm(got)
        return got

    def _fact(self, node, env):
        tag = node[0]
        if tag == "num":
            return node[1]
        if tag == "var":
            if node[1] == "q":
                return FactoredTerm(1, 1)
            try:
                return _as_int(env[node[1]], f"variable {node[1]}")
            except KeyError:
                raise ExprError(f"unbound variable {node[1]!r} in {self.text!r}") from None
        if tag == "neg":
            got = self._fact(node[1], env)
            return -got
        if tag == "bin":
            op = node[1]
            a = self._fact(node[2], env)
            b = self._fact(node[3], env)
            plain = isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction))
            if op in ("+", "-"):
                if not plain:
                    raise ExprError(
                        f"additive q-structure in product context: {self.text!r}")
                return a + b if op == "+" else a - b
            if op == "*":
                return a * b if plain else _as_term(a) * _as_term(b)
            if op == "/":
                if plain:
                    return Fraction(a) / Fraction(b)
                return _as_term(a) / _as_term(b)
            if op == "//":
                if not plain:
                    raise ExprError("// needs integer operands")
                return _as_int(a, "// operand") // _as_int(b, "// operand")
            if op == "^":
                e = _as_int(b, "exponent")
                if isinstance(a, (int, Fraction)):
                    return Fraction(a) ** e
                return a ** e
        if tag == "call":
            name = node[1]
            args_nodes = node[2]
            if name == "qi":
                x = self._fact_int(args_nodes[0], env)
                s = self._fact_int(args_nodes[1], env) if len(args_nodes) > 1 else 1
                # [x]_{q^s} = (1 - q^{sx}) / (1 - q^s)
                return (FactoredTerm.one_minus_q(s * x)
                        / FactoredTerm.one_minus_q(s))
            if name in ("poch", "pochm"):
                c, m, l = (self._fact_int(a, env) for a in args_nodes)
                if l < 0:
                    raise ExprError(f"negative Pochhammer length in {self.text!r}")
                build = (FactoredTerm.one_minus_q if name == "poch"
                         else FactoredTerm.one_plus_q)
                out = FactoredTerm(1)
                for i in range(l):
                    out = out * build(c + m * i)
                return out
            if name == "opq":
                (e,) = (self._fact_int(a, env) for a in args_nodes)
                return FactoredTerm.one_plus_q(e)
            args = [self._fact_int(a, env) for a in args_nodes]
            got = _int_call(name, args)
            if got is None:
                raise ExprError(f"function {name!r} not valid in q context")
            return got
        raise ExprError(f"cannot evaluate {node!r}")

    def _fact_int(self, node, env):
        got = self._fact(node, env)
        return _as_int(got, f"subexpression of {self.text!r}")

    # -- expanded rational-function backend ------------------------------------

    def eval_rational(self, env):
        got = self._rat(self.ast, env)
        if isinstance(got, FactoredTerm):
            return got.as_rational()
        if isinstance(got, (int, Fraction)):
            return FactoredTerm(got).as_rational()
        return got

    def _rat(self, node, env):
        # Reuse the factored walk when possible; fall back to expanded
        # arithmetic for additive structure.
        try:
            return self._fact(node, env)
        except ExprError as err:
            if "additive q-structure" not in str(err):
                raise
        tag = node[0]
        if tag == "bin":
            op = node[1]
            a = _as_rationalfn(self._rat(node[2], env))
            b = _as_rationalfn(self._rat(node[3], env))
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return a / b
        if tag == "neg":
            return -_as_rationalfn(self._rat(node[1], env))
        raise ExprError(f"cannot evaluate {node!r} as a rational function")

    # -- parametric (bivariate) backend ----------------------------------------

    def eval_parametric(self, env):
        """Evaluate with the parameter exponent t kept formal.

        Returns a ParamFraction (unreduced).  ``t`` may appear only where an
        exponent is expected -- in q^(...), opq(...), and poch/pochm starts --
        and only linearly; every other value must be an integer.
        """
        got = self._param(self.ast, env)
        if isinstance(got, _LinForm):
            raise ExprError(
                f"parameter exponent outside exponent context in {self.text!r}")
        return ParamFraction.from_value(got)

    def _param(self, node, env):
        tag = node[0]
        if tag == "num":
            return node[1]
        if tag == "var":
            name = node[1]
            if name == "q":
                return ParamFraction(ParamPoly.monomial(1))
            if name == "t":
                return _LinForm(0, 1)
            try:
                return _as_int(env[name], f"variable {name}")
            except KeyError:
                raise ExprError(f"unbound variable {name!r} in {self.text!r}") from None
        if tag == "neg":
            got = self._param(node[1], env)
            if isinstance(got, _LinForm):
                return _LinForm(-got.base, -got.slope)
            return -got
        if tag == "bin":
            op = node[1]
            if op == "^":
                e = self._param(node[3], env)
                if isinstance(e, _LinForm):
                    if node[2] != ("var", "q"):
                        raise ExprError(
                            f"parameter exponent on a non-q base in {self.text!r}")
                    return ParamFraction(ParamPoly.monomial(e.base, e.slope))
                e = _as_int(e, "exponent")
                a = self._param(node[2], env)
                if isinstance(a, (int, Fraction)):
                    return Fraction(a) ** e if e < 0 else a ** e
                if isinstance(a, _LinForm):
                    if e == 1:
                        return a
                    raise ExprError(
                        f"cannot raise a parameter exponent in {self.text!r}")
                return ParamFraction.from_value(a) ** e
            a = self._param(node[2], env)
            b = self._param(node[3], env)
            if isinstance(a, _LinForm) or isinstance(b, _LinForm):
                return self._param_linear(op, a, b)
            if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
                if op == "+":
                    return a + b
                if op == "-":
                    return a - b
                if op == "*":
                    return a * b
                if op == "/":
                    return Fraction(a) / Fraction(b)
                if op == "//":
                    return _as_int(a, "// operand") // _as_int(b, "// operand")
            a = ParamFraction.from_value(a)
            b = ParamFraction.from_value(b)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return a / b
            raise ExprError(f"operator {op!r} not valid in parametric context")
        if tag == "call":
            name = node[1]
            args_nodes = node[2]
            if name == "qi":
                x = self._param_int(args_nodes[0], env)
                s = self._param_int(args_nodes[1], env) if len(args_nodes) > 1 else 1
                return ParamFraction(ParamPoly.one_minus(s * x),
                                     ParamPoly.one_minus(s))
            if name in ("poch", "pochm"):
                c = self._param(args_nodes[0], env)
                if not isinstance(c, _LinForm):
                    c = _LinForm(_as_int(c, "Pochhammer start"), 0)
                m = self._param_int(args_nodes[1], env)
                l = self._param_int(args_nodes[2], env)
                if l < 0:
                    raise ExprError(f"negative Pochhammer length in {self.text!r}")
                build = (ParamPoly.one_minus if name == "poch"
                         else ParamPoly.one_plus)
                out = ParamPoly.const(1)
                for i in range(l):
                    out = out * build(c.base + m * i, c.slope)
                return ParamFraction(out)
            if name == "opq":
                e = self._param(args_nodes[0], env)
                if not isinstance(e, _LinForm):
                    e = _LinForm(_as_int(e, "exponent"), 0)
                return ParamFraction(ParamPoly.one_plus(e.base, e.slope))
            args = [self._param_int(a, env) for a in args_nodes]
            got = _int_call(name, args)
            if got is None:
                raise ExprError(f"function {name!r} not valid in parametric context")
            return got
        raise ExprError(f"cannot evaluate {node!r}")

    def _param_linear(self, op, a, b):
        def lin(v):
            if isinstance(v, _LinForm):
                return v
            return _LinForm(_as_int(v, "exponent term"), 0)
        la, lb = lin(a), lin(b)
        if op == "+":
            return _LinForm(la.base + lb.base, la.slope + lb.slope)
        if op == "-":
            return _LinForm(la.base - lb.base, la.slope - lb.slope)
        if op == "*" and (la.slope == 0 or lb.slope == 0):
            if la.slope:
                la, lb = lb, la
            return _LinForm(la.base * lb.base, la.base * lb.slope)
        raise ExprError(
            f"parameter exponents must stay linear in {self.text!r}")

    def _param_int(self, node, env):
        return _as_int(self._param(node, env), f"subexpression of {self.text!r}")


def _as_term(value):
    if isinstance(value, FactoredTerm):
        return value
    return FactoredTerm(value)


def _as_rationalfn(value):
    if isinstance(value, FactoredTerm):
        return value.as_rational()
    if isinstance(value, (int, Fraction)):
        return FactoredTerm(value).as_rational()
    return value


@lru_cache(maxsize=4096)
def parse(text):
    """Parse an expression string (cached; Expr objects are immutable)."""
    return Expr(text)
