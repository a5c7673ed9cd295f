"""Exact sparse multivariate polynomials and rational functions.

Coefficients live either in QQ (as ``fractions.Fraction``) or in a prime
field GF(p) (as plain ints reduced mod p).  A polynomial is a dict from
exponent tuples to nonzero coefficients, tied to a ``PolyRing`` that
fixes the variable list, the coefficient domain, and the term order.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DivisionNotExact
from .orders import TermOrder

QQ = "QQ"


class PolyRing:
    """Variable list + coefficient domain + term order.

    ``domain`` is the string ``"QQ"`` or an int prime p.  Rings are
    immutable; order keys are memoized per ring since the same monomials
    recur constantly during basis computations.
    """

    __slots__ = ("vars", "domain", "order", "nvars", "_varindex", "_key", "_keycache")

    def __init__(self, variables, domain=QQ, order=None):
        self.vars = tuple(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.domain = domain
        self.order = order if order is not None else TermOrder.degrevlex()
        self.nvars = len(self.vars)
        self._varindex = {v: i for i, v in enumerate(self.vars)}
        self._key = self.order.key_function(self.nvars) if self.nvars else (lambda e: ())
        self._keycache = {}

    # -- coefficient domain helpers -------------------------------------

    def coeff(self, c):
        """Normalize a raw number into the coefficient domain."""
        if self.domain == QQ:
            return c if isinstance(c, Fraction) else Fraction(c)
        if isinstance(c, Fraction):
            return c.numerator * pow(c.denominator, -1, self.domain) % self.domain
        return int(c) % self.domain

    def coeff_inv(self, c):
        if self.domain == QQ:
            return Fraction(1) / c
        return pow(c, -1, self.domain)

    def key(self, exps):
        k = self._keycache.get(exps)
        if k is None:
            k = self._key(exps)
            self._keycache[exps] = k
        return k

    def index(self, name):
        return self._varindex[name]

    # -- constructors ----------------------------------------------------

    def zero(self):
        return Poly(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        c = self.coeff(c)
        if not c:
            return Poly(self, {})
        return Poly(self, {(0,) * self.nvars: c})

    def var(self, name):
        i = self._varindex[name]
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.coeff(1)})

    def monomial(self, exps, c=1):
        c = self.coeff(c)
        if not c:
            return Poly(self, {})
        return Poly(self, {tuple(exps): c})

    def from_dict(self, terms):
        out = {}
        for e, c in terms.items():
            c = self.coeff(c)
            if c:
                out[tuple(e)] = c
        return Poly(self, out)

    def with_order(self, order):
        if order == self.order:
            return self
        return PolyRing(self.vars, self.domain, order)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.vars == other.vars
            and self.domain == other.domain
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.vars, self.domain, self.order))

    def __repr__(self):
        dom = "QQ" if self.domain == QQ else f"GF({self.domain})"
        return f"PolyRing({list(self.vars)}, {dom}, {self.order!r})"


class Poly:
    """Immutable sparse polynomial over a PolyRing."""

    __slots__ = ("ring", "terms", "_lead")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._lead = None

    # -- basic queries ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """Coefficient of the constant monomial (zero if absent)."""
        z = (0,) * self.ring.nvars
        return self.terms.get(z, self.ring.coeff(0))

    def lead(self):
        """(exponent tuple, coefficient) of the leading term."""
        if self._lead is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            key = self.ring.key
            self._lead = max(self.terms, key=key)
        return self._lead, self.terms[self._lead]

    def lead_monomial(self):
        return self.lead()[0]

    def lead_coeff(self):
        return self.lead()[1]

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i):
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def variables_used(self):
        used = set()
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used.add(i)
        return used

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        if self.ring.domain == QQ:
            return Poly(self.ring, {e: -c for e, c in self.terms.items()})
        p = self.ring.domain
        return Poly(self.ring, {e: (-c) % p for e, c in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        big, small = self.terms, other.terms
        if len(big) < len(small):
            big, small = small, big
        out = dict(big)
        if self.ring.domain == QQ:
            for e, c in small.items():
                s = out.get(e)
                if s is None:
                    out[e] = c
                else:
                    s = s + c
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        else:
            p = self.ring.domain
            for e, c in small.items():
                s = (out.get(e, 0) + c) % p
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly(self.ring, {})
        if len(a) > len(b):
            a, b = b, a
        out = {}
        if self.ring.domain == QQ:
            for ea, ca in a.items():
                for eb, cb in b.items():
                    e = tuple(map(int.__add__, ea, eb))
                    s = out.get(e)
                    out[e] = ca * cb if s is None else s + ca * cb
            return Poly(self.ring, {e: c for e, c in out.items() if c})
        p = self.ring.domain
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(map(int.__add__, ea, eb))
                out[e] = (out.get(e, 0) + ca * cb) % p
        return Poly(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def mul_term(self, exps, coeff):
        """Multiply by a single term (used heavily in reduction)."""
        if not coeff:
            return Poly(self.ring, {})
        if self.ring.domain == QQ:
            return Poly(
                self.ring,
                {tuple(map(int.__add__, e, exps)): c * coeff for e, c in self.terms.items()},
            )
        p = self.ring.domain
        return Poly(
            self.ring,
            {tuple(map(int.__add__, e, exps)): (c * coeff) % p for e, c in self.terms.items()},
        )

    def scale(self, coeff):
        return self.mul_term((0,) * self.ring.nvars, self.ring.coeff(coeff))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def monic(self):
        if not self.terms:
            return self
        return self.scale(self.ring.coeff_inv(self.lead_coeff()))

    def exact_div(self, other):
        """Exact polynomial division; raises DivisionNotExact otherwise."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = self
        out = {}
        ge, gc = other.lead()
        ginv = self.ring.coeff_inv(gc)
        while rem.terms:
            (re, rc) = rem.lead()
            q = tuple(map(int.__sub__, re, ge))
            if any(x < 0 for x in q):
                raise DivisionNotExact(f"{self} not divisible by {other}")
            c = rc * ginv
            if self.ring.domain != QQ:
                c %= self.ring.domain
            out[q] = c
            rem = rem - other.mul_term(q, c)
        return Poly(self.ring, out)

    def differentiate(self, var):
        """Formal partial derivative with respect to ``var`` (name or index)."""
        i = var if isinstance(var, int) else self.ring.index(var)
        out = {}
        dom = self.ring.domain
        for e, c in self.terms.items():
            k = e[i]
            if not k:
                continue
            d = list(e)
            d[i] = k - 1
            cc = c * k if dom == QQ else (c * k) % dom
            if cc:
                out[tuple(d)] = cc
        return Poly(self.ring, out)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # -- structure manipulation -------------------------------------------

    def map_coeffs(self, fn, ring=None):
        ring = ring or self.ring
        out = {}
        for e, c in self.terms.items():
            c2 = ring.coeff(fn(c))
            if c2:
                out[e] = c2
        return Poly(ring, out)

    def to_ring(self, ring, var_map=None):
        """Re-express in another ring.

        ``var_map`` maps old variable index to new index; by name when
        omitted.  Old variables must all map somewhere they occur.
        """
        if var_map is None:
            var_map = {}
            for i, v in enumerate(self.ring.vars):
                if v in ring._varindex:
                    var_map[i] = ring.index(v)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, x in enumerate(e):
                if x:
                    ne[var_map[i]] = x
            c = ring.coeff(c)
            if c:
                key = tuple(ne)
                if key in out:
                    out[key] = out[key] + c if ring.domain == QQ else (out[key] + c) % ring.domain
                    if not out[key]:
                        del out[key]
                else:
                    out[key] = c
        return Poly(ring, out)

    def specialize(self, values, ring=None):
        """Substitute constants for a subset of variables.

        ``values`` maps variable name to a raw coefficient.  The result
        lives in ``ring`` (which must carry exactly the remaining
        variables) or, if omitted, in a fresh ring with the same order
        kind, domain, and the surviving variables.
        """
        idx_val = {self.ring.index(v): self.ring.coeff(c) for v, c in values.items()}
        if ring is None:
            keep = [v for v in self.ring.vars if v not in values]
            ring = PolyRing(keep, self.ring.domain, self.ring.order)
        var_map = {}
        for i, v in enumerate(self.ring.vars):
            if i not in idx_val:
                var_map[i] = ring.index(v)
        dom = ring.domain
        out = {}
        for e, c in self.terms.items():
            factor = c
            ne = [0] * ring.nvars
            for i, x in enumerate(e):
                if not x:
                    continue
                if i in idx_val:
                    factor = factor * idx_val[i] ** x
                else:
                    ne[var_map[i]] = x
            factor = ring.coeff(factor)
            if not factor:
                continue
            key = tuple(ne)
            prev = out.get(key)
            if prev is None:
                out[key] = factor
            else:
                s = prev + factor if dom == QQ else (prev + factor) % dom
                if s:
                    out[key] = s
                else:
                    del out[key]
        return Poly(ring, out)

    def evaluate(self, values):
        """Full evaluation at a point given as name -> coefficient."""
        missing = [self.ring.vars[i] for i in self.variables_used() if self.ring.vars[i] not in values]
        if missing:
            raise ValueError(f"no value for {missing}")
        dom = self.ring.domain
        total = self.ring.coeff(0)
        idx_val = {self.ring.index(v): self.ring.coeff(c) for v, c in values.items()}
        for e, c in self.terms.items():
            f = c
            for i, x in enumerate(e):
                if x:
                    f = f * idx_val[i] ** x
            total = total + f
        if dom != QQ:
            total %= dom
        return total

    # -- integer normalization (QQ only) -----------------------------------

    def clear_denominators(self):
        """Return (poly with integer coefficients, common denominator)."""
        if self.ring.domain != QQ:
            return self, 1
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        if den == 1 and all(c.denominator == 1 for c in self.terms.values()):
            return self, 1
        return self.scale(den), den

    def integer_content(self):
        """gcd of numerators / lcm of denominators, sign of leading coeff."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        content = Fraction(num, den)
        if self.lead_coeff() < 0:
            content = -content
        return content

    def primitive(self):
        """Divide out the integer content; leading coefficient positive."""
        c = self.integer_content()
        if not c or c == 1:
            return self
        return self.scale(Fraction(1) / c)

    # -- rendering ----------------------------------------------------------

    def sorted_terms(self):
        key = self.ring.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def render(self):
        """Grammar-conformant text: ``2*a*x1^2 - b/3 + 1``."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for i, x in enumerate(e):
                if x == 1:
                    factors.append(self.ring.vars[i])
                elif x > 1:
                    factors.append(f"{self.ring.vars[i]}^{x}")
            mono = "*".join(factors)
            if self.ring.domain == QQ:
                neg = c < 0
                mag = -c if neg else c
            else:
                neg = False
                mag = c
            if mono:
                cs = "" if mag == 1 else f"{mag}*"
                text = f"{cs}{mono}"
            else:
                text = f"{mag}"
            if not parts:
                parts.append(f"-{text}" if neg else text)
            else:
                parts.append(f"- {text}" if neg else f"+ {text}")
        return " ".join(parts)

    def __repr__(self):
        return f"Poly({self.render()})"


# -- multivariate gcd over QQ -------------------------------------------------


def _monomial_content(f):
    """Elementwise-minimum exponent vector across all terms."""
    it = iter(f.terms)
    m = list(next(it))
    for e in it:
        for i, x in enumerate(e):
            if x < m[i]:
                m[i] = x
        if not any(m):
            break
    return tuple(m)


def _shift_down(f, m):
    if not any(m):
        return f
    return Poly(f.ring, {tuple(map(int.__sub__, e, m)): c for e, c in f.terms.items()})


def poly_gcd(f, g):
    """Gcd of two QQ-polynomials, integer-primitive with positive lead.

    Shared monomial content is split off first (this settles the common
    case of monomial denominators instantly); the rest is a primitive
    PRS in a selected main variable, recursing on the coefficient
    polynomials.  Fine for the desk-scale inputs this package
    manipulates; not tuned for large dense instances.
    """
    if f.ring != g.ring:
        raise ValueError("gcd of polynomials from different rings")
    if f.ring.domain != QQ:
        raise ValueError("poly_gcd is defined over QQ")
    if f.is_zero():
        return g.primitive()
    if g.is_zero():
        return f.primitive()
    mf = _monomial_content(f)
    mg = _monomial_content(g)
    shared = tuple(map(min, mf, mg))
    f = _shift_down(f, mf)
    g = _shift_down(g, mg)
    mono = f.ring.monomial(shared) if any(shared) else None
    if len(f.terms) == 1 or len(g.terms) == 1:
        core = f.ring.one()
    elif f.is_constant() or g.is_constant():
        core = f.ring.one()
    else:
        f = f.primitive()
        g = g.primitive()
        common = f.variables_used() & g.variables_used()
        if not common:
            core = f.ring.one()
        else:
            # main variable: minimize the smaller degree to shrink the PRS
            main = min(common, key=lambda i: min(f.degree_in(i), g.degree_in(i)))
            core = _gcd_univar(f, g, main)
    return (core * mono).primitive() if mono is not None else core.primitive()


def _gcd_univar(f, g, i):
    ring = f.ring
    fu = _to_univar(f, i)
    gu = _to_univar(g, i)
    fc = _content(fu, ring)
    gc = _content(gu, ring)
    fu = {d: c.exact_div(fc) for d, c in fu.items()}
    gu = {d: c.exact_div(gc) for d, c in gu.items()}
    cont = poly_gcd(fc, gc)
    if max(fu) < max(gu):
        fu, gu = gu, fu
    while gu:
        r = _pseudo_rem(fu, gu, ring)
        fu, gu = gu, r
        if gu:
            rc = _content(gu, ring)
            gu = {d: c.exact_div(rc) for d, c in gu.items()}
    pp = ring.zero()
    for d, c in fu.items():
        e = [0] * ring.nvars
        e[i] = d
        pp = pp + c * ring.monomial(e)
    return (cont * pp).primitive()


def _to_univar(f, i):
    out = {}
    ring = f.ring
    for e, c in f.terms.items():
        d = e[i]
        rest = list(e)
        rest[i] = 0
        out.setdefault(d, {})[tuple(rest)] = c
    return {d: Poly(ring, t) for d, t in out.items()}


def _content(fu, ring):
    c = ring.zero()
    for coeff in fu.values():
        c = poly_gcd(c, coeff)
        if c.is_constant() and not c.is_zero():
            return ring.one()
    return c


def _pseudo_rem(fu, gu, ring):
    df = max(fu)
    dg = max(gu)
    lg = gu[dg]
    rem = dict(fu)
    while rem:
        dr = max(rem)
        if dr < dg:
            break
        lr = rem[dr]
        # rem := lg*rem - lr*x^(dr-dg)*gu
        new = {}
        for d, c in rem.items():
            new[d] = c * lg
        for d, c in gu.items():
            dd = d + dr - dg
            prev = new.get(dd, ring.zero())
            val = prev - lr * c
            if val.is_zero():
                new.pop(dd, None)
            else:
                new[dd] = val
        rem = {d: c for d, c in new.items() if not c.is_zero()}
    return rem


def poly_lcm(f, g):
    if f.is_zero() or g.is_zero():
        return f.ring.zero()
    return (f * g).exact_div(poly_gcd(f, g)).primitive()


# -- rational functions -------------------------------------------------------


class RatFun:
    """Quotient of two QQ-polynomials, kept gcd-reduced and canonical.

    Canonical form: numerator and denominator have integer coefficients,
    share no polynomial factor nor integer content, and the denominator
    has a positive leading coefficient.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        if den is None:
            den = num.ring.one()
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.ring != den.ring:
            raise ValueError("numerator and denominator from different rings")
        if reduce:
            num, den = _reduce_pair(num, den)
        self.num = num
        self.den = den

    @property
    def ring(self):
        return self.num.ring

    @staticmethod
    def from_poly(p):
        return RatFun(p, p.ring.one(), reduce=False)

    @staticmethod
    def const(ring, c):
        return RatFun(ring.const(c), ring.one())

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self):
        return self.den.is_constant()

    def constant_value(self):
        return Fraction(self.num.constant_value()) / Fraction(self.den.constant_value())

    def variables_used(self):
        return self.num.variables_used() | self.den.variables_used()

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def _coerce(self, other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, Poly):
            return RatFun.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RatFun.const(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if n >= 0:
            return RatFun(self.num**n, self.den**n)
        if self.is_zero():
            raise ZeroDivisionError("negative power of zero")
        return RatFun(self.den ** (-n), self.num ** (-n))

    def inverse(self):
        return RatFun(self.den, self.num)

    def evaluate(self, values):
        d = self.den.evaluate(values)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the point")
        return Fraction(self.num.evaluate(values)) / Fraction(d)

    def specialize(self, values, ring=None):
        num = self.num.specialize(values, ring)
        den = self.den.specialize(values, num.ring)
        return RatFun(num, den)

    def to_ring(self, ring):
        return RatFun(self.num.to_ring(ring), self.den.to_ring(ring))

    def render(self):
        if self.den.is_constant():
            d = self.den.constant_value()
            if d == 1:
                return self.num.render()
            num = self.num.render()
            if len(self.num.terms) > 1:
                return f"({num})/{d}"
            return f"{num}/{d}"
        num = self.num.render()
        den = self.den.render()
        if len(self.num.terms) > 1:
            num = f"({num})"
        if len(self.den.terms) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RatFun({self.render()})"


def _reduce_pair(num, den):
    if num.is_zero():
        return num, den.ring.one()
    if num.ring.domain != QQ:
        inv = num.ring.coeff_inv(den.lead_coeff())
        return num.scale(inv), den.scale(inv)
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = num.exact_div(g)
        den = den.exact_div(g)
    # integer-canonical: den primitive and positive, num integer, shared
    # integer content removed
    cn = num.integer_content()
    cd = den.integer_content()
    scale = Fraction(math.gcd(cn.numerator, cd.numerator), math.lcm(cn.denominator, cd.denominator))
    if cd < 0:
        scale = -scale
    num = num.scale(1 / scale)
    den = den.scale(1 / scale)
    return num, den
