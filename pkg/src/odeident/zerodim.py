"""Solution counting and univariate structure of polynomial ideals.

Works from a reduced Groebner basis: the staircase of leading monomials
gives the quotient dimension (solutions with multiplicity), and normal
forms of powers give per-variable minimal polynomials via incremental
linear algebra over the coefficient domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotZeroDimensional, ResourceLimit
from .groebner import Budget, normal_form
from .orders import TermOrder
from .poly import Poly, PolyRing, QQ


@dataclass(frozen=True)
class SolutionCount:
    """Finite(k) or Infinite verdict for a variety."""

    finite: bool
    count: int | None = None

    @staticmethod
    def of(count):
        return SolutionCount(True, count)

    INFINITE = None  # set below

    def __repr__(self):
        return f"Finite({self.count})" if self.finite else "Infinite"


SolutionCount.INFINITE = SolutionCount(False, None)


def staircase_bounds(gb):
    """Per-variable pure-power bound from the leading monomials.

    Returns a list with entry i equal to the minimal d such that x_i^d
    is a leading monomial, or None when no pure power of x_i leads.
    """
    n = gb.ring.nvars
    bounds = [None] * n
    for g in gb.gens:
        lm = g.lead_monomial()
        nz = [i for i, e in enumerate(lm) if e]
        if len(nz) == 1:
            i = nz[0]
            d = lm[i]
            if bounds[i] is None or d < bounds[i]:
                bounds[i] = d
        elif len(nz) == 0:
            return [0] * n  # trivial ideal
    return bounds


def is_zero_dimensional(gb):
    return all(b is not None for b in staircase_bounds(gb))


def quotient_dimension(gb, limit=2_000_000):
    """Number of standard monomials (None when not zero-dimensional)."""
    bounds = staircase_bounds(gb)
    if any(b is None for b in bounds):
        return None
    box = 1
    for b in bounds:
        box *= max(b, 1)
    if box > limit:
        raise ResourceLimit(f"staircase box too large ({box})", {"box": box})
    leads = [g.lead_monomial() for g in gb.gens]
    count = 0
    stack = [(0,) * gb.ring.nvars]
    seen = {stack[0]}
    while stack:
        e = stack.pop()
        if any(all(a <= b for a, b in zip(lm, e)) for lm in leads):
            continue
        count += 1
        for i in range(gb.ring.nvars):
            if e[i] + 1 < bounds[i]:
                ne = e[:i] + (e[i] + 1,) + e[i + 1 :]
                if ne not in seen:
                    seen.add(ne)
                    stack.append(ne)
    return count


def solution_count(gb):
    """Finite(k) with k the quotient dimension, or Infinite.

    An inconsistent system counts as Finite(0).
    """
    if gb.is_trivial():
        return SolutionCount.of(0)
    dim = quotient_dimension(gb)
    if dim is None:
        return SolutionCount.INFINITE
    return SolutionCount.of(dim)


class _LinearTrap:
    """Incremental Gaussian elimination that reports the first linear
    dependency among a stream of vectors (sparse dicts over monomials)."""

    def __init__(self, domain):
        self.domain = domain
        self.rows = []  # (pivot monomial, row dict, combo dict)

    def _inv(self, c):
        if self.domain == QQ:
            return Fraction(1) / c
        return pow(c, -1, self.domain)

    def add(self, vec, tag):
        """Insert vector; returns the dependency {tag: coeff} if vec is
        linearly dependent on earlier insertions, else None."""
        vec = dict(vec)
        combo = {tag: self.domain == QQ and Fraction(1) or 1}
        for pivot, row, pcombo in self.rows:
            c = vec.get(pivot)
            if not c:
                continue
            for m, v in row.items():
                nv = vec.get(m, 0) - c * v
                if self.domain != QQ:
                    nv %= self.domain
                if nv:
                    vec[m] = nv
                else:
                    vec.pop(m, None)
            for t, v in pcombo.items():
                nv = combo.get(t, 0) - c * v
                if self.domain != QQ:
                    nv %= self.domain
                if nv:
                    combo[t] = nv
                else:
                    combo.pop(t, None)
        if not vec:
            return combo
        pivot = next(iter(vec))
        inv = self._inv(vec[pivot])
        if self.domain == QQ:
            row = {m: v * inv for m, v in vec.items()}
            pcombo = {t: v * inv for t, v in combo.items()}
        else:
            row = {m: (v * inv) % self.domain for m, v in vec.items()}
            pcombo = {t: (v * inv) % self.domain for t, v in combo.items()}
        self.rows.append((pivot, row, pcombo))
        return None


def algebraic_relation(var, gb, max_degree=64, budget=None):
    """Least-degree monic univariate polynomial in ``var`` lying in the
    ideal, searched up to ``max_degree``; None if no relation that low.

    Works in any dimension: powers of the variable are reduced to normal
    form and fed to a linear dependency trap.
    """
    budget = budget or Budget()
    ring = gb.ring
    v = ring.var(var)
    uni = PolyRing((var,), ring.domain, TermOrder.lex())
    trap = _LinearTrap(ring.domain)
    power = ring.one()
    for d in range(max_degree + 1):
        if d:
            power = normal_form(power * v, gb, budget)
        combo = trap.add(dict(power.terms), d)
        if combo is not None:
            lead = combo[max(combo)]
            inv = Fraction(1) / lead if ring.domain == QQ else pow(lead, -1, ring.domain)
            coeffs = {}
            for deg, c in combo.items():
                c = c * inv
                if ring.domain != QQ:
                    c %= ring.domain
                if c:
                    coeffs[(deg,)] = c
            return uni.from_dict(coeffs)
    return None


def minimal_polynomial(var, gb, budget=None):
    """Monic least-degree polynomial of ``var`` modulo a zero-dimensional
    ideal.  Raises NotZeroDimensional otherwise."""
    dim = quotient_dimension(gb)
    if dim is None:
        raise NotZeroDimensional(f"ideal is not zero-dimensional; no minimal polynomial for {var}")
    rel = algebraic_relation(var, gb, max_degree=dim, budget=budget)
    if rel is None:
        raise ResourceLimit("minimal polynomial search exceeded quotient dimension")
    return rel


def univariate_gcd(f, g):
    """Monic gcd of univariate polynomials over QQ or GF(p)."""
    ring = f.ring
    while not g.is_zero():
        f, g = g, _univar_rem(f, g)
    if f.is_zero():
        return f
    return f.monic()


def _univar_rem(f, g):
    ring = f.ring
    ge, gc = g.lead()
    ginv = ring.coeff_inv(gc)
    r = f
    while not r.is_zero() and r.lead_monomial()[0] >= ge[0]:
        re, rc = r.lead()
        shift = (re[0] - ge[0],)
        c = rc * ginv
        if ring.domain != QQ:
            c %= ring.domain
        r = r - g.mul_term(shift, c)
    return r


def squarefree_part(f):
    """f / gcd(f, f') for univariate f (counts distinct roots by degree)."""
    if f.is_zero() or f.is_constant():
        return f
    d = f.differentiate(0)
    g = univariate_gcd(f, d)
    if g.is_constant():
        return f.monic()
    return f.exact_div(g).monic()


def distinct_root_count(f):
    """Number of distinct roots of univariate ``f`` in the algebraic
    closure of its coefficient field."""
    sf = squarefree_part(f)
    return sf.total_degree()
