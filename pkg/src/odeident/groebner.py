"""Buchberger engine: reduced Groebner bases, normal forms, budgets.

Pair management follows Gebauer-Moeller (Buchberger's coprimality and
chain criteria), selection uses the sugar strategy.  Every loop is
metered by a Budget so runaway computations surface as ResourceLimit
instead of wrong or truncated answers.
"""

from __future__ import annotations

import heapq
import time

from .errors import JobCancelled, ResourceLimit
from .poly import Poly, QQ

DEFAULT_MAX_STEPS = 1_000_000
DEFAULT_DEGREE_CAP = 64


class Budget:
    """Step, degree, wall-clock, and cancellation limits for one computation."""

    __slots__ = ("max_steps", "degree_cap", "deadline", "cancel", "steps", "_check_at")

    def __init__(self, max_steps=DEFAULT_MAX_STEPS, degree_cap=DEFAULT_DEGREE_CAP,
                 timeout=None, cancel=None):
        self.max_steps = max_steps
        self.degree_cap = degree_cap
        self.deadline = time.monotonic() + timeout if timeout else None
        self.cancel = cancel
        self.steps = 0
        self._check_at = 1024

    def spend(self, n=1):
        self.steps += n
        if self.steps >= self._check_at:
            self._check_at = self.steps + 1024
            if self.steps > self.max_steps:
                raise ResourceLimit(
                    f"reduction step budget exceeded ({self.max_steps})",
                    {"steps": self.steps},
                )
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise ResourceLimit("time budget exceeded", {"steps": self.steps})
            if self.cancel is not None and self.cancel.is_set():
                raise JobCancelled("cancelled")

    def check_degree(self, deg):
        if deg > self.degree_cap:
            raise ResourceLimit(
                f"degree cap exceeded ({deg} > {self.degree_cap})", {"degree": deg}
            )


class GroebnerBasis:
    """Generator list + order; ``reduced`` marks the unique reduced basis."""

    __slots__ = ("gens", "ring", "reduced")

    def __init__(self, gens, ring, reduced=False):
        self.gens = tuple(gens)
        self.ring = ring
        self.reduced = reduced

    def __iter__(self):
        return iter(self.gens)

    def __len__(self):
        return len(self.gens)

    def is_trivial(self):
        """True when the ideal is the whole ring (inconsistent system)."""
        return any(g.is_constant() and not g.is_zero() for g in self.gens)

    def contains(self, p, budget=None):
        return normal_form(p, self, budget).is_zero()

    def eliminate(self, n):
        """Generators free of the first ``n`` variables (sensible only
        under a block order with an elimination block of size ``n``)."""
        out = []
        for g in self.gens:
            if all(all(e[i] == 0 for i in range(n)) for e in g.terms):
                out.append(g)
        return out

    def __repr__(self):
        return f"GroebnerBasis({len(self.gens)} gens, reduced={self.reduced})"


def _divmask(exps, nvars):
    m = 0
    for i, e in enumerate(exps):
        if e:
            m |= 1 << (i & 63)
    return m


class _Reducers:
    """Leading-term table with divmask prefilter for divisor lookup."""

    __slots__ = ("ring", "items")

    def __init__(self, ring):
        self.ring = ring
        self.items = []  # (lm, mask, lc_inv, poly)

    def add(self, p):
        lm, lc = p.lead()
        self.items.append((lm, _divmask(lm, self.ring.nvars), self.ring.coeff_inv(lc), p))

    def find(self, exps, mask):
        for lm, lmask, lc_inv, p in self.items:
            if lmask & ~mask:
                continue
            for a, b in zip(lm, exps):
                if a > b:
                    break
            else:
                return lm, lc_inv, p
        return None


def _reduce(p, reducers, budget, full=True):
    """Normal form of ``p`` against the reducer table.

    With ``full`` the remainder has no term divisible by any leading
    monomial; otherwise only the lead is reduced (enough inside the main
    Buchberger loop).
    """
    ring = p.ring
    nvars = ring.nvars
    key = ring.key
    work = dict(p.terms)
    remainder = {}
    heap = [(tuple(-x for x in key(e)),) + (e,) for e in work]
    heapq.heapify(heap)
    seen = set(work)
    while heap:
        _, e = heapq.heappop(heap)
        c = work.get(e)
        if not c:
            continue
        hit = reducers.find(e, _divmask(e, nvars))
        if hit is None:
            remainder[e] = c
            del work[e]
            if not full:
                remainder.update(work)
                break
            continue
        lm, lc_inv, g = hit
        shift = tuple(map(int.__sub__, e, lm))
        factor = c * lc_inv
        if ring.domain != QQ:
            factor %= ring.domain
        budget.spend(len(g.terms))
        for ge, gc in g.terms.items():
            t = tuple(map(int.__add__, ge, shift))
            prev = work.get(t, 0)
            val = prev - factor * gc
            if ring.domain != QQ:
                val %= ring.domain
            if val:
                work[t] = val
                if t not in seen:
                    seen.add(t)
                    heapq.heappush(heap, (tuple(-x for x in key(t)), t))
            elif t in work:
                del work[t]
    return Poly(ring, remainder)


def _spoly(f, g, budget):
    ring = f.ring
    fe, fc = f.lead()
    ge, gc = g.lead()
    lcm = tuple(map(max, fe, ge))
    budget.check_degree(sum(lcm))
    a = f.mul_term(tuple(map(int.__sub__, lcm, fe)), ring.coeff_inv(fc))
    b = g.mul_term(tuple(map(int.__sub__, lcm, ge)), ring.coeff_inv(gc))
    return a - b


def groebner(generators, order=None, budget=None):
    """Reduced Groebner basis of the ideal spanned by ``generators``.

    ``order`` recasts the computation into another term order on the
    same variables (recomputation, not basis conversion).
    """
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        raise ValueError("no nonzero generators")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise ValueError("generators from different rings")
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        gens = [Poly(ring, dict(g.terms)) for g in gens]
    budget = budget or Budget()

    basis = []  # list of monic polys
    sugars = []
    pairs = []  # heap of (sugar, lcm key, tiebreak, i, j)
    tick = 0

    def lm(i):
        return basis[i].lead_monomial()

    def pair_lcm(i, j):
        return tuple(map(max, lm(i), lm(j)))

    def add_pairs(t):
        # Gebauer-Moeller update for new element index t
        nonlocal pairs, tick
        new = []
        lt = lm(t)
        cand = []
        for i in range(t):
            if basis[i] is None:
                continue
            cand.append(i)
        lcms = {i: tuple(map(max, lm(i), lt)) for i in cand}
        kept = []
        for i in sorted(cand, key=lambda i: sum(lcms[i])):
            li = lcms[i]
            coprime = all(min(a, b) == 0 for a, b in zip(lm(i), lt))
            redundant = False
            if not coprime:
                for j in kept:
                    lj = lcms[j]
                    if lj != li and all(a <= b for a, b in zip(lj, li)):
                        redundant = True
                        break
            if not redundant:
                kept.append(i)
            if coprime:
                # used for pruning above but never queued (first criterion)
                continue
            new.append(i)
        new_set = set(new) & set(kept)
        # chain criterion against existing pairs
        filtered = []
        for entry in pairs:
            _, _, _, i, j = entry
            if basis[i] is None or basis[j] is None:
                continue
            lij = pair_lcm(i, j)
            if (
                all(a <= b for a, b in zip(lt, lij))
                and tuple(map(max, lm(i), lt)) != lij
                and tuple(map(max, lm(j), lt)) != lij
            ):
                continue
            filtered.append(entry)
        pairs = filtered
        heapq.heapify(pairs)
        for i in new_set:
            li = lcms[i]
            sugar = max(sugars[i] + sum(li) - sum(lm(i)), sugars[t] + sum(li) - sum(lt))
            tick += 1
            heapq.heappush(pairs, (sugar, ring.key(li), tick, i, t))

    reducers = _Reducers(ring)

    def rebuild_reducers():
        nonlocal reducers
        reducers = _Reducers(ring)
        for g in basis:
            if g is not None:
                reducers.add(g)

    for g in sorted(gens, key=lambda p: ring.key(p.lead_monomial())):
        r = _reduce(g, reducers, budget, full=False)
        if r.is_zero():
            continue
        basis.append(r.monic())
        sugars.append(r.total_degree())
        reducers.add(basis[-1])
        add_pairs(len(basis) - 1)

    while pairs:
        _, _, _, i, j = heapq.heappop(pairs)
        if basis[i] is None or basis[j] is None:
            continue
        s = _spoly(basis[i], basis[j], budget)
        if s.is_zero():
            continue
        r = _reduce(s, reducers, budget, full=False)
        if r.is_zero():
            continue
        budget.check_degree(r.total_degree())
        r = r.monic()
        basis.append(r)
        sugars.append(max(sugars[i], sugars[j], r.total_degree()))
        t = len(basis) - 1
        # retire basis elements whose lead the newcomer divides
        retired = False
        rl = r.lead_monomial()
        for k in range(t):
            if basis[k] is not None and k != t:
                lk = basis[k].lead_monomial()
                if all(a <= b for a, b in zip(rl, lk)):
                    basis[k] = None
                    retired = True
        if retired:
            rebuild_reducers()
        else:
            reducers.add(r)
        add_pairs(t)

    return _interreduce([g for g in basis if g is not None], ring, budget)


def _interreduce(polys, ring, budget):
    # keep only minimal leading monomials, then fully reduce tails
    polys = sorted(polys, key=lambda p: ring.key(p.lead_monomial()))
    minimal = []
    for p in polys:
        pl = p.lead_monomial()
        if any(all(a <= b for a, b in zip(q.lead_monomial(), pl)) for q in minimal):
            continue
        minimal.append(p)
    out = []
    for i, p in enumerate(minimal):
        others = _Reducers(ring)
        for j, q in enumerate(minimal):
            if i != j:
                others.add(q)
        r = _reduce(p, others, budget, full=True)
        if not r.is_zero():
            out.append(r.monic())
    out.sort(key=lambda p: ring.key(p.lead_monomial()))
    return GroebnerBasis(out, ring, reduced=True)


def normal_form(p, gb, budget=None):
    """Unique remainder of ``p`` modulo the basis (zero iff in the ideal)."""
    if p.ring != gb.ring:
        p = Poly(gb.ring, dict(p.terms)) if p.ring.vars == gb.ring.vars else p.to_ring(gb.ring)
    budget = budget or Budget()
    reducers = _Reducers(gb.ring)
    for g in gb.gens:
        reducers.add(g)
    return _reduce(p, reducers, budget, full=True)
