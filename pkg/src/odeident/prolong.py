"""Symbolic prolongation: output jets as functions of initial data.

The j-th derivative of each output is computed by iterated Lie
derivatives along the vector field, substituting every state derivative
through the right-hand sides.  The result expresses output jets as
rational functions of the initial states, the parameters, and input
jets; cleared equations plus a saturation variable make the system
polynomial with denominators pinned nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .orders import TermOrder
from .poly import Poly, PolyRing, QQ, RatFun

JET_SEP = "#"
SAT_VAR = "zz#sat"


def jet_name(base, j):
    return base if j == 0 else f"{base}{JET_SEP}{j}"


def default_orders(model):
    """Truncation order policy: states + parameters, per output."""
    nu = len(model.states) + len(model.params)
    return {y: nu for y in model.outputs}


@dataclass
class ProlongedSystem:
    model: object
    orders: dict
    base_ring: PolyRing  # states, params, input jets
    ring: PolyRing  # output jets + base vars + saturation variable
    output_exprs: dict  # (output, j) -> RatFun over base_ring
    equations: list  # (output, j, Poly over ring): den*y#j - num
    saturation: Poly = None
    denominator: Poly = None  # over base_ring

    def equation_polys(self):
        return [e for _, _, e in self.equations] + [self.saturation]


class _LieEngine:
    """Caches iterated Lie derivatives of the observation functions."""

    def __init__(self, model, max_order):
        self.model = model
        self.max_order = max_order
        u_jets = [jet_name(u, j) for u in model.inputs for j in range(max_order + 1)]
        self.ring = PolyRing(
            model.states + model.params + tuple(u_jets), QQ, TermOrder.degrevlex()
        )
        self.fields = {s: model.odes[s].to_ring(self.ring) for s in model.states}
        self._cache = {}

    def _derive(self, rf):
        ring = self.ring
        out = None
        num, den = rf.num, rf.den
        for i in sorted(rf.variables_used()):
            name = ring.vars[i]
            dnum = num.differentiate(i)
            dden = den.differentiate(i)
            if dnum.is_zero() and dden.is_zero():
                continue
            partial = RatFun(dnum * den - num * dden, den * den)
            if name in self.fields:
                shift = self.fields[name]
            elif JET_SEP in name or name in self.model.inputs:
                base, _, j = name.partition(JET_SEP)
                j = int(j) if j else 0
                if base not in self.model.inputs:
                    continue
                if j + 1 > self.max_order:
                    raise ValueError("input jet order exceeded; raise max_order")
                shift = RatFun.from_poly(ring.var(jet_name(base, j + 1)))
            else:
                continue  # parameter
            piece = partial * shift
            out = piece if out is None else out + piece
        if out is None:
            return RatFun.const(ring, 0)
        return out

    def output_jet(self, output, j):
        key = (output, j)
        if key not in self._cache:
            if j == 0:
                self._cache[key] = self.model.obs[output].to_ring(self.ring)
            else:
                self._cache[key] = self._derive(self.output_jet(output, j - 1))
        return self._cache[key]


def prolong(model, orders=None):
    """Build the prolonged system for the given per-output orders."""
    orders = dict(orders or default_orders(model))
    max_order = max(orders.values()) if orders else 0
    engine = _LieEngine(model, max_order)
    base_ring = engine.ring

    exprs = {}
    for y in model.outputs:
        for j in range(orders[y] + 1):
            exprs[(y, j)] = engine.output_jet(y, j)

    y_jets = [jet_name(y, j) for y in model.outputs for j in range(orders[y] + 1)]
    ring = PolyRing(
        tuple(y_jets) + base_ring.vars + (SAT_VAR,), QQ, TermOrder.degrevlex()
    )

    equations = []
    dens = []
    for y in model.outputs:
        for j in range(orders[y] + 1):
            rf = exprs[(y, j)]
            num = rf.num.to_ring(ring)
            den = rf.den.to_ring(ring)
            eq = den * ring.var(jet_name(y, j)) - num
            equations.append((y, j, eq.primitive()))
            if not rf.den.is_constant():
                if all(rf.den != d for d in dens):
                    dens.append(rf.den)

    denom = base_ring.one()
    for d in dens:
        denom = denom * d
    sat = ring.var(SAT_VAR) * denom.to_ring(ring) - ring.one()
    return ProlongedSystem(
        model=model,
        orders=orders,
        base_ring=base_ring,
        ring=ring,
        output_exprs=exprs,
        equations=equations,
        saturation=sat,
        denominator=denom,
    )
