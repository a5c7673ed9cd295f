"""Truncated power series arithmetic and exact trajectory jets.

Series are plain coefficient lists (index = power of t) over QQ
(Fractions) or GF(p) (ints).  ``propagate`` integrates a model's ODEs
formally from numeric initial data, giving exact output Taylor
coefficients; the dual variant carries first-order perturbations for
Jacobians of the jet map.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .errors import DegeneratePoint
from .poly import QQ


def _zero(p):
    return 0 if p else Fraction(0)


def _one(p):
    return 1 if p else Fraction(1)


def _coeff(c, p):
    """Convert a raw coefficient into the working domain."""
    if not p:
        return c if isinstance(c, Fraction) else Fraction(c)
    if isinstance(c, Fraction):
        return c.numerator * pow(c.denominator, -1, p) % p
    return c % p


def s_add(a, b, p):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
        out.append(x % p if p else x)
    return out


def s_neg(a, p):
    return [(-x) % p if p else -x for x in a]


def s_scale(a, c, p):
    return [(x * c) % p if p else x * c for x in a]


def s_mul(a, b, N, p):
    out = [_zero(p)] * N
    for i, x in enumerate(a):
        if i >= N or not x:
            continue
        top = min(len(b), N - i)
        for j in range(top):
            y = b[j]
            if y:
                out[i + j] += x * y
    if p:
        out = [x % p for x in out]
    return out


def s_inv(a, N, p):
    """Multiplicative inverse of a series with nonzero constant term."""
    if not a or not a[0]:
        raise ZeroDivisionError("series has zero constant term")
    c0 = a[0]
    inv0 = pow(c0, -1, p) if p else Fraction(1) / c0
    out = [inv0] + [_zero(p)] * (N - 1)
    for n in range(1, N):
        acc = _zero(p)
        for k in range(1, min(n, len(a) - 1) + 1):
            if a[k]:
                acc += a[k] * out[n - k]
        val = -inv0 * acc
        out[n] = val % p if p else val
    return out


def s_pow(a, e, N, p):
    out = [_one(p)] + [_zero(p)] * (N - 1)
    base = list(a[:N]) + [_zero(p)] * max(0, N - len(a))
    while e:
        if e & 1:
            out = s_mul(out, base, N, p)
        e >>= 1
        if e:
            base = s_mul(base, base, N, p)
    return out


def poly_series(poly, env, N, p):
    """Evaluate a Poly at series arguments (env: var name -> series)."""
    ring = poly.ring
    out = [_zero(p)] * N
    for exps, coeff in poly.terms.items():
        coeff = _coeff(coeff, p)
        term = None
        for i, e in enumerate(exps):
            if not e:
                continue
            s = s_pow(env[ring.vars[i]], e, N, p)
            term = s if term is None else s_mul(term, s, N, p)
        if term is None:
            out[0] += coeff
            if p:
                out[0] %= p
        else:
            out = s_add(out, s_scale(term, coeff, p), p)
    return out


def ratfun_series(rf, env, N, p):
    num = poly_series(rf.num, env, N, p)
    den = poly_series(rf.den, env, N, p)
    return s_mul(num, s_inv(den, N, p), N, p)


# -- dual series (value + one perturbation direction) --------------------------


def d_add(a, b, p):
    return (s_add(a[0], b[0], p), s_add(a[1], b[1], p))


def d_scale(a, c, p):
    return (s_scale(a[0], c, p), s_scale(a[1], c, p))


def d_mul(a, b, N, p):
    val = s_mul(a[0], b[0], N, p)
    der = s_add(s_mul(a[0], b[1], N, p), s_mul(a[1], b[0], N, p), p)
    return (val, der)


def d_pow(a, e, N, p):
    out = ([_one(p)] + [_zero(p)] * (N - 1), [_zero(p)] * N)
    base = a
    while e:
        if e & 1:
            out = d_mul(out, base, N, p)
        e >>= 1
        if e:
            base = d_mul(base, base, N, p)
    return out


def d_inv(a, N, p):
    inv = s_inv(a[0], N, p)
    der = s_neg(s_mul(s_mul(inv, inv, N, p), a[1], N, p), p)
    return (inv, der)


def poly_dual_series(poly, env, N, p):
    ring = poly.ring
    out = ([_zero(p)] * N, [_zero(p)] * N)
    for exps, coeff in poly.terms.items():
        coeff = _coeff(coeff, p)
        term = None
        for i, e in enumerate(exps):
            if not e:
                continue
            s = d_pow(env[ring.vars[i]], e, N, p)
            term = s if term is None else d_mul(term, s, N, p)
        if term is None:
            out[0][0] = (out[0][0] + coeff) % p if p else out[0][0] + coeff
        else:
            out = d_add(out, d_scale(term, coeff, p), p)
    return out


def ratfun_dual_series(rf, env, N, p):
    num = poly_dual_series(rf.num, env, N, p)
    den = poly_dual_series(rf.den, env, N, p)
    return d_mul(num, d_inv(den, N, p), N, p)


# -- trajectory propagation ----------------------------------------------------


class Trajectory:
    """Exact truncated solution of a model from numeric initial data.

    ``state_series``/``output_series`` hold Taylor coefficients; the
    ``jet`` accessors convert to derivative values y^(j)(0) = j! c_j.
    """

    def __init__(self, model, state_series, output_series, order, domain):
        self.model = model
        self.state_series = state_series
        self.output_series = output_series
        self.order = order
        self.domain = domain

    def output_jet(self, name, j):
        p = self.domain
        c = self.output_series[name][j]
        f = factorial(j)
        return (c * f) % p if p else c * f

    def state_jet(self, name, j):
        p = self.domain
        c = self.state_series[name][j]
        f = factorial(j)
        return (c * f) % p if p else c * f


def propagate(model, point, input_jets, order, domain=None):
    """Integrate formally to the given truncation order.

    point: name -> value for every state (initial value) and parameter.
    input_jets: input name -> list of derivative values u^(j)(0).
    domain: None for QQ, or a prime p.

    Raises DegeneratePoint when a right-hand-side denominator vanishes
    along the way (callers resample).
    """
    p = domain
    N = order + 1
    env = {}
    for name in model.params:
        v = point[name]
        env[name] = [v % p if p else Fraction(v)] + [_zero(p)] * (N - 1)
    for name in model.inputs:
        jets = input_jets[name]
        s = []
        for j in range(N):
            v = jets[j] if j < len(jets) else 0
            c = Fraction(v, factorial(j)) if not p else (v * pow(factorial(j), -1, p)) % p
            s.append(c)
        env[name] = s
    xs = {}
    for name in model.states:
        v = point[name]
        s = [v % p if p else Fraction(v)] + [_zero(p)] * (N - 1)
        xs[name] = s
        env[name] = s
    for j in range(N - 1):
        for name in model.states:
            rf = model.odes[name]
            try:
                f = ratfun_series(rf, env, j + 1, p)
            except ZeroDivisionError:
                raise DegeneratePoint(f"denominator of {name}' vanishes at the sample")
            c = f[j]
            xs[name][j + 1] = (
                (c * pow(j + 1, -1, p)) % p if p else c / (j + 1)
            )
    ys = {}
    for name in model.outputs:
        try:
            ys[name] = ratfun_series(model.obs[name], env, N, p)
        except ZeroDivisionError:
            raise DegeneratePoint(f"denominator of output {name} vanishes at the sample")
    return Trajectory(model, xs, ys, order, p)


def propagate_dual(model, point, input_jets, order, seed_var, domain=None):
    """Like ``propagate`` but carrying d/d(seed_var) where seed_var is a
    state (perturbing its initial value) or a parameter."""
    p = domain
    N = order + 1

    def lift(series, active):
        der = [_zero(p)] * N
        if active:
            der[0] = _one(p)
        return (series, der)

    env = {}
    for name in model.params:
        v = point[name]
        base = [v % p if p else Fraction(v)] + [_zero(p)] * (N - 1)
        env[name] = lift(base, name == seed_var)
    for name in model.inputs:
        jets = input_jets[name]
        s = []
        for j in range(N):
            v = jets[j] if j < len(jets) else 0
            c = Fraction(v, factorial(j)) if not p else (v * pow(factorial(j), -1, p)) % p
            s.append(c)
        env[name] = (s, [_zero(p)] * N)
    xs = {}
    for name in model.states:
        v = point[name]
        base = [v % p if p else Fraction(v)] + [_zero(p)] * (N - 1)
        dual = lift(base, name == seed_var)
        xs[name] = dual
        env[name] = dual
    for j in range(N - 1):
        for name in model.states:
            rf = model.odes[name]
            try:
                fv, fd = ratfun_dual_series(rf, env, j + 1, p)
            except ZeroDivisionError:
                raise DegeneratePoint(f"denominator of {name}' vanishes at the sample")
            inv = pow(j + 1, -1, p) if p else Fraction(1, j + 1)
            val, der = xs[name]
            val[j + 1] = (fv[j] * inv) % p if p else fv[j] * inv
            der[j + 1] = (fd[j] * inv) % p if p else fd[j] * inv
    ys = {}
    dys = {}
    for name in model.outputs:
        try:
            v, d = ratfun_dual_series(model.obs[name], env, N, p)
        except ZeroDivisionError:
            raise DegeneratePoint(f"denominator of output {name} vanishes at the sample")
        ys[name] = v
        dys[name] = d
    plain = {name: dual[0] for name, dual in xs.items()}
    return Trajectory(model, plain, ys, order, p), dys
