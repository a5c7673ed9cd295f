"""Per-symbol identifiability assessment by randomized specialization.

Pipeline for one model: pick a random point (parameters, initial
states, input jets) from a range sized by the probability contract;
propagate exact output jets; decide local identifiability of every
queried symbol from the rank of the jet Jacobian; then pin down the
number of solutions per locally identifiable symbol by adjoining a
fresh copy of the unknowns, specializing the output jets to their
sampled values, and reading each symbol's minimal polynomial modulo a
Groebner basis over a large prime field.

The whole procedure is Monte Carlo: answers are correct with
probability at least the requested p, the failure budget being split
between the sampling range and the choice of prime.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegeneratePoint, ResourceLimit
from .groebner import Budget, groebner, normal_form
from .modelir import ModelSystem
from .orders import TermOrder
from .poly import PolyRing, QQ, RatFun
from .prolong import SAT_VAR, default_orders, jet_name, prolong
from .series import propagate, propagate_dual
from .zerodim import algebraic_relation, distinct_root_count

# word-sized primes used for modular runs (all >= 2^30)
PRIMES = (
    2147483647,
    2147483629,
    2147483587,
    2147483579,
    2147483563,
    2147483549,
    2147483543,
    2147483497,
)

MAX_SOLUTION_DEGREE = 64
SAMPLE_RETRIES = 16


@dataclass
class AnalysisOptions:
    """User-facing knobs for one identifiability run."""

    probability: Fraction = Fraction(99, 100)
    copies: int = 1
    query_initial_conditions: bool = True
    check_local_global: bool = True
    print_number_of_solutions: bool = True

    def __post_init__(self):
        p = Fraction(self.probability)
        if not 0 < p < 1:
            raise ValueError("probability must lie strictly between 0 and 1")
        self.probability = p
        if self.copies < 1:
            raise ValueError("copies must be at least 1")


@dataclass
class IdentReport:
    """Partition of the queried symbols with per-symbol solution counts."""

    globally: list
    locally_not_globally: list
    non_identifiable: list
    undetermined: list
    num_solutions: dict
    probability: Fraction
    copies: int = 1

    def all_queried(self):
        return (
            list(self.globally)
            + list(self.locally_not_globally)
            + list(self.non_identifiable)
            + list(self.undetermined)
        )

    def classification(self, symbol):
        for label, group in (
            ("globally", self.globally),
            ("locally", self.locally_not_globally),
            ("non-identifiable", self.non_identifiable),
            ("undetermined", self.undetermined),
        ):
            if symbol in group:
                return label
        raise KeyError(symbol)


def sampling_range(model, orders, probability, share=Fraction(1, 2)):
    """Integer range [1, R] for random draws.

    Degree-based union bound: the bad locus where the specialization is
    non-generic is contained in a hypersurface whose degree we bound by
    the summed degrees of all prolonged equations; Schwartz-Zippel then
    gives failure probability <= D / R.  ``share`` is the slice of the
    total failure budget 1-p assigned to sampling.
    """
    df = 1
    for rf in model.odes.values():
        df = max(df, rf.num.total_degree() + max(rf.den.total_degree(), 0))
    dg = 1
    for rf in model.obs.values():
        dg = max(dg, rf.num.total_degree() + max(rf.den.total_degree(), 0))
    D = 0
    for y, nu in orders.items():
        for j in range(nu + 1):
            D += dg + j * max(df - 1, 1) + 1
    eps = (1 - Fraction(probability)) * share
    return max(1000, math.ceil(Fraction(D, eps)))


@dataclass
class SamplePoint:
    """A random specialization: values plus the exact trajectory jets."""

    point: dict  # state/param name -> int
    input_jets: dict  # input name -> list of ints (derivative values)
    trajectory: object  # exact QQ trajectory
    orders: dict
    range: int

    def output_jet(self, name, j):
        return self.trajectory.output_jet(name, j)


def sample_point(system, probability, rng=None, retries=SAMPLE_RETRIES):
    """Random solution of a prolonged system, exact over QQ.

    Draws integer values in [1, R(probability)] for parameters, initial
    states, and input jets; the remaining jets follow by forward
    substitution, so the assignment satisfies every prolonged equation
    exactly.  Resamples when a denominator vanishes.
    """
    model = system.model
    orders = system.orders
    rng = rng or random.Random()
    R = sampling_range(model, orders, probability)
    max_order = max(orders.values()) if orders else 0
    for _ in range(retries):
        point = {name: rng.randint(1, R) for name in model.states + model.params}
        input_jets = {
            u: [rng.randint(1, R) for _ in range(max_order + 1)] for u in model.inputs
        }
        try:
            traj = propagate(model, point, input_jets, max_order, domain=None)
        except DegeneratePoint:
            continue
        return SamplePoint(point, input_jets, traj, orders, R)
    raise DegeneratePoint("could not sample a nondegenerate point")


def replicate(model, copies):
    """Model made of ``copies`` copies sharing parameters.

    States and outputs are copy-indexed; inputs are independent per
    copy (each experiment may use its own stimulus); parameters are
    shared.  One copy returns the model unchanged.
    """
    if copies == 1:
        return model
    taken = set(model.states + model.params + model.inputs + model.outputs)

    def dup(name, i):
        cand = f"{name}_r{i}"
        while cand in taken:
            cand = cand + "x"
        return cand

    states = []
    outputs = []
    inputs = []
    odes = {}
    obs = {}
    ring_names = []
    for i in range(1, copies + 1):
        ring_names += [dup(s, i) for s in model.states]
    ring_names += list(model.params)
    for i in range(1, copies + 1):
        ring_names += [dup(u, i) for u in model.inputs]
    ring = PolyRing(tuple(ring_names), QQ, TermOrder.degrevlex())
    for i in range(1, copies + 1):
        rename = {s: dup(s, i) for s in model.states}
        rename.update({u: dup(u, i) for u in model.inputs})
        var_map = {}
        for k, v in enumerate(model.ring.vars):
            var_map[k] = ring.index(rename.get(v, v))
        for s in model.states:
            name = dup(s, i)
            states.append(name)
            rf = model.odes[s]
            odes[name] = RatFun(
                rf.num.to_ring(ring, var_map), rf.den.to_ring(ring, var_map), reduce=False
            )
        for u in model.inputs:
            inputs.append(dup(u, i))
        for y in model.outputs:
            name = dup(y, i)
            outputs.append(name)
            rf = model.obs[y]
            obs[name] = RatFun(
                rf.num.to_ring(ring, var_map), rf.den.to_ring(ring, var_map), reduce=False
            )
    return ModelSystem(
        states=tuple(states),
        params=model.params,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        odes=odes,
        obs=obs,
        init_symbols={s: f"{s}(0)" for s in states},
        ring=ring,
        source="",
        syntax=model.syntax,
    )


# -- rank analysis -------------------------------------------------------------


def _rref(rows, p):
    """Reduced row echelon form over GF(p); returns (pivots, rref rows)."""
    mat = [list(r) for r in rows]
    cols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, p)
        mat[r] = [(x * inv) % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return pivots, mat[:r]


def _in_rowspace(rref_rows, pivots, vec, p):
    v = list(vec)
    for row, c in zip(rref_rows, pivots):
        if v[c]:
            f = v[c]
            v = [(a - f * b) % p for a, b in zip(v, row)]
    return not any(v)


class JetJacobian:
    """Jacobian of output jets with respect to initial states and
    parameters, evaluated modulo p at the sampled point."""

    def __init__(self, model, point, input_jets, max_order, p):
        self.model = model
        self.p = p
        self.cols = list(model.states) + list(model.params)
        self.max_order = max_order
        self.col_series = {}
        for v in self.cols:
            _, dys = propagate_dual(model, point, input_jets, max_order, v, domain=p)
            self.col_series[v] = dys

    def rows(self, orders):
        """Matrix rows for output jets up to the given per-output orders,
        as (output, j, vector) triples, ordered by j then output."""
        out = []
        fact = [1]
        for j in range(1, self.max_order + 1):
            fact.append(fact[-1] * j % self.p)
        for j in range(max(orders.values()) + 1):
            for y in self.model.outputs:
                if j <= orders[y]:
                    vec = [
                        self.col_series[v][y][j] * fact[j] % self.p for v in self.cols
                    ]
                    out.append((y, j, vec))
        return out


def local_rank_analysis(jac, orders):
    """(rank, per-symbol locally-identifiable verdicts, rref state)."""
    rows = [vec for _, _, vec in jac.rows(orders)]
    pivots, rref = _rref(rows, jac.p)
    verdicts = {}
    for idx, name in enumerate(jac.cols):
        e = [0] * len(jac.cols)
        e[idx] = 1
        verdicts[name] = _in_rowspace(rref, pivots, e, jac.p)
    return len(pivots), verdicts, (pivots, rref)


def select_profile(jac, orders, full_rank):
    """Smallest per-output truncation orders whose rows already reach the
    full Jacobian rank, scanning derivatives in increasing order."""
    rows = jac.rows(orders)
    profile = {y: 0 for y in jac.model.outputs}
    taken = []
    rank = 0
    pivots, rref = [], []
    for y, j, vec in rows:
        taken.append(vec)
        new_pivots, new_rref = _rref(taken, jac.p)
        if len(new_pivots) > rank:
            rank = len(new_pivots)
            profile[y] = max(profile[y], j)
            pivots, rref = new_pivots, new_rref
            if rank == full_rank:
                break
    return profile


# -- solution counting ---------------------------------------------------------


def _specialized_system(model, orders, point_mod, input_jets, traj, p):
    """Cleared hat-system polynomials over GF(p) in (states, params, z),
    with output and input jets replaced by their sampled values."""
    system = prolong(model, orders)
    values = {}
    for (y, j) in system.output_exprs:
        values[jet_name(y, j)] = traj.output_jet(y, j)
    max_order = max(orders.values()) if orders else 0
    for u in model.inputs:
        jets = input_jets[u]
        for j in range(max_order + 1):
            values[jet_name(u, j)] = jets[j] if j < len(jets) else 0
    target = PolyRing(
        model.states + model.params + (SAT_VAR,), p, TermOrder.degrevlex()
    )
    eqs = []
    for _, _, eq in system.equations:
        s = eq.specialize(values, target)
        if not s.is_zero():
            eqs.append(s)
    sat = system.saturation.specialize(values, target)
    if not sat.is_zero():
        eqs.append(sat)
    return eqs, target


def _count_solutions_for(symbol, gb, sampled_value, p, budget):
    """(count, kind) for one symbol against the specialized basis."""
    ring = gb.ring
    probe = ring.var(symbol) - ring.const(sampled_value)
    if normal_form(probe, gb, budget).is_zero():
        return 1, "global"
    rel = algebraic_relation(symbol, gb, MAX_SOLUTION_DEGREE, budget)
    if rel is None:
        return None, "undetermined"
    k = distinct_root_count(rel)
    if k == 1:
        return 1, "global"
    return k, "local"


@dataclass
class AssessmentTrace:
    """Diagnostic record of one assess() run (orders, profile, prime, range)."""

    orders: dict = field(default_factory=dict)
    profile: dict = field(default_factory=dict)
    gb_orders: dict = field(default_factory=dict)
    prime: int = 0
    range: int = 0
    rank: int = 0
    escalations: int = 0


def assess(model, options=None, seed=0, budget=None, trace=None, log=None):
    """Classify queried symbols as globally / locally / non-identifiable.

    Queried symbols: all parameters, plus initial conditions when
    running a single copy and the options ask for them.  Initial
    conditions are reported through their display symbols (``x1(0)``).
    """
    options = options or AnalysisOptions()
    budget = budget or Budget(max_steps=10_000_000)
    rng = random.Random(seed)
    log = log or (lambda msg: None)

    work = replicate(model, options.copies)
    orders = default_orders(work)
    max_order = max(orders.values())
    R = sampling_range(work, orders, options.probability)
    prime = PRIMES[rng.randrange(len(PRIMES))]

    query_states = options.copies == 1 and options.query_initial_conditions
    queried = list(work.params) + (list(work.states) if query_states else [])

    # sample until the modular trajectory is clean
    point = input_jets = traj = None
    for attempt in range(SAMPLE_RETRIES):
        cand = {name: rng.randint(1, R) for name in work.states + work.params}
        cand_inputs = {
            u: [rng.randint(1, R) for _ in range(max_order + 2)] for u in work.inputs
        }
        try:
            traj = propagate(work, cand, cand_inputs, max_order + 1, domain=prime)
        except DegeneratePoint:
            prime = PRIMES[rng.randrange(len(PRIMES))]
            continue
        point, input_jets = cand, cand_inputs
        break
    if traj is None:
        raise DegeneratePoint("no usable sample after retries")
    log(f"sampled point in [1, {R}] modulo prime {prime}")

    jac = JetJacobian(work, point, input_jets, max_order + 1, prime)
    rank, local_ok, _ = local_rank_analysis(jac, orders)
    log(f"jet Jacobian rank {rank} at truncation orders {orders}")

    # stabilization re-check: bump every order by one; a verdict change
    # means the truncation was too tight, so escalate and redo
    escalations = 0
    bumped = {y: orders[y] + 1 for y in orders}
    rank2, local_ok2, _ = local_rank_analysis(jac, bumped)
    while (rank2, local_ok2) != (rank, local_ok):
        escalations += 1
        if escalations > 3:
            raise ResourceLimit("identifiability ranks failed to stabilize")
        orders = bumped
        rank, local_ok = rank2, local_ok2
        max_order = max(orders.values())
        traj = propagate(work, point, input_jets, max_order + 1, domain=prime)
        jac = JetJacobian(work, point, input_jets, max_order + 1, prime)
        bumped = {y: orders[y] + 1 for y in orders}
        rank2, local_ok2, _ = local_rank_analysis(jac, bumped)

    non_identifiable = [s for s in queried if not local_ok.get(s, False)]
    locally = [s for s in queried if local_ok.get(s, False)]

    globally = []
    locally_strict = []
    undetermined = []
    counts = {}

    if options.check_local_global and locally:
        profile = select_profile(jac, orders, rank)

        def counts_at(gb_orders):
            eqs, _ = _specialized_system(work, gb_orders, point, input_jets, traj, prime)
            gb = groebner(eqs, budget=budget)
            return {
                s: _count_solutions_for(s, gb, point[s], prime, budget) for s in locally
            }

        # start just past the rank-stabilizing profile and escalate until
        # the per-symbol counts agree at two consecutive orders; the
        # policy bound (states + parameters) caps the search and is
        # accepted as-is when reached
        def settled(res, nxt):
            if any(kind == "undetermined" for _, kind in res.values()):
                return False
            return res == nxt

        cap = {y: orders[y] for y in work.outputs}
        gb_orders = {y: min(profile[y] + 1, cap[y]) for y in work.outputs}
        log(f"solution-count stage starting at truncation orders {gb_orders}")
        results = counts_at(gb_orders)
        while any(gb_orders[y] < cap[y] for y in gb_orders):
            bumped_orders = {y: min(gb_orders[y] + 1, cap[y]) for y in gb_orders}
            next_results = counts_at(bumped_orders)
            if settled(results, next_results):
                break
            log(f"counts changed; escalating truncation to {bumped_orders}")
            gb_orders = bumped_orders
            results = next_results
        for s in locally:
            count, kind = results[s]
            if kind == "global":
                globally.append(s)
                counts[s] = 1
            elif kind == "local":
                locally_strict.append(s)
                counts[s] = count
            else:
                undetermined.append(s)
        if trace is not None:
            trace.profile = dict(profile)
            trace.gb_orders = dict(gb_orders)
    else:
        locally_strict = list(locally)

    if trace is not None:
        trace.orders = dict(orders)
        trace.prime = prime
        trace.range = R
        trace.rank = rank
        trace.escalations = escalations

    display = _display_names(work)
    return IdentReport(
        globally=[display[s] for s in globally],
        locally_not_globally=[display[s] for s in locally_strict],
        non_identifiable=[display[s] for s in non_identifiable],
        undetermined=[display[s] for s in undetermined],
        num_solutions={display[s]: c for s, c in counts.items()},
        probability=options.probability,
        copies=options.copies,
    )


def _display_names(model):
    names = {p: p for p in model.params}
    names.update(model.init_symbols)
    return names
