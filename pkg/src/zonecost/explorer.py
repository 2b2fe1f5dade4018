"""Forward exploration of priced zones with a parameterized inclusion test.

The loop keeps the classical Waiting/Passed pair: a popped symbolic state
updates the best goal cost, is dropped when subsumed by a stored state of the
same location, and otherwise joins Passed (kept as a per-location antichain)
while its successors join Waiting.  Strategies differ only in the pop order;
SBFS additionally replaces subsumed Waiting entries by the subsumer's
successors at their queue positions.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable

from .dbm import NEG_INF, POS_INF, Zone, inf_affine
from .inclusion import includes, simple_includes, uniform_bounds
from .model import Automaton, Run, guard_constraints, max_constants
from .priced import (
    AffineCost,
    PricedZone,
    add_weight,
    constrain,
    delay_successors,
    mincost,
    reset_successors,
)

DEFAULT_NEGATIVE_WEIGHT_CAP = 1_000_000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    inclusion: str = "abstract"  # "abstract" | "simple"
    strategy: str = "sbfs"  # "bfs" | "dfs" | "sbfs"
    pruning: bool = False
    hint: Fraction | None = None
    uniform_m: bool = False
    iteration_cap: int | None = None
    time_cap: float | None = None


@dataclass
class Stats:
    added_to_waiting: int = 0
    added_to_passed: int = 0
    max_stored: int = 0
    tests: int = 0
    successful_tests: int = 0
    wall_time: float = 0.0


@dataclass
class SymbolicState:
    location: str
    pz: PricedZone
    entry: PricedZone  # pre-delay priced zone at this location (witness anchor)
    parent: "SymbolicState | None" = None
    edge_index: int | None = None
    depth: int = 0


@dataclass
class Verdict:
    cost: Fraction | float
    terminated: bool
    stats: Stats
    witness_state: SymbolicState | None = None
    passed: dict[str, list[SymbolicState]] = field(default_factory=dict)


def _invariant_constraints(a: Automaton, location: str):
    return guard_constraints(a.location(location).invariant)


def symbolic_post(a: Automaton, s: SymbolicState) -> list[SymbolicState]:
    """Successors along every outgoing edge: guard, reset, weight, delay, invariant."""
    out: list[SymbolicState] = []
    for idx, edge in enumerate(a.edges):
        if edge.source != s.location:
            continue
        guarded = constrain(s.pz, guard_constraints(edge.guard))
        if guarded is None:
            continue
        inv = _invariant_constraints(a, edge.target)
        rate = a.location(edge.target).rate
        for piece in reset_successors(guarded, edge.resets):
            entry = constrain(add_weight(piece, edge.weight), inv)
            if entry is None:
                continue
            for delayed in delay_successors(entry, rate):
                settled = constrain(delayed, inv)
                if settled is None:
                    continue
                out.append(
                    SymbolicState(
                        location=edge.target,
                        pz=settled,
                        entry=entry,
                        parent=s,
                        edge_index=idx,
                        depth=s.depth + 1,
                    )
                )
    return out


def _initial_states(a: Automaton) -> list[SymbolicState]:
    inv = _invariant_constraints(a, a.initial)
    entry = constrain(PricedZone.initial(a.clocks), inv)
    if entry is None:
        return []
    rate = a.location(a.initial).rate
    out = []
    for delayed in delay_successors(entry, rate):
        settled = constrain(delayed, inv)
        if settled is None:
            continue
        out.append(SymbolicState(a.initial, settled, entry))
    return out


def explore(
    a: Automaton,
    cfg: Config = Config(),
    observer: Callable[[PricedZone, PricedZone, bool], None] | None = None,
    on_progress: Callable[[int, Fraction | float], None] | None = None,
) -> Verdict:
    """Optimal cost of reaching a goal location (Algorithm 1 style loop)."""
    if cfg.strategy not in ("bfs", "dfs", "sbfs"):
        raise ConfigError(f"unknown strategy '{cfg.strategy}'")
    if cfg.inclusion not in ("abstract", "simple"):
        raise ConfigError(f"unknown inclusion '{cfg.inclusion}'")
    negative = a.min_weight() < 0
    if negative and (cfg.pruning or cfg.hint is not None):
        raise ConfigError("pruning and hints are unsound with negative weights")
    cap = cfg.iteration_cap
    if negative and cap is None and cfg.time_cap is None:
        warnings.warn(
            "model has negative weights: termination is guaranteed only for "
            "cost functions with a uniform lower bound (e.g. nonnegative "
            "weights, or nonnegative cycle sums); applying a default "
            f"iteration cap of {DEFAULT_NEGATIVE_WEIGHT_CAP}",
            stacklevel=2,
        )
        cap = DEFAULT_NEGATIVE_WEIGHT_CAP

    m = max_constants(a)
    if cfg.uniform_m:
        m = uniform_bounds(m)
    if cfg.inclusion == "abstract":
        def incl(x: PricedZone, y: PricedZone) -> bool:
            return includes(x, y, m)
    else:
        incl = simple_includes

    stats = Stats()
    start = time.perf_counter()
    goals = a.goal_locations
    cost: Fraction | float = POS_INF
    best: SymbolicState | None = None
    passed: dict[str, list[SymbolicState]] = {}
    waiting: list[SymbolicState] = _initial_states(a)
    stats.added_to_waiting = len(waiting)
    stats.max_stored = len(waiting)
    prune_enabled = cfg.pruning or cfg.hint is not None
    pops = 0
    terminated = True

    def test(x: PricedZone, y: PricedZone) -> bool:
        stats.tests += 1
        r = incl(x, y)
        if r:
            stats.successful_tests += 1
        if observer is not None:
            observer(x, y, r)
        return r

    while waiting:
        if cap is not None and pops >= cap:
            terminated = False
            break
        if cfg.time_cap is not None and time.perf_counter() - start > cfg.time_cap:
            terminated = False
            break
        s = waiting.pop() if cfg.strategy == "dfs" else waiting.pop(0)
        pops += 1
        if on_progress is not None:
            on_progress(pops, cost)
        mc = mincost(s.pz)
        if s.location in goals and mc < cost:
            cost = mc
            best = s
            if cost == NEG_INF:
                break  # nothing can improve on -oo
        if prune_enabled:
            # a hint is only an upper bound, so it prunes strictly; an achieved
            # cost cannot be improved by states at or above it
            if mc >= cost or (cfg.hint is not None and mc > cfg.hint):
                continue
        store = passed.setdefault(s.location, [])
        if any(test(s.pz, p.pz) for p in store):
            continue
        store[:] = [p for p in store if not test(p.pz, s.pz)]
        store.append(s)
        stats.added_to_passed += 1
        insert_at = None
        if cfg.strategy == "sbfs":
            kept = []
            for i, w in enumerate(waiting):
                if w.location == s.location and test(w.pz, s.pz):
                    if insert_at is None:
                        insert_at = len(kept)
                    continue
                kept.append(w)
            waiting = kept
        successors = symbolic_post(a, s)
        stats.added_to_waiting += len(successors)
        if insert_at is not None:
            waiting[insert_at:insert_at] = successors
        else:
            waiting.extend(successors)
        stored = len(waiting) + sum(len(v) for v in passed.values())
        if stored > stats.max_stored:
            stats.max_stored = stored

    stats.wall_time = time.perf_counter() - start
    return Verdict(cost=cost, terminated=terminated, stats=stats,
                   witness_state=best, passed=passed)


# -- witness extraction ------------------------------------------------------------


def _pick_point(zone: Zone, cost: AffineCost, budget: Fraction) -> dict[str, Fraction]:
    """A point of the zone whose cost is within ``budget`` of the infimum."""
    value, vertex = inf_affine(zone, cost.coeff_map(), cost.const)
    assert vertex is not None and value != NEG_INF
    v = {c: Fraction(x) for c, x in vertex.items()}
    if zone.contains(v):
        return v
    interior = zone.sample_point()
    gap = cost.evaluate(interior) - cost.evaluate(v)
    lam = Fraction(1) if gap <= 0 else min(Fraction(1), budget / gap)
    return {c: v[c] + lam * (interior[c] - v[c]) for c in zone.clocks}


def _delay_interval(zone: Zone, v: dict[str, Fraction]):
    """Feasible backward delays t with v - t*1 in the zone (plus strictness flags)."""
    from .dbm import INF, bound_is_strict, bound_value

    n = len(zone.clocks) + 1
    lo, lo_strict = Fraction(0), False
    hi, hi_strict = None, False
    for c in zone.clocks:
        i = zone.idx(c)
        e = zone.m[i * n + 0]  # v[c] - t <= ub
        if e < INF:
            cand = v[c] - bound_value(e)
            if cand > lo or (cand == lo and bound_is_strict(e)):
                lo, lo_strict = cand, bound_is_strict(e)
        e = zone.m[0 * n + i]  # t <= v[c] - lb
        if e < INF:
            cand = v[c] + bound_value(e)
            if hi is None or cand < hi or (cand == hi and bound_is_strict(e)):
                hi, hi_strict = cand, bound_is_strict(e)
    if lo < 0:
        lo, lo_strict = Fraction(0), False
    assert hi is not None, "clocks are bounded below, so backward delay is bounded"
    return lo, lo_strict, hi, hi_strict


def _choose_delay(entry: PricedZone, rate: int, v: dict[str, Fraction],
                  budget: Fraction) -> Fraction:
    lo, lo_strict, hi, hi_strict = _delay_interval(entry.zone, v)
    slope = Fraction(rate) - entry.cost.diagonal_slope()
    want_lo = slope >= 0
    t, strict = (lo, lo_strict) if want_lo else (hi, hi_strict)
    if strict:
        room = (hi - lo) / 2
        shift = min(room, budget / (abs(slope) + 1))
        assert shift > 0, "degenerate strict interval"
        t = t + shift if want_lo else t - shift
    return t


def _fiber_point(parent_zone: Zone, cost: AffineCost, fixed: dict[str, Fraction],
                 budget: Fraction) -> dict[str, Fraction]:
    """Cheapest-within-budget point of the zone matching ``fixed`` coordinates."""
    d = lcm(*[f.denominator for f in fixed.values()], 1)
    scaled = parent_zone.scale(d)
    constraints = []
    for c, val in fixed.items():
        iv = int(val * d)
        constraints.append((c, None, iv, False))
        constraints.append((None, c, -iv, False))
    fiber = scaled.intersect(constraints)
    assert not fiber.is_empty, "reset fiber must meet the guarded parent zone"
    coeffs = {c: k / d for c, k in cost.coeff_map().items()}
    w = _pick_point(fiber, AffineCost.of(fiber.clocks, coeffs, cost.const), budget * 1)
    return {c: w[c] / d for c in fiber.clocks}


def extract_witness(a: Automaton, state: SymbolicState, eps: Fraction) -> Run:
    """A concrete run reaching the state's location within eps of its mincost.

    Delays are chosen backward along the recorded parent path by exact fiber
    minimization; strict bounds are approached to within the step budget.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    mc = mincost(state.pz)
    if mc == NEG_INF:
        raise ValueError("no finite witness: cost diverges to -oo")
    if mc == POS_INF:
        raise ValueError("state has no valuations")
    chain: list[SymbolicState] = []
    cur: SymbolicState | None = state
    while cur is not None:
        chain.append(cur)
        cur = cur.parent
    chain.reverse()
    budget = Fraction(eps) / (2 * len(chain) + 3)

    v = _pick_point(state.pz.zone, state.pz.cost, budget)
    delays: list[Fraction] = []
    for s in reversed(chain):
        rate = a.location(s.location).rate
        t = _choose_delay(s.entry, rate, v, budget)
        delays.append(t)
        u = {c: v[c] - t for c in v}
        if s.parent is None:
            assert all(x == 0 for x in u.values()), "root must rewind to the origin"
            break
        edge = a.edges[s.edge_index]
        guarded = s.parent.pz.zone.intersect(guard_constraints(edge.guard))
        fixed = {c: u[c] for c in a.clocks if c not in edge.resets}
        v = _fiber_point(guarded, s.parent.pz.cost, fixed, budget)
    delays.reverse()
    steps = tuple(
        (delays[i], chain[i + 1].edge_index) for i in range(len(chain) - 1)
    )
    return Run(steps=steps, trailing_delay=delays[-1])
