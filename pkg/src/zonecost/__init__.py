"""Optimal-cost reachability for weighted timed automata over priced zones."""

from .dbm import Bound, Facet, Zone, inf_affine, sup_affine
from .explorer import Config, Stats, SymbolicState, Verdict, explore, extract_witness, symbolic_post
from .inclusion import (
    clock_preorder,
    facet_reduce,
    includes,
    restrict_y,
    s_value,
    simple_includes,
    unpriced_m_inclusion,
)
from .model import (
    Atom,
    Automaton,
    Edge,
    Location,
    Network,
    Run,
    compose,
    evaluate_run,
    max_constants,
    parse_model,
    serialize_model,
)
from .oracle import build_corner_point, corner_point_cost, optimal_cost_cp
from .priced import (
    AffineCost,
    PricedZone,
    add_weight,
    constrain,
    delay_successors,
    evaluate,
    is_lower_bounded,
    mincost,
    reset_successors,
)

__all__ = [
    "AffineCost",
    "Atom",
    "Automaton",
    "Bound",
    "Config",
    "Edge",
    "Facet",
    "Location",
    "Network",
    "PricedZone",
    "Run",
    "Stats",
    "SymbolicState",
    "Verdict",
    "Zone",
    "add_weight",
    "build_corner_point",
    "clock_preorder",
    "compose",
    "constrain",
    "corner_point_cost",
    "delay_successors",
    "evaluate",
    "evaluate_run",
    "explore",
    "extract_witness",
    "facet_reduce",
    "includes",
    "inf_affine",
    "is_lower_bounded",
    "max_constants",
    "mincost",
    "optimal_cost_cp",
    "parse_model",
    "reset_successors",
    "restrict_y",
    "s_value",
    "serialize_model",
    "simple_includes",
    "sup_affine",
    "symbolic_post",
    "unpriced_m_inclusion",
]
