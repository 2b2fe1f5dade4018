from __future__ import annotations

import random
import time
from pathlib import Path

import pytest

from zonecost.explorer import Config, explore
from zonecost.model import compose, parse_model
from zonecost.oracle import corner_point_cost

MODELS = Path(__file__).resolve().parent.parent / "models"

CORPUS_NAMES = [
    "fig2left",
    "fig2left_lax",
    "fig2right",
    "fig2right_rate1",
    "fig7",
    "ets_small",
    "als_small",
    "als_hold",
    "unreachable",
]


def load_model(name: str):
    return parse_model((MODELS / f"{name}.wta").read_text(encoding="utf-8"))


def load_automaton(name: str):
    return compose(load_model(name))


@pytest.fixture(scope="session")
def corpus():
    return {name: load_automaton(name) for name in CORPUS_NAMES}


@pytest.fixture(scope="session")
def random_models():
    """Deterministic random flat automata, filtered to desk-scale instances."""
    from grid_oracles import random_automaton

    rng = random.Random(20160211)
    models = []
    while len(models) < 200:
        a = random_automaton(rng)
        v = explore(a, Config(inclusion="abstract", strategy="bfs", iteration_cap=2500))
        if not v.terminated:
            continue
        models.append(a)
    return models


@pytest.fixture(scope="session")
def random_model_results(random_models):
    """Explorer verdicts and corner-point costs for the random corpus."""
    t0 = time.perf_counter()
    results = []
    for a in random_models:
        v = explore(a, Config(inclusion="abstract", strategy="bfs"))
        c = corner_point_cost(a, cap=300_000)
        results.append((a, v, c))
    elapsed = time.perf_counter() - t0
    return results, elapsed
