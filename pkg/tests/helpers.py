"""Shared helpers for the test suite: random DAGs and derivation sweeps."""

from __future__ import annotations

from random import Random

from hierkey.hierarchy import Hierarchy
from hierkey.schemes import CaState, derive_key


def random_dag(rng: Random, n: int, edge_prob: float = 0.4) -> Hierarchy:
    """Random DAG on u1..un; edges only run from lower to higher index."""
    ids = [f"u{i}" for i in range(1, n + 1)]
    edges = [
        (ids[i], ids[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < edge_prob
    ]
    return Hierarchy.build(ids, edges)


def predecessor_pairs(h: Hierarchy) -> list[tuple[str, str]]:
    """(viewer, target) over every strict-predecessor relation."""
    return [
        (v, t)
        for t in sorted(h.nodes)
        for v in sorted(h.strict_predecessors(t))
    ]


def non_predecessor_pairs(h: Hierarchy) -> list[tuple[str, str]]:
    """(viewer, target) pairs where the viewer does not dominate the target."""
    out = []
    for t in sorted(h.nodes):
        preds = h.strict_predecessors(t)
        for v in sorted(h.nodes):
            if v != t and v not in preds:
                out.append((v, t))
    return out


def assert_all_derivations_exact(state: CaState) -> None:
    for viewer, target in predecessor_pairs(state.hierarchy):
        got = derive_key(state, viewer, target)
        want = state.records[target].key
        assert got == want, (
            f"{state.scheme}: {viewer} derived {got} for {target}, stored {want}"
        )
