"""Analysis oracles for checking the peeling procedure against a layering.

Everything here works on a fixed family of sampled neighbor multisets
``S(v)``, one per vertex, drawn up front. ``run_all_levels`` replays the real
peeling procedure on those sets; ``downward_peel_oracle`` computes the
idealized variant that prunes exactly the upward samples of each vertex. The
two can then be compared vertex by vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from arbest.exact import LayerConstants, Layering, exact_layering
from arbest.graph import Graph, QueryOracle, draw_indices
from arbest.peeling import PeelConfig, PeelMemo, peel_vertex

SampledSets = Mapping[int, Sequence[int]]


def layer_constants_for(config: PeelConfig, slack=3) -> LayerConstants:
    """Layer thresholds matching ``config``: ``L_0`` is exactly the set of
    vertices the peeling procedure peels at level 0."""
    return LayerConstants.of(config.c0 * config.L * config.L, slack)


def layering_for(graph: Graph, config: PeelConfig, slack=3) -> Layering:
    return exact_layering(graph, config.alpha, layer_constants_for(config, slack))


def draw_sampled_sets(graph: Graph, config: PeelConfig, rng: np.random.Generator) -> dict[int, tuple[int, ...]]:
    """S(v) for every vertex: ``q_1(v)`` uniform neighbor draws, or nothing
    when v is light enough to be peeled at level 0."""
    out = {}
    thr = config.degree_threshold_int
    for v in range(graph.n):
        d = graph.degree(v)
        if d <= thr:
            out[v] = ()
            continue
        idx = draw_indices(rng, d, config.sample_count(d))
        row = graph.neighbors(v)
        out[v] = tuple(row[i - 1] for i in idx.tolist())
    return out


class FixedSampleOracle(QueryOracle):
    """Oracle whose neighbor samples come from a preset ``S(v)`` family."""

    def __init__(self, graph: Graph, sampled_sets: SampledSets, budget: int | None = None):
        super().__init__(graph, seed=0, budget=budget)
        self.sampled_sets = sampled_sets

    def sample_neighbors(self, v: int, k: int) -> list[int]:
        sample = list(self.sampled_sets.get(v, ()))
        if len(sample) != k:
            raise ValueError(f"preset S({v}) has {len(sample)} entries, {k} requested")
        for u in sample:
            if not self.graph.has_edge(v, u):
                raise ValueError(f"preset S({v}) contains non-neighbor {u}")
        self._charge(k)
        self.neighbor_queries += k
        return sample


def run_all_levels(graph: Graph, config: PeelConfig, sampled_sets: SampledSets,
                   instrument: bool = False) -> PeelMemo:
    """Run ``peel_vertex(v, j)`` for every vertex and every level 0..ell."""
    memo = PeelMemo(instrument=instrument)
    oracle = FixedSampleOracle(graph, sampled_sets)
    for j in range(config.ell + 1):
        for v in range(graph.n):
            if v not in memo.peeled and memo.level.get(v, -1) == j - 1:
                peel_vertex(memo, oracle, config, v, j)
    return memo


@dataclass
class DownwardResult:
    q: dict[int, list[int]]
    slots: dict[tuple[int, int], list[tuple[int, int]]]
    peeled: dict[int, int]

    def qval(self, v: int, j: int) -> int:
        lst = self.q[v]
        return lst[j] if j < len(lst) else 0

    def peeled_upto(self, j: int) -> set[int]:
        return {v for v, p in self.peeled.items() if p <= j}


def downward_peel_oracle(graph: Graph, config: PeelConfig, sampled_sets: SampledSets,
                         layering: Layering | None = None) -> DownwardResult:
    """Costs and peel levels of the idealized downward procedure.

    A vertex in ``L_i`` keeps, at level 1, only its samples in layers
    ``1..i-1``; afterwards slots are dropped only when their vertex peels.
    Unassigned vertices count as lying above every layer.
    """
    if layering is None:
        layering = layering_for(graph, config)
    index = layering.layer_index()
    top = len(layering.layers)
    n = graph.n
    q = {v: [1] for v in range(n)}
    slots: dict[tuple[int, int], list[tuple[int, int]]] = {}
    peeled: dict[int, int] = {}

    def qv(u: int, j: int) -> int:
        lst = q[u]
        return lst[j] if j < len(lst) else 0

    for v in range(n):
        if index.get(v, top) == 0:
            q[v].append(0)
            peeled[v] = 0
        else:
            q[v].append(len(sampled_sets[v]))

    for j in range(1, config.ell + 1):
        costs_now = {v: qv(v, j) for v in range(n)}
        for v in range(n):
            if v in peeled:
                continue
            if j == 1:
                i = index.get(v, top)
                keep = [(u, s) for s, u in enumerate(sampled_sets[v]) if 0 < index.get(u, top) < i]
            else:
                keep = [(u, s) for u, s in slots[(v, j - 1)] if costs_now[u] > 0]
            slots[(v, j)] = keep
            if len(keep) <= config.tau_int[j]:
                q[v].append(0)
                peeled[v] = j
            else:
                q[v].append(sum(costs_now[u] for u, _ in keep))
    return DownwardResult(q, slots, peeled)


@dataclass
class SamplingEventReport:
    holds: bool
    mode: str
    bound: object
    violations: dict[int, int] = field(default_factory=dict)


def check_sampling_event(graph: Graph, config: PeelConfig, sampled_sets: SampledSets,
                         layering: Layering | None = None, core=None,
                         strict: bool = False) -> SamplingEventReport:
    """Evaluate the sampling event on ``sampled_sets``.

    Without ``core``: every assigned ``v`` in ``L_i`` has at most ``ce*L``
    samples (counted with multiplicity) in ``L_{>=i}``, unassigned vertices
    counting as above all layers. With ``core``: every core vertex has at
    least ``ct*L^2`` samples inside the core (more than, when ``strict``).
    Violating vertices are reported with their counts.
    """
    bad: dict[int, int] = {}
    if core is not None:
        core = set(core)
        bound = config.dense_bound
        for v in sorted(core):
            c = sum(1 for u in sampled_sets.get(v, ()) if u in core)
            if c < bound or (strict and c == bound):
                bad[v] = c
        return SamplingEventReport(not bad, "dense", bound, bad)
    if layering is None:
        layering = layering_for(graph, config)
    index = layering.layer_index()
    top = len(layering.layers)
    bound = config.upward_bound
    for v, i in sorted(index.items()):
        c = sum(1 for u in sampled_sets.get(v, ()) if index.get(u, top) >= i)
        if c > bound:
            bad[v] = c
    return SamplingEventReport(not bad, "upward", bound, bad)


def sigma_statistic(sampled_sets: SampledSets, layering: Layering, u: int) -> int:
    """Number of vertices in u's layer or above whose S(v) contains u.

    A vertex v is counted once even when u occurs in S(v) several times.
    """
    index = layering.layer_index()
    if u not in index:
        raise ValueError(f"vertex {u} is not assigned to any layer")
    k = index[u]
    return sum(1 for v, s in sampled_sets.items() if index.get(v, -1) >= k and u in s)
