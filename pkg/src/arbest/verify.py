"""Named invariant checks over a small seeded corpus.

Each check returns a list of violation messages; an empty list is a pass.
``run_suite`` runs all of them (or a chosen subset) and reports by name.
"""

from __future__ import annotations

import itertools
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from arbest.analysis import (
    check_sampling_event,
    downward_peel_oracle,
    draw_sampled_sets,
    layering_for,
    run_all_levels,
)
from arbest.bench import emit_csv, read_csv, run_record
from arbest.estimate import estimate_arboricity, halving_sequence
from arbest.exact import (
    LayerConstants,
    arboricity_bruteforce,
    degeneracy,
    dense_core,
    exact_layering,
    layer_count_bound,
)
from arbest.generators import GraphFamilySpec, generate
from arbest.graph import Graph, QueryOracle, read_edge_list, write_edge_list
from arbest.peeling import PeelConfig, PeelMemo, PeelRun, peel
from arbest.streaming import EdgeStream, QueryBatch, pass_bound, run_peel_streaming, stream_degrees, SPACE_FACTOR


def small_config(n: int, alpha=1, **kw) -> PeelConfig:
    """Scaled coefficients with a short recursion, so that graphs of a few
    hundred vertices reach levels beyond 0."""
    kw.setdefault("L", 2)
    kw.setdefault("ell", 3)
    return PeelConfig.scaled(n, alpha, **kw)


def corpus(seed: int = 0) -> list[tuple[GraphFamilySpec, Graph]]:
    specs = [
        GraphFamilySpec("forest", {"n": 150, "trees": 3}, seed),
        GraphFamilySpec("clique-plus-isolated", {"n": 80, "s": 20}, seed),
        GraphFamilySpec("layered", {"alpha": 2, "rho": 9, "depth": 2, "top": 2}, seed),
        GraphFamilySpec("planted-core", {"n": 150, "beta": 15}, seed),
        GraphFamilySpec("uniform-random", {"n": 120, "m": 600}, seed),
    ]
    return [(s, generate(s)) for s in specs]


def _random_small_graph(rng: np.random.Generator, n: int) -> Graph:
    pairs = list(itertools.combinations(range(n), 2))
    keep = rng.random(len(pairs)) < rng.uniform(0.1, 0.9)
    return Graph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


# graph-core ---------------------------------------------------------------

def check_query_accounting() -> list[str]:
    out = []
    for spec, g in corpus():
        o = QueryOracle(g, seed=1)
        peel(o, small_config(g.n))
        if o.Q != o.degree_queries + o.neighbor_queries:
            out.append(f"{spec.describe()}: Q={o.Q} but {o.degree_queries}+{o.neighbor_queries} queries")
    return out


def check_sample_reproducible() -> list[str]:
    g = generate(GraphFamilySpec("clique-plus-isolated", {"n": 10, "s": 4}))
    a = QueryOracle(g, seed=5).sample_neighbors(0, 100)
    b = QueryOracle(g, seed=5).sample_neighbors(0, 100)
    return [] if a == b else ["same seed gave different samples"]


def check_clique_arboricity() -> list[str]:
    out = []
    for s in range(1, 9):
        g = generate(GraphFamilySpec("clique-plus-isolated", {"n": 10, "s": s}))
        want = -(-s // 2) if s >= 2 else 0
        got = arboricity_bruteforce(g)
        if got != want:
            out.append(f"K_{s}: arboricity {got}, expected {want}")
    return out


def check_edge_list_roundtrip() -> list[str]:
    out = []
    with tempfile.TemporaryDirectory() as d:
        for spec, g in corpus():
            path = os.path.join(d, "g.el")
            write_edge_list(g, path)
            if read_edge_list(path) != g:
                out.append(f"{spec.describe()}: round trip changed the graph")
    return out


# exact baselines ------------------------------------------------------------

def check_sandwich() -> list[str]:
    out = []
    rng = np.random.default_rng(0)
    for k in range(60):
        g = _random_small_graph(rng, int(rng.integers(2, 9)))
        a, d = arboricity_bruteforce(g), degeneracy(g)
        if not a <= d <= 2 * a:
            out.append(f"graph #{k}: arb={a} degen={d}")
    return out


def check_core_witness() -> list[str]:
    out = []
    for spec, g in corpus():
        d = degeneracy(g)
        if d >= 1 and not dense_core(g, d).core:
            out.append(f"{spec.describe()}: empty core at beta=degeneracy={d}")
    return out


def check_layering_deterministic() -> list[str]:
    out = []
    for spec, g in corpus():
        c = LayerConstants.of(4)
        if exact_layering(g, 2, c) != exact_layering(g, 2, c):
            out.append(f"{spec.describe()}: layering differs between runs")
    return out


def check_layering_bound() -> list[str]:
    out = []
    for spec, g in corpus():
        alpha = max(1, arboricity_bruteforce(g) if g.n <= 16 else degeneracy(g))
        lay = exact_layering(g, alpha)
        if lay.unassigned or len(lay.layers) > layer_count_bound(g.n):
            out.append(f"{spec.describe()}: {len(lay.unassigned)} unassigned, {len(lay.layers)} layers")
    return out


# estimator ------------------------------------------------------------------

def _instrumented_runs():
    for spec, g in corpus():
        for alpha in (1, 2):
            cfg = small_config(g.n, alpha)
            memo = PeelMemo(instrument=True)
            oracle = QueryOracle(g, seed=spec.seed + alpha)
            d = PeelRun(oracle, cfg, memo=memo).run()
            yield spec, g, cfg, memo, d


def check_cost_bound() -> list[str]:
    out = []
    for spec, g, cfg, memo, d in _instrumented_runs():
        for v, j, delta, qj in memo.cost_log:
            if delta > 2 * qj:
                out.append(f"{spec.describe()}: call ({v},{j}) spent {delta} > 2*{qj}")
    return out


def check_budget_overshoot() -> list[str]:
    out = []
    for spec, g, cfg, memo, d in _instrumented_runs():
        if d.queries_used > 2 * cfg.budget:
            out.append(f"{spec.describe()}: Q={d.queries_used} > 2*cb*t={2 * cfg.budget}")
    return out


def check_absorbing() -> list[str]:
    out = []
    for spec, g, cfg, memo, d in _instrumented_runs():
        for v, j in memo.write_log:
            if v in memo.peeled and j > memo.peeled[v]:
                out.append(f"{spec.describe()}: vertex {v} written at level {j} after peeling")
        for v, p in memo.peeled.items():
            if any(memo.qval(v, k) for k in range(p + 1, cfg.ell + 2)):
                out.append(f"{spec.describe()}: vertex {v} has cost after peeling")
    return out


def check_memoization() -> list[str]:
    out = []
    for spec, g, cfg, memo, d in _instrumented_runs():
        for key, c in memo.executions.items():
            if c > 1:
                out.append(f"{spec.describe()}: body {key} ran {c} times")
    return out


# n for which ell = 2L, so tau(ell) = 0 under both coefficient sets
TAU_ZERO_AT_ELL = frozenset({2, 4, 8})


def check_tau_monotone() -> list[str]:
    out = []
    for n in itertools.chain(range(4, 4097), (10 ** 5, 10 ** 6)):
        cfg = PeelConfig.paper(n)
        taus = [cfg.tau(j) for j in range(cfg.ell + 1)]
        if any(a <= b for a, b in zip(taus, taus[1:])):
            out.append(f"n={n}: tau not strictly decreasing")
        nonpositive = min(taus) <= 0
        if nonpositive != (n in TAU_ZERO_AT_ELL):
            out.append(f"n={n}: min tau = {min(taus)}")
    return out


def _event_instances(limit_draws: int = 300):
    for spec, g in corpus():
        cfg = small_config(g.n)
        lay = layering_for(g, cfg)
        if not lay.complete:
            continue
        rng = np.random.default_rng(spec.seed)
        for _ in range(limit_draws):
            sets = draw_sampled_sets(g, cfg, rng)
            if check_sampling_event(g, cfg, sets, lay).holds:
                yield spec, g, cfg, lay, sets
                break


def check_downward(which: str) -> list[str]:
    out = []
    for spec, g, cfg, lay, sets in _event_instances():
        memo = run_all_levels(g, cfg, sets)
        dw = downward_peel_oracle(g, cfg, sets, lay)
        if which == "dominance":
            for v in range(g.n):
                for j in range(cfg.ell + 2):
                    if memo.qval(v, j) > dw.qval(v, j):
                        out.append(f"{spec.describe()}: q_{j}({v})={memo.qval(v, j)} > {dw.qval(v, j)}")
        elif which == "containment":
            for j in range(cfg.ell + 1):
                extra = dw.peeled_upto(j) - memo.peeled_upto(j)
                if extra:
                    out.append(f"{spec.describe()}: level {j}: {sorted(extra)[:5]} peeled only downward")
        else:
            for v, i in lay.layer_index().items():
                if i <= cfg.ell and not (v in memo.peeled and memo.peeled[v] <= i):
                    out.append(f"{spec.describe()}: vertex {v} of layer {i} not peeled by level {i}")
    return out


def check_dense_survival() -> list[str]:
    out = []
    for spec in (GraphFamilySpec("clique-plus-isolated", {"n": 60, "s": 30}),
                 GraphFamilySpec("uniform-random", {"n": 60, "m": 900}, 1)):
        g = generate(spec)
        cfg = small_config(g.n, 1, c0=1, cs=Fraction(1, 4))
        core = dense_core(g, 20).core
        rng = np.random.default_rng(0)
        for _ in range(20):
            sets = draw_sampled_sets(g, cfg, rng)
            if not check_sampling_event(g, cfg, sets, core=core, strict=True).holds:
                continue
            memo = run_all_levels(g, cfg, sets)
            for v in core:
                if v in memo.peeled:
                    out.append(f"{spec.describe()}: core vertex {v} peeled at {memo.peeled[v]}")
    return out


def check_estimate_shape() -> list[str]:
    out = []
    for spec, g in corpus():
        rep = estimate_arboricity(g, g.n, small_config(g.n), seed=3)
        seq = halving_sequence(g.n)
        if rep.alpha_hat not in seq:
            out.append(f"{spec.describe()}: alpha_hat {rep.alpha_hat} not in halving sequence")
        verdicts = [t.verdict.value for t in rep.trace]
        if "No" in verdicts[:-1]:
            out.append(f"{spec.describe()}: search continued after a No")
        if verdicts and verdicts[-1] == "No" and rep.alpha_hat != rep.trace[-1].alpha:
            out.append(f"{spec.describe()}: returned guess is not the first No")
    return out


# streaming ------------------------------------------------------------------

def _stream_runs():
    for spec, g in corpus():
        rng = np.random.default_rng(spec.seed)
        order = [tuple(e) for e in rng.permutation(np.array(g.edges(), dtype=np.int64).reshape(-1, 2)).tolist()]
        stream = EdgeStream.from_graph(g, order)
        for alpha in (1, 2):
            cfg = small_config(g.n, alpha)
            rep = run_peel_streaming(stream, cfg, rng=np.random.default_rng([7, alpha]))
            ref = peel(QueryOracle(stream.stream_graph(), rng=np.random.default_rng([7, alpha])), cfg)
            yield spec, cfg, rep, ref


def check_stream(which: str) -> list[str]:
    out = []
    for spec, cfg, rep, ref in _stream_runs():
        if which == "replay" and rep.decision != ref:
            out.append(f"{spec.describe()}: streaming decision differs from in-memory")
        if which == "passes" and rep.passes > pass_bound(cfg):
            out.append(f"{spec.describe()}: {rep.passes} passes > {pass_bound(cfg)}")
        if which == "space":
            limit = SPACE_FACTOR * cfg.cb * (rep.decision.queries_used + cfg.t)
            if rep.peak_space > limit:
                out.append(f"{spec.describe()}: peak space {rep.peak_space} > {limit}")
    return out


def check_empty_batch() -> list[str]:
    s = EdgeStream([(0, 1), (1, 2)])
    stream_degrees(s, QueryBatch())
    return [] if s.pass_count == 0 else [f"empty batch used {s.pass_count} passes"]


# cli-bench ------------------------------------------------------------------

def check_csv_determinism() -> list[str]:
    spec = GraphFamilySpec("planted-core", {"n": 150, "beta": 15}, 4)
    rows = []
    with tempfile.TemporaryDirectory() as d:
        for k in range(3):
            path = os.path.join(d, f"r{k}.csv")
            emit_csv([run_record(spec, small_config(150))], path)
            back = read_csv(path)
            rows.append([r.row()[:9] + r.row()[10:] for r in back])
    return [] if all(r == rows[0] for r in rows) else ["CSV rows differ between identical runs"]


@dataclass(frozen=True)
class Check:
    name: str
    module: str
    run: Callable[[], list[str]]


CHECKS = (
    Check("query-accounting", "graph-core", check_query_accounting),
    Check("sample-reproducible", "graph-core", check_sample_reproducible),
    Check("clique-arboricity", "graph-core", check_clique_arboricity),
    Check("edge-list-roundtrip", "graph-core", check_edge_list_roundtrip),
    Check("arboricity-degeneracy-sandwich", "exact-baselines", check_sandwich),
    Check("dense-core-witness", "exact-baselines", check_core_witness),
    Check("layering-deterministic", "exact-baselines", check_layering_deterministic),
    Check("layering-layer-bound", "exact-baselines", check_layering_bound),
    Check("query-cost-bound", "sublinear-estimator", check_cost_bound),
    Check("budget-overshoot", "sublinear-estimator", check_budget_overshoot),
    Check("absorbing-peel", "sublinear-estimator", check_absorbing),
    Check("memoization", "sublinear-estimator", check_memoization),
    Check("tau-monotone", "sublinear-estimator", check_tau_monotone),
    Check("downward-dominance", "sublinear-estimator", lambda: check_downward("dominance")),
    Check("peel-set-containment", "sublinear-estimator", lambda: check_downward("containment")),
    Check("layer-completeness", "sublinear-estimator", lambda: check_downward("completeness")),
    Check("dense-core-survival", "sublinear-estimator", check_dense_survival),
    Check("estimate-shape", "sublinear-estimator", check_estimate_shape),
    Check("stream-pass-bound", "streaming-engine", lambda: check_stream("passes")),
    Check("stream-replay-equivalence", "streaming-engine", lambda: check_stream("replay")),
    Check("stream-space-accounting", "streaming-engine", lambda: check_stream("space")),
    Check("empty-batch-zero-passes", "streaming-engine", check_empty_batch),
    Check("csv-determinism", "cli-bench", check_csv_determinism),
)


def run_suite(names=None, report=print) -> dict[str, list[str]]:
    chosen = [c for c in CHECKS if names is None or c.name in names]
    results = {}
    for c in chosen:
        problems = c.run()
        results[c.name] = problems
        status = "ok" if not problems else f"FAILED ({len(problems)})"
        report(f"{c.module:20s} {c.name:32s} {status}")
        for p in problems[:5]:
            report(f"    {p}")
    return results
