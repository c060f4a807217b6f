"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL ...`` line to the
terminal before asserting.
"""

import csv
import io
import itertools
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from arbest.analysis import (
    check_sampling_event,
    downward_peel_oracle,
    draw_sampled_sets,
    layering_for,
    run_all_levels,
)
from arbest.bench import query_scaling_report, run_grid
from arbest.estimate import estimate_arboricity
from arbest.exact import (
    LayerConstants,
    arboricity_bruteforce,
    degeneracy,
    exact_layering,
    log_three_halves_ceil,
)
from arbest.generators import GraphFamilySpec, generate
from arbest.graph import Graph, QueryOracle
from arbest.peeling import PeelConfig, PeelMemo, PeelRun, Verdict, peel, peel_with_reduced_error
from arbest.streaming import EdgeStream, pass_bound, run_peel_streaming

pytestmark = pytest.mark.slow


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def small(n, alpha=1, **kw):
    kw.setdefault("L", 2)
    kw.setdefault("ell", 3)
    return PeelConfig.scaled(n, alpha, **kw)


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph.from_edges(n, [p for i, p in enumerate(pairs) if mask >> i & 1])


def random_graph(rng, n):
    p = rng.uniform(0.05, 0.9)
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


# the planted-core grid whose query scaling is checked; frozen after a pilot
SCALING_ARBS = (8, 32, 128)
SCALING_N = 4096


def scaling_template(n):
    return PeelConfig.scaled(n, L=2, ell=3, c0=Fraction(1, 2), cs=Fraction(1, 4), cb=2)


def scaling_specs():
    return [GraphFamilySpec("planted-core", {"n": SCALING_N, "beta": 2 * a - 1}) for a in SCALING_ARBS]


def test_criterion_1_sandwich(verdict):
    start = time.perf_counter()
    bad = checked = 0
    graphs = itertools.chain.from_iterable(all_graphs(n) for n in range(1, 6))
    rng = np.random.default_rng(1)
    extra = (random_graph(rng, int(rng.integers(2, 9))) for _ in range(200))
    five = 0
    for g in itertools.chain(graphs, extra):
        a, d = arboricity_bruteforce(g), degeneracy(g)
        bad += not (a <= d <= 2 * a)
        checked += 1
        five += g.n == 5 and checked <= 1 + 2 + 8 + 64 + 1024
    took = time.perf_counter() - start
    ok = bad == 0 and five == 1024 and took < 60
    verdict(1, ok, f"{checked} graphs ({five} on 5 vertices), {bad} violations, {took:.1f}s")


def test_criterion_2_layer_completeness(verdict):
    rng = np.random.default_rng(2)
    bad = tight_bad = 0
    for _ in range(100):
        n = int(rng.integers(2, 201))
        g = Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2)
                                 if rng.random() < rng.uniform(0.01, 0.15)] if n > 1 else [])
        alpha = max(1, degeneracy(g))
        bound = log_three_halves_ceil(n) + 1
        lay = exact_layering(g, alpha, LayerConstants.paper(n))
        bad += not (lay.complete and len(lay.layers) <= bound)
        # the same bound with an L_0 threshold small enough to need many rounds
        tight = exact_layering(g, alpha, LayerConstants.of(Fraction(1, 2)))
        tight_bad += not (tight.complete and len(tight.layers) <= bound)
    verdict(2, bad == 0 and tight_bad == 0,
            f"100 graphs, {bad} violations (full constants), {tight_bad} (tight L_0)")


def test_criterion_3_query_cost(verdict):
    completions = bad = 0
    specs = [
        GraphFamilySpec("uniform-random", {"n": 200, "m": 1500}, 1),
        GraphFamilySpec("planted-core", {"n": 300, "beta": 40}, 2),
        GraphFamilySpec("clique-plus-isolated", {"n": 300, "s": 60}, 0),
        GraphFamilySpec("layered", {"alpha": 2, "rho": 9, "depth": 2, "top": 2}, 0),
        GraphFamilySpec("forest", {"n": 300}, 3),
    ]
    for spec in specs:
        g = generate(spec)
        for seed in range(10):
            memo = PeelMemo(instrument=True)
            PeelRun(QueryOracle(g, seed=seed), small(g.n), memo=memo).run()
            for _, _, delta, qj in memo.cost_log:
                completions += 1
                bad += delta > 2 * qj
    verdict(3, completions >= 1000 and bad == 0, f"{completions} completions, {bad} violations")


def test_criterion_4_budget(verdict):
    runs = bad = 0
    grid = [(s, scaling_template) for s in scaling_specs()]
    grid += [(GraphFamilySpec("clique-plus-isolated", {"n": 2048, "s": s}), PeelConfig.scaled)
             for s in (64, 128, 256)]
    grid += [(GraphFamilySpec("uniform-random", {"n": 300, "m": 4000}), lambda n: small(n, cb=1))]
    for spec, make in grid:
        for k in range(20):
            g = generate(GraphFamilySpec(spec.family, spec.params, k))
            rep = estimate_arboricity(g, g.n, make(g.n), seed=k)
            for rec in rep.trace:
                for q in rec.trial_queries:
                    runs += 1
                    bad += q > 2 * rec.budget
    verdict(4, runs > 0 and bad == 0, f"{runs} peel runs over the bench grid, {bad} with Q > 2*cb*t")


def test_criterion_5_downward_dominance(verdict):
    cases = [
        (GraphFamilySpec("layered", {"alpha": 2, "rho": 9, "depth": 2, "top": 2}), 1, {}),
        (GraphFamilySpec("layered", {"alpha": 2, "rho": 4, "depth": 3, "top": 2}), 1, {"c0": 1}),
        (GraphFamilySpec("uniform-random", {"n": 120, "m": 600}, 1), 1, {"c0": 4}),
        (GraphFamilySpec("uniform-random", {"n": 100, "m": 900}, 1), 2, {}),
        (GraphFamilySpec("forest", {"n": 150, "trees": 2}, 1), 1, {}),
    ]
    instances = bad = 0
    rng = np.random.default_rng(5)
    for spec, alpha, kw in cases:
        g = generate(spec)
        assert g.n <= 200
        cfg = small(g.n, alpha, **kw)
        lay = layering_for(g, cfg)
        assert lay.complete
        hits = 0
        for _ in range(500):
            sets = draw_sampled_sets(g, cfg, rng)
            if not check_sampling_event(g, cfg, sets, lay).holds:
                continue
            hits += 1
            memo = run_all_levels(g, cfg, sets)
            dw = downward_peel_oracle(g, cfg, sets, lay)
            for v in range(g.n):
                for j in range(cfg.ell + 2):
                    bad += memo.qval(v, j) > dw.qval(v, j)
            for j in range(cfg.ell + 1):
                bad += not dw.peeled_upto(j) <= memo.peeled_upto(j)
            if hits == 12:
                break
        instances += hits
    verdict(5, instances >= 50 and bad == 0, f"{instances} instances with the sampling event, {bad} violations")


def test_criterion_6_forests(verdict):
    start = time.perf_counter()
    cfg = PeelConfig.paper(4096, 1)
    bad = 0
    for seed in range(50):
        g = generate(GraphFamilySpec("forest", {"n": 4096}, seed))
        d = peel(QueryOracle(g, seed=seed), cfg)
        bad += not (d.verdict is Verdict.YES and d.queries_used == cfg.t)
    took = time.perf_counter() - start
    verdict(6, bad == 0 and took < 10, f"50 forests, t={cfg.t}, {bad} failures, {took:.1f}s")


def test_criterion_7_soundness(verdict):
    start = time.perf_counter()
    n, s = 2048, 256
    guess = Fraction(1, 2)
    cfg = PeelConfig.scaled(n, guess)
    assert s > cfg.c0 * cfg.L ** 2 * guess
    g = generate(GraphFamilySpec("clique-plus-isolated", {"n": n, "s": s}))
    nos = sum(not peel_with_reduced_error(g, cfg, seed=k).yes for k in range(20))
    took = time.perf_counter() - start
    verdict(7, nos >= 18 and took < 120, f"{nos}/20 No at guess {guess}, {took:.1f}s")


def test_criterion_8_estimate_sandwich(verdict):
    start = time.perf_counter()
    n, s = 2048, 256
    arb = -(-s // 2)
    cfg = PeelConfig.scaled(n)
    rho = cfg.c0 * cfg.L ** 2
    g = generate(GraphFamilySpec("clique-plus-isolated", {"n": n, "s": s}))
    hats = [estimate_arboricity(g, n, cfg, seed=k).alpha_hat for k in range(20)]
    good = sum(Fraction(arb) / (2 * rho) <= a <= arb for a in hats)
    took = time.perf_counter() - start
    verdict(8, good >= 18 and took < 300,
            f"{good}/20 within [{arb}/{2 * rho}, {arb}], estimates {sorted(set(hats))}, {took:.1f}s")


def test_criterion_9_query_scaling(verdict):
    recs = run_grid(scaling_specs(), 20, 0, template_for=scaling_template)
    rep = query_scaling_report(recs)
    ok = rep.medians_decreasing() and rep.band <= 4 and not rep.flagged
    meds = [r.median_queries for r in rep.rows]
    verdict(9, ok, f"medians {meds}, band {rep.band:.2f}")


def test_criterion_10_stream_replay(verdict):
    corpus = [
        (GraphFamilySpec("clique-plus-isolated", {"n": 400, "s": 60}), 1, {}),
        (GraphFamilySpec("uniform-random", {"n": 300, "m": 3000}), 2, {}),
        (GraphFamilySpec("planted-core", {"n": 500, "beta": 30}), 4, {"cs": Fraction(1, 2)}),
        (GraphFamilySpec("forest", {"n": 300, "trees": 4}), 1, {}),
        (GraphFamilySpec("layered", {"alpha": 2, "rho": 9, "depth": 2, "top": 2}), 1, {}),
    ]
    runs = bad = 0
    for spec, alpha, kw in corpus:
        for k in range(10):
            g = generate(GraphFamilySpec(spec.family, spec.params, k))
            edges = g.edges()
            np.random.default_rng(k).shuffle(edges)
            stream = EdgeStream(edges, n=g.n)
            cfg = small(g.n, alpha, **kw)
            rep = run_peel_streaming(stream, cfg, rng=k)
            want = peel(QueryOracle(stream.stream_graph(), rng=np.random.default_rng(k)), cfg)
            same = (rep.decision.verdict == want.verdict and rep.decision.queries_used == want.queries_used
                    and rep.decision.survivors == want.survivors)
            within = rep.passes <= min(pass_bound(cfg), 2 * log_three_halves_ceil(g.n) + 2)
            bad += not (same and within)
            runs += 1
    verdict(10, runs == 50 and bad == 0, f"{runs} runs, {bad} mismatches or pass overruns")


def test_criterion_11_cli_determinism(verdict, tmp_path):
    argv = [sys.executable, "-m", "arbest", "bench", "--family", "planted-core", "--n", "512",
            "--beta", "7,31", "--trials", "2", "--coeff", "L=2", "--coeff", "ell=3", "--seed", "5"]

    def rows(i, engine):
        out = tmp_path / f"run{i}-{engine}.csv"
        subprocess.run(argv + ["--engine", engine, "--out", str(out)], check=True, capture_output=True)
        reader = csv.DictReader(io.StringIO(out.read_text()))
        return [tuple(v for k, v in r.items() if k != "wall_ms") for r in reader]

    base = {e: rows(0, e) for e in ("memory", "stream")}
    diffs = 0
    for i in range(1, 21):
        engine = "memory" if i % 2 else "stream"
        diffs += rows(i, engine) != base[engine]
    ok = diffs == 0 and all(len(v) == 4 for v in base.values())
    verdict(11, ok, f"20 repeats, {diffs} differing CSVs")
