"""Benchmark records, CSV output and the query-scaling summary."""

from __future__ import annotations

import csv
import math
import os
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from arbest.exact import arboricity_bruteforce, degeneracy, log2_ceil
from arbest.estimate import estimate_arboricity
from arbest.generators import GraphFamilySpec, generate
from arbest.graph import Graph
from arbest.peeling import PeelConfig
from arbest.streaming import EdgeStream, stream_estimate

CSV_COLUMNS = ("family", "n", "m", "seed", "mode", "arb_ref", "alpha_hat",
               "queries", "passes", "wall_ms", "verdict_trace")
MODES = ("in-memory", "streaming")


@dataclass
class RunRecord:
    family: str
    n: int
    m: int
    seed: int
    mode: str
    arb_ref: int
    alpha_hat: int
    queries: int
    passes: int | None
    wall_ms: float
    verdict_trace: str
    config_digest: str = field(default="", compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.wall_ms = float(f"{self.wall_ms:.3f}")

    def row(self) -> list[str]:
        return [self.family, str(self.n), str(self.m), str(self.seed), self.mode,
                str(self.arb_ref), str(self.alpha_hat), str(self.queries),
                "" if self.passes is None else str(self.passes),
                f"{self.wall_ms:.3f}", self.verdict_trace]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "RunRecord":
        return cls(row["family"], int(row["n"]), int(row["m"]), int(row["seed"]), row["mode"],
                   int(row["arb_ref"]), int(row["alpha_hat"]), int(row["queries"]),
                   int(row["passes"]) if row["passes"] else None,
                   float(row["wall_ms"]), row["verdict_trace"])


def emit_csv(records: Iterable[RunRecord], path: str | os.PathLike, append: bool = False) -> None:
    """Write records with the fixed header; appending skips the header when
    the file already has content."""
    fresh = not append or not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a" if append else "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if fresh:
            w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.row())


def read_csv(path: str | os.PathLike) -> list[RunRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [RunRecord.from_row(r) for r in reader]


class InsufficientGroups(ValueError):
    pass


@dataclass(frozen=True)
class ScalingRow:
    n: int
    arb_ref: int
    runs: int
    median_queries: float
    ratio: float
    flagged: bool


@dataclass
class ScalingReport:
    rows: list[ScalingRow]
    factor: float

    @property
    def band(self) -> float:
        ratios = [r.ratio for r in self.rows]
        return max(ratios) / min(ratios)

    @property
    def flagged(self) -> list[ScalingRow]:
        return [r for r in self.rows if r.flagged]

    def medians_decreasing(self) -> bool:
        meds = [r.median_queries for r in sorted(self.rows, key=lambda r: (r.n, r.arb_ref))]
        return all(a > b for a, b in zip(meds, meds[1:]))

    def table(self) -> str:
        lines = ["n\tarb_ref\truns\tmedian_queries\tratio\tflag"]
        for r in self.rows:
            lines.append(f"{r.n}\t{r.arb_ref}\t{r.runs}\t{r.median_queries:g}\t{r.ratio:.4g}\t{'*' if r.flagged else ''}")
        return "\n".join(lines)


def query_scaling_report(records: Sequence[RunRecord], factor: float = 4.0,
                         min_groups: int = 3) -> ScalingReport:
    """Median queries per (n, arb_ref) group, normalised by ``n*L^3/arb_ref``.

    A group is flagged when its ratio is more than ``factor`` times the
    smallest ratio of the grid.
    """
    digests = {r.config_digest for r in records if r.config_digest}
    if len(digests) > 1:
        raise ValueError("records mix different configurations")
    groups: dict[tuple[int, int], list[int]] = {}
    for r in records:
        if r.arb_ref <= 0:
            raise ValueError("arb_ref must be positive to normalise queries")
        groups.setdefault((r.n, r.arb_ref), []).append(r.queries)
    distinct = len({a for _, a in groups})
    if distinct < min_groups:
        raise InsufficientGroups(f"need at least {min_groups} distinct arb_ref values, got {distinct}")
    raw = []
    for (n, a), qs in sorted(groups.items()):
        med = statistics.median(qs)
        raw.append((n, a, len(qs), med, med / (n * log2_ceil(n) ** 3 / a)))
    low = min(x[4] for x in raw)
    rows = [ScalingRow(n, a, k, med, ratio, ratio > factor * low) for n, a, k, med, ratio in raw]
    return ScalingReport(rows, factor)


def reference_arboricity(graph: Graph, spec: GraphFamilySpec | None = None) -> int:
    """Exact value when small enough, the planted value when the family
    declares one, otherwise the degeneracy (at most twice the truth)."""
    if graph.m == 0:
        return 0
    if graph.n <= 16:
        return arboricity_bruteforce(graph)
    if spec is not None:
        p = spec.params
        if spec.family == "forest":
            return 1
        if spec.family == "clique-plus-isolated":
            return max(1, math.ceil(int(p["s"]) / 2))
        if spec.family == "planted-core" and "core_size" not in p:
            return max(1, math.ceil((int(p["beta"]) + 1) / 2))
    return degeneracy(graph)


def run_record(spec: GraphFamilySpec, template: PeelConfig | None, mode: str = "in-memory",
               seed: int | None = None, graph: Graph | None = None,
               coefficients: str = "scaled", **config_kw) -> RunRecord:
    """Generate (or take) the graph, run one estimate and describe it."""
    g = graph if graph is not None else generate(spec)
    seed = spec.seed if seed is None else seed
    if template is None:
        build = PeelConfig.paper if coefficients == "paper" else PeelConfig.scaled
        template = build(g.n, **config_kw)
    start = time.perf_counter()
    if mode == "in-memory":
        rep = estimate_arboricity(g, g.n, template, seed=seed)
        alpha_hat, queries, passes, trace = rep.alpha_hat, rep.total_queries, None, rep.verdict_trace()
    else:
        est = stream_estimate(EdgeStream.from_graph(g), template, 1, seed=seed)
        alpha_hat, queries, passes, trace = est.alpha_hat, est.total_queries, est.passes, est.verdict_trace()
    wall = (time.perf_counter() - start) * 1000
    return RunRecord(spec.family, g.n, g.m, seed, mode, reference_arboricity(g, spec), alpha_hat,
                     queries, passes, wall, trace, template.digest())


def run_grid(specs: Sequence[GraphFamilySpec], trials: int, base_seed: int = 0,
             mode: str = "in-memory", template_for=None) -> list[RunRecord]:
    """``trials`` records per spec; trial k uses seed ``base_seed + k`` for both
    the graph and the estimator. ``template_for(n)`` builds the config."""
    out = []
    for spec in specs:
        for k in range(trials):
            s = GraphFamilySpec(spec.family, dict(spec.params), base_seed + k)
            g = generate(s)
            template = template_for(g.n) if template_for else PeelConfig.scaled(g.n)
            out.append(run_record(s, template, mode, graph=g))
    return out
