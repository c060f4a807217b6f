"""Seeded graph families used for tests and benchmarks.

Families
--------
forest
    ``n`` vertices, ``trees`` components (default 1); each component is a
    uniformly random labeled tree (Pruefer decoding).
clique-plus-isolated
    A clique on vertices ``0..s-1``; the other ``n - s`` vertices are isolated.
layered
    Layers ``V_0..V_depth`` with ``|V_i| = top * rho**(depth - i)``; every
    vertex of ``V_i`` has ``alpha`` neighbors in ``V_{i+1}``.
planted-core
    A clique on ``core_size`` random vertices (default ``beta + 1``, so every
    core vertex has ``beta`` neighbors inside the core) and a random spanning
    forest on the remaining vertices.
uniform-random
    ``m`` distinct edges drawn uniformly (G(n, m)).
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from arbest.graph import Graph

FAMILIES = ("forest", "clique-plus-isolated", "layered", "planted-core", "uniform-random")


@dataclass
class GraphFamilySpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def describe(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family}({inner})"


def _random_tree_edges(labels: list[int], rng: np.random.Generator) -> list[tuple[int, int]]:
    k = len(labels)
    if k < 2:
        return []
    if k == 2:
        return [(labels[0], labels[1])]
    prufer = rng.integers(0, k, size=k - 2).tolist()
    degree = [1] * k
    for x in prufer:
        degree[x] += 1
    leaves = [i for i in range(k) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in prufer:
        leaf = heapq.heappop(leaves)
        edges.append((labels[leaf], labels[x]))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((labels[u], labels[v]))
    return edges


def _forest(n: int, trees: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    if not 1 <= trees <= max(n, 1):
        raise ValueError("forest needs 1 <= trees <= n")
    perm = rng.permutation(n).tolist()
    # cut points split the permutation into `trees` non-empty blocks
    cuts = sorted(rng.choice(np.arange(1, n), size=trees - 1, replace=False).tolist()) if trees > 1 else []
    edges = []
    for lo, hi in zip([0] + cuts, cuts + [n]):
        edges.extend(_random_tree_edges(perm[lo:hi], rng))
    return edges


def _layered(alpha: int, rho: int, depth: int, top: int) -> tuple[int, list[tuple[int, int]]]:
    sizes = [top * rho ** (depth - i) for i in range(depth + 1)]
    if depth > 0 and min(sizes[1:]) < alpha:
        raise ValueError("every upper layer needs at least alpha vertices")
    offsets = list(itertools.accumulate([0] + sizes))
    edges = []
    for i in range(depth):
        lo, up = offsets[i], offsets[i + 1]
        width = sizes[i + 1]
        for k in range(sizes[i]):
            for r in range(alpha):
                edges.append((lo + k, up + (k * alpha + r) % width))
    return offsets[-1], edges


def generate(spec: GraphFamilySpec) -> Graph:
    """Build the graph described by ``spec``; identical specs give identical graphs."""
    p = spec.params
    rng = np.random.default_rng(spec.seed)
    fam = spec.family
    if fam == "forest":
        n = int(p["n"])
        return Graph.from_edges(n, _forest(n, int(p.get("trees", 1)), rng))
    if fam == "clique-plus-isolated":
        n, s = int(p["n"]), int(p["s"])
        if not 0 <= s <= n:
            raise ValueError("clique size must satisfy 0 <= s <= n")
        return Graph.from_edges(n, itertools.combinations(range(s), 2))
    if fam == "layered":
        n, edges = _layered(int(p["alpha"]), int(p["rho"]), int(p["depth"]), int(p.get("top", 1)))
        return Graph.from_edges(n, edges)
    if fam == "planted-core":
        n = int(p["n"])
        beta = int(p["beta"])
        size = int(p.get("core_size", beta + 1))
        if beta < 1 or size > n or size < beta + 1:
            raise ValueError("planted-core needs 1 <= beta < core_size <= n")
        perm = rng.permutation(n).tolist()
        core, rest = sorted(perm[:size]), perm[size:]
        edges = list(itertools.combinations(core, 2))
        edges.extend(_random_tree_edges(rest, rng))
        return Graph.from_edges(n, edges)
    if fam == "uniform-random":
        n, m = int(p["n"]), int(p["m"])
        if m > n * (n - 1) // 2:
            raise ValueError("too many edges for a simple graph")
        chosen: set[tuple[int, int]] = set()
        while len(chosen) < m:
            u, v = rng.integers(0, n, size=2).tolist()
            if u != v:
                chosen.add((min(u, v), max(u, v)))
        return Graph.from_edges(n, sorted(chosen))
    raise ValueError(f"unknown graph family {fam!r}; expected one of {FAMILIES}")


def layered_partition(alpha: int, rho: int, depth: int, top: int = 1) -> list[range]:
    """Vertex ranges of the planted layers of the ``layered`` family."""
    sizes = [top * rho ** (depth - i) for i in range(depth + 1)]
    offsets = list(itertools.accumulate([0] + sizes))
    return [range(offsets[i], offsets[i + 1]) for i in range(depth + 1)]
