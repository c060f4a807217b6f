"""Exact reference computations: layering, degeneracy, arboricity, dense core."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from arbest.graph import Graph


class GraphTooLarge(ValueError):
    pass


def log2_ceil(n: int) -> int:
    """``ceil(log2 n)``, clamped to at least 1 so it can divide."""
    return max(1, (n - 1).bit_length())


def log_three_halves_ceil(n: int) -> int:
    """Smallest e >= 0 with (3/2)**e >= n, computed exactly."""
    e = 0
    while 3 ** e < n * 2 ** e:
        e += 1
    return e


@dataclass(frozen=True)
class LayerConstants:
    """Thresholds of the layering: ``L_0`` holds ``d(v) <= lambda0 * alpha``;
    later layers allow at most ``slack * alpha`` neighbors outside lower layers."""

    lambda0: Fraction
    slack: Fraction = Fraction(3)

    @classmethod
    def paper(cls, n: int) -> "LayerConstants":
        return cls(Fraction(100 * log2_ceil(n) ** 2), Fraction(3))

    @classmethod
    def of(cls, lambda0, slack=3) -> "LayerConstants":
        return cls(Fraction(lambda0), Fraction(slack))


@dataclass(frozen=True)
class Layering:
    layers: tuple[frozenset[int], ...]
    unassigned: frozenset[int]
    alpha: Fraction
    constants: LayerConstants

    def layer_index(self) -> dict[int, int]:
        return {v: i for i, layer in enumerate(self.layers) for v in layer}

    def index_of(self, v: int) -> int | None:
        for i, layer in enumerate(self.layers):
            if v in layer:
                return i
        return None

    @property
    def complete(self) -> bool:
        return not self.unassigned


def exact_layering(graph: Graph, alpha, constants: LayerConstants | None = None) -> Layering:
    """Iterated peeling: ``L_0`` by degree, then each round peels every vertex
    with at most ``slack * alpha`` neighbors still unpeeled. Stops at the first
    round (after ``L_0``) that peels nothing."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if constants is None:
        constants = LayerConstants.paper(graph.n)
    low = constants.lambda0 * alpha
    slack = constants.slack * alpha
    n = graph.n
    assigned = [False] * n
    # remaining[v] = neighbors of v not yet assigned to any layer
    remaining = graph.degrees()
    layers: list[frozenset[int]] = []

    def commit(layer: list[int]) -> None:
        for v in layer:
            assigned[v] = True
        for v in layer:
            for u in graph.neighbors(v):
                remaining[u] -= 1
        layers.append(frozenset(layer))

    commit([v for v in range(n) if graph.degree(v) <= low])
    while True:
        layer = [v for v in range(n) if not assigned[v] and remaining[v] <= slack]
        if not layer:
            break
        commit(layer)
    unassigned = frozenset(v for v in range(n) if not assigned[v])
    return Layering(tuple(layers), unassigned, alpha, constants)


def degeneracy(graph: Graph) -> int:
    """Largest minimum degree over all subgraphs, via min-degree peeling with buckets."""
    n = graph.n
    if n == 0:
        return 0
    deg = graph.degrees()
    maxd = max(deg)
    buckets: list[set[int]] = [set() for _ in range(maxd + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    removed = [False] * n
    best = 0
    cur = 0
    for _ in range(n):
        cur = max(cur - 1, 0)
        while not buckets[cur]:
            cur += 1
        v = buckets[cur].pop()
        removed[v] = True
        best = max(best, cur)
        for u in graph.neighbors(v):
            if not removed[u]:
                buckets[deg[u]].discard(u)
                deg[u] -= 1
                buckets[deg[u]].add(u)
    return best


def arboricity_bruteforce(graph: Graph, max_n: int = 16) -> int:
    """max over vertex subsets S with |S| >= 2 of ceil(|E(S)| / (|S| - 1))."""
    n = graph.n
    if n > max_n:
        raise GraphTooLarge(f"brute force limited to n <= {max_n}, got {n}")
    if graph.m == 0:
        return 0
    nbr = [sum(1 << u for u in graph.neighbors(v)) for v in range(n)]
    size = 1 << n
    edges = [0] * size
    best = 0
    for mask in range(1, size):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        e = edges[rest] + (nbr[v] & rest).bit_count()
        edges[mask] = e
        k = mask.bit_count()
        if k >= 2 and e:
            best = max(best, -(-e // (k - 1)))
    return best


@dataclass(frozen=True)
class DenseCore:
    beta: int
    core: frozenset[int]


def dense_core(graph: Graph, beta: int) -> DenseCore:
    """Maximal vertex set in which every vertex keeps >= beta neighbors."""
    if beta < 1:
        raise ValueError("beta must be >= 1")
    deg = graph.degrees()
    alive = [True] * graph.n
    stack = [v for v in range(graph.n) if deg[v] < beta]
    for v in stack:
        alive[v] = False
    while stack:
        v = stack.pop()
        for u in graph.neighbors(v):
            if alive[u]:
                deg[u] -= 1
                if deg[u] < beta:
                    alive[u] = False
                    stack.append(u)
    return DenseCore(beta, frozenset(v for v in range(graph.n) if alive[v]))


def layer_count_bound(n: int) -> int:
    """Number of layers allowed when arboricity is within the guess."""
    return log_three_halves_ceil(n) + 1


__all__ = [
    "DenseCore",
    "GraphTooLarge",
    "LayerConstants",
    "Layering",
    "arboricity_bruteforce",
    "degeneracy",
    "dense_core",
    "exact_layering",
    "log2_ceil",
    "log_three_halves_ceil",
    "layer_count_bound",
]
