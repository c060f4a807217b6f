"""Immutable graphs, the counting query oracle, and edge-list files."""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np


class BudgetExhausted(RuntimeError):
    """Raised when a query would push the oracle past its budget."""

    def __init__(self, budget: int, spent: int):
        super().__init__(f"query budget {budget} exhausted ({spent} queries spent in the failing call)")
        self.budget = budget
        self.spent = spent


class EdgeListError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class Graph:
    """Simple undirected graph with a fixed neighbor order per vertex.

    Neighbors are stored in CSR form (``indptr``/``indices``) for vectorized
    sampling and as Python tuples for the exact baselines.
    """

    __slots__ = ("n", "m", "indptr", "indices", "_adj")

    def __init__(self, n: int, adjacency: Sequence[Sequence[int]]):
        if n < 0 or len(adjacency) != n:
            raise ValueError("adjacency must have exactly n rows")
        adj = tuple(tuple(int(u) for u in row) for row in adjacency)
        seen: list[set[int]] = [set(row) for row in adj]
        total = 0
        for v, row in enumerate(adj):
            if len(seen[v]) != len(row):
                raise ValueError(f"vertex {v} lists a neighbor twice")
            for u in row:
                if not 0 <= u < n:
                    raise ValueError(f"neighbor {u} of {v} out of range")
                if u == v:
                    raise ValueError(f"self-loop at {v}")
                if v not in seen[u]:
                    raise ValueError(f"edge ({v}, {u}) is not symmetric")
            total += len(row)
        self.n = n
        self.m = total // 2
        self._adj = adj
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum([len(row) for row in adj], out=self.indptr[1:])
        self.indices = np.fromiter((u for row in adj for u in row), dtype=np.int64, count=total)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], order: str = "sorted") -> "Graph":
        """Build from an undirected edge list.

        ``order="sorted"`` sorts each neighbor list by vertex id;
        ``order="stream"`` keeps the order in which edges were listed, which
        is the neighbor order a one-pass stream reader observes.
        """
        if order not in ("sorted", "stream"):
            raise ValueError(f"unknown neighbor order {order!r}")
        adj: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        if order == "sorted":
            for row in adj:
                row.sort()
        return cls(n, adj)

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degrees(self) -> list[int]:
        return [len(row) for row in self._adj]

    def edges(self) -> list[tuple[int, int]]:
        """Each edge once as (u, v) with u < v, in lexicographic order."""
        return sorted((u, v) for u, row in enumerate(self._adj) for v in row if u < v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        s = set(vertices)
        return sum(1 for u in s for v in self._adj[u] if v in s) // 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self.n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def draw_indices(rng: np.random.Generator, d: int, k: int) -> np.ndarray:
    """Draw ``k`` neighbor indices uniformly, with replacement, from [1, d].

    Both the in-memory oracle and the stream engine draw through this helper
    so that a shared seed yields the same index sequence.
    """
    if k == 0:
        return np.empty(0, dtype=np.int64)
    if d <= 0:
        raise IndexError("cannot sample neighbors of an isolated vertex")
    return rng.integers(1, d + 1, size=k)


class QueryOracle:
    """Degree/neighbor query access to a graph with exact query accounting.

    ``Q`` grows by one per degree query and per neighbor query. When
    ``budget`` is set, a query that would take ``Q`` past it raises
    :class:`BudgetExhausted` instead of being answered.
    """

    def __init__(self, graph: Graph, seed=None, budget: int | None = None,
                 rng: np.random.Generator | None = None):
        self.graph = graph
        self.Q = 0
        self.budget = budget
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.degree_queries = 0
        self.neighbor_queries = 0

    @property
    def n(self) -> int:
        return self.graph.n

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.graph.n:
            raise IndexError(f"vertex {v} out of range [0, {self.graph.n})")

    def _charge(self, k: int) -> None:
        if self.budget is not None and self.Q + k > self.budget:
            spent = self.budget - self.Q
            self.Q = self.budget
            raise BudgetExhausted(self.budget, spent)
        self.Q += k

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        self._charge(1)
        self.degree_queries += 1
        return self.graph.degree(v)

    def neighbor(self, v: int, i: int) -> int:
        """The i-th neighbor of v, 1-indexed."""
        self._check_vertex(v)
        d = self.graph.degree(v)
        if not 1 <= i <= d:
            raise IndexError(f"neighbor index {i} out of range [1, {d}] for vertex {v}")
        self._charge(1)
        self.neighbor_queries += 1
        return self.graph.neighbors(v)[i - 1]

    def sample_neighbors(self, v: int, k: int) -> list[int]:
        """k neighbor queries at indices drawn u.i.r. with replacement.

        Duplicates are kept; the result is ordered by draw.
        """
        if k < 0:
            raise ValueError("sample size must be non-negative")
        self._check_vertex(v)
        if k == 0:
            return []
        d = self.graph.degree(v)
        idx = draw_indices(self.rng, d, k)
        self._charge(k)
        self.neighbor_queries += k
        start = self.graph.indptr[v] - 1
        return self.graph.indices[start + idx].tolist()


def read_edge_list(path: str | os.PathLike, n: int | None = None, order: str = "sorted") -> Graph:
    """Read whitespace-separated ``u v`` lines (0-indexed) into a Graph.

    Blank lines are skipped. Lines starting with ``#`` are comments, except a
    ``# n <count>`` header which fixes the vertex count so that isolated
    vertices survive a round trip.
    """
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    declared: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                parts = text[1:].split()
                if len(parts) == 2 and parts[0] == "n":
                    try:
                        declared = int(parts[1])
                    except ValueError:
                        raise EdgeListError(f"bad vertex count {parts[1]!r}", lineno) from None
                continue
            parts = text.split()
            if len(parts) != 2:
                raise EdgeListError(f"expected 'u v', got {text!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"non-integer vertex in {text!r}", lineno) from None
            if u < 0 or v < 0:
                raise EdgeListError(f"negative vertex id in {text!r}", lineno)
            if u == v:
                raise EdgeListError(f"self-loop at vertex {u}", lineno)
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise EdgeListError(f"duplicate edge {key}", lineno)
            seen.add(key)
            edges.append((u, v))
    top = max((max(e) for e in edges), default=-1) + 1
    if n is None:
        n = declared if declared is not None else top
    if top > n:
        raise EdgeListError(f"vertex id {top - 1} exceeds declared count {n}")
    return Graph.from_edges(n, edges, order=order)


def write_edge_list(graph: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# n {graph.n}\n")
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")
