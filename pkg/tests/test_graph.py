import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arbest.graph import (
    BudgetExhausted,
    EdgeListError,
    Graph,
    QueryOracle,
    draw_indices,
    read_edge_list,
    write_edge_list,
)


def star(k):
    return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def test_degree_counts_one_query():
    o = QueryOracle(star(5))
    assert o.degree(0) == 5
    assert o.Q == 1


def test_degree_of_isolated_and_path_middle():
    g = Graph.from_edges(4, [(0, 1), (1, 2)])
    o = QueryOracle(g)
    assert o.degree(3) == 0
    assert o.degree(1) == 2


def test_neighbor_is_one_indexed():
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    o = QueryOracle(tri)
    assert tri.neighbors(0) == (1, 2)
    assert o.neighbor(0, 1) == 1
    assert o.neighbor(0, 2) == 2
    assert o.Q == 2
    with pytest.raises(IndexError):
        o.neighbor(0, 3)
    with pytest.raises(IndexError):
        o.neighbor(0, 0)
    assert o.Q == 2


def test_vertex_out_of_range():
    o = QueryOracle(star(2))
    with pytest.raises(IndexError):
        o.degree(3)
    with pytest.raises(IndexError):
        o.degree(-1)


def test_sample_neighbors_edge_cases():
    o = QueryOracle(star(3), seed=1)
    assert o.sample_neighbors(0, 0) == []
    assert o.Q == 0
    assert o.sample_neighbors(1, 3) == [0, 0, 0]
    assert o.Q == 3
    with pytest.raises(IndexError):
        QueryOracle(Graph(2, [(), ()])).sample_neighbors(0, 1)


def test_sample_frequencies_and_reproducibility():
    k4 = Graph.from_edges(4, itertools.combinations(range(4), 2))
    a = QueryOracle(k4, seed=11).sample_neighbors(0, 3000)
    b = QueryOracle(k4, seed=11).sample_neighbors(0, 3000)
    assert a == b
    counts = np.bincount(a, minlength=4)
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] / 3000 - 1 / 3) < 0.04)


def test_sample_matches_index_draws():
    # the oracle answers the drawn indices through the fixed neighbor order
    g = Graph.from_edges(6, [(0, i) for i in (5, 3, 1, 4)])
    got = QueryOracle(g, seed=4).sample_neighbors(0, 50)
    idx = draw_indices(np.random.default_rng(4), 4, 50)
    assert got == [g.neighbors(0)[i - 1] for i in idx]


def test_budget_exhaustion():
    o = QueryOracle(star(5), seed=0, budget=4)
    o.degree(0)
    with pytest.raises(BudgetExhausted) as err:
        o.sample_neighbors(0, 5)
    assert err.value.spent == 3
    assert o.Q == 4
    with pytest.raises(BudgetExhausted):
        o.degree(1)


def test_shadow_counter_matches_q():
    rng = np.random.default_rng(2)
    g = Graph.from_edges(30, [(i, j) for i, j in itertools.combinations(range(30), 2) if rng.random() < 0.2])
    o = QueryOracle(g, seed=3)
    shadow = 0
    for _ in range(300):
        v = int(rng.integers(30))
        op = rng.integers(3)
        d = g.degree(v)
        if op == 0 or d == 0:
            o.degree(v)
            shadow += 1
        elif op == 1:
            o.neighbor(v, int(rng.integers(1, d + 1)))
            shadow += 1
        else:
            k = int(rng.integers(0, 5))
            o.sample_neighbors(v, k)
            shadow += k
    assert o.Q == shadow == o.degree_queries + o.neighbor_queries


@pytest.mark.parametrize("adj", [
    [(0,)],                # self-loop
    [(1, 1), (0,)],        # repeated neighbor
    [(1,), ()],            # asymmetric
    [(2,), ()],            # out of range
])
def test_graph_rejects_malformed_adjacency(adj):
    with pytest.raises(ValueError):
        Graph(len(adj), adj)


def test_from_edges_orders():
    edges = [(0, 3), (2, 0), (0, 1)]
    assert Graph.from_edges(4, edges).neighbors(0) == (1, 2, 3)
    assert Graph.from_edges(4, edges, order="stream").neighbors(0) == (3, 2, 1)
    with pytest.raises(ValueError):
        Graph.from_edges(4, [(0, 1), (1, 0)])


def test_graph_basics():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 0), (3, 4)])
    assert g.m == 4
    assert sum(g.degrees()) == 2 * g.m
    assert g.edges() == [(0, 1), (0, 2), (1, 2), (3, 4)]
    assert g.induced_edge_count({0, 1, 2}) == 3
    assert g.has_edge(4, 3) and not g.has_edge(0, 3)


def test_read_path(tmp_path):
    p = tmp_path / "p3.el"
    p.write_text("0 1\n1 2\n")
    g = read_edge_list(p)
    assert g == Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.mark.parametrize("text, line", [
    ("0 0\n", 1),
    ("0 1\n1 0\n", 2),
    ("0 1\nfoo bar\n", 2),
    ("0 1 2\n", 1),
    ("\n# c\n-1 2\n", 3),
])
def test_read_errors_carry_line_numbers(tmp_path, text, line):
    p = tmp_path / "bad.el"
    p.write_text(text)
    with pytest.raises(EdgeListError) as err:
        read_edge_list(p)
    assert err.value.lineno == line


def test_read_skips_comments_and_blank_lines(tmp_path):
    p = tmp_path / "c.el"
    p.write_text("# a comment\n\n0 1\n   \n# another\n2 1\n")
    assert read_edge_list(p).m == 2


def test_roundtrip_k5_and_isolated(tmp_path):
    k5 = Graph.from_edges(8, itertools.combinations(range(5), 2))
    p = tmp_path / "k5.el"
    write_edge_list(k5, p)
    assert read_edge_list(p) == k5
    assert p.read_bytes().count(b"\r") == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))))
def test_roundtrip_property(tmp_path_factory, data):
    n, pairs = data
    edges = {(min(u, v), max(u, v)) for u, v in pairs if u != v}
    g = Graph.from_edges(n, sorted(edges))
    p = tmp_path_factory.mktemp("rt") / "g.el"
    write_edge_list(g, p)
    assert read_edge_list(p) == g
