import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mxmap import CausalGraph, DataError, ParameterError, PathLimitError


def brute_paths(adj, i, j):
    """All simple paths by trying every ordered subset of intermediate nodes."""
    K = len(adj)
    others = [n for n in range(K) if n not in (i, j)]
    out = []
    for r in range(len(others) + 1):
        for mid in itertools.permutations(others, r):
            path = [i, *mid, j]
            if all(adj[a][b] for a, b in zip(path, path[1:])):
                out.append(path)
    return out


graphs = st.integers(2, 6).flatmap(
    lambda K: st.lists(st.lists(st.integers(0, 1), min_size=K, max_size=K), min_size=K, max_size=K)
).map(lambda m: np.array(m) * (1 - np.eye(len(m), dtype=int)))


@settings(max_examples=150, deadline=None)
@given(graphs)
def test_path_queries_match_exhaustive_enumeration(adj):
    g = CausalGraph.from_adjacency(adj)
    for i in range(g.K):
        for j in range(g.K):
            if i == j:
                continue
            every = brute_paths(adj, i, j)
            want = sorted(p for p in every if len(p) > 2)
            assert sorted(g.simple_paths(i, j)) == want
            assert sorted(g.simple_paths(i, j, skip_direct=False)) == sorted(every)
            assert g.has_indirect_path(i, j) == bool(want)
            assert g.intermediate_nodes(i, j) == {n for p in want for n in p[1:-1]}


def test_cycle_paths_terminate():
    g = CausalGraph.from_edges("abc", [(0, 1), (1, 2), (2, 0), (1, 0)])
    assert g.simple_paths(0, 2, skip_direct=False) == [[0, 1, 2]]
    assert g.intermediate_nodes(0, 2) == {1}


def test_path_cap():
    K = 7
    adj = 1 - np.eye(K, dtype=int)
    g = CausalGraph.from_adjacency(adj)
    with pytest.raises(PathLimitError):
        g.simple_paths(0, 1, cap=10)
    assert len(g.simple_paths(0, 1)) == sum(
        len(list(itertools.permutations(range(5), r))) for r in range(1, 6)
    )


def test_edges_and_validation():
    g = CausalGraph(["a", "b", "c"]).add_edge(0, 1).add_edge(2, 1)
    assert g.edges == [(0, 1), (2, 1)] and g.n_edges() == 2
    assert g.children == {0: [1], 1: [], 2: [1]}
    with pytest.raises(ParameterError):
        g.add_edge(1, 1)
    with pytest.raises(ParameterError):
        g.add_edge(0, 3)
    with pytest.raises(ValueError):
        g.adjacency[0, 0] = 1
    with pytest.raises(DataError):
        CausalGraph(["a", "a"])
    with pytest.raises(DataError):
        CausalGraph.from_adjacency([[1, 0], [0, 0]])
    with pytest.raises(DataError):
        CausalGraph.from_adjacency([[0, 2], [0, 0]])


def test_copy_is_independent():
    g = CausalGraph.from_edges("ab", [(0, 1)])
    h = g.copy().remove_edge(0, 1)
    assert g.has_edge(0, 1) and not h.has_edge(0, 1)
    assert g != h


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_round_trips(adj):
    g = CausalGraph.from_adjacency(adj, [f"n{i}" for i in range(len(adj))])
    assert CausalGraph.from_json(g.to_json()) == g
    assert CausalGraph.from_csv(g.to_csv()) == g
    for fmt in ("json", "csv", "matrix-csv"):
        assert CausalGraph.load(g.export(fmt)) == g
    dot = g.to_dot()
    assert dot.count("->") == g.n_edges()


def test_dot_format():
    g = CausalGraph.from_edges(["x", "y"], [(0, 1)])
    assert '"x" -> "y";' in g.to_dot()


def test_bad_serialized_input():
    with pytest.raises(DataError):
        CausalGraph.from_json('{"names": ["a"]}')
    with pytest.raises(DataError):
        CausalGraph.from_csv("a,b\n0,1\n")
    with pytest.raises(DataError):
        CausalGraph.from_csv("a,b\n0,x\n0,0\n")
    with pytest.raises(ParameterError):
        CausalGraph.load("digraph {}", fmt="dot")
