"""Directed graph enumeration and canonical labeling."""

import pytest

from starcycle import AdmissibleGraph, enumerate_graphs, star_graphs, top_edge_count


def test_basic_construction():
    # internal vertices 1..n, boundary vertices n+1..n+m;
    # stars list the ordered edge targets of each internal vertex
    g = AdmissibleGraph(2, 2, [(3, 2), (4, 1)])
    assert g.n == 2 and g.m == 2
    assert g.edge_count == 4
    assert g.stars == ((3, 2), (4, 1))
    assert g.is_boundary(3) and g.is_boundary(4)
    assert not g.is_boundary(1)


def test_edges_ordered_by_source_slot():
    g = AdmissibleGraph.from_key("2;2;b1,2|b2,1")
    assert g.edges() == [(1, 3), (1, 2), (2, 4), (2, 1)]


def test_canonical_key_round_trip():
    for key in ("1;2;b1,b2", "2;2;b1,2|b2,1", "1;3;b1,b3", "2;2;b1,b2|b1,b2"):
        g = AdmissibleGraph.from_key(key)
        assert g.canonical_key() == key
        assert AdmissibleGraph.from_key(g.canonical_key()).stars == g.stars


def test_validation():
    with pytest.raises(ValueError):
        AdmissibleGraph(1, 2, [(1, 2)])     # self loop at vertex 1
    with pytest.raises(ValueError):
        AdmissibleGraph(1, 2, [(9, 2)])     # target out of range
    with pytest.raises(ValueError):
        AdmissibleGraph(1, 2, [(2, 2)])     # parallel edge in one star
    with pytest.raises(ValueError):
        AdmissibleGraph(2, 2, [(3, 4)])     # one star per internal vertex
    with pytest.raises(ValueError):
        AdmissibleGraph.from_key("1;2;")


def test_enumeration_counts():
    assert len(enumerate_graphs(1, 3, 2)) == 6
    assert len(enumerate_graphs(1, 2, 2)) == 2
    only = enumerate_graphs(0, 3, 0)
    assert len(only) == 1 and only[0].edge_count == 0
    # fully labeled two-vertex enumeration; the out-degree-2 subset has 36
    assert len(enumerate_graphs(2, 2, 4)) == 72


def test_enumeration_keys_unique_and_stable():
    graphs = enumerate_graphs(2, 2, 4)
    keys = [g.canonical_key() for g in graphs]
    assert len(set(keys)) == len(keys)
    assert keys == [g.canonical_key() for g in enumerate_graphs(2, 2, 4)]


def test_star_graphs():
    assert len(star_graphs(1, 2)) == 2
    assert len(star_graphs(2, 2)) == 36
    assert len(star_graphs(1, 3)) == 6
    for g in star_graphs(2, 2):
        assert g.is_star_graph()
        assert all(len(s) == 2 for s in g.stars)
    # star graphs are exactly the out-degree-2 slice of the full enumeration
    full = {g.canonical_key() for g in enumerate_graphs(2, 2, 4) if g.is_star_graph()}
    assert full == {g.canonical_key() for g in star_graphs(2, 2)}


def test_top_edge_count():
    # dimension of the gauge-fixed configuration space, 2n + m - 3
    assert top_edge_count(1, 2) == 1
    assert top_edge_count(2, 2) == 3
    assert top_edge_count(1, 3) == 2
    assert top_edge_count(2, 3) == 4


def test_add_boundary_vertex():
    g = AdmissibleGraph.from_key("1;2;b1,b2")
    bigger = g.add_boundary_vertex()
    assert bigger.m == 3
    assert bigger.n == 1
    # existing targets are preserved under the embedding
    assert bigger.canonical_key() == "1;3;b1,b2"


def test_json_round_trip():
    g = AdmissibleGraph.from_key("2;2;b1,2|b2,1")
    data = g.to_json()
    assert data == {"n": 2, "m": 2, "stars": [["b1", "2"], ["b2", "1"]]}
    back = AdmissibleGraph.from_json(data)
    assert back.canonical_key() == g.canonical_key()


def test_enumerate_validation():
    with pytest.raises(ValueError):
        enumerate_graphs(-1, 2, 0)
    with pytest.raises(ValueError):
        enumerate_graphs(0, 2, 0)     # 2n + m must be at least 3
    assert enumerate_graphs(1, 2, -1) == []
    assert enumerate_graphs(1, 2, 99) == []
