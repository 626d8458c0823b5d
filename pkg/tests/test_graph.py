import pytest
from hypothesis import given, settings, strategies as st

import oracles
from strategies import bipartite_graphs
from heightlab.errors import GraphFormatError, GraphValidationError
from heightlab.graph import (
    BipartiteGraph, E, O, Side, associated_sets, builtin_graph, closure, complement_automorphism_ok,
    cycle_vertex, diameter, distance, dump_graph, generate_biregular, generate_complete_bipartite,
    generate_cycle, generate_hypercube, generate_middle_layers, generate_path, interior, is_2linked,
    k_linked_components, linked_subsets, load_graph, neighborhood, second_neighborhood, suite,
)

v = cycle_vertex


def c6_file(skip=None):
    g = generate_cycle(6)
    edges = [e for e in g.edges() if e != skip]
    return "bg 1\nparts 3 3\nedges %d\n" % len(edges) + "".join(f"e {a} {b}\n" for a, b in edges)


def test_load_cycle_file():
    g = load_graph(c6_file())
    assert (g.n_e, g.n_o) == (3, 3)
    assert all(len(a) == 2 for a in g.adj_e + g.adj_o)


def test_load_rejects_out_of_range_edge():
    with pytest.raises(GraphValidationError):
        load_graph("bg 1\nparts 3 3\nedges 1\ne 0 99\n")


def test_load_missing_edge_gives_path():
    g = load_graph(c6_file(skip=(0, 2)))
    degs = sorted(len(a) for a in g.adj_e + g.adj_o)
    assert degs == [1, 1, 2, 2, 2, 2]


def test_load_rejects_disconnected_and_malformed():
    with pytest.raises(GraphValidationError):
        load_graph("bg 1\nparts 2 2\nedges 2\ne 0 0\ne 1 1\n")
    with pytest.raises(GraphFormatError):
        load_graph("graph\n")
    with pytest.raises(GraphFormatError):
        load_graph("bg 1\nparts 1 1\nedges 2\ne 0 0\n")


def test_dump_load_roundtrip_keeps_family():
    g = generate_middle_layers(3)
    h = load_graph(dump_graph(g).encode())
    assert list(h.edges()) == list(g.edges())
    assert h.family == "middle-layers" and h.params["d"] == 3


@settings(max_examples=60, deadline=None)
@given(bipartite_graphs())
def test_roundtrip_property(g):
    assert sorted(load_graph(dump_graph(g)).edges()) == sorted(g.edges())


@pytest.mark.parametrize("d,ne,m", [(1, 1, 1), (2, 3, 6), (3, 10, 30), (4, 35, 140)])
def test_middle_layer_sizes(d, ne, m):
    g = generate_middle_layers(d)
    assert (g.n_e, g.n_o, g.num_edges) == (ne, ne, m)
    assert g.regular_degree == d


def test_middle_layers_d2_is_a_hexagon():
    g = generate_middle_layers(2)
    assert g.regular_degree == 2 and g.n_e == 3 and diameter(g) == 3
    # a connected 2-regular graph on 6 vertices is C6
    assert len(g.bfs(E(0))) == 6


def test_middle_layers_match_oracle_edges():
    for d in (2, 3, 4):
        low, high, edges = oracles.middle_layer_edges(d)
        g = generate_middle_layers(d)
        got = {(g.labels_e[u], g.labels_o[w]) for u, w in g.edges()}
        assert got == set(edges)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_complement_automorphism(d):
    assert complement_automorphism_ok(generate_middle_layers(d))


def test_hypercube_and_cycles():
    assert generate_hypercube(1).num_edges == 1
    q3 = generate_hypercube(3)
    assert (q3.n_e, q3.num_edges, q3.regular_degree) == (4, 12, 3)
    q2 = generate_hypercube(2)
    assert q2.regular_degree == 2 and q2.n_e == 2
    assert generate_cycle(4).num_edges == 4
    with pytest.raises(ValueError):
        generate_cycle(5)


def test_biregular_generator():
    k44 = generate_biregular(4, 4, seed=1)
    assert k44.num_edges == 16
    g = generate_biregular(8, 3, seed=7)
    assert g.regular_degree == 3
    assert generate_biregular(8, 3, seed=7).adj_e == g.adj_e
    with pytest.raises(ValueError):
        generate_biregular(3, 4, seed=0)


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 40), st.integers(2, 4), st.integers(0, 10**6))
def test_biregular_degrees(n, d, seed):
    g = generate_biregular(n, d, seed)
    assert all(len(a) == d for a in g.adj_e + g.adj_o)


def test_neighbourhoods_on_c6():
    g = generate_cycle(6)
    assert neighborhood(g, [v(0)]) == {v(1), v(5)}
    assert neighborhood(g, []) == frozenset()
    assert second_neighborhood(g, [v(0)]) == {v(0), v(2), v(4)}
    assert second_neighborhood(g, [v(0), v(2)]) == {v(0), v(2), v(4)}
    assert second_neighborhood(generate_path(2), [E(0)]) == {E(0)}
    ml = generate_middle_layers(3)
    assert len(neighborhood(ml, [O(0)])) == 3
    with pytest.raises(ValueError):
        neighborhood(g, [v(0), v(1)])


def test_distances():
    g = generate_cycle(6)
    assert distance(g, v(0), v(3)) == 3 and diameter(g) == 3
    assert diameter(generate_path(2)) == 1
    assert diameter(generate_middle_layers(2)) == 3


def test_k_linked():
    assert len(k_linked_components(generate_cycle(6), [v(0), v(2), v(4)], 2)) == 1
    assert len(k_linked_components(generate_cycle(8), [v(0), v(4)], 2)) == 2
    assert k_linked_components(generate_cycle(6), [], 2) == []


def test_associated_sets_on_c6():
    g = generate_cycle(6)
    s = associated_sets(g, [v(0), v(2)])
    assert {O(i) for i in s.G} == {v(1), v(3), v(5)}
    assert {E(i) for i in s.closure} == {v(0), v(2), v(4)}
    assert {O(i) for i in s.B} == {v(1)} and {E(i) for i in s.H} == {v(0), v(2)}
    assert s.sizes() == (2, 3, 3, 1, 2, 0, 1)
    s = associated_sets(g, [v(0)])
    assert {O(i) for i in s.G} == {v(1), v(5)} and not s.B and not s.H
    assert (s.t1, s.t2) == (1, 0)


@pytest.mark.parametrize("g", suite(), ids=lambda g: g.name)
def test_whole_side(g):
    s = associated_sets(g, range(g.n_e))
    assert s.G == frozenset(range(g.n_o)) and s.closure == frozenset(range(g.n_e))
    if g.regular_degree:
        assert s.B == frozenset(range(g.n_o)) and s.H == frozenset(range(g.n_e))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_closure_interior_properties(data):
    g = data.draw(bipartite_graphs())
    A = data.draw(st.frozensets(st.integers(0, g.n_e - 1), min_size=1))
    cl = closure(g, Side.E, A)
    assert A <= cl and closure(g, Side.E, cl) == cl
    assert g.nbhd(Side.E, cl) == g.nbhd(Side.E, A)
    B = interior(g, Side.E, A)
    H = g.nbhd(Side.O, B)
    assert H <= A and closure(g, Side.O, B) == B


def brute_linked(g):
    """2-linked subsets of E by union-find over shared neighbours, all 2^n masks."""
    count = 0
    for mask in range(1, 1 << g.n_e):
        S = [i for i in range(g.n_e) if mask >> i & 1]
        seen, stack = {S[0]}, [S[0]]
        while stack:
            x = stack.pop()
            for y in S:
                if y not in seen and set(g.adj_e[x]) & set(g.adj_e[y]):
                    seen.add(y)
                    stack.append(y)
        count += len(seen) == len(S)
    return count


@pytest.mark.parametrize("name", ["C6", "C8", "Q3", "K3,3", "ml-d3"])
def test_linked_subset_enumeration(name):
    g = builtin_graph(name)
    got = list(linked_subsets(g, Side.E))
    assert len(got) == len(set(got)) == brute_linked(g)
    assert all(is_2linked(g, Side.E, S) for S in got)


def test_regular_size_chain():
    g = generate_middle_layers(3)
    for S in linked_subsets(g, Side.E, max_size=4):
        a, a1, gg, b, h, _, _ = associated_sets(g, S).sizes()
        assert b <= h <= a <= a1 <= gg


def test_graph_validation():
    with pytest.raises(GraphValidationError):
        BipartiteGraph(2, 1, [(0, 0), (0, 0), (1, 0)])


def test_biregular_rejects_disconnected_degree_one():
    assert generate_biregular(1, 1, seed=0).num_edges == 1
    with pytest.raises(ValueError):
        generate_biregular(5, 1, seed=0)
