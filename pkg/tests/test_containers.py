import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from strategies import bipartite_graphs
from heightlab.errors import GraphFormatError
from heightlab.graph import Side, associated_sets, builtin_graph, generate_complete_bipartite, generate_cycle, linked_subsets, suite
from heightlab.containers import (
    ApproxQuadruple, b_side_pair, build_quadruple, default_psi, dump_quad, exact_quadruple, family_envelope,
    family_sizes, greedy_psi_pair, high_degree_part, is_mutual_cover, is_phi_approx, linked_set_table, load_quad,
    pair_ok, phi_approx, random_linked_set, randomized_mutual_cover, reconstruction_budget, reconstruction_enumerate,
    refine_phi_to_psi, validate_quadruple,
)

C6 = generate_cycle(6)
ML2 = builtin_graph("ml-d2")
ML3 = builtin_graph("ml-d3")
K33 = generate_complete_bipartite(3, 3)
fs = frozenset


def test_exact_quadruple_c6():
    q = exact_quadruple(C6, {0, 1})
    # v1, v3, v5 are O0, O1, O2; v0, v2, v4 are E0, E1, E2; B = {v1} = {O0}
    assert (q.F, q.S, q.P, q.Q) == (fs({0, 1, 2}), fs({0, 1, 2}), fs({0, 1}), fs({0}))
    assert validate_quadruple(C6, {0, 1}, q).ok
    q = exact_quadruple(C6, {0})
    assert (q.F, q.S, q.P, q.Q) == (fs({0, 2}), fs({0}), fs(), fs())


@pytest.mark.parametrize("g", [g for g in suite() if g.regular_degree and g.n_e == g.n_o], ids=lambda g: g.name)
def test_exact_quadruple_whole_side(g):
    q = exact_quadruple(g, range(g.n_e))
    assert (q.F, q.S, q.P, q.Q) == (fs(range(g.n_o)), fs(range(g.n_e)), fs(range(g.n_e)), fs(range(g.n_o)))


@pytest.mark.parametrize("g", suite(), ids=lambda g: g.name)
def test_exact_quadruple_always_valid(g):
    d = g.regular_degree or g.max_degree
    for A, _ in linked_set_table(g):
        for psi in range(d + 1):
            assert validate_quadruple(g, A, exact_quadruple(g, A, psi)).ok


def test_bad_quadruple_detected():
    q = ApproxQuadruple(fs({0}), fs({0, 1, 2}), fs({0, 1}), fs({0}), 0)
    chk = validate_quadruple(C6, {0, 1}, q)
    assert not chk.conditions[1] and chk.margins[2] < 0


def test_psi_equal_degree_leaves_only_containment():
    # at psi = d the degree conditions are vacuous; F = {O1} is not inside G = {O0, O2}
    q = ApproxQuadruple(fs({1}), fs({0}), fs(), fs(), 2)
    chk = validate_quadruple(C6, {0}, q)
    assert chk.holds(2, 3, 4, 5, 6) and not chk.holds(1)


def test_mutual_cover_examples():
    for seed in range(20):
        mc = randomized_mutual_cover(C6, {0, 1}, seed)
        assert mc.cover <= fs({0, 1, 2}) and is_mutual_cover(C6, {0, 1, 2}, mc.cover)
    assert randomized_mutual_cover(builtin_graph("edge"), {0}, 0).cover == {0}
    for seed in range(20):
        mc = randomized_mutual_cover(K33, {0}, seed)
        assert 1 <= len(mc.cover) <= 3


def test_greedy_pair_examples():
    mc = randomized_mutual_cover(C6, {0, 1}, 0)
    p = greedy_psi_pair(C6, {0, 1}, mc.cover, 1)
    assert pair_ok(C6, fs({0, 1}), p.F, p.S, 1)
    p = greedy_psi_pair(C6, {0, 1}, mc.cover, 2)
    assert p.F == mc.cover and pair_ok(C6, fs({0, 1}), p.F, p.S, 2)
    mc = randomized_mutual_cover(K33, {0}, 0)
    p = greedy_psi_pair(K33, {0}, mc.cover, 1)
    assert pair_ok(K33, fs({0}), p.F, p.S, 1) and len(p.S) <= 2 * 3


def test_phi_approx_examples():
    a = phi_approx(ML2, {0}, seed=0)
    assert a.phi == 1 and is_phi_approx(ML2, fs({0}), a.Fprime, 1)
    assert high_degree_part(ML2, fs({0}), 1) <= a.Fprime
    full = phi_approx(ML3, range(10), seed=0)
    assert high_degree_part(ML3, fs(range(10)), 1.5) == fs(range(10)) == full.Fprime


def test_phi_approx_d3_many_seeds():
    for seed in range(100):
        rng = random.Random(seed)
        A = random_linked_set(ML3, rng, max_size=3)
        while len(A) != 3:
            A = random_linked_set(ML3, rng, max_size=3)
        a = phi_approx(ML3, A, seed)
        assert is_phi_approx(ML3, A, a.Fprime, a.phi)


def test_refine_examples():
    for A, _ in linked_set_table(ML2):
        p = refine_phi_to_psi(ML2, A, phi_approx(ML2, A, 0), 1)
        assert pair_ok(ML2, A, p.F, p.S, 1)
    A = next(S for S in linked_subsets(ML3, Side.E) if len(S) == 4)
    p = refine_phi_to_psi(ML3, A, phi_approx(ML3, A, 0), math.ceil(math.sqrt(3)))
    assert pair_ok(ML3, A, p.F, p.S, 2)
    p = refine_phi_to_psi(ML3, A, phi_approx(ML3, A, 0), 3)
    assert p.steps_up == () and p.steps_down == ()


@pytest.mark.parametrize("g", suite(), ids=lambda g: g.name)
@pytest.mark.parametrize("method", ["greedy", "refine"])
def test_built_quadruples_valid(g, method):
    d = g.regular_degree or g.max_degree
    for seed in range(30):
        A = random_linked_set(g, random.Random(seed))
        psi = seed % (d + 1)
        assert validate_quadruple(g, A, build_quadruple(g, A, psi, seed, method)).ok


@settings(max_examples=60, deadline=None)
@given(bipartite_graphs(max_side=5), st.data())
def test_built_quadruples_property(g, data):
    A = data.draw(st.sampled_from([S for S, _ in linked_set_table(g)]))
    d = g.max_degree
    psi = data.draw(st.integers(0, d))
    seed = data.draw(st.integers(0, 1000))
    for method in ("greedy", "refine"):
        assert validate_quadruple(g, A, build_quadruple(g, A, psi, seed, method)).ok


def test_b_side_empty():
    assert b_side_pair(C6, {0}, 1, 0) == (fs(), fs())


def test_reconstruction_examples():
    q = exact_quadruple(C6, {0, 1})
    r = reconstruction_enumerate(C6, q, (3, 3, 1, 2))
    assert fs({0, 1}) in r.sets and 1 <= r.count <= 4
    assert reconstruction_enumerate(C6, q, (3, 1, 2, 2)).count == 0


@pytest.mark.parametrize("g", [C6, ML2, ML3], ids=lambda g: g.name)
def test_reconstruction_self_consistent(g):
    for A, s in linked_set_table(g):
        r = reconstruction_enumerate(g, exact_quadruple(g, A), (s.a_prime, s.g, s.b, s.h))
        assert A in r.sets and r.count <= 2 ** (s.g - s.b)


@pytest.mark.parametrize("g", [C6, ML2, ML3, builtin_graph("Q3")], ids=lambda g: g.name)
def test_family_envelope(g):
    assert family_envelope(g).passed


def test_family_envelope_needs_the_size_hypothesis():
    # keys with [A] = whole side exceed 2^(g-b) on ml-d3; they are outside a' <= 3n/4
    over = [k for k, c in family_sizes(ML3).items() if c > 2 ** (k[1] - k[2])]
    assert over and all(k[0] == 10 for k in over)


def test_budget_examples():
    b = reconstruction_budget(3, 1, 0, 0, 3, 1, 2)
    assert b.q_tight and b.s_tight and b.log_budget == 2
    b = reconstruction_budget(3, 1, 0, 1, 3, 1, 2)
    assert b.q_tight and b.log_budget <= 2
    with pytest.raises(ValueError):
        reconstruction_budget(1, 3, 0, 0, 1, 1, 2)


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 10), st.integers(0, 10), st.integers(0, 40), st.integers(0, 40), st.integers(2, 64))
def test_budget_envelope_property(g, b, t1, t2, s, q, d):
    if b > g:
        return
    assert reconstruction_budget(g, b, t1, t2, s, q, d).log_budget <= g - b


def test_quad_text_roundtrip():
    q = exact_quadruple(C6, {0, 1}, 1)
    assert load_quad(dump_quad(q)) == q
    assert dump_quad(q).splitlines()[0] == "quad 1 psi=1"
    with pytest.raises(GraphFormatError):
        load_quad("quad 2\n")
    with pytest.raises(GraphFormatError):
        load_quad("quad 1 psi=0\nF 1\n")


def test_default_psi():
    assert default_psi(ML3) == 2 and default_psi(builtin_graph("ml-d4")) == 2
