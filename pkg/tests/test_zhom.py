import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from strategies import bipartite_graphs
from heightlab.errors import BudgetExceeded, GraphFormatError
from heightlab.graph import builtin_graph, generate_cycle, generate_path, suite
from heightlab.zhom import (
    ExactSampler, LegalLabeling, ZHomomorphism, all_expansions, count_expansions, count_homs_bruteforce,
    count_homs_via_weights, dump_hom, dump_labeling, enumerate_homs, enumerate_labelings, exact_sample,
    expand_labeling, hom_range, hom_to_labeling, is_legal_labeling, labeling_weight, load_hom,
    load_labeling, validate_hom,
)

C6 = generate_cycle(6)


def cyc(*vals):
    """Homomorphism of C6 from values around the cycle v0..v5."""
    return ZHomomorphism(tuple(vals[0::2]), tuple(vals[1::2]))


def oracle_count(g):
    n_e = g.n_e
    return oracles.count_homs(g.n_e + g.n_o, [(u, n_e + w) for u, w in g.edges()])


def test_validate_examples():
    h = ZHomomorphism((0,), (1,))
    assert validate_hom(builtin_graph("edge"), h) and hom_range(h) == 2
    h = cyc(0, 1, 2, 1, 2, 1)
    assert validate_hom(C6, h) and hom_range(h) == 3
    assert not validate_hom(C6, cyc(0, 1, 0, 1, 0, 2))


def test_labeling_of_hom():
    assert hom_to_labeling(C6, cyc(0, 1, 2, 1, 2, 1)).values == (0, 1, 1)
    assert hom_to_labeling(C6, cyc(0, 1, 0, 1, 0, 1)).values == (0, 0, 0)


def test_weights_c6():
    assert labeling_weight(C6, (0, 0, 0)) == 8
    assert labeling_weight(C6, (0, 1, 1)) == 2
    assert labeling_weight(C6, (0, 1, 0)) == 2


def test_labeling_enumeration_small():
    fs = list(enumerate_labelings(C6))
    assert len(fs) == 7
    assert sorted(labeling_weight(C6, f) for f in fs) == [2] * 6 + [8]
    assert [f.values for f in enumerate_labelings(builtin_graph("edge"))] == [(0,)]
    assert len(list(enumerate_labelings(builtin_graph("P4")))) == 3


def test_c6_labelings_match_oracle():
    # pairs in {-1,0,1}^2 with |difference| <= 1 (every pair of E-vertices of C6 is at distance 2)
    want = {(0, a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if abs(a - b) <= 1}
    assert {f.values for f in enumerate_labelings(C6)} == want


@pytest.mark.parametrize("g", suite(), ids=lambda g: g.name)
def test_counting_identity(g):
    w = count_homs_via_weights(g)
    assert w == count_homs_bruteforce(g) == oracle_count(g)


def test_pinned_counts():
    assert count_homs_via_weights(C6) == oracles.cycle_hom_count(6) == 20
    assert count_homs_via_weights(builtin_graph("C8")) == oracles.cycle_hom_count(8)
    assert count_homs_via_weights(builtin_graph("edge")) == 2
    assert count_homs_via_weights(builtin_graph("P4")) == 8


@settings(max_examples=60, deadline=None)
@given(bipartite_graphs(max_side=4))
def test_counting_identity_property(g):
    assert count_homs_via_weights(g) == count_homs_bruteforce(g) == oracle_count(g)


@settings(max_examples=40, deadline=None)
@given(bipartite_graphs(max_side=4), st.data())
def test_hom_labeling_roundtrip_property(g, data):
    homs = list(enumerate_homs(g))
    h = data.draw(st.sampled_from(homs))
    f = hom_to_labeling(g, h)
    assert is_legal_labeling(g, f)
    assert h in set(all_expansions(g, f))


@pytest.mark.parametrize("g", suite(), ids=lambda g: g.name)
def test_expansions_equal_weight(g):
    for f in enumerate_labelings(g):
        assert count_expansions(g, f) == labeling_weight(g, f)


def test_expansion_examples():
    assert count_expansions(C6, (0, 0, 0)) == 8
    for seed in range(10):
        h = expand_labeling(C6, LegalLabeling((0, 0, 0)), seed)
        assert validate_hom(C6, h) and hom_range(h) <= 3
    hs = list(all_expansions(C6, LegalLabeling((0, 1, 1))))
    assert len(hs) == 2
    # v1 = O0 (between v0 and v2) and v5 = O2 (between v4 and v0) are forced to 1
    assert all(h.o[0] == 1 and h.o[2] == 1 for h in hs)


def test_brute_force_set_equals_expansions():
    for g in (C6, builtin_graph("Q3"), builtin_graph("ml-d2")):
        via = {h for f in enumerate_labelings(g) for h in all_expansions(g, f)}
        assert via == set(enumerate_homs(g))


def test_exact_sampler_uniform_c6():
    s = ExactSampler(C6)
    hist = Counter(s.samples(100_000, seed=0))
    assert len(hist) == 20
    sigma = (100_000 * (1 / 20) * (19 / 20)) ** 0.5
    assert all(abs(c - 5000) <= 3 * sigma for c in hist.values())


def test_exact_sampler_small_graphs():
    hist = Counter(ExactSampler(builtin_graph("edge")).samples(10_000, seed=1))
    assert len(hist) == 2 and all(abs(c - 5000) < 300 for c in hist.values())
    hist = Counter(ExactSampler(builtin_graph("P4")).samples(16_000, seed=1))
    assert len(hist) == 8 and all(abs(c - 2000) < 200 for c in hist.values())
    assert validate_hom(C6, exact_sample(C6, seed=5))


def test_budget():
    with pytest.raises(BudgetExceeded):
        count_homs_via_weights(builtin_graph("ml-d4"), budget=1000)


def test_text_roundtrip():
    h = cyc(0, 1, 2, 1, 2, 1)
    assert load_hom(dump_hom(h), C6) == h
    f = LegalLabeling((0, 1, 1))
    assert load_labeling(dump_labeling(f), C6) == f
    with pytest.raises(GraphFormatError):
        load_hom("zl 1\n", C6)
    with pytest.raises(ValueError):
        load_hom("zh 1\nE 0 0\n", C6)
