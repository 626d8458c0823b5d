from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from strategies import bipartite_graphs
from heightlab.errors import WitnessFailure
from heightlab.graph import Side, builtin_graph, closure, generate_biregular, generate_cycle, interior, is_2linked
from heightlab.merge import (
    Kind, LevelWitness, build_witness, check_potential_drop, classify_good, cross_pairs, enlarged_component,
    exact_level, find_components, good_weight_ratio, greedy_level, is_component, layer_labelings, merge,
    potential, value_count_audit, verify_witness,
)
from heightlab.sampler import SamplerConfig, run_chain
from heightlab.zhom import LegalLabeling, ZHomomorphism, all_expansions, enumerate_labelings, hom_to_labeling, labeling_weight

C6 = generate_cycle(6)
ML2 = builtin_graph("ml-d2")
ML3 = builtin_graph("ml-d3")


def comps(g, f, kind):
    return [sorted(c.vertices) for c in find_components(g, f, kind)]


def test_components_c6():
    # E-indices 0, 1, 2 are v0, v2, v4
    assert comps(C6, (0, 1, 1), Kind.MAX) == [[0, 1, 2], [1, 2]]
    assert [0] in comps(C6, (0, 1, 1), Kind.MIN)
    assert comps(C6, (0, 0, 0), Kind.MAX) == comps(C6, (0, 0, 0), Kind.MIN) == [[0, 1, 2]]
    assert [1] in comps(C6, (0, 1, 0), Kind.MAX)
    assert [0, 2] in comps(C6, (0, 1, 0), Kind.MIN)


def brute_components(g, f, kind):
    """Every 2-linked plateau set strictly above (below) its distance-2 boundary, by subset scan."""
    out = []
    d2 = g.dist2(Side.E)
    for mask in range(1, 1 << g.n_e):
        K = frozenset(i for i in range(g.n_e) if mask >> i & 1)
        if not is_2linked(g, Side.E, K):
            continue
        bd = {y for x in K for y in d2[x]} - K
        if kind is Kind.MAX:
            lo = min(f[x] for x in K)
            ok = all(f[y] < lo for y in bd)
        else:
            hi = max(f[x] for x in K)
            ok = all(f[y] > hi for y in bd)
        if ok:
            out.append(sorted(K))
    return sorted(out)


@pytest.mark.parametrize("g", [C6, builtin_graph("C8"), ML2, builtin_graph("Q3")], ids=lambda g: g.name)
def test_components_match_subset_scan(g):
    for f in enumerate_labelings(g):
        for kind in Kind:
            assert sorted(comps(g, f, kind)) == brute_components(g, f.values, kind)


def test_merge_examples():
    tr = merge(C6, LegalLabeling((0, 1, 1)), {1, 2})
    assert tr.after.values == (0, 0, 0) and not tr.root_inside
    assert len(C6.nbhd(Side.E, {1, 2})) == 3 and len(interior(C6, Side.E, {1, 2})) == 1
    assert labeling_weight(C6, tr.after) == 8 == 2 * 2 ** 2
    tr = merge(C6, LegalLabeling((0, 0, -1)), {0, 1})
    assert tr.after.values == (0, 0, 0) and tr.root_inside
    tr = merge(C6, LegalLabeling((0, 0, 0)), {0, 1, 2})
    assert tr.after.values == (0, 0, 0) and tr.weight_log_delta == 0
    with pytest.raises(ValueError):
        merge(C6, LegalLabeling((0, 1, 1)), {0})


@pytest.mark.parametrize("g", [C6, builtin_graph("C8"), ML2, ML3], ids=lambda g: g.name)
def test_merge_weight_identity_exhaustive(g):
    for f in enumerate_labelings(g):
        for c in find_components(g, f, Kind.MAX):
            tr = merge(g, f, c.vertices)
            K = c.vertices
            delta = len(g.nbhd(Side.E, K)) - len(interior(g, Side.E, K))
            assert Fraction(labeling_weight(g, tr.after), labeling_weight(g, f)) == Fraction(2) ** delta
            assert tr.after.values[0] == 0


def test_potential_examples():
    f = LegalLabeling((0, 1, 1))
    assert potential(C6, f) == 4
    pd = check_potential_drop(C6, f, {1, 2})
    assert (pd.before, pd.after, pd.cross) == (4, 0, 4) and pd.ok
    assert potential(C6, (0, 0, 0)) == 0
    assert potential(C6, (0, 1, 0)) == 4
    with pytest.raises(ValueError):
        check_potential_drop(C6, LegalLabeling((0, 0, 0)), {0, 1, 2})


@settings(max_examples=60, deadline=None)
@given(bipartite_graphs(max_side=4), st.data())
def test_merge_property(g, data):
    f = data.draw(st.sampled_from(list(enumerate_labelings(g))))
    for c in find_components(g, f, Kind.MAX):
        tr = merge(g, f, c.vertices)
        assert tr.after.values[f.root] == 0
        if len(c.vertices) < g.n_e:
            pd = check_potential_drop(g, f, c.vertices)
            assert pd.ok and pd.cross == cross_pairs(g, c.vertices) > 0


def test_min_components_via_swapped_side():
    f = LegalLabeling((0, 1, 1))
    # a min component of f is a max component of -f
    neg = tuple(-x for x in f.values)
    assert sorted(comps(C6, f, Kind.MIN)) == sorted(comps(C6, neg, Kind.MAX))


def test_witness_examples():
    f = LegalLabeling((0, 1, 1))
    rep = verify_witness(C6, LevelWitness(f, 1, (frozenset({1, 2}),)))
    assert not rep.passed
    assert [r.check for r in rep.violations] == ["closure_3n4"]
    assert verify_witness(C6, LevelWitness(f, 1, ())).passed
    with pytest.raises(WitnessFailure):
        build_witness(C6, f, 1, 1)
    with pytest.raises(WitnessFailure):
        build_witness(C6, LegalLabeling((0, 0, 0)), 0, 1)


def test_witness_on_biregular_samples():
    g = generate_biregular(32, 4, seed=2)
    built = 0
    for h in run_chain(g, 0, SamplerConfig(200, 5, 40, seed=3)):
        f = hom_to_labeling(g, h)
        if max(f.values) == min(f.values):
            continue
        x = f.values.index(max(f.values))
        for t in (1, 2, 3):
            try:
                w = build_witness(g, f, x, t)
            except WitnessFailure:
                break
            assert verify_witness(g, w).passed
            built += 1
    assert built > 0


def test_goodness_examples():
    g = classify_good(ML2, (0, 1, 1), Side.E)
    assert g.max_good
    g = classify_good(ML2, (0, 0, 0), Side.E)
    assert g.max_good and g.min_good


def test_isolated_peaks_break_max_goodness_d3():
    for f in enumerate_labelings(ML3):
        for c in find_components(ML3, f, Kind.MAX):
            K = c.vertices
            if len(K) >= 2 and len(closure(ML3, Side.E, K)) <= 9:
                assert not classify_good(ML3, f, Side.E).max_good


def test_enlarged_component():
    assert enlarged_component(C6, (0, 1, 1), {1, 2}).vertices == {0, 1, 2}
    assert enlarged_component(C6, (0, 1, 0), {1}).vertices == {0, 1, 2}
    assert enlarged_component(C6, (0, 0, 0), {0, 1, 2}).vertices == {0, 1, 2}


def test_layer_labelings():
    h = ZHomomorphism((0, 2, -2), (1, -1, 3))
    assert layer_labelings(h) == ((0, 1, -1), (1, 0, 2))


@pytest.mark.parametrize("g", [ML2, ML3], ids=lambda g: g.name)
def test_value_count_exhaustive(g):
    n = 0
    for f in enumerate_labelings(g):
        for h in all_expansions(g, f):
            n += 1
            assert value_count_audit(g, h).passed
    assert n == {3: 20, 10: 11876}[g.n_e]


def test_value_count_alternating():
    h = ZHomomorphism((0, 0, 0), (1, 1, 1))
    rep = value_count_audit(ML2, h)
    assert rep.passed and all("hyp=True" in r.detail for r in rep.rows)


@pytest.mark.parametrize("g", [C6, builtin_graph("C8"), ML2], ids=lambda g: g.name)
def test_levels(g):
    for f in enumerate_labelings(g):
        assert 0 <= exact_level(g, f) <= greedy_level(g, f)
    assert good_weight_ratio(g) >= 1
