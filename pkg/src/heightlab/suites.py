"""Exhaustive check suites over the built-in graph list."""

from __future__ import annotations

import random
from itertools import combinations
from typing import Callable

from .containers import (
    build_quadruple,
    default_psi,
    exact_quadruple,
    family_envelope,
    linked_set_table,
    random_linked_set,
    reconstruction_enumerate,
    validate_quadruple,
)
from .graph import BipartiteGraph, Side, Vertex, builtin_graph, suite
from .merge import (
    Kind,
    build_witness,
    check_potential_drop,
    exact_level,
    find_components,
    greedy_level,
    labeling_id,
    merge,
    value_count_audit,
    verify_witness,
)
from .errors import WitnessFailure
from .reports import AuditRow, Report
from .spectral import (
    check_expansion_34,
    check_kruskal_katona,
    count_linked_supersets,
    lovasz_stein_cover,
    scan_middle_layer_iso,
    check_tanner,
)
from .zhom import all_expansions, count_homs_bruteforce, count_homs_via_weights, enumerate_labelings


def _row(graph, check, detail, ok, lid="-"):
    return AuditRow(graph.name, lid, check, detail, bool(ok))


def counting_suite(graphs: list[BipartiteGraph] | None = None) -> Report:
    rep = Report("counting")
    for g in graphs or suite():
        w = count_homs_via_weights(g)
        b = count_homs_bruteforce(g)
        rep.add(_row(g, "weights_eq_brute", f"{w}={b}", w == b))
    return rep


def merge_suite(graphs: list[BipartiteGraph] | None = None) -> Report:
    """Weight identity and potential drop for every (labeling, maximum component)."""
    rep = Report("merge")
    for g in graphs or suite():
        pairs = drops = 0
        for f in enumerate_labelings(g):
            for comp in find_components(g, f, Kind.MAX):
                pairs += 1
                lid = labeling_id(f)
                try:
                    merge(g, f, comp.vertices)
                except AssertionError as exc:
                    rep.add(_row(g, "merge_identity", f"K={sorted(comp.vertices)}: {exc}", False, lid))
                    continue
                if len(comp.vertices) < g.n_e:
                    drops += 1
                    pd = check_potential_drop(g, f, comp.vertices)
                    if not pd.ok:
                        rep.add(_row(g, "potential_drop", f"K={sorted(comp.vertices)} {pd}", False, lid))
        rep.add(_row(g, "merge_identity", f"{pairs} pairs, {drops} proper", True))
    return rep


def containers_suite(graphs: list[BipartiteGraph] | None = None, seeds: int = 20) -> Report:
    rep = Report("containers")
    for g in graphs or suite():
        d = g.regular_degree or g.max_degree
        table = linked_set_table(g)
        bad = 0
        for A, s in table:
            for psi in range(d + 1):
                chk = validate_quadruple(g, A, exact_quadruple(g, A, psi))
                if not chk.ok:
                    bad += 1
                    rep.add(_row(g, "exact_quadruple", f"A={sorted(A)} psi={psi} {chk.conditions}", False))
        rep.add(_row(g, "exact_quadruple", f"{len(table)} sets x {d + 1} psi, {bad} invalid", bad == 0))
        bad = 0
        for seed in range(seeds):
            A = random_linked_set(g, random.Random(seed))
            psi = default_psi(g)
            for method in ("greedy", "refine"):
                try:
                    chk = validate_quadruple(g, A, build_quadruple(g, A, psi, seed, method))
                    ok = chk.ok
                except AssertionError:
                    ok = False
                if not ok:
                    bad += 1
                    rep.add(_row(g, f"{method}_quadruple", f"A={sorted(A)} seed={seed}", False))
        rep.add(_row(g, "built_quadruples", f"{2 * seeds} built, {bad} invalid", bad == 0))
        missing = 0
        for A, s in table:
            r = reconstruction_enumerate(g, exact_quadruple(g, A), (s.a_prime, s.g, s.b, s.h), check_envelope=False)
            if not r.envelope.passed:
                rep.add(r.envelope)
            missing += A not in r.sets
        rep.add(_row(g, "reconstruction_self", f"{len(table)} sets, {missing} not recovered", missing == 0))
        if g.regular_degree is not None:
            env = family_envelope(g)
            rep.extend(r for r in env.rows if not r.passed)
            rep.add(_row(g, "family_envelope", f"{len(env.rows)} keys; {env.notes[0]}", env.passed))
    return rep


def tanner_suite(graphs: list[BipartiteGraph] | None = None) -> Report:
    rep = Report("tanner")
    graphs = graphs or suite()
    for g in graphs:
        if g.regular_degree is None or g.n_e != g.n_o:
            rep.notes.append(f"{g.name}: skipped (not balanced regular)")
            continue
        rep.merge(check_tanner(g))
        rep.merge(check_expansion_34(g))
    return rep


def kk_suite(max_iso_d: int = 3) -> Report:
    rep = Report("kk")
    triples = list(combinations(range(5), 3))
    for mask in range(1, 1 << len(triples)):
        fam = [triples[i] for i in range(len(triples)) if mask >> i & 1]
        row = check_kruskal_katona(fam, 1)
        if not row.passed:
            rep.add(row)
    rep.add(AuditRow("[5]", "-", "kruskal_katona", f"{(1 << len(triples)) - 1} families of triples", rep.passed))
    for d in range(2, max_iso_d + 1):
        rep.merge(scan_middle_layer_iso(d))
    return rep


def cover_suite(graphs: list[BipartiteGraph] | None = None, trials: int = 20) -> Report:
    rep = Report("cover")
    for g in graphs or suite():
        for side in (Side.E, Side.O):
            rep.add(lovasz_stein_cover(g, side=side)[1])
        rng = random.Random(0)
        for _ in range(trials):
            T = [i for i in range(g.n_e) if rng.random() < 0.5] or [0]
            rep.add(lovasz_stein_cover(g, T, g.nbhd(Side.E, T))[1])
    return rep


def linked_suite(graphs: list[BipartiteGraph] | None = None, max_t: int = 4) -> Report:
    rep = Report("linked")
    for g in graphs or suite():
        for k in (1, 2):
            for t in range(1, max_t + 1):
                rep.add(count_linked_supersets(g, Vertex(Side.E, 0), k, t)[1])
    return rep


def goodness_suite(c: float = 0.1) -> Report:
    """Value counts on middle layers (d = 2, 3); levels and witnesses on small graphs."""
    rep = Report("goodness")
    for name in ("ml-d2", "ml-d3"):
        g = builtin_graph(name)
        fails = homs = 0
        for f in enumerate_labelings(g):
            for h in all_expansions(g, f):
                homs += 1
                r = value_count_audit(g, h, c)
                if not r.passed:
                    fails += 1
                    rep.extend(r.violations)
        rep.add(_row(g, "value_count", f"{homs} homs, {fails} failing", fails == 0))
    for name in ("C6", "C8", "ml-d2", "ml-d3"):
        g = builtin_graph(name)
        bad = wit = 0
        for f in enumerate_labelings(g):
            if g.n_e <= 4 and exact_level(g, f, c) > greedy_level(g, f, c):
                bad += 1
            m = max(f.values)
            x = f.values.index(m)
            for t in (1, 2):
                try:
                    w = build_witness(g, f, x, t)
                except WitnessFailure:
                    continue
                wit += 1
                vr = verify_witness(g, w)
                if not vr.passed:
                    bad += 1
                    rep.extend(vr.violations)
        rep.add(_row(g, "levels_and_witnesses", f"{wit} witnesses, {bad} failures", bad == 0))
    return rep


SUITES: dict[str, Callable[[], Report]] = {
    "counting": counting_suite,
    "merge": merge_suite,
    "containers": containers_suite,
    "tanner": tanner_suite,
    "kk": kk_suite,
    "cover": cover_suite,
    "linked": linked_suite,
    "goodness": goodness_suite,
}


def run_suite(name: str) -> Report:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn()
