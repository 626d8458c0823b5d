"""Approximating quadruples, mutual covers, phi-approximations and reconstruction counts.

Sets are frozensets of indices: F and Q on the O-side, S and P on the E-side.
Degree thresholds are per vertex, ``deg(x) - psi``, which coincides with
``d - psi`` on d-regular graphs and keeps the exact quadruple valid on the
non-regular members of the test suite.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

from .errors import BudgetExceeded, GraphFormatError
from .graph import (
    AssociatedSets,
    BipartiteGraph,
    Side,
    Vertex,
    as_indices,
    associated_sets,
    closure,
    is_2linked,
    k_linked_components,
    linked_subsets,
)
from .reports import BoundRow, Report
from .spectral import lovasz_stein_cover


class ApproxQuadruple(NamedTuple):
    F: frozenset[int]
    S: frozenset[int]
    P: frozenset[int]
    Q: frozenset[int]
    psi: int


@dataclass(frozen=True)
class QuadCheck:
    conditions: tuple[bool, bool, bool, bool, bool, bool]
    margins: dict[int, float]  # condition -> min degree surplus (inf if vacuous)

    @property
    def ok(self) -> bool:
        return all(self.conditions)

    def holds(self, *which: int) -> bool:
        return all(self.conditions[i - 1] for i in which)


def _degree(graph: BipartiteGraph, side: Side, x: int) -> int:
    return len(graph.adj(side)[x])


def _d_in(graph: BipartiteGraph, side: Side, x: int, T: frozenset[int] | set[int]) -> int:
    return sum(1 for y in graph.adj(side)[x] if y in T)


def _regular_or_max(graph: BipartiteGraph) -> int:
    return graph.regular_degree or graph.max_degree


def default_psi(graph: BipartiteGraph) -> int:
    return math.ceil(math.sqrt(_regular_or_max(graph)))


def _min_margin(graph, side, members, inside, psi) -> float:
    """min over x in members of d_inside(x) - (deg(x) - psi)."""
    m = math.inf
    for x in members:
        m = min(m, _d_in(graph, side, x, inside) - (_degree(graph, side, x) - psi))
    return m


def _pair_conditions(graph: BipartiteGraph, F, S, psi: int) -> tuple[float, float]:
    """Margins of the two degree conditions of an approximating pair (F on O, S on E)."""
    m2 = _min_margin(graph, Side.E, S, F, psi)
    notS = frozenset(range(graph.n_e)) - S
    m3 = _min_margin(graph, Side.O, frozenset(range(graph.n_o)) - F, notS, psi)
    return m2, m3


def validate_quadruple(graph: BipartiteGraph, A: Iterable[int], quad: ApproxQuadruple) -> QuadCheck:
    """The six conditions, relative to A (on the E-side)."""
    assoc = associated_sets(graph, A)
    F, S, P, Q, psi = quad
    c1 = F <= assoc.G and S >= assoc.closure
    c4 = P <= assoc.H and Q >= assoc.B
    m2, m3 = _pair_conditions(graph, F, S, psi)
    # (5),(6) are the pair conditions of (P, Q) seen from the O-side
    m5 = _min_margin(graph, Side.O, Q, P, psi)
    notQ = frozenset(range(graph.n_o)) - Q
    m6 = _min_margin(graph, Side.E, frozenset(range(graph.n_e)) - P, notQ, psi)
    conds = (c1, m2 >= 0, m3 >= 0, c4, m5 >= 0, m6 >= 0)
    return QuadCheck(conds, {2: m2, 3: m3, 5: m5, 6: m6})


def pair_ok(graph: BipartiteGraph, A: frozenset[int], F: frozenset[int], S: frozenset[int], psi: int) -> bool:
    """(F, S) approximates A: conditions (1)-(3)."""
    G = graph.nbhd(Side.E, A)
    if not (F <= G and S >= closure(graph, Side.E, A)):
        return False
    m2, m3 = _pair_conditions(graph, F, S, psi)
    return m2 >= 0 and m3 >= 0


def exact_quadruple(graph: BipartiteGraph, A: Iterable[int | Vertex], psi: int = 0) -> ApproxQuadruple:
    """(G, [A], H, B): valid for every psi >= 0."""
    A = as_indices(graph, A, Side.E)
    assoc = associated_sets(graph, A)
    quad = ApproxQuadruple(assoc.G, assoc.closure, assoc.H, assoc.B, psi)
    assert validate_quadruple(graph, A, quad).ok
    return quad


# --------------------------------------------------------------------------
# Mutual covers and the greedy psi-pair
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MutualCover:
    cover: frozenset[int]
    random_part: frozenset[int]
    patch: frozenset[int]
    attempts: int
    fallback: bool
    size_ok: bool  # |cover| <= (2 ln d + 2) g / d


def is_mutual_cover(graph: BipartiteGraph, X: Iterable[int], Y: Iterable[int]) -> bool:
    X, Y = frozenset(X), frozenset(Y)
    return X <= graph.nbhd(Side.O, Y) and Y <= graph.nbhd(Side.E, X)


def randomized_mutual_cover(graph: BipartiteGraph, A: Iterable[int], seed: int, *, max_retries: int = 1000) -> MutualCover:
    """Random subset of G at rate ln d / d, retried until both expectation targets
    hold, then one G-neighbour for each uncovered vertex of [A]."""
    A = frozenset(A)
    X = closure(graph, Side.E, A)
    G = sorted(graph.nbhd(Side.E, A))
    g = len(G)
    d = _regular_or_max(graph)
    p = math.log(d) / d
    rng = random.Random(seed)
    Y: frozenset[int] | None = None
    attempts = 0
    for attempts in range(1, max_retries + 1):
        cand = frozenset(y for y in G if rng.random() < p)
        U = X - graph.nbhd(Side.O, cand)
        if len(cand) <= 2 * g * p and len(U) <= 2 * g / d:
            Y = cand
            break
    fallback = Y is None
    if fallback:
        Y = frozenset(lovasz_stein_cover(graph, X, G)[0])
    U = X - graph.nbhd(Side.O, Y)
    patch = frozenset(min(graph.adj_e[u]) for u in U)
    cover = Y | patch
    assert is_mutual_cover(graph, X, cover)
    size_ok = len(cover) <= (2 * math.log(d) + 2) * g / d + 1e-9
    return MutualCover(cover, Y, patch, attempts, fallback, size_ok)


@dataclass(frozen=True)
class PsiPair:
    F: frozenset[int]
    S: frozenset[int]
    psi: int
    steps_up: tuple[int, ...]  # E-vertices whose neighbourhoods were added to F
    steps_down: tuple[int, ...]  # O-vertices whose neighbourhoods were removed from S
    notes: tuple[str, ...] = ()


def _finish_pair(graph: BipartiteGraph, Fp: set[int], S: set[int], psi: int) -> frozenset[int]:
    extra = {y for y in range(graph.n_o) if _d_in(graph, Side.O, y, S) > psi}
    return frozenset(Fp | extra)


def greedy_psi_pair(graph: BipartiteGraph, A: Iterable[int], cover: Iterable[int], psi: int) -> PsiPair:
    """Approximating pair grown from a mutual cover of [A].

    F' = cover plus the neighbourhoods of greedily chosen vertices of [A]
    with more than psi uncovered G-neighbours; S' = vertices with at most
    psi neighbours outside F'; S shrinks by neighbourhoods of greedily chosen
    O-vertices outside G with more than psi neighbours in S; finally F adds
    every O-vertex with more than psi neighbours in S.
    """
    A = frozenset(A)
    if psi < 0:
        raise ValueError("psi must be >= 0")
    X = closure(graph, Side.E, A)
    G = graph.nbhd(Side.E, A)
    g = len(G)
    Fp = set(cover)
    assert Fp <= G
    ups = []
    while True:
        best = None
        for x in sorted(X):
            gain = _d_in(graph, Side.E, x, G - Fp)
            if gain > psi and (best is None or gain > best[0]):
                best = (gain, x)
        if best is None:
            break
        gain, x = best
        assert gain >= psi
        Fp.update(graph.adj_e[x])
        ups.append(x)
    if psi >= 1:
        assert len(ups) <= g / psi
    S = {x for x in range(graph.n_e) if _d_in(graph, Side.E, x, Fp) >= _degree(graph, Side.E, x) - psi}
    assert X <= S
    notes = []
    d = graph.regular_degree
    if d is not None and psi < d and len(S) > d / (d - psi) * g + 1e-9:
        notes.append(f"|S'|={len(S)} exceeds d/(d-psi) g")
    outside = [y for y in range(graph.n_o) if y not in G]
    downs = []
    while True:
        best = None
        for y in outside:
            k = _d_in(graph, Side.O, y, S)
            if k > psi and (best is None or k > best[0]):
                best = (k, y)
        if best is None:
            break
        _, y = best
        S.difference_update(graph.adj_o[y])
        downs.append(y)
    assert X <= S
    F = _finish_pair(graph, Fp, S, psi)
    S = frozenset(S)
    assert pair_ok(graph, A, F, S, psi), "greedy pair violates the approximation conditions"
    return PsiPair(F, S, psi, tuple(ups), tuple(downs), tuple(notes))


# --------------------------------------------------------------------------
# phi-approximation and the two-step refinement
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiApprox:
    Fprime: frozenset[int]
    phi: float
    T0: frozenset[int]
    T0prime: frozenset[int]
    T1: frozenset[int]
    p: float
    attempts: int
    fallback: bool
    claim_ok: bool
    t1_bound_ok: bool


def high_degree_part(graph: BipartiteGraph, A: frozenset[int], phi: float) -> frozenset[int]:
    """{y in G : d_[A](y) > phi}."""
    X = closure(graph, Side.E, A)
    G = graph.nbhd(Side.E, A)
    return frozenset(y for y in G if _d_in(graph, Side.O, y, X) > phi)


def is_phi_approx(graph: BipartiteGraph, A: frozenset[int], Fp: frozenset[int], phi: float) -> bool:
    G = graph.nbhd(Side.E, A)
    X = closure(graph, Side.E, A)
    return high_degree_part(graph, A, phi) <= Fp <= G and graph.nbhd(Side.O, Fp) >= X


def phi_approx(
    graph: BipartiteGraph,
    A: Iterable[int],
    seed: int,
    *,
    phi: float | None = None,
    anchor: int | None = None,
    max_retries: int = 1000,
) -> PhiApprox:
    """phi-approximation F' of A built from a random seed set T0 of G.

    T0 is a p-random subset of G (p = 20 ln d / (phi d), clipped to 1) plus
    an anchor vertex of G, redrawn until the size, edge-count and miss-count
    targets hold (T0 = G as fallback).  Then T0' = G^phi \\ N(N_[A](T0)),
    L = N(N_[A](T0)) | T0', T1 = greedy cover of [A] \\ N(L) from G \\ L, and
    F' = L | T1.
    """
    A = frozenset(A)
    d = _regular_or_max(graph)
    phi = d / 2 if phi is None else phi
    X = closure(graph, Side.E, A)
    G = graph.nbhd(Side.E, A)
    g, a1 = len(G), len(X)
    t1 = g - a1
    Gphi = high_degree_part(graph, A, phi)
    p = min(1.0, 20 * math.log(d) / (phi * d)) if d > 1 else 0.0
    anchor = min(G) if anchor is None else anchor
    if anchor not in G:
        raise ValueError("anchor must lie in N(A)")
    notA = frozenset(range(graph.n_e)) - X
    rng = random.Random(seed)
    Gs = sorted(G)

    def reach(T0):
        return graph.nbhd(Side.E, graph.nbhd(Side.O, T0) & X)

    T0 = None
    attempts = 0
    for attempts in range(1, max_retries + 1):
        cand = frozenset(y for y in Gs if rng.random() < p) | {anchor}
        edges_out = sum(_d_in(graph, Side.O, y, notA) for y in cand)
        miss = len(Gphi - reach(cand))
        if len(cand) <= 4 * g * p and edges_out <= 4 * t1 * d * p and miss <= 3 * g / d ** 10:
            T0 = cand
            break
    fallback = T0 is None
    if fallback:
        T0 = G
    L0 = reach(T0)
    T0p = Gphi - L0
    L = L0 | T0p
    rest = X - graph.nbhd(Side.O, L)
    T1 = frozenset(lovasz_stein_cover(graph, rest, G - L)[0]) if rest else frozenset()
    Fp = L | T1
    assert is_phi_approx(graph, A, Fp, phi), "phi-approximation invariant failed"
    if is_2linked(graph, Side.E, A) and len(Fp) > 1:
        verts = [Vertex(Side.O, y) for y in Fp]
        assert len(k_linked_components(graph, verts, 4)) == 1, "F' is not 4-linked"
    claim_ok = (
        anchor in T0
        and len(T0) <= 4 * g * p
        and sum(_d_in(graph, Side.O, y, notA) for y in T0) <= 4 * t1 * d * p
        and len(Gphi - L0) <= 3 * g / d ** 10
    )
    t1_ok = phi >= d or len(T1) <= t1 / (d - phi) * (1 + math.log(d)) + 1e-9
    return PhiApprox(Fp, phi, T0, T0p, T1, p, attempts, fallback, claim_ok, t1_ok)


def refine_phi_to_psi(graph: BipartiteGraph, A: Iterable[int], approx: PhiApprox, psi: int) -> PsiPair:
    """Two-step refinement of a phi-approximation into an approximating pair.

    Step 1 adds N(u) for the smallest u in [A] with more than psi neighbours
    in G \\ F'; Step 2 removes N(w) from S'' for the smallest O-vertex w
    outside G with more than psi neighbours in S''.  Iteration counts are
    checked against t1 d / ((d - phi) psi) and t1 d / ((d - psi) psi) on
    regular graphs.
    """
    A = frozenset(A)
    X = closure(graph, Side.E, A)
    G = graph.nbhd(Side.E, A)
    g, t1 = len(G), len(G) - len(X)
    if not is_phi_approx(graph, A, approx.Fprime, approx.phi):
        raise ValueError("not a phi-approximation of A")
    d = graph.regular_degree
    Fp = set(approx.Fprime)
    ups = []
    while True:
        u = next((x for x in sorted(X) if _d_in(graph, Side.E, x, G - Fp) > psi), None)
        if u is None:
            break
        Fp.update(graph.adj_e[u])
        ups.append(u)
    S = {x for x in range(graph.n_e) if _d_in(graph, Side.E, x, Fp) >= _degree(graph, Side.E, x) - psi}
    downs = []
    outside = [y for y in range(graph.n_o) if y not in G]
    while True:
        w = next((y for y in outside if _d_in(graph, Side.O, y, S) > psi), None)
        if w is None:
            break
        S.difference_update(graph.adj_o[w])
        downs.append(w)
    if d is not None and psi >= 1:
        if approx.phi < d:
            assert len(ups) <= t1 * d / ((d - approx.phi) * psi) + 1e-9, "step 1 exceeded its iteration cap"
        if psi < d:
            assert len(downs) <= t1 * d / ((d - psi) * psi) + 1e-9, "step 2 exceeded its iteration cap"
        assert len(S) <= d ** 3 * g
    F = _finish_pair(graph, Fp, S, psi)
    S = frozenset(S)
    assert pair_ok(graph, A, F, S, psi), "refined pair violates the approximation conditions"
    return PsiPair(F, S, psi, tuple(ups), tuple(downs))


def b_side_pair(graph: BipartiteGraph, A: Iterable[int], psi: int, seed: int, method: str = "greedy") -> tuple[frozenset[int], frozenset[int]]:
    """(P, Q) for B = B(A), by running the pair construction with the sides exchanged."""
    assoc = associated_sets(graph, A)
    if not assoc.B:
        return frozenset(), frozenset()
    sw = graph.swapped()
    if method == "greedy":
        mc = randomized_mutual_cover(sw, assoc.B, seed)
        pair = greedy_psi_pair(sw, assoc.B, mc.cover, psi)
    elif method == "refine":
        pair = refine_phi_to_psi(sw, assoc.B, phi_approx(sw, assoc.B, seed), psi)
    else:
        raise ValueError(f"unknown method {method!r}")
    return pair.F, pair.S


def build_quadruple(graph: BipartiteGraph, A: Iterable[int], psi: int, seed: int, method: str = "greedy") -> ApproxQuadruple:
    A = frozenset(A)
    if method == "greedy":
        mc = randomized_mutual_cover(graph, A, seed)
        pair = greedy_psi_pair(graph, A, mc.cover, psi)
    else:
        pair = refine_phi_to_psi(graph, A, phi_approx(graph, A, seed), psi)
    P, Q = b_side_pair(graph, A, psi, seed, method)
    return ApproxQuadruple(pair.F, pair.S, P, Q, psi)


def assemble_family(graph: BipartiteGraph, sets: Iterable[Iterable[int]], psi: int, seed: int, method: str = "greedy") -> Counter:
    """Quadruples produced for each A, deduplicated, with multiplicities."""
    fam: Counter = Counter()
    for A in sets:
        quad = build_quadruple(graph, A, psi, seed, method)
        assert validate_quadruple(graph, A, quad).ok
        fam[quad] += 1
    return fam


def random_linked_set(graph: BipartiteGraph, rng: random.Random, side: Side = Side.E, max_size: int | None = None) -> frozenset[int]:
    """A random 2-linked set grown from a random vertex (not uniform)."""
    n = graph.size(side)
    target = rng.randint(1, max_size or n)
    d2 = graph.dist2(side)
    S = {rng.randrange(n)}
    frontier = set(d2[next(iter(S))])
    while len(S) < target and frontier:
        x = rng.choice(sorted(frontier))
        S.add(x)
        frontier.update(d2[x])
        frontier -= S
    return frozenset(S)


# --------------------------------------------------------------------------
# Reconstruction
# --------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _linked_table(graph: BipartiteGraph) -> tuple[tuple[frozenset[int], AssociatedSets], ...]:
    return tuple((A, associated_sets(graph, A)) for A in linked_subsets(graph, Side.E))


def linked_set_table(graph: BipartiteGraph, max_e: int = 14) -> tuple[tuple[frozenset[int], AssociatedSets], ...]:
    """Every nonempty 2-linked E-set with its associated sets."""
    if graph.n_e > max_e:
        raise BudgetExceeded("2-linked subset enumeration", max_e)
    return _linked_table(graph)


@dataclass
class Reconstruction:
    count: int
    sets: list[frozenset[int]]
    envelope: BoundRow


def reconstruction_enumerate(
    graph: BipartiteGraph,
    quad: ApproxQuadruple,
    targets: tuple[int, int, int, int],
    *,
    check_envelope: bool = True,
) -> Reconstruction:
    """2-linked A with (|[A]|, |G|, |B|, |H|) = targets for which quad meets (1) and (4)."""
    a1, g, b, h = targets
    F, S, P, Q, _ = quad
    hits = []
    for A, s in linked_set_table(graph):
        if (s.a_prime, s.g, s.b, s.h) != (a1, g, b, h):
            continue
        if F <= s.G and S >= s.closure and P <= s.H and Q >= s.B:
            hits.append(A)
    hits.sort(key=sorted)
    env = BoundRow.upper("reconstruction", graph.name, f"targets={targets}", 2.0 ** (g - b) if g >= b else 0.0, len(hits))
    if check_envelope:
        assert env.passed, env
    return Reconstruction(len(hits), hits, env)


def family_sizes(graph: BipartiteGraph) -> Counter:
    """|{2-linked A : sizes (a', g, b, h) and v in G}| keyed by (a', g, b, h, v)."""
    out: Counter = Counter()
    for _A, s in linked_set_table(graph):
        for v in s.G:
            out[(s.a_prime, s.g, s.b, s.h, v)] += 1
    return out


def family_envelope(graph: BipartiteGraph) -> Report:
    """|H(a', g, b, h, v)| <= 2^(g-b) for every key with a' <= 3n/4.

    Keys with a' > 3n/4 lie outside the hypothesis of the envelope; they are
    reported in the notes, not asserted.
    """
    rep = Report(f"family_envelope[{graph.name}]")
    outside = 0
    for key, count in sorted(family_sizes(graph).items()):
        a1, g, b, h, v = key
        if 4 * a1 > 3 * graph.n_e:
            outside += count > 2 ** (g - b)
            continue
        rep.add(BoundRow.upper("family_size", graph.name, "a'=%d g=%d b=%d h=%d v=%d" % key, 2.0 ** (g - b), count))
    rep.notes.append(f"{outside} keys with a' > 3n/4 exceed 2^(g-b) (outside the hypothesis)")
    return rep


@dataclass(frozen=True)
class ReconstructionBudget:
    g: int
    b: int
    t1: int
    t2: int
    q_tight: bool
    s_tight: bool
    log_budget: float


def reconstruction_budget(g: int, b: int, t1: int, t2: int, s_size: int, q_size: int, d: int) -> ReconstructionBudget:
    """Tight/slack classification and the matching log2-count exponent.

    Q is tight iff |Q| < b + t2/(10 log d), S is tight iff
    |S| < g - t1/(10 log d) (logs base 2).  A zero defect makes the
    corresponding side tight.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if b > g or min(g, b, t1, t2, s_size, q_size) < 0:
        raise ValueError("inconsistent parameters")
    L = math.log2(d)
    q_tight = t2 == 0 or q_size < b + t2 / (10 * L)
    s_tight = t1 == 0 or s_size < g - t1 / (10 * L)
    if s_tight and q_tight:
        e = g - b - t1 / (10 * L) - t2 / 2
    elif s_tight:
        e = g - b - t1 / (10 * L) - t2 / (20 * L)
    elif q_tight:
        e = g - b - t1 / 2 - t2 / 2
    else:
        e = g - b - t1 / 2 - t2 / (20 * L)
    assert e <= g - b
    return ReconstructionBudget(g, b, t1, t2, q_tight, s_tight, e)


# --------------------------------------------------------------------------
# Text format
# --------------------------------------------------------------------------

def dump_quad(quad: ApproxQuadruple) -> str:
    lines = [f"quad 1 psi={quad.psi}"]
    for tag, s in zip("FSPQ", quad[:4]):
        lines.append(" ".join([tag, *map(str, sorted(s))]))
    return "\n".join(lines) + "\n"


def load_quad(text: str) -> ApproxQuadruple:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("quad 1 psi="):
        raise GraphFormatError("expected 'quad 1 psi=<psi>' header")
    try:
        psi = int(lines[0].split("=", 1)[1])
        sets = {}
        for ln in lines[1:]:
            tag, *rest = ln.split()
            sets[tag] = frozenset(int(t) for t in rest)
        return ApproxQuadruple(sets["F"], sets["S"], sets["P"], sets["Q"], psi)
    except (KeyError, ValueError) as exc:
        raise GraphFormatError(f"malformed quadruple: {exc}") from None
