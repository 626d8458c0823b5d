"""Extremal components of legal labelings, the merge move, potentials, level witnesses
and the goodness / value-count predicates on middle layers.

Every routine takes the side the labeling lives on (default E); distance-2
structure, closures and neighbourhoods are taken on that side.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .errors import WitnessFailure
from .graph import BipartiteGraph, Side, closure, interior, linked_components
from .reports import AuditRow, Report
from .zhom import LegalLabeling, ZHomomorphism, enumerate_labelings, is_legal_labeling, weight_exponent


class Kind(str, Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class Component:
    vertices: frozenset[int]
    kind: Kind
    plateau: int  # min of f on K for MAX, max for MIN

    def __len__(self) -> int:
        return len(self.vertices)


def _vals(f) -> tuple[int, ...]:
    return f.values if isinstance(f, LegalLabeling) else tuple(f)


def _root(f) -> int | None:
    return f.root if isinstance(f, LegalLabeling) else None


def _labeling(graph: BipartiteGraph, f, side: Side) -> tuple[BipartiteGraph, tuple[int, ...]]:
    """The graph seen from ``side`` (so that ``side`` becomes E) and the values."""
    g = graph if side is Side.E else _swapped(graph)
    vals = _vals(f)
    if len(vals) != g.n_e:
        raise ValueError("labeling length does not match the side")
    return g, vals


def _swapped(graph: BipartiteGraph) -> BipartiteGraph:
    cached = graph.__dict__.get("_swapped_view")
    if cached is None:
        cached = graph.swapped()
        graph.__dict__["_swapped_view"] = cached
    return cached


def is_component(graph: BipartiteGraph, f, K: Iterable[int], kind: Kind = Kind.MAX, side: Side = Side.E) -> bool:
    """Direct check of the definition: 2-linked, strictly above (below) its distance-2 boundary."""
    g, vals = _labeling(graph, f, side)
    K = frozenset(K)
    if not K or len(linked_components(g, Side.E, K)) != 1:
        return False
    d2 = g.dist2(Side.E)
    boundary = {y for x in K for y in d2[x]} - K
    if kind is Kind.MAX:
        lo = min(vals[x] for x in K)
        return all(vals[y] < lo for y in boundary)
    hi = max(vals[x] for x in K)
    return all(vals[y] > hi for y in boundary)


def find_components(graph: BipartiteGraph, f, kind: Kind = Kind.MAX, side: Side = Side.E) -> list[Component]:
    """All maximum (or minimum) components, via threshold sets.

    Each 2-linked component of {f >= t} is a maximum component, and every
    maximum component K arises this way with t = min f|K.  Sorted by
    (plateau, sorted vertices), deduplicated.
    """
    g, vals = _labeling(graph, f, side)
    out: dict[frozenset[int], Component] = {}
    for t in sorted(set(vals)):
        if kind is Kind.MAX:
            U = [v for v, x in enumerate(vals) if x >= t]
        else:
            U = [v for v, x in enumerate(vals) if x <= t]
        for C in linked_components(g, Side.E, U):
            if C in out:
                continue
            plateau = min(vals[x] for x in C) if kind is Kind.MAX else max(vals[x] for x in C)
            comp = Component(C, kind, plateau)
            assert is_component(g, vals, C, kind)
            out[C] = comp
    return sorted(out.values(), key=lambda c: (c.plateau, sorted(c.vertices)))


@dataclass(frozen=True)
class MergeTrace:
    before: LegalLabeling
    component: Component
    after: LegalLabeling
    root_inside: bool
    weight_log_delta: int  # |N(K)| - |B(K)|


def merge(graph: BipartiteGraph, f: LegalLabeling, K: Iterable[int], side: Side = Side.E) -> MergeTrace:
    """Smooth the peak K: lower K by one, or raise everything else if the root is in K.

    Asserts legality of the result and that the weight exponent changes by
    exactly |N(K)| - |B(K)|.
    """
    g, vals = _labeling(graph, f, side)
    K = frozenset(K)
    if not is_component(g, vals, K, Kind.MAX):
        raise ValueError("K is not a maximum component of f")
    root = _root(f)
    inside = root is not None and root in K
    if inside:
        new = tuple(v if i in K else v + 1 for i, v in enumerate(vals))
    else:
        new = tuple(v - 1 if i in K else v for i, v in enumerate(vals))
    after = LegalLabeling(new, root)
    assert is_legal_labeling(g, after), "merge produced an illegal labeling"
    delta = len(g.nbhd(Side.E, K)) - len(interior(g, Side.E, K))
    assert weight_exponent(g, new) - weight_exponent(g, vals) == delta, "weight identity failed"
    before = f if isinstance(f, LegalLabeling) else LegalLabeling(vals, root)
    comp = Component(K, Kind.MAX, min(vals[x] for x in K))
    return MergeTrace(before, comp, after, inside, delta)


# --------------------------------------------------------------------------
# Potential
# --------------------------------------------------------------------------

def potential(graph: BipartiteGraph, f, side: Side = Side.E) -> int:
    """Sum of |f(x) - f(y)| over ordered pairs (x, y) at distance 2."""
    g, vals = _labeling(graph, f, side)
    d2 = g.dist2(Side.E)
    return sum(abs(vals[x] - vals[y]) for x in range(g.n_e) for y in d2[x])


def cross_pairs(graph: BipartiteGraph, K: Iterable[int], side: Side = Side.E) -> int:
    """Ordered pairs at distance 2 with exactly one end in K (both orientations)."""
    d2 = graph.dist2(side)
    K = frozenset(K)
    return 2 * sum(1 for x in K for y in d2[x] if y not in K)


@dataclass(frozen=True)
class PotentialDrop:
    before: int
    after: int
    cross: int

    @property
    def ok(self) -> bool:
        return self.before - self.after == self.cross and self.after < self.before


def check_potential_drop(graph: BipartiteGraph, f: LegalLabeling, K: Iterable[int], side: Side = Side.E) -> PotentialDrop:
    K = frozenset(K)
    if len(K) == graph.size(side):
        raise ValueError("K is the whole side: no crossing pairs, the potential cannot drop")
    g, _ = _labeling(graph, f, side)
    tr = merge(g, f, K)
    return PotentialDrop(potential(g, f), potential(g, tr.after), cross_pairs(g, K))


# --------------------------------------------------------------------------
# Level witnesses
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelWitness:
    labeling: LegalLabeling
    anchor: int
    chain: tuple[frozenset[int], ...]

    @property
    def level(self) -> int:
        return len(self.chain)


def _power_n2(graph: BipartiteGraph, x: int, i: int) -> frozenset[int]:
    S = frozenset([x])
    for _ in range(i):
        S = graph.second_nbhd(Side.E, S)
    return S


def verify_witness(graph: BipartiteGraph, witness: LevelWitness, delta: float | None = None) -> Report:
    """Check a level witness: anchor, nesting, maximum components along the merge
    sequence, the final closure bound 3n/4, and the growth facts."""
    rep = Report(f"witness[{graph.name}]")
    lid = ",".join(map(str, witness.labeling.values))
    chain = witness.chain
    if not chain:
        rep.add(AuditRow(graph.name, lid, "empty_chain", "vacuous", True))
        return rep
    n = graph.n_e
    rep.add(AuditRow(graph.name, lid, "anchor", f"x={witness.anchor}", witness.anchor in chain[0]))
    for i in range(len(chain) - 1):
        rep.add(AuditRow(graph.name, lid, "nesting", f"K{i}<=K{i + 1}", chain[i] <= chain[i + 1]))
    f = witness.labeling
    for i, K in enumerate(chain):
        ok = is_component(graph, f, K, Kind.MAX)
        rep.add(AuditRow(graph.name, lid, "max_component", f"K{i} size={len(K)}", ok))
        if not ok:
            break
        f = merge(graph, f, K).after
    cl = len(closure(graph, Side.E, chain[-1]))
    rep.add(AuditRow(graph.name, lid, "closure_3n4", f"|[K_last]|={cl} limit={3 * n / 4}", 4 * cl <= 3 * n))
    for i in range(1, len(chain)):
        ball = _power_n2(graph, witness.anchor, i)
        rep.add(AuditRow(graph.name, lid, "contains_N2i", f"i={i}", ball <= chain[i]))
        if delta is not None:
            need = (1 + delta / 4) ** (2 * i)
            rep.add(AuditRow(graph.name, lid, "growth", f"i={i} |K|={len(chain[i])} need={need:.4f}", len(chain[i]) >= need - 1e-9))
    return rep


def build_witness(graph: BipartiteGraph, f: LegalLabeling, x: int, t: int) -> LevelWitness:
    """Chain K_i = 2-linked component of {f >= max f - i} containing x, i < t."""
    vals = _vals(f)
    m = max(vals)
    if vals[x] != m:
        raise ValueError("x is not a maximiser of f")
    if t < 1:
        raise ValueError("t must be >= 1")
    chain = []
    for i in range(t):
        U = [v for v, val in enumerate(vals) if val >= m - i]
        (K,) = [C for C in linked_components(graph, Side.E, U) if x in C]
        chain.append(K)
    cl = len(closure(graph, Side.E, chain[-1]))
    if 4 * cl > 3 * graph.n_e:
        raise WitnessFailure(f"closure of the last set has {cl} > 3n/4 = {3 * graph.n_e / 4} vertices")
    return LevelWitness(f, x, tuple(chain))


# --------------------------------------------------------------------------
# Goodness, enlarged components, value counts
# --------------------------------------------------------------------------

@dataclass
class Goodness:
    max_good: bool
    min_good: bool
    offending: list[Component] = field(default_factory=list)


def _thresholds(graph: BipartiteGraph, side: Side, c: float, size_min: float | None, closure_max: float | None):
    if size_min is None or closure_max is None:
        d = graph.regular_degree
        if d is None:
            raise ValueError("thresholds must be given explicitly on non-regular graphs")
        if size_min is None:
            size_min = d / 2
        if closure_max is None:
            closure_max = (1 - c) * graph.size(side)
    return size_min, closure_max


def offending_components(
    graph: BipartiteGraph,
    f,
    kind: Kind = Kind.MAX,
    side: Side = Side.E,
    c: float = 0.1,
    size_min: float | None = None,
    closure_max: float | None = None,
) -> list[Component]:
    """Components with |K| >= size_min and |[K]| <= closure_max."""
    size_min, closure_max = _thresholds(graph, side, c, size_min, closure_max)
    g, _ = _labeling(graph, f, side)
    return [
        K for K in find_components(g, f, kind)
        if len(K) >= size_min and len(closure(g, Side.E, K.vertices)) <= closure_max
    ]


def classify_good(
    graph: BipartiteGraph,
    f,
    side: Side = Side.E,
    c: float = 0.1,
    size_min: float | None = None,
    closure_max: float | None = None,
) -> Goodness:
    """Max-good / min-good: no extremal component of intermediate size.

    Defaults follow the middle-layers setting: size_min = d/2 and
    closure_max = (1 - c) * |side|.
    """
    hi = offending_components(graph, f, Kind.MAX, side, c, size_min, closure_max)
    lo = offending_components(graph, f, Kind.MIN, side, c, size_min, closure_max)
    return Goodness(not hi, not lo, hi + lo)


def enlarged_component(graph: BipartiteGraph, f, K: Iterable[int], kind: Kind = Kind.MAX, side: Side = Side.E) -> Component:
    """The extremal component one plateau further out from K (K itself if K is the whole side)."""
    g, vals = _labeling(graph, f, side)
    K = frozenset(K)
    if not is_component(g, vals, K, kind):
        raise ValueError("K is not a component of the requested kind")
    if len(K) == g.n_e:
        plateau = min(vals) if kind is Kind.MAX else max(vals)
        return Component(K, kind, plateau)
    if kind is Kind.MAX:
        t = min(vals[x] for x in K) - 1
        U = [v for v, x in enumerate(vals) if x >= t]
    else:
        t = max(vals[x] for x in K) + 1
        U = [v for v, x in enumerate(vals) if x <= t]
    hits = [C for C in linked_components(g, Side.E, U) if K <= C]
    assert len(hits) == 1
    C = hits[0]
    plateau = min(vals[x] for x in C) if kind is Kind.MAX else max(vals[x] for x in C)
    assert plateau == t, "enlarged component does not reach the next plateau"
    return Component(C, kind, plateau)


def layer_labelings(h: ZHomomorphism) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(h|E / 2, (h|O + 1) / 2)."""
    return tuple(v // 2 for v in h.e), tuple((v + 1) // 2 for v in h.o)


def value_count_audit(graph: BipartiteGraph, h: ZHomomorphism, c: float = 0.1, label: str = "") -> Report:
    """If both layer labelings are max- and min-good, each layer of h takes at
    most 3 values and h at most 6; the exact counts are always reported."""
    rep = Report(f"value_count[{graph.name}]")
    fe, fo = layer_labelings(h)
    ge = classify_good(graph, fe, Side.E, c)
    go = classify_good(graph, fo, Side.O, c)
    ne, no = len(set(h.e)), len(set(h.o))
    total = len(set(h.e) | set(h.o))
    lid = label or ",".join(map(str, h.values()))
    e_good = ge.max_good and ge.min_good
    o_good = go.max_good and go.min_good
    rep.add(AuditRow(graph.name, lid, "o_layer_at_most_3", f"hyp={e_good} values={no}", not e_good or no <= 3))
    rep.add(AuditRow(graph.name, lid, "e_layer_at_most_3", f"hyp={o_good} values={ne}", not o_good or ne <= 3))
    rep.add(AuditRow(graph.name, lid, "total_at_most_6", f"hyp={e_good and o_good} values={total}", not (e_good and o_good) or total <= 6))
    return rep


# --------------------------------------------------------------------------
# Levels
# --------------------------------------------------------------------------

def _offending_max(graph: BipartiteGraph, vals: tuple[int, ...], c: float) -> list[Component]:
    return offending_components(graph, vals, Kind.MAX, Side.E, c)


def greedy_level(graph: BipartiteGraph, f: LegalLabeling, c: float = 0.1) -> int:
    """Number of merges when always merging the first offending maximum
    component; an upper bound on the level.  Asserted <= d^2 |E|."""
    d = graph.regular_degree or graph.max_degree
    cap = d * d * graph.n_e
    steps = 0
    while True:
        bad = _offending_max(graph, f.values, c)
        if not bad:
            return steps
        before = potential(graph, f)
        f = merge(graph, f, bad[0].vertices).after
        assert potential(graph, f) < before
        steps += 1
        assert steps <= cap, "merge sequence exceeded the potential bound"


def exact_level(graph: BipartiteGraph, f: LegalLabeling, c: float = 0.1, max_states: int = 1_000_000) -> int:
    """Minimum number of offending merges reaching a max-good labeling (BFS over all moves)."""
    start = f.values
    seen = {start}
    q = deque([(start, 0)])
    while q:
        vals, dist = q.popleft()
        bad = _offending_max(graph, vals, c)
        if not bad:
            return dist
        for K in bad:
            nxt = merge(graph, LegalLabeling(vals, f.root), K.vertices).after.values
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_states:
                    raise RuntimeError("level search exceeded its state budget")
                q.append((nxt, dist + 1))
    raise AssertionError("no max-good labeling reachable; potential argument violated")


def good_weight_ratio(graph: BipartiteGraph, root: int = 0, c: float = 0.1) -> Fraction:
    """(total weight of all centered labelings) / (weight of the max-good ones)."""
    total = good = 0
    for f in enumerate_labelings(graph, root):
        w = 1 << weight_exponent(graph, f)
        total += w
        if not _offending_max(graph, f.values, c):
            good += w
    return Fraction(total, good)


def ml_closure_limit(d: int, c: float = 0.1) -> float:
    return (1 - c) * comb(2 * d - 1, d)


def canonical(K: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(K))


def labeling_id(f: Sequence[int] | LegalLabeling) -> str:
    return ",".join(map(str, _vals(f)))
