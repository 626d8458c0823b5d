"""Second eigenvalue, vertex expansion, shadows, greedy covers and linked-set counts."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy import sparse

from .errors import BudgetExceeded, NotConverged
from .graph import BipartiteGraph, Side, Vertex, connected_sets, generate_middle_layers
from .reports import BoundRow, Report

DENSE_LIMIT = 2000
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SpectralProfile:
    d: int
    lambda2: float
    method: str
    residual: float

    @property
    def alpha(self) -> float:
        return self.lambda2 / self.d

    @property
    def delta(self) -> float:
        return 1.0 - self.alpha


def _biadjacency(graph: BipartiteGraph) -> sparse.csr_matrix:
    rows, cols = zip(*graph.edges())
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(graph.n_e, graph.n_o))


def _require_regular(graph: BipartiteGraph) -> int:
    d = graph.regular_degree
    if d is None:
        raise ValueError(f"{graph.name} is not regular")
    return d


def second_eigenvalue(
    graph: BipartiteGraph,
    mode: str = "auto",
    *,
    max_iter: int = 200_000,
    seed: int = 0,
) -> SpectralProfile:
    """Largest adjacency eigenvalue once the trivial pair +-d is removed.

    For a connected regular bipartite graph the spectrum is symmetric, so
    this equals the second-largest eigenvalue (and 0 when nothing is left,
    as for the single edge).

    ``dense`` diagonalises the full adjacency matrix.  ``iterative`` runs
    power iteration on M M^T (M the E-by-O biadjacency), whose top
    eigenvector is the all-ones vector; projecting that out is the same as
    deflating both the all-ones and the signed side vector of the adjacency
    matrix.
    """
    d = _require_regular(graph)
    n = graph.n_e + graph.n_o
    if mode == "auto":
        mode = "dense" if n <= DENSE_LIMIT else "iterative"
    if mode == "dense":
        if n > DENSE_LIMIT:
            raise ValueError(f"dense mode limited to {DENSE_LIMIT} vertices")
        M = _biadjacency(graph).toarray()
        A = np.block([[np.zeros((graph.n_e, graph.n_e)), M], [M.T, np.zeros((graph.n_o, graph.n_o))]])
        ev = np.sort(np.linalg.eigvalsh(A))
        rest = ev[1:-1]
        lam = float(np.max(np.abs(rest))) if rest.size else 0.0
        return SpectralProfile(d, min(lam, float(d)), "dense", 0.0)
    if mode != "iterative":
        raise ValueError(f"unknown mode {mode!r}")
    if graph.n_e == 1:
        return SpectralProfile(d, 0.0, "iterative", 0.0)
    M = _biadjacency(graph)
    B = (M @ M.T).tocsr()
    ones = np.ones(graph.n_e) / math.sqrt(graph.n_e)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(graph.n_e)
    x -= ones * (ones @ x)
    x /= np.linalg.norm(x)
    mu, res = 0.0, math.inf
    for _ in range(max_iter):
        y = B @ x
        y -= ones * (ones @ y)
        mu = float(x @ y)
        res = float(np.linalg.norm(y - mu * x))
        if res <= RESIDUAL_TOL:
            break
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            mu, res = 0.0, 0.0
            break
        x = y / nrm
    else:
        raise NotConverged(f"power iteration on {graph.name} did not converge", res)
    lam = math.sqrt(max(mu, 0.0))
    return SpectralProfile(d, min(lam, float(d)), "iterative", res)


def tanner_lower_bound(alpha: float, rho: float) -> float:
    """Lower bound on |N(S)|/|S| for |S| = rho*n in a graph with normalised second eigenvalue alpha."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if not 0 <= alpha <= 1 or rho > 1:
        raise ValueError("alpha must lie in [0,1] and rho in (0,1]")
    return 1.0 / (rho * (1 - alpha * alpha) + alpha * alpha)


def _nbr_masks(graph: BipartiteGraph, side: Side) -> list[int]:
    return [sum(1 << j for j in nb) for nb in graph.adj(side)]


def _subset_scan(graph: BipartiteGraph, side: Side, exhaustive_limit: int, samples: int, rng: random.Random):
    """Yield (subset size, |N(S)|, S as bitmask) over all or sampled nonempty subsets."""
    n = graph.size(side)
    masks = _nbr_masks(graph, side)
    if n <= exhaustive_limit:
        nm = [0] * (1 << n)
        for S in range(1, 1 << n):
            low = S & -S
            nm[S] = nm[S ^ low] | masks[low.bit_length() - 1]
            yield S.bit_count(), nm[S].bit_count(), S
        return
    for size in range(1, n + 1):
        for _ in range(samples):
            idx = rng.sample(range(n), size)
            nbm = 0
            S = 0
            for i in idx:
                nbm |= masks[i]
                S |= 1 << i
            yield size, nbm.bit_count(), S


def _worst_per_size(graph, side, exhaustive_limit, samples, seed, bound_of):
    """Minimum-slack instance per subset size; violations are kept individually."""
    rng = random.Random(seed)
    worst: dict[int, tuple[float, float, float, int]] = {}
    bad = []
    for size, nsize, S in _subset_scan(graph, side, exhaustive_limit, samples, rng):
        bound = bound_of(size)
        if bound is None:
            continue
        slack = nsize - bound
        if size not in worst or slack < worst[size][0]:
            worst[size] = (slack, bound, nsize, S)
        if slack < -1e-9:
            bad.append((size, bound, nsize, S))
    return worst, bad


def _mask_str(side: Side, S: int) -> str:
    return side.value + "{" + ",".join(str(i) for i in range(S.bit_length()) if S >> i & 1) + "}"


def check_tanner(
    graph: BipartiteGraph,
    profile: SpectralProfile | None = None,
    exhaustive_limit: int = 16,
    *,
    samples: int = 10_000,
    seed: int = 0,
) -> Report:
    """|N(S)| >= |S| * tanner_lower_bound(alpha, |S|/n) for S on either side."""
    profile = profile or second_eigenvalue(graph)
    rep = Report(f"tanner[{graph.name}]")
    n = graph.n_e
    if graph.n_o != n:
        raise ValueError("balanced graph required")
    for side in (Side.E, Side.O):
        worst, bad = _worst_per_size(
            graph, side, exhaustive_limit, samples, seed,
            lambda s: s * tanner_lower_bound(profile.alpha, s / n),
        )
        for size in sorted(worst):
            slack, bound, act, S = worst[size]
            rep.add(BoundRow.lower("tanner", graph.name, f"{side.value}|S|={size} worst={_mask_str(side, S)}", bound, act))
        for size, bound, act, S in bad:
            rep.add(BoundRow.lower("tanner", graph.name, _mask_str(side, S), bound, act))
    return rep


def check_expansion_34(
    graph: BipartiteGraph,
    profile: SpectralProfile | None = None,
    exhaustive_limit: int = 16,
    *,
    samples: int = 10_000,
    seed: int = 0,
) -> Report:
    """|N(S)| >= (1 + delta/4)|S| for every S with |S| <= 3n/4."""
    profile = profile or second_eigenvalue(graph)
    rep = Report(f"expansion34[{graph.name}]")
    n = graph.n_e
    factor = 1 + profile.delta / 4
    for side in (Side.E, Side.O):
        worst, bad = _worst_per_size(
            graph, side, exhaustive_limit, samples, seed,
            lambda s: factor * s if 4 * s <= 3 * n else None,
        )
        for size in sorted(worst):
            slack, bound, act, S = worst[size]
            rep.add(BoundRow.lower("expansion34", graph.name, f"{side.value}|S|={size} worst={_mask_str(side, S)}", bound, act))
        for size, bound, act, S in bad:
            rep.add(BoundRow.lower("expansion34", graph.name, _mask_str(side, S), bound, act))
    return rep


def real_binom(x: float, m: int) -> float:
    """x(x-1)...(x-m+1)/m! for real x."""
    out = 1.0
    for i in range(m):
        out *= (x - i) / (i + 1)
    return out


def kk_real_x(family_size: int, m: int, tol: float = 1e-10) -> float:
    """The real x >= m-1 with real_binom(x, m) == family_size (bisection)."""
    if family_size <= 0:
        raise ValueError("family size must be positive")
    if m < 1:
        raise ValueError("m must be >= 1")
    lo, hi = float(m - 1), float(m + family_size)
    while real_binom(hi, m) < family_size:
        hi *= 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if real_binom(mid, m) < family_size:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def shadow(family: Iterable[Iterable[int]], q: int) -> set[frozenset[int]]:
    """All (m-q)-subsets of members of a family of m-sets."""
    fam = [frozenset(s) for s in family]
    if not fam:
        return set()
    sizes = {len(s) for s in fam}
    if len(sizes) != 1:
        raise ValueError("family members have different sizes")
    m = sizes.pop()
    if not 0 <= q <= m:
        raise ValueError(f"q={q} outside [0, {m}]")
    return {frozenset(c) for s in fam for c in combinations(sorted(s), m - q)}


def check_kruskal_katona(family: Iterable[Iterable[int]], q: int = 1) -> BoundRow:
    fam = {frozenset(s) for s in family}
    m = len(next(iter(fam)))
    x = kk_real_x(len(fam), m)
    bound = real_binom(x, m - q)
    actual = len(shadow(fam, q))
    inst = "|".join("".join(map(str, sorted(s))) for s in sorted(fam, key=sorted))
    return BoundRow.lower("kruskal_katona", f"[{max(max(s) for s in fam)}]", inst, bound, actual, tol=1e-6)


@lru_cache(maxsize=None)
def _ml(d: int) -> BipartiteGraph:
    return generate_middle_layers(d)


def check_middle_layer_iso(d: int, Y: Iterable[Vertex], c: float | None = None) -> Report:
    """Isoperimetry on the two middle layers of the (2d-1)-cube.

    (a) |N(Y)| >= (1 + c/d)|Y| whenever |Y| <= binom(2d-1-c, d).  With
        ``c=None`` the largest admissible c for |Y| is used, which is the
        strongest instance of (a).
    (b) |N(Y)| >= d|Y|/8 whenever |Y| <= d^6.
    """
    graph = _ml(d)
    Y = list(Y)
    sides = {v.side for v in Y}
    if len(sides) > 1:
        raise ValueError("Y straddles both layers")
    rep = Report(f"ml_iso[d={d}]")
    if not Y:
        return rep
    side = sides.pop()
    idx = {v.index for v in Y}
    y = len(idx)
    nb = len(graph.nbhd(side, idx))
    inst = f"{side.value}" + "{" + ",".join(map(str, sorted(idx))) + "}"
    c_eff = (2 * d - 1) - kk_real_x(y, d) if c is None else c
    if c is None or y <= real_binom(2 * d - 1 - c, d) + 1e-9:
        rep.add(BoundRow.lower("ml_iso_a", graph.name, inst, (1 + c_eff / d) * y, nb))
    if y <= d ** 6:
        rep.add(BoundRow.lower("ml_iso_b", graph.name, inst, d * y / 8, nb))
    return rep


def scan_middle_layer_iso(d: int, exhaustive_limit: int = 16, samples: int = 200, seed: int = 0) -> Report:
    """(a) with maximal c and (b), over all subsets of both layers (or samples)."""
    graph = _ml(d)
    rep = Report(f"ml_iso_scan[d={d}]")
    rng = random.Random(seed)
    for side in (Side.E, Side.O):
        worst_a: dict[int, tuple] = {}
        worst_b: dict[int, tuple] = {}
        for size, nsize, S in _subset_scan(graph, side, exhaustive_limit, samples, rng):
            a = (1 + ((2 * d - 1) - kk_real_x(size, d)) / d) * size
            for store, bound, ok in ((worst_a, a, True), (worst_b, d * size / 8, size <= d ** 6)):
                if not ok:
                    continue
                slack = nsize - bound
                if size not in store or slack < store[size][0]:
                    store[size] = (slack, bound, nsize, S)
        for name, store in (("ml_iso_a", worst_a), ("ml_iso_b", worst_b)):
            for size in sorted(store):
                _, bound, act, S = store[size]
                rep.add(BoundRow.lower(name, graph.name, f"{side.value}|Y|={size} worst={_mask_str(side, S)}", bound, act))
    return rep


def lovasz_stein_cover(
    graph: BipartiteGraph,
    targets: Iterable[int] | None = None,
    candidates: Iterable[int] | None = None,
    *,
    side: Side = Side.E,
) -> tuple[list[int], BoundRow]:
    """Greedy cover of ``targets`` (on ``side``) by ``candidates`` (other side).

    The view is the bipartite graph induced on targets and candidates; with
    a = min target degree and b = max candidate degree in the view, the
    greedy cover has at most (|candidates|/a)(1 + ln b) vertices.  Ties are
    broken by smallest index.  Returns the cover and the bound row.
    """
    adj = graph.adj(side)
    back = graph.adj(side.other)
    T = frozenset(range(graph.size(side)) if targets is None else targets)
    C = frozenset(range(graph.size(side.other)) if candidates is None else candidates)
    if not T:
        return [], BoundRow.upper("lovasz_stein", graph.name, "empty", 0.0, 0.0)
    a = min(sum(1 for y in adj[x] if y in C) for x in T)
    if a == 0:
        raise ValueError("some target has no candidate neighbour")
    view = {y: frozenset(x for x in back[y] if x in T) for y in C}
    b = max(len(s) for s in view.values())
    uncovered = set(T)
    cover = []
    while uncovered:
        y = min(view, key=lambda v: (-len(view[v] & uncovered), v))
        gain = view[y] & uncovered
        assert gain
        cover.append(y)
        uncovered -= gain
    bound = len(C) / a * (1 + math.log(b))
    row = BoundRow.upper("lovasz_stein", graph.name, f"|T|={len(T)} |C|={len(C)} a={a} b={b}", bound, len(cover))
    assert row.passed, row
    return sorted(cover), row


def _distance_k_adjacency(graph: BipartiteGraph, k: int, side: Side | None) -> tuple[list[list[int]], list[Vertex]]:
    verts = graph.vertices() if side is None else [Vertex(side, i) for i in range(graph.size(side))]
    pos = {v: i for i, v in enumerate(verts)}
    adj = []
    for v in verts:
        adj.append(sorted(pos[u] for u, dist in graph.bfs(v, max_depth=k).items() if 0 < dist and u in pos))
    return adj, verts


def count_linked_supersets(
    graph: BipartiteGraph,
    v: Vertex,
    k: int,
    t: int,
    *,
    same_side: bool = True,
    budget: int = 10_000_000,
) -> tuple[int, BoundRow]:
    """Number of k-linked sets of size t containing v, against (e Delta^k)^(t-1).

    By default only sets on v's own side are counted (the case used for
    2-linked subsets of one side); ``same_side=False`` counts subsets of the
    whole vertex set.  Both counts obey the same bound.
    """
    if t < 1 or k < 1:
        raise ValueError("t and k must be >= 1")
    graph._check_vertex(v)
    adj, verts = _distance_k_adjacency(graph, k, v.side if same_side else None)
    start = verts.index(v)
    count = 0
    nodes = 0
    for s in connected_sets(adj, containing=start, max_size=t):
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("linked-set enumeration", budget)
        if len(s) == t:
            count += 1
    bound = (math.e * graph.max_degree ** k) ** (t - 1)
    row = BoundRow.upper("linked_count", graph.name, f"v={v!r} k={k} t={t}", bound, count)
    return count, row
