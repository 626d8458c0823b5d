"""Heat-bath Glauber dynamics on rooted Z-homomorphisms.

A systematic sweep updates every non-root E-vertex and then every O-vertex.
Vertices on one side are conditionally independent given the other side, so
the sweep is run as two vectorised half-sweeps; this has exactly the law of
the single-site scan in that order.  Random scan uses single-site steps.
"""

from __future__ import annotations

import csv
import io
import statistics
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .graph import BipartiteGraph, Side
from .zhom import ZHomomorphism, enumerate_homs, hom_range, validate_hom

SAMPLE_COLUMNS = ("chain", "sweep", "range", "min_val", "max_val")


@dataclass(frozen=True)
class SamplerConfig:
    burnin: int = 1000
    thinning: int = 10
    samples: int = 1000
    seed: int = 0
    random_scan: bool = False

    def __post_init__(self):
        if self.burnin < 0 or self.thinning < 1 or self.samples < 1:
            raise ValueError("burnin must be >= 0, thinning and samples >= 1")


@dataclass
class ChainState:
    e: np.ndarray
    o: np.ndarray
    root: int
    rng: np.random.Generator
    sweeps: int = 0
    root_hits: int = 0  # attempted updates of the pinned root

    def hom(self) -> ZHomomorphism:
        return ZHomomorphism(tuple(int(x) for x in self.e), tuple(int(x) for x in self.o), self.root)

    def range(self) -> int:
        lo = min(self.e.min(), self.o.min())
        hi = max(self.e.max(), self.o.max())
        return int(hi - lo + 1)


def chain_rng(seed: int, chain: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, chain])


def initial_state(graph: BipartiteGraph, root: int = 0, rng: np.random.Generator | None = None) -> ChainState:
    """Alternating ground state: 0 on E, 1 on O."""
    return ChainState(
        np.zeros(graph.n_e, dtype=np.int64),
        np.ones(graph.n_o, dtype=np.int64),
        root,
        rng if rng is not None else chain_rng(0),
    )


def heat_bath_choices(nbr_values: Iterable[int]) -> tuple[int, ...]:
    """Admissible values for a vertex whose neighbours carry ``nbr_values``."""
    vals = tuple(nbr_values)
    lo, hi = min(vals), max(vals)
    if lo == hi:
        return (lo - 1, lo + 1)
    assert hi - lo == 2, f"neighbour values span {lo}..{hi}: invalid chain state"
    return (lo + 1,)


def glauber_step(graph: BipartiteGraph, state: ChainState, side: Side, i: int) -> ChainState:
    """Resample one vertex from its conditional law (in place)."""
    if side is Side.E and i == state.root:
        state.root_hits += 1
        return state
    other = state.o if side is Side.E else state.e
    opts = heat_bath_choices(int(other[j]) for j in graph.adj(side)[i])
    val = opts[0] if len(opts) == 1 else opts[int(state.rng.integers(2))]
    (state.e if side is Side.E else state.o)[i] = val
    return state


class _Padded:
    """Neighbour index matrix, short rows padded with their first entry."""

    def __init__(self, adj):
        width = max(len(a) for a in adj)
        self.idx = np.array([list(a) + [a[0]] * (width - len(a)) for a in adj], dtype=np.int64)


def _half_sweep(pad: _Padded, mine: np.ndarray, other: np.ndarray, rng: np.random.Generator, pinned: int | None) -> None:
    vals = other[pad.idx]
    lo = vals.min(axis=1)
    hi = vals.max(axis=1)
    span = hi - lo
    if np.any((span != 0) & (span != 2)):
        raise AssertionError("invalid chain state")
    coin = rng.integers(0, 2, size=len(mine)) * 2 - 1
    new = np.where(span == 0, lo + coin, lo + 1)
    if pinned is not None:
        new[pinned] = mine[pinned]
    mine[:] = new


SMALL_GRAPH = 64  # below this many vertices a plain-Python sweep beats numpy


class Chain:
    """One Glauber chain; ``sweep`` advances by a full systematic or random scan."""

    def __init__(self, graph: BipartiteGraph, root: int = 0, *, seed: int = 0, chain: int = 0, random_scan: bool = False):
        self.graph = graph
        self.random_scan = random_scan
        self.state = initial_state(graph, root, chain_rng(seed, chain))
        self._pe = _Padded(graph.adj_e)
        self._po = _Padded(graph.adj_o)
        self._small = graph.n_e + graph.n_o <= SMALL_GRAPH
        self._bits: list[int] = []

    def _coin(self) -> int:
        if not self._bits:
            self._bits = (self.state.rng.integers(0, 2, size=4096) * 2 - 1).tolist()
        return self._bits.pop()

    def _python_sweep(self, count: int) -> None:
        st = self.state
        g = self.graph
        e, o = st.e.tolist(), st.o.tolist()
        for _ in range(count):
            for mine, other, adj, pinned in ((e, o, g.adj_e, st.root), (o, e, g.adj_o, None)):
                for i, nb in enumerate(adj):
                    if i == pinned:
                        continue
                    lo = hi = other[nb[0]]
                    for j in nb:
                        v = other[j]
                        if v < lo:
                            lo = v
                        elif v > hi:
                            hi = v
                    if lo == hi:
                        mine[i] = lo + self._coin()
                    else:
                        assert hi - lo == 2, "invalid chain state"
                        mine[i] = lo + 1
            st.sweeps += 1
        st.e[:] = e
        st.o[:] = o

    def sweep(self, count: int = 1) -> None:
        st = self.state
        g = self.graph
        if self._small and not self.random_scan:
            self._python_sweep(count)
            return
        for _ in range(count):
            if self.random_scan:
                total = g.n_e + g.n_o
                for k in st.rng.integers(0, total, size=total):
                    k = int(k)
                    if k < g.n_e:
                        glauber_step(g, st, Side.E, k)
                    else:
                        glauber_step(g, st, Side.O, k - g.n_e)
            else:
                _half_sweep(self._pe, st.e, st.o, st.rng, st.root)
                _half_sweep(self._po, st.o, st.e, st.rng, None)
            st.sweeps += 1


def run_chain(graph: BipartiteGraph, root: int = 0, config: SamplerConfig = SamplerConfig(), *, chain: int = 0) -> Iterator[ZHomomorphism]:
    """burnin sweeps, then one sample every ``thinning`` sweeps."""
    ch = Chain(graph, root, seed=config.seed, chain=chain, random_scan=config.random_scan)
    ch.sweep(config.burnin)
    for _ in range(config.samples):
        ch.sweep(config.thinning)
        yield ch.state.hom()


def sample_ranges(graph: BipartiteGraph, root: int = 0, config: SamplerConfig = SamplerConfig(), *, chain: int = 0) -> list[tuple[int, int, int, int]]:
    """(sweep, range, min, max) per sample without materialising homomorphisms."""
    ch = Chain(graph, root, seed=config.seed, chain=chain, random_scan=config.random_scan)
    ch.sweep(config.burnin)
    out = []
    st = ch.state
    for _ in range(config.samples):
        ch.sweep(config.thinning)
        lo = int(min(st.e.min(), st.o.min()))
        hi = int(max(st.e.max(), st.o.max()))
        out.append((st.sweeps, hi - lo + 1, lo, hi))
    return out


def samples_csv(rows: Mapping[int, list[tuple[int, int, int, int]]]) -> str:
    """Sample CSV, one line per (chain, sample)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SAMPLE_COLUMNS)
    for c in sorted(rows):
        for r in rows[c]:
            w.writerow((c, *r))
    return buf.getvalue()


# --------------------------------------------------------------------------
# Diagnostics
# --------------------------------------------------------------------------

def tv_distance(p: Mapping, q: Mapping) -> float:
    """Total variation between two distributions (or histograms, normalised)."""
    sp = sum(p.values())
    sq = sum(q.values())
    if sp <= 0 or sq <= 0:
        raise ValueError("empty distribution")
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0) / sp - q.get(k, 0) / sq) for k in keys)


@dataclass(frozen=True)
class RangeStats:
    count: int
    histogram: dict[int, int]
    min: int
    max: int
    median: float
    frac_le: dict[int, float] = field(default_factory=dict)


def range_statistics(samples: Iterable[ZHomomorphism | int]) -> RangeStats:
    rs = [s if isinstance(s, int) else hom_range(s) for s in samples]
    if not rs:
        raise ValueError("no samples")
    hist = Counter(rs)
    n = len(rs)
    frac = {k: sum(c for r, c in hist.items() if r <= k) / n for k in range(3, 8)}
    return RangeStats(n, dict(sorted(hist.items())), min(rs), max(rs), float(statistics.median(rs)), frac)


def _index_homs(graph: BipartiteGraph, root: int) -> tuple[list[ZHomomorphism], dict[tuple, int]]:
    homs = sorted(enumerate_homs(graph, root), key=lambda h: h.values())
    return homs, {h.values(): k for k, h in enumerate(homs)}


def _site_moves(graph: BipartiteGraph, h: ZHomomorphism, side: Side, i: int) -> list[ZHomomorphism]:
    other = h.o if side is Side.E else h.e
    opts = heat_bath_choices(other[j] for j in graph.adj(side)[i])
    out = []
    for v in opts:
        if side is Side.E:
            e = list(h.e)
            e[i] = v
            out.append(ZHomomorphism(tuple(e), h.o, h.root))
        else:
            o = list(h.o)
            o[i] = v
            out.append(ZHomomorphism(h.e, tuple(o), h.root))
    return out


def sweep_kernel(graph: BipartiteGraph, root: int = 0) -> tuple[np.ndarray, list[ZHomomorphism]]:
    """Exact transition matrix of one systematic sweep (product of single-site kernels)."""
    homs, index = _index_homs(graph, root)
    n = len(homs)
    K = np.eye(n)
    order = [(Side.E, i) for i in range(graph.n_e) if i != root] + [(Side.O, i) for i in range(graph.n_o)]
    for side, i in order:
        M = np.zeros((n, n))
        for k, h in enumerate(homs):
            moves = _site_moves(graph, h, side, i)
            for m in moves:
                M[k, index[m.values()]] += 1 / len(moves)
        K = K @ M
    return K, homs


def stationarity_error(graph: BipartiteGraph, root: int = 0) -> float:
    """max |u K - u| for the uniform vector u and the sweep kernel K."""
    K, homs = sweep_kernel(graph, root)
    u = np.full(len(homs), 1 / len(homs))
    return float(np.abs(u @ K - u).max())


def move_graph_connected(graph: BipartiteGraph, root: int = 0) -> bool:
    """BFS over all homomorphisms under single-site moves."""
    homs, index = _index_homs(graph, root)
    seen = {0}
    queue = deque([homs[0]])
    while queue:
        h = queue.popleft()
        for side, n in ((Side.E, graph.n_e), (Side.O, graph.n_o)):
            for i in range(n):
                if side is Side.E and i == root:
                    continue
                for m in _site_moves(graph, h, side, i):
                    k = index[m.values()]
                    if k not in seen:
                        seen.add(k)
                        queue.append(m)
    return len(seen) == len(homs)


def empirical_histogram(samples: Iterable[ZHomomorphism]) -> Counter:
    return Counter(h.values() for h in samples)


def audit_samples(graph: BipartiteGraph, samples: Iterable[ZHomomorphism]) -> int:
    """Number of samples failing validation (root pinned, edges differ by 1)."""
    return sum(1 for h in samples if not (validate_hom(graph, h) and h.e[h.root] == 0))
