"""Bipartite graphs, the generator families, and neighbourhood/linkage primitives.

Vertices live on one of two sides, ``Side.E`` and ``Side.O``, and are
addressed by their position within that side.  Most internal routines work
with plain ``int`` indices of a known side; the public set-level helpers
(`neighborhood`, `second_neighborhood`, `k_linked_components`) accept
`Vertex` pairs so that mixed-side input can be detected.
"""

from __future__ import annotations

import random
from collections import deque
from enum import Enum
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import GraphFormatError, GraphValidationError


class Side(str, Enum):
    E = "E"
    O = "O"

    @property
    def other(self) -> "Side":
        return Side.O if self is Side.E else Side.E

    def __str__(self) -> str:
        return self.value


class Vertex(NamedTuple):
    side: Side
    index: int

    def __repr__(self) -> str:
        return f"{self.side.value}{self.index}"


def E(i: int) -> Vertex:
    return Vertex(Side.E, i)


def O(i: int) -> Vertex:
    return Vertex(Side.O, i)


class BipartiteGraph:
    """Immutable connected bipartite graph with parts of size ``n_e`` and ``n_o``.

    ``edges`` is a collection of ``(u, v)`` pairs with ``u`` an E-side index
    and ``v`` an O-side index.  Bit-vector identities can be attached via
    ``labels_e``/``labels_o`` (middle layers, hypercubes).
    """

    def __init__(
        self,
        n_e: int,
        n_o: int,
        edges: Iterable[tuple[int, int]],
        *,
        family: str = "custom",
        params: dict | None = None,
        name: str | None = None,
        labels_e: Sequence[int] | None = None,
        labels_o: Sequence[int] | None = None,
    ):
        if n_e < 1 or n_o < 1:
            raise GraphValidationError("both sides must be nonempty")
        adj_e: list[list[int]] = [[] for _ in range(n_e)]
        adj_o: list[list[int]] = [[] for _ in range(n_o)]
        seen = set()
        for u, v in edges:
            if not (0 <= u < n_e) or not (0 <= v < n_o):
                raise GraphValidationError(f"edge ({u}, {v}) out of range for parts {n_e}+{n_o}")
            if (u, v) in seen:
                raise GraphValidationError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            adj_e[u].append(v)
            adj_o[v].append(u)
        self.n_e = n_e
        self.n_o = n_o
        self.adj_e: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj_e)
        self.adj_o: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj_o)
        self.family = family
        self.params = dict(params or {})
        self.name = name or family
        self.labels_e = tuple(labels_e) if labels_e is not None else None
        self.labels_o = tuple(labels_o) if labels_o is not None else None
        if not self._connected():
            raise GraphValidationError("graph is disconnected")

    def __repr__(self) -> str:
        return f"BipartiteGraph({self.name!r}, n_e={self.n_e}, n_o={self.n_o}, m={self.num_edges})"

    def _connected(self) -> bool:
        seen_e = {0}
        seen_o: set[int] = set()
        stack = [(Side.E, 0)]
        while stack:
            side, i = stack.pop()
            if side is Side.E:
                for j in self.adj_e[i]:
                    if j not in seen_o:
                        seen_o.add(j)
                        stack.append((Side.O, j))
            else:
                for j in self.adj_o[i]:
                    if j not in seen_e:
                        seen_e.add(j)
                        stack.append((Side.E, j))
        return len(seen_e) == self.n_e and len(seen_o) == self.n_o

    def adj(self, side: Side) -> tuple[tuple[int, ...], ...]:
        return self.adj_e if side is Side.E else self.adj_o

    def size(self, side: Side) -> int:
        return self.n_e if side is Side.E else self.n_o

    def degree(self, side: Side, i: int) -> int:
        return len(self.adj(side)[i])

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj_e)

    @cached_property
    def regular_degree(self) -> int | None:
        """Common degree of every vertex, or None if the graph is not regular."""
        degs = {len(a) for a in self.adj_e} | {len(a) for a in self.adj_o}
        return degs.pop() if len(degs) == 1 else None

    @cached_property
    def max_degree(self) -> int:
        return max(max(len(a) for a in self.adj_e), max(len(a) for a in self.adj_o))

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.adj_e):
            for v in nbrs:
                yield u, v

    def vertices(self) -> list[Vertex]:
        return [E(i) for i in range(self.n_e)] + [O(j) for j in range(self.n_o)]

    def labels(self, side: Side) -> tuple[int, ...] | None:
        return self.labels_e if side is Side.E else self.labels_o

    def nbhd(self, side: Side, idxs: Iterable[int]) -> frozenset[int]:
        """N(S) for S on ``side``; the result lives on ``side.other``."""
        adj = self.adj(side)
        out: set[int] = set()
        for i in idxs:
            out.update(adj[i])
        return frozenset(out)

    def second_nbhd(self, side: Side, idxs: Iterable[int]) -> frozenset[int]:
        return self.nbhd(side.other, self.nbhd(side, idxs))

    @cached_property
    def _dist2(self) -> dict[Side, tuple[tuple[int, ...], ...]]:
        out = {}
        for side in (Side.E, Side.O):
            adj, back = self.adj(side), self.adj(side.other)
            rows = []
            for i in range(self.size(side)):
                s = {k for j in adj[i] for k in back[j]}
                s.discard(i)
                rows.append(tuple(sorted(s)))
            out[side] = tuple(rows)
        return out

    def dist2(self, side: Side) -> tuple[tuple[int, ...], ...]:
        """Same-side vertices at distance exactly 2, per vertex of ``side``."""
        return self._dist2[side]

    def swapped(self) -> "BipartiteGraph":
        """The same graph with the roles of E and O exchanged."""
        g = BipartiteGraph(
            self.n_o,
            self.n_e,
            ((v, u) for u, v in self.edges()),
            family=self.family,
            params=self.params,
            name=f"{self.name}~swapped",
            labels_e=self.labels_o,
            labels_o=self.labels_e,
        )
        return g

    def _gid(self, v: Vertex) -> int:
        return v.index if v.side is Side.E else self.n_e + v.index

    def _vertex(self, gid: int) -> Vertex:
        return E(gid) if gid < self.n_e else O(gid - self.n_e)

    def _global_adj(self) -> list[list[int]]:
        g = [[self.n_e + j for j in a] for a in self.adj_e]
        g += [list(a) for a in self.adj_o]
        return g

    @cached_property
    def _gadj(self) -> list[list[int]]:
        return self._global_adj()

    def bfs(self, source: Vertex, max_depth: int | None = None) -> dict[Vertex, int]:
        """Distances from ``source`` (truncated at ``max_depth`` when given)."""
        self._check_vertex(source)
        gadj = self._gadj
        s = self._gid(source)
        dist = {s: 0}
        q = deque([s])
        while q:
            x = q.popleft()
            dx = dist[x]
            if max_depth is not None and dx >= max_depth:
                continue
            for y in gadj[x]:
                if y not in dist:
                    dist[y] = dx + 1
                    q.append(y)
        return {self._vertex(k): v for k, v in dist.items()}

    def _check_vertex(self, v: Vertex) -> None:
        if not isinstance(v, Vertex) or not (0 <= v.index < self.size(v.side)):
            raise ValueError(f"{v!r} is not a vertex of {self!r}")


# --------------------------------------------------------------------------
# .bg text format
# --------------------------------------------------------------------------

def load_graph(data: bytes | str, *, name: str | None = None) -> BipartiteGraph:
    """Parse and validate a ``.bg`` file.

    Format::

        bg 1
        parts <nE> <nO>
        edges <m>
        e <u> <v>      (m lines, u on E, v on O, 0-based)

    Lines starting with ``#`` are comments.  A ``# meta family=<f> k=v ...``
    comment, as written by `dump_graph`, restores the family tag.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    family, params = "custom", {}
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].split()
            if body[:1] == ["meta"]:
                for tok in body[1:]:
                    k, _, v = tok.partition("=")
                    if k == "family":
                        family = v
                    elif k:
                        params[k] = _parse_scalar(v)
            continue
        rows.append((lineno, line.split()))

    def expect(i: int, key: str, nargs: int) -> list[int]:
        if i >= len(rows):
            raise GraphFormatError(f"missing '{key}' line")
        lineno, toks = rows[i]
        if toks[0] != key or len(toks) != nargs + 1:
            raise GraphFormatError(f"line {lineno}: expected '{key}' with {nargs} fields, got {' '.join(toks)!r}")
        try:
            return [int(t) for t in toks[1:]]
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer field in {' '.join(toks)!r}") from None

    if not rows or rows[0][1] != ["bg", "1"]:
        raise GraphFormatError("first line must be 'bg 1'")
    n_e, n_o = expect(1, "parts", 2)
    (m,) = expect(2, "edges", 1)
    if len(rows) - 3 != m:
        raise GraphFormatError(f"header declares {m} edges but {len(rows) - 3} edge lines follow")
    edges = [tuple(expect(3 + i, "e", 2)) for i in range(m)]
    if n_e < 0 or n_o < 0:
        raise GraphValidationError("negative part size")
    return BipartiteGraph(n_e, n_o, edges, family=family, params=params, name=name or family)


def _parse_scalar(v: str):
    try:
        return int(v)
    except ValueError:
        return v


def dump_graph(graph: BipartiteGraph) -> str:
    lines = ["bg 1"]
    meta = " ".join(f"{k}={v}" for k, v in graph.params.items())
    lines.append(f"# meta family={graph.family} {meta}".rstrip())
    lines.append(f"parts {graph.n_e} {graph.n_o}")
    lines.append(f"edges {graph.num_edges}")
    lines.extend(f"e {u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Generators
# --------------------------------------------------------------------------

MAX_MIDDLE_LAYERS_D = 16
MAX_HYPERCUBE_K = 20


def _layer(width: int, weight: int) -> list[int]:
    out = []
    for bits in combinations(range(width), weight):
        x = 0
        for b in bits:
            x |= 1 << b
        out.append(x)
    return sorted(out)


def generate_middle_layers(d: int) -> BipartiteGraph:
    """Two middle layers of the (2d-1)-cube; E = weight d-1, O = weight d.

    Vertex labels are the bit-vectors (bit i <-> coordinate i).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > MAX_MIDDLE_LAYERS_D:
        raise ValueError(f"d={d} too large (limit {MAX_MIDDLE_LAYERS_D})")
    width = 2 * d - 1
    low, high = _layer(width, d - 1), _layer(width, d)
    pos = {x: j for j, x in enumerate(high)}
    edges = []
    for i, x in enumerate(low):
        for b in range(width):
            if not x >> b & 1:
                edges.append((i, pos[x | 1 << b]))
    return BipartiteGraph(
        len(low), len(high), edges,
        family="middle-layers", params={"d": d}, name=f"ml-d{d}",
        labels_e=low, labels_o=high,
    )


def generate_hypercube(k: int) -> BipartiteGraph:
    """Q_k split by parity of Hamming weight (E = even)."""
    if not 1 <= k <= MAX_HYPERCUBE_K:
        raise ValueError(f"k must be in [1, {MAX_HYPERCUBE_K}]")
    even = [x for x in range(1 << k) if bin(x).count("1") % 2 == 0]
    odd = [x for x in range(1 << k) if bin(x).count("1") % 2 == 1]
    pos = {x: j for j, x in enumerate(odd)}
    edges = [(i, pos[x ^ 1 << b]) for i, x in enumerate(even) for b in range(k)]
    return BipartiteGraph(
        len(even), len(odd), edges,
        family="hypercube", params={"k": k}, name=f"Q{k}",
        labels_e=even, labels_o=odd,
    )


def generate_cycle(length: int) -> BipartiteGraph:
    """Even cycle v0 v1 ... v_{len-1}; v_{2i} is E i and v_{2i+1} is O i."""
    if length % 2 or length < 4:
        raise ValueError("cycle length must be even and >= 4")
    half = length // 2
    edges = [(i, i) for i in range(half)] + [(i, (i - 1) % half) for i in range(half)]
    return BipartiteGraph(half, half, edges, family="cycle", params={"len": length}, name=f"C{length}")


def generate_path(num_vertices: int) -> BipartiteGraph:
    """Path v0 ... v_{n-1} with the same E/O naming as `generate_cycle`."""
    if num_vertices < 2:
        raise ValueError("a path needs at least 2 vertices")
    n_e, n_o = (num_vertices + 1) // 2, num_vertices // 2
    edges = []
    for j in range(num_vertices - 1):
        a, b = j, j + 1
        e, o = (a, b) if a % 2 == 0 else (b, a)
        edges.append((e // 2, o // 2))
    return BipartiteGraph(n_e, n_o, edges, family="path", params={"n": num_vertices}, name=f"P{num_vertices}")


def generate_complete_bipartite(a: int, b: int) -> BipartiteGraph:
    if a < 1 or b < 1:
        raise ValueError("both parts must be nonempty")
    edges = [(u, v) for u in range(a) for v in range(b)]
    return BipartiteGraph(a, b, edges, family="complete", params={"a": a, "b": b}, name=f"K{a},{b}")


def generate_biregular(n: int, d: int, seed: int, *, max_retries: int = 1000) -> BipartiteGraph:
    """Random d-regular bipartite graph on n + n vertices.

    Union of d random perfect matchings.  A matching that reuses an edge is
    redrawn; a disconnected union is discarded and the whole graph redrawn.
    Deterministic in ``seed``.
    """
    if d < 1 or n < 1:
        raise ValueError("n and d must be positive")
    if d > n:
        raise ValueError(f"d={d} exceeds n={n}: no simple d-regular bipartite graph")
    if d == 1 and n > 1:
        raise ValueError("a 1-regular bipartite graph on more than 1+1 vertices is disconnected")
    rng = random.Random(seed)
    for _ in range(max_retries):
        used: set[tuple[int, int]] = set()
        ok = True
        for _m in range(d):
            for _try in range(max_retries):
                perm = list(range(n))
                rng.shuffle(perm)
                pairs = [(i, perm[i]) for i in range(n)]
                if not any(p in used for p in pairs):
                    used.update(pairs)
                    break
            else:
                ok = False
                break
        if not ok:
            continue
        try:
            return BipartiteGraph(
                n, n, sorted(used),
                family="biregular", params={"n": n, "d": d, "seed": seed}, name=f"bireg-n{n}-d{d}-s{seed}",
            )
        except GraphValidationError:
            continue
    raise RuntimeError(f"no simple connected {d}-regular bipartite graph on {n}+{n} after {max_retries} retries")


SUITE_NAMES = ("edge", "P4", "C4", "C6", "C8", "K2,3", "K3,3", "Q3", "ml-d2", "ml-d3")


def builtin_graph(name: str) -> BipartiteGraph:
    """Graphs of the built-in oracle suite, plus a few parametrised names."""
    fixed = {
        "edge": lambda: generate_path(2),
        "P4": lambda: generate_path(4),
        "C4": lambda: generate_cycle(4),
        "C6": lambda: generate_cycle(6),
        "C8": lambda: generate_cycle(8),
        "K2,3": lambda: generate_complete_bipartite(2, 3),
        "K3,3": lambda: generate_complete_bipartite(3, 3),
        "Q3": lambda: generate_hypercube(3),
    }
    if name in fixed:
        g = fixed[name]()
        g.name = name
        return g
    if name.startswith("ml-d"):
        return generate_middle_layers(int(name[4:]))
    if name.startswith("Q"):
        return generate_hypercube(int(name[1:]))
    if name.startswith("C"):
        return generate_cycle(int(name[1:]))
    if name.startswith("P"):
        return generate_path(int(name[1:]))
    raise KeyError(f"unknown built-in graph {name!r}")


def suite() -> list[BipartiteGraph]:
    return [builtin_graph(n) for n in SUITE_NAMES]


def cycle_vertex(j: int) -> Vertex:
    """v_j of `generate_cycle` / `generate_path` naming."""
    return E(j // 2) if j % 2 == 0 else O(j // 2)


# --------------------------------------------------------------------------
# Set-level primitives
# --------------------------------------------------------------------------

def _split_side(graph: BipartiteGraph, S: Iterable[Vertex]) -> tuple[Side | None, frozenset[int]]:
    S = list(S)
    sides = {v.side for v in S}
    if len(sides) > 1:
        raise ValueError("vertex set mixes both sides")
    for v in S:
        graph._check_vertex(v)
    side = sides.pop() if sides else None
    return side, frozenset(v.index for v in S)


def as_indices(graph: BipartiteGraph, S: Iterable[int | Vertex], side: Side) -> frozenset[int]:
    """Normalise a set of ints or Vertex objects to indices on ``side``."""
    out = set()
    n = graph.size(side)
    for v in S:
        if isinstance(v, Vertex):
            if v.side is not side:
                raise ValueError(f"{v!r} is not on side {side}")
            v = v.index
        if not 0 <= v < n:
            raise ValueError(f"index {v} out of range on side {side}")
        out.add(v)
    return frozenset(out)


def neighborhood(graph: BipartiteGraph, S: Iterable[Vertex]) -> frozenset[Vertex]:
    side, idx = _split_side(graph, S)
    if side is None:
        return frozenset()
    return frozenset(Vertex(side.other, j) for j in graph.nbhd(side, idx))


def second_neighborhood(graph: BipartiteGraph, S: Iterable[Vertex]) -> frozenset[Vertex]:
    side, idx = _split_side(graph, S)
    if side is None:
        return frozenset()
    return frozenset(Vertex(side, j) for j in graph.second_nbhd(side, idx))


def distance(graph: BipartiteGraph, u: Vertex, v: Vertex) -> int:
    graph._check_vertex(v)
    return graph.bfs(u)[v]


def diameter(graph: BipartiteGraph) -> int:
    return _diameter(graph)


def _diameter(graph: BipartiteGraph) -> int:
    cached = graph.__dict__.get("_diam")
    if cached is None:
        cached = max(max(graph.bfs(v).values()) for v in graph.vertices())
        graph.__dict__["_diam"] = cached
    return cached


def k_linked_components(graph: BipartiteGraph, S: Iterable[Vertex], k: int) -> list[frozenset[Vertex]]:
    """Maximal k-linked subsets of S, sorted canonically."""
    if k < 1:
        raise ValueError("k must be >= 1")
    S = set(S)
    for v in S:
        graph._check_vertex(v)
    near = {v: {u for u in graph.bfs(v, max_depth=k) if u in S} for v in S}
    parts = []
    left = set(S)
    while left:
        start = min(left)
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in near[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        left -= comp
        parts.append(frozenset(comp))
    return sorted(parts, key=lambda c: sorted(c))


def linked_components(graph: BipartiteGraph, side: Side, idxs: Iterable[int]) -> list[frozenset[int]]:
    """2-linked components of a same-side index set (via the distance-2 graph)."""
    d2 = graph.dist2(side)
    left = set(idxs)
    parts = []
    while left:
        start = min(left)
        comp = {start}
        stack = [start]
        left.discard(start)
        while stack:
            x = stack.pop()
            for y in d2[x]:
                if y in left:
                    left.discard(y)
                    comp.add(y)
                    stack.append(y)
        parts.append(frozenset(comp))
    return parts


def is_2linked(graph: BipartiteGraph, side: Side, idxs: Iterable[int]) -> bool:
    idxs = frozenset(idxs)
    return len(idxs) <= 1 or len(linked_components(graph, side, idxs)) == 1


def closure(graph: BipartiteGraph, side: Side, idxs: Iterable[int]) -> frozenset[int]:
    """[A] = {x on ``side`` : N(x) ⊆ N(A)}."""
    nA = graph.nbhd(side, idxs)
    adj = graph.adj(side)
    return frozenset(x for x in range(graph.size(side)) if nA.issuperset(adj[x]))


def interior(graph: BipartiteGraph, side: Side, idxs: Iterable[int]) -> frozenset[int]:
    """B(A) = {y on the other side : N(y) ⊆ A}; empty-neighbourhood vertices never occur."""
    idxs = frozenset(idxs)
    back = graph.adj(side.other)
    cand = graph.nbhd(side, idxs)
    return frozenset(y for y in cand if idxs.issuperset(back[y]))


class AssociatedSets(NamedTuple):
    A: frozenset[int]
    G: frozenset[int]
    closure: frozenset[int]
    B: frozenset[int]
    H: frozenset[int]

    @property
    def a(self) -> int:
        return len(self.A)

    @property
    def g(self) -> int:
        return len(self.G)

    @property
    def a_prime(self) -> int:
        return len(self.closure)

    @property
    def b(self) -> int:
        return len(self.B)

    @property
    def h(self) -> int:
        return len(self.H)

    @property
    def t1(self) -> int:
        return self.g - self.a_prime

    @property
    def t2(self) -> int:
        return self.h - self.b

    def sizes(self) -> tuple[int, int, int, int, int, int, int]:
        """(a, a', g, b, h, t1, t2)."""
        return self.a, self.a_prime, self.g, self.b, self.h, self.t1, self.t2


def associated_sets(graph: BipartiteGraph, A: Iterable[int | Vertex], side: Side = Side.E) -> AssociatedSets:
    """G = N(A), [A], B = {v : N(v) ⊆ A}, H = N(B) for a nonempty A on ``side``."""
    A = as_indices(graph, A, side)
    if not A:
        raise ValueError("A must be nonempty")
    G = graph.nbhd(side, A)
    cl = closure(graph, side, A)
    B = interior(graph, side, A)
    H = graph.nbhd(side.other, B)
    assert A <= cl and B <= G and H <= A
    out = AssociatedSets(A, G, cl, B, H)
    if graph.regular_degree is not None:
        assert out.b <= out.h <= out.a <= out.a_prime <= out.g, out.sizes()
    return out


# --------------------------------------------------------------------------
# Linked-subset enumeration
# --------------------------------------------------------------------------

def connected_sets(
    adj: Sequence[Sequence[int]],
    *,
    containing: int | None = None,
    max_size: int | None = None,
    allowed: frozenset[int] | None = None,
) -> Iterator[frozenset[int]]:
    """Every connected vertex set of the graph ``adj``, each exactly once.

    ESU-style extension: a set is grown only through exclusive neighbours of
    the newest vertex, and (without ``containing``) only through vertices
    larger than its anchor, its minimum.  With ``containing=v`` only sets
    through v are produced, anchored at v.
    """
    n = len(adj)
    ok = (lambda x: True) if allowed is None else allowed.__contains__
    anchors = [containing] if containing is not None else [v for v in range(n) if ok(v)]

    def extend(sub: set[int], ext: set[int], nb_sub: set[int], anchor: int, restrict: bool):
        yield frozenset(sub)
        if max_size is not None and len(sub) >= max_size:
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            new_ext = set(ext)
            added = []
            for u in adj[w]:
                if u in sub or u in nb_sub or not ok(u):
                    continue
                if restrict and u <= anchor:
                    continue
                new_ext.add(u)
            sub.add(w)
            fresh = [u for u in adj[w] if u not in nb_sub]
            nb_sub.update(fresh)
            added = fresh
            yield from extend(sub, new_ext, nb_sub, anchor, restrict)
            sub.discard(w)
            nb_sub.difference_update(added)

    for v in anchors:
        restrict = containing is None
        ext = {u for u in adj[v] if ok(u) and (not restrict or u > v)}
        nb = set(adj[v]) | {v}
        yield from extend({v}, ext, nb, v, restrict)


def linked_subsets(
    graph: BipartiteGraph,
    side: Side,
    *,
    containing: int | None = None,
    max_size: int | None = None,
) -> Iterator[frozenset[int]]:
    """All nonempty 2-linked subsets of one side (DFS over the distance-2 graph)."""
    return connected_sets(graph.dist2(side), containing=containing, max_size=max_size)


def layer_sets(graph: BipartiteGraph, side: Side) -> list[frozenset[int]]:
    """Bit-vector labels of ``side`` viewed as subsets of the coordinate set."""
    labels = graph.labels(side)
    if labels is None:
        raise ValueError("graph carries no bit-vector labels")
    return [frozenset(b for b in range(labels[i].bit_length()) if labels[i] >> b & 1) for i in range(len(labels))]


def complement_automorphism_ok(graph: BipartiteGraph) -> bool:
    """Flipping every coordinate swaps the two middle layers and preserves adjacency."""
    if graph.family != "middle-layers":
        raise ValueError("complement map is defined on middle-layers graphs")
    d = graph.params["d"]
    mask = (1 << (2 * d - 1)) - 1
    pos_e = {x: i for i, x in enumerate(graph.labels_e)}
    pos_o = {x: j for j, x in enumerate(graph.labels_o)}
    tau_e = [pos_o[x ^ mask] for x in graph.labels_e]
    tau_o = [pos_e[y ^ mask] for y in graph.labels_o]
    edges = set(graph.edges())
    image = {(tau_o[v], tau_e[u]) for u, v in edges}
    return image == edges


def middle_layer_size(d: int) -> int:
    return comb(2 * d - 1, d)
