"""Rooted Z-homomorphisms, legal labelings of the E-side, exact counts and exact sampling.

A homomorphism ``h`` stores its E-side and O-side values as two tuples.  A
legal labeling ``f`` stores E-side values only; it is the halved E-side of
a homomorphism.  Its weight 2^k (k = number of O-vertices on whose
neighbourhood f is constant) counts the homomorphisms that restrict to it.
"""

from __future__ import annotations

import bisect
import random
from collections import Counter, deque
from dataclasses import dataclass
from math import ceil
from typing import Iterator

from .errors import BudgetExceeded, GraphFormatError
from .graph import BipartiteGraph, Side, diameter

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class ZHomomorphism:
    e: tuple[int, ...]
    o: tuple[int, ...]
    root: int = 0

    def value(self, side: Side, i: int) -> int:
        return self.e[i] if side is Side.E else self.o[i]

    def values(self) -> tuple[int, ...]:
        return self.e + self.o


@dataclass(frozen=True)
class LegalLabeling:
    """E-side labeling; ``root`` is None for uncentered labelings."""

    values: tuple[int, ...]
    root: int | None = 0

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)


def _vals(f) -> tuple[int, ...]:
    return f.values if isinstance(f, LegalLabeling) else tuple(f)


def validate_hom(graph: BipartiteGraph, h: ZHomomorphism) -> bool:
    if len(h.e) != graph.n_e or len(h.o) != graph.n_o:
        raise ValueError("homomorphism does not assign every vertex")
    if not 0 <= h.root < graph.n_e or h.e[h.root] != 0:
        return False
    return all(abs(h.e[u] - h.o[v]) == 1 for u, v in graph.edges())


def hom_range(h: ZHomomorphism) -> int:
    """Number of distinct values taken by h."""
    vals = set(h.e) | set(h.o)
    r = len(vals)
    assert r == max(vals) - min(vals) + 1, "a valid homomorphism on a connected graph takes an interval of values"
    return r


def is_legal_labeling(graph: BipartiteGraph, f) -> bool:
    vals = _vals(f)
    if len(vals) != graph.n_e:
        return False
    root = f.root if isinstance(f, LegalLabeling) else None
    if root is not None and vals[root] != 0:
        return False
    d2 = graph.dist2(Side.E)
    return all(abs(vals[x] - vals[y]) <= 1 for x in range(graph.n_e) for y in d2[x] if y > x)


def hom_to_labeling(graph: BipartiteGraph, h: ZHomomorphism) -> LegalLabeling:
    if not validate_hom(graph, h):
        raise ValueError("not a valid rooted homomorphism")
    assert all(v % 2 == 0 for v in h.e)
    f = LegalLabeling(tuple(v // 2 for v in h.e), h.root)
    assert is_legal_labeling(graph, f)
    return f


def constant_o_vertices(graph: BipartiteGraph, f) -> list[int]:
    """O-vertices whose neighbourhood is constant under f."""
    vals = _vals(f)
    return [v for v, nb in enumerate(graph.adj_o) if len({vals[u] for u in nb}) == 1]


def weight_exponent(graph: BipartiteGraph, f) -> int:
    return len(constant_o_vertices(graph, f))


def labeling_weight(graph: BipartiteGraph, f) -> int:
    if not is_legal_labeling(graph, f):
        raise ValueError("not a legal labeling")
    return 1 << weight_exponent(graph, f)


# --------------------------------------------------------------------------
# Enumeration
# --------------------------------------------------------------------------

def _plan(graph: BipartiteGraph, root: int):
    """BFS order of the E-side distance-2 graph from root.

    Returns the order, the earlier distance-2 neighbours of each position,
    and for each position the O-vertices whose last E-neighbour sits there
    (as tuples of positions).
    """
    d2 = graph.dist2(Side.E)
    order = [root]
    seen = {root}
    q = deque([root])
    while q:
        x = q.popleft()
        for y in d2[x]:
            if y not in seen:
                seen.add(y)
                order.append(y)
                q.append(y)
    assert len(order) == graph.n_e
    pos = {v: i for i, v in enumerate(order)}
    prior = [[pos[y] for y in d2[order[i]] if pos[y] < i] for i in range(len(order))]
    closes: list[list[tuple[int, ...]]] = [[] for _ in order]
    for nb in graph.adj_o:
        ps = tuple(sorted(pos[u] for u in nb))
        closes[ps[-1]].append(ps)
    return order, prior, closes


def _walk(graph: BipartiteGraph, root: int, value_bound: int | None, budget: int) -> Iterator[tuple[list[int], list[int], int]]:
    """Depth-first walk over centered legal labelings.

    Yields (order, values-by-position, weight exponent); the values list is
    reused between yields.
    """
    if not 0 <= root < graph.n_e:
        raise ValueError("root must be an E-side index")
    default_bound = value_bound is None
    bound = ceil(diameter(graph) / 2) if default_bound else value_bound
    order, prior, closes = _plan(graph, root)
    n = len(order)
    vals = [0] * n
    exps = [0] * (n + 1)

    def gain(i: int) -> int:
        v = vals[i]
        return sum(1 for ps in closes[i] if all(vals[p] == v for p in ps))

    exps[1] = gain(0)
    if n == 1:
        yield order, vals, exps[1]
        return
    lo = [0] * n
    hi = [0] * n

    def open_level(i: int) -> None:
        pv = [vals[p] for p in prior[i]]
        a, b = max(pv) - 1, min(pv) + 1
        ca, cb = max(a, -bound), min(b, bound)
        if default_bound:
            assert (ca, cb) == (a, b), "diameter bound clipped a legal value"
        lo[i], hi[i] = ca, cb

    nodes = 0
    i = 1
    open_level(1)
    cur = lo
    while True:
        if cur[i] > hi[i]:
            i -= 1
            if i == 0:
                return
            cur[i] += 1
            continue
        vals[i] = cur[i]
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("legal-labeling enumeration", budget)
        exps[i + 1] = exps[i] + gain(i)
        if i == n - 1:
            yield order, vals, exps[n]
            cur[i] += 1
        else:
            i += 1
            open_level(i)


def enumerate_labelings(
    graph: BipartiteGraph,
    root: int = 0,
    value_bound: int | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[LegalLabeling]:
    """Every centered legal labeling with values in [-value_bound, value_bound].

    The default bound is ceil(diameter/2), which never excludes a labeling.
    """
    for order, vals, _ in _walk(graph, root, value_bound, budget):
        out = [0] * len(order)
        for p, v in enumerate(order):
            out[v] = vals[p]
        yield LegalLabeling(tuple(out), root)


def labeling_exponents(graph: BipartiteGraph, root: int = 0, *, budget: int = DEFAULT_BUDGET) -> Counter:
    """Histogram of weight exponents over all centered legal labelings."""
    return Counter(e for _, _, e in _walk(graph, root, None, budget))


def count_homs_via_weights(graph: BipartiteGraph, root: int = 0, *, budget: int = DEFAULT_BUDGET) -> int:
    return sum(c << e for e, c in labeling_exponents(graph, root, budget=budget).items())


def enumerate_homs(graph: BipartiteGraph, root: int = 0, *, budget: int = DEFAULT_BUDGET) -> Iterator[ZHomomorphism]:
    """Direct depth-first enumeration of every rooted homomorphism.

    Vertices are fixed in BFS order of the whole graph; each gets parent +- 1
    and is checked against every earlier neighbour.  Values are confined to
    [-diameter, diameter].  Independent of the labeling machinery.
    """
    if not 0 <= root < graph.n_e:
        raise ValueError("root must be an E-side index")
    gadj = graph._gadj
    n = len(gadj)
    src = root
    order = [src]
    seen = {src}
    q = deque([src])
    while q:
        x = q.popleft()
        for y in gadj[x]:
            if y not in seen:
                seen.add(y)
                order.append(y)
                q.append(y)
    pos = {v: i for i, v in enumerate(order)}
    earlier = [[pos[y] for y in gadj[order[i]] if pos[y] < i] for i in range(n)]
    bound = diameter(graph)
    vals = [0] * n
    choice = [0] * n
    nodes = 0

    def emit():
        full = [0] * n
        for p, v in enumerate(order):
            full[v] = vals[p]
        return ZHomomorphism(tuple(full[: graph.n_e]), tuple(full[graph.n_e:]), root)

    if n == 1:
        yield emit()
        return
    i = 1
    choice[1] = 0
    while True:
        if choice[i] > 1:
            i -= 1
            if i == 0:
                return
            choice[i] += 1
            continue
        base = vals[earlier[i][0]]
        v = base - 1 if choice[i] == 0 else base + 1
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("homomorphism enumeration", budget)
        if abs(v) > bound or any(abs(vals[p] - v) != 1 for p in earlier[i]):
            choice[i] += 1
            continue
        vals[i] = v
        if i == n - 1:
            yield emit()
            choice[i] += 1
        else:
            i += 1
            choice[i] = 0


def count_homs_bruteforce(graph: BipartiteGraph, root: int = 0, *, budget: int = DEFAULT_BUDGET) -> int:
    return sum(1 for _ in enumerate_homs(graph, root, budget=budget))


# --------------------------------------------------------------------------
# Expansion and sampling
# --------------------------------------------------------------------------

def _o_choices(graph: BipartiteGraph, vals: tuple[int, ...], v: int) -> tuple[int, ...]:
    seen = {vals[u] for u in graph.adj_o[v]}
    if len(seen) == 1:
        (i,) = seen
        return (2 * i - 1, 2 * i + 1)
    lo, hi = min(seen), max(seen)
    if len(seen) == 2 and hi == lo + 1:
        return (2 * lo + 1,)
    raise ValueError(f"labeling is not legal around O-vertex {v}")


def count_expansions(graph: BipartiteGraph, f) -> int:
    vals = _vals(f)
    out = 1
    for v in range(graph.n_o):
        out *= len(_o_choices(graph, vals, v))
    return out


def expand_labeling(graph: BipartiteGraph, f, seed: int | random.Random | None = None) -> ZHomomorphism:
    """A homomorphism with E-side 2f; free O-vertices use fair coins from ``seed``."""
    vals = _vals(f)
    if not is_legal_labeling(graph, vals):
        raise ValueError("not a legal labeling")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    o = []
    for v in range(graph.n_o):
        ch = _o_choices(graph, vals, v)
        o.append(ch[0] if len(ch) == 1 else ch[rng.getrandbits(1)])
    root = f.root if isinstance(f, LegalLabeling) and f.root is not None else 0
    return ZHomomorphism(tuple(2 * x for x in vals), tuple(o), root)


def all_expansions(graph: BipartiteGraph, f) -> Iterator[ZHomomorphism]:
    vals = _vals(f)
    choices = [_o_choices(graph, vals, v) for v in range(graph.n_o)]
    root = f.root if isinstance(f, LegalLabeling) and f.root is not None else 0
    e = tuple(2 * x for x in vals)

    def rec(i: int, acc: list[int]):
        if i == len(choices):
            yield ZHomomorphism(e, tuple(acc), root)
            return
        for c in choices[i]:
            acc.append(c)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


class ExactSampler:
    """Uniform sampler over all rooted homomorphisms of a small graph.

    Stores every centered legal labeling with its weight exponent; a draw
    picks a labeling with probability proportional to its weight and then
    expands it with fair coins.
    """

    def __init__(self, graph: BipartiteGraph, root: int = 0, *, budget: int = DEFAULT_BUDGET):
        self.graph = graph
        self.root = root
        self.labelings: list[tuple[int, ...]] = []
        self.cumulative: list[int] = []
        total = 0
        for order, vals, e in _walk(graph, root, None, budget):
            out = [0] * len(order)
            for p, v in enumerate(order):
                out[v] = vals[p]
            self.labelings.append(tuple(out))
            total += 1 << e
            self.cumulative.append(total)
        self.total = total

    def sample(self, rng: random.Random) -> ZHomomorphism:
        r = rng.randrange(self.total)
        k = bisect.bisect_right(self.cumulative, r)
        return expand_labeling(self.graph, LegalLabeling(self.labelings[k], self.root), rng)

    def samples(self, count: int, seed: int) -> Iterator[ZHomomorphism]:
        rng = random.Random(seed)
        for _ in range(count):
            yield self.sample(rng)


def exact_sample(graph: BipartiteGraph, root: int = 0, seed: int = 0) -> ZHomomorphism:
    return ExactSampler(graph, root).sample(random.Random(seed))


# --------------------------------------------------------------------------
# Text formats
# --------------------------------------------------------------------------

def dump_hom(h: ZHomomorphism) -> str:
    lines = ["zh 1", f"# root E {h.root}"]
    lines += [f"E {i} {v}" for i, v in enumerate(h.e)]
    lines += [f"O {i} {v}" for i, v in enumerate(h.o)]
    return "\n".join(lines) + "\n"


def dump_labeling(f: LegalLabeling) -> str:
    lines = ["zl 1"]
    if f.root is not None:
        lines.append(f"# root E {f.root}")
    lines += [f"E {i} {v}" for i, v in enumerate(f.values)]
    return "\n".join(lines) + "\n"


def _parse_assignment(text: str, header: str, graph: BipartiteGraph):
    root = None
    vals: dict[str, dict[int, int]] = {"E": {}, "O": {}}
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != header:
        raise GraphFormatError(f"expected header {header!r}")
    for ln in lines[1:]:
        if ln.startswith("#"):
            toks = ln[1:].split()
            if toks[:2] == ["root", "E"] and len(toks) == 3:
                root = int(toks[2])
            continue
        toks = ln.split()
        if len(toks) != 3 or toks[0] not in vals:
            raise GraphFormatError(f"bad line {ln!r}")
        try:
            i, v = int(toks[1]), int(toks[2])
        except ValueError:
            raise GraphFormatError(f"bad line {ln!r}") from None
        if i in vals[toks[0]]:
            raise GraphFormatError(f"vertex {toks[0]}{i} assigned twice")
        vals[toks[0]][i] = v
    return root, vals


def load_hom(text: str, graph: BipartiteGraph) -> ZHomomorphism:
    root, vals = _parse_assignment(text, "zh 1", graph)
    try:
        e = tuple(vals["E"][i] for i in range(graph.n_e))
        o = tuple(vals["O"][i] for i in range(graph.n_o))
    except KeyError as exc:
        raise ValueError(f"missing value for vertex index {exc}") from None
    return ZHomomorphism(e, o, root if root is not None else 0)


def load_labeling(text: str, graph: BipartiteGraph) -> LegalLabeling:
    root, vals = _parse_assignment(text, "zl 1", graph)
    try:
        e = tuple(vals["E"][i] for i in range(graph.n_e))
    except KeyError as exc:
        raise ValueError(f"missing value for vertex index {exc}") from None
    return LegalLabeling(e, root)
