"""Range-flatness experiments: CSV rows per parameter point."""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import BudgetExceeded
from .graph import BipartiteGraph, diameter, generate_biregular, generate_hypercube, generate_middle_layers
from .sampler import SamplerConfig, range_statistics, sample_ranges
from .zhom import DEFAULT_BUDGET, ExactSampler, hom_range

FLATNESS_COLUMNS = (
    "family", "param", "n", "method", "samples", "seed",
    "frac_R_le_3", "frac_R_le_5", "frac_R_le_7", "median_R", "diameter",
)
FAMILIES = ("middle-layers", "hypercube", "biregular")

# Exhaustive labeling enumeration is only attempted on graphs this small;
# middle layers at d = 4 (70 vertices) already exhaust the node budget.
EXACT_MAX_VERTICES = 40


@dataclass(frozen=True)
class FlatnessRow:
    family: str
    param: int
    n: int
    method: str
    samples: int
    seed: int
    frac_R_le_3: float
    frac_R_le_5: float
    frac_R_le_7: float
    median_R: float
    diameter: int

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, c) for c in FLATNESS_COLUMNS)


def experiment_graph(family: str, param: int, *, d: int = 4, seed: int = 0) -> BipartiteGraph:
    if family == "middle-layers":
        return generate_middle_layers(param)
    if family == "hypercube":
        return generate_hypercube(param)
    if family == "biregular":
        return generate_biregular(param, d, seed)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def sample_range_values(graph: BipartiteGraph, method: str, config: SamplerConfig) -> tuple[list[int], str]:
    """Ranges of ``config.samples`` uniform homomorphisms and the method used."""
    if method not in ("auto", "exact", "mcmc"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exact" or (method == "auto" and graph.n_e + graph.n_o <= EXACT_MAX_VERTICES):
        try:
            sampler = ExactSampler(graph, budget=DEFAULT_BUDGET)
        except BudgetExceeded:
            if method == "exact":
                raise
        else:
            return [hom_range(h) for h in sampler.samples(config.samples, config.seed)], "exact"
    return [r[1] for r in sample_ranges(graph, 0, config)], "mcmc"


def flatness_point(family: str, param: int, config: SamplerConfig, method: str = "auto", d: int = 4) -> FlatnessRow:
    g = experiment_graph(family, param, d=d, seed=config.seed)
    ranges, used = sample_range_values(g, method, config)
    st = range_statistics(ranges)
    return FlatnessRow(
        family, param, g.n_e, used, st.count, config.seed,
        st.frac_le[3], st.frac_le[5], st.frac_le[7], st.median, diameter(g),
    )


def _point(args):
    return flatness_point(*args)


def run_flatness(
    family: str,
    params: list[int],
    *,
    seeds: list[int],
    samples: int,
    burnin: int = 1000,
    thinning: int = 10,
    method: str = "auto",
    d: int = 4,
    workers: int = 1,
) -> list[FlatnessRow]:
    """One row per (param, seed), sorted by (param, seed)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if not params or not seeds:
        raise ValueError("empty sweep")
    jobs = [
        (family, p, SamplerConfig(burnin, thinning, samples, s), method, d)
        for p in params for s in seeds
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_point, jobs))
    else:
        rows = [_point(j) for j in jobs]
    return sorted(rows, key=lambda r: (r.param, r.seed))


def median_ratio_by_param(rows: list[FlatnessRow]) -> dict[int, float]:
    """Median over seeds of median_R / diameter, per parameter."""
    by: dict[int, list[float]] = {}
    for r in rows:
        by.setdefault(r.param, []).append(r.median_R / r.diameter)
    return {p: statistics.median(v) for p, v in sorted(by.items())}


def non_increasing(values: list[float]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def non_decreasing(values: list[float]) -> bool:
    return all(b >= a for a, b in zip(values, values[1:]))


def rows_to_csv(rows: list[FlatnessRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FLATNESS_COLUMNS)
    w.writerows(r.as_tuple() for r in rows)
    return buf.getvalue()


def rows_from_csv(text: str) -> list[FlatnessRow]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader, ()))
    if header != FLATNESS_COLUMNS:
        raise ValueError("unexpected flatness CSV header")
    out = []
    for r in reader:
        out.append(FlatnessRow(
            r[0], int(r[1]), int(r[2]), r[3], int(r[4]), int(r[5]),
            float(r[6]), float(r[7]), float(r[8]), float(r[9]), int(r[10]),
        ))
    return out
