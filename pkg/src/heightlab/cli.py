"""heightlab command line.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import BudgetExceeded, GraphFormatError, GraphValidationError, NotConverged
from .experiments import rows_to_csv, run_flatness
from .graph import (
    BipartiteGraph,
    builtin_graph,
    dump_graph,
    generate_biregular,
    generate_complete_bipartite,
    generate_cycle,
    generate_hypercube,
    generate_middle_layers,
    generate_path,
    load_graph,
)
from .sampler import SamplerConfig, run_chain, sample_ranges, samples_csv
from .spectral import second_eigenvalue
from .suites import SUITES, run_suite
from .zhom import DEFAULT_BUDGET, count_homs_bruteforce, count_homs_via_weights, dump_hom

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

CONFIG_KEYS = {"family", "d", "n", "seed", "samples", "burnin", "thinning", "psi", "c", "out"}
GEN_FAMILIES = ("middle-layers", "hypercube", "cycle", "path", "complete-bipartite", "biregular")


class UsageError(Exception):
    pass


def read_config(path: str) -> dict[str, str]:
    """Flat ``key=value`` lines; '#' starts a comment; unknown keys are rejected."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {k!r}")
        out[k] = v
    return out


def resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("HEIGHTLAB_SEED")
    if env is None:
        raise UsageError("this command is randomized: pass --seed or set HEIGHTLAB_SEED")
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"HEIGHTLAB_SEED must be an integer, got {env!r}") from None


def open_graph(source: str) -> BipartiteGraph:
    """A .bg file path or a built-in name (C6, ml-d3, Q3, K2,3, ...)."""
    p = Path(source)
    if p.exists():
        return load_graph(p.read_bytes(), name=p.stem)
    try:
        return builtin_graph(source)
    except (KeyError, ValueError):
        raise UsageError(f"{source!r} is neither a file nor a built-in graph") from None


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    fam = args.family
    need = {"middle-layers": ["d"], "hypercube": ["k"], "cycle": ["len"], "path": ["len"],
            "complete-bipartite": ["a", "b"], "biregular": ["n", "d"]}[fam]
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise UsageError(f"--family {fam} needs " + ", ".join("--" + k for k in missing))
    if fam == "middle-layers":
        g = generate_middle_layers(args.d)
    elif fam == "hypercube":
        g = generate_hypercube(args.k)
    elif fam == "cycle":
        g = generate_cycle(args.len)
    elif fam == "path":
        g = generate_path(args.len)
    elif fam == "complete-bipartite":
        g = generate_complete_bipartite(args.a, args.b)
    else:
        g = generate_biregular(args.n, args.d, resolve_seed(args))
        assert all(len(a) == args.d for a in g.adj_e + g.adj_o)
    emit(dump_graph(g), args.out)
    return EXIT_OK


def cmd_count(args) -> int:
    g = open_graph(args.graph)
    if args.method in ("weights", "both"):
        w = count_homs_via_weights(g, args.root, budget=args.budget)
    if args.method in ("brute", "both"):
        b = count_homs_bruteforce(g, args.root, budget=args.budget)
    if args.method == "both":
        print(f"{w} = {b}" if w == b else f"{w} != {b}")
        return EXIT_OK if w == b else EXIT_FAIL
    print(w if args.method == "weights" else b)
    return EXIT_OK


def cmd_sample(args) -> int:
    g = open_graph(args.graph)
    seed = resolve_seed(args)
    cfg = SamplerConfig(args.burnin, args.thinning, args.samples, seed, args.random_scan)
    if args.dump:
        text = "".join(dump_hom(h) + "\n" for h in run_chain(g, args.root, cfg))
        Path(args.dump).write_text(text)
    rows = {c: sample_ranges(g, args.root, cfg, chain=c) for c in range(args.chains)}
    emit(samples_csv(rows), args.out)
    return EXIT_OK


def cmd_spectra(args) -> int:
    g = open_graph(args.graph)
    prof = second_eigenvalue(g, args.mode)
    print(f"graph={g.name} d={prof.d} lambda2={prof.lambda2:.12g} alpha={prof.alpha:.6g} "
          f"delta={prof.delta:.6g} method={prof.method} residual={prof.residual:.3g}")
    return EXIT_OK


def cmd_check(args) -> int:
    rep = run_suite(args.suite)
    if args.out:
        Path(args.out).write_text(rep.to_csv())
    for note in rep.notes:
        print("note:", note)
    for row in rep.violations:
        print("FAIL", *row.as_tuple())
    print(rep.summary(), "PASS" if rep.passed else "FAIL")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from None


def cmd_experiment(args) -> int:
    seed = resolve_seed(args)
    params = _int_list(args.sweep)
    seeds = [seed + i for i in range(args.seeds)]
    try:
        rows = run_flatness(
            args.family, params, seeds=seeds, samples=args.samples, burnin=args.burnin,
            thinning=args.thinning, method=args.method, d=args.d or 4, workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    emit(rows_to_csv(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heightlab", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="flat key=value file; flags override it")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated graph in .bg format")
    g.add_argument("--family", required=True, choices=GEN_FAMILIES)
    for flag in ("d", "k", "len", "n", "a", "b", "seed"):
        g.add_argument(f"--{flag}", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("count", help="exact number of rooted homomorphisms")
    c.add_argument("graph")
    c.add_argument("--method", choices=("brute", "weights", "both"), default="weights")
    c.add_argument("--root", type=int, default=0)
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.set_defaults(func=cmd_count)

    s = sub.add_parser("sample", help="Glauber samples; CSV of ranges")
    s.add_argument("graph")
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--burnin", type=int, default=1000)
    s.add_argument("--thinning", type=int, default=10)
    s.add_argument("--chains", type=int, default=1)
    s.add_argument("--root", type=int, default=0)
    s.add_argument("--random-scan", action="store_true")
    s.add_argument("--dump", help="also write chain 0 states in zh format")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    sp = sub.add_parser("spectra", help="second adjacency eigenvalue")
    sp.add_argument("graph")
    sp.add_argument("--mode", choices=("auto", "dense", "iterative"), default="auto")
    sp.set_defaults(func=cmd_spectra)

    ch = sub.add_parser("check", help="run an exhaustive check suite")
    ch.add_argument("--suite", required=True, choices=tuple(SUITES))
    ch.add_argument("--out", help="write the report CSV here")
    ch.set_defaults(func=cmd_check)

    e = sub.add_parser("experiment", help="range-flatness sweep; CSV rows")
    e.add_argument("kind", choices=("flatness",))
    e.add_argument("--family", default="middle-layers")
    e.add_argument("--sweep", required=True, help="comma-separated d (middle layers), k (hypercube) or n (biregular)")
    e.add_argument("--d", type=int, help="degree for biregular graphs (default 4)")
    e.add_argument("--seed", type=int)
    e.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds per point")
    e.add_argument("--samples", type=int, default=10_000)
    e.add_argument("--burnin", type=int, default=1000)
    e.add_argument("--thinning", type=int, default=10)
    e.add_argument("--method", choices=("auto", "exact", "mcmc"), default="auto")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = read_config(known.config)
    typed = {k: (float(v) if k == "c" else int(v) if k not in ("family", "out") else v) for k, v in cfg.items()}
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subs.choices.values():
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in typed.items() if k in dests})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, GraphFormatError, GraphValidationError, FileNotFoundError) as exc:
        print(f"heightlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"heightlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"heightlab: {exc}; use `heightlab sample` for graphs of this size", file=sys.stderr)
        return EXIT_BUDGET
    except NotConverged as exc:
        print(f"heightlab: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
