"""``domlab`` command line.

Machine-readable JSON goes to stdout, human notes to stderr. Exit codes:
0 success, 1 data error (unreadable or malformed input), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from domlab import experiments as ex
from domlab.domination import (
    ALGORITHMS,
    cell_tessellation_set,
    oldest_prefix,
    run_algorithm,
)
from domlab.errors import DomlabError, ParameterError, ParseError
from domlab.graph import exact_domination_number, k_core
from domlab.mgeop import MgeopInstance, MgeopParams, generate, sample_positions, sample_ranks
from domlab.rgg import (
    RggInstance,
    RggParams,
    best_hex_lattice,
    covering_number_upper,
    covers_unit_square,
    generate_rgg,
    kershner_constant,
    max_degree_lower_bound,
    sample_rgg_positions,
    theorem2_prediction,
)

EXIT_DATA = 1
EXIT_USAGE = 2

DOMINATE_CHOICES = ALGORITHMS + ("exact", "oldest_prefix", "cell")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True))


def _seed(args) -> tuple[int, str]:
    if args.seed is not None:
        return args.seed, "explicit"
    seed = secrets.randbits(63)
    _note(f"no --seed given; using auto seed {seed}")
    return seed, "auto"


def cmd_generate(args) -> int:
    seed, source = _seed(args)
    if args.model == "mgeop":
        params = MgeopParams(args.n, args.m, args.alpha, args.beta, args.p, seed)
        inst = generate(params)
    else:
        params = RggParams(args.n, args.r, seed)
        inst = generate_rgg(params)
    prefix = args.out or f"{args.model}_n{args.n}_s{seed}"
    edges_path = Path(f"{prefix}.edges")
    meta_path = Path(f"{prefix}.json")
    ex.write_edge_list(inst.graph, edges_path)
    meta = {
        "model": args.model,
        "params": params.to_dict(),
        "seed": seed,
        "seed_source": source,
        "nodes": inst.graph.n,
        "edges": inst.graph.num_edges,
        "edge_list": edges_path.name,
    }
    if args.with_positions:
        meta["positions"] = inst.positions.tolist()
        if args.model == "mgeop":
            meta["ranks"] = inst.ranks.tolist()
    ex.write_text(meta_path, json.dumps(meta, sort_keys=True) + "\n")
    _emit({k: v for k, v in meta.items() if k not in ("positions", "ranks")})
    _note(f"wrote {edges_path} and {meta_path}")
    return 0


def _load_meta(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read metadata: {exc}", path) from exc


def cmd_dominate(args) -> int:
    meta = _load_meta(args.meta) if args.meta else None
    n = args.n if args.n is not None else (meta["nodes"] if meta else None)
    G = ex.ingest_edge_list(args.input, n)
    seed = args.seed if args.seed is not None else 0
    algo = args.algorithm
    if algo == "exact":
        started = time.perf_counter()
        size = exact_domination_number(G, args.budget)
        report = {
            "algorithm": "exact",
            "size": size,
            "verified": True,
            "elapsed_ms": (time.perf_counter() - started) * 1000.0,
        }
        members = None
    else:
        if algo in ("oldest_prefix", "cell"):
            res = _model_algorithm(algo, G, meta, args)
        else:
            res = run_algorithm(algo, G, seed)
        report = res.to_dict()
        members = res.members
    report["lower_bound"] = max_degree_lower_bound(G) if G.n else 0.0
    report["n"] = G.n
    if args.emit_set and members is not None:
        ex.write_text(args.emit_set, "".join(f"{v}\n" for v in members))
    _emit(report)
    return 0


def _model_algorithm(algo: str, G, meta, args):
    if meta is None:
        raise ParameterError(f"{algo} needs --meta (the JSON sidecar written by 'generate')")
    prm = meta["params"]
    if algo == "oldest_prefix":
        if meta.get("model") != "mgeop":
            raise ParameterError("oldest_prefix needs an mgeop metadata file")
        params = MgeopParams(**prm)
        inst = MgeopInstance(params, G, sample_positions(params), sample_ranks(params))
        K = args.K if args.K is not None else 1.05 * (1 - params.alpha) / params.p
        return oldest_prefix(inst, K, repair=args.repair)
    if meta.get("model") != "rgg":
        raise ParameterError("cell needs an rgg metadata file")
    params = RggParams(**prm)
    positions = np.asarray(meta["positions"]) if "positions" in meta else sample_rgg_positions(params)
    return cell_tessellation_set(RggInstance(params, G, positions))


def cmd_kcore(args) -> int:
    G = ex.ingest_edge_list(args.input, args.n)
    core, ids = k_core(G, args.k)
    if core.n == 0:
        _note("warning: empty core")
    text = ex.format_edge_list(core)
    if args.out:
        ex.write_text(args.out, text)
        if args.mapping:
            ex.write_text(args.mapping, "".join(f"{i} {v}\n" for i, v in enumerate(ids)))
    else:
        sys.stdout.write(text)
    _note(f"{args.k}-core: {core.n} nodes, {core.num_edges} edges")
    return 0


def cmd_cover(args) -> int:
    count = covering_number_upper(args.eps)
    report = {
        "eps": args.eps,
        "count": count,
        "density": math.pi * args.eps**2 * count,
        "kershner_constant": kershner_constant(),
        "asymptotic_count": kershner_constant() / (math.pi * args.eps**2),
    }
    if args.check:
        lattice = best_hex_lattice(args.eps)
        report["offset"] = list(lattice.offset)
        report["covering_valid"] = covers_unit_square(lattice.points, args.eps, args.eps / 50)
    _emit(report)
    return 0


def cmd_predict(args) -> int:
    pred = theorem2_prediction(args.n, args.r)
    _emit({"n": args.n, "r": args.r, "regime": pred.regime, "low": pred.low,
           "high": pred.high, "point": pred.point})
    return 0


def cmd_experiment(args) -> int:
    config = ex.load_config(args.config)
    errors: list = []
    records = ex.run_experiment(config, jobs=args.jobs, errors=errors)
    out = args.out or config.output
    text = ex.emit_csv(records, out, include_timing=args.timings)
    if out is None:
        sys.stdout.write(text)
    fit_against = args.fit_against or config.fit_against
    with_constant = args.with_constant or config.with_constant
    fits = ex.fit_records(records, fit_against, with_constant)
    fit_path = args.fit_report or config.fit_report
    if fit_path:
        ex.emit_fit_report(fits, fit_path)
    _note(f"{len(records)} records, {len(fits)} fits, {len(errors)} failed cells")
    return EXIT_DATA if errors and not records else 0


def cmd_fit(args) -> int:
    records = ex.read_csv(args.csv)
    fits = ex.fit_records(records, args.fit_against, args.with_constant)
    text = ex.emit_fit_report(fits, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="domlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample an MGEO-P or random geometric graph")
    gen_sub = gen.add_subparsers(dest="model", required=True)
    for model in ("mgeop", "rgg"):
        g = gen_sub.add_parser(model)
        g.add_argument("--n", type=int, required=True)
        if model == "mgeop":
            g.add_argument("--m", type=int, required=True)
            g.add_argument("--alpha", type=float, required=True)
            g.add_argument("--beta", type=float, required=True)
            g.add_argument("--p", type=float, required=True)
        else:
            g.add_argument("--r", type=float, required=True)
        g.add_argument("--seed", type=int)
        g.add_argument("--out", help="output prefix; writes PREFIX.edges and PREFIX.json")
        g.add_argument("--with-positions", action="store_true")
        g.set_defaults(func=cmd_generate)

    dom = sub.add_parser("dominate", help="compute a dominating set of an edge list")
    dom.add_argument("input")
    dom.add_argument("--algorithm", "-a", choices=DOMINATE_CHOICES, default="ds_dc")
    dom.add_argument("--n", type=int, help="node count; keeps ids as given instead of compacting")
    dom.add_argument("--seed", type=int, help="tie-break seed (default 0)")
    dom.add_argument("--meta", help="metadata sidecar from 'generate' (needed by oldest_prefix, cell)")
    dom.add_argument("--K", type=float, help="oldest_prefix constant (default 1.05 (1-alpha)/p)")
    dom.add_argument("--repair", action="store_true", help="oldest_prefix: add undominated nodes")
    dom.add_argument("--budget", type=int, default=30, help="node cap for the exact search")
    dom.add_argument("--emit-set", help="write member ids, one per line")
    dom.set_defaults(func=cmd_dominate)

    kc = sub.add_parser("kcore", help="extract the k-core of an edge list")
    kc.add_argument("input")
    kc.add_argument("--k", type=int, required=True)
    kc.add_argument("--n", type=int)
    kc.add_argument("--out")
    kc.add_argument("--mapping", help="with --out: write 'core_id original_id' lines")
    kc.set_defaults(func=cmd_kcore)

    cov = sub.add_parser("cover", help="hexagonal covering count of the unit square")
    cov.add_argument("--eps", type=float, required=True)
    cov.add_argument("--check", action="store_true", help="also grid-check the covering")
    cov.set_defaults(func=cmd_cover)

    pr = sub.add_parser("predict", help="regime and predicted domination number of G(n, r)")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--r", type=float, required=True)
    pr.set_defaults(func=cmd_predict)

    exp = sub.add_parser("experiment", help="run a JSON-configured experiment grid")
    exp.add_argument("--config", required=True)
    exp.add_argument("--jobs", type=int, default=1)
    exp.add_argument("--out", help="CSV path (overrides config 'output'; default stdout)")
    exp.add_argument("--fit-report", help="JSON fit report path")
    exp.add_argument("--fit-against", choices=("core_n", "original_n"))
    exp.add_argument("--with-constant", action="store_true")
    exp.add_argument("--timings", action="store_true", help="fill elapsed_ms (not reproducible)")
    exp.set_defaults(func=cmd_experiment)

    fit = sub.add_parser("fit", help="fit y = n^x ln n to an experiment CSV")
    fit.add_argument("csv")
    fit.add_argument("--fit-against", choices=("core_n", "original_n"), default="core_n")
    fit.add_argument("--with-constant", action="store_true")
    fit.add_argument("--out")
    fit.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except ParameterError as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE
    except DomlabError as exc:
        _note(f"error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
