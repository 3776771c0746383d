"""Command-line entry point: ``latentorder <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .degrees import degree_histogram, pool, powerlaw_fit
from .errors import LatentOrderError
from .estimation import cls_exact, cls_heuristic, stirling2, MAX_PARTITIONS
from .experiments import ExperimentConfig, run_experiment
from .generators import generate, spec_from_dict, write_sidecar
from .graph import make_ordering, read_edge_list, read_labels, write_edge_list
from .spectral import spectral_cluster


def _dump(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_generate(args):
    model = json.loads(Path(args.model).read_text()) if Path(args.model).exists() else json.loads(args.model)
    spec = spec_from_dict(model, args.n)
    ordering = make_ordering(args.ordering, args.n, seed=args.ordering_seed)
    g = generate(spec, args.n, ordering, args.seed)
    write_edge_list(g, args.out)
    if args.sidecar:
        write_sidecar(g, spec, args.sidecar)
    return 0


def cmd_estimate(args):
    g = read_edge_list(args.edges)
    use_exact = args.solver == "exact" or (
        args.solver == "auto" and stirling2(g.n, args.k) <= MAX_PARTITIONS)
    est = cls_exact(g.adjacency, args.k) if use_exact else cls_heuristic(
        g.adjacency, args.k, restarts=args.restarts, seed=args.seed)
    _dump(est.to_dict(), args.out)
    if args.theta_csv:
        np.savetxt(args.theta_csv, est.theta_hat, delimiter=",", fmt="%.17g")
    return 0


def cmd_cluster(args):
    g = read_edge_list(args.edges)
    truth = read_labels(args.labels, g.n) if args.labels else None
    res = spectral_cluster(g.adjacency, args.k, seed=args.seed, restarts=args.restarts, truth=truth)
    _dump(res.to_dict(), args.out)
    return 0


def cmd_degree(args):
    graphs = [read_edge_list(p) for p in args.edges]
    hist = pool(degree_histogram(g.adjacency) for g in graphs)
    with open(args.csv, "w", newline="") if args.csv else _stdout() as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "count", "freq"])
        for k, c in enumerate(hist.counts):
            w.writerow([k, int(c), repr(float(c / hist.n))])
    if args.fit:
        _dump(powerlaw_fit(hist, nodes=graphs[0].n).to_dict(), args.fit)
    return 0


class _stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        return False


def cmd_experiment(args):
    raw = json.loads(Path(args.config).read_text())
    if args.outdir:
        raw["outdir"] = args.outdir
    if args.replications:
        raw["replications"] = args.replications
    if args.workers:
        raw["workers"] = args.workers
    report = run_experiment(ExperimentConfig.from_dict(raw))
    for c in report.cells:
        if c.status != "ok":
            print(f"cell {c.index} (n={c.n}, {c.ordering}) failed: {c.error}", file=sys.stderr)
    return 0 if report.complete else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latentorder", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample one graph to an edge list")
    g.add_argument("--model", required=True, help="model JSON string or path to a JSON file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--ordering", default="omega1", choices=["omega1", "omega2", "pa", "random"])
    g.add_argument("--ordering-seed", type=int, default=None, help="needed for --ordering random")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--sidecar", help="write generation metadata JSON here")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("estimate", help="combinatorial least-squares block fit")
    e.add_argument("--edges", required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--solver", choices=["auto", "exact", "heuristic"], default="auto")
    e.add_argument("--restarts", type=int, default=10)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", default="-")
    e.add_argument("--theta-csv", help="also write the fitted probability matrix")
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("cluster", help="spectral clustering")
    c.add_argument("--edges", required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--labels", help="ground-truth 'node group' file for mis-clustering")
    c.add_argument("--restarts", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_cluster)

    d = sub.add_parser("degree", help="pooled degree histogram and power-law fit")
    d.add_argument("edges", nargs="+")
    d.add_argument("--csv", help="histogram CSV (default stdout)")
    d.add_argument("--fit", help="write the power-law fit JSON here ('-' for stdout)")
    d.set_defaults(func=cmd_degree)

    x = sub.add_parser("experiment", help="run a Monte Carlo study from a JSON config")
    x.add_argument("--config", required=True)
    x.add_argument("--outdir")
    x.add_argument("--replications", type=int)
    x.add_argument("--workers", type=int)
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LatentOrderError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
