"""Config-driven Monte Carlo studies with CSV, SVG and JSON output.

A config is a JSON object::

    {
      "kind": "misclustering" | "degree" | "mse" | "dependence" | "phase",
      "model": {...} or "models": [{...}, ...],   # see generators.spec_from_dict
      "n": [100, 200],
      "orderings": ["omega1", "omega2"],   # also "pa", "random:<seed>"
      "replications": 200,
      "seed": 1,
      "k": 2,                      # misclustering / mse
      "restarts": 5,               # mse: least-squares restarts
      "lags": [1, 2, 3],           # dependence
      "positions": [50, 100],      # dependence, 1-based chain positions
      "p_a": null,                 # phase: coupling threshold, default max(p0, p1)
      "outdir": "results",
      "workers": 1,
      "plots": true
    }

Cells are the product ``models x n x orderings`` numbered from 0 in that
order. Cell ``c`` uses seed ``derive_seed(seed, c)`` and its replication
``r`` uses ``derive_seed(derive_seed(seed, c), r)``, so results do not depend
on scheduling or worker count.

Outputs in ``outdir``: ``<kind>_<cell>.csv`` with one row per replication
(per lag for ``dependence``), ``degree_<cell>_hist.csv`` with the pooled
histogram and per-degree quantile bands, ``<kind>_<cell>.svg``,
``<kind>_summary.svg`` and ``report.json``.
"""

from __future__ import annotations

import csv
import functools
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import plots
from .degrees import (DegreeHistogram, components, degree_histogram, pool, poisson_tv,
                      powerlaw_fit)
from .dependence import chi_of_kernels, delta_closed_form, delta_empirical
from .errors import LatentOrderError
from .estimation import cls_heuristic, mse
from .generators import MecltgParams, derive_seed, gen_coupled, generate, spec_from_dict
from .graph import make_ordering
from .spectral import misclustered_count, spectral_cluster

log = logging.getLogger(__name__)

KINDS = ("misclustering", "degree", "mse", "dependence", "phase")


@dataclass
class ExperimentConfig:
    kind: str
    models: list
    n: list
    orderings: list = field(default_factory=lambda: ["omega1"])
    replications: int = 200
    seed: int = 0
    k: int = 2
    restarts: int = 5
    lags: list = field(default_factory=lambda: [1, 2, 3])
    positions: list | None = None
    p_a: float | None = None
    outdir: str = "results"
    workers: int = 1
    plots: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        for o in self.orderings:
            name, _, seed = o.partition(":")
            if name not in ("omega1", "omega2", "pa", "random") or (name == "random") != seed.isdigit():
                raise ValueError(f"unknown ordering {o!r}; use omega1, omega2, pa or random:<seed>")
        self.n = [int(v) for v in (self.n if isinstance(self.n, list) else [self.n])]
        for m in self.models:
            for n in self.n:
                spec_from_dict(m, n)  # validate early

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "model" in d:
            d["models"] = [d.pop("model")]
        if "ordering" in d:
            d["orderings"] = [d.pop("ordering")]
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def cells(self):
        return list(itertools.product(self.models, self.n, self.orderings))


def quantile_bands(samples, q_lo: float = 0.025, q_hi: float = 0.975):
    """Type-1 empirical quantiles: the order statistic of rank ``ceil(q R)``."""
    x = np.sort(np.asarray(samples, dtype=float))
    if len(x) == 0:
        raise ValueError("no samples")

    def q(p):
        rank = min(max(math.ceil(p * len(x) - 1e-9), 1), len(x))
        return float(x[rank - 1])

    return q(q_lo), q(q_hi)


def summarize(values) -> dict:
    v = np.asarray([x for x in values if x is not None and not
                    (isinstance(x, float) and math.isnan(x))], dtype=float)
    if len(v) == 0:
        return {"count": 0}
    lo, hi = quantile_bands(v)
    return {"count": int(len(v)), "mean": float(v.mean()), "median": float(np.median(v)),
            "lower": lo, "upper": hi}


@dataclass
class CellResult:
    index: int
    model: dict
    n: int
    ordering: str
    status: str = "ok"
    error: str | None = None
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    config: dict
    cells: list

    @property
    def complete(self) -> bool:
        return all(c.status == "ok" for c in self.cells)

    def to_dict(self) -> dict:
        cells = []
        for c in self.cells:
            d = asdict(c)
            d.pop("records")
            cells.append(d)
        return {"config": self.config, "complete": self.complete, "cells": cells}


# --------------------------------------------------------------------------
# replication pipelines; each takes (spec, n, ordering, seed, cfg) and
# returns a flat record dict


def _simulate(spec, ordering, seed):
    return generate(spec, ordering.n, ordering, seed)


def _rep_misclustering(spec, n, ordering, seed, cfg):
    g = _simulate(spec, ordering, seed)
    if g.labels is None:
        raise LatentOrderError("misclustering needs a model with ground-truth labels")
    res = spectral_cluster(g.adjacency, cfg.k, seed=seed % (2 ** 32))
    return {"misclustered": misclustered_count(res.assignment.labels, g.labels),
            "isolated": int(len(res.isolated)), "tau": res.tau}


def _rep_degree(spec, n, ordering, seed, cfg):
    g = _simulate(spec, ordering, seed)
    hist = degree_histogram(g.adjacency)
    rec = {"max_degree": int(len(hist.counts) - 1 - np.argmax(hist.counts[::-1] > 0)),
           "isolated": int(hist.counts[0]), "mean_degree": float(g.degrees.mean())}
    try:
        fit = powerlaw_fit(hist)
        rec.update(gamma0=fit.gamma0, gamma1=fit.gamma1, k_lo=fit.k_lo, k_hi=fit.k_hi)
    except LatentOrderError:
        rec.update(gamma0=float("nan"), gamma1=float("nan"), k_lo=-1, k_hi=-1)
    rec["_hist"] = hist.counts
    return rec


def _rep_mse(spec, n, ordering, seed, cfg):
    g = _simulate(spec, ordering, seed)
    # a fresh generator with the same seed reproduces the kernels exactly
    _, q0, q1, _ = spec.kernels(ordering, np.random.default_rng(seed))
    if g.theta is None:
        raise LatentOrderError("mse needs a model with a known probability matrix")
    est = cls_heuristic(g.adjacency, cfg.k, restarts=cfg.restarts, seed=seed % (2 ** 32))
    rec = {"mse": mse(est.theta_hat, g.theta), "loss": est.loss, "chi": chi_of_kernels(q0, q1)}
    if g.labels is not None:
        rec["misclustered"] = misclustered_count(est.assignment.labels, g.labels)
    return rec


def _rep_phase(spec, n, ordering, seed, cfg):
    if not isinstance(spec, MecltgParams):
        raise LatentOrderError("phase experiments need a mecltg model")
    p_a = cfg.p_a if cfg.p_a is not None else max(spec.p0, spec.p1)
    srg, g = gen_coupled(n, ordering, spec.p0, spec.p1, p_a, seed)
    sizes, connected = components(g.adjacency)
    srg_sizes, srg_connected = components(srg.adjacency)
    A, B = srg.adjacency, g.adjacency
    if p_a >= max(spec.p0, spec.p1):
        dominated = bool(np.all(B <= A))
    elif p_a <= min(spec.p0, spec.p1):
        dominated = bool(np.all(A <= B))
    else:
        dominated = None
    return {"connected": int(connected), "largest": sizes[0], "components": len(sizes),
            "srg_connected": int(srg_connected), "srg_largest": srg_sizes[0],
            "dominated": None if dominated is None else int(dominated)}


_PIPELINES = {"misclustering": _rep_misclustering, "degree": _rep_degree,
              "mse": _rep_mse, "phase": _rep_phase}


@functools.lru_cache(maxsize=8)
def _ordering(kind: str, n: int):
    # orderings are immutable, so replications of a cell can share one
    name, _, seed = kind.partition(":")
    return make_ordering(name, n, seed=int(seed) if name == "random" else None)


def _run_rep(args):
    kind, model, n, ordering_kind, seed, cfg = args
    spec = spec_from_dict(model, n)
    ordering = _ordering(ordering_kind, n)
    return _PIPELINES[kind](spec, n, ordering, seed, cfg)


def _run_dependence(cell: CellResult, cfg: ExperimentConfig, cell_seed: int):
    spec = spec_from_dict(cell.model, cell.n)
    ordering = _ordering(cell.ordering, cell.n)
    N = ordering.num_pairs
    positions = cfg.positions or sorted({max(lag + 1 for lag in cfg.lags), N // 2, N})
    for lag in cfg.lags:
        pos = [p for p in positions if p >= lag + 1]
        est = delta_empirical(spec, ordering, lag, pos, cfg.replications, derive_seed(cell_seed, lag))
        rec = {"lag": lag, "delta_hat": est.value, "se": est.se, "position": est.position,
               "outcome": est.outcome, "condition": est.condition}
        if isinstance(spec, MecltgParams):
            rec["delta_closed"] = delta_closed_form(spec.p0, spec.p1, lag)
            rec["within_3se"] = int(est.value <= rec["delta_closed"] + 3 * est.se)
        cell.records.append(rec)
    cell.summary = {k: summarize([r[k] for r in cell.records])
                    for k in ("delta_hat",)}


def _aggregate(cell: CellResult, cfg: ExperimentConfig):
    recs = cell.records
    keys = [k for k in recs[0] if not k.startswith("_")]
    cell.summary = {k: summarize([r[k] for r in recs]) for k in keys
                    if all(isinstance(r[k], (int, float)) or r[k] is None for r in recs)}
    if cfg.kind == "degree":
        hists = [DegreeHistogram(r.pop("_hist"), cell.n) for r in recs]
        pooled = pool(hists)
        width = len(pooled.counts)
        freqs = np.zeros((len(hists), width))
        for i, h in enumerate(hists):
            freqs[i, :len(h.counts)] = h.freq
        bands = [quantile_bands(freqs[:, kk]) for kk in range(width)]
        cell.extra["hist"] = {"k": list(range(width)), "count": pooled.counts.tolist(),
                              "freq": (pooled.counts / pooled.n).tolist(),
                              "lower": [b[0] for b in bands], "upper": [b[1] for b in bands]}
        try:
            cell.extra["pooled_fit"] = powerlaw_fit(pooled, nodes=cell.n).to_dict()
        except LatentOrderError as exc:
            cell.extra["pooled_fit"] = {"error": str(exc)}
        g1 = [r["gamma1"] for r in recs if not math.isnan(r["gamma1"])]
        cell.extra["mean_gamma1"] = float(np.mean(g1)) if g1 else None
        spec = spec_from_dict(cell.model, cell.n)
        if isinstance(spec, MecltgParams):
            lam = cell.n * spec.p
            cell.extra["poisson_lambda"] = lam
            cell.extra["poisson_tv"] = poisson_tv(pooled, lam)
    if cfg.kind == "phase":
        cell.extra["connected_fraction"] = float(np.mean([r["connected"] for r in recs]))
        dom = [r["dominated"] for r in recs if r["dominated"] is not None]
        cell.extra["domination_holds"] = bool(all(dom)) if dom else None


def _write_csv(path: Path, rows: list[dict]):
    if not rows:
        path.write_text("")
        return
    cols = [k for k in rows[0] if not k.startswith("_")]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rep"] + cols if "lag" not in cols else cols)
        for i, r in enumerate(rows):
            vals = [_fmt(r[c]) for c in cols]
            w.writerow([i] + vals if "lag" not in cols else vals)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def run_experiment(config: ExperimentConfig | dict, outdir=None, write: bool = True) -> ExperimentReport:
    """Run every cell, aggregate, and (optionally) write outputs."""
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    out = Path(outdir or cfg.outdir)
    cells = []
    for idx, (model, n, ordering_kind) in enumerate(cfg.cells()):
        cell = CellResult(idx, model, n, ordering_kind)
        cell_seed = derive_seed(cfg.seed, idx)
        log.info("cell %d: n=%d ordering=%s", idx, n, ordering_kind)
        try:
            if cfg.kind == "dependence":
                _run_dependence(cell, cfg, cell_seed)
            else:
                jobs = [(cfg.kind, model, n, ordering_kind, derive_seed(cell_seed, r), cfg)
                        for r in range(cfg.replications)]
                if cfg.workers > 1:
                    with ProcessPoolExecutor(cfg.workers) as pool_:
                        cell.records = list(pool_.map(_run_rep, jobs, chunksize=8))
                else:
                    cell.records = [_run_rep(j) for j in jobs]
                _aggregate(cell, cfg)
        except Exception as exc:  # recorded per cell; the run continues
            log.error("cell %d failed: %s", idx, exc)
            cell.status = "error"
            cell.error = f"{type(exc).__name__}: {exc}"
        cells.append(cell)

    report = ExperimentReport(asdict(cfg), cells)
    if write:
        write_outputs(report, cfg, out)
    return report


def write_outputs(report: ExperimentReport, cfg: ExperimentConfig, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    for cell in report.cells:
        stem = f"{cfg.kind}_{cell.index:03d}"
        _write_csv(out / f"{stem}.csv", cell.records)
        if cfg.kind == "degree" and "hist" in cell.extra:
            h = cell.extra["hist"]
            rows = [{"k": k, "count": c, "freq": f, "lower": lo, "upper": hi}
                    for k, c, f, lo, hi in zip(h["k"], h["count"], h["freq"], h["lower"], h["upper"])]
            with (out / f"{stem}_hist.csv").open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["k", "count", "freq", "lower", "upper"])
                for r in rows:
                    w.writerow([_fmt(r[c]) for c in ("k", "count", "freq", "lower", "upper")])
        if cfg.plots and cell.status == "ok":
            plots.cell_figure(cfg.kind, cell, out / f"{stem}.svg")
    if cfg.plots:
        plots.summary_figure(cfg.kind, report.cells, out / f"{cfg.kind}_summary.svg")
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True, default=_json_default) + "\n")
