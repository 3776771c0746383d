"""SVG figures for experiment cells; written without timestamps so reruns
produce identical files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "latentorder"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _title(cell):
    model = cell.model.get("preset") or cell.model.get("name") or cell.model.get("model")
    return f"{model}, n={cell.n}, {cell.ordering}"


def cell_figure(kind: str, cell, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if kind == "degree":
        h = cell.extra["hist"]
        k = np.asarray(h["k"])
        freq = np.asarray(h["freq"])
        pos = (k > 0) & (freq > 0)
        ax.loglog(k[pos], freq[pos], "o", ms=3, label="pooled frequency")
        lo = np.asarray(h["lower"])[pos]
        hi = np.asarray(h["upper"])[pos]
        ax.fill_between(k[pos], np.maximum(lo, freq[pos].min() / 10), np.maximum(hi, 1e-300),
                        alpha=0.25, label="0.025-0.975 band")
        fit = cell.extra.get("pooled_fit", {})
        if "gamma1" in fit:
            ks = np.arange(max(fit["k_lo"], 1), fit["k_hi"] + 1)
            total = float(np.sum(h["count"]))
            ax.loglog(ks, np.exp(fit["gamma0"]) * ks ** fit["gamma1"] / total, "--",
                      label=f"slope {fit['gamma1']:.2f}")
        ax.set_xlabel("degree")
        ax.set_ylabel("frequency")
        ax.legend(fontsize=7)
    elif kind == "dependence":
        lags = [r["lag"] for r in cell.records]
        ax.errorbar(lags, [r["delta_hat"] for r in cell.records],
                    yerr=[3 * r["se"] for r in cell.records], fmt="o", label="Monte Carlo")
        if cell.records and "delta_closed" in cell.records[0]:
            ax.plot(lags, [r["delta_closed"] for r in cell.records], "--", label="closed form")
        ax.set_yscale("symlog", linthresh=1e-4)
        ax.set_xlabel("lag")
        ax.set_ylabel("dependence measure")
        ax.legend(fontsize=7)
    else:
        metric = {"misclustering": "misclustered", "mse": "mse", "phase": "largest"}[kind]
        vals = [r[metric] for r in cell.records]
        ax.hist(vals, bins=min(30, max(len(set(vals)), 1)))
        ax.set_xlabel(metric)
        ax.set_ylabel("replications")
    ax.set_title(_title(cell), fontsize=9)
    _save(fig, path)


def summary_figure(kind: str, cells, path) -> None:
    """Mean, median and 0.025-0.975 band of the headline metric against n,
    one line per ordering (and model)."""
    metric = {"misclustering": "misclustered", "mse": "mse", "phase": "connected",
              "degree": "gamma1", "dependence": "delta_hat"}[kind]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    groups: dict = {}
    for c in cells:
        if c.status != "ok" or metric not in c.summary or c.summary[metric].get("count", 0) == 0:
            continue
        label = c.ordering if len({str(x.model) for x in cells}) == 1 else f"{c.ordering} {_title(c).split(',')[0]}"
        groups.setdefault(label, []).append((c.n, c.summary[metric]))
    for label, pts in groups.items():
        pts.sort(key=lambda t: t[0])
        ns = [p[0] for p in pts]
        line, = ax.plot(ns, [p[1]["mean"] for p in pts], "-o", ms=3, label=f"{label} mean")
        ax.plot(ns, [p[1]["median"] for p in pts], ":", color=line.get_color(), label=f"{label} median")
        ax.fill_between(ns, [p[1]["lower"] for p in pts], [p[1]["upper"] for p in pts],
                        color=line.get_color(), alpha=0.15)
    ax.set_xlabel("n")
    ax.set_ylabel(metric)
    if groups:
        ax.legend(fontsize=7)
    _save(fig, path)
