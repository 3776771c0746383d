"""Acceptance suite: one check per criterion, each at its stated tolerance.

Every check records a ``criterion N PASS|FAIL`` line that pytest prints in
its terminal summary.
"""

import numpy as np
import pytest

from latentorder.dependence import empirical_conditional, k_step_conditionals, sample_chains, transition_matrix
from latentorder.errors import InfeasibleError
from latentorder.estimation import block_means, cls_exact, cls_heuristic
from latentorder.experiments import run_experiment
from latentorder.generators import (MecltgParams, block_pair_index, derive_seed, generate,
                                    make_inhom_schedule, persistence_kernels, solve_csbm,
                                    two_group_preset)
from latentorder.graph import chain_from_graph, graph_from_chain, make_ordering

SEED = 20240601


def test_c01_ordering_bijection_and_round_trip(criterion):
    failures = []
    for n in range(2, 51):
        N = n * (n - 1) // 2
        for kind in ("omega1", "omega2", "pa", "random"):
            o = make_ordering(kind, n, seed=n if kind == "random" else None)
            fwd = sorted(o.forward(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))
            if fwd != list(range(1, N + 1)):
                failures.append((kind, n, "forward"))
            if any(o.forward(*o.inverse(s)) != s for s in range(1, N + 1)):
                failures.append((kind, n, "inverse"))
            # every single-edge chain, plus the empty and complete chains
            chains = np.vstack([np.eye(N, dtype=np.uint8), np.zeros(N, np.uint8), np.ones(N, np.uint8)])
            for bits in chains:
                if not np.array_equal(chain_from_graph(graph_from_chain(bits, o), o).bits, bits):
                    failures.append((kind, n, "round trip"))
                    break
    criterion(1, "ordering bijection and chain-graph round trip, n=2..50",
              not failures, f"{len(failures)} failures {failures[:3]}")


def test_c02_mecltg_stationarity(criterion):
    n, R = 200, 2000
    o = make_ordering("omega1", n)
    chains = sample_chains(MecltgParams(0.2, 0.6), o, R, SEED)
    N = o.num_pairs
    marg = {s: float(chains[:, s - 1].mean()) for s in (1, N // 2, N)}
    worst = max(abs(v - 1 / 3) for v in marg.values())
    criterion(2, "MECLTG marginal within 0.03 of 1/3", worst <= 0.03,
              f"P(B_s=1) = {marg}, max deviation {worst:.4f}")


def test_c03_k_step_conditionals(criterion):
    p0, p1 = 0.2, 0.6
    o = make_ordering("omega2", 12)
    chains = sample_chains(MecltgParams(p0, p1), o, 5000, SEED + 3, length=40)
    details = []
    ok = True
    for k in (1, 2, 3):
        est, se, m = empirical_conditional(chains, 40, k, b=1, s=1)
        target = k_step_conditionals(p0, p1, k)["1|1"]
        within = abs(est - target) <= 3 * se
        ok &= within
        details.append(f"k={k}: {est:.4f} vs {target:.4f} (SE {se:.4f}, m={m})")
    P = transition_matrix(p0, p1)
    worst = 0.0
    Pk = np.eye(2)
    for k in range(1, 31):
        Pk = Pk @ P
        c = k_step_conditionals(p0, p1, k)
        worst = max(worst, abs(c["1|1"] - Pk[1, 1]), abs(c["1|0"] - Pk[0, 1]),
                    abs(c["0|1"] - Pk[1, 0]), abs(c["0|0"] - Pk[0, 0]))
    ok &= worst <= 1e-12
    criterion(3, "k-step conditionals within 3 SE; closed form vs matrix power <= 1e-12",
              ok, "; ".join(details) + f"; max matrix-power gap {worst:.2e}")


def test_c04_csbm_constraints(criterion):
    spec = two_group_preset()
    n, R = 120, 500
    o = make_ordering("omega1", n)
    lab = spec.kernels(o, None)[3]["labels"] - 1
    blocks = block_pair_index(2)[lab[o.pairs[:, 0]], lab[o.pairs[:, 1]]]
    dens = np.zeros(3)
    for r in range(R):
        bits = chain_from_graph(generate(spec, n, o, derive_seed(SEED, 4, r)), o).bits
        dens += [bits[blocks == m].mean() for m in range(3)]
    dens /= R
    target = np.array([1 / 7, 0.01 / 0.91, 1 / 3])
    worst = float(np.max(np.abs(dens - target)))
    raised = []
    for bad in (lambda: solve_csbm([0.1, 0.01, 0.2], [[0.4, 0.9, 0.3], [0.3, 0.1, 0.1], [0.2, 0.03, 0.6]]),
                lambda: make_inhom_schedule(0.9, [0.0]),
                lambda: persistence_kernels(np.array([0.9, 0.1]), 0.5)):
        try:
            bad()
            raised.append(False)
        except InfeasibleError:
            raised.append(True)
    criterion(4, "CSBM block densities within 0.02; infeasible inputs raise",
              worst <= 0.02 and all(raised),
              f"densities {np.round(dens, 5).tolist()} vs {np.round(target, 5).tolist()}, "
              f"max gap {worst:.4f}; infeasible cases raised {raised}")


def test_c05_heuristic_matches_exact(criterion):
    rng = np.random.default_rng(SEED + 5)
    hits = 0
    means_exact = True
    for t in range(100):
        n = int(rng.integers(4, 11))
        p = rng.uniform(0.2, 0.8)
        A = np.triu((rng.random((n, n)) < p).astype(float), 1)
        A = A + A.T
        exact = cls_exact(A, 2)
        heur = cls_heuristic(A, 2, restarts=20, seed=t)
        hits += heur.loss <= exact.loss + 1e-9
        for est in (exact, heur):
            if np.min(est.assignment.sizes) > 1:
                means_exact &= np.array_equal(est.values, block_means(A, est.assignment.labels, 2))
            else:
                means_exact &= np.array_equal(est.values, block_means(A, est.assignment.labels, 2, singleton_value=0.0))
    criterion(5, "heuristic attains exact optimum on >= 95/100; Q equals block means",
              hits >= 95 and means_exact, f"{hits}/100 optimal, block means exact: {means_exact}")


def test_c06_misclustering_ordering_effect(criterion, tmp_path):
    report = run_experiment({"kind": "misclustering", "model": {"model": "csbm", "preset": "two_group"},
                             "n": [100, 200, 400], "orderings": ["omega1", "omega2"],
                             "replications": 200, "seed": SEED, "k": 2, "plots": False},
                            outdir=tmp_path)
    means = {(c.n, c.ordering): c.summary["misclustered"]["mean"] for c in report.cells}
    ok = report.complete and all(means[(n, "omega2")] <= means[(n, "omega1")] for n in (100, 200, 400))
    criterion(6, "mean misclustered under omega2 <= omega1 for n in {100,200,400}", ok,
              ", ".join(f"n={n}: omega1 {means[(n, 'omega1')]:.3f} omega2 {means[(n, 'omega2')]:.3f}"
                        for n in (100, 200, 400)))


@pytest.fixture(scope="module")
def degree_report(tmp_path_factory):
    return run_experiment({"kind": "degree", "model": {"model": "mecltg", "lambda0": 1, "lambda1": 1, "c": 0.3},
                           "n": [1000], "orderings": ["omega1", "omega2"], "replications": 100,
                           "seed": SEED, "plots": False},
                          outdir=tmp_path_factory.mktemp("degree"))


def test_c07_powerlaw_indices(criterion, degree_report):
    cells = {c.ordering: c for c in degree_report.cells}
    g1 = np.array([r["gamma1"] for r in cells["omega1"].records])
    g2 = np.array([r["gamma1"] for r in cells["omega2"].records])
    m1, m2 = float(np.nanmean(g1)), float(np.nanmean(g2))
    frac = float(np.mean(g1 > g2))
    ok = abs(m1 + 2.4) <= 0.5 and abs(m2 + 5.6) <= 1.5 and frac >= 0.9
    pooled = {k: c.extra["pooled_fit"].get("gamma1") for k, c in cells.items()}
    criterion(7, "power-law slopes -2.4 +/- 0.5 (omega1), -5.6 +/- 1.5 (omega2), ordered in >= 90%", ok,
              f"mean per-replication slope omega1 {m1:.3f}, omega2 {m2:.3f}; ordered in {frac:.0%}; "
              f"pooled-histogram slopes {pooled}")


def test_c08_poisson_proximity(criterion, degree_report):
    cell = next(c for c in degree_report.cells if c.ordering == "omega2")
    tv = cell.extra["poisson_tv"]
    criterion(8, "omega2 pooled degree law within TV 0.1 of Poisson(n p)", tv <= 0.1,
              f"TV {tv:.4f} at lambda {cell.extra['poisson_lambda']:.3f}")


def test_c09_phase_transition(criterion, tmp_path):
    report = run_experiment({"kind": "phase",
                             "models": [{"model": "mecltg", "lambda0": 0.5, "lambda1": 0.5, "log_scaled": True},
                                        {"model": "mecltg", "lambda0": 2, "lambda1": 2, "log_scaled": True}],
                             "n": [800], "orderings": ["omega1"], "replications": 200,
                             "seed": SEED, "plots": False}, outdir=tmp_path)
    low, high = report.cells
    f_low, f_high = low.extra["connected_fraction"], high.extra["connected_fraction"]
    dominated = all(c.extra["domination_holds"] for c in report.cells)
    ok = report.complete and f_low <= 0.05 and f_high >= 0.95 and dominated
    criterion(9, "connected in <= 5% at 0.5, >= 95% at 2; coupling domination on every run", ok,
              f"connected fraction {f_low:.3f} / {f_high:.3f}; domination held on all: {dominated}")


def test_c10_consistency_trends(criterion, tmp_path):
    by_n = run_experiment({"kind": "mse", "model": {"model": "csbm", "preset": "two_group"},
                           "n": [50, 200], "orderings": ["omega1"], "replications": 50,
                           "seed": SEED, "k": 2, "restarts": 5, "plots": False}, outdir=tmp_path / "n")
    mse_n = {c.n: c.summary["mse"]["mean"] for c in by_n.cells}
    table = [[0.55, 0.45], [0.45, 0.55]]
    by_chi = run_experiment({"kind": "mse",
                             "models": [{"model": "graphon", "name": "block", "params": {"table": table},
                                         "persistence": d} for d in (0.0744, 0.595)],
                             "n": [200], "orderings": ["omega1"], "replications": 30,
                             "seed": SEED, "k": 2, "restarts": 5, "plots": False}, outdir=tmp_path / "chi")
    low, high = by_chi.cells
    chi = (low.summary["chi"]["mean"], high.summary["chi"]["mean"])
    mse_chi = (low.summary["mse"]["mean"], high.summary["mse"]["mean"])
    ok = (by_n.complete and by_chi.complete and mse_n[200] < mse_n[50]
          and abs(chi[0] - 0.2) <= 0.02 and abs(chi[1] - 0.9) <= 0.02 and mse_chi[1] >= mse_chi[0])
    criterion(10, "MSE falls with n; MSE at chi~0.9 >= at chi~0.2", ok,
              f"MSE n=50 {mse_n[50]:.3e}, n=200 {mse_n[200]:.3e}; chi {chi[0]:.3f} -> MSE {mse_chi[0]:.3e}, "
              f"chi {chi[1]:.3f} -> MSE {mse_chi[1]:.3e}")


def test_c11_determinism(criterion, tmp_path):
    configs = [
        {"kind": "misclustering", "model": {"model": "csbm", "preset": "two_group"}, "n": [40], "k": 2},
        {"kind": "degree", "model": {"model": "mecltg", "lambda0": 1, "lambda1": 1, "c": 0.3}, "n": [60]},
        {"kind": "mse", "model": {"model": "csbm", "preset": "two_group"}, "n": [30], "k": 2, "restarts": 2},
        {"kind": "dependence", "model": {"model": "mecltg", "p0": 0.2, "p1": 0.6}, "n": [12], "lags": [1, 2]},
        {"kind": "phase", "model": {"model": "mecltg", "lambda0": 1, "lambda1": 1, "log_scaled": True}, "n": [50]},
    ]
    mismatched = []
    compared = 0
    for cfg in configs:
        cfg = {**cfg, "orderings": ["omega1", "omega2"], "replications": 100 if cfg["kind"] == "dependence" else 8,
               "seed": SEED}
        for run in ("a", "b"):
            run_experiment(cfg, outdir=tmp_path / cfg["kind"] / run)
        for path in sorted((tmp_path / cfg["kind"] / "a").glob("*.csv")):
            compared += 1
            if path.read_bytes() != (tmp_path / cfg["kind"] / "b" / path.name).read_bytes():
                mismatched.append(f"{cfg['kind']}/{path.name}")
    criterion(11, "repeated runs give byte-identical CSVs", compared > 0 and not mismatched,
              f"{compared} CSV files compared, mismatches: {mismatched}")
