"""Figure rendering for the CLI report paths.

Each helper takes the same row dictionaries the CSV writer sees and
renders a PNG/PDF next to the delimited output. Uses the Agg backend so
runs are headless-safe.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def rb_decay(table, fit, path):
    """Survival vs sequence length with the fitted A + B p^m curve."""
    ms = np.array([pt.m for pt in table], dtype=float)
    ys = np.array([pt.survival_mean for pt in table])
    es = np.array([pt.survival_stderr for pt in table])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.errorbar(ms, ys, yerr=es, fmt="o", capsize=3, label="survival")
    grid = np.linspace(ms.min(), ms.max(), 200)
    ax.plot(grid, fit.A + fit.B * fit.p ** grid, "-",
            label=f"fit p={fit.p:.4f}")
    ax.set_xlabel("sequence length m")
    ax.set_ylabel("survival probability")
    ax.legend()
    _save(fig, path)


def zne_extrapolation(table, result, path):
    """Expectation vs noise level with the zero-noise extrapolation."""
    xs = np.array([pt.lam for pt in table])
    ys = np.array([pt.e_mean for pt in table])
    es = np.array([pt.e_stderr for pt in table])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.errorbar(xs, ys, yerr=es, fmt="o", capsize=3, label="measured")
    ax.plot([0.0], [result.e_zero], "r*", markersize=12,
            label=f"{result.method} -> {result.e_zero:.4f}")
    ax.set_xlabel("noise level $\\lambda$")
    ax.set_ylabel("expectation value")
    ax.legend()
    _save(fig, path)


def variance_sweep(rows, path):
    """Estimator variance of both schemes against circuit reuse l."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ls = [r["l"] for r in rows]
    ax.plot(ls, [r["var1"] for r in rows], "o-", label="scheme 1 (reuse)")
    ax.plot(ls, [r["var2"] for r in rows], "s--", label="scheme 2 (fresh)")
    ax.set_xlabel("shots per circuit l")
    ax.set_ylabel("estimator variance")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend()
    _save(fig, path)


def measurement_scaling(rows, path):
    """N(p, alpha): closed form vs empirical medians."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    alphas = [r["alpha"] for r in rows]
    ax.plot(alphas, [r["n_formula"] for r in rows], "-", label="closed form")
    ax.plot(alphas, [r["n_empirical_median"] for r in rows], "o",
            label="empirical median")
    ax.set_xlabel("$\\alpha$")
    ax.set_ylabel("measurements")
    ax.set_yscale("log")
    ax.legend()
    _save(fig, path)


def gate_crossover(rows, path):
    """Total gate counts of repeated sampling vs the adaptive scheme."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    alphas = [r["alpha"] for r in rows]
    ax.plot(alphas, [r["vqe_gates"] for r in rows], "--", label="VQE")
    ax.plot(alphas, [r["avqe_gates"] for r in rows], "o-", label="AVQE")
    ax.set_xlabel("$\\alpha$")
    ax.set_ylabel("total gates")
    ax.set_yscale("log")
    ax.legend()
    _save(fig, path)


def runtime_sweep(rows, path):
    """Iteration cost T(M) against controller latency, one line per M."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    by_m = {}
    for r in rows:
        by_m.setdefault(r["M"], []).append(r)
    for m, pts in sorted(by_m.items()):
        pts = sorted(pts, key=lambda r: r["latency_s"])
        ax.plot([r["latency_s"] for r in pts], [r["T_s"] for r in pts],
                "o-", label=f"M={m}")
    ax.set_xlabel("one-way latency (s)")
    ax.set_ylabel("T(M) (s)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend()
    _save(fig, path)


def bandwidth_sweep(rows, path):
    """Gate-stream bandwidth against qubit count."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([r["n_qubits"] for r in rows],
            [r["bandwidth_Bps"] for r in rows], "o-")
    ax.set_xlabel("qubits")
    ax.set_ylabel("bandwidth (B/s)")
    _save(fig, path)


def backlog_curve(rows, path):
    """log10 backlog execution time against non-Clifford count k."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([r["k"] for r in rows], [r["log10_seconds"] for r in rows], "o-")
    ax.set_xlabel("non-Clifford gate count k")
    ax.set_ylabel("log10 execution time (s)")
    _save(fig, path)


def logical_rates(rows, path):
    """Logical failure rate vs physical error rate, one line per d."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    by_d = {}
    for r in rows:
        by_d.setdefault(r["d"], []).append(r)
    for d, pts in sorted(by_d.items()):
        pts = sorted(pts, key=lambda r: r["p"])
        ax.errorbar([r["p"] for r in pts], [r["p_log"] for r in pts],
                    yerr=[r["p_log_stderr"] for r in pts], fmt="o-",
                    capsize=3, label=f"d={d}")
    ax.set_xlabel("physical error rate p")
    ax.set_ylabel("logical failure rate")
    ax.set_xscale("log")
    if any(r["p_log"] > 0 for r in rows):
        ax.set_yscale("log")
    ax.legend()
    _save(fig, path)


def phase_trace(history, path):
    """Posterior trajectory (mu, sigma band) of a single adaptive run."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    mus = np.array([rec.mu for rec in history])
    sig = np.array([rec.sigma for rec in history])
    it = np.arange(1, len(history) + 1)
    ax.plot(it, mus, "-", label="$\\mu$")
    ax.fill_between(it, mus - sig, mus + sig, alpha=0.3,
                    label="$\\mu \\pm \\sigma$")
    ax.set_xlabel("update")
    ax.set_ylabel("phase estimate")
    ax.legend()
    _save(fig, path)
