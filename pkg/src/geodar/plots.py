"""Figure rendering for the CLI report paths (headless, PNG files)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_null_distribution(permuted, observed: float, path) -> Path:
    """Histogram of permuted statistics with the observed value marked."""
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.hist(np.asarray(permuted), bins=30, color="#7da7c4", edgecolor="white")
    ax.axvline(observed, color="#c44e52", lw=1.5, label="observed")
    ax.set_xlabel("statistic under permutation")
    ax.set_ylabel("count")
    ax.legend(frameon=False)
    return _save(fig, path)


def save_residual_panels(model_residuals, null_residuals, path) -> Path:
    """Squared residuals over time plus their empirical CDFs."""
    model = np.asarray(model_residuals)
    null = np.asarray(null_residuals)
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(5.5, 5))
    steps = np.arange(1, model.size + 1)
    top.plot(steps, null, color="#999999", ls="--", label="null model")
    top.plot(steps, model, color="#33539e", label="fitted model")
    top.set_xlabel("time step")
    top.set_ylabel("squared residual")
    top.legend(frameon=False)
    grid = np.sort(np.concatenate([model, null]))
    bottom.step(np.sort(null), np.linspace(0, 1, null.size), color="#999999", ls="--")
    bottom.step(np.sort(model), np.linspace(0, 1, model.size), color="#33539e")
    bottom.set_xlim(0, grid[-1] * 1.05 if grid[-1] > 0 else 1)
    bottom.set_xlabel("squared residual")
    bottom.set_ylabel("empirical CDF")
    return _save(fig, path)


def save_risk_curve(curve, concentration: float, path) -> Path:
    """Probed prediction-risk values with the fitted minimizer marked."""
    us = [u for u, _ in curve]
    risks = [r for _, r in curve]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(us, risks, "o-", ms=3, color="#33539e")
    ax.axvline(concentration, color="#c44e52", lw=1.2)
    ax.set_xlabel("pull strength")
    ax.set_ylabel("prediction risk")
    return _save(fig, path)


def save_decay(estimates, rate: float, path) -> Path:
    """Contraction estimates against time on a log scale, with fitted rate."""
    est = np.asarray(estimates, dtype=float)
    t = np.arange(1, est.size + 1)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.semilogy(t, np.maximum(est, 1e-300), "o", color="#33539e", label="estimate")
    if rate > 0 and np.all(est > 0):
        anchor = est[0] / rate
        ax.semilogy(t, anchor * rate**t, color="#c44e52", lw=1.2,
                    label=f"rate {rate:.3g}")
    ax.set_xlabel("t")
    ax.set_ylabel("coupled moment")
    ax.legend(frameon=False)
    return _save(fig, path)


def save_grid_summary(rows, path) -> Path:
    """Three panels over T: scaled mean error, concentration error, rejection rate."""
    by_phi: dict[float, dict[int, list]] = {}
    for row in rows:
        by_phi.setdefault(row.phi, {}).setdefault(row.T, []).append(row)
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
    for phi in sorted(by_phi):
        lengths = sorted(by_phi[phi])
        mean_err = [np.mean([r.mean_error for r in by_phi[phi][T]]) for T in lengths]
        phi_err = [np.mean([r.phi_error for r in by_phi[phi][T]]) for T in lengths]
        rej = [np.mean([r.reject for r in by_phi[phi][T]]) for T in lengths]
        scaled = [np.sqrt(T) * e for T, e in zip(lengths, mean_err)]
        label = f"{phi:g}"
        axes[0].plot(lengths, scaled, "o-", ms=3, label=label)
        axes[1].plot(lengths, phi_err, "o-", ms=3, label=label)
        axes[2].plot(lengths, rej, "o-", ms=3, label=label)
    axes[0].set_ylabel("sqrt(T) * mean error of the mean")
    axes[1].set_ylabel("mean error of the concentration")
    axes[2].set_ylabel("rejection rate")
    axes[2].axhline(0.05, color="#aaaaaa", lw=0.8, ls=":")
    for ax in axes:
        ax.set_xlabel("T")
        ax.set_xscale("log")
    axes[2].legend(frameon=False, fontsize=8, title="phi")
    return _save(fig, path)
