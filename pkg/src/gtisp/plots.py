"""Static figures rendered next to the delimited reports."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["path_plot", "tune_plot", "spectral_plot"]


def path_plot(path_result, out_path) -> None:
    """Coefficient trajectories against lambda, largest penalty first."""
    lam = path_result.lambdas
    p = next(f for f in path_result.fits if f is not None).beta.size
    betas = np.column_stack(
        [
            f.beta if f is not None else np.full(p, np.nan)
            for f in path_result.fits
        ]
    )
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for j in range(betas.shape[0]):
        ax.plot(lam, betas[j], lw=0.8)
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.set_xlabel("lambda (scaled design)")
    ax.set_ylabel("coefficient")
    ax.set_title(f"solution path, k0={path_result.k0:.4g}")
    ax.axhline(0.0, color="black", lw=0.5)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def tune_plot(report, out_path) -> None:
    """Cross-validation criteria against lambda with the selected points."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ok = ~report.failed
    lam = report.lambdas
    for name, vals, marker in (
        ("scv", report.scv, "o"),
        ("scv-aic", report.aic, "s"),
        ("scv-bic", report.bic, "^"),
    ):
        ax.plot(lam[ok], vals[ok], marker=marker, ms=3, lw=1, label=name)
    for name in ("scv", "aic", "bic"):
        l = report.selected[name]
        ax.axvline(lam[l], color="grey", lw=0.6, ls="--")
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.set_xlabel("lambda (scaled design)")
    ax.set_ylabel("criterion")
    ax.legend()
    ax2 = ax.twinx()
    ax2.plot(lam[ok], report.df[ok], color="tab:grey", lw=0.8, alpha=0.6)
    ax2.set_ylabel("df", color="tab:grey")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def spectral_plot(report, out_path) -> None:
    """Per-method tone-detection rates and test error distribution."""
    names = list(report.methods)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.2))
    x = np.arange(len(names))
    width = 0.27
    for off, field, label in (
        (-width, "group_jd", "both tones found (%)"),
        (0.0, "group_miss", "tone groups missed (%)"),
        (width, "group_false_alarm", "other groups kept (%)"),
    ):
        vals = [getattr(report.methods[n], field) for n in names]
        ax1.bar(x + off, vals, width, label=label)
    ax1.set_xticks(x, names, rotation=20, ha="right")
    ax1.set_ylabel("percent of runs / groups")
    ax1.legend(fontsize=8)
    ax1.set_title(f"detection over {report.runs} runs, sigma2={report.sigma2:g}")

    ax2.boxplot(
        [report.methods[n].mse_star for n in names],
        showmeans=True,
    )
    ax2.set_xticks(np.arange(1, len(names) + 1), names)
    ax2.set_ylabel("test MSE minus noise floor")
    ax2.tick_params(axis="x", rotation=20)
    ax2.set_title("prediction error")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
