"""Matplotlib figure rendering for the CLI report paths.

Figures are written next to the delimited output; every plot function takes
already-computed curve objects so the library surface stays plot-free.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .murphy import MurphyCurve
from .order import IntegratedCdfCurve, SubsampleCurve


def save_murphy_figure(
    psi_curves: list[MurphyCurve], diff_curves: list[MurphyCurve], path: str
) -> None:
    """Per-track psi curves on the left, pairwise differences on the right."""
    ncols = 2 if diff_curves else 1
    fig, axes = plt.subplots(1, ncols, figsize=(6 * ncols, 4.5), squeeze=False)
    ax = axes[0][0]
    for curve in psi_curves:
        ax.plot(curve.thetas, curve.values, label=curve.label)
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel(r"$\hat\psi(\theta)$")
    ax.set_title("Murphy diagram")
    ax.legend()
    if diff_curves:
        ax = axes[0][1]
        for curve in diff_curves:
            ax.plot(curve.thetas, curve.values, label=curve.label)
            if curve.se is not None:
                ax.fill_between(
                    curve.thetas,
                    curve.values - 3 * curve.se,
                    curve.values + 3 * curve.se,
                    alpha=0.2,
                )
        ax.axhline(0.0, color="black", lw=0.8)
        ax.set_xlabel(r"$\theta$")
        ax.set_ylabel("score difference")
        ax.set_title("Score differences")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_subsample_figure(curves: list[SubsampleCurve], path: str) -> None:
    """p-vs-b stability plots, one panel per hypothesis, 5% line dashed."""
    fig, axes = plt.subplots(
        1, len(curves), figsize=(6 * len(curves), 4.5), squeeze=False
    )
    for ax, curve in zip(axes[0], curves):
        ax.plot(curve.b_grid, curve.p_values, marker="o", ms=3)
        ax.axhline(0.05, color="black", ls="--", lw=0.8)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("subsample size b")
        ax.set_ylabel("p-value")
        ax.set_title(curve.hypothesis)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_integrated_cdf_figure(curve: IntegratedCdfCurve, path: str) -> None:
    """Integrated empirical CDFs of both tracks and their difference."""
    fig, axes = plt.subplots(1, 2, figsize=(12, 4.5))
    axes[0].plot(curve.xs, curve.d_a, label="A")
    axes[0].plot(curve.xs, curve.d_b, label="B")
    axes[0].set_xlabel("x")
    axes[0].set_ylabel("integrated CDF")
    axes[0].legend()
    axes[1].plot(curve.xs, curve.diff)
    axes[1].axhline(0.0, color="black", lw=0.8)
    axes[1].set_xlabel("x")
    axes[1].set_ylabel("difference (A - B)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
