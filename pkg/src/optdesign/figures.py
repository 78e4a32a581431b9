"""Matplotlib rendering for the reproduction targets (file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_REGION_COLORS = {
    "B1": "tab:blue",
    "B2": "tab:orange",
    "B3": "tab:green",
    "B4": "tab:red",
    "interior": "0.8",
}


def render_weight_curve(gammas, weights, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(gammas, weights, lw=1.5)
    ax.set_xlabel(r"$\gamma_2$")
    ax.set_ylabel(r"optimal orbit weight $w^*$")
    ax.set_title("Optimal invariant weight, first slope inactive")
    ax.axhline(0.25, color="0.6", lw=0.6, ls=":")
    ax.grid(alpha=0.3)
    _save(fig, path)


def render_efficiency_curves(gammas, eff_star, eff_uniform, thresholds, path) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot(gammas, eff_star, lw=1.6, label="maximin-efficient invariant design")
    ax.plot(gammas, eff_uniform, lw=1.4, ls="--", label="uniform invariant design")
    for t in thresholds:
        ax.axvline(t, color="0.5", lw=0.7, ls=":")
    ax.set_xlabel(r"slope ratio $\gamma$")
    ax.set_ylabel("D-efficiency")
    ax.set_ylim(0.8, 1.01)
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)


def render_region_map(points, labels, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 5))
    pts = points
    for name, color in _REGION_COLORS.items():
        mask = [lab == name for lab in labels]
        if any(mask):
            sel = pts[mask]
            ax.scatter(sel[:, 0], sel[:, 1], s=3, color=color, label=name, rasterized=True)
    ax.set_xlabel(r"$\gamma_1$")
    ax.set_ylabel(r"$\gamma_2$")
    ax.set_title("Minimal-support optimality regions")
    ax.legend(markerscale=3, fontsize=8, loc="upper right")
    _save(fig, path)


def render_maximin_curve(gammas, efficiencies, w_star, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(gammas, efficiencies, lw=1.5)
    ax.set_xscale("symlog", linthresh=1.0)  # grid spans negatives and decades
    ax.set_xlabel(r"slope ratio $\gamma$ (grid)")
    ax.set_ylabel("efficiency")
    ax.set_title(f"Efficiency of the maximin design (w* = {w_star:.5f})")
    ax.grid(alpha=0.3, which="both")
    _save(fig, path)


def _save(fig, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
