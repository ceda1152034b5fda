"""Matplotlib rendering of figure and scan reports to image files."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIGSIZE = (6.4, 4.0)
DPI = 150

_MARKERS = ("o", "*", "^", "s", "D", "v", "P", "X")


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def save_curves(path, curves, ylabel, title) -> Path:
    """Plot labeled time series with a +/- stderr band.

    ``curves`` is a list of (label, times, values, stderr) tuples; stderr
    may be None.
    """
    path = Path(path)
    fig, ax = _new_axes(title, "t (s)", ylabel)
    for i, (label, times, values, stderr) in enumerate(curves):
        marker = _MARKERS[i % len(_MARKERS)]
        ax.plot(times, values, marker=marker, markersize=3, markevery=max(len(times) // 25, 1),
                linewidth=1.0, label=label)
        if stderr is not None:
            ax.fill_between(times, values - stderr, values + stderr, alpha=0.2)
    ax.set_ylim(-0.02, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def save_scan(path, xlabel, xs, entries, title) -> Path:
    """Plot scan metrics: time-to-half-coherence where reached, residual otherwise."""
    path = Path(path)
    fig, axes = plt.subplots(2, 1, figsize=(FIGSIZE[0], FIGSIZE[1] * 1.4), sharex=True)
    t_half = [e.t_half if e.reached else math.nan for e in entries]
    residual = [e.residual for e in entries]
    axes[0].plot(xs, t_half, "o-", linewidth=1.0)
    axes[0].set_ylabel("t_half (s)")
    axes[0].grid(True, alpha=0.3)
    axes[0].set_title(title)
    axes[1].plot(xs, residual, "s-", linewidth=1.0, color="tab:orange")
    axes[1].set_ylabel("residual |f01(T)|")
    axes[1].set_xlabel(xlabel)
    axes[1].grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path
