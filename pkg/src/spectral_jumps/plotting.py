"""Figures written next to the CLI's tabular output.

matplotlib is imported lazily with the non-interactive Agg backend, so the
library itself never needs it.
"""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _finish(fig, path):
    fig.tight_layout()
    # no software/version metadata so reruns give identical files
    fig.savefig(path, dpi=120, metadata={"Software": None})
    fig.clf()


def plot_field(grid, values, path, *, n, jumps=None, detected=None, title=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.plot(grid, values, lw=0.8, color="k", label=f"$Y_n$, n={n}")
    if jumps is not None:
        for loc, mag in jumps:
            ax.axvline(loc, color="tab:red" if mag > 0 else "tab:blue", ls=":", lw=0.8)
    if detected is not None and len(detected):
        ax.plot([e[0] for e in detected], [e[1] for e in detected], "o", mfc="none", color="tab:orange", label="detected")
    ax.set_xlim(0, 2 * np.pi)
    ax.set_xlabel("x [rad]")
    ax.set_ylabel("$Y_n(x)$")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8, frameon=False)
    _finish(fig, path)


def plot_sweep(rows, path):
    """``~S_n(x0)`` against ``log n`` per probe point, with a fitted line."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    probes = sorted({r["probe_x"] for r in rows})
    for x0 in probes:
        sel = [r for r in rows if r["probe_x"] == x0]
        ln = np.log([r["n"] for r in sel])
        s = np.array([r["conj_partial_sum"] for r in sel])
        ax.plot(ln, s, "o", ms=4, label=f"x0={x0:.4f}")
        if len(sel) > 1:
            slope, icpt = np.polyfit(ln, s, 1)
            ax.plot(ln, slope * ln + icpt, lw=0.8, color=ax.lines[-1].get_color())
    ax.set_xlabel("log n")
    ax.set_ylabel(r"$\tilde S_n(x_0)$")
    ax.legend(fontsize=8, frameon=False)
    _finish(fig, path)


def plot_slices(grid, mean_values, path, *, n, direction, offsets=()):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.plot(grid, mean_values, lw=0.8, color="k")
    for a in offsets:
        ax.axvline(a, color="tab:orange", ls="--", lw=0.8)
    ax.set_xlim(0, 2 * np.pi)
    ax.set_xlabel(f"$x_{direction}$ [rad]")
    ax.set_ylabel(f"slice-mean $Y_{{{direction},n}}$, n={n}")
    _finish(fig, path)
