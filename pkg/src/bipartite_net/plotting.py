"""Figures for simulation traces, written straight to image files."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dynamics import SimTrace  # noqa: E402

RC = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "legend.frameon": False,
}


def plot_e_b(times, series: dict[str, np.ndarray], path: str | Path, title: str | None = None) -> Path:
    """Semilog plot of one or more e_b(t) curves."""
    path = Path(path)
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for label, values in series.items():
            # zeros cannot be shown on a log axis
            ax.semilogy(times, np.maximum(np.asarray(values, float), 1e-300), label=label)
        ax.set_xlabel("t")
        ax.set_ylabel(r"$e_b(t)$")
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_states(trace: SimTrace, signs, path: str | Path, title: str | None = None) -> Path:
    """One panel per state component; V1 nodes solid, V2 nodes dashed."""
    path = Path(path)
    X = trace.node_states()
    d = trace.block_dim
    with plt.rc_context(RC):
        fig, axes = plt.subplots(d, 1, sharex=True, squeeze=False,
                                 figsize=(6.4, 1.6 * d + 0.8))
        colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        for c in range(d):
            ax = axes[c, 0]
            for i in range(trace.n_nodes):
                style = "-" if signs[i] > 0 else "--"
                ax.plot(trace.times, X[:, i, c], style, color=colors[i % len(colors)],
                        label=f"x{i + 1}" if c == 0 else None)
            ax.set_ylabel(f"component {c + 1}")
        axes[-1, 0].set_xlabel("t")
        axes[0, 0].legend(ncol=min(trace.n_nodes, 5), fontsize=8, loc="upper right")
        if title:
            axes[0, 0].set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
