"""Space-time diagrams of simulation runs on one-dimensional groups."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from .config import PartialConfig
from .group import GroupElement

UNDEFINED_COLOR = "#d9d9d9"
STATE_COLORS = ["#ffffff", "#1f1f1f", "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def spacetime_array(snapshots: list[PartialConfig], states, cells: list[GroupElement]) -> np.ndarray:
    """Rows are time steps, columns are cells; -1 marks an undefined cell."""
    code = {q: k for k, q in enumerate(states)}
    out = np.full((len(snapshots), len(cells)), -1, dtype=int)
    for t, c in enumerate(snapshots):
        for j, g in enumerate(cells):
            if g in c:
                out[t, j] = code[c[g]]
    return out


def plot_spacetime(snapshots: list[PartialConfig], states, cells: list[GroupElement], path, title: str = ""):
    """Write a space-time diagram to `path`; grey cells are undefined."""
    data = spacetime_array(snapshots, states, cells)
    colors = [UNDEFINED_COLOR] + [STATE_COLORS[k % len(STATE_COLORS)] for k in range(len(states))]
    cmap = ListedColormap(colors)
    width = min(12.0, 1.0 + 0.25 * len(cells))
    height = min(10.0, 1.0 + 0.25 * len(snapshots))
    fig, ax = plt.subplots(figsize=(max(width, 3.0), max(height, 2.0)))
    ax.imshow(data + 1, cmap=cmap, vmin=0, vmax=len(states), interpolation="nearest", aspect="auto")
    xs = [g.coords[0] for g in cells]
    step = max(1, len(xs) // 12)
    ax.set_xticks(range(0, len(xs), step))
    ax.set_xticklabels(xs[::step])
    ax.set_xlabel("cell")
    ax.set_ylabel("step")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
