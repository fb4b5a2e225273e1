"""
SVG figures for sweeps, bifurcation diagrams and convergent decay
"""

import logging
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt and no date so repeated runs give identical files
matplotlib.rcParams["svg.hashsalt"] = "entropic-chaos-degree"
SVG_METADATA = {"Date": None}


def _save(fig: plt.Figure, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info("Wrote figure", extra={"path": str(path)})
    return path


def plot_curve(
    path: Path,
    x: Sequence[float],
    y: Sequence[float],
    xlabel: str,
    ylabel: str,
    title: str,
    zero_line: bool = True
) -> Path:
    """Line plot of one sweep column; NaN rows leave gaps"""
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(np.asarray(x, dtype=float), np.asarray(y, dtype=float), color="black", linewidth=0.8)
    if zero_line:
        ax.axhline(0.0, color="grey", linewidth=0.5, linestyle="--")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_bifurcation(
    path: Path,
    params: Sequence[float],
    points: Sequence[float],
    param_name: str,
    map_name: str
) -> Path:
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.scatter(np.asarray(params), np.asarray(points), s=0.2, c="black", marker=".", linewidths=0)
    ax.set_xlabel(param_name)
    ax.set_ylabel("x")
    ax.set_title(f"Bifurcation diagram: {map_name}")
    return _save(fig, path)


def plot_decay(
    path: Path,
    denominators: Sequence[int],
    empirical: Sequence[float],
    theoretical: Sequence[float],
    bound: Sequence[float],
    v: float
) -> Path:
    """Chaos degree against convergent denominator on log-log axes"""
    fig, ax = plt.subplots(figsize=(6, 4))
    c = np.asarray(denominators, dtype=float)
    ax.loglog(c, np.asarray(empirical), "o-", color="black", label="empirical")
    ax.loglog(c, np.asarray(theoretical), "s--", color="tab:blue", label="binary entropy")
    ax.loglog(c, np.asarray(bound), ":", color="tab:red", label="log c / c")
    ax.set_xlabel("partition size c_j")
    ax.set_ylabel("D (nats)")
    ax.set_title(f"Convergent decay, v={v:.10g}")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)
