"""
SVG figures of traces and ratio sweeps. Figures are derived artifacts; they
are rendered with the Agg backend and without date metadata so that repeated
runs produce identical files.
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from loguru import logger  # noqa: E402

from .core import Curve, RatioSeries  # noqa: E402

SVG_METADATA = {"Date": None}


def _save(fig, path):
    path = Path(path)
    plt.rcParams["svg.hashsalt"] = "loewner-lab"
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"Wrote figure {path}")


def plot_curves(curves, path, labels=None):
    """Draw one or more slits as polylines in the upper half-plane."""
    if isinstance(curves, Curve):
        curves = [curves]
    labels = labels or [None] * len(curves)
    fig, ax = plt.subplots(figsize=(5, 5))
    for curve, label in zip(curves, labels):
        ax.plot(curve.vertices.real, curve.vertices.imag, "-", lw=1.0, label=label)
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    if any(labels):
        ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_driving(times, values, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(times, values, "-", lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("λ(t)")
    ax.grid(True)
    fig.tight_layout()
    _save(fig, path)


def plot_sweep(series: RatioSeries, path):
    """
    Sweep values against capacity on a logarithmic axis, with the
    extrapolated limit and, when known, the expected limit as horizontal lines.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(series.times, series.values, "o", label=series.quantity)
    ax.axhline(series.limit_estimate, color="C1", ls="--", label=f"extrapolated {series.limit_estimate:.6g}")
    if series.expected_limit is not None:
        ax.axhline(series.expected_limit, color="gray", ls=":", label=f"expected {series.expected_limit:.6g}")
    ax.set_xlabel("t")
    ax.set_ylabel("ratio")
    ax.set_title(f"theorem {series.theorem} ({series.model} model)")
    ax.grid(True)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
