"""SVG figures for the CLI reports.

Output is byte-stable: the SVG id salt is fixed and no date is embedded.
"""
from __future__ import annotations

import os
import tempfile

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "bergman-cmcd",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "figure.figsize": (4.8, 3.4),
}


def save_svg(fig, path) -> None:
    """Write ``fig`` atomically as SVG and close it."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(suffix=".svg", dir=directory)
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg", metadata={"Date": None})
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.remove(tmp)


def _circle(ax, radius, **kw):
    t = np.linspace(0, 2 * np.pi, 400)
    ax.plot(radius * np.cos(t), radius * np.sin(t), **kw)


def zeros_figure(path, domain, measures: dict) -> None:
    """Scatter of the zeros for each degree with ``|z| = rho_a`` and ``|z| = rho_x`` drawn in."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.4, 4.4))
        cmap = plt.get_cmap("viridis")
        keys = sorted(measures)
        for i, n in enumerate(keys):
            z = measures[n].roots
            ax.scatter(z.real, z.imag, s=6, color=cmap(i / max(1, len(keys) - 1)), label=f"n = {n}")
        _circle(ax, 1.0, color="black", lw=0.8)
        for d in domain.disks:
            t = np.linspace(0, 2 * np.pi, 200)
            ax.plot(d.center.real + d.radius * np.cos(t), d.center.imag + d.radius * np.sin(t),
                    color="grey", lw=0.8)
        _circle(ax, domain.rho_a, color="tab:red", ls="--", lw=0.8, label=r"$\rho_a$")
        if domain.rho_x is not None and domain.rho_x < 3:
            _circle(ax, domain.rho_x, color="tab:blue", ls=":", lw=0.8, label=r"$\rho_x$")
        ax.set_aspect("equal")
        ax.set_xlabel(r"$\mathrm{Re}\,z$")
        ax.set_ylabel(r"$\mathrm{Im}\,z$")
        ax.legend(loc="upper right", frameon=False)
        save_svg(fig, path)


def trace_figure(path, x, curves: dict, xlabel: str, ylabel: str, logy: bool = False,
                 reference: float | None = None) -> None:
    """One line per entry of ``curves`` (label -> y values)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, y in curves.items():
            y = np.asarray(y, dtype=float)
            ax.plot(x, np.abs(y) if logy else y, marker="o", ms=3, label=label)
        if reference is not None:
            ax.axhline(reference, color="grey", ls="--", lw=0.8)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend(frameon=False)
        fig.tight_layout()
        save_svg(fig, path)
