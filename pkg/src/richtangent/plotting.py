"""Static SVG figures with reproducible bytes (no date stamp, fixed hash salt)."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .euclid_sets import PointCloudSet  # noqa: E402
from .rational import to_fraction  # noqa: E402

SVG_SALT = "richtangent"

STYLE = {
    "svg.hashsalt": SVG_SALT,
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
}


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def scatter_svg(P: PointCloudSet, path, title: str = "") -> None:
    """Scatter of a 1-D or 2-D cloud; 2-D uses the fixed view [-1, 1]²."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 4) if P.dim == 2 else (5, 1.6))
        A = P.array
        if P.dim == 1:
            ax.plot(A[:, 0], [0.0] * len(A), "|", color="k", markersize=10)
            ax.set_yticks([])
            ax.set_ylim(-1, 1)
        elif P.dim == 2:
            ax.plot(A[:, 0], A[:, 1], ".", color="k")
            ax.set_xlim(-1, 1)
            ax.set_ylim(-1, 1)
            ax.set_aspect("equal")
        else:
            raise ValueError("scatter needs d <= 2")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)


def profile_svg(rows: Sequence[dict], x: str, ys: Sequence[str], path, logx: bool = False, logy: bool = False, title: str = "") -> None:
    """Line plot of ``rows[*][y]`` against ``rows[*][x]`` for each ``y``."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        xs = [float(to_fraction(r[x])) for r in rows]
        for name in ys:
            ax.plot(xs, [float(to_fraction(r[name])) for r in rows], marker="o", label=name)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(x)
        if len(ys) > 1:
            ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)
