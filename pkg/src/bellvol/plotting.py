"""Static figures for the tabulated CLI outputs (boundary curves, Werner sweeps)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.4,
    "legend.frameon": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _figure(width=5.0, height=None):
    golden = (5**0.5 - 1) / 2
    return plt.subplots(figsize=(width, height or width * golden))


def plot_boundary(rows, path) -> Path:
    """Boundary curves ``y(x)`` at each tabulated ``z``, with ``A(z)`` in the legend.

    ``rows`` are ``(z, x, y_boundary, area)`` tuples as produced by
    :func:`bellvol.analytic.boundary_table`.
    """
    path = Path(path)
    curves: dict[float, list] = {}
    for z, x, y, a in rows:
        curves.setdefault(z, [a, [], []])
        curves[z][1].append(x)
        curves[z][2].append(y)
    with plt.rc_context(STYLE):
        fig, ax = _figure(4.5, 4.5)
        cmap = plt.get_cmap("viridis")
        for k, (z, (a, xs, ys)) in enumerate(sorted(curves.items())):
            colour = cmap(k / max(1, len(curves) - 1))
            ax.plot(xs, ys, color=colour, label=f"z={z:.3g}, A={a:.4f}")
            ax.fill_between(xs, ys, 1.0, color=colour, alpha=0.08)
        ax.plot([-1, 1], [1, 1], color="k", lw=0.8)
        ax.set_xlim(-1, 1)
        ax.set_ylim(-1, 1.02)
        ax.set_xlabel(r"$x = \cos\theta_b$")
        ax.set_ylabel(r"$y = \cos\theta_c$")
        if len(curves) <= 12:
            ax.legend(fontsize=7, loc="lower right")
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_sweep(ps, estimates, path, title=None) -> Path:
    """Violating fraction against Werner weight with Wilson error bars."""
    path = Path(path)
    frac = [e.fraction for e in estimates]
    lo = [e.fraction - e.ci_low for e in estimates]
    hi = [e.ci_high - e.fraction for e in estimates]
    with plt.rc_context(STYLE):
        fig, ax = _figure()
        ax.errorbar(ps, frac, yerr=[lo, hi], fmt="o-", ms=3, capsize=2)
        ax.set_xlabel("Werner weight p")
        ax.set_ylabel("violating fraction")
        ax.set_xlim(min(ps) - 0.02, max(ps) + 0.02)
        ax.set_ylim(bottom=0)
        if title:
            ax.set_title(title)
        fig.savefig(path)
        plt.close(fig)
    return path
