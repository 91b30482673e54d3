"""Figure rendering for report paths.  All output goes to files; the Agg
backend is forced so this works headless."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def slit_domain_figure(slit_map, path):
    """Two panels: the half-plane with punctures, critical points, and
    level curves of Im F; and the image strip with its horizontal slits."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
    a = slit_map.punctures
    pad = 1.0 + 0.25 * (a[-1] - a[0] if len(a) > 1 else 1.0)
    xs = np.linspace(a[0] - pad, a[-1] + pad, 400)
    ys = np.linspace(1e-3, max(2.0, a[-1] - a[0] + 1.0), 400)
    X, Y = np.meshgrid(xs, ys)
    imF = np.imag(slit_map.F(X + 1j * Y))
    levels = np.linspace(0.0, slit_map.w0, 21)
    ax1.contour(X, Y, imF, levels=levels, linewidths=0.6, cmap="viridis")
    ax1.plot(a, [0.0] * len(a), "kx", markersize=8, label="punctures")
    if slit_map.critical_points:
        ax1.plot(
            slit_map.critical_points,
            [0.0] * len(slit_map.critical_points),
            "ro",
            markersize=5,
            label="critical points",
        )
    ax1.set_xlabel("Re")
    ax1.set_ylabel("Im")
    ax1.set_title("level curves of Im F")
    ax1.legend(loc="upper right", fontsize=8)

    w0 = slit_map.w0
    smin = min(slit_map.slit_params, default=0.0) - 2.0
    smax = max(slit_map.slit_params, default=0.0) + 2.0
    ax2.add_patch(
        plt.Rectangle((smin, 0.0), smax - smin, w0, fill=False, linewidth=1.2)
    )
    for s, t in zip(slit_map.slit_params, slit_map.slit_levels):
        ax2.plot([smin, s], [t, t], "r-", linewidth=1.5)
        ax2.plot([s], [t], "r<", markersize=6)
    ax2.set_xlim(smin - 0.3, smax + 0.3)
    ax2.set_ylim(-0.3, w0 + 0.3)
    ax2.set_xlabel("s")
    ax2.set_ylabel("t")
    ax2.set_title("image strip and slits")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def spectrum_figure(classes, path):
    """Stem plot of chord actions; two-torus spectra are shown against the
    lattice vector index, three-torus against the wrap."""
    fig, ax = plt.subplots(figsize=(7, 4))
    noncon = [c for c in classes if not c.constant_family]
    if noncon and noncon[0].model == "t3":
        ks = [c.wrap for c in noncon]
        acts = [float(c.action) for c in noncon]
        ax.stem(ks, acts, basefmt="k-")
        ax.set_xlabel("wrap k")
    else:
        idx = np.arange(len(noncon))
        acts = [float(c.action) for c in noncon]
        ax.stem(idx, acts, basefmt="k-")
        ax.set_xticks(idx)
        ax.set_xticklabels([c.label() for c in noncon], rotation=60, fontsize=7)
    ax.axhline(0.0, color="k", linewidth=0.5)
    ax.plot([0], [0.0], "g*", markersize=12, label="constant family")
    ax.set_ylabel("action")
    ax.set_title("chord spectrum")
    ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def gluing_figure(rows, path):
    """Semilog residual decay against the gluing length."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(
        [r["length"] for r in rows],
        [max(r["residual"], 1e-17) for r in rows],
        "o-",
    )
    ax.set_xlabel("gluing length")
    ax.set_ylabel("parameter residual")
    ax.set_title("predicted vs actual slit parameters")
    ax.grid(True, which="both", linewidth=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def figure_dir(figures, name):
    os.makedirs(figures, exist_ok=True)
    return os.path.join(figures, name)
