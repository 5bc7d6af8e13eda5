"""Matplotlib rendering of profiles, trajectories and sweep summaries.

All functions write PNG files and close their figures; nothing is shown
interactively.  The CLI report path calls these alongside the CSV/JSON
output; library users can ignore this module entirely.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_profile_figure",
    "save_trajectory_figure",
    "save_sweep_figure",
    "save_verdict_figure",
]

_FIGSIZE = (6.4, 4.4)


def _finish(fig, ax, path, xlabel, ylabel, title):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_profile_figure(path, delta, values, reference=None, ref_label=None,
                        label="computed", title=""):
    """Log-log profile u(d), optionally against a reference curve."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.loglog(delta, values, "-", lw=1.5, label=label)
    if reference is not None:
        ax.loglog(delta, reference, "--", lw=1.2, label=ref_label or "reference")
    ax.legend(fontsize=9)
    return _finish(fig, ax, path, "distance to boundary", "u", title)


def save_trajectory_figure(path, curves, title=""):
    """Shooting trajectories v(r); curves is a list of (label, r, v)."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, r, v in curves:
        pos = np.asarray(v) > 0
        ax.semilogy(np.asarray(r)[pos], np.asarray(v)[pos], lw=1.3, label=label)
    ax.legend(fontsize=8)
    return _finish(fig, ax, path, "r", "v(r)", title)


def save_sweep_figure(path, kappas, radii, sup_v, title=""):
    """Blow-up radius and tail supremum against the shooting slope."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    kappas = np.asarray(kappas, dtype=float)
    radii = np.asarray(radii, dtype=float)
    shown = radii > 0
    if np.any(shown):
        ax.loglog(kappas[shown], radii[shown], "o-", label="blow-up radius")
    ax.loglog(kappas, sup_v, "s--", label="tail sup of v")
    ax.invert_xaxis()
    ax.legend(fontsize=9)
    return _finish(fig, ax, path, "kappa", "radius / sup", title)


def save_verdict_figure(path, mu, margin, verdicts, title=""):
    """Threshold scatter: margin s - s_threshold vs mu, colored by verdict."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    colors = {"Existence": "tab:blue", "Nonexistence": "tab:red",
              "NoSuperharmonics": "tab:gray"}
    mu = np.asarray(mu)
    margin = np.asarray(margin)
    verdicts = np.asarray(verdicts)
    for name, color in colors.items():
        sel = verdicts == name
        if np.any(sel):
            ax.scatter(mu[sel], margin[sel], s=6, color=color, label=name)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.legend(fontsize=8)
    return _finish(fig, ax, path, "mu", "s - threshold(s)", title)
