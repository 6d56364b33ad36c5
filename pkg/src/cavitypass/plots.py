"""Figure rendering for the command-line reports.

Everything draws through the Agg backend and writes PNG files, so the CLI
can run headless and drop a figure next to each delimited output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["save_lines", "save_spectrum_figure", "save_scan_figure"]


def save_lines(path, x, curves, xlabel: str, ylabel: str,
               logy: bool = False, title: str | None = None):
    """One panel of labelled curves; curves is a list of (label, y)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, y in curves:
        ax.plot(x, y, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if curves:
        ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_spectrum_figure(path, tau, couplings, energy_curves,
                         title: str | None = None):
    """Coupling envelopes on top, adiabatic branches below, shared axis."""
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True,
                                   height_ratios=[1, 2])
    ax0.plot(tau, couplings[0], label="eta1 / g")
    ax0.plot(tau, couplings[1], label="eta2 / g")
    ax0.set_ylabel("coupling / g")
    ax0.legend(frameon=False, fontsize=9)
    if title:
        ax0.set_title(title)
    for label, row in energy_curves:
        style = "--" if label.endswith("'") else "-"
        ax1.plot(tau, row, style, label=label)
    ax1.set_xlabel("tau")
    ax1.set_ylabel("energy / g")
    ax1.legend(frameon=False, fontsize=9, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_scan_figure(path, rows, title: str | None = None):
    """Fidelity against sigma error, one curve per delay error."""
    groups = {}
    for x, y, fid, _ in rows:
        groups.setdefault(y, []).append((x, fid))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for y in sorted(groups):
        pts = sorted(groups[y])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                markersize=3, label=f"delay error {y * 100:g}%")
    ax.set_xlabel("relative interaction-time error")
    ax.set_ylabel("fidelity")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
