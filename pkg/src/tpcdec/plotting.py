"""Matplotlib figures written next to the CSV outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_ber", "plot_correlation"]

_STYLE = {"proposed": ("C0", "o", "Proposed max-log"), "pyndiah": ("C3", "s", "Chase-Pyndiah"),
          "oracle": ("C2", "^", "Exact MAP components"), "uncoded": ("0.4", "x", "Uncoded BPSK")}


def plot_ber(points: Sequence, path: str | Path, snr_label: str = "$E_b/N_0$ (dB)") -> Path:
    """BER vs SNR per rule with 95% Wilson bars; zero-error points are dropped."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for rule in dict.fromkeys(p.rule for p in points):
        sel = sorted((p for p in points if p.rule == rule and p.bit_errors > 0), key=lambda p: p.snr_db)
        if not sel:
            continue
        colour, marker, label = _STYLE.get(rule, (None, "o", rule))
        snr = np.array([p.snr_db for p in sel])
        ber = np.array([p.ber for p in sel])
        lo = np.array([p.ci95[0] for p in sel])
        hi = np.array([p.ci95[1] for p in sel])
        ax.errorbar(snr, ber, yerr=np.vstack([ber - lo, hi - ber]), color=colour, marker=marker, label=label, capsize=2)
    ax.set_yscale("log")
    ax.set_xlabel(snr_label)
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_correlation(table: np.ndarray, path: str | Path, fit: tuple[float, float] | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ok = np.isfinite(table["delta0"])
    for flag, colour, label in ((False, "C3", r"$c \notin L$"), (True, "C0", r"$c \in L$")):
        sel = ok & (table["in_list"] == flag)
        ax.scatter(table["delta0"][sel], table["exact_ex"][sel], s=3, alpha=0.3, color=colour, label=label)
    if fit is not None and ok.any():
        xs = np.linspace(np.nanmin(table["delta0"]), np.nanmax(table["delta0"]), 50)
        ax.plot(xs, fit[0] * xs + fit[1], "k-", lw=1.2, label="Least-squares fit")
    ax.set_xlabel("Reliability gap of the bit-0 hypothesis")
    ax.set_ylabel("Exact extrinsic LLR")
    ax.grid(True, alpha=0.3)
    ax.legend(markerscale=4)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
