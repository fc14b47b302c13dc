"""Figures for traces and spectra, written straight to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed ids and no timestamp keep the SVG output reproducible
plt.rcParams["svg.hashsalt"] = "slitaudit"
plt.rcParams["svg.fonttype"] = "none"


def _save(fig, path) -> Path:
    path = Path(path)
    fmt = path.suffix.lstrip(".") or "svg"
    tmp = path.with_name(f".{path.name}.part")
    fig.savefig(tmp, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
    plt.close(fig)
    tmp.replace(path)
    return path


def plot_trace(trace, path, title: str = "", features=None) -> Path:
    """Intensity against pixel, optionally marking detected fringes."""
    fig, ax = plt.subplots(figsize=(8, 4))
    if trace.unit == "rad":
        x = (trace.pixel_index - trace.center_pixel) * trace.pixel_pitch
        ax.set_xlabel("angle (rad)")
    else:
        x = trace.pixel_index
        ax.set_xlabel("pixel")
    ax.plot(x, trace.samples, lw=0.8, color="k")
    if features is not None and features.fringe_peak_positions:
        pos = np.asarray(features.fringe_peak_positions)
        ax.plot(pos, np.interp(pos, trace.pixel_index, trace.samples), "v", ms=3, color="tab:red")
    ax.set_ylabel("intensity (a.u.)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_spectrum(spectrum, path, title: str = "", mark_k: int | None = None, max_k: int | None = None) -> Path:
    """log10 power against wavenumber."""
    fig, ax = plt.subplots(figsize=(8, 4))
    stop = len(spectrum.powers) if max_k is None else min(max_k + 1, len(spectrum.powers))
    ax.plot(spectrum.wavenumbers[:stop], spectrum.log10()[:stop], lw=0.8, color="k")
    if mark_k is not None and mark_k < stop:
        ax.axvline(mark_k, ls="--", lw=0.8, color="tab:red")
        ax.annotate(f"K = {mark_k}", (mark_k, spectrum.log10()[mark_k]), xytext=(5, 5), textcoords="offset points")
    ax.set_xlabel("wavenumber (cycles per window)")
    ax.set_ylabel("log10 power")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
