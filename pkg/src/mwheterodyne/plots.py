"""Optional static SVG plots (requires matplotlib, Agg backend only)."""

from __future__ import annotations

import numpy as np


def _axes():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    return fig, ax


def save_spectrum_plot(spectrum, peaks, path, f_min=None, f_max=None) -> None:
    """Spectrum with fitted peak markers; log power axis."""
    fig, ax = _axes()
    f = spectrum.frequencies
    sel = np.ones(f.size, dtype=bool)
    if f_min is not None:
        sel &= f >= f_min
    if f_max is not None:
        sel &= f <= f_max
    ax.semilogy(f[sel], np.maximum(spectrum.power[sel], 1e-300), lw=0.8)
    for pk in peaks:
        ax.axvline(pk.frequency, color="C3", ls="--", lw=0.8)
        ax.annotate(f"{pk.frequency:.3f} Hz\nFWHM {pk.fwhm:.3g} Hz",
                    (pk.frequency, pk.height), fontsize=8,
                    textcoords="offset points", xytext=(4, -12))
    ax.set_xlabel("frequency (Hz)")
    ax.set_ylabel("power (a.u.)")
    fig.savefig(path, format="svg")
    _close(fig)


def save_scaling_plot(rows, path) -> None:
    """Linewidth vs correlation duration on log-log axes with a -1 guide."""
    fig, ax = _axes()
    dur = np.array([r[1] for r in rows])
    wid = np.array([r[3] for r in rows])
    ax.loglog(dur, wid, "o-", ms=4)
    ax.loglog(dur, 0.886 / dur, "k--", lw=0.8, label="0.886 / (N T)")
    ax.set_xlabel("correlation duration N*T (s)")
    ax.set_ylabel("FWHM (Hz)")
    ax.legend()
    fig.savefig(path, format="svg")
    _close(fig)


def save_scan_plot(x, ys, path, xlabel, ylabel, labels=None) -> None:
    """One or more scan traces against a common x axis."""
    fig, ax = _axes()
    ys = np.atleast_2d(np.asarray(ys))
    for i, y in enumerate(ys):
        label = labels[i] if labels else None
        ax.plot(x, y, lw=1.0, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if labels:
        ax.legend()
    fig.savefig(path, format="svg")
    _close(fig)


def _close(fig) -> None:
    import matplotlib.pyplot as plt

    plt.close(fig)
