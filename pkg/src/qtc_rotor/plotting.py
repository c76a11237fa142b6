from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .records import atomic_write  # noqa: E402


def _save(fig, path, fmt):
    buf = io.BytesIO()
    # fixed metadata keeps vector output reproducible
    meta = {"Date": None} if fmt in ("svg", "pdf") else None
    fig.savefig(buf, format=fmt, metadata=meta)
    plt.close(fig)
    atomic_write(path, buf.getvalue())


def plot_orientation(records, labels, path, fmt="svg"):
    """Designated (black) and achieved orientation inside the unit sphere."""
    matplotlib.rcParams["svg.hashsalt"] = "qtc-rotor"
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    u, v = np.mgrid[0:2 * np.pi:40j, 0:np.pi:20j]
    ax.plot_wireframe(np.cos(u) * np.sin(v), np.sin(u) * np.sin(v), np.cos(v),
                      color="0.85", linewidth=0.3)
    d = records[0].designated
    ax.plot(d[:, 0], d[:, 1], d[:, 2], color="k", lw=2.0, label="designated")
    for rec, lab in zip(records, labels):
        a = rec.achieved
        ax.plot(a[:, 0], a[:, 1], a[:, 2], lw=1.0, label=lab)
    ax.set_xlabel(r"$\langle X\rangle$")
    ax.set_ylabel(r"$\langle Y\rangle$")
    ax.set_zlabel(r"$\langle Z\rangle$")
    ax.set_box_aspect((1, 1, 1))
    ax.legend(loc="upper left", fontsize="small")
    _save(fig, path, fmt)


def plot_fields(records, labels, path, fmt="svg"):
    """Three field panels against tau = B t, in units of B/mu."""
    matplotlib.rcParams["svg.hashsalt"] = "qtc-rotor"
    fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
    for i, (ax, name) in enumerate(zip(axes, "XYZ")):
        for rec, lab in zip(records, labels):
            ax.plot(rec.data[:, 0], rec.fields[:, i], lw=1.0, label=lab)
        ax.set_ylabel(rf"$\varepsilon_{name}$ [$B/\mu$]")
        ax.text(0.01, 0.85, f"({'abc'[i]})", transform=ax.transAxes)
    axes[-1].set_xlabel(r"$\tau = Bt$")
    axes[0].legend(fontsize="small")
    fig.tight_layout()
    _save(fig, path, fmt)
