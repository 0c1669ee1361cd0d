"""SVG figures for trajectories and the stretch-factor table."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no timestamp, so repeated runs write identical files
matplotlib.rcParams["svg.hashsalt"] = "choreobraid"
SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=SVG_METADATA, bbox_inches="tight")
    plt.close(fig)


def plot_trajectory(traj, path, arrows: int = 3):
    """Closed curve ``z_0([0, N])`` with the bodies at ``t = 0`` and arrows along ``[0, 1/2]``."""
    z = np.append(traj.samples, traj.samples[0])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(z.real, z.imag, color="0.2", lw=1.2)
    bodies = np.array([traj.strand(i)[0] for i in range(traj.N)])
    ax.plot(bodies.real, bodies.imag, "o", color="tab:red", ms=6, zorder=3)
    for i, b in enumerate(bodies):
        ax.annotate(str(i), (b.real, b.imag), textcoords="offset points", xytext=(4, 4), fontsize=8)
    half = traj.M // 2
    for k in range(1, arrows + 1):
        i = k * half // (arrows + 1)
        a, b = traj.samples[i], traj.samples[i + 1]
        ax.annotate("", xy=(b.real, b.imag), xytext=(a.real, a.imag),
                    arrowprops=dict(arrowstyle="-|>", color="tab:blue", lw=1.2))
    ax.axhline(0, color="0.8", lw=0.6, zorder=0)
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(f"N = {traj.N}, omega = {traj.omega}")
    _save(fig, path)


def plot_table(surveys, path):
    """Smallest and largest stretch factors against N."""
    Ns = [s.N for s in surveys]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(Ns, [s.lambda_max for s in surveys], "o-", label="largest")
    ax.plot(Ns, [s.lambda_min for s in surveys], "s-", label="smallest")
    ax.set_xlabel("N")
    ax.set_ylabel("stretch factor")
    ax.set_xticks(Ns)
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    _save(fig, path)
