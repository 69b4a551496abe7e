"""Figure rendering for the CLI report path (PNG next to the CSV output)."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

DPI = 150


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def profile_figure(r, u, du, path, title="radial profile", fb_radius=None):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(r, u, "b-", lw=1.5)
    ax1.set_xlabel("r")
    ax1.set_ylabel("U")
    if fb_radius:
        ax1.axvline(fb_radius, color="0.6", ls="--", lw=0.8)
    ax1.set_title(title)
    ax2.plot(r, du, "r-", lw=1.2)
    ax2.set_xlabel("r")
    ax2.set_ylabel("U'")
    ax2.set_title("derivative")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    _save(fig, path)


def defect_curve_figure(ells, defects, path, title="interface slope defect"):
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.semilogx(ells, defects, "o-", ms=3.5)
    ax.axhline(0.0, color="0.5", lw=0.8)
    ax.set_xlabel("center height")
    ax.set_ylabel("|slope| - sqrt(2)/beta")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    _save(fig, path)


def wave_figure(xi, phi, dphi, path, title="traveling wave"):
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(xi, phi, "b-", lw=1.5, label="phi")
    ax.plot(xi, dphi, "r--", lw=1.0, label="phi'")
    ax.set_xlabel("xi")
    ax.legend()
    ax.set_title(title)
    ax.grid(alpha=0.3)
    _save(fig, path)


def phase_portrait_figure(gamma, c, separatrices, isoclines, path):
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    for (U, V), style, label in separatrices:
        ax.plot(U, V, style, lw=1.6, label=label)
    for U, V in isoclines:
        ax.plot(U, V, "k:", lw=0.8)
    ax.set_xlabel("U")
    ax.set_ylabel("V")
    ax.set_xlim(0, None)
    ax.set_title(f"phase plane, gamma={gamma}, c={c}")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)


def scene_figure(scene, path, t_lo=None, n_t=120):
    """Positivity set of a colliding pair in the (x, t) plane."""
    if t_lo is None:
        t_lo = scene.t_star - 3.0
    ts = np.linspace(t_lo, scene.t_star - 1e-6, n_t)
    xs = np.linspace(scene.x_star - 4.0, scene.x_star + 4.0, 400)
    mask = np.zeros((n_t, xs.size))
    for i, t in enumerate(ts):
        mask[i] = scene.u(xs, t) > 0.0
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    ax.pcolormesh(xs, ts, mask, cmap="Blues", shading="auto")
    ax.plot([scene.x_star], [scene.t_star], "r*", ms=10)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title("colliding fronts: positivity set")
    _save(fig, path)


def waterfall_figure(traj, path, n_slices=12):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ks = np.unique(np.linspace(0, len(traj.times) - 1, n_slices).astype(int))
    cmap = plt.get_cmap("viridis")
    for j, k in enumerate(ks):
        ax.plot(traj.grid.x, traj.snapshots[k], color=cmap(j / max(len(ks) - 1, 1)),
                lw=1.1, label=f"t={traj.times[k]:.3f}" if j % 3 == 0 else None)
    ax.axhline(traj.eps**traj.params.beta, color="0.5", ls="--", lw=0.8,
               label="eps^beta")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_title(f"evolution, gamma={traj.params.gamma}, eps={traj.eps}")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    _save(fig, path)


def weiss_figure(samples, path):
    rs = [s.r for s in samples]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(rs, [s.W for s in samples], "o-", ms=3)
    ax1.set_xlabel("r")
    ax1.set_ylabel("W(r)")
    ax1.set_title("strip energy")
    ax2.loglog(rs, [max(s.z_term, 1e-300) for s in samples], "o-", ms=3,
               label="homogeneity term")
    ax2.loglog(rs, [max(s.h_term, 1e-300) for s in samples], "s-", ms=3,
               label="mollifier term")
    ax2.set_xlabel("r")
    ax2.legend(fontsize=8)
    ax2.set_title("monotonicity integrands")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    _save(fig, path)
