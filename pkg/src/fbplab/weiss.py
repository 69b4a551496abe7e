"""Backward-kernel weighted energies, their monotonicity audit, and blow-ups.

For a center (x0, t0) the energy of a field u over the strip
S_r = R^n x (t0 - 4r^2, t0 - r^2) is

    W(u, r) = r^(-2 beta) int_(S_r) [ |grad u|^2 + 2 F(u) ] rho
              - (beta / 2) r^(-2 beta) int_(S_r) u^2 rho / (t0 - t),

with rho the backward heat kernel centered at (x0, t0) and F either the
regularized potential F_eps (eps variant) or u_+^gamma (limit variant).
Along solutions of the regularized flow the r-derivative splits into two
nonnegative pieces, one measuring parabolic beta-homogeneity through

    Z u = (x - x0) . grad u - 2 (t0 - t) du/dt - beta u,

and one carrying the mollifier h_eps(u) u^(gamma+1); the audit reproduces
the identity numerically and reports the defect.  Blow-up rescaling
u_r = u(x0 + r x, t0 + r^2 t) / r^beta is provided by interpolation, with
W(u_r, R) = W(u, r R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .model import ModelParams
from .pde import Grid, GridField, Trajectory, _centered_gradient

KERNEL_FLOOR = 1e-16  # spatial truncation of the strip integrals
TIME_NODES = 24  # Gauss-Legendre nodes per strip


class InsufficientSnapshotsError(RuntimeError):
    """The strip is not covered densely enough by the run's snapshots."""


def backward_kernel(x, t: float, n: int = 1):
    """(4 pi |t|)^(-n/2) exp(-|x|^2 / (4 |t|)) for t < 0."""
    if t >= 0.0:
        raise ValueError("backward kernel requires t < 0")
    x = np.asarray(x, dtype=float)
    out = (4.0 * math.pi * abs(t)) ** (-n / 2.0) * np.exp(-(x**2) / (4.0 * abs(t)))
    return float(out) if out.ndim == 0 else out


def synthetic_trajectory(grid: Grid, params: ModelParams, eps: float, fn,
                         times) -> Trajectory:
    """Trajectory whose snapshots sample fn(x, t) (for oracles and rescales)."""
    times = np.asarray(times, dtype=float)
    snaps = np.array([fn(grid.x, t) for t in times])
    return Trajectory(
        grid=grid, params=params, eps=eps, dt=float(np.min(np.diff(times))),
        times=times, snapshots=snaps,
        meta={"synthetic": True, "initial": snaps[0], "sup_run": snaps.max(),
              "sup_initial": snaps[0].max()},
    )


def _reflected(grid: Grid, values: np.ndarray):
    """Full-line coordinates and even extension of a symmetric field."""
    xs = np.concatenate((-grid.x[::-1], grid.x))
    vals = np.concatenate((values[::-1], values))
    return xs, vals


def _time_derivative(traj: Trajectory, t: float) -> np.ndarray:
    """Snapshot-to-snapshot centered time difference at time t."""
    dt = max(float(np.min(np.diff(traj.times))), 1e-14)
    lo, hi = traj.times[0], traj.times[-1]
    t_m, t_p = max(t - dt, lo), min(t + dt, hi)
    if t_p <= t_m:
        raise ValueError("time derivative stencil collapsed")
    return (traj.values_at(t_p) - traj.values_at(t_m)) / (t_p - t_m)


def _strip_times(traj: Trajectory, t0: float, r: float):
    """Gauss-Legendre nodes and weights covering the strip in time."""
    t_lo, t_hi = t0 - 4.0 * r**2, t0 - r**2
    if t_lo < traj.times[0] - 1e-12 or t_hi > traj.times[-1] + 1e-12:
        raise InsufficientSnapshotsError(
            f"strip ({t_lo:.4g}, {t_hi:.4g}) outside the run span"
        )
    inside = np.count_nonzero((traj.times > t_lo) & (traj.times < t_hi))
    if inside < 2:
        raise InsufficientSnapshotsError(
            f"only {inside} snapshots inside the strip at r = {r}"
        )
    nodes, wts = np.polynomial.legendre.leggauss(TIME_NODES)
    half = 0.5 * (t_hi - t_lo)
    return t_lo + half * (nodes + 1.0), wts * half


def _radial_weights(grid: Grid):
    if grid.geometry == "line_symmetric":
        return None  # handled by even reflection
    omega = 2.0 * math.pi ** (grid.n / 2.0) / math.gamma(grid.n / 2.0)
    return omega * grid.x ** (grid.n - 1) * grid.dx


def _spatial_integrals(traj: Trajectory, x0: float, t0: float, t: float,
                       eps: float, params: ModelParams, variant: str):
    """One time slice of the three strip integrands at time t.

    Returns (energy, drift, z_sq, h_term) where energy carries
    |grad u|^2 + 2F, drift carries u^2/(t0 - t), z_sq carries (Zu)^2/(t0-t),
    and h_term carries h_eps(u) u^(gamma+1), all premultiplied by the kernel
    and summed over cells.
    """
    grid = traj.grid
    u = traj.values_at(t)
    dtu = _time_derivative(traj, t)
    grad = _centered_gradient(grid, u)
    if grid.geometry == "line_symmetric":
        xs, uu = _reflected(grid, u)
        gg = np.concatenate((-grad[::-1], grad))
        tt = np.concatenate((dtu[::-1], dtu))
        w = np.full(xs.size, grid.dx)
    else:
        if abs(x0) > 1e-12:
            raise ValueError("radial geometry supports centers at the origin only")
        xs, uu, gg, tt = grid.x, u, grad, dtu
        w = _radial_weights(grid)
    rho = backward_kernel(
        xs - x0, t - t0, n=(grid.n if grid.geometry == "radial" else 1)
    )
    mask = rho >= KERNEL_FLOOR
    if not np.any(mask):
        return 0.0, 0.0, 0.0, 0.0
    xs, uu, gg, tt, rho, w = (a[mask] for a in (xs, uu, gg, tt, rho, w))
    up = np.maximum(uu, 0.0)  # fractional powers act on the positive part
    if variant == "eps_variant":
        F = model.F_eps(uu, eps, params)
    elif variant == "limit_variant":
        # u_+^gamma, reading 0^0 as 0 (indicator of the positivity set)
        F = (uu > 0.0).astype(float) if params.gamma == 0.0 else up**params.gamma
    else:
        raise ValueError(f"unknown variant {variant!r}")
    lag = t0 - t
    zu = (xs - x0) * gg - 2.0 * lag * tt - params.beta * uu
    scale = eps**params.beta
    h_e = params.mollifier.h(up / scale) / scale
    energy = float(np.sum((gg**2 + 2.0 * F) * rho * w))
    drift = float(np.sum(uu**2 / lag * rho * w))
    z_sq = float(np.sum(zu**2 / lag * rho * w))
    h_term = float(np.sum(h_e * up ** (params.gamma + 1.0) * rho * w))
    return energy, drift, z_sq, h_term


def weiss_energy(traj: Trajectory, center: tuple, r: float,
                 variant: str = "eps_variant") -> float:
    """W at radius r for the given center (x0, t0)."""
    x0, t0 = center
    ts, wts = _strip_times(traj, t0, r)
    vals = []
    for t in ts:
        energy, drift, _, _ = _spatial_integrals(
            traj, x0, t0, t, traj.eps, traj.params, variant
        )
        vals.append(energy - traj.params.beta / 2.0 * drift)
    beta = traj.params.beta
    return float(np.dot(wts, vals) / r ** (2.0 * beta))


def z_operator(traj: Trajectory, center: tuple, sample: tuple) -> float:
    """Z u = (x - x0) grad u - 2 (t0 - t) du/dt - beta u at one sample point."""
    x0, t0 = center
    x, t = sample
    grid = traj.grid
    i = int(np.argmin(np.abs(grid.x - abs(x))))
    if i == 0 or i >= grid.m - 1:
        raise ValueError("sample point lies on a boundary stencil")
    if not traj.times[0] < t < traj.times[-1]:
        raise ValueError("sample time outside the run")
    # snap to the cell coordinate so position and stencil agree
    x_cell = grid.x[i] * (math.copysign(1.0, x) if x != 0.0 else 1.0)
    u = traj.values_at(t)
    grad = _centered_gradient(grid, u)
    g = grad[i] * math.copysign(1.0, x_cell)
    dtu = _time_derivative(traj, t)[i]
    return float(
        (x_cell - x0) * g - 2.0 * (t0 - t) * dtu - traj.params.beta * u[i]
    )


@dataclass
class WeissSample:
    r: float
    W: float
    z_term: float
    h_term: float


def monotonicity_audit(traj: Trajectory, center: tuple, r_grid,
                       variant: str = "eps_variant") -> dict:
    """Audit of the energy identity along the run.

    Computes W(r) at each radius plus the two nonnegative right-hand
    integrands, then compares the increment W(r_max) - W(r_min) with the
    r-integral of r^(-(3 + beta gamma)) [z_term + 2 beta h_term].
    """
    x0, t0 = center
    eps, params = traj.eps, traj.params
    beta = params.beta
    r_grid = np.asarray(sorted(r_grid), dtype=float)
    samples = []
    for r in r_grid:
        ts, wts = _strip_times(traj, t0, r)
        e_vals, d_vals, z_vals, h_vals = [], [], [], []
        for t in ts:
            energy, drift, z_sq, h_term = _spatial_integrals(
                traj, x0, t0, t, eps, params, variant
            )
            e_vals.append(energy)
            d_vals.append(drift)
            z_vals.append(z_sq)
            h_vals.append(h_term)
        W = float(np.dot(wts, e_vals) - beta / 2.0 * np.dot(wts, d_vals))
        W /= r ** (2.0 * beta)
        samples.append(
            WeissSample(
                r=float(r), W=W,
                z_term=float(np.dot(wts, z_vals)),
                h_term=float(np.dot(wts, h_vals)),
            )
        )
    rs = np.array([s.r for s in samples])
    integrand = np.array(
        [(s.z_term + 2.0 * beta * s.h_term) / s.r ** (3.0 + beta * params.gamma)
         for s in samples]
    )
    # integrate in log r: the integrand decays steeply in r, and the audit
    # radii are geometric, so d(r) = r d(log r) keeps the trapezoid honest
    rhs = float(np.trapezoid(integrand * rs, np.log(rs)))
    lhs = samples[-1].W - samples[0].W
    defect = abs(lhs - rhs)
    tol = 1e-2 * (abs(samples[-1].W) + abs(samples[0].W) + 1.0)
    W_vals = np.array([s.W for s in samples])
    nondecreasing = bool(np.all(np.diff(W_vals) >= -1e-3))
    return {
        "samples": samples,
        "increment": lhs,
        "integral": rhs,
        "defect": defect,
        "defect_tol": tol,
        "defect_ok": defect <= tol,
        "nondecreasing": nondecreasing,
        "z_nonnegative": bool(all(s.z_term >= 0.0 for s in samples)),
        "h_nonnegative": bool(all(s.h_term >= 0.0 for s in samples)),
    }


def blowup_rescale(traj: Trajectory, center: tuple, r: float,
                   x_window: float = 1.0, t_window: tuple = (-1.0, -0.25),
                   m: int = 128, n_times: int = 9):
    """Rescaled fields u_r(x, t) = u(x0 + r x, t0 + r^2 t) / r^beta.

    Sampled by linear interpolation on x in [0, x_window] (even symmetry) and
    t in the backward window; raises if the source window leaves the run.
    """
    x0, t0 = center
    grid = traj.grid
    beta = traj.params.beta
    ts = np.linspace(t_window[0], t_window[1], n_times)
    src_lo, src_hi = t0 + r**2 * ts[0], t0 + r**2 * ts[-1]
    if src_lo < traj.times[0] - 1e-12 or src_hi > traj.times[-1] + 1e-12:
        raise ValueError("rescaled window leaves the run span")
    if x0 + r * x_window > grid.x_max:
        raise ValueError("rescaled window leaves the domain")
    sub = Grid("line_symmetric", x_window, m)
    fields = []
    for t in ts:
        u_src = traj.values_at(t0 + r**2 * t)
        xs_full, vals_full = _reflected(grid, u_src)
        vals = np.interp(x0 + r * sub.x, xs_full, vals_full) / r**beta
        fields.append(GridField(sub, float(t), vals))
    return fields


def rescaled_trajectory(traj: Trajectory, center: tuple, r: float,
                        t_span: tuple, m: int = 256, x_window: float = None,
                        n_times: int = 65) -> Trajectory:
    """Trajectory view of the blow-up family member u_r.

    t_span is in rescaled time relative to the center (typically negative,
    backward strips); the rescaled regularization scale is eps/r, and the
    rescaled center is (0, 0).
    """
    x0, t0 = center
    grid = traj.grid
    beta = traj.params.beta
    if x_window is None:
        x_window = min((grid.x_max - abs(x0)) / r, 40.0)
    sub = Grid("line_symmetric", x_window, m)
    ts = np.linspace(t_span[0], t_span[1], n_times)
    snaps = []
    for t in ts:
        u_src = traj.values_at(t0 + r**2 * t)
        xs_full, vals_full = _reflected(grid, u_src)
        snaps.append(np.interp(x0 + r * sub.x, xs_full, vals_full) / r**beta)
    return Trajectory(
        grid=sub, params=traj.params, eps=traj.eps / r,
        dt=float(ts[1] - ts[0]), times=ts, snapshots=np.array(snaps),
        meta={"rescaled": True, "initial": snaps[0], "sup_run": np.max(snaps),
              "sup_initial": np.max(snaps[0])},
    )
