"""Scaling exponents, regularized nonlinearities, and closed-form solutions.

The underlying equation is the singular reaction-diffusion law

    du/dt - Lap(u) = -d/du (u_+^gamma),      gamma in [0, 1],

whose right-hand side blows up like gamma*u^(gamma-1) as u -> 0+.  The
regularized family replaces the singular reaction by a smooth one built from
a compactly supported bump h: the cutoff H_eps switches on over the height
scale eps^beta, where beta = 2/(2-gamma) is the natural scaling power (the
solution vanishes like dist^beta at the interface).

Everything in this module is a pure function of its arguments; ModelParams is
immutable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# u^(gamma-1) is only ever evaluated for u > 0; this floor keeps the power
# finite (<= 1e300 even at gamma = 0) without changing any meaningful value.
UNDERFLOW_FLOOR = 1e-300

# Overflow cap used by blow-up detection throughout the package.
BLOWUP_CAP = 1e12


def beta_of_gamma(gamma: float) -> float:
    """Scaling exponent beta = 2/(2 - gamma), in [1, 2] for gamma in [0, 1]."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return 2.0 / (2.0 - gamma)


def wave_amplitude(beta: float) -> float:
    """Front amplitude c_beta = (2/beta^2)^(beta/2) = (sqrt(2)/beta)^beta.

    c_beta * xi_+^beta solves phi'' = gamma*phi^(gamma-1) with the sharp
    interface slope |(phi^(1/beta))'| = sqrt(2)/beta.
    """
    return (2.0 / beta**2) ** (beta / 2.0)


@dataclass(frozen=True)
class MollifierSpec:
    """A bump h >= 0 supported on [0, 1] with unit mass, and its integral H.

    h must satisfy h'(0) > 0; H is nondecreasing with H(v) = 0 for v <= 0 and
    H(v) = 1 for v >= 1.  Both callables accept floats or numpy arrays.
    """

    h: Callable
    H: Callable
    h_lipschitz: float
    h_max: float


def _default_h(v):
    v = np.asarray(v, dtype=float)
    out = np.where((v > 0.0) & (v < 1.0), 12.0 * v * (1.0 - v) ** 2, 0.0)
    return float(out) if out.ndim == 0 else out


def _default_H(v):
    v = np.asarray(v, dtype=float)
    vc = np.clip(v, 0.0, 1.0)
    out = vc**2 * (6.0 - 8.0 * vc + 3.0 * vc**2)
    return float(out) if out.ndim == 0 else out


def mollifier_default() -> MollifierSpec:
    """Default bump h(v) = 12 v (1-v)^2 on [0, 1].

    Chosen because h and h' vanish at v = 1 (true C^1 compact support),
    h'(0) = 12 > 0, and the mass is exactly 1 in closed form; the integral is
    H(v) = v^2 (6 - 8v + 3v^2) clipped to [0, 1].
    """
    # max|h'| = h'(0) = 12; max h = h(1/3) = 16/9.
    return MollifierSpec(h=_default_h, H=_default_H, h_lipschitz=12.0, h_max=16.0 / 9.0)


@dataclass(frozen=True)
class ModelParams:
    """Exponent gamma, derived beta = 2/(2-gamma), and the mollifier pair."""

    gamma: float
    mollifier: MollifierSpec = None  # type: ignore[assignment]
    beta: float = None  # type: ignore[assignment]  # derived, do not pass

    def __post_init__(self):
        if self.mollifier is None:
            object.__setattr__(self, "mollifier", mollifier_default())
        object.__setattr__(self, "beta", beta_of_gamma(self.gamma))


def _pow_gamma_terms(u_pos, gamma):
    """Return (u^gamma, u^(gamma-1)) on strictly positive input.

    gamma = 1 is special-cased symbolically to avoid pow() noise; the
    underflow floor keeps u^(gamma-1) finite for denormal u.
    """
    if gamma == 1.0:
        return u_pos, np.ones_like(u_pos)
    u_safe = np.maximum(u_pos, UNDERFLOW_FLOOR)
    if gamma == 0.0:
        return np.ones_like(u_safe), 1.0 / u_safe
    return u_safe**gamma, u_safe ** (gamma - 1.0)


def H_eps(u, eps: float, p: ModelParams):
    """Smoothed indicator H(u / eps^beta), in [0, 1] and nondecreasing."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return p.mollifier.H(np.asarray(u, dtype=float) / eps**p.beta)


def F_eps(u, eps: float, p: ModelParams):
    """Regularized potential H_eps(u) * u_+^gamma (equals u^gamma above eps^beta)."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    u = np.asarray(u, dtype=float)
    pos = u > 0.0
    ug, _ = _pow_gamma_terms(np.where(pos, u, 1.0), p.gamma)
    out = np.where(pos, p.mollifier.H(u / eps**p.beta) * ug, 0.0)
    return float(out) if out.ndim == 0 else out


def f_eps(u, eps: float, p: ModelParams):
    """Regularized reaction d/du F_eps(u).

    Equals eps^(-beta) h(u/eps^beta) u^gamma + gamma H(u/eps^beta) u^(gamma-1)
    for u > 0, zero for u <= 0, and exactly gamma*u^(gamma-1) once
    u >= eps^beta (h vanishes and H == 1 there).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    u = np.asarray(u, dtype=float)
    scale = eps**p.beta
    pos = u > 0.0
    u_pos = np.where(pos, u, 1.0)
    v = u_pos / scale
    ug, ugm1 = _pow_gamma_terms(u_pos, p.gamma)
    core = p.mollifier.h(v) / scale * ug
    if p.gamma > 0.0:
        core = core + p.gamma * p.mollifier.H(v) * ugm1
    out = np.where(pos, core, 0.0)
    return float(out) if out.ndim == 0 else out


def f_eps_lipschitz(eps: float, p: ModelParams, samples: int = 4001) -> float:
    """Global Lipschitz bound of f_eps, computed as eps^(-2) * Lip(f_1).

    Lip(f_1) is estimated by maximizing |f_1'| with central differences on a
    fine grid of (0, 2]; above u = 1 the reaction gamma*u^(gamma-1) is
    nonincreasing in slope, so the grid captures the maximum.
    """
    u = np.linspace(1e-6, 2.0, samples)
    f = f_eps(u, 1.0, p)
    slope = np.abs(np.diff(f) / np.diff(u))
    return float(slope.max()) / eps**2


def phillips_f(u, eps: float, gamma: float):
    """Alternative regularized reaction gamma * u / (eps + u^(2-gamma))."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    u = np.asarray(u, dtype=float)
    pos = u > 0.0
    u_pos = np.where(pos, u, 0.0)
    out = np.where(pos, gamma * u_pos / (eps + u_pos ** (2.0 - gamma)), 0.0)
    return float(out) if out.ndim == 0 else out


def g_eps(u, grad_root_sq, eps: float, p: ModelParams):
    """Right-hand side of the equation satisfied by w = u^(2-gamma).

    grad_root_sq is the caller-supplied value of |grad(u^(1/beta))|^2.
    Returns (2-gamma) * [h_eps(u) u + gamma H_eps(u)
                         + (1-gamma) beta^2 grad_root_sq].
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    u = np.asarray(u, dtype=float)
    g = np.asarray(grad_root_sq, dtype=float)
    scale = eps**p.beta
    v = u / scale
    bracket = p.mollifier.h(v) / scale * u + p.gamma * p.mollifier.H(v)
    if p.gamma < 1.0:
        bracket = bracket + (1.0 - p.gamma) * p.beta**2 * g
    out = (2.0 - p.gamma) * bracket
    return float(out) if np.ndim(out) == 0 else out


def explicit_T(t, t0: float, p: ModelParams):
    """Space-independent solution [-(2 gamma / beta)(t - t0)]_+^(beta/2)."""
    t = np.asarray(t, dtype=float)
    arg = np.maximum(-(2.0 * p.gamma / p.beta) * (t - t0), 0.0)
    out = arg ** (p.beta / 2.0)
    return float(out) if out.ndim == 0 else out


def explicit_halfspace(xi, a: float, b: float, p: ModelParams):
    """One-dimensional stationary solution vanishing exactly on [a, b].

    Returns (sqrt(2)/beta)^beta [ (a - xi)_+^beta + (xi - b)_+^beta ];
    a = -inf or b = +inf drop the corresponding front.
    """
    if a > b:
        raise ValueError("need a <= b")
    xi = np.asarray(xi, dtype=float)
    c = wave_amplitude(p.beta)
    left = np.maximum(a - xi, 0.0) if np.isfinite(a) else 0.0
    right = np.maximum(xi - b, 0.0) if np.isfinite(b) else 0.0
    out = c * (np.asarray(left) ** p.beta + np.asarray(right) ** p.beta)
    return float(out) if out.ndim == 0 else out


def radial_cone_amplitude(n: int, k: int, p: ModelParams) -> float:
    """Amplitude c of the stationary cone c |y - y0|^beta in n-k variables."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 <= k <= n - 2:
        raise ValueError(f"need 0 <= k <= n-2, got k={k}, n={n}")
    return (p.gamma / (p.beta * (n - k + p.beta - 2.0))) ** (p.beta / 2.0)


def explicit_radial_cone(x, x0, n: int, k: int, p: ModelParams) -> float:
    """Stationary solution c |y - y0|^beta, y the first n-k coordinates of x."""
    c = radial_cone_amplitude(n, k, p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x.shape != x0.shape or x.shape[-1] != n:
        raise ValueError("x and x0 must be points in R^n")
    y = x[..., : n - k] - x0[..., : n - k]
    return float(c * np.sqrt((y**2).sum(axis=-1)) ** p.beta)
