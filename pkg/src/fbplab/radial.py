"""Adaptive integrator for radial second-order ODEs, plus barrier verifiers.

All profile computations in the package share this integrator contract:

    U'' + ((n-1)/r + drift * r/2) U' + zeroth_coeff * U = rhs(U)

solved by an embedded Runge-Kutta 5(4) pair with PI step-size control and
quartic dense output (scipy's RK45).  A regular center r = 0 is handled by
the series start U ~ u0 + (rhs(u0) - zeroth_coeff*u0)/(2n) r^2 on
[0, r_switch], the L'Hopital limit of the radial Laplacian at the origin.

Events: U crossing zero from above (records the interface radius) and |U|
exceeding the overflow cap (records blow-up; anticipated for supercritical
barrier ODEs, not an error).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .model import BLOWUP_CAP

R_SWITCH = 1e-3  # series start window at a regular center


@dataclass
class RadialProfile:
    """Sampled radial ODE solution with derivative values.

    fb_radius is the radius where the profile meets zero (0.0 if it never
    does); meta carries (gamma, n, direction) style run information.
    """

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    fb_radius: float = 0.0
    blew_up: bool = False
    meta: dict = field(default_factory=dict)
    dense: object = None  # integrator dense output, when available

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        self.du = np.asarray(self.du, dtype=float)
        if np.any(np.diff(self.r) <= 0.0):
            raise ValueError("radii must be strictly increasing")

    def __call__(self, r):
        """Evaluate (u, du) at the requested radii.

        Uses the integrator's dense output inside its span when available,
        linear interpolation of the stored samples otherwise.
        """
        r = np.asarray(r, dtype=float)
        if self.dense is not None:
            lo, hi = self.r[0], self.r[-1]
            rc = np.clip(r, lo, hi)
            vals = self.dense(rc)
            u, du = vals[0], vals[1]
            if u.ndim == 0:
                return float(u), float(du)
            return u, du
        return np.interp(r, self.r, self.u), np.interp(r, self.r, self.du)


class StepUnderflowError(RuntimeError):
    """The adaptive integrator failed to advance (stiffness/underflow)."""


def integrate_radial(
    n: int,
    drift: float,
    zeroth_coeff: float,
    rhs: Callable[[float], float],
    init: tuple,
    r_end: float,
    tol: float = 1e-10,
    r_eval: np.ndarray | None = None,
    stop_on_zero: bool = True,
    meta: dict | None = None,
) -> RadialProfile:
    """Integrate the radial ODE from init = (r0, u0, du0) up to r_end.

    drift multiplies r/2 in the first-order coefficient (+1, -1, or 0 to
    drop the term).  Returns dense samples at r_eval (a default grid of 2000
    points if omitted), truncated at a zero crossing of U (if stop_on_zero)
    or at the overflow cap.
    """
    if not 1e-14 < tol < 1e-4:
        raise ValueError("tol must lie in (1e-14, 1e-4)")
    r0, u0, du0 = init
    if r0 < 0.0 or r_end <= r0:
        raise ValueError("need 0 <= r0 < r_end")

    def odefun(r, y):
        u, du = y
        return (du, rhs(u) - ((n - 1) / r + drift * r / 2.0) * du - zeroth_coeff * u)

    if r0 == 0.0:
        if du0 != 0.0:
            raise ValueError("a regular center requires du0 = 0")
        q = rhs(u0) - zeroth_coeff * u0
        r0 = min(R_SWITCH, 0.5 * r_end)
        u0, du0 = u0 + q * r0**2 / (2.0 * n), q * r0 / n

    def hit_zero(r, y):
        return y[0]

    hit_zero.terminal = stop_on_zero
    hit_zero.direction = -1.0

    def overflow(r, y):
        return abs(y[0]) - BLOWUP_CAP

    overflow.terminal = True
    overflow.direction = 1.0

    sol = solve_ivp(
        odefun,
        (r0, r_end),
        (u0, du0),
        method="RK45",
        rtol=tol,
        atol=tol * 1e-6,
        dense_output=True,
        events=(hit_zero, overflow),
    )
    if sol.status == -1:
        raise StepUnderflowError(sol.message)

    fb_radius = 0.0
    blew_up = False
    stop_r = r_end
    if sol.t_events[0].size:
        fb_radius = float(sol.t_events[0][0])
        stop_r = min(stop_r, fb_radius) if stop_on_zero else stop_r
    if sol.t_events[1].size:
        blew_up = True
        stop_r = min(stop_r, float(sol.t_events[1][0]))
    stop_r = min(stop_r, float(sol.t[-1]))

    if r_eval is None:
        r_eval = np.linspace(r0, stop_r, 2000)
    else:
        r_eval = np.asarray(r_eval, dtype=float)
        r_eval = r_eval[(r_eval >= r0) & (r_eval <= stop_r)]
        if r_eval.size == 0 or r_eval[0] > r0:
            r_eval = np.concatenate(([r0], r_eval))
        if r_eval[-1] < stop_r:
            r_eval = np.concatenate((r_eval, [stop_r]))
    vals = sol.sol(r_eval)
    return RadialProfile(
        r=r_eval,
        u=vals[0],
        du=vals[1],
        fb_radius=fb_radius,
        blew_up=blew_up,
        meta=meta or {},
        dense=sol.sol,
    )


def power_bound_constant(n: int, k: int) -> float:
    """Constant c_{n,k} in the lower bound phi >= c_{n,k} lambda^k r^(2k).

    One integration pass of the comparison argument maps c_{n,j} to
    c_{n,j}/((2j+2)(2j+n)) starting from c_{n,0} = 1, giving
    c_{n,1} = 1/(2n) and c_{n,2} = 1/(8n(n+2)).
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    c = 1.0
    for j in range(k):
        c /= (2 * j + 2) * (2 * j + n)
    return c


@dataclass
class BoundReport:
    """Outcome of a pointwise inequality check along an integrated profile."""

    ok: bool
    first_failure_r: float | None
    min_margin: float
    detail: dict = field(default_factory=dict)


def verify_power_lower_bound(
    lam: float, alpha: float, n: int, R: float, k: int, tol: float = 1e-10
) -> BoundReport:
    """Check phi >= c_{n,k} lambda^k r^(2k) for the barrier ODE.

    phi solves r^(1-n) (r^(n-1) phi')' = lambda phi^alpha with phi(0) = 1,
    phi'(0) = 0.  Blow-up before R only strengthens the bound; the check then
    covers the reached interval.  Also asserts phi' > 0 away from the center.
    """
    if lam <= 0.0 or alpha <= 1.0:
        raise ValueError("hypotheses require lambda > 0 and alpha > 1")
    prof = integrate_radial(
        n=n,
        drift=0.0,
        zeroth_coeff=0.0,
        rhs=lambda u: lam * abs(u) ** alpha,
        init=(0.0, 1.0, 0.0),
        r_end=R,
        tol=tol,
        stop_on_zero=False,
    )
    c = power_bound_constant(n, k)
    bound = c * lam**k * prof.r ** (2 * k)
    margin = prof.u - bound
    ok = bool(np.all(margin >= 0.0))
    first = None if ok else float(prof.r[np.argmax(margin < 0.0)])
    interior = prof.r > prof.r[0]
    increasing = bool(np.all(prof.du[interior] > 0.0))
    return BoundReport(
        ok=ok and increasing,
        first_failure_r=first,
        min_margin=float(margin.min()),
        detail={
            "c_nk": c,
            "increasing": increasing,
            "blew_up": prof.blew_up,
            "r_reached": float(prof.r[-1]),
        },
    )


def growth_threshold_scales(gamma: float, delta: float, c: float, n: int):
    """Auxiliary scales (j, theta, omega_star, R_star) of the growth bound."""
    if not 0.0 < gamma <= 1.0 or not 0.0 < delta <= 1.0 or c <= 0.0:
        raise ValueError("need gamma, delta in (0, 1] and c > 0")
    j = math.ceil(1.0 / gamma)
    theta = j - 1.0 / gamma
    omega = delta ** ((1.0 + theta) / (2.0 * (theta + 2.0 / gamma)))
    cnj = power_bound_constant(n, j)
    r_star = (delta ** ((1.0 + theta) / 2.0) / (c**j * cnj)) ** (1.0 / (2 * j))
    return j, theta, omega, r_star


def verify_growth_threshold(
    gamma: float, delta: float, c: float, n: int, tol: float = 1e-10
) -> BoundReport:
    """Check (omega_star * delta)^(1/gamma) * phi(R_star) >= delta.

    phi solves r^(1-n)(r^(n-1) phi')' = (c omega_star / delta) phi^(1+gamma)
    from phi(0) = 1, phi'(0) = 0.  Blow-up before R_star makes the inequality
    trivially true and is reported, not raised.
    """
    j, theta, omega, r_star = growth_threshold_scales(gamma, delta, c, n)
    lam = c * omega / delta
    prof = integrate_radial(
        n=n,
        drift=0.0,
        zeroth_coeff=0.0,
        rhs=lambda u: lam * abs(u) ** (1.0 + gamma),
        init=(0.0, 1.0, 0.0),
        r_end=r_star,
        tol=tol,
        stop_on_zero=False,
    )
    if prof.blew_up:
        ratio = math.inf
    else:
        phi_end = float(prof.u[-1])
        ratio = (omega * delta) ** (1.0 / gamma) * phi_end / delta
    return BoundReport(
        ok=ratio >= 1.0,
        first_failure_r=None if ratio >= 1.0 else r_star,
        min_margin=ratio - 1.0,
        detail={
            "j": j,
            "theta": theta,
            "omega_star": omega,
            "R_star": r_star,
            "ratio": ratio,
            "blew_up": prof.blew_up,
        },
    )
