"""Traveling-wave profiles, phase-plane separatrices, and colliding fronts.

A profile phi >= 0 traveling with speed c solves

    c phi' + phi'' = gamma phi^(gamma-1)   on {phi > 0},
    |(phi^(1/beta))'| = sqrt(2)/beta       at the front,

with the derivative taken from inside the support.  gamma = 0 and gamma = 1
are closed-form; general gamma in (0, 1] is integrated from the interface
expansion phi ~ c_beta xi^beta.  In the variables U = phi^(1/beta), V = U'
(with the arc re-parametrization d(xi)/d(tau) = U) the profile ODE becomes
the plane system

    dU/dtau = U V,
    dV/dtau = (2/(beta gamma)) (2/beta^2 - nu U V - V^2),   nu = 2c/(beta gamma),

whose saddle points P+- = (0, +-sqrt(2)/beta) carry the admissible profiles
as separatrices.  Colliding right- and left-moving fronts produce a conical
space-time interface with a singular vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import BLOWUP_CAP, beta_of_gamma, wave_amplitude

# Front expansion start for the profile shot.  The one-term expansion leaves
# a relative error O(c * h0) at the start that propagates into the measured
# front slope, so h0 sits well below the 1e-6 slope tolerance.
FB_START_OFFSET = 1e-8
SEPARATRIX_STEPOFF = 1e-6
SERIES_CUTOFF = 1e-4  # |c xi| below which the gamma = 1 form is summed as a series


class WrongBranchError(RuntimeError):
    """A separatrix crossed a null-isocline in the forbidden direction."""


class TimeDomainError(ValueError):
    """Colliding-wave descriptor evaluated at or beyond the collision time."""


def explicit_tw(gamma: float, c: float, sign: int, xi) -> float:
    """Closed-form admissible profiles at gamma = 0 and gamma = 1.

    sign selects the right-moving front phi_c^+ (support xi > 0) or its
    mirror phi_c^- (support xi < 0); the mirror identity is
    phi_c^-(xi) = phi_(-c)^+(-xi).  The c -> 0 limits are sqrt(2) xi_+
    (gamma = 0) and xi_+^2 / 2 (gamma = 1); for gamma = 1 and small |c xi|
    the exponential form is summed as a five-term series to dodge
    cancellation.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if np.ndim(xi):
        return np.array([explicit_tw(gamma, c, sign, float(x)) for x in xi])
    xi = float(xi)
    if sign == -1:
        return explicit_tw(gamma, -c, +1, -xi)
    if xi <= 0.0:
        return 0.0
    if gamma == 0.0:
        if c == 0.0:
            return math.sqrt(2.0) * xi
        if c > 0.0:
            return math.sqrt(2.0) / c * -math.expm1(-c * xi)
        return math.sqrt(2.0) / abs(c) * math.expm1(abs(c) * xi)
    if gamma == 1.0:
        if c == 0.0:
            return 0.5 * xi**2
        y = c * xi
        if abs(y) < SERIES_CUTOFF:
            return xi**2 * (
                0.5 - y / 6.0 + y**2 / 24.0 - y**3 / 120.0 + y**4 / 720.0
            )
        return (math.exp(-y) - 1.0 + y) / c**2
    raise ValueError("closed forms exist only for gamma in {0, 1}")


def explicit_tw_deriv(gamma: float, c: float, sign: int, xi) -> float:
    """Derivative of the gamma in {0, 1} closed-form profiles."""
    if sign == -1:
        val = explicit_tw_deriv(gamma, -c, +1, -np.asarray(xi, dtype=float))
        return -val
    if np.ndim(xi):
        return np.array([explicit_tw_deriv(gamma, c, +1, float(x)) for x in xi])
    xi = float(xi)
    if xi <= 0.0:
        return 0.0
    if gamma == 0.0:
        if c == 0.0:
            return math.sqrt(2.0)
        return math.sqrt(2.0) * math.exp(-c * xi)
    if gamma == 1.0:
        if c == 0.0:
            return xi
        return -math.expm1(-c * xi) / c
    raise ValueError("closed forms exist only for gamma in {0, 1}")


@dataclass
class WaveProfile:
    """Sampled admissible profile with speed, orientation, and front offset.

    For sign = +1 the support is {xi > offset}; for sign = -1 it is
    {xi < offset}.  samples hold (xi, phi, dphi) on the support side;
    evaluation prefers the closed form (analytic), else the integrator dense
    output, else linear interpolation.
    """

    gamma: float
    c: float
    sign: int
    offset: float
    xi: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    dense: object = None
    analytic: bool = False
    meta: dict = field(default_factory=dict)

    def __call__(self, xi):
        """Evaluate (phi, dphi); zero off the support."""
        scalar = np.ndim(xi) == 0
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        # mirror to the sign = +1 frame
        z = self.sign * (xi - self.offset)
        beta = beta_of_gamma(self.gamma)
        cb = wave_amplitude(beta)
        phi = np.zeros_like(z)
        dphi = np.zeros_like(z)
        pos = z > 0.0
        if np.any(pos):
            zp = z[pos]
            if self.analytic:
                c_eff = self.c if self.sign == +1 else -self.c
                vals_p = explicit_tw(self.gamma, c_eff, +1, zp)
                vals_d = explicit_tw_deriv(self.gamma, c_eff, +1, zp)
            else:
                inside = zp >= self.xi[0]
                vals_p = np.empty_like(zp)
                vals_d = np.empty_like(zp)
                if self.dense is not None:
                    zc = np.clip(zp[inside], self.xi[0], self.xi[-1])
                    out = self.dense(zc)
                    vals_p[inside], vals_d[inside] = out[0], out[1]
                else:
                    vals_p[inside] = np.interp(zp[inside], self.xi, self.phi)
                    vals_d[inside] = np.interp(zp[inside], self.xi, self.dphi)
                # interface expansion below the first sample
                vals_p[~inside] = cb * zp[~inside] ** beta
                vals_d[~inside] = beta * cb * zp[~inside] ** (beta - 1.0)
            phi[pos] = vals_p
            dphi[pos] = self.sign * vals_d
        if scalar:
            return float(phi[0]), float(dphi[0])
        return phi, dphi


def tw_profile(
    gamma: float, c: float, sign: int = +1, xi_max: float = 50.0, tol: float = 1e-11
) -> WaveProfile:
    """Integrate the admissible profile with speed c from the front expansion.

    Starts at xi = 1e-6 with phi = c_beta xi^beta, phi' = beta c_beta
    xi^(beta-1) (mirrored for sign = -1 via phi_c^- (xi) = phi_(-c)^+(-xi)).
    For c < 0 the profile grows like e^(|c| xi) and is truncated at the
    overflow cap.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("profile shooting covers gamma in (0, 1]")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if xi_max <= 0.0:
        raise ValueError("need xi_max > 0")
    c_eff = c if sign == +1 else -c
    beta = beta_of_gamma(gamma)
    cb = wave_amplitude(beta)

    if gamma == 1.0:
        reaction = lambda p: 1.0  # noqa: E731
    else:
        def reaction(p):
            return gamma * max(p, 1e-300) ** (gamma - 1.0)

    def odefun(xi, y):
        p, dp = y
        return (dp, reaction(p) - c_eff * dp)

    h0 = FB_START_OFFSET
    y0 = (cb * h0**beta, beta * cb * h0 ** (beta - 1.0))

    def overflow(xi, y):
        return y[0] - BLOWUP_CAP

    overflow.terminal = True
    overflow.direction = 1.0

    sol = solve_ivp(
        odefun, (h0, xi_max), y0, method="RK45", rtol=tol, atol=tol * 1e-6,
        dense_output=True, events=(overflow,),
    )
    if sol.status == -1:
        raise RuntimeError(sol.message)
    stop = float(sol.t[-1])
    grid = np.unique(np.concatenate((
        np.linspace(h0, stop, 2000), h0 + (stop - h0) * np.geomspace(1e-6, 1.0, 300),
    )))
    vals = sol.sol(grid)
    if np.any(vals[0] < 0.0):
        raise RuntimeError("negative profile values: integration failed")
    return WaveProfile(
        gamma=gamma, c=c, sign=sign, offset=0.0,
        xi=grid, phi=vals[0], dphi=vals[1], dense=sol.sol,
        meta={"truncated": bool(sol.t_events[0].size)},
    )


def explicit_wave_profile(gamma: float, c: float, sign: int = +1,
                          xi_max: float = 50.0) -> WaveProfile:
    """WaveProfile wrapper around the gamma in {0, 1} closed forms."""
    grid = np.unique(np.concatenate((
        np.linspace(1e-9, xi_max, 2000), np.geomspace(1e-9, xi_max, 300),
    )))
    c_eff = c if sign == +1 else -c
    phi = explicit_tw(gamma, c_eff, +1, grid)
    dphi = explicit_tw_deriv(gamma, c_eff, +1, grid)
    return WaveProfile(gamma=gamma, c=c, sign=sign, offset=0.0,
                       xi=grid, phi=phi, dphi=dphi, analytic=True,
                       meta={"explicit": True})


def phase_plane_field(U: float, V: float, gamma: float, c: float):
    """Right-hand side (dU, dV) of the arc-parametrized plane system."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError("phase plane defined for gamma in (0, 1]")
    beta = beta_of_gamma(gamma)
    nu = 2.0 * c / (beta * gamma)
    dU = U * V
    dV = 2.0 / (beta * gamma) * (2.0 / beta**2 - nu * U * V - V**2)
    return dU, dV


def _separatrix_start(gamma: float, c: float, which: int):
    """Second-order expansion of the saddle manifold V(U) near P^(+-).

    which = +1 starts at P+ (outgoing branch), -1 at P- (incoming branch).
    Matching V = a0 + a1 U + a2 U^2 in the trajectory ODE gives
    a1 = -2 nu/(beta gamma + 4) and a1^2 + 2 a0 a2 = -2 nu a1/(beta gamma + 2).
    """
    beta = beta_of_gamma(gamma)
    bg = beta * gamma
    nu = 2.0 * c / bg
    a0 = which * math.sqrt(2.0) / beta
    a1 = -2.0 * nu / (bg + 4.0)
    p = -2.0 * nu * a1 / (bg + 2.0)
    a2 = (p - a1**2) / (2.0 * a0)
    return a0, a1, a2


def null_isocline(U, gamma: float, c: float, which: int):
    """The dV = 0 curve v0^(+-)(U): root of V^2 + nu U V - 2/beta^2 = 0."""
    beta = beta_of_gamma(gamma)
    nu = 2.0 * c / (beta * gamma)
    disc = np.sqrt((nu * U) ** 2 + 8.0 / beta**2)
    return (-nu * U + which * disc) / 2.0


def separatrix(gamma: float, c: float, sign: int, U_max: float = 1e3,
               tol: float = 1e-11):
    """Saddle separatrix V(U) on the branch through P^+ (sign=+1) or P^- (-1).

    c < 0 uses the reflection symmetry of the portrait across V = 0:
    V^(+-) for c equals -V^(-+) for -c.  Returns (U, V) sample arrays.
    Raises WrongBranchError if the trajectory crosses its null-isocline in
    the forbidden direction.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("phase plane defined for gamma in (0, 1]")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if c == 0.0:
        raise ValueError("c = 0 is covered by c0_first_integral")
    if c < 0.0:
        U, V = separatrix(gamma, -c, -sign, U_max=U_max, tol=tol)
        return U, -V

    beta = beta_of_gamma(gamma)
    bg = beta * gamma
    a0, a1, a2 = _separatrix_start(gamma, c, sign)
    u0 = SEPARATRIX_STEPOFF
    v0 = a0 + a1 * u0 + a2 * u0**2

    def dVdU(U, y):
        V = y[0]
        return [bg / 2.0 * (2.0 / beta**2 - (2.0 * c / bg) * U * V - V**2) / (U * V)]

    # the separatrix is strongly attracting transversally at large U, which
    # makes the U-parametrized ODE stiff; Radau takes it in large steps
    grid = np.geomspace(u0, U_max, 4000)
    sol = solve_ivp(
        dVdU, (u0, U_max), [v0], method="Radau", rtol=tol, atol=tol * 1e-3,
        dense_output=True,
    )
    if sol.status != 0:
        raise RuntimeError(sol.message)
    V = sol.sol(grid)[0]
    # both branches must stay above their dV = 0 isocline (V decreasing
    # toward it from above); crossing means the wrong manifold was tracked
    iso = null_isocline(grid, gamma, c, sign)
    if np.any(V < iso - 1e-9):
        raise WrongBranchError("separatrix crossed its null-isocline")
    return grid, V


def c0_first_integral(gamma: float, branch: str, k: float, U):
    """Conserved quantity at c = 0: V^2 = 2/beta^2 +- k U^(-beta gamma).

    branch "minus_k" requires U above the cutoff (k beta^2/2)^(1/(beta gamma))
    where the value turns negative; "plus_k" describes the non-admissible
    profiles that vanish linearly at the interface.
    """
    if k <= 0.0:
        raise ValueError("need k > 0")
    beta = beta_of_gamma(gamma)
    bg = beta * gamma
    U = np.asarray(U, dtype=float)
    if branch == "plus_k":
        out = 2.0 / beta**2 + k * U ** (-bg)
    elif branch == "minus_k":
        out = 2.0 / beta**2 - k * U ** (-bg)
        if np.any(out < 0.0):
            cutoff = (k * beta**2 / 2.0) ** (1.0 / bg)
            raise ValueError(f"V^2 negative below the cutoff U = {cutoff}")
    else:
        raise ValueError("branch must be 'minus_k' or 'plus_k'")
    return float(out) if out.ndim == 0 else out


def linear_vanishing_profile(gamma: float, k: float, xi_max: float = 2.0,
                             m: int = 2000) -> WaveProfile:
    """Non-admissible c = 0 profile from the plus_k branch (vanishes linearly).

    Built by quadrature of d(xi) = dU / sqrt(2/beta^2 + k U^(-beta gamma));
    its phi^(1/beta) slope diverges at the front, so fb_slope_check must
    report a defect bounded away from zero.
    """
    beta = beta_of_gamma(gamma)
    U_grid = np.linspace(0.0, 1.0, m)
    V = np.sqrt(c0_first_integral(gamma, "plus_k", k, np.maximum(U_grid, 1e-12)))
    # xi(U) by trapezoid of 1/V
    xi = np.concatenate(([0.0], np.cumsum(0.5 * (1.0 / V[1:] + 1.0 / V[:-1]) * np.diff(U_grid))))
    phi = U_grid**beta
    dphi = beta * U_grid ** (beta - 1.0) * V
    keep = xi <= xi_max
    return WaveProfile(gamma=gamma, c=0.0, sign=+1, offset=0.0,
                       xi=np.maximum(xi[keep], 1e-300), phi=phi[keep],
                       dphi=dphi[keep], meta={"admissible": False})


def fb_slope_check(profile: WaveProfile) -> float:
    """Distance of the measured front slope of phi^(1/beta) from sqrt(2)/beta.

    Samples |(phi^(1/beta))'| at offsets 1e-2 and 1e-3 inside the support and
    extrapolates linearly to the front.
    """
    beta = beta_of_gamma(profile.gamma)
    target = math.sqrt(2.0) / beta
    offsets = (1e-3, 1e-4, 1e-5)
    slopes = []
    for h in offsets:
        xi = profile.offset + profile.sign * h
        p, dp = profile(xi)
        if p <= 0.0:
            raise ValueError("profile vanishes at the sampling offset")
        slopes.append(abs(dp) * p ** (1.0 / beta - 1.0) / beta)
    # quadratic (Lagrange) extrapolation of slope(h) to h = 0
    slope = sum(
        s * math.prod(hj / (hj - hi) for hj in offsets if hj != hi)
        for s, hi in zip(slopes, offsets)
    )
    return abs(slope - target)


@dataclass
class ComposedProfile:
    """Sum a phi_c^+(xi - xi_plus) + b phi_c^-(xi - xi_minus), supports disjoint."""

    a: int
    b: int
    xi_plus: float
    xi_minus: float
    gamma: float
    c: float
    right: WaveProfile | None
    left: WaveProfile | None

    def __call__(self, xi):
        scalar = np.ndim(xi) == 0
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        phi = np.zeros_like(xi)
        dphi = np.zeros_like(xi)
        if self.a:
            p, dp = self.right(xi)
            phi += p
            dphi += dp
        if self.b:
            p, dp = self.left(xi)
            phi += p
            dphi += dp
        if scalar:
            return float(phi[0]), float(dphi[0])
        return phi, dphi


def _profile_for(gamma: float, c: float, sign: int, offset: float,
                 xi_max: float = 50.0) -> WaveProfile:
    if gamma in (0.0, 1.0):
        prof = explicit_wave_profile(gamma, c, sign, xi_max=xi_max)
    else:
        prof = tw_profile(gamma, c, sign, xi_max=xi_max)
    prof.offset = offset
    return prof


def compose_profiles(a: int, b: int, xi_plus: float, xi_minus: float,
                     gamma: float, c: float) -> ComposedProfile:
    """General admissible profile a phi_c^+(. - xi_plus) + b phi_c^-(. - xi_minus).

    Requires a, b in {0, 1} not both zero and xi_minus <= xi_plus, which makes
    the two supports disjoint; the sum vanishes exactly on [xi_minus, xi_plus].
    """
    if a not in (0, 1) or b not in (0, 1) or (a, b) == (0, 0):
        raise ValueError("need a, b in {0, 1}, not both zero")
    if xi_minus > xi_plus:
        raise ValueError("need xi_minus <= xi_plus")
    right = _profile_for(gamma, c, +1, xi_plus) if a else None
    left = _profile_for(gamma, c, -1, xi_minus) if b else None
    return ComposedProfile(a=a, b=b, xi_plus=xi_plus, xi_minus=xi_minus,
                           gamma=gamma, c=c, right=right, left=left)


@dataclass
class CollisionScene:
    """Two opposite fronts colliding at a conical space-time vertex.

    u(x, t) = phi_c2^-(x - c2 t - xi2) + phi_c1^+(x - c1 t - xi1) is a valid
    descriptor for t < t_star only.
    """

    gamma: float
    c1: float
    c2: float
    xi1: float
    xi2: float
    t_star: float
    x_star: float
    opening: float
    _right_movers: tuple = None  # (left profile of c2, right profile of c1)

    def u(self, x, t: float):
        if t >= self.t_star:
            raise TimeDomainError(
                f"descriptor valid for t < t_star = {self.t_star}, got t = {t}"
            )
        left, right = self._right_movers
        p1, _ = left(np.asarray(x, dtype=float) - self.c2 * t)
        p2, _ = right(np.asarray(x, dtype=float) - self.c1 * t)
        return p1 + p2


def colliding_tw(gamma: float, c1: float, c2: float, xi1: float, xi2: float,
                 xi_max: float = 60.0) -> CollisionScene:
    """Colliding-wave descriptor for speeds c1 < 0 < c2 and offsets xi2 < xi1.

    The interface is the cone t = min((x - xi1)/c1, (x - xi2)/c2) with vertex
    (x_star, t_star) and opening pi - |atan(1/c1)| - |atan(1/c2)|.
    """
    if not c1 < 0.0 < c2:
        raise ValueError("need c1 < 0 < c2")
    if not xi2 < xi1:
        raise ValueError("need xi2 < xi1")
    t_star = (xi1 - xi2) / (c2 - c1)
    x_star = (xi1 * c2 - xi2 * c1) / (c2 - c1)
    opening = math.pi - abs(math.atan(1.0 / c1)) - abs(math.atan(1.0 / c2))
    left = _profile_for(gamma, c2, -1, xi2, xi_max=xi_max)
    right = _profile_for(gamma, c1, +1, xi1, xi_max=xi_max)
    return CollisionScene(
        gamma=gamma, c1=c1, c2=c2, xi1=xi1, xi2=xi2,
        t_star=t_star, x_star=x_star, opening=opening,
        _right_movers=(left, right),
    )
