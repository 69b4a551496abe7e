"""Self-similar profiles: expanding-support solutions and shrinkers.

Expanding ("forward") profiles U solve

    U'' + ((n-1)/r + r/2) U' - (beta/2) U = gamma U^(gamma-1)   in (R, inf),
    U(R) = 0,   (U^(1/beta))'(R) = sqrt(2)/beta,

and give solutions u = t^(beta/2) U(|x|/sqrt(t)) whose contact set is the
expanding ball |x|^2 <= R^2 t.  gamma = 0 and gamma = 1 admit closed forms in
terms of Kummer/Tricomi functions; general gamma is computed by shooting,
either from a one-term interface expansion or by regularizing the reaction
with a small floor delta and extrapolating delta -> 0.

Shrinkers solve the drift-reversed equation on (0, R) with U(0) = ell,
U'(0) = 0, U(R) = 0 and the interface slope -sqrt(2)/beta; they exist (and
are unique) at gamma = 0, fail to exist at gamma = 1, and the gamma in (0,1)
explorer quantifies the slope defect as evidence for nonexistence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import specfun as sf
from .model import ModelParams, beta_of_gamma, wave_amplitude
from .radial import RadialProfile, integrate_radial

FB_START_OFFSET = 1e-4  # relative start offset for the interface expansion
DELTA_FAMILY = (1e-2, 1e-3, 1e-4)
DELTA_SWITCH = 1e-8  # floor regularizing u^(gamma-1) near a zero crossing
SLOPE_SAMPLE_OFFSETS = (1e-2, 1e-3)  # r - R offsets for slope extrapolation


@dataclass
class ForwardProfileResult:
    profile: RadialProfile
    R: float
    asymptotic_c: float
    fb_slope: float
    method: str = ""
    diagnostics: dict = field(default_factory=dict)


@dataclass
class ShrinkerResult:
    R: float
    ell: float
    profile: RadialProfile
    s_star: float = 0.0


class NonMonotoneProfileError(RuntimeError):
    """A computed expanding profile failed U, U' > 0 (integration failure)."""


def _guarded_reaction(gamma: float, delta: float = 0.0):
    """gamma * (U + delta)^(gamma-1), floored below DELTA_SWITCH.

    The floor keeps the right-hand side finite when the integrator probes
    U <= 0 during trial steps; it only engages below U = 1e-8.
    """
    if gamma == 0.0:
        return lambda u: 0.0
    if gamma == 1.0:
        return lambda u: 1.0

    def rhs(u):
        ueff = max(u, 0.0) + delta
        if ueff < DELTA_SWITCH:
            ueff = ueff + DELTA_SWITCH
        return gamma * ueff ** (gamma - 1.0)

    return rhs


def _forward_grid(R: float, r_max: float) -> np.ndarray:
    lin = np.linspace(R, r_max, 3000)
    near = R + (r_max - R) * np.geomspace(1e-8, 1.0, 600)
    return np.unique(np.concatenate((lin, near)))


def _integrate_forward(gamma, n, R, r_max, init, delta, tol, meta):
    beta = beta_of_gamma(gamma)
    return integrate_radial(
        n=n,
        drift=+1.0,
        zeroth_coeff=-beta / 2.0,
        rhs=_guarded_reaction(gamma, delta),
        init=init,
        r_end=r_max,
        tol=tol,
        r_eval=_forward_grid(R, r_max),
        stop_on_zero=False,
        meta=meta,
    )


def _fb_expansion_profile(gamma, n, R, r_max, tol) -> RadialProfile:
    """Shoot from the interface using U ~ c_beta (r-R)^beta.

    At gamma = 0 the reaction vanishes on the positivity set and the slope
    sqrt(2) is exact starting data, so the shot starts at r = R itself.
    """
    beta = beta_of_gamma(gamma)
    cb = wave_amplitude(beta)
    meta = {"gamma": gamma, "n": n, "direction": "forward"}
    if gamma == 0.0:
        init = (R, 0.0, math.sqrt(2.0))
    else:
        h0 = FB_START_OFFSET * R
        init = (R + h0, cb * h0**beta, beta * cb * h0 ** (beta - 1.0))
    return _integrate_forward(gamma, n, R, r_max, init, 0.0, tol, meta)


def _delta_family_profile(gamma, n, R, r_max, tol):
    """Integrate the floor-regularized problem and extrapolate delta -> 0.

    The regularized profiles start from V(R) = V'(R) = 0 with reaction
    gamma (V + delta)^(gamma-1).  The interface layer (width delta^(1/beta))
    perturbs the profile at the two orders delta^gamma and delta^(1/beta),
    so the delta -> 0 limit is taken by eliminating both terms across the
    three floors (a two-exponent Richardson step).  The leftover is reported
    as diagnostics["error_bound"]; it decays only like a small power of
    delta, so this route is a cross-check, not the precision path (that is
    fb_expansion).  gamma = 0 kills the reaction (the family collapses to
    the direct interface start) and gamma = 1 makes every member exact.
    """
    meta = {"gamma": gamma, "n": n, "direction": "forward"}
    if gamma == 0.0:
        return _fb_expansion_profile(gamma, n, R, r_max, tol), {"collapsed": True}
    beta = beta_of_gamma(gamma)
    profiles = [
        _integrate_forward(gamma, n, R, r_max, (R, 0.0, 0.0), d, tol, meta)
        for d in DELTA_FAMILY
    ]
    grid = profiles[0].r
    us, dus = zip(*(p(grid) for p in profiles))
    scale = np.abs(us[2]).max()
    if np.abs(us[0] - us[1]).max() < 1e-12 * scale:  # gamma = 1: family exact
        return profiles[2], {"exponents": None, "error_bound": 0.0}
    p1, p2 = min(gamma, 1.0 / beta), max(gamma, 1.0 / beta)
    vander = np.array([[1.0, d**p1, d**p2] for d in DELTA_FAMILY])
    coef_u = np.linalg.solve(vander, np.vstack(us))
    coef_du = np.linalg.solve(vander, np.vstack(dus))
    u_ext, du_ext = coef_u[0], coef_du[0]
    # single-exponent extrapolation with the dominant power, as an error probe
    probe = us[2] - (us[1] - us[2]) / ((DELTA_FAMILY[1] / DELTA_FAMILY[2]) ** p1 - 1.0)
    error_bound = float(np.abs(u_ext - probe).max())
    prof = RadialProfile(
        r=grid, u=np.maximum(u_ext, 0.0), du=du_ext, fb_radius=R, meta=meta
    )
    return prof, {"exponents": (p1, p2), "error_bound": error_bound}


def fb_slope(profile: RadialProfile, R: float, beta: float) -> float:
    """Interface slope lim U^(1/beta)(r)/(r - R), extrapolated linearly.

    Samples at r - R = 1e-2 and 1e-3; the first correction is O(r - R), so
    the two-point Richardson step with exponent 1 removes it.
    """
    h1, h2 = SLOPE_SAMPLE_OFFSETS
    u1, _ = profile(R + h1)
    u2, _ = profile(R + h2)
    s1 = max(u1, 0.0) ** (1.0 / beta) / h1
    s2 = max(u2, 0.0) ** (1.0 / beta) / h2
    ratio = h1 / h2
    return (ratio * s2 - s1) / (ratio - 1.0)


def asymptotic_slope(profile: RadialProfile, beta: float) -> float:
    """Richardson-extrapolated limit of U(r)/r^beta over the last decade.

    The tail correction is O(r^-2); successive two-point extrapolations must
    agree within 5% or a non-convergence error is raised.
    """
    r_top = profile.r[-1]
    radii = [r_top, r_top / 2.0, r_top / 4.0]
    q = []
    for r in radii:
        u, _ = profile(r)
        q.append(u / r**beta)
    # exponent-2 Richardson on radius pairs (r, r/2): factor 2^2 - 1 = 3
    c01 = q[0] + (q[0] - q[1]) / 3.0
    c12 = q[1] + (q[1] - q[2]) / 3.0
    if abs(c01 - c12) > 0.05 * abs(c01):
        raise RuntimeError(
            f"asymptotic slope not converged: estimates {c01:.6g} vs {c12:.6g}"
        )
    return float(c01)


def p_infinity_quadrature(profile: RadialProfile, gamma: float, n: int, R: float):
    """Quadrature of the tail-amplitude integral along a computed profile.

    p_inf = int_S^inf s^(n/2-1) U((n+beta)/2, n/2, s) g(s) ds with
    g(s) = gamma U(2 sqrt(s))^(gamma-1) and S = R^2/4; the reported
    asymptotic amplitude is p_inf / 2^beta (at gamma = 1 this reduces to the
    closed-form limit with the 1/4 prefactor).  The integrand beyond the
    profile's reach uses the power-law continuation of g.
    """
    beta = beta_of_gamma(gamma)
    a, b = (n + beta) / 2.0, n / 2.0
    S = R**2 / 4.0
    s_top = (profile.r[-1]) ** 2 / 4.0

    def g_of_s(s):
        r = 2.0 * math.sqrt(s)
        u, _ = profile(r)
        return gamma * max(u, 1e-300) ** (gamma - 1.0) if gamma > 0 else 0.0

    def integrand(s):
        return s ** (b - 1.0) * sf.tricomi_U(a, b, s) * g_of_s(s)

    body, _ = quad(integrand, S, s_top, epsrel=1e-9, epsabs=1e-12, limit=400)
    # tail: g(s) ~ gamma (c_fit (2 sqrt(s))^beta)^(gamma-1)
    u_top, _ = profile(profile.r[-1])
    c_fit = u_top / profile.r[-1] ** beta

    def tail_integrand(s):
        g = gamma * (c_fit * (2.0 * math.sqrt(s)) ** beta) ** (gamma - 1.0)
        return s ** (b - 1.0) * sf.tricomi_U(a, b, s) * g

    tail, _ = quad(tail_integrand, s_top, np.inf, epsrel=1e-9, epsabs=1e-12, limit=400)
    return (body + tail) / 2.0**beta


def forward_profile(
    gamma: float,
    n: int,
    R: float,
    r_max: float | None = None,
    method: str = "fb_expansion",
    tol: float = 1e-10,
) -> ForwardProfileResult:
    """Expanding-support self-similar profile with contact radius R.

    method is one of "fb_expansion" (shoot from the interface expansion),
    "delta_family" (floor-regularized family extrapolated to zero floor), or
    "explicit" (closed forms; gamma must be 0 or 1).
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if R <= 0.0:
        raise ValueError("need R > 0")
    beta = beta_of_gamma(gamma)
    if r_max is None:
        r_max = 20.0 * max(R, 1.0)
    if r_max <= 4.0 * R:
        raise ValueError("need r_max > 4 R")

    diagnostics: dict = {}
    if method == "fb_expansion":
        prof = _fb_expansion_profile(gamma, n, R, r_max, tol)
    elif method == "delta_family":
        prof, diagnostics = _delta_family_profile(gamma, n, R, r_max, tol)
    elif method == "explicit":
        if gamma == 0.0:
            evaluator = lambda r: explicit_forward_gamma0(n, R, r)  # noqa: E731
        elif gamma == 1.0:
            evaluator = lambda r: explicit_forward_gamma1(n, R, r)  # noqa: E731
        else:
            raise ValueError("method 'explicit' requires gamma in {0, 1}")
        grid = _forward_grid(R, r_max)
        u = np.array([evaluator(float(r)) for r in grid])
        du = np.gradient(u, grid)
        prof = RadialProfile(
            r=grid, u=u, du=du, fb_radius=R,
            meta={"gamma": gamma, "n": n, "direction": "forward"},
        )
    else:
        raise ValueError(f"unknown method {method!r}")

    prof.fb_radius = R
    interior = prof.r > R + 2.0 * FB_START_OFFSET * R
    if not (np.all(prof.u[interior] > 0.0) and np.all(prof.du[interior] > 0.0)):
        raise NonMonotoneProfileError(
            "computed profile is not positive/increasing; integration failed"
        )
    slope = fb_slope(prof, R, beta)
    c = asymptotic_slope(prof, beta)
    return ForwardProfileResult(
        profile=prof, R=R, asymptotic_c=c, fb_slope=slope,
        method=method, diagnostics=diagnostics,
    )


def explicit_forward_gamma0(n: int, R: float, r) -> float:
    """Closed-form expanding profile at gamma = 0 (beta = 1).

    U(r) = 2 sqrt(2) / (R W(S)) * e^((R^2 - r^2)/4)
           * [M(a,b,S) U(a,b,s) - U(a,b,S) M(a,b,s)],

    with a = (n+1)/2, b = n/2, s = r^2/4, S = R^2/4 and W the Wronskian
    -Gamma(b)/Gamma(a) e^S S^(-b) of the Kummer/Tricomi pair.
    """
    if np.ndim(r):
        return np.array([explicit_forward_gamma0(n, R, float(x)) for x in r])
    r = float(r)
    if r < R:
        raise ValueError("closed form defined for r >= R")
    if r == R:
        return 0.0
    a, b = (n + 1) / 2.0, n / 2.0
    S, s = R**2 / 4.0, r**2 / 4.0
    wr = -sf.gamma_fn(b) * sf.recip_gamma(a) * math.exp(S) * S ** (-b)
    bracket = sf.kummer_M(a, b, S) * sf.tricomi_U(a, b, s) - sf.tricomi_U(
        a, b, S
    ) * sf.kummer_M(a, b, s)
    return 2.0 * math.sqrt(2.0) / (R * wr) * math.exp((R**2 - r**2) / 4.0) * bracket


def forward_gamma0_asymptote(n: int, R: float) -> float:
    """Closed-form limit of U(r)/r for the gamma = 0 expanding profile."""
    return (
        R ** (n - 1)
        / 2.0 ** (n - 0.5)
        * sf.tricomi_U((n + 1) / 2.0, n / 2.0, R**2 / 4.0)
    )


def explicit_forward_gamma1(n: int, R: float, r) -> float:
    """Closed-form expanding profile at gamma = 1 (beta = 2):

    U(r) = (2n + r^2) ( 1/(2n + R^2)
           - 2 R^n e^(R^2/4) int_R^r e^(-tau^2/4) / (tau^(n-1)(2n+tau^2)^2) dtau ) - 1.
    """
    if np.ndim(r):
        return np.array([explicit_forward_gamma1(n, R, float(x)) for x in r])
    r = float(r)
    if r < R:
        raise ValueError("closed form defined for r >= R")
    if r == R:
        return 0.0

    def integrand(tau):
        return math.exp(-(tau**2) / 4.0) / (tau ** (n - 1) * (2.0 * n + tau**2) ** 2)

    integral, _ = quad(integrand, R, r, epsrel=1e-13, epsabs=1e-300, limit=200)
    bracket = 1.0 / (2.0 * n + R**2) - 2.0 * R**n * math.exp(R**2 / 4.0) * integral
    return (2.0 * n + r**2) * bracket - 1.0


def forward_gamma1_asymptote(n: int, R: float) -> float:
    """Quadrature value of lim U(r)/r^2 for the gamma = 1 expanding profile:

    (1/4) int_{R^2/4}^inf tau^(n/2-1) U((n+2)/2, n/2, tau) dtau.
    """
    a, b = (n + 2) / 2.0, n / 2.0

    def integrand(tau):
        return tau ** (b - 1.0) * sf.tricomi_U(a, b, tau)

    val, _ = quad(integrand, R**2 / 4.0, np.inf, epsrel=1e-11, epsabs=1e-14, limit=400)
    return val / 4.0


def shrinker_gamma0(n: int) -> ShrinkerResult:
    """The unique gamma = 0 shrinker profile U(r) = ell M(-1/2, n/2, r^2/4).

    R = 2 sqrt(s_star) with s_star the positive zero of M(-1/2, n/2, .), and
    1/ell = -sqrt(s_star/2) dM/ds(-1/2, n/2, s_star); the interface slope is
    then U'(R) = -sqrt(2) exactly (beta = 1), asserted to 1e-8.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    b = n / 2.0
    s_star = sf.kummer_positive_zero(b)
    R = 2.0 * math.sqrt(s_star)
    dm = sf.kummer_M_dds(-0.5, b, s_star)
    ell = -1.0 / (math.sqrt(s_star / 2.0) * dm)
    radii = np.linspace(0.0, R, 2001)
    u = ell * np.array([sf.kummer_M(-0.5, b, ri**2 / 4.0) for ri in radii])
    du = ell * np.array(
        [sf.kummer_M_dds(-0.5, b, ri**2 / 4.0) * ri / 2.0 for ri in radii]
    )
    u[-1] = 0.0  # zero of M by construction
    slope_defect = abs(du[-1] + math.sqrt(2.0))
    if slope_defect > 1e-8:
        raise RuntimeError(f"shrinker slope defect {slope_defect:.3e} exceeds 1e-8")
    prof = RadialProfile(
        r=radii, u=np.maximum(u, 0.0), du=du, fb_radius=R,
        meta={"gamma": 0.0, "n": n, "direction": "shrinker"},
    )
    return ShrinkerResult(R=R, ell=ell, profile=prof, s_star=s_star)


def _level_radius(profile: RadialProfile, level: float, r_hit: float):
    """Radius where U decays through `level` just inside the hit radius."""
    idx = np.nonzero((profile.u >= level) & (profile.r < r_hit))[0]
    if idx.size == 0:
        return None
    lo = profile.r[idx[-1]]
    hi = min(r_hit, profile.r[-1])
    if profile.dense is None:
        j = min(idx[-1] + 1, profile.r.size - 1)
        return float(np.interp(level, [profile.u[j], profile.u[idx[-1]]],
                               [profile.r[j], lo]))
    for _ in range(80):  # bisection on the dense output
        mid = 0.5 * (lo + hi)
        if profile(mid)[0] >= level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _measured_slope(profile: RadialProfile, beta: float, r_hit: float):
    """|d(U^(1/beta))/dr| near the hit radius, extrapolated from above U = 1e-4.

    Sampled where U = 1e-3 and 1e-4 (located on the dense output) and
    extrapolated linearly in U^(1/beta), the distance proxy from a genuine
    sharp interface.
    """
    samples = []
    for lev in (1e-3, 1e-4):
        r_lev = _level_radius(profile, lev, r_hit)
        if r_lev is None:
            return None
        u, du = profile(r_lev)
        u = max(u, 1e-300)
        slope = abs(du) * u ** (1.0 / beta - 1.0) / beta
        samples.append((u ** (1.0 / beta), slope))
    (x1, s1), (x2, s2) = samples
    if x1 == x2:
        return s2
    return s2 + (s2 - s1) * x2 / (x1 - x2)


def shrinker_gamma1_scan(n: int, ell_grid) -> dict:
    """Nonexistence evidence at gamma = 1: every candidate fails the slope law.

    Solutions of the shrinker ODE with U(0) = ell, U'(0) = 0 are the
    parabolas U = ell - (ell-1) r^2 / (2n).  For ell <= 1 there is no
    positive zero; for ell > 1 the zero at R = sqrt(2 n ell/(ell-1)) is
    transversal, so |(U^(1/2))'| ~ (R - r)^(-1/2) diverges (log-log exponent
    -0.5) instead of reaching the required sqrt(2)/2.
    """
    results = []
    for ell in np.atleast_1d(np.asarray(ell_grid, dtype=float)):
        if ell <= 0.0:
            raise ValueError("ell must be positive")
        if ell <= 1.0:
            results.append(
                {"ell": float(ell), "R": None, "has_zero": False, "exponent": None}
            )
            continue
        R = math.sqrt(2.0 * n * ell / (ell - 1.0))
        hs = np.geomspace(1e-6, 1e-3, 12)
        r = R - hs
        u = ell - (ell - 1.0) * r**2 / (2.0 * n)
        du = -(ell - 1.0) * r / n
        slope = np.abs(du) / (2.0 * np.sqrt(u))
        expo, _ = np.polyfit(np.log(hs), np.log(slope), 1)
        results.append(
            {"ell": float(ell), "R": R, "has_zero": True, "exponent": float(expo)}
        )
    return {"n": n, "gamma": 1.0, "candidates": results, "exists": False}


def shrinker_parabola_slope(n: int, ell: float) -> float | None:
    """Slope of the gamma = 1 parabola measured like the shooting diagnostic.

    The parabola is closed-form, so the U = 1e-3 and 1e-4 levels are located
    exactly before the same linear extrapolation in U^(1/2) is applied.
    """
    if ell <= 1.0:
        return None
    samples = []
    for lev in (1e-3, 1e-4):
        r_lev = math.sqrt(2.0 * n * (ell - lev) / (ell - 1.0))
        du = (ell - 1.0) * r_lev / n
        samples.append((math.sqrt(lev), du / (2.0 * math.sqrt(lev))))
    (x1, s1), (x2, s2) = samples
    return s2 + (s2 - s1) * x2 / (x1 - x2)


@dataclass
class ShrinkerShot:
    """One shooting attempt at a gamma in (0,1) shrinker."""

    gamma: float
    n: int
    ell: float
    hit_radius: float | None
    slope: float | None
    defect: float | None


def shrinker_shoot(
    gamma: float, n: int, ell: float, tol: float = 1e-10, r_max: float = 30.0
) -> ShrinkerShot:
    """Shoot the shrinker ODE from the center and measure the slope defect.

    Integrates U'' + ((n-1)/r - r/2) U' + (beta/2) U = gamma U^(gamma-1) from
    (0, ell, 0) until U hits zero (reaction floored below U = 1e-8 so the
    integrator stays finite through the crossing).  defect is the distance of
    the measured |(U^(1/beta))'| from sqrt(2)/beta; a sweep over ell traces
    the defect curve used as nonexistence evidence.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("shooting explorer covers gamma strictly inside (0, 1)")
    if ell <= 0.0:
        raise ValueError("need ell > 0")
    beta = beta_of_gamma(gamma)
    prof = integrate_radial(
        n=n,
        drift=-1.0,
        zeroth_coeff=beta / 2.0,
        rhs=_guarded_reaction(gamma),
        init=(0.0, ell, 0.0),
        r_end=r_max,
        tol=tol,
        stop_on_zero=True,
        meta={"gamma": gamma, "n": n, "direction": "shrinker"},
    )
    if prof.fb_radius == 0.0:
        return ShrinkerShot(gamma, n, ell, None, None, None)
    slope = _measured_slope(prof, beta, prof.fb_radius)
    target = math.sqrt(2.0) / beta
    defect = None if slope is None else abs(slope) - target
    return ShrinkerShot(gamma, n, ell, prof.fb_radius, slope, defect)


def shrinker_defect_curve(gamma: float, n: int, ell_grid, tol: float = 1e-9):
    """Defect-vs-ell sweep for the conjectured nonexistence range."""
    rows = []
    for ell in np.atleast_1d(np.asarray(ell_grid, dtype=float)):
        shot = shrinker_shoot(gamma, n, float(ell), tol=tol)
        rows.append(shot)
    return rows
