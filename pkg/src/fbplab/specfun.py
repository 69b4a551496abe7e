"""Confluent hypergeometric machinery: Gamma, Kummer's M, Tricomi's U.

Only the parameter families needed by the profile solvers are supported; no
attempt is made at a general-purpose U.  M is a direct Taylor series with
compensated summation (all in-scope arguments keep the series well behaved);
U routes through closed forms where available and otherwise through the
Laplace integral representation, which is uniformly accurate for a > 0.

Key identities used throughout:

    dM/ds = (a/b) M(a+1, b+1, s)
    dU/ds = -a U(a+1, b+1, s)
    M U' - M' U = -Gamma(b)/Gamma(a) * e^s s^(-b)     (Wronskian)
    U(a, b, s) -> s^(-a) [1 + O(1/s)]                 (s -> infinity)
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

MAX_SERIES_TERMS = 10_000
SERIES_RELTOL = 1e-17


class PoleError(ValueError):
    """Gamma evaluated at a nonpositive integer."""


class UnsupportedParameterError(ValueError):
    """Tricomi U requested outside the validated parameter families."""


# Lanczos approximation, g = 7, 9 coefficients (~15 significant digits).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function via the Lanczos rational approximation.

    Reflection handles x < 0.5; nonpositive integers raise PoleError.
    """
    if x <= 0.0 and float(x).is_integer():
        raise PoleError(f"Gamma pole at x = {x}")
    if x < 0.5:
        # Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x = x - 1.0
    acc = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def recip_gamma(x: float) -> float:
    """1 / Gamma(x), zero at the poles."""
    if x <= 0.0 and float(x).is_integer():
        return 0.0
    return 1.0 / gamma_fn(x)


def _check_kummer_b(b: float) -> None:
    if b <= 0.0 and float(b).is_integer():
        raise ValueError(f"Kummer M undefined for nonpositive integer b = {b}")


def kummer_M(a: float, b: float, s: float) -> float:
    """Kummer's function M(a, b, s) = sum_k (a)_k/(b)_k s^k/k!, for s >= 0.

    Kahan-compensated summation, terminating when the term drops below
    1e-17 of the partial sum (or exactly, for nonpositive-integer a).
    """
    _check_kummer_b(b)
    if s < 0.0:
        raise ValueError("series evaluation requires s >= 0")
    if s == 0.0:
        return 1.0
    total = 1.0
    comp = 0.0
    term = 1.0
    for k in range(1, MAX_SERIES_TERMS + 1):
        term *= (a + k - 1.0) / (b + k - 1.0) * s / k
        if term == 0.0:  # terminating polynomial (a a nonpositive integer)
            break
        if abs(term) > 1e305:
            # the tail dominates and keeps the sign of the current term
            return math.copysign(math.inf, term)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < SERIES_RELTOL * max(abs(total), 1e-300) and k > s:
            break
    return total


def kummer_M_dds(a: float, b: float, s: float) -> float:
    """dM/ds via the contiguous relation (a/b) M(a+1, b+1, s)."""
    return a / b * kummer_M(a + 1.0, b + 1.0, s)


def _tricomi_integral(a: float, b: float, s: float) -> float:
    """Laplace representation, valid for a > 0, s > 0, any real b.

    After u = s t the representation reads

        U(a,b,s) = s^(-a)/Gamma(a) * int_0^inf e^(-u) u^(a-1) (1+u/s)^(b-a-1) du,

    whose integrand is O(1)-scaled for every s.  The [0,1] piece is mapped by
    u = tau^(1/a) to remove the endpoint singularity when a < 1.
    """
    power = b - a - 1.0

    def middle(u):
        return math.exp(-u) * u ** (a - 1.0) * (1.0 + u / s) ** power

    def head(tau):  # u = tau^(1/a), e^(-u) u^(a-1) du = e^(-u) dtau / a
        u = tau ** (1.0 / a)
        return math.exp(-u) * (1.0 + u / s) ** power / a

    val1, _ = quad(head, 0.0, 1.0, epsabs=1e-300, epsrel=1e-13, limit=200)
    val2, _ = quad(middle, 1.0, np.inf, epsabs=1e-300, epsrel=1e-13, limit=200)
    return s ** (-a) * (val1 + val2) / gamma_fn(a)


def _tricomi_connection(a: float, b: float, s: float) -> float:
    """Two-M connection formula; only trustworthy for small s (see tricomi_U)."""
    term1 = recip_gamma(a - b + 1.0) * gamma_fn(1.0 - b) * kummer_M(a, b, s)
    term2 = recip_gamma(a) * gamma_fn(b - 1.0) * s ** (1.0 - b) * kummer_M(
        a - b + 1.0, 2.0 - b, s
    )
    return term1 + term2


def tricomi_U(a: float, b: float, s: float) -> float:
    """Tricomi's function U(a, b, s) for s > 0 on the validated families.

    Routes: closed forms U(-1/2, 1/2, s) = sqrt(s) and U(a, a+1, s) = s^(-a);
    the Laplace integral for a > 0; the two-M connection formula as a small-s
    fallback for a <= 0 with non-integer b.  The connection formula is not
    used beyond s = 1: both M terms grow like e^s while U decays
    algebraically, so the cancellation destroys double precision for
    moderate s.
    """
    if s <= 0.0:
        raise ValueError("U requires s > 0")
    if a == -0.5 and b == 0.5:
        return math.sqrt(s)
    if b == a + 1.0:
        return s ** (-a)
    if a > 0.0:
        return _tricomi_integral(a, b, s)
    if not float(b).is_integer() and s <= 1.0:
        return _tricomi_connection(a, b, s)
    raise UnsupportedParameterError(
        f"U(a={a}, b={b}, s={s}) outside the validated parameter ranges"
    )


def tricomi_U_dds(a: float, b: float, s: float) -> float:
    """dU/ds via the contiguous relation -a U(a+1, b+1, s)."""
    if a == 0.0:
        return 0.0
    return -a * tricomi_U(a + 1.0, b + 1.0, s)


def wronskian_residual(a: float, b: float, s: float) -> float:
    """Residual of M U' - M' U + Gamma(b)/Gamma(a) e^s s^(-b); ~0 when exact.

    Derivatives come from the contiguous relations, never from finite
    differences.  The natural magnitude scale is e^s s^(-b).
    """
    if s <= 0.0:
        raise ValueError("requires s > 0")
    m = kummer_M(a, b, s)
    mp = kummer_M_dds(a, b, s)
    u = tricomi_U(a, b, s)
    up = tricomi_U_dds(a, b, s)
    return m * up - mp * u + gamma_fn(b) * recip_gamma(a) * math.exp(s) * s ** (-b)


def kummer_positive_zero(b: float, s_max: float = 1e3) -> float:
    """The unique positive zero of s -> M(-1/2, b, s), for b > 0.

    M(-1/2, b, 0) = 1 and dM/ds = -(1/(2b)) M(1/2, b+1, s) < 0, so the zero
    is found by scanning for the sign change and refining with Brent's
    method.  Simplicity (dM/ds < 0 at the zero) is asserted.
    """
    if b <= 0.0:
        raise ValueError("need b > 0")

    def f(s):
        return kummer_M(-0.5, b, s)

    lo, hi = 0.0, None
    step = 0.25
    s = step
    while s <= s_max:
        if f(s) < 0.0:
            hi = s
            break
        lo = s
        s += step
    if hi is None:
        raise RuntimeError(f"no sign change of M(-1/2, {b}, s) found in (0, {s_max}]")
    root = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)
    if abs(f(root)) > 1e-12:
        raise RuntimeError(f"zero refinement failed: |M| = {abs(f(root)):.3e}")
    if kummer_M_dds(-0.5, b, root) >= 0.0:
        raise RuntimeError("zero of M(-1/2, b, .) is not simple")
    return float(root)
