import math

import numpy as np
import pytest
from scipy.integrate import quad

from fbplab import model


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(1234)


def test_beta_of_gamma_endpoints():
    assert model.beta_of_gamma(0.0) == 1.0
    assert model.beta_of_gamma(1.0) == 2.0
    assert model.beta_of_gamma(2.0 / 3.0) == pytest.approx(1.5, rel=1e-15)


def test_beta_of_gamma_domain():
    with pytest.raises(ValueError):
        model.beta_of_gamma(-0.1)
    with pytest.raises(ValueError):
        model.beta_of_gamma(1.5)


def test_beta_gamma_identity(rng):
    # beta*gamma == 2(beta - 1) at floating precision, used everywhere
    for g in rng.uniform(0.0, 1.0, size=1000):
        b = model.beta_of_gamma(g)
        assert abs(b * g - 2.0 * (b - 1.0)) <= 4.0 * np.finfo(float).eps * max(1.0, b * g)


class TestMollifierDefault:
    def test_endpoint_vanishing(self):
        m = model.mollifier_default()
        assert m.h(0.0) == 0.0
        assert m.h(1.0) == 0.0
        assert m.h(-0.5) == 0.0 and m.h(2.0) == 0.0

    def test_positive_slope_at_zero(self):
        m = model.mollifier_default()
        eps = 1e-8
        assert m.h(eps) / eps == pytest.approx(12.0, rel=1e-6)

    def test_unit_mass_quadrature(self):
        m = model.mollifier_default()
        mass, err = quad(m.h, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
        assert abs(mass - 1.0) <= 1e-12

    def test_H_matches_antiderivative(self):
        m = model.mollifier_default()
        assert m.H(0.5) == pytest.approx(0.6875, abs=1e-15)
        for v in [0.1, 0.3, 0.7, 0.9]:
            val, _ = quad(m.h, 0.0, v, epsabs=1e-14)
            assert m.H(v) == pytest.approx(val, abs=1e-12)
        assert m.H(0.0) == 0.0
        assert m.H(1.0) == 1.0 and m.H(3.0) == 1.0

    def test_H_monotone(self):
        m = model.mollifier_default()
        v = np.linspace(-0.5, 1.5, 400)
        assert np.all(np.diff(m.H(v)) >= 0.0)


class TestReaction:
    def test_plateau_branch_gamma1(self):
        p = model.ModelParams(gamma=1.0)
        assert model.f_eps(1.0, 0.1, p) == 1.0

    def test_zero_input(self):
        for g in [0.0, 0.5, 1.0]:
            p = model.ModelParams(gamma=g)
            assert model.f_eps(0.0, 0.3, p) == 0.0
            assert model.f_eps(-1.0, 0.3, p) == 0.0

    def test_exact_plateau_above_eps_beta(self, rng):
        p = model.ModelParams(gamma=0.5)
        eps = 0.2
        for u in rng.uniform(eps**p.beta, 5.0, size=50):
            assert model.f_eps(u, eps, p) == p.gamma * u ** (p.gamma - 1.0)

    def test_scaling_relations(self, rng):
        # f_eps(r^beta u) = r^(beta-2) f_(eps/r)(u); F scales with r^(gamma beta)
        for g in [0.25, 0.5, 0.75, 1.0]:
            p = model.ModelParams(gamma=g)
            for _ in range(60):
                u = rng.uniform(0.0, 2.0)
                r = rng.uniform(0.2, 4.0)
                eps = rng.uniform(0.05, 1.0)
                f1 = model.f_eps(r**p.beta * u, eps, p)
                f2 = r ** (p.beta - 2.0) * model.f_eps(u, eps / r, p)
                assert abs(f1 - f2) <= 1e-12 * (1.0 + abs(f1))
                F1 = model.F_eps(r**p.beta * u, eps, p)
                F2 = r ** (p.gamma * p.beta) * model.F_eps(u, eps / r, p)
                assert abs(F1 - F2) <= 1e-12 * (1.0 + abs(F1))

    def test_nonnegative_and_H_range(self, rng):
        p = model.ModelParams(gamma=0.5)
        u = np.linspace(-1.0, 3.0, 500)
        assert np.all(model.f_eps(u, 0.3, p) >= 0.0)
        assert np.all(model.F_eps(u, 0.3, p) >= 0.0)
        H = model.H_eps(u, 0.3, p)
        assert np.all((H >= 0.0) & (H <= 1.0))
        assert np.all(np.diff(H) >= 0.0)

    def test_F_eps_value(self):
        p = model.ModelParams(gamma=1.0)
        assert model.F_eps(0.5, 1.0, p) == pytest.approx(0.34375, abs=1e-15)
        assert model.F_eps(2.0, 1.0, p) == 2.0  # u >= eps^beta plateau


class TestGEps:
    def test_zero(self):
        p = model.ModelParams(gamma=0.5)
        assert model.g_eps(0.0, 0.0, 0.2, p) == 0.0

    def test_uniform_bound(self, rng):
        # |g_eps| <= (2-gamma)[max h + gamma + (1-gamma) beta^2 C]
        for g in [0.0, 0.5, 1.0]:
            p = model.ModelParams(gamma=g)
            grad_cap = 3.0
            bound = (2.0 - g) * (p.mollifier.h_max + g + (1.0 - g) * p.beta**2 * grad_cap)
            for _ in range(100):
                u = rng.uniform(0.0, 4.0)
                gr = rng.uniform(0.0, grad_cap)
                val = model.g_eps(u, gr, 0.3, p)
                assert 0.0 <= val <= bound + 1e-12

    def test_gamma1_drops_gradient_term(self, rng):
        p = model.ModelParams(gamma=1.0)
        eps = 0.4
        for u in rng.uniform(0.0, 2.0, size=20):
            v1 = model.g_eps(u, 0.0, eps, p)
            v2 = model.g_eps(u, 123.4, eps, p)
            assert v1 == v2
            scale = eps**p.beta
            expect = (2.0 - 1.0) * (
                p.mollifier.h(u / scale) / scale * u + p.mollifier.H(u / scale)
            )
            assert v1 == pytest.approx(expect, rel=1e-14)


class TestPhillips:
    def test_zero(self):
        assert model.phillips_f(0.0, 0.3, 0.5) == 0.0

    def test_point_value(self):
        assert model.phillips_f(1.0, 1.0, 1.0) == 0.5

    def test_large_u_limit_and_monotone_tail(self):
        # approaches gamma*u^(gamma-1) -> 0 from a monotone tail for gamma < 1
        g, eps = 0.5, 0.1
        u = np.geomspace(1.0, 1e6, 200)
        vals = model.phillips_f(u, eps, g)
        ref = g * u ** (g - 1.0)
        assert abs(vals[-1] / ref[-1] - 1.0) < 1e-5
        assert np.all(np.diff(vals) < 0.0)


class TestExplicitSolutions:
    def test_T_basics(self):
        p = model.ModelParams(gamma=1.0)
        assert model.explicit_T(0.0, 0.0, p) == 0.0
        assert model.explicit_T(1.0, 0.0, p) == 0.0
        assert model.explicit_T(-1.0, 0.0, p) == 1.0

    def test_T_solves_ode(self):
        # d/dt T = -gamma T^(gamma-1) on {T > 0}
        p = model.ModelParams(gamma=0.5)
        for t in [-2.0, -1.0, -0.25]:
            h = 1e-6
            lhs = (model.explicit_T(t + h, 0.0, p) - model.explicit_T(t - h, 0.0, p)) / (2 * h)
            rhs = -p.gamma * model.explicit_T(t, 0.0, p) ** (p.gamma - 1.0)
            assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_halfspace(self):
        p0 = model.ModelParams(gamma=0.0)
        assert model.explicit_halfspace(1.0, -np.inf, 0.0, p0) == pytest.approx(
            math.sqrt(2.0), rel=1e-15
        )
        p = model.ModelParams(gamma=0.6)
        assert model.explicit_halfspace(0.3, 0.0, 1.0, p) == 0.0
        # symmetry: value at a - s equals value at b + s
        for s in [0.1, 0.7, 2.0]:
            assert model.explicit_halfspace(-s, 0.0, 1.0, p) == pytest.approx(
                model.explicit_halfspace(1.0 + s, 0.0, 1.0, p), rel=1e-14
            )

    def test_radial_cone_amplitude(self):
        p = model.ModelParams(gamma=1.0)
        assert model.radial_cone_amplitude(2, 0, p) == pytest.approx(0.25, abs=0.0)
        assert model.explicit_radial_cone([0.0, 0.0], [0.0, 0.0], 2, 0, p) == 0.0
        with pytest.raises(ValueError):
            model.radial_cone_amplitude(3, 2, p)

    def test_radial_cone_laplacian_residual(self):
        # finite-difference Laplacian oracle: Lap(u) = gamma u^(gamma-1) on {u>0}
        p = model.ModelParams(gamma=1.0)
        h = 1e-4
        for pt in [(1.0, 0.3), (0.5, -0.7), (-1.2, 0.4)]:
            x = np.array(pt)
            u0 = model.explicit_radial_cone(x, [0.0, 0.0], 2, 0, p)
            lap = 0.0
            for i in range(2):
                e = np.zeros(2)
                e[i] = h
                lap += (
                    model.explicit_radial_cone(x + e, [0.0, 0.0], 2, 0, p)
                    - 2.0 * u0
                    + model.explicit_radial_cone(x - e, [0.0, 0.0], 2, 0, p)
                ) / h**2
            assert abs(lap - p.gamma * u0 ** (p.gamma - 1.0)) < 1e-10 * (1 + abs(lap)) + 1e-6


def test_lipschitz_scaling():
    p = model.ModelParams(gamma=0.5)
    l1 = model.f_eps_lipschitz(1.0, p)
    l2 = model.f_eps_lipschitz(0.5, p)
    assert l2 == pytest.approx(l1 / 0.25, rel=1e-12)


def test_alternative_mollifier_swaps_in():
    # the bump is pluggable: h(v) = 6v(1-v) also has unit mass and h'(0) > 0,
    # and the structural identities survive the swap
    def h(v):
        v = np.asarray(v, dtype=float)
        out = np.where((v > 0.0) & (v < 1.0), 6.0 * v * (1.0 - v), 0.0)
        return float(out) if out.ndim == 0 else out

    def H(v):
        vc = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
        out = vc**2 * (3.0 - 2.0 * vc)
        return float(out) if out.ndim == 0 else out

    spec = model.MollifierSpec(h=h, H=H, h_lipschitz=6.0, h_max=1.5)
    p = model.ModelParams(gamma=0.5, mollifier=spec)
    mass, _ = quad(h, 0.0, 1.0, epsabs=1e-14)
    assert mass == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(5)
    for _ in range(30):
        u, r, eps = rng.uniform(0.0, 2.0), rng.uniform(0.3, 3.0), rng.uniform(0.05, 1.0)
        f1 = model.f_eps(r**p.beta * u, eps, p)
        f2 = r ** (p.beta - 2.0) * model.f_eps(u, eps / r, p)
        assert abs(f1 - f2) <= 1e-12 * (1.0 + abs(f1))
    # plateau branch still exact above eps^beta
    assert model.f_eps(1.0, 0.5, p) == p.gamma * 1.0 ** (p.gamma - 1.0)
