import math

import numpy as np
import pytest

from fbplab import model, pde


@pytest.fixture(scope="module")
def params():
    return model.ModelParams(gamma=0.5)


@pytest.fixture(scope="module")
def grid():
    return pde.Grid("line_symmetric", 8.0, 256)


@pytest.fixture(scope="module")
def bump_traj(grid, params):
    spec = pde.EvolveSpec(grid=grid, params=params, eps=0.1, t_end=1.0,
                          bump=(0.0, 2.0, 2.0))
    return pde.evolve(spec)


class TestGrid:
    def test_invariants(self):
        with pytest.raises(ValueError):
            pde.Grid("line_symmetric", 8.0, 32)
        with pytest.raises(ValueError):
            pde.Grid("weird", 8.0, 128)
        with pytest.raises(ValueError):
            pde.Grid("radial", 8.0, 128, n=1)

    def test_weights_integrate_volume(self):
        g = pde.Grid("radial", 2.0, 128, n=3)
        # volume of the ball of radius 2 in R^3
        vol = np.sum(g.weights)
        assert vol == pytest.approx(4.0 / 3.0 * math.pi * 8.0, rel=1e-3)
        gl = pde.Grid("line_symmetric", 3.0, 128)
        assert np.sum(gl.weights) == pytest.approx(6.0, rel=1e-12)


class TestInitialBump:
    def test_center_value_and_support(self, grid):
        fld = pde.make_initial_bump(grid, 0.0, 2.0, 1.5)
        # first cell center sits dx/2 off the peak: O(dx^2) curvature deficit
        assert fld.values[0] == pytest.approx(1.5, rel=1e-3)
        assert np.all(fld.values[grid.x > 2.0] == 0.0)
        assert np.sum(fld.values * grid.weights) > 0.0

    def test_edge_smoothness(self, grid):
        # cubic vanishing: value and two finite-difference derivatives O(dx)
        fld = pde.make_initial_bump(grid, 0.0, 2.0, 1.0)
        i = np.searchsorted(grid.x, 2.0) - 1
        v = fld.values
        dx = grid.dx
        assert abs(v[i]) < 10 * dx**2
        assert abs((v[i] - v[i - 1]) / dx) < 10 * dx
        assert abs((v[i + 1] - 2 * v[i] + v[i - 1]) / dx**2) < 10.0 * dx

    def test_support_error(self, grid):
        with pytest.raises(pde.SupportError):
            pde.make_initial_bump(grid, 7.0, 2.0, 1.0)


class TestStep:
    def test_zero_fixed_point(self, grid, params):
        fld = pde.GridField(grid, 0.0, np.zeros(grid.m))
        out = pde.step(fld, 1e-4, 0.2, params)
        assert np.all(out.values == 0.0)

    def test_cfl_guard(self, grid, params):
        fld = pde.GridField(grid, 0.0, np.ones(grid.m))
        with pytest.raises(pde.CFLError):
            pde.step(fld, 1.0, 0.2, params)

    def test_flat_follows_reaction_ode(self, params):
        # interior cells follow d(u^(2-gamma))/dt = -gamma(2-gamma)
        g = pde.Grid("line_symmetric", 50.0, 256)
        fld = pde.GridField(g, 0.0, np.ones(g.m))
        dt = 1e-4
        out = pde.step(fld, dt, 0.2, params)
        interior = g.x < 10.0
        p = 2.0 - params.gamma
        got = out.values[interior] ** p
        expect = 1.0 - params.gamma * p * dt
        assert np.max(np.abs(got - expect)) < 5.0 * dt**2

    def test_comparison_principle(self, grid, params):
        rng = np.random.default_rng(77)
        for _ in range(50):
            base = rng.uniform(0.0, 1.5, size=grid.m)
            bumpup = base + rng.uniform(0.0, 0.5, size=grid.m)
            lo = pde.step(pde.GridField(grid, 0.0, base), 1e-4, 0.2, params)
            hi = pde.step(pde.GridField(grid, 0.0, bumpup), 1e-4, 0.2, params)
            assert np.all(lo.values <= hi.values + 1e-14)

    def test_positivity(self, grid, params):
        rng = np.random.default_rng(3)
        fld = pde.GridField(grid, 0.0, rng.uniform(0.0, 2.0, grid.m))
        out = fld
        for _ in range(20):
            out = pde.step(out, 1e-4, 0.1, params)
        assert np.all(out.values >= 0.0)

    def test_phillips_reaction_runs(self, grid, params):
        fld = pde.make_initial_bump(grid, 0.0, 2.0, 1.0)
        out = pde.step(fld, 1e-4, 0.2, params, reaction="phillips")
        assert np.all(out.values >= 0.0)
        assert out.values.max() <= 1.0


class TestEvolve:
    def test_linfty_bound(self, bump_traj):
        assert bump_traj.meta["sup_run"] <= bump_traj.meta["sup_initial"] * (1 + 1e-12)

    def test_snapshot_spacing(self, bump_traj):
        gaps = np.diff(bump_traj.times)
        assert np.all(gaps <= bump_traj.eps**2 * (1 + 1e-9))

    def test_clip_negligible(self, bump_traj):
        beta = bump_traj.params.beta
        assert np.max(bump_traj.energy_log["clip"]) <= 1e-12 * bump_traj.eps**beta

    def test_space_independent_oracle(self, params):
        g = pde.Grid("line_symmetric", 8.0, 256)
        t_end = 0.5
        traj = pde.evolve(pde.EvolveSpec(grid=g, params=params, eps=0.2,
                                         t_end=t_end, flat=1.0))
        p = 2.0 - params.gamma
        exact = (1.0 - params.gamma * p * t_end) ** (1.0 / p)
        interior = g.x <= 4.0
        assert np.max(np.abs(traj.snapshots[-1][interior] - exact)) <= 1e-4

    def test_spatial_convergence(self, params):
        # dt is tied to dx^2, so doubling m cuts the interior error ~4x
        errs = {}
        for m in [128, 256]:
            g = pde.Grid("line_symmetric", 8.0, m)
            traj = pde.evolve(pde.EvolveSpec(grid=g, params=params, eps=0.2,
                                             t_end=0.25, flat=1.0, dt=g.dx**2 / 4.0))
            p = 2.0 - params.gamma
            exact = (1.0 - params.gamma * p * 0.25) ** (1.0 / p)
            errs[m] = np.max(np.abs(traj.snapshots[-1][g.x <= 4.0] - exact))
        assert 2.5 <= errs[128] / errs[256] <= 6.0

    def test_radial_geometry_runs(self, params):
        g = pde.Grid("radial", 6.0, 128, n=3)
        traj = pde.evolve(pde.EvolveSpec(grid=g, params=params, eps=0.2,
                                         t_end=0.05, bump=(0.0, 2.0, 1.0)))
        assert np.all(traj.snapshots[-1] >= 0.0)
        assert traj.meta["sup_run"] <= 1.0 + 1e-12


class TestLevelSets:
    def test_zero_field_whole_domain(self, grid, params):
        fld = pde.GridField(grid, 0.0, np.zeros(grid.m))
        region = pde.level_set(fld, 1.0, 0.1, params.beta)
        assert region == [(0.0, grid.x_max)]

    def test_above_level_empty(self, grid, params):
        level = 2.0 * 0.1**params.beta
        fld = pde.GridField(grid, 0.0, np.full(grid.m, level))
        assert pde.level_set(fld, 1.0, 0.1, params.beta) == []

    def test_bump_complement(self, grid, params):
        fld = pde.make_initial_bump(grid, 0.0, 2.0, 2.0)
        region = pde.level_set(fld, 1.0, 0.1, params.beta)
        # early-time region is the complement of one interval around the bump
        assert len(region) == 1
        a, b = region[0]
        assert 1.5 < a < 2.0 and b == grid.x_max


class TestHausdorff:
    def test_identical(self):
        assert pde.hausdorff_distance([(0.0, 1.0)], [(0.0, 1.0)]) == 0.0

    def test_shifted(self):
        assert pde.hausdorff_distance([(0.0, 1.0)], [(0.5, 1.5)]) == 0.5

    def test_gap_midpoint_matters(self):
        # one interval vs a pair with a hole: deepest point is the hole center
        A = [(0.0, 4.0)]
        B = [(0.0, 1.0), (3.0, 4.0)]
        assert pde.hausdorff_distance(A, B) == 1.0

    def test_empty_convention(self):
        with pytest.warns(UserWarning):
            d = pde.hausdorff_distance([], [(0.0, 1.0)], domain_diameter=8.0)
        assert d == 8.0
        assert pde.hausdorff_distance([], []) == 0.0


class TestMonitors:
    def test_psi_on_initial_bump(self, grid, params):
        fld = pde.make_initial_bump(grid, 0.0, 2.0, 2.0)
        height, radius = 2.0, 2.0
        M = (6.0 * height / radius**2 + 1.0) ** 2
        sup_psi, sup_grad = pde.monitor_opt_reg_space(fld, 0.1, params, M)
        assert sup_psi <= 20.0 * (1.0 + M) * grid.dx**2
        assert sup_grad > 0.0

    def test_psi_zero_field(self, grid, params):
        fld = pde.GridField(grid, 0.0, np.zeros(grid.m))
        sup_psi, sup_grad = pde.monitor_opt_reg_space(fld, 0.1, params, 4.0)
        assert sup_psi == 0.0 and sup_grad == 0.0

    def test_grad_root_on_exact_profile(self, grid, params):
        # c_beta x^beta has |grad(u^(1/beta))|^2 = 2/beta^2 exactly on cells
        cb = model.wave_amplitude(params.beta)
        fld = pde.GridField(grid, 0.0, cb * grid.x**params.beta)
        _, sup_grad = pde.monitor_opt_reg_space(fld, 0.1, params, 4.0)
        interior_target = 2.0 / params.beta**2
        assert sup_grad == pytest.approx(interior_target, rel=1e-10)

    def test_time_regularity_flat_run(self, params):
        g = pde.Grid("line_symmetric", 8.0, 256)
        traj = pde.evolve(pde.EvolveSpec(grid=g, params=params, eps=0.2,
                                         t_end=0.5, flat=1.0))
        sup = pde.monitor_opt_reg_time(traj, (0.1, 0.4))
        assert sup == pytest.approx(params.gamma * (2.0 - params.gamma), rel=1e-3)

    def test_time_regularity_window_validation(self, bump_traj):
        with pytest.raises(ValueError):
            pde.monitor_opt_reg_time(bump_traj, (0.0, 0.5))

    def test_growth_nondeg_exact_profile_ratio(self, params):
        # at an interface point of c_beta x_+^beta the growth ratio is exactly
        # c_beta for every r (beta = 2/(2-gamma))
        cb = model.wave_amplitude(params.beta)
        g = pde.Grid("line_symmetric", 8.0, 1024)
        from fbplab import weiss

        traj = weiss.synthetic_trajectory(
            g, params, 0.05, lambda x, t: cb * x**params.beta,
            np.linspace(0.0, 1.0, 200),
        )
        power = 1.0 / (2.0 - params.gamma)
        for r in [0.1, 0.2, 0.4]:
            cells = g.x <= r
            sup = float(np.max(cb * g.x[cells] ** params.beta))
            ratio = sup / (r**2) ** power
            # discrete sup sits half a cell inside r: deficit O(beta dx / r)
            assert ratio <= cb * (1.0 + 1e-12)
            assert ratio >= cb * (1.0 - 2.0 * params.beta * g.dx / r)

    def test_growth_nondeg_on_run(self, bump_traj):
        table = pde.monitor_growth_nondeg(bump_traj, theta=1.0)
        assert table["growth_max_ratio"] > 0.0
        assert table["nondeg_min_ratio"] > 0.0
        assert len(table["growth"]) > 0 and len(table["nondeg"]) > 0


class TestEnergyReport:
    def test_zero_run(self, grid, params):
        traj = pde.evolve(pde.EvolveSpec(grid=grid, params=params, eps=0.2,
                                         t_end=0.01, flat=0.0))
        rep = pde.energy_report(traj)
        assert rep["dtu_sq_total"] == 0.0
        assert rep["max_u_sq"] == 0.0

    def test_bump_run_bounds(self, bump_traj):
        rep = pde.energy_report(bump_traj)
        assert rep["dissipation_ok"]
        assert rep["l2_decay_ok"]
        assert rep["linfty_ok"]


class TestEnvelopes:
    def test_barrier(self, bump_traj):
        rep = pde.barrier_envelope(bump_traj)
        assert rep["ok"], rep

    def test_gaussian(self, bump_traj):
        rep = pde.gaussian_envelope(bump_traj)
        assert rep["ok"], rep


class TestRadialScheme:
    def test_laplacian_exact_on_quadratics(self):
        # conservative shell-volume scheme reproduces Lap(r^2) = 2n exactly,
        # center cell included (boundary row carries the Dirichlet ghost)
        for n in [2, 3, 5]:
            g = pde.Grid("radial", 8.0, 256, n=n)
            lap = pde.apply_laplacian(g, g.x**2)
            assert np.max(np.abs(lap[:-1] - 2.0 * n)) < 1e-9

    def test_weights_ball_volume(self):
        g = pde.Grid("radial", 2.0, 128, n=3)
        assert np.sum(g.weights) == pytest.approx(4.0 / 3.0 * math.pi * 8.0, rel=1e-4)

    def test_stationary_cone_residual(self):
        # the amplitude [gamma/(beta(n+beta-2))]^(beta/2) balances the
        # discrete Laplacian against the reaction at gamma = 1
        p1 = model.ModelParams(gamma=1.0)
        g = pde.Grid("radial", 8.0, 256, n=3)
        c = model.radial_cone_amplitude(3, 0, p1)
        resid = pde.apply_laplacian(g, c * g.x**2)[:-1] - 1.0
        assert np.max(np.abs(resid)) < 1e-9


class TestMaxMonotone:
    def test_peak_decreases_in_time(self, bump_traj):
        peaks = bump_traj.snapshots.max(axis=1)
        assert np.all(np.diff(peaks) <= 1e-12 * peaks[0])


class TestPhillipsEvolve:
    def test_bump_run_bounds_with_phillips_reaction(self, grid, params):
        spec = pde.EvolveSpec(grid=grid, params=params, eps=0.1, t_end=0.5,
                              bump=(0.0, 2.0, 2.0), reaction="phillips")
        traj = pde.evolve(spec)
        rep = pde.energy_report(traj)
        assert rep["linfty_ok"] and rep["l2_decay_ok"]
        assert np.all(traj.snapshots >= 0.0)
