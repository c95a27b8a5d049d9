"""
Tests for the ETDRK4 integrator and the Galilei group actions.

Validates:
- Solver parameter checks and blow-up detection
- Linear-regime accuracy and fourth-order convergence
- Mean conservation and decay on small domains
- The exact linear propagator
- Translation, reflection and Galilei-boost equivariance of the flow
"""
import math

import numpy as np
import pytest

from ksforge.dynamics import (
    BlowUpError,
    SolverParams,
    Trajectory,
    boost,
    evolve,
    ks_step,
    linear_evolve_exact,
    linear_symbol,
    random_initial,
    reflect,
    translate,
    zero_initial,
)
from ksforge.spectral import (
    Grid,
    RealField,
    SpectralField,
    dealias,
    project_zero_mean,
    to_real,
    to_spectral,
)


@pytest.fixture
def grid128():
    return Grid(32 * math.pi, 128)


class TestSolverParams:
    """Test suite for SolverParams validation."""

    def test_step_counts(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=80.0, save_stride=5)
        assert params.n_steps == 1600
        assert math.isclose(params.save_interval, 0.25)

    def test_rejects_large_dt(self, grid128):
        with pytest.raises(ValueError, match="dt must lie"):
            SolverParams(grid128, dt=0.6, t_end=6.0)
        with pytest.raises(ValueError, match="dt must lie"):
            SolverParams(grid128, dt=0.0, t_end=6.0)

    def test_rejects_fractional_step_count(self, grid128):
        with pytest.raises(ValueError, match="whole number of steps"):
            SolverParams(grid128, dt=0.05, t_end=0.07)

    def test_rejects_stride_not_dividing_steps(self, grid128):
        with pytest.raises(ValueError, match="multiple of save_stride"):
            SolverParams(grid128, dt=0.05, t_end=1.0, save_stride=3)

    def test_rejects_non_positive_end(self, grid128):
        with pytest.raises(ValueError, match="t_end must be positive"):
            SolverParams(grid128, dt=0.05, t_end=0.0)


class TestKsStep:
    """Test suite for a single ETDRK4 step."""

    def test_zero_is_a_fixed_point(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=0.05)
        state = ks_step(SpectralField.zeros(grid128), params)
        assert np.all(state.coeffs == 0)

    def test_small_mode_follows_linear_theory(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=0.05)
        coeffs = np.zeros(65, dtype=np.complex128)
        coeffs[4] = 1e-10
        state = ks_step(SpectralField(grid128, coeffs), params)
        expected = 1e-10 * math.exp(linear_symbol(grid128)[4] * 0.05)

        assert abs(state.coeffs[4] - expected) <= 1e-6 * expected

    def test_output_is_dealiased_and_zero_mean(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=0.05)
        state = to_spectral(random_initial(grid128, 7))
        after = ks_step(state, params)

        assert after.coeffs[0] == 0
        assert np.all(after.coeffs[~grid128.dealias_mask] == 0)

    def test_fourth_order_convergence(self, grid128):
        x = grid128.x
        initial = RealField(grid128, np.cos(x / 16) * (1 + np.sin(x / 16)))

        def final_state(dt):
            params = SolverParams(grid128, dt=dt, t_end=20.0, save_stride=int(round(20.0 / dt)))
            return evolve(initial, params).values[-1]

        reference = final_state(0.0125)
        coarse = np.max(np.abs(final_state(0.4) - reference))
        fine = np.max(np.abs(final_state(0.2) - reference))

        assert math.log2(coarse / fine) >= 3.5

    def test_blow_up_is_reported(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=0.05)
        coeffs = np.zeros(65, dtype=np.complex128)
        coeffs[1] = 1e9
        with pytest.raises(BlowUpError) as excinfo:
            ks_step(SpectralField(grid128, coeffs), params, step=1)

        assert excinfo.value.step == 1
        assert excinfo.value.magnitude > 1e8

    def test_rejects_mismatched_grid(self, grid128):
        params = SolverParams(Grid(10.0, 32), dt=0.05, t_end=0.05)
        with pytest.raises(ValueError, match="different grids"):
            ks_step(SpectralField.zeros(grid128), params)


class TestEvolve:
    """Test suite for full trajectories."""

    def test_zero_initial_stays_zero(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=2.0, save_stride=10)
        trajectory = evolve(zero_initial(grid128), params)

        assert len(trajectory) == 5
        assert np.all(trajectory.values == 0)

    def test_snapshot_times(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=2.0, save_stride=10)
        trajectory = evolve(random_initial(grid128, 1), params)

        assert np.allclose(trajectory.times, [0.0, 0.5, 1.0, 1.5, 2.0])

    def test_mean_is_conserved(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=20.0, save_stride=10)
        trajectory = evolve(random_initial(grid128, 3), params)

        assert np.max(np.abs(trajectory.means())) <= 1e-10

    def test_small_domain_decays(self):
        grid = Grid(4.0, 16)
        params = SolverParams(grid, dt=0.05, t_end=20.0, save_stride=20)
        trajectory = evolve(random_initial(grid, 11), params)

        assert trajectory.max_norms()[-1] <= 1e-12

    def test_repeated_runs_are_identical(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=5.0, save_stride=10)
        first = evolve(random_initial(grid128, 2021), params)
        second = evolve(random_initial(grid128, 2021), params)

        assert np.array_equal(first.values, second.values)

    def test_different_seeds_differ(self, grid128):
        assert not np.array_equal(random_initial(grid128, 1).values, random_initial(grid128, 2).values)


class TestTrajectory:
    """Test suite for Trajectory bookkeeping."""

    def test_rejects_unordered_times(self, grid128):
        with pytest.raises(ValueError, match="strictly increasing"):
            Trajectory(grid128, [0.0, 1.0, 1.0], np.zeros((3, 128)))

    def test_rejects_shape_mismatch(self, grid128):
        with pytest.raises(ValueError):
            Trajectory(grid128, [0.0, 1.0], np.zeros((3, 128)))

    def test_norms_and_means(self, grid128):
        values = np.zeros((2, 128))
        values[1, 3] = -2.0
        trajectory = Trajectory(grid128, [0.0, 1.0], values)

        assert np.array_equal(trajectory.max_norms(), [0.0, 2.0])
        assert np.allclose(trajectory.means(), [0.0, -2.0 / 128])


class TestLinearEvolveExact:
    """Test suite for the exact linear propagator."""

    def test_zero_time_is_identity(self, grid128):
        s = to_spectral(random_initial(grid128, 5))
        assert np.array_equal(linear_evolve_exact(s, 0.0).coeffs, s.coeffs)

    def test_marginal_mode_is_unchanged(self):
        grid = Grid(2 * math.pi, 16)
        u = RealField(grid, np.sin(grid.x))
        evolved = to_real(linear_evolve_exact(to_spectral(u), 10.0))

        assert np.allclose(evolved.values, u.values, atol=1e-14)

    def test_growing_mode(self, grid128):
        k = 2 * math.pi * 4 / grid128.L
        u = RealField(grid128, np.cos(k * grid128.x))
        evolved = to_real(linear_evolve_exact(to_spectral(u), 10.0))
        expected = math.exp((k**2 - k**4) * 10.0) * np.cos(k * grid128.x)

        assert np.allclose(evolved.values, expected, rtol=0, atol=1e-12)

    def test_backward_overflow_raises(self):
        grid = Grid(32 * math.pi, 64)
        coeffs = np.zeros(33, dtype=np.complex128)
        coeffs[30] = 1.0
        with pytest.raises(OverflowError):
            linear_evolve_exact(SpectralField(grid, coeffs), -100.0)

    def test_backward_evolution_warns(self, grid128, capsys):
        coeffs = np.zeros(65, dtype=np.complex128)
        coeffs[2] = 1.0
        linear_evolve_exact(SpectralField(grid128, coeffs), -1.0)

        assert "Warning" in capsys.readouterr().out


class TestGroupActions:
    """Test suite for translate, boost and reflect."""

    def test_zero_boost_is_identity(self, grid128):
        u = random_initial(grid128, 4)
        assert np.allclose(boost(u, 0.0, 5.0).values, u.values, atol=1e-14)

    def test_boost_at_time_zero_adds_velocity(self, grid128):
        u = random_initial(grid128, 4)
        assert np.allclose(boost(u, 3.0, 0.0).values, u.values + 3.0, atol=1e-14)

    def test_boost_shifts_mean(self, grid128):
        u = random_initial(grid128, 4)
        assert math.isclose(boost(u, 0.5, 2.0).mean(), u.mean() + 0.5, abs_tol=1e-13)

    def test_translate_by_one_cell_rotates_samples(self, grid128):
        u = random_initial(grid128, 4)
        shifted = translate(u, grid128.dx)

        assert np.allclose(shifted.values, np.roll(u.values, 1), atol=1e-13)

    def test_translate_by_period_is_identity(self, grid128):
        u = random_initial(grid128, 4)
        assert np.allclose(translate(u, grid128.L).values, u.values, atol=1e-12)

    def test_reflect_is_an_involution(self, grid128):
        u = random_initial(grid128, 4)
        assert np.array_equal(reflect(reflect(u)).values, u.values)

    def test_reflect_fixes_sine_and_negates_cosine(self, grid128):
        k = 2 * math.pi / grid128.L
        sine = RealField(grid128, np.sin(k * grid128.x))
        cosine = RealField(grid128, np.cos(k * grid128.x))

        assert np.allclose(reflect(sine).values, sine.values, atol=1e-13)
        assert np.allclose(reflect(cosine).values, -cosine.values, atol=1e-13)


class TestEquivariance:
    """The flow commutes with the symmetry group up to integration error."""

    @pytest.fixture
    def params(self, grid128):
        return SolverParams(grid128, dt=0.05, t_end=10.0, save_stride=20)

    def test_reflection(self, grid128, params):
        u0 = random_initial(grid128, 99)
        direct = evolve(u0, params)
        mirrored = evolve(reflect(u0), params)
        scale = u0.max_norm()

        for i in range(len(direct)):
            expected = reflect(direct.snapshot(i)).values
            assert np.max(np.abs(mirrored.values[i] - expected)) <= 1e-6 * scale

    def test_translation(self, grid128, params):
        u0 = random_initial(grid128, 99)
        a = 7 * grid128.dx
        direct = evolve(u0, params)
        shifted = evolve(translate(u0, a), params)
        scale = u0.max_norm()

        for i in range(len(direct)):
            expected = translate(direct.snapshot(i), a).values
            assert np.max(np.abs(shifted.values[i] - expected)) <= 1e-6 * scale

    def test_galilei_boost(self, grid128):
        params = SolverParams(grid128, dt=0.05, t_end=10.0, save_stride=200, project_mean=False)
        u0 = to_real(dealias(project_zero_mean(to_spectral(random_initial(grid128, 99)))))
        v = 2 * grid128.dx / 10.0

        plain = evolve(u0, params).snapshot(-1)
        moving = evolve(RealField(grid128, u0.values + v), params).values[-1]
        expected = boost(plain, v, 10.0).values

        assert np.max(np.abs(moving - expected)) <= 1e-5 * max(plain.max_norm(), 1.0)
