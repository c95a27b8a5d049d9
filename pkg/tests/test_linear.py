"""Tests for linear stability: growth rates, unstable bands and measured rates."""
import math

import pytest

from ksforge.config import default_points
from ksforge.dynamics import SolverParams
from ksforge.linear import (
    CONTINUUM_K,
    fastest_mode,
    growth_rate,
    measure_growth_rate,
    unstable_modes,
)
from ksforge.spectral import Grid


def grid_for(L):
    return Grid(L, default_points(L))


class TestGrowthRate:

    def test_known_values(self):
        assert growth_rate(0.0) == 0.0
        assert growth_rate(1.0) == 0.0
        assert math.isclose(growth_rate(CONTINUUM_K), 0.25, rel_tol=1e-12)
        assert growth_rate(2.0) == -12.0

    def test_even_in_k(self):
        for k in (0.1, 0.5, 0.9, 1.3):
            assert growth_rate(-k) == growth_rate(k)


class TestUnstableModes:

    def test_reference_domain_has_thirty_modes(self):
        modes = unstable_modes(grid_for(32 * math.pi))

        assert len(modes) == 30
        assert sorted(m.n for m in modes) == [n for n in range(-15, 16) if n != 0]

    def test_matches_brute_force(self):
        grid = grid_for(32 * math.pi)
        expected = {
            n for n in range(-grid.N // 2 + 1, grid.N // 2)
            if n != 0 and growth_rate(2 * math.pi * n / grid.L) > 0
        }
        assert {m.n for m in unstable_modes(grid)} == expected

    def test_sorted_fastest_first(self):
        modes = unstable_modes(grid_for(32 * math.pi))
        rates = [m.rate for m in modes]

        assert rates == sorted(rates, reverse=True)
        assert [m.n for m in modes[:2]] == [11, -11]

    @pytest.mark.parametrize("L", [2 * math.pi, 4.0, 5.0])
    def test_small_domains_are_stable(self, L):
        assert unstable_modes(grid_for(L)) == []

    def test_count_grows_with_length(self):
        lengths = [2 * math.pi, 4.0, 10.0, 20.0, 32 * math.pi, 50.0 * math.pi / 2, 64 * math.pi]
        counts = [len(unstable_modes(grid_for(L))) for L in sorted(lengths)]

        assert counts == sorted(counts)
        assert counts[0] == 0


class TestFastestMode:

    def test_reference_domain(self):
        fastest = fastest_mode(grid_for(32 * math.pi))

        assert fastest.mode.n == 11
        assert math.isclose(fastest.mode.k, 11 / 16)
        assert fastest.mode.rate < 0.25

    def test_continuum_values(self):
        fastest = fastest_mode(grid_for(32 * math.pi))

        assert math.isclose(fastest.k_star, 1 / math.sqrt(2))
        assert fastest.rate_star == 0.25
        assert round(fastest.inverse_wavelength, 4) == 0.1125
        assert math.isclose(fastest.wavelength, 2**1.5 * math.pi)

    def test_wavelength_on_grid_reaches_quarter(self):
        L = 4 * 2**1.5 * math.pi
        fastest = fastest_mode(grid_for(L))

        assert fastest.mode.n == 4
        assert abs(fastest.mode.rate - 0.25) <= 1e-12


class TestMeasureGrowthRate:
    """Measured rates of a lone small mode in the nonlinear solver."""

    def test_unstable_band_at_reference_length(self):
        grid = grid_for(32 * math.pi)
        params = SolverParams(grid, dt=0.05, t_end=1.0)
        for mode in unstable_modes(grid):
            if mode.n < 0:
                continue
            measured = measure_growth_rate(params, mode.n, 1.0)
            assert abs(measured - mode.rate) <= 0.01 * mode.rate

    def test_decaying_mode(self):
        grid = grid_for(4.0)
        params = SolverParams(grid, dt=0.05, t_end=1.0)
        theory = growth_rate(2 * math.pi / 4.0)
        measured = measure_growth_rate(params, 1, 1.0)

        assert measured < 0
        assert abs(measured - theory) <= 0.01 * abs(theory)

    def test_marginal_mode(self):
        grid = grid_for(2 * math.pi)
        params = SolverParams(grid, dt=0.05, t_end=1.0)

        assert abs(measure_growth_rate(params, 1, 1.0)) <= 1e-4

    def test_rejects_unresolved_modes(self):
        grid = grid_for(32 * math.pi)
        params = SolverParams(grid, dt=0.05, t_end=1.0)
        with pytest.raises(ValueError, match="outside the resolved band"):
            measure_growth_rate(params, 0, 1.0)
        with pytest.raises(ValueError, match="outside the resolved band"):
            measure_growth_rate(params, grid.dealias_cutoff + 1, 1.0)

    def test_rejects_span_off_the_step_grid(self):
        params = SolverParams(grid_for(4.0), dt=0.05, t_end=1.0)
        with pytest.raises(ValueError, match="whole number of steps"):
            measure_growth_rate(params, 1, 1.01)
