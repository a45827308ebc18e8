import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from milnecheck import GridMismatch
from milnecheck.ode import Grid, IntegratorConfig, Method, halvings, observed_order
from milnecheck.schrodinger import (
    ComplexWaveFunction,
    Constant,
    Free,
    Harmonic,
    KSquaredProfile,
    Linear,
    PhysicalParams,
    Provenance,
    Tabulated,
    fundamental_pair,
    k_squared,
    linear_residual,
    solve_linear,
    superpose,
    wronskian,
)

HARMONIC = k_squared(Harmonic(1.0), PhysicalParams(energy=0.5))
UNIT = KSquaredProfile.constant(1.0)

complex_ic = st.builds(
    lambda r, p: r * np.exp(1j * p), st.floats(0.5, 2.0), st.floats(0.0, 2 * np.pi)
)


def trig_pair(grid):
    x = grid.x
    return (ComplexWaveFunction(grid, np.cos(x), -np.sin(x)),
            ComplexWaveFunction(grid, np.sin(x), np.cos(x)))


class TestKSquared:
    def test_free(self):
        k2 = k_squared(Free(), PhysicalParams(energy=0.5))
        np.testing.assert_array_equal(k2(np.linspace(-3, 3, 7)), 1.0)
        assert k2.provenance is Provenance.POTENTIAL

    def test_harmonic(self):
        assert HARMONIC(0.0) == 1.0
        assert HARMONIC(1.0) == 0.0

    def test_linear(self):
        k2 = k_squared(Linear(1.0), PhysicalParams(energy=0.0))
        x = np.linspace(-2, 2, 9)
        np.testing.assert_array_equal(k2(x), -2 * x)

    def test_units_enter_as_2m_over_hbar_squared(self):
        k2 = k_squared(Constant(0.3), PhysicalParams(mass=2.0, hbar=0.5, energy=1.3))
        assert k2(0.7) == pytest.approx(2 * 2.0 * (1.3 - 0.3) / 0.25)

    def test_harmonic_mass_dependence(self):
        k2 = k_squared(Harmonic(2.0), PhysicalParams(mass=3.0, energy=1.0))
        assert k2(0.5) == pytest.approx(2 * 3.0 * (1.0 - 0.5 * 3.0 * 4.0 * 0.25))

    def test_tabulated_interpolates_linearly(self):
        g = Grid(0, 2, 3)
        pot = Tabulated(g, [0.0, 1.0, 4.0])
        k2 = k_squared(pot, PhysicalParams(energy=0.0))
        np.testing.assert_allclose(k2([0.5, 1.5]), [-1.0, -5.0])
        with pytest.raises(ValueError):
            k2(2.5)

    def test_tabulated_rejects_bad_samples(self):
        with pytest.raises(ValueError):
            Tabulated(Grid(0, 1, 3), [0.0, 1.0])
        with pytest.raises(ValueError):
            PhysicalParams(mass=0.0)

    def test_direct_scalar_evaluator_broadcasts(self):
        k2 = KSquaredProfile.direct(lambda x: 2.0)
        assert k2(np.zeros(4)).shape == (4,)


class TestSolveLinear:
    @pytest.mark.parametrize("method", list(Method))
    def test_plane_wave(self, method):
        g = Grid(0, np.pi, 2001)
        psi = solve_linear(UNIT, 1.0, 1j, g, IntegratorConfig(method))
        assert abs(psi.psi[-1] + 1) < 1e-8
        np.testing.assert_allclose(psi.psi, np.exp(1j * g.x), atol=1e-8)

    def test_cosine(self):
        g = Grid(0, 10, 2001)
        psi = solve_linear(UNIT, 1.0, 0.0, g)
        np.testing.assert_allclose(psi.psi.real, np.cos(g.x), atol=1e-8)
        assert psi.is_real()

    def test_harmonic_ground_state(self):
        # Gaussian data at the left edge, compared after normalising to the peak
        g = Grid(-5, 5, 4001)
        psi = solve_linear(HARMONIC, 1.0, 5.0, g)
        shape = psi.psi.real / psi.psi.real.max()
        np.testing.assert_allclose(shape, np.exp(-g.x**2 / 2), atol=1e-6)
        assert shape.min() > 0

    def test_rejects_zero_data(self):
        with pytest.raises(ValueError):
            solve_linear(UNIT, 0.0, 0.0, Grid(0, 1, 11))

    @settings(deadline=None, max_examples=20)
    @given(complex_ic, complex_ic, complex_ic, complex_ic)
    def test_superposition_principle(self, a, b, alpha, beta):
        g = Grid(-3, 3, 1001)
        y1 = solve_linear(HARMONIC, a, b, g)
        y2 = solve_linear(HARMONIC, b, a, g)
        both = solve_linear(HARMONIC, alpha * a + beta * b, alpha * b + beta * a, g)
        combo = superpose(y1, y2, alpha, beta)
        np.testing.assert_allclose(both.psi, combo.psi, rtol=0, atol=1e-9 * np.abs(combo.psi).max())

    def test_residual_fourth_order(self):
        k2 = k_squared(Harmonic(1.0), PhysicalParams(energy=8.0))
        steps, errs = [], []
        for g in halvings(Grid(-3, 3, 501), 3):
            psi = solve_linear(k2, 1.0, 1j, g)
            steps.append(g.h)
            errs.append(linear_residual(psi, k2).max_abs)
        assert observed_order(steps, errs) >= 3.5
        assert errs[-1] < 1e-6

    def test_tabulated_residual_within_relaxed_tolerance(self):
        table = Grid(-1, 1, 201)
        k2 = k_squared(Tabulated(table, 0.5 * table.x**2), PhysicalParams(energy=0.5))
        psi = solve_linear(k2, 1.0, 1j, Grid(-1, 1, 4001))
        assert linear_residual(psi, k2, 10 * 1e-6).passed


class TestWronskian:
    def test_cos_sin(self):
        f, g = trig_pair(Grid(0, 10, 1001))
        w = wronskian(f, g)
        assert w.max_deviation < 1e-9
        assert w.mean == pytest.approx(1.0)

    def test_self(self):
        f, _ = trig_pair(Grid(0, 10, 101))
        np.testing.assert_array_equal(wronskian(f, f).values, 0)

    def test_numeric_harmonic_pair_is_constant(self):
        f, g = fundamental_pair(HARMONIC, Grid(-3, 3, 2001))
        w = wronskian(f, g)
        assert w.max_deviation <= 1e-8 * abs(w.values[0])

    @settings(deadline=None, max_examples=20)
    @given(complex_ic, complex_ic, complex_ic, complex_ic)
    def test_abel_invariance(self, a, b, c, d):
        g = Grid(-3, 3, 2001)
        w = wronskian(solve_linear(HARMONIC, a, b, g), solve_linear(HARMONIC, c, d, g))
        assert np.abs(w.values - w.values[0]).max() <= 1e-7 * (1 + abs(w.values[0]))

    def test_grid_mismatch(self):
        f, _ = trig_pair(Grid(0, 1, 11))
        _, g = trig_pair(Grid(0, 1, 21))
        with pytest.raises(GridMismatch):
            wronskian(f, g)
        with pytest.raises(GridMismatch):
            superpose(f, g, 1, 1)


class TestSuperpose:
    def test_plane_wave_from_trig(self):
        grid = Grid(0, 5, 101)
        f, g = trig_pair(grid)
        psi = superpose(f, g, 1, 1j)
        np.testing.assert_allclose(psi.psi, np.exp(1j * grid.x), atol=1e-15)
        np.testing.assert_allclose(psi.psi_prime, 1j * np.exp(1j * grid.x), atol=1e-15)

    def test_identity(self):
        f, g = trig_pair(Grid(0, 5, 101))
        np.testing.assert_array_equal(superpose(f, g, 1, 0).psi, f.psi)

    def test_real_pair_gives_nodeless_psi(self):
        f, g = fundamental_pair(HARMONIC, Grid(-5, 5, 4001))
        assert np.abs(superpose(f, g, 1, 1j).psi).min() > 0

    def test_wave_function_validates(self):
        grid = Grid(0, 1, 5)
        with pytest.raises(ValueError):
            ComplexWaveFunction(grid, np.zeros(4), np.zeros(5))
        with pytest.raises(Exception):
            ComplexWaveFunction(grid, np.full(5, np.nan), np.zeros(5))
