import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from milnecheck import AmplitudeCollapse, DegeneratePair, GridMismatch, NodeEncountered, PhaseUnresolved
from milnecheck.milne import (
    MilneSolution,
    PhaseFunction,
    PolarTriple,
    amplitude_from_pair,
    compose_psi,
    consistent_triple,
    evaluate_K,
    integrate_phase,
    milne_residual,
    polar_decompose,
    polar_equation_residuals,
    solve_milne,
    unwrap_phase,
    wronskian_identity_residual,
)
from milnecheck.ode import Grid, IntegratorConfig, Method, halvings, observed_order
from milnecheck.schrodinger import (
    ComplexWaveFunction,
    Harmonic,
    KSquaredProfile,
    PhysicalParams,
    fundamental_pair,
    k_squared,
    linear_residual,
    solve_linear,
)

UNIT = KSquaredProfile.constant(1.0)
HARMONIC = k_squared(Harmonic(1.0), PhysicalParams(energy=0.5))


def wave(grid, psi, dpsi):
    return ComplexWaveFunction(grid, psi, dpsi)


def trig(grid, a=1.0, b=1.0):
    """Real solutions a*cos and b*sin of psi'' + psi = 0."""
    x = grid.x
    return wave(grid, a * np.cos(x), -a * np.sin(x)), wave(grid, b * np.sin(x), b * np.cos(x))


def harmonic_triple(N=1.0):
    f, g = fundamental_pair(HARMONIC, Grid(-3, 3, 4001))
    amp = amplitude_from_pair(f, g, N)
    return PolarTriple(N, amp, integrate_phase(amp, 0.0))


def wkb_harmonic(grid, energy=18.0):
    """Harmonic-oscillator psi whose data at the left edge match the local plane wave."""
    k2 = k_squared(Harmonic(1.0), PhysicalParams(energy=energy))
    k0 = np.sqrt(k2(grid.x_start))
    return k2, solve_linear(k2, k0**-0.5, 1j * k0**0.5, grid)


class TestSolveMilne:
    def test_unit_fixed_point(self):
        amp = solve_milne(UNIT, 1.0, 1.0, 0.0, Grid(0, 10, 401))
        np.testing.assert_array_equal(amp.u, 1.0)

    def test_fixed_point_u4_equals_c2_over_k2(self):
        u0 = np.sqrt(0.5)
        amp = solve_milne(KSquaredProfile.constant(4.0), 1.0, u0, 0.0, Grid(0, 10, 4001))
        assert np.abs(amp.u - u0).max() <= 1e-10

    def test_oscillatory_solution(self):
        g = Grid(0, 10, 8001)
        amp = solve_milne(UNIT, 1.0, 2.0, 0.0, g)
        assert amp.u.min() > 0
        assert milne_residual(amp, UNIT).max_abs < 1e-7
        # closed form: |2 cos x + (i/2) sin x|
        exact = np.sqrt(4 * np.cos(g.x) ** 2 + 0.25 * np.sin(g.x) ** 2)
        assert np.abs(amp.u - exact).max() < 1e-7

    def test_matches_amplitude_of_linear_pair(self):
        g = Grid(0, 10, 4001)
        u0, du0, c = 2.0, 0.3, 1.0
        f = solve_linear(UNIT, u0, du0, g)
        h = solve_linear(UNIT, 0.0, c / u0, g)
        pair = amplitude_from_pair(f, h)
        amp = solve_milne(UNIT, c, u0, du0, g)
        assert pair.c == pytest.approx(c)
        assert np.abs(amp.u - pair.u).max() < 1e-7

    def test_harmonic_matches_pair(self):
        t = harmonic_triple()
        amp = solve_milne(HARMONIC, t.c, t.amp.u[0], t.amp.u_prime[0], t.grid)
        assert np.abs(amp.u - t.amp.u).max() < 1e-7

    def test_residual_fourth_order(self):
        steps, errs = [], []
        for g in halvings(Grid(0, 10, 1001), 3):
            steps.append(g.h)
            errs.append(milne_residual(solve_milne(UNIT, 1.0, 2.0, 0.0, g), UNIT).max_abs)
        assert 3.5 <= observed_order(steps, errs) <= 4.5

    @pytest.mark.parametrize("method", list(Method))
    def test_collapse_when_c_is_zero(self, method):
        with pytest.raises(AmplitudeCollapse):
            solve_milne(UNIT, 0.0, 1.0, 0.0, Grid(0, 5, 501), IntegratorConfig(method))

    def test_adaptive_agrees(self):
        g = Grid(0, 10, 2001)
        fixed = solve_milne(UNIT, 1.0, 2.0, 0.0, g)
        adaptive = solve_milne(UNIT, 1.0, 2.0, 0.0, g, IntegratorConfig(Method.DOPRI45))
        assert np.abs(fixed.u - adaptive.u).max() < 1e-7

    def test_requires_positive_start(self):
        with pytest.raises(ValueError):
            solve_milne(UNIT, 1.0, 0.0, 0.0, Grid(0, 1, 11))

    def test_type_rejects_nonpositive_amplitude(self):
        g = Grid(0, 1, 3)
        with pytest.raises(AmplitudeCollapse):
            MilneSolution(g, [1.0, 0.0, 1.0], [0.0, 0.0, 0.0], 1.0)


class TestAmplitudeFromPair:
    def test_cos_sin(self):
        amp = amplitude_from_pair(*trig(Grid(0, 10, 1001)))
        np.testing.assert_allclose(amp.u, 1.0, atol=1e-15)
        assert amp.c == pytest.approx(1.0)

    def test_cos_two_sin(self):
        g = Grid(0, 10, 4001)
        amp = amplitude_from_pair(*trig(g, 1.0, 2.0))
        np.testing.assert_allclose(amp.u, np.sqrt(np.cos(g.x) ** 2 + 4 * np.sin(g.x) ** 2), rtol=1e-15)
        assert amp.c == pytest.approx(2.0)
        assert milne_residual(amp, UNIT).max_abs < 1e-7

    def test_proportional_pair(self):
        f, _ = trig(Grid(0, 10, 101))
        with pytest.raises(DegeneratePair):
            amplitude_from_pair(f, f)

    def test_normalisation_scales_u_and_c(self):
        g = Grid(0, 10, 101)
        amp = amplitude_from_pair(*trig(g, 1.0, 2.0), N=2.0)
        np.testing.assert_allclose(amp.u, np.sqrt(np.cos(g.x) ** 2 + 4 * np.sin(g.x) ** 2) / 2)
        assert amp.c == pytest.approx(0.5)

    def test_rejects_complex_input(self):
        g = Grid(0, 1, 11)
        z = wave(g, np.exp(1j * g.x), 1j * np.exp(1j * g.x))
        with pytest.raises(ValueError):
            amplitude_from_pair(z, z)


class TestIntegratePhase:
    def test_linear_phase(self):
        g = Grid(0, 10, 101)
        amp = MilneSolution(g, np.ones(101), np.zeros(101), 1.0)
        ph = integrate_phase(amp, 0.0)
        np.testing.assert_allclose(ph.S, g.x, atol=1e-13)

    def test_zero_c_gives_constant(self):
        g = Grid(0, 10, 101)
        amp = MilneSolution(g, 1 + 0.5 * np.sin(g.x), 0.5 * np.cos(g.x), 0.0)
        np.testing.assert_array_equal(integrate_phase(amp, 0.7).S, 0.7)

    def test_matches_unwrapped_argument(self):
        g = Grid(0, 10, 4001)
        f, h = trig(g, 1.0, 2.0)
        ph = integrate_phase(amplitude_from_pair(f, h), 0.0)
        # independent route: numpy's unwrap of the principal argument of f + i h
        oracle = np.unwrap(np.angle(f.psi.real + 1j * h.psi.real))
        assert np.abs(ph.S - oracle).max() < 1e-8
        np.testing.assert_allclose(ph.S_prime, 2.0 / (np.cos(g.x) ** 2 + 4 * np.sin(g.x) ** 2), rtol=1e-15)

    @settings(deadline=None, max_examples=25)
    @given(st.floats(0.2, 3.0), st.booleans(), st.floats(0.5, 2.0), st.floats(-1.0, 1.0))
    def test_monotone_with_sign_of_c(self, size, negative, u0, du0):
        # |c| >= 0.2 keeps the turn near the amplitude minimum (scale u_min^2/|c|) resolved by h
        c = -size if negative else size
        g = Grid(0, 5, 1001)
        ph = integrate_phase(solve_milne(UNIT, c, u0, du0, g), 0.0)
        steps = np.diff(ph.S)
        assert np.all(steps > 0) if c > 0 else np.all(steps < 0)


class TestComposeDecompose:
    def test_plane_wave(self):
        g = Grid(0, 5, 51)
        t = PolarTriple(1.0, MilneSolution(g, np.ones(51), np.zeros(51), 1.0), PhaseFunction(g, g.x, np.ones(51)))
        psi = compose_psi(t)
        np.testing.assert_allclose(psi.psi, np.exp(1j * g.x), atol=1e-15)
        np.testing.assert_allclose(psi.psi_prime, 1j * np.exp(1j * g.x), atol=1e-15)

    def test_constant(self):
        g = Grid(0, 5, 51)
        t = PolarTriple(2.0, MilneSolution(g, np.ones(51), np.zeros(51), 0.0), PhaseFunction(g, np.zeros(51), np.zeros(51)))
        np.testing.assert_array_equal(compose_psi(t).psi, 2.0)

    def test_harmonic_triple_solves_linear_equation(self):
        psi = compose_psi(harmonic_triple())
        assert linear_residual(psi, HARMONIC).max_abs < 1e-7

    def test_decompose_plane_wave(self):
        g = Grid(0, 20, 2001)
        t = polar_decompose(wave(g, np.exp(1j * g.x), 1j * np.exp(1j * g.x)))
        np.testing.assert_allclose(t.amp.u, 1.0)
        np.testing.assert_allclose(t.phase.S, g.x, atol=1e-12)
        assert t.c == pytest.approx(1.0)

    def test_decompose_rejects_nodes(self):
        g = Grid(0, 5, 51)
        with pytest.raises(NodeEncountered):
            polar_decompose(wave(g, np.sin(g.x), np.cos(g.x)))

    def test_decompose_matches_pair(self):
        g = Grid(0, 10, 4001)
        f, h = trig(g, 1.0, 2.0)
        t = polar_decompose(wave(g, f.psi + 1j * h.psi, f.psi_prime + 1j * h.psi_prime))
        pair = amplitude_from_pair(f, h)
        assert np.abs(t.amp.u - pair.u).max() < 1e-9
        assert t.c == pytest.approx(2.0, rel=1e-12)

    def test_start_phase_in_principal_range(self):
        g = Grid(0, 1, 11)
        t = polar_decompose(wave(g, -np.exp(1j * g.x) + 0j, -1j * np.exp(1j * g.x)))
        assert t.phase.S[0] == pytest.approx(np.pi)
        z = np.full(11, complex(-1.0, -0.0))
        assert unwrap_phase(z, np.zeros(11), 0.1)[0] == np.pi

    def test_coarse_grid_is_rejected(self):
        g = Grid(0, 10, 101)
        k = 40.0
        with pytest.raises(PhaseUnresolved):
            polar_decompose(wave(g, np.exp(1j * k * g.x), 1j * k * np.exp(1j * k * g.x)))

    @settings(deadline=None, max_examples=20)
    @given(st.floats(0.5, 2.0), st.floats(0, 2 * np.pi), st.floats(0.5, 2.0), st.floats(0, 2 * np.pi),
           st.floats(0.5, 3.0))
    def test_round_trip(self, r0, p0, r1, p1, N):
        # the Wronskian of (Re psi, Im psi) is r0 r1 sin(p1 - p0); keep it away from zero
        assume(abs(np.sin(p1 - p0)) > 0.2)
        g = Grid(-3, 3, 1001)
        psi = solve_linear(HARMONIC, r0 * np.exp(1j * p0), r1 * np.exp(1j * p1), g)
        t = consistent_triple(psi, N)
        back = polar_decompose(compose_psi(t), N)
        np.testing.assert_allclose(back.amp.u, t.amp.u, rtol=1e-9)
        np.testing.assert_allclose(back.phase.S, t.phase.S, rtol=0, atol=1e-9 * max(1, np.abs(t.phase.S).max()))
        assert back.c == pytest.approx(t.c, rel=1e-9)
        assert t.compatibility().passed


class TestK:
    def test_exact_cancellation_for_plane_wave(self):
        g = Grid(0, 5, 51)
        psi = wave(g, np.exp(1j * g.x), 1j * np.exp(1j * g.x))
        K = evaluate_K(psi, MilneSolution(g, np.ones(51), np.zeros(51), 1.0))
        assert np.abs(K.values).max() <= 4 * np.finfo(float).eps
        np.testing.assert_allclose(np.abs(K.phase_term), 1.0)
        np.testing.assert_allclose(np.abs(K.wronskian_term), 1.0)
        assert K.report.passed

    @pytest.mark.parametrize("N", [1.0, 2.5])
    def test_consistent_harmonic_triple(self, N):
        t = harmonic_triple(N)
        K = evaluate_K(compose_psi(t), t.amp, N)
        assert K.report.passed
        assert K.report.max_abs < 1e-7 * t.c**2 * N**2
        assert np.abs(K.phase_term).max() == pytest.approx(t.c**2 * N**2, abs=1e-9)

    def test_rescaled_amplitude_is_still_consistent(self):
        # u = sqrt(2)|psi| with c = 2 is the triple N = 1/sqrt(2): K stays zero
        g = Grid(0, 5, 51)
        psi = wave(g, np.exp(1j * g.x), 1j * np.exp(1j * g.x))
        amp = solve_milne(UNIT, 2.0, np.sqrt(2), 0.0, g)
        K = evaluate_K(psi, amp)
        assert np.abs(K.values).max() < 1e-12

    def test_mismatched_c_is_detected(self):
        t = harmonic_triple()
        psi = compose_psi(t)
        wrong = solve_milne(HARMONIC, 2 * t.c, t.amp.u[0], t.amp.u_prime[0], t.grid)
        K = evaluate_K(psi, wrong)
        assert not K.report.passed
        assert np.abs(K.values).max() > 1e-2 * wrong.c**2
        # at the shared starting point |K| = |(2c)^2 - c^2| exactly
        assert abs(K.values[0]) == pytest.approx(3 * t.c**2)

    def test_grid_mismatch(self):
        t = harmonic_triple()
        with pytest.raises(GridMismatch):
            evaluate_K(wave(Grid(0, 1, 5), np.ones(5), np.zeros(5)), t.amp)

    def test_rounding_floor_tracks_cancellation(self):
        t = harmonic_triple()
        K = evaluate_K(compose_psi(t), t.amp)
        assert K.report.max_abs <= 10 * K.rounding_floor + 1e-300


class TestResiduals:
    def test_wronskian_identity_plane_wave(self):
        g = Grid(0, 5, 51)
        t = PolarTriple(1.0, MilneSolution(g, np.ones(51), np.zeros(51), 1.0), PhaseFunction(g, g.x, np.ones(51)))
        r = wronskian_identity_residual(t, compose_psi(t))
        assert r.max_abs == 0

    def test_wronskian_identity_real_case(self):
        g = Grid(0, 1, 51)
        u = 1 + g.x**2
        t = PolarTriple(1.0, MilneSolution(g, u, 2 * g.x, 0.0), PhaseFunction(g, np.zeros(51), np.zeros(51)))
        r = wronskian_identity_residual(t, wave(g, u, 2 * g.x))
        assert r.max_abs == 0 and r.passed

    def test_wronskian_identity_harmonic(self):
        t = harmonic_triple()
        assert wronskian_identity_residual(t, compose_psi(t)).max_abs < 1e-8 * abs(t.c)

    def test_wronskian_identity_against_integrated_psi(self):
        # the solver's own psi, not the recomposed one
        g = Grid(-3, 3, 4001)
        psi = solve_linear(HARMONIC, 1.0, 1j, g)
        t = consistent_triple(psi)
        assert wronskian_identity_residual(t, psi, rtol=1e-7).passed

    def test_polar_plane_wave_exact(self):
        g = Grid(0, 5, 51)
        t = PolarTriple(1.0, MilneSolution(g, np.ones(51), np.zeros(51), 1.0), PhaseFunction(g, g.x, np.ones(51)))
        a, p = polar_equation_residuals(t, UNIT)
        assert a.max_abs == 0 and p.max_abs < 1e-14

    def test_polar_real_case(self):
        g = Grid(0, 10, 2001)
        t = PolarTriple(1.0, MilneSolution(g, 2 + np.cos(g.x), -np.sin(g.x), 0.0),
                        PhaseFunction(g, np.full(2001, 0.3), np.zeros(2001)))
        a, p = polar_equation_residuals(t, UNIT)
        assert p.max_abs == 0
        # amplitude equation is then psi'' + k^2 psi for psi = u, which 2 + cos x does not solve
        assert a.max_abs == pytest.approx(2.0, rel=1e-6)

    def test_polar_harmonic_converges(self):
        steps, amp_err, ph_err = [], [], []
        for g in halvings(Grid(-5, 5, 501), 3):
            k2, psi = wkb_harmonic(g)
            a, p = polar_equation_residuals(consistent_triple(psi), k2)
            steps.append(g.h)
            amp_err.append(a.max_abs)
            ph_err.append(p.max_abs)
        assert amp_err[-1] < 1e-6 and ph_err[-1] < 1e-6
        assert observed_order(steps, amp_err) >= 3.5
        assert observed_order(steps, ph_err) >= 3.5

    def test_flux_identity(self):
        t = harmonic_triple()
        flux = t.amp.u**2 * t.phase.S_prime
        assert np.abs(flux - t.c).max() <= 1e-9 * abs(t.c)
