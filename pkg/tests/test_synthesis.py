import io
import math

import numpy as np
import pytest

from recursive_drag.errors import ConfigError, PulseDomainError, SingularParameterError, SynthesisInfeasibleError
from recursive_drag.pulse import (
    DerivativeMethod,
    DetuningMode,
    Envelope,
    EnvelopeKind,
    PrefactorSet,
    PulseFamily,
    PulseRecipe,
    SuperlinearPath,
    TminKind,
    apply_prefactors,
    check_boundary,
    rotation_angle,
    superlinear_correct,
    synth_drag,
    synth_r1d,
    synth_r2d,
    tmin,
)
from recursive_drag.pulse.synthesis import Constant, SuperlinearTerms, Zero

T = 10.0
INTERIOR = np.linspace(0.05 * T, 0.95 * T, 37)


class TestDrag:
    def test_no_quadrature_at_peak(self, hann_pi, delta2):
        wave = synth_drag(hann_pi(T), delta2, detuning=DetuningMode.NONE)
        assert wave.omega_y.jet(T / 2, 0)[0] == pytest.approx(0.0, abs=1e-15)
        assert wave.delta.jet(T / 2, 0)[0] == 0.0

    def test_quadrature_peak(self, hann_pi, delta2):
        base = hann_pi(T)
        wave = synth_drag(base, delta2, detuning=DetuningMode.NONE)
        _, omega_y, _ = wave.sample(np.linspace(0.0, T, 4001))
        expected = base.amplitude * math.pi / (T * abs(delta2))
        assert np.max(np.abs(omega_y)) == pytest.approx(expected, rel=1e-12)

    def test_quadrature_is_scaled_derivative(self, hann_pi, delta2):
        base = hann_pi(T)
        wave = synth_drag(base, delta2, alpha=1.2, detuning=DetuningMode.NONE)
        np.testing.assert_allclose(wave.omega_y.jet(INTERIOR, 0)[0], -1.2 * base.eval(INTERIOR, 1) / delta2)

    def test_stark_detuning_is_positive_bump(self, hann_pi, delta2):
        base = hann_pi(T)
        wave = synth_drag(base, delta2)
        expected = -base.eval(INTERIOR) ** 2 / (2 * delta2)
        np.testing.assert_allclose(wave.delta.jet(INTERIOR, 0)[0], expected)
        assert np.all(expected > 0)

    def test_constant_detuning(self, hann_pi, delta2):
        wave = synth_drag(hann_pi(T), delta2, detuning=DetuningMode.CONSTANT, delta_c=0.05)
        np.testing.assert_allclose(wave.sample(INTERIOR)[2], 0.05)

    def test_constant_detuning_needs_value(self, hann_pi, delta2):
        with pytest.raises(ConfigError):
            synth_drag(hann_pi(T), delta2, detuning=DetuningMode.CONSTANT)

    def test_harmonic_ladder_rejected(self, hann_pi):
        with pytest.raises(SingularParameterError):
            synth_drag(hann_pi(T), 0.0)


class TestRecursion:
    def test_r1d_midpoint_oracle(self, delta2):
        duration = 8.0
        wave = synth_r1d(Envelope.sin_pow(3, 1.0, duration), delta2)
        w = math.pi / duration
        # sin^3 at its peak: f = 1, f' = 0, f'' = -3 w^2
        assert wave.jet(duration / 2, 0)[0] == pytest.approx(math.sqrt(1 - 6 * w**2 / delta2**2), rel=1e-12)

    def test_r1d_adds_area(self, delta2):
        base = Envelope.sin_pow(3, 1.0, 8.0)
        assert rotation_angle(synth_r1d(base, delta2)) > rotation_angle(base)

    def test_r1d_large_anharmonicity_limit(self, delta2):
        base = Envelope.sin_pow(3, 1.0, T)
        wave = synth_r1d(base, 1e6 * delta2)
        np.testing.assert_allclose(wave.jet(INTERIOR, 0)[0], base.eval(INTERIOR), rtol=1e-6)

    def test_r1d_below_minimum_time(self, delta2):
        with pytest.raises(SynthesisInfeasibleError) as info:
            synth_r1d(Envelope.sin_pow(3, 1.0, 5.0), delta2)
        assert info.value.level == "r1d"
        assert 0.0 <= info.value.worst_time <= 5.0

    def test_r1d_derivatives_match_finite_differences(self, delta2):
        wave = synth_r1d(Envelope.sin_pow(3, 1.0, T), delta2)
        step = T * 1e-5
        for order in (1, 2):
            expected = (wave.jet(INTERIOR + step, order - 1)[-1] - wave.jet(INTERIOR - step, order - 1)[-1]) / (
                2 * step
            )
            np.testing.assert_allclose(wave.jet(INTERIOR, order)[order], expected, rtol=1e-5, atol=1e-7)

    def test_r1d_vanishes_at_both_ends(self, delta2):
        report = check_boundary(synth_r1d(Envelope.sin_pow(3, 1.0, T), delta2), 1)
        assert report.passed

    def test_r2d_collapses_to_r1d(self, delta2):
        base = Envelope.fourier_bl(1.0, T)
        omega1, omega_x = synth_r2d(base, delta2, 1e6 * delta2)
        np.testing.assert_allclose(omega1.jet(INTERIOR, 0)[0], base.eval(INTERIOR), rtol=1e-6)
        np.testing.assert_allclose(omega_x.jet(INTERIOR, 0)[0], synth_r1d(base, delta2).jet(INTERIOR, 0)[0], rtol=1e-6)

    def test_r2d_infeasible_short_gate(self, delta2):
        with pytest.raises(SynthesisInfeasibleError) as info:
            synth_r2d(Envelope.fourier_bl(1.0, 4.0), delta2, 3 * delta2)
        assert info.value.level.startswith("r2d")


class TestSuperlinear:
    def test_zero_drive(self, delta2):
        channels = superlinear_correct(Envelope.hann(0.0, T), delta2)
        for channel in channels:
            np.testing.assert_array_equal(channel.jet(INTERIOR, 0)[0], 0.0)

    def test_linear_path_keeps_plain_drag_quadrature(self, hann_pi, delta2):
        base = hann_pi(T)
        corrected_x, corrected_y, _ = superlinear_correct(base, delta2)
        np.testing.assert_allclose(
            corrected_x.jet(INTERIOR, 0)[0], base.eval(INTERIOR) - base.eval(INTERIOR) ** 3 / (4 * delta2**2)
        )
        np.testing.assert_allclose(corrected_y.jet(INTERIOR, 0)[0], -base.eval(INTERIOR, 1) / delta2, atol=1e-14)

    def test_full_path_reduces_to_linear_without_third_level(self, hann_pi, delta2):
        base = hann_pi(12.0)
        points = np.linspace(1.0, 11.0, 7)
        linear = SuperlinearTerms(base, delta2, math.sqrt(2))
        full = SuperlinearTerms(
            base, delta2, math.sqrt(2), SuperlinearPath.FULL, omega1=base, omega2=base, delta3=3 * delta2, lambda3=0.0
        )
        np.testing.assert_allclose(full.jet(points, 1), linear.jet(points, 1), rtol=1e-10, atol=1e-14)

    def test_stencil_agrees_with_jets(self, delta2):
        recipe = PulseRecipe(PulseFamily.R2D, delta2, 3 * delta2)
        omega_x, omega1, omega2 = recipe.channels(recipe.amplitude(12.0), 12.0)
        kwargs = dict(omega1=omega1, omega2=omega2, delta3=3 * delta2, lambda3=math.sqrt(3), path=SuperlinearPath.FULL)
        points = np.linspace(0.1 * 12.0, 0.9 * 12.0, 9)
        _, exact, _ = superlinear_correct(omega_x, delta2, **kwargs)
        _, stencil, _ = superlinear_correct(omega_x, delta2, method=DerivativeMethod.STENCIL, **kwargs)
        np.testing.assert_allclose(stencil.jet(points, 0)[0], exact.jet(points, 0)[0], rtol=1e-6, atol=1e-9)

    def test_stencil_only_gives_values(self, hann_pi, delta2):
        _, stencil, _ = superlinear_correct(hann_pi(T), delta2, method=DerivativeMethod.STENCIL)
        with pytest.raises(PulseDomainError):
            stencil.jet(INTERIOR, 1)

    def test_full_path_needs_recursion_channels(self, hann_pi, delta2):
        with pytest.raises(ConfigError, match="omega1"):
            superlinear_correct(hann_pi(T), delta2, path=SuperlinearPath.FULL)


class TestTmin:
    def test_r1d_sin3(self, delta2):
        assert tmin(TminKind.R1D, delta2, n=3) == pytest.approx(math.sqrt(6) * math.pi / abs(delta2), rel=1e-15)
        assert tmin(TminKind.R1D, delta2, n=3) == pytest.approx(5.443, abs=1e-3)

    def test_r1d_matches_numeric_scan(self, delta2):
        recipe = PulseRecipe(PulseFamily.R1D, delta2, 3 * delta2, shape=EnvelopeKind.SIN_POW, n=3)
        assert tmin(TminKind.NUMERIC, delta2, pipeline=recipe) == pytest.approx(
            tmin(TminKind.R1D, delta2, n=3), abs=5e-3
        )

    def test_r2d_reduces_to_r1d_for_far_third_level(self, delta2):
        assert tmin(TminKind.R2D, delta2, n=3, delta3=1000 * delta2) == pytest.approx(
            tmin(TminKind.R1D, delta2, n=3), rel=1e-4
        )

    def test_r2d_grows_with_third_level_detuning(self, delta2):
        values = [tmin(TminKind.R2D, delta2, n=3, delta3=ratio * delta2) for ratio in (3, 5, 10)]
        assert values == sorted(values)
        assert values[0] == pytest.approx(2 * math.pi / abs(delta2), rel=1e-12)

    def test_r2d_sin3_orders_with_third_level_ratio(self, delta2):
        values = [tmin(TminKind.R2D, delta2, n=3, delta3=ratio * delta2) for ratio in (2.5, 3.0, 4.0)]
        assert values[0] < values[1] < values[2]
        assert values[1] == pytest.approx(4.444, abs=1e-3)
        assert values[2] == pytest.approx(5.081, abs=1e-3)

    @pytest.mark.paper
    def test_numeric_fourier_bl_r2d(self, delta2):
        recipe = PulseRecipe(PulseFamily.R2D, delta2, 3 * delta2)
        assert recipe.t_min() == pytest.approx(4.45, abs=0.05)

    def test_numeric_needs_recipe(self, delta2):
        with pytest.raises(ConfigError):
            tmin(TminKind.NUMERIC, delta2)

    def test_bad_power(self, delta2):
        with pytest.raises(PulseDomainError):
            tmin(TminKind.R1D, delta2, n=0)


class TestPrefactors:
    def test_identity_is_unchanged(self, hann_pi, delta2):
        wave = synth_drag(hann_pi(T), delta2)
        assert apply_prefactors(wave, PrefactorSet()) is wave

    def test_beta_doubles_rotation(self, delta2):
        wave = PulseRecipe(PulseFamily.DRAG, delta2, 3 * delta2).build(T)
        scaled = apply_prefactors(wave, PrefactorSet(beta=2.0))
        assert rotation_angle(scaled.omega_x) == pytest.approx(2 * math.pi, rel=1e-9)

    def test_alpha_scales_quadrature_and_delta_c_replaces_detuning(self, delta2):
        wave = PulseRecipe(PulseFamily.DRAG, delta2, 3 * delta2).build(T)
        scaled = apply_prefactors(wave, PrefactorSet(alpha12=1.5, delta_c=0.02))
        np.testing.assert_allclose(scaled.sample(INTERIOR)[1], 1.5 * wave.sample(INTERIOR)[1])
        np.testing.assert_allclose(scaled.sample(INTERIOR)[2], 0.02)
        assert scaled.prefactors.alpha == 1.5

    def test_nonpositive_beta(self):
        with pytest.raises(PulseDomainError):
            PrefactorSet(beta=0.0)

    def test_record(self):
        prefactors = PrefactorSet(beta=0.98, alpha12=1.2, delta_c=0.04)
        assert PrefactorSet.from_record(prefactors.to_record()) == prefactors


class TestRecipe:
    @pytest.mark.parametrize("family", list(PulseFamily))
    def test_builds_pi_rotation(self, family, delta2):
        wave = PulseRecipe(family, delta2, 3 * delta2).build(T)
        assert rotation_angle(wave.omega_x) == pytest.approx(math.pi, abs=1e-8)
        np.testing.assert_allclose(wave.sample(np.array([0.0, T]))[0], 0.0, atol=1e-9)

    def test_hann_family_has_no_corrections(self, delta2):
        wave = PulseRecipe(PulseFamily.HANN, delta2, 3 * delta2).build(T)
        assert isinstance(wave.omega_y, Zero)
        assert isinstance(wave.delta, Zero)

    def test_superlinear_tag(self, delta2):
        wave = PulseRecipe(PulseFamily.R2D, delta2, 3 * delta2, superlinear=True).build(12.0)
        assert wave.tag == "r2d+superlinear"
        assert wave.superlinear

    def test_below_minimum_reports_it(self, delta2):
        recipe = PulseRecipe(PulseFamily.R1D, delta2, 3 * delta2)
        with pytest.raises(SynthesisInfeasibleError) as info:
            recipe.build(4.0)
        assert info.value.t_min == pytest.approx(tmin(TminKind.R1D, delta2, n=3), abs=5e-3)

    def test_delta_c_needs_constant_mode(self, delta2):
        with pytest.raises(ConfigError):
            PulseRecipe(PulseFamily.DRAG, delta2, 3 * delta2, prefactors=PrefactorSet(delta_c=0.01))

    def test_with_prefactors_switches_detuning_mode(self, delta2):
        recipe = PulseRecipe(PulseFamily.DRAG, delta2, 3 * delta2).with_prefactors(PrefactorSet(delta_c=0.01))
        assert recipe.detuning == DetuningMode.CONSTANT
        wave = recipe.build(T)
        assert isinstance(wave.delta, Constant)
        assert recipe.with_prefactors(PrefactorSet()).detuning == DetuningMode.NONE

    def test_csv_export(self, delta2):
        wave = PulseRecipe(PulseFamily.DRAG, delta2, 3 * delta2).build(T)
        stream = io.StringIO()
        wave.write_csv(stream, 5, ["note"])
        lines = stream.getvalue().splitlines()
        assert lines[0] == "# note"
        assert lines[1] == "t_ns,omega_x,omega_y,delta"
        assert len(lines) == 7
        assert float(lines[-1].split(",")[0]) == T

    def test_table_needs_two_samples(self, delta2):
        with pytest.raises(PulseDomainError):
            PulseRecipe(PulseFamily.HANN, delta2, 3 * delta2).build(T).table(1)
