import math

import numpy as np
import pytest

from recursive_drag.errors import PulseDomainError
from recursive_drag.model import (
    DEFAULT_DELTA2,
    LadderParams,
    annihilation,
    duffing_ladder,
    ghz_to_rad_per_ns,
    hamiltonian,
    hamiltonian_from_samples,
    number_operator,
    rad_per_ns_to_ghz,
    rate_from_microseconds,
)
from recursive_drag.pulse.properties import Provenance, PulseFamily
from recursive_drag.pulse.synthesis import Constant, ControlWaveform, PulseRecipe, Zero

T = 10.0


class TestDuffingLadder:
    def test_four_levels(self, delta2):
        params = duffing_ladder(delta2, 4)
        assert params.detunings == (0.0, delta2, 3 * delta2)
        np.testing.assert_allclose(params.couplings, [1.0, math.sqrt(2), math.sqrt(3)])
        np.testing.assert_allclose(params.energies, [0.0, 0.0, delta2, 3 * delta2])
        assert params.gamma == params.gamma_phi == 0.0

    def test_three_levels(self, delta2):
        params = duffing_ladder(delta2, 3)
        assert params.detunings == (0.0, delta2)
        assert params.delta3 == 3 * delta2
        assert params.lambda3 == math.sqrt(3)

    def test_too_few_levels(self, delta2):
        with pytest.raises(PulseDomainError):
            duffing_ladder(delta2, 2)

    def test_too_many_levels(self, delta2):
        with pytest.raises(PulseDomainError):
            duffing_ladder(delta2, 7)

    def test_harmonic_ladder_is_allowed(self):
        assert duffing_ladder(0.0, 3).delta2 == 0.0

    def test_default_anharmonicity(self):
        assert rad_per_ns_to_ghz(DEFAULT_DELTA2) == pytest.approx(-0.225, rel=1e-15)
        assert ghz_to_rad_per_ns(-0.225) == DEFAULT_DELTA2


class TestLadderParams:
    def test_drive_must_be_resonant(self):
        with pytest.raises(PulseDomainError):
            LadderParams(levels=3, detunings=(0.1, -1.0), couplings=(1.0, math.sqrt(2)))

    def test_lengths_must_match(self):
        with pytest.raises(PulseDomainError):
            LadderParams(levels=3, detunings=(0.0,), couplings=(1.0, math.sqrt(2)))

    def test_decoherence(self, ladder):
        noisy = ladder.with_decoherence(1000.0, 500.0)
        assert noisy.gamma == pytest.approx(1e-6)
        assert noisy.gamma_phi == pytest.approx(2e-6)
        assert noisy.dissipative
        assert not noisy.closed().dissipative

    def test_missing_coherence_time_means_no_decay(self):
        assert rate_from_microseconds(None) == 0.0
        assert rate_from_microseconds(math.inf) == 0.0
        with pytest.raises(PulseDomainError):
            rate_from_microseconds(-1.0)

    def test_delta3_override(self, ladder, delta2):
        assert ladder.with_delta3(2.5 * delta2).delta3 == 2.5 * delta2
        with pytest.raises(PulseDomainError):
            duffing_ladder(delta2, 3).with_delta3(delta2)

    def test_truncated(self, ladder):
        assert ladder.truncated(3) == duffing_ladder(ladder.delta2, 3)

    def test_record(self, ladder):
        noisy = ladder.with_decoherence(280.0, 220.0)
        restored = LadderParams.from_record(noisy.to_record())
        assert restored.detunings == noisy.detunings
        assert restored.gamma == pytest.approx(noisy.gamma)
        assert restored.gamma_phi == pytest.approx(noisy.gamma_phi)


class TestHamiltonian:
    def test_zero_waveform_is_diagonal(self, ladder):
        h = hamiltonian(ladder, ControlWaveform.zero(T), 3.0)
        np.testing.assert_array_equal(h, np.diag(ladder.energies).astype(complex))

    def test_constant_in_phase_drive(self, qutrit):
        wave = ControlWaveform(Constant(0.3, T), Zero(T), Zero(T), T, Provenance.HANN)
        h = hamiltonian(qutrit, wave, 1.0)
        np.testing.assert_allclose(np.diag(h, 1), [0.15, math.sqrt(2) * 0.15])
        np.testing.assert_allclose(np.diag(h, -1), [0.15, math.sqrt(2) * 0.15])

    def test_quadrature_sign(self, qubit):
        h = hamiltonian_from_samples(qubit, 0.0, 0.4, 0.0)
        assert h[0, 1] == pytest.approx(-0.2j)
        assert h[1, 0] == pytest.approx(0.2j)

    def test_detuning_scales_with_level(self, ladder):
        h = hamiltonian_from_samples(ladder, 0.0, 0.0, 0.1)
        np.testing.assert_allclose(np.diag(h).real, ladder.energies + 0.1 * np.arange(4))

    def test_drag_peak_is_real(self, ladder):
        wave = PulseRecipe.for_ladder(PulseFamily.DRAG, ladder).build(T)
        h = hamiltonian(ladder, wave, T / 2)
        assert abs(h[0, 1].imag) < 1e-15
        assert h[0, 1].real == pytest.approx(wave.omega_x.jet(T / 2, 0)[0] / 2)

    def test_hermitian_tridiagonal(self, ladder):
        wave = PulseRecipe.for_ladder(PulseFamily.DRAG, ladder).build(T)
        hs = hamiltonian(ladder, wave, np.linspace(0.0, T, 33))
        assert hs.shape == (33, 4, 4)
        np.testing.assert_array_equal(hs, np.conj(np.swapaxes(hs, -1, -2)))
        far = np.abs(np.subtract.outer(np.arange(4), np.arange(4))) >= 2
        assert np.all(hs[:, far] == 0)

    def test_time_outside_gate(self, ladder):
        with pytest.raises(PulseDomainError):
            hamiltonian(ladder, ControlWaveform.zero(T), T + 0.1)


def test_ladder_operators():
    a = annihilation(3)
    np.testing.assert_allclose(a.conj().T @ a, number_operator(3))
    assert a[0, 1] == 1.0
    assert a[1, 2] == pytest.approx(math.sqrt(2))
