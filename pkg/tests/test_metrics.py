import math

import numpy as np
import pytest

from recursive_drag.errors import PulseDomainError
from recursive_drag.metrics import (
    LeakageReport,
    dissipative_fidelity,
    evaluate_gate,
    gate_fidelity,
    leakage_report,
    pauli_eigenstates,
)
from recursive_drag.propagation import PAULI_X, DensityState, propagate_unitary
from recursive_drag.pulse.properties import Provenance, PulseFamily
from recursive_drag.pulse.synthesis import ControlWaveform, PulseRecipe, Zero

T = 10.0
IDENTITY = np.eye(2, dtype=complex)


class TestGateFidelity:
    def test_perfect_x(self):
        assert gate_fidelity(PAULI_X) == 1.0

    def test_identity_against_x(self):
        assert gate_fidelity(IDENTITY) == pytest.approx(1 / 3, rel=1e-15)

    def test_shrunk_x(self):
        assert gate_fidelity(0.99 * PAULI_X) == pytest.approx(0.9801, rel=1e-14)

    def test_global_phase_is_ignored(self):
        assert gate_fidelity(np.exp(0.7j) * PAULI_X) == pytest.approx(1.0, abs=1e-15)

    def test_embedded_in_larger_ladder(self):
        u = np.zeros((3, 3), dtype=complex)
        u[:2, :2] = PAULI_X
        u[2, 2] = 1.0
        assert gate_fidelity(u) == 1.0
        assert gate_fidelity(u, IDENTITY) == pytest.approx(1 / 3)

    def test_unitary_block_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
            assert 1 / 3 - 1e-12 <= gate_fidelity(q) <= 1.0

    def test_needs_square_matrix(self):
        with pytest.raises(PulseDomainError):
            gate_fidelity(np.ones((2, 3)))
        with pytest.raises(PulseDomainError):
            gate_fidelity(np.ones((1, 1)))


class TestLeakage:
    def test_zero_waveform(self, ladder):
        report = leakage_report(propagate_unitary(ladder, ControlWaveform.zero(T)))
        assert report.from0 == pytest.approx((0.0, 0.0), abs=1e-24)
        assert report.from1 == pytest.approx((0.0, 0.0), abs=1e-24)
        assert report.total == pytest.approx(0.0, abs=1e-24)

    def test_swap_into_second_excited_level(self):
        u = np.eye(3, dtype=complex)[:, [0, 2, 1]]
        report = leakage_report(u)
        assert report.from1 == (1.0,)
        assert report.from0 == (0.0,)
        assert report.level(2) == (0.0, 1.0)

    def test_three_levels_have_no_third_excited_level(self):
        report = LeakageReport((0.1,), (0.2,))
        with pytest.raises(PulseDomainError):
            report.level(3)
        assert report.to_record() == {"from0": [0.1], "from1": [0.2]}

    def test_from_final_states(self):
        states = [DensityState(np.diag([0.9, 0.0, 0.1]).astype(complex)), DensityState.basis(3, 2)]
        report = leakage_report(states)
        assert report.from0 == pytest.approx((0.1,))
        assert report.from1 == (1.0,)


def test_pauli_eigenstates():
    states = pauli_eigenstates(4)
    assert len(states) == 6
    np.testing.assert_allclose(states[0].populations, [1, 0, 0, 0])
    np.testing.assert_allclose(states[1].populations, [0, 1, 0, 0])
    average = sum(state.rho for state in states) / 6
    np.testing.assert_allclose(average[:2, :2], IDENTITY / 2, atol=1e-15)


class TestDissipativeFidelity:
    def test_perfect_x_without_decay(self, qubit, hann_pi):
        wave = ControlWaveform(hann_pi(T), Zero(T), Zero(T), T, Provenance.HANN)
        assert dissipative_fidelity(qubit, wave) == pytest.approx(1.0, abs=1e-9)

    def test_amplitude_damping_average(self, qubit):
        duration = 1.0
        noisy = qubit.with_decoherence(0.01, None)
        p = 1 - math.exp(-noisy.gamma * duration)
        expected = (4 - p + 2 * math.sqrt(1 - p)) / 6
        assert dissipative_fidelity(noisy, ControlWaveform.zero(duration), IDENTITY) == pytest.approx(
            expected, abs=1e-9
        )

    def test_zero_rates_match_unitary_fidelity(self, qutrit):
        wave = PulseRecipe.for_ladder(PulseFamily.DRAG, qutrit).build(T)
        unitary = gate_fidelity(propagate_unitary(qutrit, wave))
        assert dissipative_fidelity(qutrit, wave) == pytest.approx(unitary, abs=1e-8)


class TestEvaluateGate:
    def test_unitary(self, ladder):
        wave = PulseRecipe.for_ladder(PulseFamily.DRAG, ladder).build(T)
        result = evaluate_gate(ladder, wave)
        assert not result.dissipative
        assert result.u_q.shape == (2, 2)
        assert result.steps >= 512
        assert result.infidelity == pytest.approx(1 - result.fidelity)
        assert len(result.leakage.from0) == 2
        assert set(result.to_record()) == {"T_ns", "fidelity", "infidelity", "dissipative", "leakage"}

    def test_dissipative(self, qutrit):
        noisy = qutrit.with_decoherence(40.0, 50.0)
        wave = PulseRecipe.for_ladder(PulseFamily.DRAG, qutrit).build(T)
        noisy_result = evaluate_gate(noisy, wave, dissipative=True)
        clean_result = evaluate_gate(qutrit, wave)
        assert noisy_result.dissipative
        assert noisy_result.u_q is None
        assert noisy_result.fidelity < clean_result.fidelity
        assert len(noisy_result.leakage.from1) == 1
