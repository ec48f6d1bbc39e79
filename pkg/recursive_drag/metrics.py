# Copyright 2026 The recursive-drag developers

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from recursive_drag.errors import PulseDomainError
from recursive_drag.model import LadderParams
from recursive_drag.propagation import (
    PAULI_X,
    DensityState,
    Matrix,
    Propagator,
    projected_fidelity,
    propagate_lindblad_batch,
    propagate_unitary,
)

if t.TYPE_CHECKING:
    from recursive_drag.pulse.synthesis import ControlWaveform

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LeakageReport:
    """Populations of levels 2..M-1 after the gate, for the initial states |0> and |1>."""

    from0: t.Tuple[float, ...]
    from1: t.Tuple[float, ...]

    @property
    def total(self) -> float:
        return max(sum(self.from0), sum(self.from1))

    def level(self, j: int) -> t.Tuple[float, float]:
        if j < 2 or j - 2 >= len(self.from0):
            raise PulseDomainError(f"No leakage level {j} in a {len(self.from0) + 2}-level report")
        return self.from0[j - 2], self.from1[j - 2]

    def to_record(self) -> t.Dict[str, t.List[float]]:
        return {"from0": list(self.from0), "from1": list(self.from1)}


@dataclass(frozen=True)
class GateResult:
    duration: float
    fidelity: float
    leakage: LeakageReport
    u_q: t.Optional[Matrix] = None
    dissipative: bool = False
    steps: int = 0

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity

    def to_record(self) -> t.Dict[str, t.Any]:
        return {
            "T_ns": self.duration,
            "fidelity": self.fidelity,
            "infidelity": self.infidelity,
            "dissipative": self.dissipative,
            "leakage": self.leakage.to_record(),
        }


def gate_fidelity(u: t.Union[Propagator, npt.ArrayLike], target: npt.ArrayLike = PAULI_X) -> float:
    unitary = u.unitary if isinstance(u, Propagator) else np.asarray(u, dtype=complex)
    if unitary.ndim != 2 or unitary.shape[0] < 2 or unitary.shape[0] != unitary.shape[1]:
        raise PulseDomainError(f"Need a square propagator over at least two levels, got shape {unitary.shape}")
    # Rounding can push a perfect gate a hair above one
    return min(1.0, max(0.0, projected_fidelity(unitary, np.asarray(target, dtype=complex))))


def pauli_eigenstates(levels: int) -> t.List[DensityState]:
    """|0>, |1>, |+>, |->, |+i>, |-i> embedded with no support above the qubit."""
    s = 1 / math.sqrt(2)
    vectors = ((1, 0), (0, 1), (s, s), (s, -s), (s, 1j * s), (s, -1j * s))
    states = []
    for a, b in vectors:
        psi = np.zeros(levels, dtype=complex)
        psi[:2] = (a, b)
        states.append(DensityState.pure(psi))
    return states


def leakage_report(final: t.Union[Propagator, npt.ArrayLike, t.Sequence[DensityState]]) -> LeakageReport:
    """Leakage of a propagator's columns |0>, |1>, or of the final states grown from |0> and |1>."""
    if isinstance(final, Propagator):
        final = final.unitary

    if isinstance(final, (list, tuple)) and final and isinstance(final[0], DensityState):
        from0 = final[0].populations[2:]
        from1 = final[1].populations[2:]
    else:
        u = np.asarray(final, dtype=complex)
        from0 = np.abs(u[2:, 0]) ** 2
        from1 = np.abs(u[2:, 1]) ** 2
    return LeakageReport(tuple(float(p) for p in from0), tuple(float(p) for p in from1))


def _dissipative_average(finals: Matrix, target: Matrix, levels: int) -> float:
    overlaps = []
    for initial, rho in zip(pauli_eigenstates(levels), finals):
        ideal = target @ initial.rho[:2, :2] @ target.conj().T
        overlaps.append(np.trace(ideal @ rho[:2, :2]).real)
    return float(np.mean(overlaps))


def _dissipative_run(
    params: LadderParams, wave: ControlWaveform, target: Matrix, steps_hint: t.Optional[int]
) -> t.Tuple[float, Matrix, int]:
    initial = np.stack([state.rho for state in pauli_eigenstates(params.levels)])
    finals, steps = propagate_lindblad_batch(params, wave, initial, steps_hint)
    return _dissipative_average(finals, target, params.levels), finals, steps


def dissipative_fidelity(
    params: LadderParams,
    wave: ControlWaveform,
    target: npt.ArrayLike = PAULI_X,
    steps_hint: t.Optional[int] = None,
) -> float:
    """Six-state average of Tr[U rho U^dag M(rho)] with M the master-equation map cut to the qubit."""
    fidelity, _, _ = _dissipative_run(params, wave, np.asarray(target, dtype=complex), steps_hint)
    return fidelity


def evaluate_gate(
    params: LadderParams,
    wave: ControlWaveform,
    dissipative: bool = False,
    target: npt.ArrayLike = PAULI_X,
) -> GateResult:
    target_matrix = np.asarray(target, dtype=complex)

    if dissipative:
        fidelity, finals, steps = _dissipative_run(params, wave, target_matrix, None)
        leakage = leakage_report([DensityState(finals[0]), DensityState(finals[1])])
        result = GateResult(wave.duration, fidelity, leakage, dissipative=True, steps=steps)
    else:
        propagator = propagate_unitary(params, wave, target=target_matrix)
        result = GateResult(
            wave.duration,
            gate_fidelity(propagator, target_matrix),
            leakage_report(propagator),
            u_q=propagator.qubit_block,
            steps=propagator.steps,
        )

    logger.info(f"{wave.tag} gate at T = {wave.duration} ns: infidelity {result.infidelity:.3e}")
    return result
