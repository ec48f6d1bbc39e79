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

"""Time-ordered propagation of the ladder under a control waveform.

Closed systems are stepped with exact exponentials of Hermitian step generators, open systems with
classical RK4 on the density matrix. Both refine the step count by doubling until two successive
resolutions agree.
"""

from __future__ import annotations

import csv
import logging
import math
import typing as t
from dataclasses import dataclass
from enum import Enum, auto

import numpy as np
import numpy.typing as npt

from recursive_drag.errors import NumericalConvergenceError, PulseDomainError
from recursive_drag.model import LadderParams, annihilation, hamiltonian_from_samples, number_operator
from recursive_drag.utils import log_duration

if t.TYPE_CHECKING:
    from recursive_drag.pulse.synthesis import ControlWaveform

logger = logging.getLogger(__name__)

Matrix = npt.NDArray[np.complex128]

PAULI_X: Matrix = np.array([[0, 1], [1, 0]], dtype=complex)

DEFAULT_STEPS = 256
MAX_STEPS = 2**22
FIDELITY_TOLERANCE = 1e-11
UNITARITY_TOLERANCE = 1e-10

DEFAULT_LINDBLAD_STEPS = 512
MAX_LINDBLAD_STEPS = 2**20
LINDBLAD_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-9
POSITIVITY_TOLERANCE = 1e-9

# Steps whose Hamiltonians are sampled and multiplied together in one batch
CHUNK_STEPS = 2**14

_GAUSS_OFFSET = math.sqrt(3) / 6


class PropagationScheme(Enum):
    MIDPOINT = auto()
    MAGNUS4 = auto()


@dataclass(frozen=True)
class Propagator:
    unitary: Matrix
    steps: int
    error_estimate: float
    scheme: PropagationScheme = PropagationScheme.MAGNUS4

    @property
    def levels(self) -> int:
        return int(self.unitary.shape[0])

    @property
    def qubit_block(self) -> Matrix:
        return self.unitary[:2, :2]

    @property
    def unitarity_error(self) -> float:
        return unitarity_error(self.unitary)


@dataclass(frozen=True)
class DensityState:
    rho: Matrix

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise PulseDomainError(f"Density matrix must be square, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=TRACE_TOLERANCE):
            raise PulseDomainError("Density matrix must be Hermitian")

        trace = np.trace(rho).real
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise PulseDomainError(f"Density matrix must have unit trace, got {trace!r}")

        smallest = float(np.min(np.linalg.eigvalsh(rho)))
        if smallest < -POSITIVITY_TOLERANCE:
            raise PulseDomainError(f"Density matrix must be positive semidefinite, smallest eigenvalue {smallest!r}")

    @classmethod
    def pure(cls, psi: npt.ArrayLike) -> DensityState:
        vector = np.asarray(psi, dtype=complex)
        vector = vector / np.linalg.norm(vector)
        return cls(np.outer(vector, vector.conj()))

    @classmethod
    def basis(cls, levels: int, index: int) -> DensityState:
        if not 0 <= index < levels:
            raise PulseDomainError(f"Basis state {index} outside a {levels}-level ladder")
        rho = np.zeros((levels, levels), dtype=complex)
        rho[index, index] = 1.0
        return cls(rho)

    @property
    def levels(self) -> int:
        return int(self.rho.shape[0])

    @property
    def populations(self) -> npt.NDArray[np.float64]:
        return np.real(np.diag(self.rho)).copy()


def unitarity_error(u: Matrix) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def expm_hermitian(h: npt.ArrayLike, tau: float = 1.0) -> Matrix:
    """exp(-i tau H) for a stack of Hermitian matrices, via their eigendecomposition."""
    w, v = np.linalg.eigh(np.asarray(h, dtype=complex))
    return t.cast(Matrix, (v * np.exp(-1j * tau * w)[..., np.newaxis, :]) @ np.swapaxes(v.conj(), -1, -2))


def projected_fidelity(u: Matrix, target: Matrix = PAULI_X) -> float:
    """Average gate fidelity of the qubit block of u against a 2x2 target; blind to global phase."""
    block = u[:2, :2]
    d = 2
    leakage_term = np.trace(block @ block.conj().T).real
    overlap = abs(np.trace(block @ np.asarray(target).conj().T)) ** 2
    return float((leakage_term + overlap) / (d * (d + 1)))


def _ordered_product(steps: Matrix) -> Matrix:
    """Product steps[-1] @ ... @ steps[0] by pairwise reduction."""
    while steps.shape[0] > 1:
        odd = steps[-1:] if steps.shape[0] % 2 else steps[:0]
        paired = steps[1 : steps.shape[0] - steps.shape[0] % 2 : 2] @ steps[0 : steps.shape[0] - 1 : 2]
        steps = np.concatenate((paired, odd)) if odd.shape[0] else paired
    return t.cast(Matrix, steps[0])


def step_unitaries(
    params: LadderParams,
    wave: ControlWaveform,
    steps: int,
    start: int,
    stop: int,
    scheme: PropagationScheme = PropagationScheme.MAGNUS4,
) -> Matrix:
    """Single-step propagators for steps start..stop-1 of a uniform grid of `steps` steps."""
    h = wave.duration / steps
    index = np.arange(start, stop, dtype=float)

    if scheme == PropagationScheme.MIDPOINT:
        midpoint = hamiltonian_from_samples(params, *wave.sample((index + 0.5) * h))
        return expm_hermitian(midpoint, h)

    early = hamiltonian_from_samples(params, *wave.sample((index + 0.5 - _GAUSS_OFFSET) * h))
    late = hamiltonian_from_samples(params, *wave.sample((index + 0.5 + _GAUSS_OFFSET) * h))
    commutator = early @ late - late @ early
    generator = 0.5 * h * (early + late) + 1j * (math.sqrt(3) * h**2 / 12) * commutator
    return expm_hermitian(generator)


def unitary_at_resolution(
    params: LadderParams,
    wave: ControlWaveform,
    steps: int,
    scheme: PropagationScheme = PropagationScheme.MAGNUS4,
) -> Matrix:
    if steps < 1:
        raise PulseDomainError(f"Step count must be positive, got {steps}")

    u = np.eye(params.levels, dtype=complex)
    for start in range(0, steps, CHUNK_STEPS):
        stop = min(start + CHUNK_STEPS, steps)
        u = _ordered_product(step_unitaries(params, wave, steps, start, stop, scheme)) @ u
    return u


@log_duration()
def propagate_unitary(
    params: LadderParams,
    wave: ControlWaveform,
    steps_hint: t.Optional[int] = None,
    *,
    scheme: PropagationScheme = PropagationScheme.MAGNUS4,
    target: Matrix = PAULI_X,
    tolerance: float = FIDELITY_TOLERANCE,
) -> Propagator:
    steps = steps_hint or DEFAULT_STEPS
    previous = unitary_at_resolution(params, wave, steps, scheme)
    previous_fidelity = projected_fidelity(previous, target)

    while True:
        if steps * 2 > MAX_STEPS:
            raise NumericalConvergenceError(
                "Propagator did not converge", steps=steps, scheme=scheme.name, duration=wave.duration
            )

        steps *= 2
        current = unitary_at_resolution(params, wave, steps, scheme)
        fidelity = projected_fidelity(current, target)
        change = abs(fidelity - previous_fidelity)
        logger.debug(f"{steps} {scheme.name} steps: fidelity {fidelity!r}, change {change:.3e}")

        if change <= tolerance:
            break
        previous_fidelity = fidelity

    error = unitarity_error(current)
    if error > UNITARITY_TOLERANCE:
        raise NumericalConvergenceError("Propagator lost unitarity", steps=steps, unitarity_error=error)

    logger.info(f"Converged {params.levels}-level propagator for T = {wave.duration} ns in {steps} steps")
    return Propagator(current, steps, change, scheme)


def _jumps(params: LadderParams) -> t.List[t.Tuple[float, Matrix, Matrix]]:
    operators = ((params.gamma, annihilation(params.levels)), (params.gamma_phi, number_operator(params.levels)))
    return [(rate, c, c.conj().T @ c) for rate, c in operators if rate > 0]


def _lindblad_rhs(h: Matrix, rho: Matrix, jumps: t.Sequence[t.Tuple[float, Matrix, Matrix]]) -> Matrix:
    drho = -1j * (h @ rho - rho @ h)
    for rate, c, cdc in jumps:
        drho += rate * (c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc))
    return drho


def _rk4_step(
    h: t.Tuple[Matrix, Matrix, Matrix], rho: Matrix, dt: float, jumps: t.Sequence[t.Tuple[float, Matrix, Matrix]]
) -> Matrix:
    k1 = _lindblad_rhs(h[0], rho, jumps)
    k2 = _lindblad_rhs(h[1], rho + 0.5 * dt * k1, jumps)
    k3 = _lindblad_rhs(h[1], rho + 0.5 * dt * k2, jumps)
    k4 = _lindblad_rhs(h[2], rho + dt * k3, jumps)
    return t.cast(Matrix, rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def lindblad_at_resolution(
    params: LadderParams,
    wave: ControlWaveform,
    rhos: Matrix,
    steps: int,
    stride: t.Optional[int] = None,
) -> t.Tuple[Matrix, t.List[Matrix]]:
    """RK4 on a batch of density matrices (B, M, M); also returns snapshots every `stride` steps."""
    if steps < 1:
        raise PulseDomainError(f"Step count must be positive, got {steps}")

    dt = wave.duration / steps
    jumps = _jumps(params)
    rho = np.array(rhos, dtype=complex)
    history = [rho.copy()] if stride else []

    for start in range(0, steps, CHUNK_STEPS):
        stop = min(start + CHUNK_STEPS, steps)
        # Step k needs H at t_k, t_k + dt / 2 and t_k + dt
        grid = np.arange(2 * start, 2 * stop + 1) * (0.5 * dt)
        grid[-1] = min(grid[-1], wave.duration)
        hs = hamiltonian_from_samples(params, *wave.sample(grid))
        for k in range(stop - start):
            rho = _rk4_step((hs[2 * k], hs[2 * k + 1], hs[2 * k + 2]), rho, dt, jumps)
            if stride and (start + k + 1) % stride == 0:
                history.append(rho.copy())
    return rho, history


def _check_density(rhos: Matrix, traces: npt.NDArray[np.float64], steps: int) -> None:
    drift = float(np.max(np.abs(np.trace(rhos, axis1=-2, axis2=-1).real - traces)))
    if drift > TRACE_TOLERANCE:
        raise NumericalConvergenceError("Lindblad trace drifted", steps=steps, trace_drift=drift)

    hermitian = 0.5 * (rhos + np.swapaxes(rhos.conj(), -1, -2))
    smallest = float(np.min(np.linalg.eigvalsh(hermitian)))
    if smallest < -POSITIVITY_TOLERANCE:
        raise NumericalConvergenceError("Lindblad state lost positivity", steps=steps, smallest_eigenvalue=smallest)


@log_duration()
def propagate_lindblad_batch(
    params: LadderParams,
    wave: ControlWaveform,
    rhos: npt.ArrayLike,
    steps_hint: t.Optional[int] = None,
    *,
    tolerance: float = LINDBLAD_TOLERANCE,
) -> t.Tuple[Matrix, int]:
    """Final density matrices for a batch of initial states, and the converged step count."""
    initial = np.asarray(rhos, dtype=complex)
    if initial.ndim == 2:
        initial = initial[np.newaxis]
    if initial.shape[-2:] != (params.levels, params.levels):
        raise PulseDomainError(f"Initial states of shape {initial.shape[-2:]} do not match {params.levels} levels")

    steps = steps_hint or DEFAULT_LINDBLAD_STEPS
    previous, _ = lindblad_at_resolution(params, wave, initial, steps)

    while True:
        if steps * 2 > MAX_LINDBLAD_STEPS:
            raise NumericalConvergenceError("Lindblad integration did not converge", steps=steps)

        steps *= 2
        current, _ = lindblad_at_resolution(params, wave, initial, steps)
        change = float(np.max(np.abs(current - previous)))
        logger.debug(f"{steps} RK4 steps: max density change {change:.3e}")

        # NaN compares false, so a blown-up coarse run keeps refining
        if change <= tolerance:
            break
        previous = current

    _check_density(current, np.trace(initial, axis1=-2, axis2=-1).real, steps)
    logger.info(f"Converged Lindblad run of {initial.shape[0]} states for T = {wave.duration} ns in {steps} steps")
    return current, steps


def propagate_lindblad(
    params: LadderParams, wave: ControlWaveform, rho0: DensityState, steps_hint: t.Optional[int] = None
) -> DensityState:
    if rho0.levels != params.levels:
        raise PulseDomainError(f"Initial state has {rho0.levels} levels, the ladder {params.levels}")

    final, _ = propagate_lindblad_batch(params, wave, rho0.rho, steps_hint)
    rho = final[0]
    return DensityState(0.5 * (rho + rho.conj().T))


def population_trajectory(
    params: LadderParams,
    wave: ControlWaveform,
    initial: t.Union[npt.ArrayLike, DensityState],
    stride: int = 1,
    steps: t.Optional[int] = None,
) -> npt.NDArray[np.float64]:
    """Rows of (t_ns, p_0, ..., p_{M-1}) every `stride` steps of a converged run.

    A state vector is propagated with the closed-system stepper; a DensityState goes through the
    master equation.
    """
    if stride < 1:
        raise PulseDomainError(f"Stride must be positive, got {stride}")

    if isinstance(initial, DensityState):
        if steps is None:
            _, steps = propagate_lindblad_batch(params, wave, initial.rho)
        _, history = lindblad_at_resolution(params, wave, initial.rho[np.newaxis], steps, stride)
        populations = [np.real(np.diagonal(rho[0])) for rho in history]
    else:
        psi = np.asarray(initial, dtype=complex)
        if psi.shape != (params.levels,):
            raise PulseDomainError(f"State vector of shape {psi.shape} does not match {params.levels} levels")
        if steps is None:
            steps = propagate_unitary(params, wave).steps

        populations = [np.abs(psi) ** 2]
        for start in range(0, steps, CHUNK_STEPS):
            stop = min(start + CHUNK_STEPS, steps)
            for k, u in enumerate(step_unitaries(params, wave, steps, start, stop), start=start + 1):
                psi = u @ psi
                if k % stride == 0:
                    populations.append(np.abs(psi) ** 2)

    times = np.arange(len(populations)) * stride * wave.duration / steps
    return np.column_stack((times, np.array(populations)))


def write_populations_csv(stream: t.TextIO, table: npt.NDArray[np.float64], header: t.Sequence[str] = ()) -> None:
    for line in header:
        stream.write(f"# {line}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["t_ns"] + [f"p{j}" for j in range(table.shape[1] - 1)])
    for row in table:
        writer.writerow([format(value, ".17g") for value in row])
