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

"""Rotating-frame ladder Hamiltonian.

Level j sits at energy Delta_j (Delta_0 = Delta_1 = 0) and couples to j - 1 with strength lambda_j.
Frequencies are angular (rad/ns), times in ns.
"""

from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt

from recursive_drag.errors import PulseDomainError

if t.TYPE_CHECKING:
    from recursive_drag.pulse.synthesis import ControlWaveform

logger = logging.getLogger(__name__)

MIN_LEVELS = 2
MAX_LEVELS = 6
DEFAULT_DELTA2 = -2 * math.pi * 0.225


def ghz_to_rad_per_ns(value: float) -> float:
    return 2 * math.pi * value


def rad_per_ns_to_ghz(value: float) -> float:
    return value / (2 * math.pi)


def rate_from_microseconds(time_us: t.Optional[float]) -> float:
    """1/T in 1/ns; None or infinity means no decay."""
    if time_us is None or math.isinf(time_us):
        return 0.0
    if time_us <= 0:
        raise PulseDomainError(f"Coherence times must be positive, got {time_us} us")
    return 1.0 / (time_us * 1000.0)


@dataclass(frozen=True)
class LadderParams:
    levels: int
    detunings: t.Tuple[float, ...]
    couplings: t.Tuple[float, ...]
    gamma: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self) -> None:
        if not MIN_LEVELS <= self.levels <= MAX_LEVELS:
            raise PulseDomainError(f"Level count must be in {MIN_LEVELS}..{MAX_LEVELS}, got {self.levels}")
        if len(self.detunings) != self.levels - 1 or len(self.couplings) != self.levels - 1:
            raise PulseDomainError(
                f"{self.levels} levels need {self.levels - 1} detunings and couplings, "
                f"got {len(self.detunings)} and {len(self.couplings)}"
            )
        if self.detunings[0] != 0:
            raise PulseDomainError(f"The drive must be resonant with the qubit (Delta_1 = 0), got {self.detunings[0]}")
        if self.couplings[0] != 1:
            raise PulseDomainError(f"Couplings are relative to the qubit transition, lambda_1 = {self.couplings[0]}")
        if self.gamma < 0 or self.gamma_phi < 0:
            raise PulseDomainError("Decay rates must be nonnegative")

    @property
    def energies(self) -> npt.NDArray[np.float64]:
        return np.array((0.0,) + tuple(self.detunings))

    @property
    def delta2(self) -> float:
        return self.detunings[1] if self.levels > 2 else 0.0

    @property
    def delta3(self) -> float:
        """Third-level detuning; the Duffing value 3 Delta2 when the ladder is truncated below it."""
        return self.detunings[2] if self.levels > 3 else 3 * self.delta2

    @property
    def lambda2(self) -> float:
        return self.couplings[1] if self.levels > 2 else math.sqrt(2)

    @property
    def lambda3(self) -> float:
        return self.couplings[2] if self.levels > 3 else math.sqrt(3)

    @property
    def dissipative(self) -> bool:
        return self.gamma > 0 or self.gamma_phi > 0

    def with_decoherence(self, t1_us: t.Optional[float], t2_us: t.Optional[float]) -> LadderParams:
        return replace(self, gamma=rate_from_microseconds(t1_us), gamma_phi=rate_from_microseconds(t2_us))

    def closed(self) -> LadderParams:
        return replace(self, gamma=0.0, gamma_phi=0.0)

    def with_delta3(self, delta3: float) -> LadderParams:
        if self.levels < 4:
            raise PulseDomainError("Delta3 needs at least four levels")
        detunings = list(self.detunings)
        detunings[2] = delta3
        return replace(self, detunings=tuple(detunings))

    def truncated(self, levels: int) -> LadderParams:
        return replace(
            self, levels=levels, detunings=self.detunings[: levels - 1], couplings=self.couplings[: levels - 1]
        )

    def to_record(self) -> t.Dict[str, t.Any]:
        return {
            "levels": self.levels,
            "delta2_rad_per_ns": self.delta2,
            "delta2_ghz": rad_per_ns_to_ghz(self.delta2),
            "detunings_rad_per_ns": list(self.detunings),
            "couplings": list(self.couplings),
            "t1_us": None if self.gamma == 0 else 1.0 / (self.gamma * 1000.0),
            "t2_us": None if self.gamma_phi == 0 else 1.0 / (self.gamma_phi * 1000.0),
        }

    @classmethod
    def from_record(cls, record: t.Mapping[str, t.Any]) -> LadderParams:
        if "delta2_rad_per_ns" in record:
            delta2 = float(record["delta2_rad_per_ns"])
        elif "delta2_ghz" in record:
            delta2 = ghz_to_rad_per_ns(float(record["delta2_ghz"]))
        else:
            delta2 = DEFAULT_DELTA2

        params = duffing_ladder(delta2, int(record.get("levels", 4)))
        if "detunings_rad_per_ns" in record:
            params = replace(params, detunings=tuple(float(value) for value in record["detunings_rad_per_ns"]))
        return params.with_decoherence(record.get("t1_us"), record.get("t2_us"))


def duffing_ladder(delta2: float = DEFAULT_DELTA2, levels: int = 4) -> LadderParams:
    """Delta_j = Delta2 j (j - 1) / 2 and lambda_j = sqrt(j)."""
    if levels < 3:
        raise PulseDomainError(f"Leakage modelling needs at least three levels, got {levels}")
    if delta2 == 0:
        logger.warning("Harmonic ladder (Delta2 = 0): DRAG-type synthesis will reject it")

    return LadderParams(
        levels=levels,
        detunings=tuple(delta2 * j * (j - 1) / 2 for j in range(1, levels)),
        couplings=tuple(math.sqrt(j) for j in range(1, levels)),
    )


def annihilation(levels: int) -> npt.NDArray[np.complex128]:
    return np.diag(np.sqrt(np.arange(1, levels)), k=1).astype(complex)


def number_operator(levels: int) -> npt.NDArray[np.complex128]:
    return np.diag(np.arange(levels)).astype(complex)


def hamiltonian_from_samples(
    params: LadderParams,
    omega_x: npt.ArrayLike,
    omega_y: npt.ArrayLike,
    delta: npt.ArrayLike,
) -> npt.NDArray[np.complex128]:
    """Batched Hamiltonians, shape (*batch, M, M), from sampled drive channels."""
    ox = np.asarray(omega_x, dtype=float)
    oy = np.asarray(omega_y, dtype=float)
    shift = np.asarray(delta, dtype=float)
    batch = np.broadcast_shapes(ox.shape, oy.shape, shift.shape)

    m = params.levels
    h = np.zeros(batch + (m, m), dtype=complex)
    index = np.arange(m)
    h[..., index, index] = params.energies + index * shift[..., np.newaxis]

    drive = 0.5 * (ox - 1j * oy)
    for j, coupling in enumerate(params.couplings, start=1):
        h[..., j - 1, j] = coupling * drive
        h[..., j, j - 1] = coupling * np.conj(drive)
    return h


def hamiltonian(params: LadderParams, wave: ControlWaveform, t: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """H(t) for scalar or array t; shape (M, M) or (*t.shape, M, M)."""
    times = np.asarray(t, dtype=float)
    if times.size and (np.min(times) < 0 or np.max(times) > wave.duration):
        raise PulseDomainError(f"Hamiltonian times must lie in [0, {wave.duration}] ns")
    return hamiltonian_from_samples(params, *wave.sample(t))
