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

import typing as t
from dataclasses import asdict, dataclass, replace
from enum import Enum, auto

from recursive_drag.errors import PulseDomainError


class EnvelopeKind(Enum):
    HANN = auto()
    SIN_POW = auto()
    FOURIER_BL = auto()
    FOURIER_ANSATZ = auto()
    COMPOSITE = auto()


class PulseFamily(Enum):
    HANN = auto()
    DRAG = auto()
    R1D = auto()
    R2D = auto()


class DetuningMode(Enum):
    TIME_DEPENDENT = auto()
    CONSTANT = auto()
    NONE = auto()


class PrefactorMode(Enum):
    ANALYTIC = auto()
    PREDICTED = auto()
    OPTIMIZED = auto()


class SuperlinearPath(Enum):
    LINEAR = auto()
    FULL = auto()


class DerivativeMethod(Enum):
    JET = auto()
    STENCIL = auto()


class TminKind(Enum):
    R1D = auto()
    R2D = auto()
    NUMERIC = auto()


class Provenance(Enum):
    HANN = "hann"
    DRAG = "drag"
    R1D = "r1d"
    R2D = "r2d"


@dataclass(frozen=True)
class PrefactorSet:
    """Calibration knobs applied on top of an analytic pulse.

    ``delta_c`` of ``None`` keeps the waveform's own detuning profile; a number replaces it.
    """

    beta: float = 1.0
    alpha12: float = 1.0
    alpha02: float = 1.0
    alpha13: float = 1.0
    delta_c: t.Optional[float] = None

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise PulseDomainError(f"beta must be positive, got {self.beta}")

    @property
    def alpha(self) -> float:
        return self.alpha12

    @property
    def is_identity(self) -> bool:
        return self == PrefactorSet()

    def updated(self, **changes: t.Any) -> PrefactorSet:
        return replace(self, **changes)

    def to_record(self) -> t.Dict[str, t.Optional[float]]:
        return asdict(self)

    @classmethod
    def from_record(cls, record: t.Mapping[str, t.Any]) -> PrefactorSet:
        delta_c = record.get("delta_c")
        return cls(
            beta=float(record.get("beta", 1.0)),
            alpha12=float(record.get("alpha12", record.get("alpha", 1.0))),
            alpha02=float(record.get("alpha02", 1.0)),
            alpha13=float(record.get("alpha13", 1.0)),
            delta_c=None if delta_c is None else float(delta_c),
        )
