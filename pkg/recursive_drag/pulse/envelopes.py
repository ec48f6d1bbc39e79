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
from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq
from scipy.special import beta as beta_function

from recursive_drag.errors import BracketingError, PulseDomainError, SingularParameterError
from recursive_drag.pulse.properties import EnvelopeKind
from recursive_drag.utils import enum_from_key, enum_key
from recursive_drag.utils.jets import Jet, cos_jet, mirrored, multiply, power, sin_jet
from recursive_drag.utils.quadrature import adaptive_simpson

logger = logging.getLogger(__name__)

MAX_EVAL_ORDER = 3
BOUNDARY_TOLERANCE = 1e-9
AMPLITUDE_TOLERANCE = 1e-9


class Evaluable(t.Protocol):
    """Anything that yields derivative jets on [0, duration].

    ``rate`` is the highest angular frequency the function is built from; it sets the natural scale of
    its derivatives.
    """

    @property
    def duration(self) -> float:
        ...

    @property
    def rate(self) -> float:
        ...

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        ...


def _check_domain(t: npt.ArrayLike, duration: float, order: int, max_order: int = MAX_EVAL_ORDER) -> None:
    if not 0 <= order <= max_order:
        raise PulseDomainError(f"Derivative order must be in 0..{max_order}, got {order}")

    times = np.asarray(t, dtype=float)
    if times.size and (np.min(times) < 0 or np.max(times) > duration or not np.all(np.isfinite(times))):
        raise PulseDomainError(f"Evaluation times must lie in [0, {duration}] ns")


def evaluate(wave: Evaluable, t: npt.ArrayLike, order: int = 0) -> t.Any:
    """Order-th derivative of any evaluable at t (scalar in, scalar out)."""
    _check_domain(t, wave.duration, order)
    value = wave.jet(t, order)[order]
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class Envelope:
    kind: EnvelopeKind
    amplitude: float
    duration: float
    n: int = 0
    j: int = 0
    terms: t.Tuple[t.Tuple[float, Envelope], ...] = ()

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise PulseDomainError(f"Envelope duration must be positive, got {self.duration}")

        if self.kind == EnvelopeKind.SIN_POW and self.n < 1:
            raise PulseDomainError(f"sin^n envelope needs n >= 1, got {self.n}")

        if self.kind == EnvelopeKind.FOURIER_ANSATZ:
            if self.n < 1 or self.j < 1:
                raise PulseDomainError(f"Fourier ansatz needs n, j >= 1, got n={self.n}, j={self.j}")
            if self.j == self.n:
                raise SingularParameterError("Fourier ansatz with k = j^2/n^2 = 1 is undefined")

        if self.kind == EnvelopeKind.COMPOSITE:
            if not self.terms:
                raise PulseDomainError("Composite envelope needs at least one term")
            if any(not math.isclose(term.duration, self.duration) for _, term in self.terms):
                raise PulseDomainError("Composite envelope terms must share the envelope duration")

    @classmethod
    def hann(cls, amplitude: float, duration: float) -> Envelope:
        return cls(EnvelopeKind.HANN, amplitude, duration)

    @classmethod
    def sin_pow(cls, n: int, amplitude: float, duration: float) -> Envelope:
        return cls(EnvelopeKind.SIN_POW, amplitude, duration, n=n)

    @classmethod
    def fourier_bl(cls, amplitude: float, duration: float) -> Envelope:
        return cls(EnvelopeKind.FOURIER_BL, amplitude, duration)

    @classmethod
    def fourier_ansatz(cls, n: int, j: int, amplitude: float, duration: float) -> Envelope:
        return cls(EnvelopeKind.FOURIER_ANSATZ, amplitude, duration, n=n, j=j)

    @classmethod
    def composite(
        cls, terms: t.Sequence[t.Tuple[float, Envelope]], amplitude: float = 1.0
    ) -> Envelope:
        if not terms:
            raise PulseDomainError("Composite envelope needs at least one term")
        return cls(EnvelopeKind.COMPOSITE, amplitude, terms[0][1].duration, terms=tuple(terms))

    @classmethod
    def of_kind(cls, kind: EnvelopeKind, amplitude: float, duration: float, n: int = 0, j: int = 0) -> Envelope:
        return cls(kind, amplitude, duration, n=n, j=j)

    @property
    def k(self) -> float:
        return self.j**2 / self.n**2

    @property
    def max_harmonic(self) -> float:
        """Highest frequency present, in units of 2*pi/T."""
        if self.kind == EnvelopeKind.HANN:
            return 1.0
        if self.kind == EnvelopeKind.SIN_POW:
            return self.n / 2
        if self.kind == EnvelopeKind.FOURIER_BL:
            return 3.0
        if self.kind == EnvelopeKind.FOURIER_ANSATZ:
            return float(max(self.n, self.j))
        return max(term.max_harmonic for _, term in self.terms)

    @property
    def rate(self) -> float:
        return 2 * math.pi * self.max_harmonic / self.duration

    @property
    def unit_area(self) -> float:
        """Integral over [0, T] per unit amplitude."""
        if self.kind == EnvelopeKind.SIN_POW:
            return self.duration / math.pi * float(beta_function(0.5, (self.n + 1) / 2))
        if self.kind == EnvelopeKind.COMPOSITE:
            return sum(weight * term.amplitude * term.unit_area for weight, term in self.terms)
        return self.duration / 2

    @property
    def area(self) -> float:
        return self.amplitude * self.unit_area

    def with_amplitude(self, amplitude: float) -> Envelope:
        return replace(self, amplitude=amplitude)

    def scaled(self, factor: float) -> Envelope:
        return replace(self, amplitude=self.amplitude * factor)

    def eval(self, t: npt.ArrayLike, order: int = 0) -> t.Any:
        return evaluate(self, t, order)

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        return mirrored(self._left_jet, t, self.duration, order)

    def _left_jet(self, t: npt.NDArray[np.float64], order: int) -> Jet:
        w = math.pi / self.duration

        if self.kind == EnvelopeKind.HANN:
            # sin^2(wt) = (1 - cos(2wt)) / 2
            shape = -0.5 * cos_jet(2 * w, t, order)
            shape[0] += 0.5
        elif self.kind == EnvelopeKind.SIN_POW:
            shape = power(sin_jet(w, t, order), self.n)
        elif self.kind == EnvelopeKind.FOURIER_BL:
            # 1/16 cos(6wt) - 9/16 cos(2wt) + 1/2 == sin^4 (3 - 2 sin^2)
            s2 = power(sin_jet(w, t, order), 2)
            s4 = multiply(s2, s2)
            shape = 3 * s4 - 2 * multiply(s4, s2)
        elif self.kind == EnvelopeKind.FOURIER_ANSATZ:
            # 1/2 + (cos(2jwt) - k cos(2nwt)) / (2(k - 1)), written so both ends vanish exactly
            k = self.k
            one_minus_n = -cos_jet(2 * self.n * w, t, order)
            one_minus_n[0] += 1.0
            one_minus_j = -cos_jet(2 * self.j * w, t, order)
            one_minus_j[0] += 1.0
            shape = (k * one_minus_n - one_minus_j) / (2 * (k - 1))
        else:
            shape = sum(weight * term.jet(t, order) for weight, term in self.terms)

        return self.amplitude * shape

    def to_record(self) -> t.Dict[str, t.Any]:
        record: t.Dict[str, t.Any] = {"kind": enum_key(self.kind)}
        if self.kind in (EnvelopeKind.SIN_POW, EnvelopeKind.FOURIER_ANSATZ):
            record["n"] = self.n
        if self.kind == EnvelopeKind.FOURIER_ANSATZ:
            record["j"] = self.j
        if self.kind == EnvelopeKind.COMPOSITE:
            record["terms"] = [{"weight": weight, **term.to_record()} for weight, term in self.terms]
        record["amplitude"] = self.amplitude
        record["duration_ns"] = self.duration
        return record

    @classmethod
    def from_record(cls, record: t.Mapping[str, t.Any]) -> Envelope:
        try:
            kind = enum_from_key(EnvelopeKind, str(record["kind"]))
            amplitude = float(record["amplitude"])
            duration = float(record["duration_ns"])
        except KeyError as e:
            raise PulseDomainError(f"Envelope record is missing {e}") from None
        except ValueError as e:
            raise PulseDomainError(str(e)) from None

        if kind == EnvelopeKind.COMPOSITE:
            terms = [(float(term.get("weight", 1.0)), cls.from_record(term)) for term in record.get("terms", [])]
            return cls.composite(terms, amplitude)

        return cls(kind, amplitude, duration, n=int(record.get("n", 0)), j=int(record.get("j", 0)))


def rotation_angle(wave: Evaluable, duration: t.Optional[float] = None) -> float:
    """Integral of the in-phase drive over [0, T]."""
    stop = wave.duration if duration is None else duration
    return float(adaptive_simpson(lambda x: wave.jet(x, 0)[0], 0.0, stop))


class AmplitudePipeline(t.Protocol):
    def naive_amplitude(self, duration: float, theta: float) -> float:
        ...

    def omega_x(self, amplitude: float, duration: float) -> Evaluable:
        ...


@dataclass(frozen=True)
class BasePipeline:
    """Plain base shape: Omega_x is the envelope itself."""

    kind: EnvelopeKind = EnvelopeKind.HANN
    n: int = 0
    j: int = 0

    def shape(self, amplitude: float, duration: float) -> Envelope:
        return Envelope.of_kind(self.kind, amplitude, duration, n=self.n, j=self.j)

    def naive_amplitude(self, duration: float, theta: float) -> float:
        return theta / self.shape(1.0, duration).unit_area

    def omega_x(self, amplitude: float, duration: float) -> Evaluable:
        return self.shape(amplitude, duration)


def calibrate_amplitude(pipeline: AmplitudePipeline, duration: float, theta_target: float = math.pi) -> float:
    """Amplitude whose Omega_x integrates to theta_target, by Brent's method on [0.5, 2] x naive."""
    if theta_target == 0:
        return 0.0

    naive = pipeline.naive_amplitude(duration, theta_target)

    def residual(amplitude: float) -> float:
        return rotation_angle(pipeline.omega_x(amplitude, duration), duration) - theta_target

    low, high = sorted((0.5 * naive, 2.0 * naive))
    residual_low = residual(low)
    residual_high = residual(high)
    if residual_low * residual_high > 0:
        raise BracketingError(
            f"No sign change of the rotation angle residual in [{low:.6g}, {high:.6g}] rad/ns "
            f"({residual_low:.3e}, {residual_high:.3e})"
        )

    amplitude = float(brentq(residual, low, high, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    error = abs(residual(amplitude))
    if error > AMPLITUDE_TOLERANCE:
        raise BracketingError(f"Amplitude search stopped {error:.3e} rad away from the target angle")

    logger.debug(f"Calibrated amplitude {amplitude:.12g} rad/ns for theta={theta_target:.6g} at T={duration} ns")
    return amplitude


@dataclass(frozen=True)
class BoundaryResidual:
    order: int
    start: float
    end: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.start) <= self.tolerance and abs(self.end) <= self.tolerance


@dataclass(frozen=True)
class BoundaryReport:
    peak: float
    residuals: t.Tuple[BoundaryResidual, ...]

    @property
    def passed(self) -> bool:
        return all(residual.passed for residual in self.residuals)

    @property
    def failed_orders(self) -> t.List[int]:
        return [residual.order for residual in self.residuals if not residual.passed]

    def __str__(self) -> str:
        lines = [f"peak {self.peak:.6g}"]
        for residual in self.residuals:
            status = "pass" if residual.passed else "FAIL"
            lines.append(
                f"order {residual.order}: |f(0)|={abs(residual.start):.3e} |f(T)|={abs(residual.end):.3e} "
                f"tol={residual.tolerance:.3e} {status}"
            )
        return "\n".join(lines)


def check_boundary(wave: Evaluable, max_order: int = 3, tol: float = BOUNDARY_TOLERANCE) -> BoundaryReport:
    """Endpoint magnitudes of every derivative up to max_order.

    The tolerance for order k is tol * peak * (2*pi/T)^k, so it is relative to the peak amplitude.
    """
    if not 0 <= max_order <= MAX_EVAL_ORDER:
        raise PulseDomainError(f"Boundary check order must be in 0..{MAX_EVAL_ORDER}, got {max_order}")

    duration = wave.duration
    peak = float(np.max(np.abs(wave.jet(np.linspace(0.0, duration, 4097), 0)[0])))
    ends = wave.jet(np.array([0.0, duration]), max_order)
    frequency = 2 * math.pi / duration

    residuals = tuple(
        BoundaryResidual(order, float(ends[order, 0]), float(ends[order, 1]), tol * peak * frequency**order)
        for order in range(max_order + 1)
    )
    return BoundaryReport(peak, residuals)
