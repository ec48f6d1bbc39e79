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

import csv
import logging
import math
import typing as t
from dataclasses import dataclass, field, replace

import numpy as np
import numpy.typing as npt

from recursive_drag.errors import (
    ConfigError,
    NumericalConvergenceError,
    PulseDomainError,
    SingularParameterError,
    SynthesisInfeasibleError,
)
from recursive_drag.pulse.envelopes import Envelope, Evaluable, calibrate_amplitude, check_boundary
from recursive_drag.pulse.properties import (
    DerivativeMethod,
    DetuningMode,
    EnvelopeKind,
    PrefactorSet,
    Provenance,
    PulseFamily,
    SuperlinearPath,
    TminKind,
)
from recursive_drag.utils.jets import Jet, derivative, mirrored, multiply, power, sqrt_regular, sqrt_series
from recursive_drag.utils.quadrature import converged_derivative

if t.TYPE_CHECKING:
    from recursive_drag.model import LadderParams

logger = logging.getLogger(__name__)

SCAN_POINTS = 4096
FEASIBILITY_TOLERANCE = 1e-12
# Radicands at or below this fraction of their peak are expanded as a series around the touching point
SINGULAR_FLOOR = 1e-24
SQRT_MARGIN = 4
TMIN_RESOLUTION = 1e-3

Samples = t.Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.float64]]


@dataclass(frozen=True)
class Zero:
    duration: float
    rate: float = 0.0

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        return np.zeros((order + 1,) + np.shape(t))


@dataclass(frozen=True)
class Constant:
    value: float
    duration: float
    rate: float = 0.0

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        out = np.zeros((order + 1,) + np.shape(t))
        out[0] = self.value
        return out


@dataclass(frozen=True)
class Scaled:
    source: Evaluable
    factor: float

    @property
    def duration(self) -> float:
        return self.source.duration

    @property
    def rate(self) -> float:
        return self.source.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        return self.factor * self.source.jet(t, order)


@dataclass(frozen=True)
class Derivative:
    """factor * d/dt source"""

    source: Evaluable
    factor: float

    @property
    def duration(self) -> float:
        return self.source.duration

    @property
    def rate(self) -> float:
        return self.source.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        return self.factor * derivative(self.source.jet(t, order + 1))


@dataclass(frozen=True)
class Square:
    """factor * source^2, the shape of a Stark shift."""

    source: Evaluable
    factor: float

    @property
    def duration(self) -> float:
        return self.source.duration

    @property
    def rate(self) -> float:
        return 2 * self.source.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        values = self.source.jet(t, order)
        return self.factor * multiply(values, values)


def _radicand(inner: Jet, coefficient: float) -> Jet:
    """Jet of f^2 + c (f'^2 + f'' f) from a jet of f two orders deeper."""
    order = inner.shape[0] - 3
    first = derivative(inner)
    second = derivative(first)
    return multiply(inner, inner)[: order + 1] + coefficient * (
        multiply(first, first)[: order + 1] + multiply(second, inner)
    )


def radicand_profile(
    inner: Evaluable, coefficient: float, points: int = SCAN_POINTS
) -> t.Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    grid = np.linspace(0.0, inner.duration, points)
    return grid, _radicand(inner.jet(grid, 2), coefficient)[0]


@dataclass(frozen=True)
class RecursivePulse:
    """sqrt(f^2 + c (f'^2 + f'' f)) of a symmetric inner pulse f, with c = 2 alpha / Delta^2.

    ``reference`` is the peak radicand on the feasibility scan and sets the scale for deciding when the
    radicand touches zero.
    """

    inner: Evaluable
    coefficient: float
    level: str
    reference: float

    @classmethod
    def build(cls, inner: Evaluable, anharmonicity: float, alpha: float, level: str) -> RecursivePulse:
        if anharmonicity == 0:
            raise SingularParameterError(f"{level}: recursion needs a nonzero anharmonicity")

        coefficient = 2 * alpha / anharmonicity**2
        grid, radicand = radicand_profile(inner, coefficient)
        peak = float(np.max(radicand))
        worst = int(np.argmin(radicand))
        if radicand[worst] < -FEASIBILITY_TOLERANCE * max(peak, 0.0) or (peak <= 0 and radicand[worst] < 0):
            raise SynthesisInfeasibleError(
                f"{level} radicand is negative at t={grid[worst]:.6g} ns ({radicand[worst]:.6g})",
                level=level,
                worst_time=float(grid[worst]),
                worst_radicand=float(radicand[worst]),
            )
        return cls(inner, coefficient, level, max(peak, 0.0))

    @property
    def duration(self) -> float:
        return self.inner.duration

    @property
    def rate(self) -> float:
        return self.inner.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        return mirrored(self._left_jet, t, self.duration, order)

    def _left_jet(self, t: npt.NDArray[np.float64], order: int) -> Jet:
        if self.reference == 0:
            return np.zeros((order + 1,) + t.shape)

        radicand = _radicand(self.inner.jet(t, order + 2), self.coefficient)
        worst = int(np.argmin(radicand[0])) if t.size else 0
        if t.size and radicand[0, worst] < -FEASIBILITY_TOLERANCE * self.reference:
            raise SynthesisInfeasibleError(
                f"{self.level} radicand is negative at t={t[worst]:.6g} ns",
                level=self.level,
                worst_time=float(t[worst]),
                worst_radicand=float(radicand[0, worst]),
            )

        singular = radicand[0] <= SINGULAR_FLOOR * self.reference
        out = np.empty_like(radicand)
        if not singular.all():
            out[:, ~singular] = sqrt_regular(radicand[:, ~singular])

        for index in np.flatnonzero(singular):
            deeper = _radicand(self.inner.jet(t[index : index + 1], order + 2 + SQRT_MARGIN), self.coefficient)
            out[:, index] = sqrt_series(deeper[:, 0], order, reference=self.reference, rate=self.rate)
        return out


@dataclass(frozen=True)
class SuperlinearTerms:
    """Auxiliary A of the third-order correction, built from the uncorrected Omega_x."""

    omega_x: Evaluable
    delta2: float
    lambda2: float
    path: SuperlinearPath = SuperlinearPath.LINEAR
    omega1: t.Optional[Evaluable] = None
    omega2: t.Optional[Evaluable] = None
    delta3: t.Optional[float] = None
    lambda3: t.Optional[float] = None

    @property
    def duration(self) -> float:
        return self.omega_x.duration

    @property
    def rate(self) -> float:
        return 3 * self.omega_x.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        if self.path == SuperlinearPath.LINEAR:
            return (4 - self.lambda2**2) / 8 * power(self.omega_x.jet(t, order), 3)
        return self._full_jet(t, order)

    def _full_jet(self, t: npt.ArrayLike, order: int) -> Jet:
        assert self.omega1 is not None and self.omega2 is not None
        assert self.delta3 is not None and self.lambda3 is not None

        d, d3 = self.delta2, self.delta3
        l2, l3 = self.lambda2**2, self.lambda3**2
        offset = (d3 - 2 * d) ** 2

        x = self.omega_x.jet(t, order + 2)
        o1 = self.omega1.jet(t, order + 2)
        o2 = self.omega2.jet(t, order + 2)

        # the qubit-level detuning Delta1 is zero, so only the 1-3 offset survives in the Omega1 term
        g = -(d**2 - d3**2) * offset * l3 / d3**2 * multiply(multiply(derivative(o2), o2), x) - (
            offset * l3 * d**2 / d3**2
        ) * multiply(multiply(derivative(o1), o1), x)

        x = x[: order + 1]
        o1 = o1[: order + 1]
        o2 = o2[: order + 1]
        total = (
            derivative(g)
            + 3 * d * (d**3 + d3 * offset * l3) * multiply(multiply(o1, o1), x)
            + (d**2 - d3**2) * offset / d3 * 3 * d * l3 * multiply(multiply(o2, o2), x)
            + d**3 * (-3 * d3 * l3 + d * (31 - 14 * l2 + 10 * l3)) * power(x, 3)
        )
        return total / (24 * d**4)


@dataclass(frozen=True)
class SuperlinearX:
    omega_x: Evaluable
    delta2: float
    lambda2: float

    @property
    def duration(self) -> float:
        return self.omega_x.duration

    @property
    def rate(self) -> float:
        return 3 * self.omega_x.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        x = self.omega_x.jet(t, order)
        return x - (4 - self.lambda2**2) / (8 * self.delta2**2) * power(x, 3)


@dataclass(frozen=True)
class SuperlinearY:
    """-d/dt Omega_x' / Delta2 - dA/dt / Delta2^3"""

    corrected_x: Evaluable
    terms: SuperlinearTerms
    method: DerivativeMethod = DerivativeMethod.JET

    @property
    def duration(self) -> float:
        return self.corrected_x.duration

    @property
    def rate(self) -> float:
        return self.terms.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        d = self.terms.delta2
        drag = -derivative(self.corrected_x.jet(t, order + 1)) / d
        if self.method == DerivativeMethod.JET:
            return drag - derivative(self.terms.jet(t, order + 1)) / d**3

        if order > 0:
            raise PulseDomainError("Stencil-differentiated superlinear channel only provides values")
        a_dot = converged_derivative(lambda s: self.terms.jet(s, 0)[0], t, self.duration / 1024)
        return drag - a_dot[np.newaxis] / d**3


@dataclass(frozen=True)
class SuperlinearDetuning:
    """delta - A Omega_x / Delta2^3"""

    delta: Evaluable
    terms: SuperlinearTerms

    @property
    def duration(self) -> float:
        return self.terms.duration

    @property
    def rate(self) -> float:
        return 4 * self.terms.omega_x.rate

    def jet(self, t: npt.ArrayLike, order: int) -> Jet:
        shift = multiply(self.terms.jet(t, order), self.terms.omega_x.jet(t, order)) / self.terms.delta2**3
        return self.delta.jet(t, order) - shift


@dataclass(frozen=True)
class ControlWaveform:
    omega_x: Evaluable
    omega_y: Evaluable
    delta: Evaluable
    duration: float
    provenance: Provenance
    superlinear: bool = False
    prefactors: PrefactorSet = field(default_factory=PrefactorSet)

    @property
    def tag(self) -> str:
        return self.provenance.value + ("+superlinear" if self.superlinear else "")

    @classmethod
    def zero(cls, duration: float) -> ControlWaveform:
        return cls(Zero(duration), Zero(duration), Zero(duration), duration, Provenance.HANN)

    def sample(self, t: npt.ArrayLike) -> Samples:
        return self.omega_x.jet(t, 0)[0], self.omega_y.jet(t, 0)[0], self.delta.jet(t, 0)[0]

    def table(self, samples: int) -> npt.NDArray[np.float64]:
        if samples < 2:
            raise PulseDomainError(f"Need at least two samples, got {samples}")
        grid = np.linspace(0.0, self.duration, samples)
        return np.column_stack((grid, *self.sample(grid)))

    def write_csv(self, stream: t.TextIO, samples: int, header: t.Sequence[str] = ()) -> None:
        for line in header:
            stream.write(f"# {line}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t_ns", "omega_x", "omega_y", "delta"])
        for row in self.table(samples):
            writer.writerow([format(value, ".17g") for value in row])


def synth_drag(
    base: Evaluable,
    delta2: float,
    lambda2: float = math.sqrt(2),
    alpha: float = 1.0,
    detuning: DetuningMode = DetuningMode.TIME_DEPENDENT,
    delta_c: t.Optional[float] = None,
) -> ControlWaveform:
    if delta2 == 0:
        raise SingularParameterError("DRAG needs a nonzero anharmonicity")

    if detuning == DetuningMode.CONSTANT and delta_c is None:
        raise ConfigError("constant detuning mode needs delta_c", "delta_c")
    if detuning != DetuningMode.CONSTANT and delta_c is not None:
        raise ConfigError(f"delta_c given with detuning mode {detuning.name.lower()}", "delta_c")

    return ControlWaveform(
        omega_x=base,
        omega_y=Derivative(base, -alpha / delta2),
        delta=_detuning_channel(base, delta2, lambda2, detuning, delta_c),
        duration=base.duration,
        provenance=Provenance.DRAG,
    )


def _detuning_channel(
    omega_x: Evaluable, delta2: float, lambda2: float, mode: DetuningMode, delta_c: t.Optional[float]
) -> Evaluable:
    if mode == DetuningMode.TIME_DEPENDENT:
        return Square(omega_x, -(4 - lambda2**2) / (4 * delta2))
    if mode == DetuningMode.CONSTANT:
        return Constant(t.cast(float, delta_c), omega_x.duration)
    return Zero(omega_x.duration)


def synth_r1d(omega1: Evaluable, delta2: float, alpha02: float = 1.0, level: str = "r1d") -> RecursivePulse:
    if isinstance(omega1, Envelope):
        report = check_boundary(omega1, 2)
        if not report.passed:
            logger.warning(f"Trial pulse {omega1.kind.name} fails boundary orders {report.failed_orders} for R1D")
    return RecursivePulse.build(omega1, delta2, alpha02, level)


def synth_r2d(
    omega2: Evaluable, delta2: float, delta3: float, alpha13: float = 1.0, alpha02: float = 1.0
) -> t.Tuple[RecursivePulse, RecursivePulse]:
    if isinstance(omega2, Envelope):
        report = check_boundary(omega2, 3)
        if not report.passed:
            logger.warning(f"Trial pulse {omega2.kind.name} fails boundary orders {report.failed_orders} for R2D")

    omega1 = RecursivePulse.build(omega2, delta3, alpha13, "r2d-inner")
    omega_x = RecursivePulse.build(omega1, delta2, alpha02, "r2d-outer")
    return omega1, omega_x


def superlinear_correct(
    omega_x: Evaluable,
    delta2: float,
    lambda2: float = math.sqrt(2),
    delta: t.Optional[Evaluable] = None,
    *,
    omega1: t.Optional[Evaluable] = None,
    omega2: t.Optional[Evaluable] = None,
    delta3: t.Optional[float] = None,
    lambda3: t.Optional[float] = None,
    path: SuperlinearPath = SuperlinearPath.LINEAR,
    method: DerivativeMethod = DerivativeMethod.JET,
) -> t.Tuple[Evaluable, Evaluable, Evaluable]:
    """Third-order corrections (Omega_x', Omega_y', delta')."""
    if delta2 == 0:
        raise SingularParameterError("Superlinear correction needs a nonzero anharmonicity")

    if path == SuperlinearPath.FULL:
        missing = [
            name
            for name, value in (("omega1", omega1), ("omega2", omega2), ("delta3", delta3), ("lambda3", lambda3))
            if value is None
        ]
        if missing:
            raise ConfigError(f"full superlinear correction needs {', '.join(missing)}", "superlinear")
        if delta3 == 0:
            raise SingularParameterError("Full superlinear correction needs a nonzero Delta3")

    terms = SuperlinearTerms(omega_x, delta2, lambda2, path, omega1, omega2, delta3, lambda3)
    corrected_x = SuperlinearX(omega_x, delta2, lambda2)
    return (
        corrected_x,
        SuperlinearY(corrected_x, terms, method),
        SuperlinearDetuning(delta if delta is not None else Zero(omega_x.duration), terms),
    )


def apply_prefactors(wave: ControlWaveform, prefactors: PrefactorSet) -> ControlWaveform:
    """beta scales both quadratures, alpha12 the Y quadrature; delta_c replaces the detuning profile."""
    if prefactors.is_identity:
        return wave

    return replace(
        wave,
        omega_x=wave.omega_x if prefactors.beta == 1 else Scaled(wave.omega_x, prefactors.beta),
        omega_y=Scaled(wave.omega_y, prefactors.beta * prefactors.alpha12),
        delta=wave.delta if prefactors.delta_c is None else Constant(prefactors.delta_c, wave.duration),
        prefactors=prefactors,
    )


def _numeric_tmin(recipe: PulseRecipe, resolution: float = TMIN_RESOLUTION) -> float:
    def feasible(duration: float) -> bool:
        return recipe.min_relative_radicand(duration) >= -FEASIBILITY_TOLERANCE

    high = 1.0
    while not feasible(high):
        high *= 2
        if high > 1e4:
            raise NumericalConvergenceError("No feasible gate time below 10 us", family=recipe.family.name)

    low = high / 2
    while feasible(low):
        if low < resolution:
            return 0.0
        high, low = low, low / 2

    while high - low > resolution:
        middle = 0.5 * (low + high)
        if feasible(middle):
            high = middle
        else:
            low = middle

    logger.debug(f"Numeric T_min of {recipe.family.name} over {recipe.base_kind.name}: {high:.4f} ns")
    return high


def tmin(
    kind: TminKind,
    delta2: float,
    *,
    n: int = 3,
    delta3: t.Optional[float] = None,
    alpha02: float = 1.0,
    alpha13: float = 1.0,
    pipeline: t.Optional[PulseRecipe] = None,
    resolution: float = TMIN_RESOLUTION,
) -> float:
    """Smallest gate time keeping every square-root radicand nonnegative.

    For the sin^n trial pulse the R2D value grows with Delta3/Delta2. The numeric T_min of the band-limited
    Fourier base does not follow that ordering: it shrinks as Delta3/Delta2 goes from 2.5 to 4.
    """
    if kind == TminKind.NUMERIC:
        if pipeline is None:
            raise ConfigError("numeric T_min needs a pulse recipe", "pipeline")
        return _numeric_tmin(pipeline, resolution)

    if n < 1:
        raise PulseDomainError(f"sin^n trial pulse needs n >= 1, got {n}")
    if delta2 == 0:
        raise SingularParameterError("T_min needs a nonzero anharmonicity")

    if kind == TminKind.R1D:
        return math.sqrt(2 * n * alpha02) * math.pi / abs(delta2)

    if not delta3:
        raise SingularParameterError("R2D T_min needs a nonzero Delta3")

    d2, d3 = delta2**2, delta3**2
    spread = alpha13 * d2 + alpha02 * d3
    discriminant = n**2 * spread**2 - (12 * n**2 - 4 * n) * alpha13 * alpha02 * d2 * d3
    generalized = alpha02 != 1 or alpha13 != 1

    if discriminant >= 0 and not (generalized and alpha02 <= alpha13):
        return math.pi * math.sqrt(n * spread + math.sqrt(discriminant)) / abs(delta2 * delta3)

    logger.warning(
        f"R2D T_min closed form does not apply (n={n}, Delta3/Delta2={delta3 / delta2:.3g}, "
        f"alpha02={alpha02}, alpha13={alpha13}); solving numerically"
    )
    recipe = pipeline or PulseRecipe(
        PulseFamily.R2D,
        delta2,
        delta3,
        shape=EnvelopeKind.SIN_POW,
        n=n,
        prefactors=PrefactorSet(alpha02=alpha02, alpha13=alpha13),
    )
    return _numeric_tmin(recipe, resolution)


DEFAULT_SHAPES = {
    PulseFamily.HANN: EnvelopeKind.HANN,
    PulseFamily.DRAG: EnvelopeKind.HANN,
    PulseFamily.R1D: EnvelopeKind.SIN_POW,
    PulseFamily.R2D: EnvelopeKind.FOURIER_BL,
}


@dataclass(frozen=True)
class PulseRecipe:
    """Everything needed to turn a gate time into a control waveform.

    The amplitude is fixed so that the uncorrected Omega_x integrates to ``theta``; superlinear
    corrections and prefactors are applied on top of that normalization.
    """

    family: PulseFamily
    delta2: float
    delta3: float
    lambda2: float = math.sqrt(2)
    lambda3: float = math.sqrt(3)
    shape: t.Optional[EnvelopeKind] = None
    n: int = 0
    j: int = 0
    superlinear: bool = False
    superlinear_path: t.Optional[SuperlinearPath] = None
    detuning: DetuningMode = DetuningMode.TIME_DEPENDENT
    prefactors: PrefactorSet = field(default_factory=PrefactorSet)
    theta: float = math.pi

    def __post_init__(self) -> None:
        constant = self.detuning == DetuningMode.CONSTANT
        if constant and self.prefactors.delta_c is None:
            raise ConfigError("constant detuning mode needs a delta_c prefactor", "delta_c")
        if not constant and self.prefactors.delta_c is not None:
            raise ConfigError(
                f"delta_c cannot be combined with detuning mode {self.detuning.name.lower()}", "delta_c"
            )

    @classmethod
    def for_ladder(cls, family: PulseFamily, params: LadderParams, **kwargs: t.Any) -> PulseRecipe:
        return cls(family, params.delta2, params.delta3, params.lambda2, params.lambda3, **kwargs)

    @property
    def base_kind(self) -> EnvelopeKind:
        return self.shape or DEFAULT_SHAPES[self.family]

    @property
    def base_n(self) -> int:
        if self.n:
            return self.n
        return 3 if self.base_kind == EnvelopeKind.SIN_POW else 0

    @property
    def path(self) -> SuperlinearPath:
        if self.superlinear_path is not None:
            return self.superlinear_path
        return SuperlinearPath.LINEAR if self.family in (PulseFamily.HANN, PulseFamily.DRAG) else SuperlinearPath.FULL

    def with_prefactors(self, prefactors: PrefactorSet) -> PulseRecipe:
        detuning = self.detuning
        if prefactors.delta_c is not None:
            detuning = DetuningMode.CONSTANT
        elif detuning == DetuningMode.CONSTANT:
            detuning = DetuningMode.NONE
        return replace(self, prefactors=prefactors, detuning=detuning)

    def base(self, amplitude: float, duration: float) -> Envelope:
        return Envelope.of_kind(self.base_kind, amplitude, duration, n=self.base_n, j=self.j)

    def naive_amplitude(self, duration: float, theta: float) -> float:
        return theta / self.base(1.0, duration).unit_area

    def channels(self, amplitude: float, duration: float) -> t.Tuple[Evaluable, Evaluable, Evaluable]:
        """(Omega_x, Omega_1, Omega_2) before superlinear corrections and prefactors."""
        base = self.base(amplitude, duration)
        if self.family == PulseFamily.R1D:
            return synth_r1d(base, self.delta2, self.prefactors.alpha02), base, base
        if self.family == PulseFamily.R2D:
            omega1, omega_x = synth_r2d(
                base, self.delta2, self.delta3, self.prefactors.alpha13, self.prefactors.alpha02
            )
            return omega_x, omega1, base
        return base, base, base

    def omega_x(self, amplitude: float, duration: float) -> Evaluable:
        return self.channels(amplitude, duration)[0]

    def amplitude(self, duration: float) -> float:
        return calibrate_amplitude(self, duration, self.theta)

    def build(self, duration: float, amplitude: t.Optional[float] = None) -> ControlWaveform:
        try:
            if amplitude is None:
                amplitude = self.amplitude(duration)
            wave = self._assemble(amplitude, duration)
        except SynthesisInfeasibleError as e:
            minimum = self.t_min()
            raise SynthesisInfeasibleError(
                f"{e} (T={duration} ns is below T_min={minimum:.4f} ns)",
                level=e.level,
                t_min=minimum,
                worst_time=e.worst_time,
                worst_radicand=e.worst_radicand,
            ) from e
        return apply_prefactors(wave, self.prefactors)

    def _assemble(self, amplitude: float, duration: float) -> ControlWaveform:
        omega_x, omega1, omega2 = self.channels(amplitude, duration)
        provenance = Provenance[self.family.name]

        if self.family == PulseFamily.HANN:
            return ControlWaveform(omega_x, Zero(duration), Zero(duration), duration, provenance)

        # the analytic detuning profile; a delta_c prefactor replaces it later
        mode = DetuningMode.NONE if self.detuning == DetuningMode.CONSTANT else self.detuning
        delta = _detuning_channel(omega_x, self.delta2, self.lambda2, mode, None)
        if not self.superlinear:
            return ControlWaveform(omega_x, Derivative(omega_x, -1 / self.delta2), delta, duration, provenance)

        corrected_x, corrected_y, corrected_delta = superlinear_correct(
            omega_x,
            self.delta2,
            self.lambda2,
            delta,
            omega1=omega1,
            omega2=omega2,
            delta3=self.delta3,
            lambda3=self.lambda3,
            path=self.path,
        )
        return ControlWaveform(corrected_x, corrected_y, corrected_delta, duration, provenance, superlinear=True)

    def min_relative_radicand(self, duration: float) -> float:
        """Smallest radicand over all recursion levels relative to its own peak, at unit amplitude."""
        if self.family not in (PulseFamily.R1D, PulseFamily.R2D):
            return math.inf

        base = self.base(1.0, duration)
        if self.family == PulseFamily.R1D:
            return _relative_minimum(base, self.delta2, self.prefactors.alpha02)

        inner = _relative_minimum(base, self.delta3, self.prefactors.alpha13)
        if inner < -FEASIBILITY_TOLERANCE:
            return inner
        omega1 = RecursivePulse.build(base, self.delta3, self.prefactors.alpha13, "r2d-inner")
        return min(inner, _relative_minimum(omega1, self.delta2, self.prefactors.alpha02))

    def t_min(self) -> float:
        return tmin(TminKind.NUMERIC, self.delta2, pipeline=self)


def _relative_minimum(inner: Evaluable, anharmonicity: float, alpha: float) -> float:
    if anharmonicity == 0:
        raise SingularParameterError("recursion needs a nonzero anharmonicity")
    _, radicand = radicand_profile(inner, 2 * alpha / anharmonicity**2)
    peak = float(np.max(radicand))
    return float(np.min(radicand)) / peak if peak > 0 else 0.0
