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

"""First-order Magnus predictions of the DRAG prefactors.

All elements are integrals of the error Hamiltonian in the frame that rotates with the ideal gate.
The rotation angle theta(t) is the running integral of Omega_x, so a pi pulse ends at theta = pi;
the leakage elements use theta / 2 and free precession phases Delta_l t of the leakage levels.
"""

from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass, field
from enum import Enum, auto

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq, minimize_scalar

from recursive_drag.errors import DegenerateDenominatorError, NumericalConvergenceError, SingularParameterError
from recursive_drag.model import LadderParams, rad_per_ns_to_ghz
from recursive_drag.pulse.envelopes import Envelope, Evaluable, rotation_angle
from recursive_drag.pulse.properties import EnvelopeKind, PrefactorSet
from recursive_drag.pulse.synthesis import ControlWaveform
from recursive_drag.utils.quadrature import adaptive_simpson, cumulative_integral

logger = logging.getLogger(__name__)

MAGNUS_INTERVALS = 4096
DEGENERATE_DENOMINATOR = 1e-14
# Fitted coefficient of the closed-form constant detuning for the Hann pi pulse
HANN_DELTA_C_COEFFICIENT = 0.712
DELTA_C_MISMATCH = 0.05
BETA_BRACKET = (0.5, 1.5)
ALPHA_BOUNDS = (0.0, 3.0)

Coefficients = t.Tuple[complex, complex, complex]


class DeltaCMode(Enum):
    INTEGRAL = auto()
    CLOSED_FORM = auto()


class BetaMode(Enum):
    CUBIC = auto()
    LINEARIZED = auto()


class AlphaMethod(Enum):
    LINEARIZED = auto()
    EXACT = auto()


@dataclass(frozen=True)
class MagnusElements:
    z00: complex
    z11: complex
    z01: complex
    z12: complex
    z02: complex
    h12: Coefficients
    h02: Coefficients
    alpha: float
    beta: float = 1.0
    delta_c: float = 0.0
    # Leakage levels precess as exp(-i Delta_l t)
    phase_convention: str = "linear"

    @property
    def z21(self) -> complex:
        return self.z12.conjugate()

    @property
    def z20(self) -> complex:
        return self.z02.conjugate()

    @property
    def phase_error(self) -> complex:
        return self.z11 - self.z00

    @property
    def rotation_error(self) -> complex:
        return self.z01

    @property
    def leakage(self) -> float:
        return abs(self.z12) ** 2 + abs(self.z02) ** 2

    def z12_at(self, alpha: float) -> complex:
        return _polynomial(self.h12, alpha)

    def z02_at(self, alpha: float) -> complex:
        return _polynomial(self.h02, alpha)

    def to_record(self) -> t.Dict[str, t.Any]:
        def pair(value: complex) -> t.List[float]:
            return [value.real, value.imag]

        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "delta_c": self.delta_c,
            "z00": pair(self.z00),
            "z11": pair(self.z11),
            "z01": pair(self.z01),
            "z12": pair(self.z12),
            "z02": pair(self.z02),
            "h12": [pair(value) for value in self.h12],
            "h02": [pair(value) for value in self.h02],
            "phase_convention": self.phase_convention,
        }


@dataclass(frozen=True)
class Prediction:
    duration: float
    alpha: float
    beta: float
    delta_c: float
    delta3: t.Optional[float] = None
    notes: t.Tuple[str, ...] = field(default=())

    @property
    def prefactors(self) -> PrefactorSet:
        return PrefactorSet(beta=self.beta, alpha12=self.alpha, delta_c=self.delta_c)

    def to_record(self) -> t.Dict[str, t.Any]:
        return {
            "T_ns": self.duration,
            "alpha": self.alpha,
            "beta": self.beta,
            "delta_c_rad_per_ns": self.delta_c,
            "delta_c_mhz": rad_per_ns_to_ghz(self.delta_c) * 1000.0,
        }


def _polynomial(coefficients: Coefficients, alpha: float) -> complex:
    return coefficients[0] + coefficients[1] * alpha + coefficients[2] * alpha**2


def _integrate(func: t.Callable[[npt.NDArray[np.float64]], npt.ArrayLike], duration: float) -> t.Any:
    return adaptive_simpson(func, 0.0, duration, intervals=MAGNUS_INTERVALS)


def _channel(wave: t.Union[Evaluable, ControlWaveform]) -> Evaluable:
    return wave.omega_x if isinstance(wave, ControlWaveform) else wave


def _drive(
    omega_x: Evaluable, x: npt.NDArray[np.float64]
) -> t.Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Omega_x, its derivative and the rotation angle on a grid that starts at t = 0."""
    jet = omega_x.jet(x, 1)
    return jet[0], jet[1], cumulative_integral(jet[0], x)


def hann_pi_pulse(duration: float) -> Envelope:
    return Envelope.hann(math.pi / (duration / 2), duration)


def _phase_integrand(
    omega_x: Evaluable, alpha: float, beta: float, delta_c: float, lambda2: float, delta2: float
) -> t.Callable[[npt.NDArray[np.float64]], npt.NDArray[np.complex128]]:
    def integrand(x: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
        omega, d_omega, theta = _drive(omega_x, x)
        stark = (4 * delta2 * delta_c + (4 * alpha - lambda2**2) * (beta * omega) ** 2) * np.cos(theta) / (4 * delta2)
        mixing = beta**2 * d_omega * omega * (alpha - 1) * alpha * lambda2**2 * np.sin(theta) / (8 * delta2**3)
        return 1j * (stark + mixing)

    return integrand


def _rotation_integrand(
    omega_x: Evaluable, alpha: float, beta: float, delta_c: float, lambda2: float, delta2: float
) -> t.Callable[[npt.NDArray[np.float64]], npt.NDArray[np.complex128]]:
    c = 4 * alpha**2 + lambda2**2 * (1 - 2 * alpha)

    def integrand(x: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
        omega, d_omega, theta = _drive(omega_x, x)
        driven = beta * omega
        return (
            (driven - omega) / 2
            + 1j * (4 * delta2 * delta_c + (4 * alpha - lambda2**2) * driven**2) * np.sin(theta) / (8 * delta2)
            - driven * (8 * delta2 * alpha * delta_c + c * driven**2) / (16 * delta2**2)
            + 1j * beta**2 * d_omega * omega * (alpha - 1) * alpha * lambda2**2 * np.cos(theta) / (16 * delta2**3)
        )

    return integrand


def _leakage_terms(
    omega: npt.NDArray[np.float64],
    d_omega: npt.NDArray[np.float64],
    theta: npt.NDArray[np.float64],
    x: npt.NDArray[np.float64],
    lambda2: float,
    delta2: float,
) -> t.Tuple[t.List[npt.NDArray[np.complex128]], t.List[npt.NDArray[np.complex128]]]:
    """Coefficients of alpha^0, alpha^1, alpha^2 in the 1-2 and 0-2 error Hamiltonian elements."""
    s = np.sin(theta / 2)
    c = np.cos(theta / 2)
    prefactor = lambda2 * np.exp(-1j * delta2 * x) / (4 * delta2)

    p = [
        1j * (omega**2 * s - 2 * d_omega * c),
        -(-4j * delta2 * d_omega * c + omega * (2 * d_omega + 1j * delta2 * omega) * s) / (2 * delta2),
        omega * d_omega * s / delta2 + 0j,
    ]
    q = [
        omega**2 * c + 2 * d_omega * s + 0j,
        -(4 * delta2 * d_omega * s + omega * (-2j * d_omega + delta2 * omega) * c) / (2 * delta2),
        -1j * omega * d_omega * c / delta2,
    ]
    return [prefactor * term for term in p], [prefactor * term for term in q]


def leakage_coefficients(
    wave: t.Union[Evaluable, ControlWaveform], lambda2: float, delta2: float, beta: float = 1.0
) -> t.Tuple[Coefficients, Coefficients]:
    """h^k integrals with Z[1,2] = h12[0] + h12[1] alpha + h12[2] alpha^2, likewise for Z[0,2]."""
    if delta2 == 0:
        raise SingularParameterError("Leakage elements need a nonzero anharmonicity")

    omega_x = _channel(wave)

    def coefficient(pair: int, power: int) -> complex:
        def integrand(x: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
            omega, d_omega, theta = _drive(omega_x, x)
            terms = _leakage_terms(beta * omega, beta * d_omega, theta, x, lambda2, delta2)
            return terms[pair][power]

        return complex(_integrate(integrand, omega_x.duration))

    h12 = t.cast(Coefficients, tuple(coefficient(0, k) for k in range(3)))
    h02 = t.cast(Coefficients, tuple(coefficient(1, k) for k in range(3)))
    return h12, h02


def leakage_element(
    wave: t.Union[Evaluable, ControlWaveform],
    lambda2: float,
    delta2: float,
    alpha: float,
    pair: t.Tuple[int, int] = (1, 2),
    beta: float = 1.0,
) -> complex:
    """Z[1,2] or Z[0,2] integrated directly at a given alpha."""
    index = {(1, 2): 0, (0, 2): 1}[pair]
    omega_x = _channel(wave)

    def integrand(x: npt.NDArray[np.float64]) -> npt.NDArray[np.complex128]:
        omega, d_omega, theta = _drive(omega_x, x)
        terms = _leakage_terms(beta * omega, beta * d_omega, theta, x, lambda2, delta2)[index]
        return terms[0] + alpha * terms[1] + alpha**2 * terms[2]

    return complex(_integrate(integrand, omega_x.duration))


def magnus_elements(
    wave: t.Union[Evaluable, ControlWaveform],
    params: LadderParams,
    alpha: float,
    beta: float = 1.0,
    delta_c: float = 0.0,
) -> MagnusElements:
    """First-order Magnus elements of the gate error for the in-phase drive of `wave`."""
    delta2 = params.delta2
    if delta2 == 0:
        raise SingularParameterError("Magnus elements need a nonzero anharmonicity")

    omega_x = _channel(wave)
    lambda2 = params.lambda2

    difference = complex(_integrate(_phase_integrand(omega_x, alpha, beta, delta_c, lambda2, delta2), omega_x.duration))
    z01 = complex(_integrate(_rotation_integrand(omega_x, alpha, beta, delta_c, lambda2, delta2), omega_x.duration))
    h12, h02 = leakage_coefficients(omega_x, lambda2, delta2, beta)

    elements = MagnusElements(
        z00=-difference / 2,
        z11=difference / 2,
        z01=z01,
        z12=leakage_element(omega_x, lambda2, delta2, alpha, (1, 2), beta),
        z02=leakage_element(omega_x, lambda2, delta2, alpha, (0, 2), beta),
        h12=h12,
        h02=h02,
        alpha=alpha,
        beta=beta,
        delta_c=delta_c,
    )
    logger.debug(f"Magnus elements at alpha={alpha}: leakage {elements.leakage:.3e}")
    return elements


def _check_pi(omega_x: Evaluable, purpose: str) -> None:
    theta = rotation_angle(omega_x)
    if abs(theta - math.pi) > 1e-6:
        logger.warning(f"{purpose} assumes a pi rotation, the drive rotates by {theta:.6g} rad")


def delta_c_closed_form(alpha: float, lambda2: float, delta2: float, duration: float) -> float:
    if delta2 == 0:
        raise SingularParameterError("Constant detuning prediction needs a nonzero anharmonicity")
    return HANN_DELTA_C_COEFFICIENT * (lambda2**2 - 4 * alpha) / delta2 * math.pi**2 / duration**2


def predict_delta_c(
    omega_x: t.Optional[Evaluable],
    alpha: float,
    lambda2: float,
    delta2: float,
    duration: float,
    mode: DeltaCMode = DeltaCMode.INTEGRAL,
) -> float:
    """Constant detuning that zeroes the imaginary part of the rotation error.

    ``omega_x`` of ``None`` means the Hann pi pulse of the given duration.
    """
    if mode == DeltaCMode.CLOSED_FORM:
        return delta_c_closed_form(alpha, lambda2, delta2, duration)

    if delta2 == 0:
        raise SingularParameterError("Constant detuning prediction needs a nonzero anharmonicity")

    shape = hann_pi_pulse(duration) if omega_x is None else omega_x
    _check_pi(shape, "Integral constant detuning")

    def stark(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        omega, _, theta = _drive(shape, x)
        return t.cast(npt.NDArray[np.float64], omega**2 * np.sin(theta))

    def mixing(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        omega, d_omega, theta = _drive(shape, x)
        return t.cast(npt.NDArray[np.float64], d_omega * omega * np.cos(theta))

    def weight(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return t.cast(npt.NDArray[np.float64], np.sin(_drive(shape, x)[2]))

    norm = float(_integrate(weight, shape.duration))
    if abs(norm) < DEGENERATE_DENOMINATOR:
        raise DegenerateDenominatorError("Rotation angle weight integrates to zero", norm=norm)

    delta_c = -(4 * alpha - lambda2**2) * float(_integrate(stark, shape.duration)) / (4 * delta2 * norm) - (
        (alpha - 1) * alpha * lambda2**2 * float(_integrate(mixing, shape.duration)) / (8 * delta2**3 * norm)
    )

    if omega_x is None or (isinstance(omega_x, Envelope) and omega_x.kind == EnvelopeKind.HANN):
        closed = delta_c_closed_form(alpha, lambda2, delta2, duration)
        if closed != 0 and abs(delta_c - closed) > DELTA_C_MISMATCH * abs(closed):
            logger.warning(f"Integral delta_c {delta_c:.6g} differs from the closed form {closed:.6g} by more than 5 %")
    return delta_c


def _moments(omega_x: t.Optional[Evaluable], duration: float) -> t.Tuple[float, float]:
    """Integrals of Omega_x and Omega_x^3."""
    if omega_x is None:
        return math.pi, 5 * math.pi**3 / (2 * duration**2)

    first = float(_integrate(lambda x: omega_x.jet(x, 0)[0], omega_x.duration))
    third = float(_integrate(lambda x: omega_x.jet(x, 0)[0] ** 3, omega_x.duration))
    return first, third


def predict_beta(
    alpha: float,
    delta_c: float,
    lambda2: float,
    delta2: float,
    duration: float,
    mode: BetaMode = BetaMode.CUBIC,
    omega_x: t.Optional[Evaluable] = None,
) -> float:
    """Amplitude prefactor zeroing the real part of the rotation error."""
    if delta2 == 0:
        raise SingularParameterError("Amplitude prediction needs a nonzero anharmonicity")

    first, third = _moments(omega_x, duration)
    c = 4 * alpha**2 + lambda2**2 * (1 - 2 * alpha)
    stark = alpha * delta_c * first / (2 * delta2)
    cubic = c * third / (16 * delta2**2)

    if mode == BetaMode.LINEARIZED:
        return 1.0 + (stark + cubic) / (first / 2 - stark - 3 * cubic)

    def residual(beta: float) -> float:
        return beta * (first / 2 - stark) - first / 2 - beta**3 * cubic

    low, high = BETA_BRACKET
    if residual(low) * residual(high) > 0:
        raise NumericalConvergenceError("No real amplitude root in the bracket", bracket=BETA_BRACKET)
    return float(brentq(residual, low, high, xtol=1e-15))


def _mean_field_alpha(h12: Coefficients, h02: Coefficients) -> float:
    x1 = 0j
    x2 = 0j
    for h0, h1, h2 in (h12, h02):
        total = (h0 + h1 + h2).conjugate()
        x1 += (h1 + 2 * h2) * total
        x2 += (
            h1 * h1.conjugate()
            + 2 * h1 * h2.conjugate()
            + 2 * h2 * h0.conjugate()
            + 4 * h2 * h1.conjugate()
            + 6 * h2 * h2.conjugate()
        )

    denominator = 2 * x2.real
    if abs(denominator) < DEGENERATE_DENOMINATOR:
        raise DegenerateDenominatorError("Mean-field alpha denominator vanishes", denominator=denominator)
    return 1.0 - 2 * x1.real / denominator


def predict_alpha(
    lambda2: float,
    delta2: float,
    delta3: t.Optional[float],
    duration: float,
    omega_x: t.Optional[Evaluable] = None,
    method: AlphaMethod = AlphaMethod.LINEARIZED,
) -> float:
    """DRAG prefactor minimizing |Z[1,2]|^2 + |Z[0,2]|^2.

    Only the 1-2 and 0-2 elements enter, so Delta3 does not change the result; it is accepted for
    symmetry with the ladder description.
    """
    shape = hann_pi_pulse(duration) if omega_x is None else omega_x
    h12, h02 = leakage_coefficients(shape, lambda2, delta2)

    if method == AlphaMethod.LINEARIZED:
        alpha = _mean_field_alpha(h12, h02)
    else:

        def leakage(value: float) -> float:
            return abs(_polynomial(h12, value)) ** 2 + abs(_polynomial(h02, value)) ** 2

        result = minimize_scalar(leakage, bounds=ALPHA_BOUNDS, method="bounded", options={"xatol": 1e-10})
        alpha = float(result.x)

    logger.debug(f"Predicted alpha {alpha:.6g} ({method.name.lower()}) at T={duration} ns, Delta3={delta3}")
    return alpha


def predict_prefactors(
    params: LadderParams,
    duration: float,
    omega_x: t.Optional[Evaluable] = None,
    alpha: t.Optional[float] = None,
    *,
    delta_c_mode: DeltaCMode = DeltaCMode.INTEGRAL,
    beta_mode: BetaMode = BetaMode.CUBIC,
    alpha_method: AlphaMethod = AlphaMethod.LINEARIZED,
) -> Prediction:
    """alpha (predicted unless given), then delta_c at that alpha, then beta at both."""
    notes = []
    if alpha is None:
        alpha = predict_alpha(params.lambda2, params.delta2, params.delta3, duration, omega_x, alpha_method)
        notes.append(f"alpha {alpha_method.name.lower()}")

    delta_c = predict_delta_c(omega_x, alpha, params.lambda2, params.delta2, duration, delta_c_mode)
    beta = predict_beta(alpha, delta_c, params.lambda2, params.delta2, duration, beta_mode, omega_x)
    notes.extend((f"delta_c {delta_c_mode.name.lower()}", f"beta {beta_mode.name.lower()}"))

    logger.info(f"Predicted alpha={alpha:.6g} beta={beta:.6g} delta_c={delta_c:.6g} rad/ns at T={duration} ns")
    return Prediction(duration, alpha, beta, delta_c, params.delta3, tuple(notes))
