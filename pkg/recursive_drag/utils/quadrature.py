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
import typing as t

import numpy as np
import numpy.typing as npt
from scipy.integrate import cumulative_simpson, simpson

from recursive_drag.errors import NumericalConvergenceError

logger = logging.getLogger(__name__)

Sampler = t.Callable[[npt.NDArray[np.float64]], npt.ArrayLike]

START_INTERVALS = 1024
MAX_INTERVALS = 2**22


def _simpson(values: npt.NDArray[t.Any], x: npt.NDArray[np.float64]) -> complex:
    if np.iscomplexobj(values):
        return complex(simpson(values.real, x=x), simpson(values.imag, x=x))
    return float(simpson(values, x=x))


def adaptive_simpson(
    func: Sampler,
    start: float,
    stop: float,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-14,
    intervals: int = START_INTERVALS,
    max_intervals: int = MAX_INTERVALS,
) -> t.Any:
    """Composite Simpson integral of a vectorized integrand, halving the step until two successive
    resolutions agree. Works for real and complex integrands."""
    if stop == start:
        return 0.0

    x = np.linspace(start, stop, intervals + 1)
    previous = _simpson(np.asarray(func(x)), x)
    while True:
        intervals *= 2
        if intervals > max_intervals:
            raise NumericalConvergenceError(
                "Quadrature did not converge",
                intervals=intervals // 2,
                last_value=previous,
                interval=(start, stop),
            )

        x = np.linspace(start, stop, intervals + 1)
        current = _simpson(np.asarray(func(x)), x)
        change = abs(current - previous)
        logger.debug(f"Simpson with {intervals} intervals: {current} (change {change:.3e})")
        if change <= rtol * abs(current) + atol:
            return current
        previous = current


def simpson_fixed(values: npt.ArrayLike, x: npt.ArrayLike) -> t.Any:
    return _simpson(np.asarray(values), np.asarray(x, dtype=float))


def cumulative_integral(values: npt.ArrayLike, x: npt.ArrayLike) -> npt.NDArray[t.Any]:
    """Running integral from x[0], starting at zero."""
    y = np.asarray(values)
    grid = np.asarray(x, dtype=float)
    if np.iscomplexobj(y):
        return cumulative_simpson(y.real, x=grid, initial=0.0) + 1j * cumulative_simpson(
            y.imag, x=grid, initial=0.0
        )
    return cumulative_simpson(y, x=grid, initial=0.0)


def five_point_derivative(func: Sampler, t: npt.ArrayLike, step: float) -> npt.NDArray[np.float64]:
    times = np.asarray(t, dtype=float)
    return (
        np.asarray(func(times - 2 * step))
        - 8 * np.asarray(func(times - step))
        + 8 * np.asarray(func(times + step))
        - np.asarray(func(times + 2 * step))
    ) / (12 * step)


def converged_derivative(
    func: Sampler,
    t: npt.ArrayLike,
    step: float,
    *,
    rtol: float = 1e-7,
    atol: float = 1e-12,
    max_halvings: int = 12,
) -> npt.NDArray[np.float64]:
    """Five-point central difference, halving the step until two successive estimates agree."""
    previous = five_point_derivative(func, t, step)
    for _ in range(max_halvings):
        step /= 2
        current = five_point_derivative(func, t, step)
        change = float(np.max(np.abs(current - previous), initial=0.0))
        scale = float(np.max(np.abs(current), initial=0.0))
        if change <= rtol * scale + atol:
            return current
        previous = current

    raise NumericalConvergenceError("Stencil derivative did not converge", step=step, change=change)
