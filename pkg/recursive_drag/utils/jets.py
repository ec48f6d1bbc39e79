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

"""Derivative jets.

A jet is an array of shape ``(order + 1, *shape)`` holding a function and its time derivatives
``f, f', f'', ...`` sampled at the same points. Products and square roots of jets follow the
Leibniz rule, so pulse compositions get exact derivatives without symbolic expansion.
"""

from __future__ import annotations

import logging
import math
import typing as t

import numpy as np
import numpy.typing as npt

logger = logging.getLogger(__name__)

Jet = npt.NDArray[np.float64]

# Coefficients below this fraction of the reference scale are treated as rounding noise when looking
# for the leading power of a radicand that vanishes at the evaluation point.
LEADING_ORDER_TOLERANCE = 1e-10


def order_of(jet: Jet) -> int:
    return int(jet.shape[0]) - 1


def constant(value: float, order: int, shape: t.Tuple[int, ...]) -> Jet:
    out = np.zeros((order + 1,) + shape)
    out[0] = value
    return out


def truncate(jet: Jet, order: int) -> Jet:
    return jet[: order + 1]


def derivative(jet: Jet) -> Jet:
    """Jet of f' from the jet of f (loses one order)."""
    return jet[1:]


def sin_jet(omega: float, t: npt.NDArray[np.float64], order: int) -> Jet:
    """Jet of sin(omega * t); the cycle sin, cos, -sin, -cos keeps exact zeros exact."""
    s = np.sin(omega * t)
    c = np.cos(omega * t)
    cycle = (s, c, -s, -c)
    return np.stack([omega**k * cycle[k % 4] for k in range(order + 1)])


def cos_jet(omega: float, t: npt.NDArray[np.float64], order: int) -> Jet:
    s = np.sin(omega * t)
    c = np.cos(omega * t)
    cycle = (c, -s, -c, s)
    return np.stack([omega**k * cycle[k % 4] for k in range(order + 1)])


def multiply(a: Jet, b: Jet) -> Jet:
    order = min(order_of(a), order_of(b))
    out = np.zeros((order + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(order + 1):
        for i in range(k + 1):
            out[k] += math.comb(k, i) * a[i] * b[k - i]
    return out


def power(a: Jet, n: int) -> Jet:
    if n < 0:
        raise ValueError(f"Only non-negative integer powers are supported, got {n}")

    result = constant(1.0, order_of(a), a.shape[1:])
    base = a
    while n:
        if n & 1:
            result = multiply(result, base)
        n >>= 1
        if n:
            base = multiply(base, base)
    return result


def sqrt_regular(a: Jet) -> Jet:
    """Square root jet at points where a[0] > 0."""
    out = np.zeros_like(a)
    out[0] = np.sqrt(a[0])
    for k in range(1, order_of(a) + 1):
        acc = a[k].copy()
        for i in range(1, k):
            acc -= math.comb(k, i) * out[i] * out[k - i]
        out[k] = acc / (2.0 * out[0])
    return out


def sqrt_series(
    a: npt.NDArray[np.float64], out_order: int, *, reference: float, rate: float
) -> npt.NDArray[np.float64]:
    """Right-sided square root jet at a single point where the radicand touches zero.

    ``a`` holds the derivatives of the radicand at the point. If its leading non-vanishing derivative
    has even order 2m, the root behaves as (t - t0)^m times the root of the remaining series.
    """
    available = order_of(a)
    normalized = np.array([a[k] / math.factorial(k) for k in range(available + 1)])
    scales = np.array([reference * rate**k / math.factorial(k) for k in range(available + 1)])

    significant = np.flatnonzero(np.abs(normalized) > LEADING_ORDER_TOLERANCE * scales)
    out = np.full(out_order + 1, np.nan)
    if significant.size == 0:
        out[:] = 0.0
        return out

    leading = int(significant[0])
    if leading % 2 or normalized[leading] < 0:
        logger.debug(f"Radicand has leading order {leading} with sign {np.sign(normalized[leading])}")
        out[0] = 0.0 if leading else np.nan
        return out

    m = leading // 2
    b = normalized[leading:]
    q = np.zeros_like(b)
    q[0] = np.sqrt(b[0])
    for i in range(1, b.size):
        q[i] = (b[i] - np.dot(q[1:i], q[i - 1 : 0 : -1])) / (2.0 * q[0])

    for k in range(out_order + 1):
        if k < m:
            out[k] = 0.0
        elif k - m < q.size:
            out[k] = math.factorial(k) * q[k - m]
    return out


def mirrored(
    evaluate: t.Callable[[npt.NDArray[np.float64], int], Jet],
    t: npt.ArrayLike,
    duration: float,
    order: int,
) -> Jet:
    """Evaluate a jet of a function symmetric about duration / 2 on the left half only.

    Points in the right half are reflected; odd derivatives change sign. Both endpoints are then
    evaluated from t = 0, where sines vanish exactly.
    """
    times = np.asarray(t, dtype=float)
    flat = times.ravel()
    reflect = flat > 0.5 * duration
    local = np.where(reflect, duration - flat, flat)
    jet = np.array(evaluate(local, order), dtype=float)
    signs = np.where(reflect, -1.0, 1.0)
    for k in range(1, order + 1, 2):
        jet[k] = jet[k] * signs
    return jet.reshape((order + 1,) + times.shape)
