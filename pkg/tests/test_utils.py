import math

import numpy as np
import pytest

from recursive_drag.errors import NumericalConvergenceError
from recursive_drag.pulse.properties import EnvelopeKind, PulseFamily
from recursive_drag.utils import enum_from_key, enum_key, pretty_enum_name
from recursive_drag.utils.jets import (
    constant,
    derivative,
    mirrored,
    multiply,
    power,
    sin_jet,
    sqrt_regular,
    sqrt_series,
)
from recursive_drag.utils.quadrature import (
    adaptive_simpson,
    converged_derivative,
    cumulative_integral,
    five_point_derivative,
)

GRID = np.linspace(0.1, 2.9, 15)


class TestJets:
    def test_sin_jet_cycles_through_derivatives(self):
        jet = sin_jet(2.0, GRID, 3)
        np.testing.assert_allclose(jet[0], np.sin(2 * GRID))
        np.testing.assert_allclose(jet[1], 2 * np.cos(2 * GRID))
        np.testing.assert_allclose(jet[2], -4 * np.sin(2 * GRID))
        np.testing.assert_allclose(jet[3], -8 * np.cos(2 * GRID))

    def test_product_rule(self):
        # sin^2 = (1 - cos 2t) / 2
        squared = multiply(sin_jet(1.0, GRID, 3), sin_jet(1.0, GRID, 3))
        np.testing.assert_allclose(squared[1], np.sin(2 * GRID), atol=1e-14)
        np.testing.assert_allclose(squared[2], 2 * np.cos(2 * GRID), atol=1e-14)
        np.testing.assert_allclose(squared[3], -4 * np.sin(2 * GRID), atol=1e-13)

    def test_power_matches_repeated_product(self):
        s = sin_jet(1.3, GRID, 3)
        np.testing.assert_allclose(power(s, 3), multiply(multiply(s, s), s), atol=1e-14)
        np.testing.assert_allclose(power(s, 0), constant(1.0, 3, GRID.shape))

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            power(sin_jet(1.0, GRID, 1), -1)

    def test_sqrt_regular(self):
        # sqrt(1 + t^2)
        a = np.zeros((3,) + GRID.shape)
        a[0] = 1 + GRID**2
        a[1] = 2 * GRID
        a[2] = 2.0
        root = sqrt_regular(a)
        np.testing.assert_allclose(root[0], np.sqrt(1 + GRID**2))
        np.testing.assert_allclose(root[1], GRID / np.sqrt(1 + GRID**2))
        np.testing.assert_allclose(root[2], (1 + GRID**2) ** -1.5)

    def test_sqrt_series_of_touching_square(self):
        # sqrt(t^2) = t on the right of zero
        series = sqrt_series(np.array([0.0, 0.0, 2.0, 0.0, 0.0, 0.0]), 3, reference=1.0, rate=1.0)
        np.testing.assert_allclose(series, [0.0, 1.0, 0.0, 0.0], atol=1e-15)

    def test_sqrt_series_of_negative_leading_term(self):
        series = sqrt_series(np.array([0.0, 0.0, -2.0, 0.0]), 1, reference=1.0, rate=1.0)
        assert series[0] == 0.0
        assert math.isnan(series[1])

    def test_derivative_drops_one_order(self):
        jet = sin_jet(1.0, GRID, 3)
        assert derivative(jet).shape == (3,) + GRID.shape

    def test_mirrored_symmetric_function(self):
        duration = 3.0
        w = math.pi / duration
        direct = sin_jet(w, GRID, 3)
        folded = mirrored(lambda x, order: sin_jet(w, x, order), GRID, duration, 3)
        np.testing.assert_allclose(folded, direct, atol=1e-13)


class TestQuadrature:
    def test_real_integral(self):
        assert adaptive_simpson(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-12)

    def test_complex_integral(self):
        value = adaptive_simpson(lambda x: np.exp(1j * x), 0.0, math.pi)
        assert value == pytest.approx(2j, abs=1e-12)

    def test_empty_interval(self):
        assert adaptive_simpson(np.cos, 1.0, 1.0) == 0.0

    def test_noise_does_not_converge(self):
        rng = np.random.default_rng(0)
        with pytest.raises(NumericalConvergenceError, match="did not converge"):
            adaptive_simpson(lambda x: rng.standard_normal(x.size), 0.0, 1.0, max_intervals=4096)

    def test_cumulative_integral(self):
        x = np.linspace(0.0, math.pi, 2001)
        np.testing.assert_allclose(cumulative_integral(np.cos(x), x), np.sin(x), atol=1e-11)

    def test_stencil_derivative(self):
        np.testing.assert_allclose(five_point_derivative(np.sin, GRID, 1e-3), np.cos(GRID), atol=1e-11)
        np.testing.assert_allclose(converged_derivative(np.sin, GRID, 0.1), np.cos(GRID), rtol=1e-6, atol=1e-10)


class TestEnums:
    def test_key_round_trip(self):
        for member in EnvelopeKind:
            assert enum_from_key(EnvelopeKind, enum_key(member)) is member
        assert enum_key(EnvelopeKind.FOURIER_BL) == "fourier-bl"
        assert enum_from_key(PulseFamily, " R2D ") is PulseFamily.R2D

    def test_unknown_key_lists_choices(self):
        with pytest.raises(ValueError, match="r1d"):
            enum_from_key(PulseFamily, "gaussian")

    def test_pretty_name(self):
        assert pretty_enum_name(EnvelopeKind.SIN_POW) == "Sin Pow"
