import math

import pytest

from recursive_drag.model import DEFAULT_DELTA2, LadderParams, duffing_ladder
from recursive_drag.pulse.envelopes import Envelope


@pytest.fixture
def delta2() -> float:
    return DEFAULT_DELTA2


@pytest.fixture
def ladder() -> LadderParams:
    return duffing_ladder(DEFAULT_DELTA2, 4)


@pytest.fixture
def qutrit() -> LadderParams:
    return duffing_ladder(DEFAULT_DELTA2, 3)


@pytest.fixture
def qubit() -> LadderParams:
    """Bare two-level system, no leakage level."""
    return LadderParams(levels=2, detunings=(0.0,), couplings=(1.0,))


@pytest.fixture
def hann_pi():
    def build(duration: float) -> Envelope:
        return Envelope.hann(2 * math.pi / duration, duration)

    return build
