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

"""Run configuration.

A config file is flat ``key = value`` text with ``#`` comments, for example::

    delta2_ghz = -0.225
    levels = 4
    family = r2d
    T_ns = 6.0, 8.0, 10.0
    t1_us = 1000
    t2_us = 1000

Frequencies are ordinary GHz (``*_ghz``) or angular rad/ns (``*_rad_per_ns``); times are ns, coherence
times us. Command line flags override file values, which override the defaults.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
import math
import typing as t
from dataclasses import dataclass, field, fields

import numpy as np

from recursive_drag.errors import ConfigError
from recursive_drag.model import DEFAULT_DELTA2, LadderParams, duffing_ladder, ghz_to_rad_per_ns
from recursive_drag.pulse.properties import EnvelopeKind, PrefactorMode, PulseFamily
from recursive_drag.utils import enum_from_key, enum_key

logger = logging.getLogger(__name__)

_SECTION = "run"

# Table of ansatz pairs scanned when none are given
DEFAULT_ANSATZ_PAIRS = ((1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5))


def _bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got '{value}'")


def _floats(value: str) -> t.Tuple[float, ...]:
    """Comma separated list, or start:stop:step with the stop included."""
    text = value.strip()
    if ":" in text:
        start, stop, step = (float(part) for part in text.split(":"))
        if step <= 0:
            raise ValueError("range step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(round(start + i * step, 12)) for i in range(count))
    return tuple(float(part) for part in text.split(",") if part.strip())


def _pairs(value: str) -> t.Tuple[t.Tuple[int, int], ...]:
    pairs = []
    for item in value.split(","):
        n, j = item.strip().split(":")
        pairs.append((int(n), int(j)))
    return tuple(pairs)


def _optional_float(value: str) -> t.Optional[float]:
    return None if value.strip().lower() in ("", "none", "inf") else float(value)


PARSERS: t.Dict[str, t.Callable[[str], t.Any]] = {
    "delta2_ghz": float,
    "delta2_rad_per_ns": float,
    "delta3_ghz": float,
    "delta3_rad_per_ns": float,
    "levels": int,
    "family": lambda value: enum_from_key(PulseFamily, value),
    "shape": lambda value: enum_from_key(EnvelopeKind, value),
    "n": int,
    "j": int,
    "superlinear": _bool,
    "theta": float,
    "T_ns": _floats,
    "prefactor_mode": lambda value: enum_from_key(PrefactorMode, value),
    "alpha": _optional_float,
    "t1_us": _optional_float,
    "t2_us": _optional_float,
    "samples": int,
    "seed": int,
    "jobs": int,
    "stride": int,
    "output": str,
    "trajectory": str,
    "pairs": _pairs,
    "error_target": float,
}


@dataclass(frozen=True)
class RunConfig:
    delta2_ghz: t.Optional[float] = None
    delta2_rad_per_ns: t.Optional[float] = None
    delta3_ghz: t.Optional[float] = None
    delta3_rad_per_ns: t.Optional[float] = None
    levels: int = 4
    family: PulseFamily = PulseFamily.R2D
    shape: t.Optional[EnvelopeKind] = None
    n: int = 0
    j: int = 0
    superlinear: bool = False
    theta: float = math.pi
    T_ns: t.Tuple[float, ...] = (10.0,)
    prefactor_mode: PrefactorMode = PrefactorMode.ANALYTIC
    alpha: t.Optional[float] = None
    t1_us: t.Optional[float] = None
    t2_us: t.Optional[float] = None
    samples: int = 1001
    seed: int = 1234
    jobs: int = 0
    stride: int = 1
    output: t.Optional[str] = None
    trajectory: t.Optional[str] = None
    pairs: t.Tuple[t.Tuple[int, int], ...] = field(default=DEFAULT_ANSATZ_PAIRS)
    error_target: float = 1e-4

    def __post_init__(self) -> None:
        if self.delta2_ghz is not None and self.delta2_rad_per_ns is not None:
            raise ConfigError("give Delta2 in GHz or in rad/ns, not both", "delta2_ghz")
        if self.delta3_ghz is not None and self.delta3_rad_per_ns is not None:
            raise ConfigError("give Delta3 in GHz or in rad/ns, not both", "delta3_ghz")
        if not self.T_ns or any(value <= 0 for value in self.T_ns):
            raise ConfigError("gate times must be positive", "T_ns")
        if self.samples < 2:
            raise ConfigError("need at least two samples", "samples")
        if self.stride < 1:
            raise ConfigError("stride must be positive", "stride")
        if self.jobs < 0:
            raise ConfigError("jobs must be nonnegative", "jobs")
        for name in ("t1_us", "t2_us"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError("coherence times must be positive", name)

    @classmethod
    def parse(cls, values: t.Mapping[str, str]) -> t.Dict[str, t.Any]:
        parsed = {}
        for key, raw in values.items():
            parser = PARSERS.get(key)
            if parser is None:
                raise ConfigError(f"unknown key (known keys: {', '.join(sorted(PARSERS))})", key)
            try:
                parsed[key] = parser(raw)
            except ValueError as e:
                raise ConfigError(str(e), key) from e
        return parsed

    @classmethod
    def from_text(cls, text: str) -> t.Dict[str, t.Any]:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
        # Keep key case (T_ns)
        parser.optionxform = str  # type: ignore[assignment,method-assign]
        try:
            parser.read_string(f"[{_SECTION}]\n{text}")
        except configparser.Error as e:
            raise ConfigError(f"malformed config file: {e}") from e
        return cls.parse(dict(parser[_SECTION]))

    @classmethod
    def resolve(
        cls, file_text: t.Optional[str] = None, overrides: t.Optional[t.Mapping[str, t.Any]] = None
    ) -> RunConfig:
        """Defaults, then the config file, then already typed overrides (None means not given)."""
        values = cls.from_text(file_text) if file_text else {}
        for key, value in (overrides or {}).items():
            if key not in PARSERS:
                raise ConfigError("unknown key", key)
            if value is not None:
                values[key] = value

        # A unit given on the command line replaces the other unit from the file
        for base in ("delta2", "delta3"):
            given = overrides or {}
            if given.get(f"{base}_ghz") is not None:
                values.pop(f"{base}_rad_per_ns", None)
            elif given.get(f"{base}_rad_per_ns") is not None:
                values.pop(f"{base}_ghz", None)
        return cls(**values)

    @property
    def delta2(self) -> float:
        if self.delta2_rad_per_ns is not None:
            return self.delta2_rad_per_ns
        if self.delta2_ghz is not None:
            return ghz_to_rad_per_ns(self.delta2_ghz)
        return DEFAULT_DELTA2

    @property
    def delta3(self) -> t.Optional[float]:
        if self.delta3_rad_per_ns is not None:
            return self.delta3_rad_per_ns
        if self.delta3_ghz is not None:
            return ghz_to_rad_per_ns(self.delta3_ghz)
        return None

    @property
    def dissipation(self) -> t.Optional[t.Tuple[float, float]]:
        if self.t1_us is None and self.t2_us is None:
            return None
        return (math.inf if self.t1_us is None else self.t1_us, math.inf if self.t2_us is None else self.t2_us)

    def ladder(self) -> LadderParams:
        try:
            params = duffing_ladder(self.delta2, self.levels)
            if self.delta3 is not None:
                params = params.with_delta3(self.delta3)
        except ValueError as e:
            raise ConfigError(str(e), "levels") from e
        return params

    def to_record(self) -> t.Dict[str, t.Any]:
        record: t.Dict[str, t.Any] = {}
        for item in fields(self):
            value = getattr(self, item.name)
            if isinstance(value, (PulseFamily, EnvelopeKind, PrefactorMode)):
                value = enum_key(value)
            elif isinstance(value, tuple):
                value = [list(entry) if isinstance(entry, tuple) else entry for entry in value]
            record[item.name] = value
        record["derived_delta2_rad_per_ns"] = self.delta2
        record["derived_delta3_rad_per_ns"] = self.delta3
        return record

    @property
    def digest(self) -> str:
        canonical = json.dumps(self.to_record(), sort_keys=True, separators=(",", ":"), default=_json_default)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def header(self) -> t.List[str]:
        return [
            f"config-hash: {self.digest}",
            "config: " + json.dumps(self.to_record(), sort_keys=True, default=_json_default),
        ]


def _json_default(value: t.Any) -> t.Any:
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Cannot serialize {type(value).__name__}")
