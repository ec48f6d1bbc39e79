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


class RecursiveDragError(Exception):
    pass


class PulseDomainError(RecursiveDragError, ValueError):
    pass


class SingularParameterError(RecursiveDragError, ValueError):
    pass


class ConfigError(RecursiveDragError, ValueError):
    def __init__(self, message: str, field: t.Optional[str] = None) -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class SynthesisInfeasibleError(RecursiveDragError):
    """A square-root radicand went negative, so the pulse is not real at this gate time."""

    def __init__(
        self,
        message: str,
        *,
        level: str,
        t_min: t.Optional[float] = None,
        worst_time: t.Optional[float] = None,
        worst_radicand: t.Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.level = level
        self.t_min = t_min
        self.worst_time = worst_time
        self.worst_radicand = worst_radicand


class BracketingError(RecursiveDragError):
    pass


class NumericalConvergenceError(RecursiveDragError):
    def __init__(self, message: str, **diagnostics: t.Any) -> None:
        if diagnostics:
            message += " (" + ", ".join(f"{key}={value}" for key, value in diagnostics.items()) + ")"
        super().__init__(message)
        self.diagnostics = diagnostics


class DegenerateDenominatorError(NumericalConvergenceError):
    pass


class CalibrationError(RecursiveDragError):
    pass
