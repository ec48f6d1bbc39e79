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


from recursive_drag.pulse.envelopes import (
    BasePipeline,
    BoundaryReport,
    Envelope,
    Evaluable,
    calibrate_amplitude,
    check_boundary,
    evaluate,
    rotation_angle,
)
from recursive_drag.pulse.properties import (
    DerivativeMethod,
    DetuningMode,
    EnvelopeKind,
    PrefactorMode,
    PrefactorSet,
    Provenance,
    PulseFamily,
    SuperlinearPath,
    TminKind,
)
from recursive_drag.pulse.synthesis import (
    ControlWaveform,
    PulseRecipe,
    RecursivePulse,
    apply_prefactors,
    superlinear_correct,
    synth_drag,
    synth_r1d,
    synth_r2d,
    tmin,
)

__all__ = [
    "BasePipeline",
    "BoundaryReport",
    "ControlWaveform",
    "DerivativeMethod",
    "DetuningMode",
    "Envelope",
    "EnvelopeKind",
    "Evaluable",
    "PrefactorMode",
    "PrefactorSet",
    "Provenance",
    "PulseFamily",
    "PulseRecipe",
    "RecursivePulse",
    "SuperlinearPath",
    "TminKind",
    "apply_prefactors",
    "calibrate_amplitude",
    "check_boundary",
    "evaluate",
    "rotation_angle",
    "superlinear_correct",
    "synth_drag",
    "synth_r1d",
    "synth_r2d",
    "tmin",
]
