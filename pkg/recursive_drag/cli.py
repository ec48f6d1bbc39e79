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

import argparse
import contextlib
import csv
import json
import logging
import sys
import typing as t

import numpy as np

from recursive_drag import __version__
from recursive_drag.analytics import predict_prefactors
from recursive_drag.calibration import (
    AnsatzEntry,
    SweepProgressCallback,
    ansatz_scan,
    initial_prefactors,
    optimize_prefactors,
    sweep,
)
from recursive_drag.config import PARSERS, RunConfig
from recursive_drag.errors import (
    BracketingError,
    CalibrationError,
    ConfigError,
    NumericalConvergenceError,
    PulseDomainError,
    SingularParameterError,
    SynthesisInfeasibleError,
)
from recursive_drag.metrics import evaluate_gate
from recursive_drag.propagation import DensityState, population_trajectory, write_populations_csv
from recursive_drag.pulse.properties import DetuningMode, EnvelopeKind, PrefactorMode, PulseFamily, TminKind
from recursive_drag.pulse.synthesis import PulseRecipe, tmin
from recursive_drag.utils import enum_key

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3

SWEEP_COLUMNS = ["T_ns", "infidelity", "beta", "alpha12", "alpha02", "alpha13", "delta_c"]
ANSATZ_COLUMNS = ["n", "j", "k", "T99p99_ns"]


def _format(value: t.Any) -> str:
    return format(value, ".17g") if isinstance(value, (float, np.floating)) else str(value)


@contextlib.contextmanager
def _output(path: t.Optional[str]) -> t.Iterator[t.TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as stream:
            yield stream


def _write_csv(config: RunConfig, columns: t.Sequence[str], rows: t.Iterable[t.Sequence[t.Any]]) -> None:
    with _output(config.output) as stream:
        for line in config.header():
            stream.write(f"# {line}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(value) for value in row])


def _write_json(config: RunConfig, payload: t.Any) -> None:
    document = {"config_hash": config.digest, "config": config.to_record(), "results": payload}
    with _output(config.output) as stream:
        json.dump(document, stream, indent=2, default=str)
        stream.write("\n")


def _recipe(config: RunConfig) -> PulseRecipe:
    return PulseRecipe.for_ladder(
        config.family,
        config.ladder(),
        shape=config.shape,
        n=config.n,
        j=config.j,
        superlinear=config.superlinear,
        theta=config.theta,
    )


def _calibrated_recipe(config: RunConfig, duration: float) -> PulseRecipe:
    """Recipe with the prefactors the configured mode asks for."""
    recipe = _recipe(config)
    if config.prefactor_mode == PrefactorMode.ANALYTIC or config.family == PulseFamily.HANN:
        return recipe

    params = config.ladder()
    if config.prefactor_mode == PrefactorMode.PREDICTED:
        prefactors = initial_prefactors(config.family, params, duration)
    else:
        prefactors = optimize_prefactors(config.family, params, duration, seed=config.seed).final
    return PulseRecipe.for_ladder(
        config.family, params, shape=config.shape, n=config.n, j=config.j, detuning=DetuningMode.NONE
    ).with_prefactors(prefactors)


def cmd_pulse(config: RunConfig) -> int:
    duration = config.T_ns[0]
    wave = _calibrated_recipe(config, duration).build(duration)
    with _output(config.output) as stream:
        wave.write_csv(stream, config.samples, config.header() + [f"pulse: {wave.tag}, T_ns={duration!r}"])
    return EXIT_OK


def cmd_simulate(config: RunConfig) -> int:
    params = config.ladder()
    results = []
    for duration in config.T_ns:
        recipe = _calibrated_recipe(config, duration)
        wave = recipe.build(duration)
        dissipation = config.dissipation
        noisy = params if dissipation is None else params.with_decoherence(*dissipation)
        result = evaluate_gate(noisy, wave, dissipative=dissipation is not None)
        record = result.to_record()
        record["prefactors"] = recipe.prefactors.to_record()
        results.append(record)

        if config.trajectory:
            ground = np.zeros(params.levels, dtype=complex)
            ground[0] = 1.0
            initial: t.Union[np.ndarray, DensityState] = (
                ground if dissipation is None else DensityState.pure(ground)
            )
            table = population_trajectory(noisy, wave, initial, config.stride)
            with open(config.trajectory, "w", newline="", encoding="utf-8") as stream:
                write_populations_csv(stream, table, config.header() + [f"pulse: {wave.tag}, T_ns={duration!r}"])

    _write_json(config, results)
    return EXIT_OK


def cmd_predict(config: RunConfig) -> int:
    params = config.ladder()
    results = []
    for duration in config.T_ns:
        omega_x = None
        if config.family in (PulseFamily.R1D, PulseFamily.R2D):
            recipe = _recipe(config)
            omega_x = recipe.omega_x(recipe.amplitude(duration), duration)
        results.append(predict_prefactors(params, duration, omega_x, config.alpha).to_record())
    _write_json(config, results)
    return EXIT_OK


def cmd_calibrate(config: RunConfig) -> int:
    params = config.ladder()
    results = []
    init = None
    for duration in config.T_ns:
        run = optimize_prefactors(config.family, params, duration, init, seed=config.seed)
        init = run.final
        results.append(run.to_record())
    _write_json(config, results)
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    progress = SweepProgressCallback(lambda update: logger.info(update.describe()))

    points = sweep(
        config.family,
        config.ladder(),
        config.T_ns,
        config.prefactor_mode,
        config.dissipation,
        superlinear=config.superlinear,
        jobs=config.jobs or None,
        seed=config.seed,
        progress=progress,
    )
    for point in points:
        if point.error:
            logger.warning(f"T = {point.duration} ns skipped: {point.error}")
    _write_csv(config, SWEEP_COLUMNS, (point.to_row() for point in points))
    return EXIT_OK


def cmd_ansatz_scan(config: RunConfig) -> int:
    entries: t.List[AnsatzEntry] = ansatz_scan(
        config.pairs, config.ladder(), config.error_target, superlinear=config.superlinear
    )
    _write_csv(config, ANSATZ_COLUMNS, (entry.to_row() for entry in entries))
    return EXIT_OK


def cmd_tmin(config: RunConfig) -> int:
    params = config.ladder()
    recipe = _recipe(config)
    if config.family == PulseFamily.R1D and recipe.base_kind == EnvelopeKind.SIN_POW:
        kind = TminKind.R1D
        value = tmin(kind, params.delta2, n=recipe.base_n)
    elif config.family == PulseFamily.R2D and recipe.base_kind == EnvelopeKind.SIN_POW:
        kind = TminKind.R2D
        value = tmin(kind, params.delta2, n=recipe.base_n, delta3=params.delta3)
    elif config.family in (PulseFamily.R1D, PulseFamily.R2D):
        kind = TminKind.NUMERIC
        value = recipe.t_min()
    else:
        raise ConfigError(f"family {enum_key(config.family)} has no minimum gate time", "family")

    _write_json(
        config,
        {
            "family": enum_key(config.family),
            "shape": enum_key(recipe.base_kind),
            "n": recipe.base_n,
            "kind": enum_key(kind),
            "T_min_ns": value,
        },
    )
    return EXIT_OK


COMMANDS: t.Dict[str, t.Callable[[RunConfig], int]] = {
    "pulse": cmd_pulse,
    "simulate": cmd_simulate,
    "predict": cmd_predict,
    "calibrate": cmd_calibrate,
    "sweep": cmd_sweep,
    "ansatz-scan": cmd_ansatz_scan,
    "tmin": cmd_tmin,
}


def _typed(parser: t.Callable[[str], t.Any]) -> t.Callable[[str], t.Any]:
    def convert(value: str) -> t.Any:
        try:
            return parser(value)
        except (ValueError, ConfigError) as e:
            raise argparse.ArgumentTypeError(str(e)) from e

    return convert


def build_parser() -> argparse.ArgumentParser:
    parsers = PARSERS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug")
    group = common.add_argument_group("run configuration (overrides the config file)")
    group.add_argument("--delta2-ghz", type=_typed(parsers["delta2_ghz"]), help="anharmonicity Delta2/2pi in GHz")
    group.add_argument("--delta2-rad-per-ns", type=_typed(parsers["delta2_rad_per_ns"]))
    group.add_argument("--delta3-ghz", type=_typed(parsers["delta3_ghz"]), help="override Delta3/2pi in GHz")
    group.add_argument("--delta3-rad-per-ns", type=_typed(parsers["delta3_rad_per_ns"]))
    group.add_argument("--levels", type=_typed(parsers["levels"]))
    group.add_argument("--family", type=_typed(parsers["family"]), help="hann, drag, r1d or r2d")
    group.add_argument("--shape", type=_typed(parsers["shape"]), help="base envelope of the family")
    group.add_argument("--n", type=_typed(parsers["n"]))
    group.add_argument("--j", type=_typed(parsers["j"]))
    group.add_argument("--superlinear", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--theta", type=_typed(parsers["theta"]), help="rotation angle in rad")
    group.add_argument(
        "--T", dest="T_ns", type=_typed(parsers["T_ns"]), help="gate times in ns: list a,b,c or range start:stop:step"
    )
    group.add_argument("--prefactor-mode", type=_typed(parsers["prefactor_mode"]))
    group.add_argument("--alpha", type=_typed(parsers["alpha"]), help="fixed DRAG prefactor for predict")
    group.add_argument("--t1-us", type=_typed(parsers["t1_us"]))
    group.add_argument("--t2-us", type=_typed(parsers["t2_us"]))
    group.add_argument("--samples", type=_typed(parsers["samples"]))
    group.add_argument("--seed", type=_typed(parsers["seed"]))
    group.add_argument("--jobs", type=_typed(parsers["jobs"]), help="worker processes, 0 for all cores")
    group.add_argument("--stride", type=_typed(parsers["stride"]))
    group.add_argument("--output", "-o", help="output file, stdout by default")
    group.add_argument("--trajectory", help="population trajectory CSV (simulate)")
    group.add_argument("--pairs", type=_typed(parsers["pairs"]), help="ansatz pairs n:j,n:j,...")
    group.add_argument("--error-target", type=_typed(parsers["error_target"]))

    parser = argparse.ArgumentParser(prog="recursive-drag", description="Recursive DRAG pulse toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def _configure_logging(verbosity: int) -> None:
    package_logger = logging.getLogger("recursive_drag")
    logging.basicConfig(level=logging.WARNING, format="[%(asctime)s] %(levelname)-8s %(name)s: %(message)s")
    if verbosity >= 2:
        package_logger.setLevel(logging.DEBUG)
    elif verbosity == 1:
        package_logger.setLevel(logging.INFO)


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    _configure_logging(args.verbose)
    overrides = {
        key: value for key, value in vars(args).items() if key not in ("command", "config", "verbose")
    }

    try:
        file_text = None
        if args.config:
            with open(args.config, encoding="utf-8") as stream:
                file_text = stream.read()
        config = RunConfig.resolve(file_text, overrides)
        return COMMANDS[args.command](config)
    except SynthesisInfeasibleError as e:
        minimum = "unknown" if e.t_min is None else f"{e.t_min:.4f} ns"
        print(f"error: infeasible gate time ({e}); T_min = {minimum}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (BracketingError, NumericalConvergenceError, CalibrationError) as e:
        print(f"error: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, PulseDomainError, SingularParameterError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
