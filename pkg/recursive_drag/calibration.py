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

import asyncio
import inspect
import logging
import math
import os
import typing as t
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize

from recursive_drag.analytics import delta_c_closed_form, predict_prefactors
from recursive_drag.errors import CalibrationError, PulseDomainError, SynthesisInfeasibleError
from recursive_drag.metrics import GateResult, evaluate_gate
from recursive_drag.model import LadderParams
from recursive_drag.propagation import projected_fidelity, propagate_unitary
from recursive_drag.pulse.properties import DetuningMode, EnvelopeKind, PrefactorMode, PrefactorSet, PulseFamily
from recursive_drag.pulse.synthesis import PulseRecipe
from recursive_drag.utils import log_duration, pretty_enum_name

logger = logging.getLogger(__name__)

# (T1, T2*) in microseconds
DECOHERENCE_PRESETS: t.Dict[str, t.Tuple[float, float]] = {
    "short": (40.0, 50.0),
    "medium": (280.0, 220.0),
    "long": (1000.0, 1000.0),
}

OPTIMIZED_PARAMETERS: t.Dict[PulseFamily, t.Tuple[str, ...]] = {
    PulseFamily.DRAG: ("beta", "alpha12", "delta_c"),
    PulseFamily.R1D: ("beta", "alpha12", "alpha02", "delta_c"),
    PulseFamily.R2D: ("beta", "alpha12", "alpha02", "alpha13", "delta_c"),
}

SIMPLEX_EDGE = 0.02
MAX_EVALUATIONS = 2000
SPREAD_TOLERANCE = 1e-12
DELTA_C_BOUND_FACTOR = 20.0
DEFAULT_SEED = 1234

ERROR_TARGET = 1e-4
ANSATZ_MAX_DURATION = 30.0
ANSATZ_SCAN_STEP = 0.25
ANSATZ_RESOLUTION = 0.01

Dissipation = t.Optional[t.Tuple[float, float]]


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    parameters: t.Tuple[float, ...]
    infidelity: float


@dataclass(frozen=True)
class CalibrationRun:
    family: PulseFamily
    duration: float
    initial: PrefactorSet
    final: PrefactorSet
    initial_infidelity: float
    final_infidelity: float
    trace: t.Tuple[TraceEntry, ...]
    converged: bool
    seed: int

    @property
    def evaluations(self) -> int:
        return len(self.trace)

    @property
    def running_best(self) -> t.List[float]:
        return list(np.minimum.accumulate([entry.infidelity for entry in self.trace]))

    def to_record(self) -> t.Dict[str, t.Any]:
        return {
            "family": self.family.name.lower(),
            "T_ns": self.duration,
            "initial": self.initial.to_record(),
            "final": self.final.to_record(),
            "initial_infidelity": self.initial_infidelity,
            "final_infidelity": self.final_infidelity,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SweepPoint:
    duration: float
    prefactors: PrefactorSet
    result: t.Optional[GateResult] = None
    error: t.Optional[str] = None
    run: t.Optional[CalibrationRun] = None

    @property
    def feasible(self) -> bool:
        return self.result is not None

    @property
    def infidelity(self) -> float:
        return self.result.infidelity if self.result is not None else math.nan

    def to_row(self) -> t.List[t.Any]:
        p = self.prefactors
        return [
            self.duration,
            self.infidelity,
            p.beta,
            p.alpha12,
            p.alpha02,
            p.alpha13,
            math.nan if p.delta_c is None else p.delta_c,
        ]


@dataclass(frozen=True)
class SweepProgress:
    """One finished gate time of a sweep; `done` counts completions, which need not follow the grid order."""

    family: PulseFamily
    point: SweepPoint
    done: int
    total: int

    @property
    def fraction(self) -> float:
        return self.done / self.total

    def describe(self) -> str:
        if self.point.feasible:
            outcome = f"infidelity {self.point.infidelity:.3e}"
        else:
            outcome = f"infeasible ({self.point.error})"
        return f"{pretty_enum_name(self.family)} [{self.done}/{self.total}] T = {self.point.duration:.3f} ns: {outcome}"


SweepListener = t.Callable[[SweepProgress], t.Optional[t.Awaitable[None]]]


class SweepProgressCallback:
    """Fans sweep progress out to plain and coroutine listeners. A failing listener never stops the sweep."""

    def __init__(self, *listeners: SweepListener) -> None:
        self.listeners: t.List[SweepListener] = []
        for listener in listeners:
            self.add(listener)

    def add(self, listener: SweepListener) -> bool:
        if listener in self.listeners:
            return False

        self.listeners.append(listener)
        return True

    def remove(self, listener: SweepListener) -> bool:
        if listener not in self.listeners:
            return False

        self.listeners.remove(listener)
        return True

    async def __call__(self, progress: SweepProgress) -> None:
        pending = []
        for listener in self.listeners:
            try:
                outcome = listener(progress)
            except Exception:
                logger.exception(f"Sweep listener {listener!r} failed at T = {progress.point.duration} ns")
                continue
            if inspect.isawaitable(outcome):
                pending.append(outcome)

        for outcome in await asyncio.gather(*pending, return_exceptions=True):
            if isinstance(outcome, Exception):
                logger.error(f"Sweep listener failed at T = {progress.point.duration} ns: {outcome!r}")


@dataclass(frozen=True)
class AnsatzEntry:
    n: int
    j: int
    k: float
    duration: t.Optional[float]
    infidelity: float = math.nan

    @property
    def reachable(self) -> bool:
        return self.duration is not None

    def to_row(self) -> t.List[t.Any]:
        return [self.n, self.j, self.k, "unreachable" if self.duration is None else self.duration]


def calibration_recipe(family: PulseFamily, params: LadderParams) -> PulseRecipe:
    """Recipe the optimizer tunes: no superlinear terms, constant detuning from the prefactors."""
    if family not in OPTIMIZED_PARAMETERS:
        raise PulseDomainError(f"No calibration family {family.name.lower()}")
    return PulseRecipe.for_ladder(family, params, detuning=DetuningMode.NONE)


def unitary_infidelity(
    recipe: PulseRecipe, params: LadderParams, duration: float, steps_hint: t.Optional[int] = None
) -> t.Tuple[float, int]:
    wave = recipe.build(duration)
    propagator = propagate_unitary(params, wave, steps_hint)
    return 1.0 - min(1.0, projected_fidelity(propagator.unitary)), propagator.steps


def initial_prefactors(family: PulseFamily, params: LadderParams, duration: float) -> PrefactorSet:
    """Magnus predictions for beta, alpha12 and delta_c; the recursive alphas start at one."""
    recipe = PulseRecipe.for_ladder(family, params, detuning=DetuningMode.NONE)
    omega_x = None
    if family != PulseFamily.DRAG:
        omega_x = recipe.omega_x(recipe.amplitude(duration), duration)
    return predict_prefactors(params, duration, omega_x).prefactors


def _vector(prefactors: PrefactorSet, names: t.Sequence[str]) -> npt.NDArray[np.float64]:
    record = prefactors.to_record()
    return np.array([0.0 if record[name] is None else float(record[name]) for name in names])


def _prefactors(vector: npt.ArrayLike, names: t.Sequence[str]) -> PrefactorSet:
    return PrefactorSet(**dict(zip(names, (float(value) for value in np.asarray(vector)))))


def _initial_simplex(
    x0: npt.NDArray[np.float64], scales: npt.NDArray[np.float64], rng: np.random.Generator
) -> npt.NDArray[np.float64]:
    edges = SIMPLEX_EDGE * scales * rng.uniform(0.9, 1.1, size=x0.size)
    return np.vstack([x0] + [x0 + edge * unit for edge, unit in zip(edges, np.eye(x0.size))])


@log_duration(logging.INFO)
def optimize_prefactors(
    family: PulseFamily,
    params: LadderParams,
    duration: float,
    init: t.Optional[PrefactorSet] = None,
    *,
    seed: int = DEFAULT_SEED,
    max_evaluations: int = MAX_EVALUATIONS,
) -> CalibrationRun:
    """Nelder-Mead on the unitary infidelity, starting from `init` or the Magnus predictions."""
    names = OPTIMIZED_PARAMETERS.get(family)
    if names is None:
        raise PulseDomainError(f"No calibration family {family.name.lower()}")

    closed = params.closed() if params.dissipative else params
    if init is None:
        init = initial_prefactors(family, closed, duration)
    if init.delta_c is None:
        init = init.updated(delta_c=0.0)

    recipe = calibration_recipe(family, closed)
    x0 = _vector(init, names)
    alpha = init.alpha12
    delta_c_bound = DELTA_C_BOUND_FACTOR * max(
        abs(delta_c_closed_form(alpha, closed.lambda2, closed.delta2, duration)),
        abs(delta_c_closed_form(1.0, closed.lambda2, closed.delta2, duration)),
    )

    trace: t.List[TraceEntry] = []
    steps_hint: t.List[int] = []

    def objective(vector: npt.NDArray[np.float64]) -> float:
        values = dict(zip(names, vector))
        if abs(values["delta_c"]) > delta_c_bound or min(values.get(name, 1.0) for name in names[:-1]) <= 0:
            infidelity = math.inf
        else:
            try:
                infidelity, steps = unitary_infidelity(
                    recipe.with_prefactors(_prefactors(vector, names)),
                    closed,
                    duration,
                    steps_hint[0] // 2 if steps_hint else None,
                )
                if not steps_hint:
                    steps_hint.append(steps)
            except SynthesisInfeasibleError:
                infidelity = math.inf

        trace.append(TraceEntry(len(trace) + 1, tuple(float(value) for value in vector), infidelity))
        logger.debug(f"{family.name} evaluation {len(trace)}: {dict(zip(names, vector))} -> {infidelity:.6e}")
        return infidelity

    initial_infidelity = objective(x0)
    scales = np.where(np.abs(x0) > 0, np.abs(x0), delta_c_bound / DELTA_C_BOUND_FACTOR)
    rng = np.random.default_rng(seed)

    best = x0
    converged = False
    # One restart from the best vertex
    for _ in range(2):
        remaining = max_evaluations - len(trace)
        if remaining <= len(names) + 1:
            break
        result = minimize(
            objective,
            best,
            method="Nelder-Mead",
            options={
                "initial_simplex": _initial_simplex(best, scales, rng),
                "maxfev": remaining,
                "fatol": SPREAD_TOLERANCE,
                "xatol": math.inf,
            },
        )
        best = np.asarray(result.x)
        converged = bool(result.success)

    best_entry = min(trace, key=lambda entry: entry.infidelity)
    if math.isinf(best_entry.infidelity):
        raise CalibrationError(f"Every {family.name} parameter point was infeasible at T = {duration} ns")

    run = CalibrationRun(
        family=family,
        duration=duration,
        initial=init,
        final=_prefactors(best_entry.parameters, names),
        initial_infidelity=initial_infidelity,
        final_infidelity=best_entry.infidelity,
        trace=tuple(trace),
        converged=converged,
        seed=seed,
    )
    logger.info(
        f"Calibrated {family.name} at T = {duration} ns: {initial_infidelity:.3e} -> {run.final_infidelity:.3e} "
        f"in {run.evaluations} evaluations"
    )
    return run


def sweep_recipe(
    family: PulseFamily, params: LadderParams, prefactors: PrefactorSet, mode: PrefactorMode, superlinear: bool
) -> PulseRecipe:
    if mode == PrefactorMode.ANALYTIC:
        return PulseRecipe.for_ladder(family, params, superlinear=superlinear)
    return PulseRecipe.for_ladder(family, params, detuning=DetuningMode.NONE).with_prefactors(prefactors)


def sweep_point(
    family: PulseFamily,
    params: LadderParams,
    duration: float,
    mode: PrefactorMode,
    dissipation: Dissipation = None,
    superlinear: bool = True,
    init: t.Optional[PrefactorSet] = None,
    seed: int = DEFAULT_SEED,
) -> SweepPoint:
    """One gate time of a sweep; infeasible gate times come back as points carrying the error."""
    prefactors = PrefactorSet()
    run = None
    try:
        if mode == PrefactorMode.PREDICTED:
            prefactors = initial_prefactors(family, params, duration)
        elif mode == PrefactorMode.OPTIMIZED:
            run = optimize_prefactors(family, params, duration, init, seed=seed)
            prefactors = run.final

        wave = sweep_recipe(family, params, prefactors, mode, superlinear).build(duration)
        noisy = params if dissipation is None else params.with_decoherence(*dissipation)
        result = evaluate_gate(noisy, wave, dissipative=dissipation is not None)
    except (SynthesisInfeasibleError, CalibrationError) as e:
        logger.warning(f"{family.name} at T = {duration} ns is infeasible: {e}")
        return SweepPoint(duration, prefactors, error=str(e), run=run)

    return SweepPoint(duration, prefactors, result, run=run)


def _check_grid(durations: t.Sequence[float]) -> None:
    if not durations:
        raise PulseDomainError("Gate time grid is empty")
    if any(later <= earlier for earlier, later in zip(durations, durations[1:])):
        raise PulseDomainError("Gate time grid must be strictly increasing")


async def sweep_async(
    family: PulseFamily,
    params: LadderParams,
    durations: t.Sequence[float],
    mode: PrefactorMode = PrefactorMode.ANALYTIC,
    dissipation: Dissipation = None,
    *,
    superlinear: bool = True,
    jobs: t.Optional[int] = None,
    seed: int = DEFAULT_SEED,
    progress: t.Optional[SweepProgressCallback] = None,
) -> t.List[SweepPoint]:
    """Sweep over gate times; optimized sweeps warm-start each point from the previous optimum."""
    grid = list(durations)
    _check_grid(grid)
    closed = params.closed()
    workers = jobs or os.cpu_count() or 1
    done = 0

    async def report(point: SweepPoint) -> SweepPoint:
        nonlocal done
        done += 1
        if progress is not None:
            await progress(SweepProgress(family, point, done, len(grid)))
        return point

    if mode == PrefactorMode.OPTIMIZED or workers == 1:
        points = []
        init = None
        for duration in grid:
            point = sweep_point(family, closed, duration, mode, dissipation, superlinear, init, seed)
            if point.run is not None:
                init = point.run.final
            points.append(await report(point))
        return points

    loop = asyncio.get_running_loop()
    executor: Executor
    with ProcessPoolExecutor(max_workers=workers) as executor:

        async def run(duration: float) -> SweepPoint:
            point = await loop.run_in_executor(
                executor, sweep_point, family, closed, duration, mode, dissipation, superlinear, None, seed
            )
            return await report(point)

        points = await asyncio.gather(*(run(duration) for duration in grid))

    return sorted(points, key=lambda point: point.duration)


def sweep(
    family: PulseFamily,
    params: LadderParams,
    durations: t.Sequence[float],
    mode: PrefactorMode = PrefactorMode.ANALYTIC,
    dissipation: Dissipation = None,
    **kwargs: t.Any,
) -> t.List[SweepPoint]:
    return asyncio.run(sweep_async(family, params, durations, mode, dissipation, **kwargs))


def _ansatz_infidelity(recipe: PulseRecipe, params: LadderParams, duration: float) -> float:
    try:
        return unitary_infidelity(recipe, params, duration)[0]
    except SynthesisInfeasibleError:
        return math.inf


def ansatz_scan(
    pairs: t.Iterable[t.Tuple[int, int]],
    params: LadderParams,
    error_target: float = ERROR_TARGET,
    *,
    max_duration: float = ANSATZ_MAX_DURATION,
    superlinear: bool = True,
) -> t.List[AnsatzEntry]:
    """Shortest R2D gate time over each (n, j) Fourier ansatz with infidelity at or below the target.

    Gate times are scanned upward from T_min and the first crossing is refined by bisection.
    """
    closed = params.closed()
    entries = []
    for n, j in pairs:
        recipe = PulseRecipe.for_ladder(
            PulseFamily.R2D, closed, shape=EnvelopeKind.FOURIER_ANSATZ, n=n, j=j, superlinear=superlinear
        )
        k = recipe.base(1.0, 1.0).k
        start = max(recipe.t_min() + ANSATZ_RESOLUTION, ANSATZ_RESOLUTION)

        low, high = None, None
        previous = start
        for duration in np.arange(start, max_duration + ANSATZ_SCAN_STEP / 2, ANSATZ_SCAN_STEP):
            if _ansatz_infidelity(recipe, closed, float(duration)) <= error_target:
                low, high = previous, float(duration)
                break
            previous = float(duration)

        if high is None or low is None:
            logger.info(f"Ansatz n={n} j={j} does not reach {error_target:g} below {max_duration} ns")
            entries.append(AnsatzEntry(n, j, k, None))
            continue

        while high - low > ANSATZ_RESOLUTION:
            middle = 0.5 * (low + high)
            if _ansatz_infidelity(recipe, closed, middle) <= error_target:
                high = middle
            else:
                low = middle

        infidelity = _ansatz_infidelity(recipe, closed, high)
        logger.info(f"Ansatz n={n} j={j} (k={k:g}) reaches {error_target:g} at T = {high:.3f} ns")
        entries.append(AnsatzEntry(n, j, k, high, infidelity))

    return sorted(entries, key=lambda entry: (entry.duration is None, entry.duration or 0.0))
