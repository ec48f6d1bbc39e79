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

import argparse
import asyncio
import logging

import numpy as np

from recursive_drag.calibration import DECOHERENCE_PRESETS, SweepProgressCallback, sweep_async
from recursive_drag.model import duffing_ladder, ghz_to_rad_per_ns
from recursive_drag.pulse.properties import PrefactorMode, PulseFamily
from recursive_drag.utils import enum_from_key, pretty_enum_name

drag_logger = logging.getLogger("recursive_drag")
logging.basicConfig(level=logging.WARNING, format="[%(asctime)s] %(levelname)-8s %(name)s: %(message)s")
drag_logger.setLevel(logging.INFO)
logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


async def report(update):
    logger.info(update.describe())


async def compare(args):
    params = duffing_ladder(ghz_to_rad_per_ns(args.delta2_ghz), args.levels)
    durations = np.arange(args.start, args.stop + args.step / 2, args.step)
    dissipation = DECOHERENCE_PRESETS[args.preset] if args.preset else None

    progress = SweepProgressCallback(report)

    table = {}
    for family in (PulseFamily.DRAG, PulseFamily.R1D, PulseFamily.R2D):
        logger.info(f"Sweeping {pretty_enum_name(family)} ({pretty_enum_name(args.mode).lower()} prefactors)")
        table[family] = await sweep_async(
            family,
            params,
            durations,
            args.mode,
            dissipation,
            superlinear=args.superlinear,
            jobs=args.jobs,
            progress=progress,
        )

    print(f"{'T_ns':>8}" + "".join(f"{family.name:>14}" for family in table))
    for i, duration in enumerate(durations):
        print(f"{duration:8.2f}" + "".join(f"{points[i].infidelity:14.3e}" for points in table.values()))


def parse_args():
    parser = argparse.ArgumentParser(description="Compare DRAG and recursive DRAG infidelities over gate time")
    parser.add_argument("--delta2-ghz", type=float, default=-0.225, help="anharmonicity Delta2/2pi in GHz")
    parser.add_argument("--levels", type=int, default=4)
    parser.add_argument("--start", type=float, default=5.0, help="shortest gate time in ns")
    parser.add_argument("--stop", type=float, default=20.0, help="longest gate time in ns")
    parser.add_argument("--step", type=float, default=1.0)
    parser.add_argument(
        "--mode",
        type=lambda value: enum_from_key(PrefactorMode, value),
        default=PrefactorMode.ANALYTIC,
        help="analytic, predicted or optimized",
    )
    parser.add_argument("--preset", choices=sorted(DECOHERENCE_PRESETS), help="decoherence preset (T1, T2*)")
    parser.add_argument("--superlinear", action=argparse.BooleanOptionalAction, default=True)
    parser.add_argument("--jobs", type=int, default=None, help="worker processes, all cores by default")

    return parser.parse_args()


if __name__ == "__main__":
    asyncio.run(compare(parse_args()))
