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

import functools
import logging
import time
import typing as t
from enum import Enum

logger = logging.getLogger(__name__)


def pretty_enum_name(enum: Enum) -> str:
    return enum.name.title().replace("_", " ")


def enum_key(enum: Enum) -> str:
    """Command line / config spelling of an enum member, e.g. FOURIER_BL -> fourier-bl."""
    return enum.name.lower().replace("_", "-")


E = t.TypeVar("E", bound=Enum)


def enum_from_key(enum_cls: t.Type[E], key: str) -> E:
    try:
        return enum_cls[key.strip().upper().replace("-", "_")]
    except KeyError:
        choices = ", ".join(enum_key(member) for member in enum_cls)
        raise ValueError(f"unknown {enum_cls.__name__} '{key}' (choose from {choices})") from None


# Return type of the wrapped function
R = t.TypeVar("R")

# Parameters of the wrapped function
P = t.ParamSpec("P")


def log_duration(level: int = logging.DEBUG) -> t.Callable[[t.Callable[P, R]], t.Callable[P, R]]:
    def decorator(func: t.Callable[P, R]) -> t.Callable[P, R]:
        func_logger = logging.getLogger(func.__module__)

        @functools.wraps(func)
        def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
            start = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                func_logger.log(level, f"{func.__qualname__} took {time.perf_counter() - start:.3f} s")

        return wrapper

    return decorator
