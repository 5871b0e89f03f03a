"""Time-sampling schedules: generation, rounding, serialization.

A schedule is the ordered list of evolution times fed to successive
measurement cycles. Geometric ("superiteration") schedules divide a
total time budget T so that cycle n runs for t1 / alpha**(n-1); the
alpha = 1 limit is the uniform schedule T/N per cycle. Random schedules
draw each time as sigma * |z| with z standard normal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

# Reported schedules treat entries below this as discarded; generators
# keep raw values so time budgets stay exact.
TIME_FLOOR = 1e-6


@dataclass(frozen=True)
class TimeSchedule:
    """Ordered, nonnegative evolution times for one rodeo run."""

    times: np.ndarray
    total_time: float = field(init=False)

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.times, dtype=float)).copy()
        if t.ndim != 1:
            raise ValueError("schedule times must be one dimensional")
        if t.size and not np.all(np.isfinite(t)):
            raise ValueError("schedule times must be finite")
        if t.size and t.min() < 0:
            raise ValueError("schedule times must be nonnegative")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "total_time", float(t.sum()))

    def __len__(self) -> int:
        return int(self.times.size)

    def canonical(self, floor: float = TIME_FLOOR) -> "TimeSchedule":
        """Drop entries below ``floor`` (their filter factors are 1 to
        within roundoff at band scales of order unity)."""
        return TimeSchedule(self.times[self.times >= floor])


def superiteration_schedule(alpha: float, n_samples: int, total_time: float) -> TimeSchedule:
    """Geometric schedule t_n = t1 * alpha**-(n-1) summing to total_time.

    t1 = T * (1 - 1/alpha) / (1 - alpha**-N); alpha = 1 falls back to
    the uniform schedule T/N (the closed form is 0/0 there).
    """
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if n_samples < 1:
        raise ValueError("n_samples must be a positive integer")
    if not total_time > 0:
        raise ValueError("total_time must be positive")
    n = int(n_samples)
    if alpha == 1.0:
        return TimeSchedule(np.full(n, total_time / n))
    log_a = math.log(alpha)
    # expm1 keeps the ratio stable as alpha -> 1+.
    t1 = total_time * (-math.expm1(-log_a)) / (-math.expm1(-n * log_a))
    return TimeSchedule(t1 * alpha ** (-np.arange(n, dtype=float)))


def gaussian_random_schedule(sigma: float, n_samples: int, seed) -> TimeSchedule:
    """Draw times sigma * |z|, z ~ N(0, 1), from a seeded PCG64 stream.

    Sampling goes through the inverse normal CDF so every time consumes
    exactly one uniform draw, which keeps derived streams aligned.
    Stream rule: the generator is PCG64(SeedSequence(seed)); callers
    needing several schedules should spawn children of one SeedSequence.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if n_samples < 1:
        raise ValueError("n_samples must be a positive integer")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = np.clip(rng.random(int(n_samples)), 1e-16, 1.0 - 1e-16)
    return TimeSchedule(sigma * np.abs(ndtri(u)))


def trotter_round(schedule: TimeSchedule, dt: float) -> TimeSchedule:
    """Round each time down to a multiple of dt and drop the zeros."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    t = schedule.times
    mult = np.floor(t / dt)
    # A time already sitting on a multiple must not slip down a step.
    mult = np.where(t - (mult + 1.0) * dt > -1e-9 * dt, mult + 1.0, mult)
    rounded = mult * dt
    return TimeSchedule(rounded[rounded > 0])


def schedule_to_csv(schedule: TimeSchedule, path) -> None:
    with open(path, "w") as fh:
        for t in schedule.times:
            fh.write(f"{float(t)!r}\n")


def schedule_from_csv(path) -> TimeSchedule:
    times = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                times.append(float(line))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: not a time value: {line!r}")
    return TimeSchedule(np.array(times))


def schedule_to_json(schedule: TimeSchedule, path) -> None:
    with open(path, "w") as fh:
        json.dump([float(t) for t in schedule.times], fh)
        fh.write("\n")


def schedule_from_json(path) -> TimeSchedule:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of times")
    return TimeSchedule(np.array(data, dtype=float))


def read_schedule(path) -> TimeSchedule:
    """Load a schedule, dispatching on the file extension."""
    p = str(path)
    if p.endswith(".json"):
        return schedule_from_json(path)
    return schedule_from_csv(path)
