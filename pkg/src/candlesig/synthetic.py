"""Seeded synthetic price generators for demos and tests."""

from __future__ import annotations

import datetime as dt
import math
import random

from .ingest import RawSeries


def weekly_prices(
    n: int = 780,
    seed: int = 7,
    start: dt.date = dt.date(2008, 1, 5),
    level: float = 200_000.0,
    drift: float = 0.0012,
    cycle_weeks: float = 160.0,
    cycle_amplitude: float = 0.08,
    noise: float = 0.006,
    label: str = "synthetic-weekly",
) -> RawSeries:
    """Weekly log-price random walk with drift, a slow cycle and Gaussian noise.

    Values are rounded to cents so the series round-trips through CSV.
    """
    rng = random.Random(seed)
    points = []
    log_p = math.log(level)
    for i in range(n):
        log_p += drift + rng.gauss(0.0, noise)
        cyc = cycle_amplitude * math.sin(2 * math.pi * i / cycle_weeks)
        points.append((start + dt.timedelta(weeks=i), round(math.exp(log_p + cyc), 2)))
    return RawSeries(tuple(points), label=label)
