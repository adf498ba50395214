"""Synthetic diurnal traffic generator.

Produces a vehicles-per-5-minutes trace with a commuter-style daily
profile (two-harmonic sinusoid, rectified near-zero nights), a weekend
damping factor, a slowly wandering demand level, and flow-dependent noise.
Deterministic for a fixed (days, seed).
"""

import math
from datetime import datetime, timedelta

import numpy as np

from .pipeline import TimePoint

STEPS_PER_DAY = 288  # 5-minute readings

DEFAULT_PEAK_FLOW = 380.0
WEEKEND_FACTOR = 0.72
LEVEL_RHO = 0.995
LEVEL_DEPTH = 0.22
NOISE_FLOOR = 2.0
NOISE_SCALE = 1.1


def _daily_shape(day_frac: float) -> float:
    """Unit-height commuter profile; negative lobes clip to zero at night."""
    s = (
        0.32
        - 0.58 * math.cos(2.0 * math.pi * day_frac)
        + 0.28 * math.cos(4.0 * math.pi * (day_frac - 0.46))
    )
    return max(0.0, s)


def gen_trace(
    days: int,
    seed: int,
    peak_flow: float = DEFAULT_PEAK_FLOW,
    start: str = "2024-01-01",
) -> list[TimePoint]:
    if days < 1:
        raise ValueError("days must be >= 1")
    rng = np.random.default_rng(seed)
    t0 = datetime.fromisoformat(start)
    n = days * STEPS_PER_DAY

    points = []
    level = 0.0
    sqrt_1mr2 = math.sqrt(1.0 - LEVEL_RHO**2)
    for i in range(n):
        ts = t0 + timedelta(minutes=5 * i)
        day_frac = (i % STEPS_PER_DAY) / STEPS_PER_DAY
        dow = (i // STEPS_PER_DAY) % 7
        level = LEVEL_RHO * level + sqrt_1mr2 * rng.standard_normal()

        base = peak_flow * _daily_shape(day_frac)
        if dow >= 5:
            base *= WEEKEND_FACTOR
        base *= 1.0 + LEVEL_DEPTH * math.tanh(level)

        sigma = NOISE_FLOOR + NOISE_SCALE * math.sqrt(max(base, 0.0))
        flow = max(0.0, base + sigma * rng.standard_normal())
        points.append(TimePoint(ts.strftime("%Y-%m-%d %H:%M"), round(flow, 3)))
    return points
