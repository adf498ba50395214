"""Joule-proxy energy accounting.

``cost_model`` mode converts per-model compute-cost units into joules with
a fixed factor, which makes every energy figure a pure function of the
inference/training sequence. ``wall_clock_informational`` mode derives
pseudo-joules from elapsed time for display purposes only; nothing
deterministic may depend on it.
"""

from dataclasses import dataclass

from .errors import InsufficientDataError, ValidationError

COST_MODEL = "cost_model"
WALL_CLOCK = "wall_clock_informational"

# Nominal package power used to turn elapsed seconds into display joules.
WALL_CLOCK_WATTS = 45.0

DEFAULT_JOULES_PER_UNIT = 0.05


@dataclass(frozen=True)
class EnergyConfig:
    mode: str = COST_MODEL
    joules_per_unit: float = DEFAULT_JOULES_PER_UNIT

    def __post_init__(self):
        if self.mode not in (COST_MODEL, WALL_CLOCK):
            raise ValidationError(f"unknown energy mode {self.mode!r}", field="mode")
        if not self.joules_per_unit > 0:
            raise ValidationError(
                "joules_per_unit must be > 0", field="joules_per_unit"
            )


def measure_inference(desc, cfg: EnergyConfig, elapsed_s: float = 0.0) -> float:
    """Joules for one inference with the given model descriptor."""
    if cfg.mode == COST_MODEL:
        return desc.inference_cost_units * cfg.joules_per_unit
    return elapsed_s * WALL_CLOCK_WATTS


def measure_training(desc, n_samples: int, epochs: int, cfg: EnergyConfig,
                     elapsed_s: float = 0.0) -> float:
    """Joules for one training pass over ``n_samples`` for ``epochs``."""
    if n_samples < 1:
        raise InsufficientDataError("training energy requires n_samples >= 1")
    if epochs < 1:
        raise InsufficientDataError("training energy requires epochs >= 1")
    if cfg.mode == COST_MODEL:
        return desc.training_cost_units_per_sample * n_samples * epochs * cfg.joules_per_unit
    return elapsed_s * WALL_CLOCK_WATTS
