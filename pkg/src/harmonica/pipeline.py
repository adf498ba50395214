"""The managed system: dataset replay, windowing, inference, metering.

Replays a flow trace one window at a time with the currently deployed
model version. Ground truth for a prediction becomes visible one step
later, so each step back-fills the previous telemetry record.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from .energy import COST_MODEL, EnergyConfig, measure_inference, measure_training
from .errors import HarmonicaError, InputError, InsufficientDataError, ValidationError
from .knowledge import KnowledgeStore, TelemetryRecord
from .models import ModelVersion, N_LAGS, WindowSample, descriptor, fit, load_predictor

# Deterministic latency proxy used in cost-model mode so that replays are
# byte-identical; wall-clock mode records real timings instead.
LATENCY_MS_PER_UNIT = 0.002


@dataclass(frozen=True)
class TimePoint:
    timestamp: str
    flow: float


@dataclass(frozen=True)
class DriftSpec:
    """Affine transform applied to flow values in [start_index, end_index)."""

    start_index: int
    end_index: int
    scale: float
    shift: float


def validate_drift_specs(drifts, n_points: int, field_prefix: str = "drift_specs"):
    spans = []
    for i, d in enumerate(drifts):
        path = f"{field_prefix}[{i}]"
        if d.start_index < 0:
            raise ValidationError("start_index must be >= 0", field=f"{path}.start_index")
        if d.end_index <= d.start_index:
            raise ValidationError(
                "end_index must be > start_index", field=f"{path}.end_index"
            )
        if d.end_index > n_points:
            raise ValidationError(
                f"end_index {d.end_index} beyond dataset length {n_points}",
                field=f"{path}.end_index",
            )
        spans.append((d.start_index, d.end_index, path))
    spans.sort()
    for (s1, e1, _), (s2, _, path) in zip(spans, spans[1:]):
        if s2 < e1:
            raise ValidationError("drift ranges overlap", field=f"{path}.start_index")


def ingest(points, drifts) -> list[TimePoint]:
    """Apply drift transforms; points outside every range pass through."""
    validate_drift_specs(drifts, len(points))
    out = list(points)
    for d in drifts:
        for i in range(d.start_index, d.end_index):
            p = out[i]
            out[i] = TimePoint(p.timestamp, d.scale * p.flow + d.shift)
    return out


def make_windows(points) -> list[WindowSample]:
    """Slide a 5-lag window over the trace; sample j predicts flow[j+5]."""
    if len(points) < N_LAGS + 1:
        raise InsufficientDataError(
            f"need at least {N_LAGS + 1} points, got {len(points)}"
        )
    flows = [p.flow for p in points]
    return [
        WindowSample(tuple(flows[j : j + N_LAGS]), flows[j + N_LAGS])
        for j in range(len(points) - N_LAGS)
    ]


def parse_dataset_csv(text: str) -> list[TimePoint]:
    """Parse the ``timestamp,flow`` upload format with line-numbered errors."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != "timestamp,flow":
        raise InputError("line 1: expected header 'timestamp,flow'")
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 2 comma-separated fields")
        ts, flow_s = parts[0].strip(), parts[1].strip()
        if not ts or any(c in ts for c in '",\n'):
            raise InputError(f"line {lineno}: invalid timestamp")
        try:
            flow = float(flow_s)
        except ValueError:
            raise InputError(f"line {lineno}: flow {flow_s!r} is not numeric") from None
        if not np.isfinite(flow):
            raise InputError(f"line {lineno}: flow must be finite")
        points.append(TimePoint(ts, flow))
    if len(points) < N_LAGS + 1:
        raise InsufficientDataError(
            f"dataset needs at least {N_LAGS + 1} rows, got {len(points)}"
        )
    return points


def render_dataset_csv(points) -> str:
    return "timestamp,flow\n" + "\n".join(f"{p.timestamp},{p.flow!r}" for p in points) + "\n"


class InferencePipeline:
    """Runs inference steps against the knowledge store.

    Timestamps for records come from the replayed points; callers pass the
    timestamp of the instant being predicted.
    """

    def __init__(self, knowledge: KnowledgeStore, energy_cfg: EnergyConfig):
        self.knowledge = knowledge
        self.energy_cfg = energy_cfg
        self._deployed: ModelVersion | None = None
        self._predictor = None
        self._cumulative_energy = 0.0
        self._pending_training_energy = 0.0
        self._pending_truth: tuple[int, float] | None = None

    @property
    def deployed(self) -> ModelVersion | None:
        return self._deployed

    def deploy(self, version: ModelVersion) -> None:
        self._predictor = load_predictor(version)
        self._deployed = version

    def swap_model(self, version: ModelVersion) -> int:
        """Atomically swap the deployed version; returns the previous id."""
        if self._deployed is None:
            raise HarmonicaError("no model deployed")
        prev = self._deployed.version_id
        if version.version_id != prev:
            self.deploy(version)
        return prev

    def charge_training(self, joules: float) -> None:
        """Queue training energy; it lands on the next record's cumulative."""
        self._pending_training_energy += joules

    def step(self, sample: WindowSample, timestamp: str) -> TelemetryRecord:
        if self._deployed is None or self._predictor is None:
            raise HarmonicaError("no model deployed")
        lags = np.asarray(sample.lags, dtype=np.float64)
        if not np.isfinite(lags).all():
            raise InputError("lags contain non-finite values")

        desc = descriptor(self._deployed.model_id)
        if self.energy_cfg.mode == COST_MODEL:
            prediction = self._predictor(lags)
            latency_ms = desc.inference_cost_units * LATENCY_MS_PER_UNIT
            energy = measure_inference(desc, self.energy_cfg)
        else:
            t0 = time.perf_counter()
            prediction = self._predictor(lags)
            elapsed = time.perf_counter() - t0
            latency_ms = elapsed * 1e3
            energy = measure_inference(desc, self.energy_cfg, elapsed_s=elapsed)

        self._cumulative_energy += self._pending_training_energy + energy
        self._pending_training_energy = 0.0

        seq = self.knowledge.telemetry_length
        record = TelemetryRecord(
            seq=seq,
            timestamp=timestamp,
            model_id=self._deployed.model_id,
            prediction=prediction,
            latency_ms=latency_ms,
            energy_j=energy,
            cumulative_energy_j=self._cumulative_energy,
        )
        self.knowledge.append_telemetry(record)
        self.knowledge.append_sample(sample)

        if self._pending_truth is not None:
            prev_seq, truth = self._pending_truth
            self.knowledge.backfill_actual(prev_seq, truth)
        self._pending_truth = (seq, sample.target)
        return record

    def flush(self) -> None:
        """Fill the final record's ground truth when replay ends."""
        if self._pending_truth is not None:
            seq, truth = self._pending_truth
            self.knowledge.backfill_actual(seq, truth)
            self._pending_truth = None

    def retrain(self, model_id: str, samples, seed: int, trained_at_seq: int) -> ModelVersion:
        """Fit, store, and charge training energy; caller decides deployment."""
        if len(samples) < 10:
            raise InsufficientDataError(
                f"retrain requires at least 10 samples, got {len(samples)}"
            )
        version = fit(model_id, samples, seed, energy_cfg=self.energy_cfg)
        version = replace(version, trained_at_seq=trained_at_seq)
        vid = self.knowledge.store_version(version)
        stored = self.knowledge.get_version(vid)
        self.charge_training(stored.training_cost_j)
        return stored
