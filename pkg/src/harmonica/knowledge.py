"""Shared state of the managing system.

Holds sustainability goals, the active adaptation policy, current and
versioned models, the incoming-data buffer, and the append-only
telemetry/adaptation logs. One writer (the run loop) mutates; REST
handlers read consistent snapshots under the lock.
"""

import threading
from dataclasses import dataclass, field, replace

from .errors import SequencingError, ValidationError
from .models import (
    DataSignature,
    ModelVersion,
    WindowSample,
    load_predictor,
    signature_distance,
)

METRICS = ("rolling_mae", "energy_per_inference_j", "latency_ms", "drift_score")
DIRECTIONS = ("upper", "lower")

# Tactic kinds
SWITCH_UP = "switch_up"
SWITCH_DOWN = "switch_down"
SWITCH_TO = "switch_to"
RETRAIN = "retrain"
REUSE_VERSION = "reuse_version"
NOOP = "noop"
TACTIC_KINDS = (SWITCH_UP, SWITCH_DOWN, SWITCH_TO, RETRAIN, REUSE_VERSION, NOOP)

# Event outcomes
APPLIED = "applied"
REUSE_HIT = "reuse_hit"
RETRAINED = "retrained"
OUTCOME_NOOP = "noop"

# Rule conditions beyond plain metrics
DRIFT_CONDITION = "drift"
# Goal label used for round-robin switch events, which no metric triggers.
SCHEDULE_GOAL = "schedule"


@dataclass(frozen=True)
class SustainabilityGoal:
    """A bound on one runtime metric, optionally with a dynamic band."""

    metric: str
    direction: str
    static_threshold: float
    dynamic: bool = False
    ewma_alpha: float = 0.1
    band_k: float = 3.0
    hysteresis_n: int = 3


def validate_goals(goals, field_prefix: str = "goals") -> None:
    """Check per-goal invariants and (metric, direction) uniqueness."""
    seen = set()
    for i, g in enumerate(goals):
        path = f"{field_prefix}[{i}]"
        if g.metric not in METRICS:
            raise ValidationError(f"unknown metric {g.metric!r}", field=f"{path}.metric")
        if g.direction not in DIRECTIONS:
            raise ValidationError(
                f"direction must be one of {DIRECTIONS}", field=f"{path}.direction"
            )
        if not isinstance(g.static_threshold, (int, float)) or not (
            float("-inf") < g.static_threshold < float("inf")
        ):
            raise ValidationError(
                "static_threshold must be finite", field=f"{path}.static_threshold"
            )
        if not 0.0 < g.ewma_alpha <= 1.0:
            raise ValidationError(
                "ewma_alpha must be in (0, 1]", field=f"{path}.ewma_alpha"
            )
        if g.band_k < 0:
            raise ValidationError("band_k must be >= 0", field=f"{path}.band_k")
        if g.hysteresis_n < 1:
            raise ValidationError(
                "hysteresis_n must be >= 1", field=f"{path}.hysteresis_n"
            )
        key = (g.metric, g.direction)
        if key in seen:
            raise ValidationError(
                f"duplicate goal for ({g.metric}, {g.direction})",
                field=f"{path}.metric",
            )
        seen.add(key)


@dataclass(frozen=True)
class Tactic:
    kind: str
    model_id: str | None = None
    version_id: int | None = None


@dataclass(frozen=True)
class PolicyRule:
    """First-match rule: a violated (metric, direction) or drift triggers the tactic."""

    metric: str  # metric name or DRIFT_CONDITION
    tactic: Tactic
    direction: str | None = None


@dataclass(frozen=True)
class AdaptationPolicy:
    name: str
    rules: tuple[PolicyRule, ...] = ()
    switch_interval: int = 100  # only read by the round-robin policy


@dataclass(frozen=True)
class TelemetryRecord:
    seq: int
    timestamp: str
    model_id: str
    prediction: float
    latency_ms: float
    energy_j: float
    cumulative_energy_j: float
    actual: float | None = None
    abs_error: float | None = None


@dataclass(frozen=True)
class AdaptationEvent:
    seq: int
    timestamp: str
    goal: str
    metric_value: float
    threshold: float
    tactic: str
    model_before: str
    model_after: str
    outcome: str
    version_used: int | None = None


TELEMETRY_COLUMNS = (
    "seq,timestamp,model_id,prediction,actual,abs_error,"
    "latency_ms,energy_j,cumulative_energy_j"
)
ADAPTATION_COLUMNS = (
    "seq,timestamp,goal,metric_value,threshold,tactic,"
    "model_before,model_after,version_used,outcome"
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class KnowledgeStore:
    """All repositories behind one lock; snapshot reads, atomic replaces."""

    def __init__(self):
        self._lock = threading.RLock()
        self._telemetry: list[TelemetryRecord] = []
        self._events: list[AdaptationEvent] = []
        self._goals: tuple[SustainabilityGoal, ...] = ()
        self._policy: AdaptationPolicy | None = None
        self._versions: list[ModelVersion] = []
        self._samples: list[WindowSample] = []

    # -- telemetry log ------------------------------------------------

    def append_telemetry(self, record: TelemetryRecord) -> int:
        with self._lock:
            if record.seq != len(self._telemetry):
                raise SequencingError(
                    f"expected seq {len(self._telemetry)}, got {record.seq}"
                )
            self._telemetry.append(record)
            return record.seq

    def backfill_actual(self, seq: int, actual: float) -> None:
        """Deferred ground-truth fill for a previously appended record."""
        with self._lock:
            rec = self._telemetry[seq]
            self._telemetry[seq] = replace(
                rec, actual=actual, abs_error=abs(rec.prediction - actual)
            )

    def read_telemetry(self, since_seq: int = 0, limit: int | None = None):
        since_seq = max(0, since_seq)
        with self._lock:
            if since_seq >= len(self._telemetry):
                return []
            end = len(self._telemetry) if limit is None else since_seq + max(1, limit)
            return self._telemetry[since_seq:end]

    @property
    def telemetry_length(self) -> int:
        with self._lock:
            return len(self._telemetry)

    # -- goals and policy ----------------------------------------------

    def put_goals(self, goals) -> None:
        goals = tuple(goals)
        validate_goals(goals)
        with self._lock:
            self._goals = goals

    def get_goals(self) -> tuple[SustainabilityGoal, ...]:
        with self._lock:
            return self._goals

    def put_policy(self, policy: AdaptationPolicy) -> None:
        with self._lock:
            self._policy = policy

    def get_policy(self) -> AdaptationPolicy | None:
        with self._lock:
            return self._policy

    # -- incoming data buffer -------------------------------------------

    def append_sample(self, sample: WindowSample) -> None:
        with self._lock:
            self._samples.append(sample)

    def read_last_samples(self, n: int, exclude_newest: int = 0):
        with self._lock:
            end = len(self._samples) - exclude_newest
            return self._samples[max(0, end - n) : end]

    # -- versioned model repository ---------------------------------

    def store_version(self, v: ModelVersion) -> int:
        load_predictor(v)  # rejects unknown model ids and malformed blobs
        with self._lock:
            vid = self._versions[-1].version_id + 1 if self._versions else 1
            self._versions.append(replace(v, version_id=vid))
            return vid

    def get_version(self, version_id: int) -> ModelVersion:
        with self._lock:
            for v in self._versions:
                if v.version_id == version_id:
                    return v
        raise KeyError(f"no version {version_id}")

    def latest_version_of(self, model_id: str) -> ModelVersion | None:
        with self._lock:
            for v in reversed(self._versions):
                if v.model_id == model_id:
                    return v
        return None

    def find_similar_version(
        self, sig: DataSignature, model_id: str, max_distance: float
    ) -> ModelVersion | None:
        """Closest stored version of the model within max_distance.

        Ties on distance break toward the most recent version.
        """
        with self._lock:
            best = None
            best_d = None
            for v in self._versions:  # ascending version_id
                if v.model_id != model_id:
                    continue
                d = signature_distance(sig, v.signature)
                if d <= max_distance and (best_d is None or d <= best_d):
                    best, best_d = v, d
            return best

    def all_versions(self):
        with self._lock:
            return list(self._versions)

    # -- adaptation log --------------------------------------------------

    def append_event(self, event: AdaptationEvent) -> None:
        with self._lock:
            self._events.append(event)

    def read_events(self, since_seq: int = 0):
        with self._lock:
            return [e for e in self._events if e.seq >= since_seq]

    # -- CSV export --------------------------------------------------------

    def export_csv(self, kind: str) -> bytes:
        if kind == "telemetry":
            with self._lock:
                rows = list(self._telemetry)
            lines = [TELEMETRY_COLUMNS]
            for r in rows:
                lines.append(
                    ",".join(
                        (
                            str(r.seq),
                            r.timestamp,
                            r.model_id,
                            _cell(r.prediction),
                            _cell(r.actual),
                            _cell(r.abs_error),
                            _cell(r.latency_ms),
                            _cell(r.energy_j),
                            _cell(r.cumulative_energy_j),
                        )
                    )
                )
        elif kind == "adaptations":
            with self._lock:
                rows = list(self._events)
            lines = [ADAPTATION_COLUMNS]
            for e in rows:
                lines.append(
                    ",".join(
                        (
                            str(e.seq),
                            e.timestamp,
                            e.goal,
                            _cell(e.metric_value),
                            _cell(e.threshold),
                            e.tactic,
                            e.model_before,
                            e.model_after,
                            _cell(e.version_used),
                            e.outcome,
                        )
                    )
                )
        else:
            raise ValidationError(f"unknown export kind {kind!r}", field="kind")
        return ("\n".join(lines) + "\n").encode("utf-8")
