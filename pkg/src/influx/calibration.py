"""Single-parameter temperature annealing of classifier logits.

All logits are divided by one scalar temperature before the softmax, so
rankings are untouched: predictions and accuracy are exactly what they
were. The temperature is chosen so that the mean maximum probability
matches accuracy, which is what a calibrated system exhibits. Mean max
probability is non-increasing in the temperature, so the fit is a
bisection on ln(t).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from influx.dataset import Distribution, ValidationError

T_MIN = 1e-3
T_MAX = 1e3

_GAP_TOLERANCE = 1e-6
_MAX_ITERATIONS = 200


class CalibrationError(ValueError):
    """The calibration target cannot be met within the temperature range."""


@dataclass(frozen=True)
class Temperature:
    """Positive scalar divisor applied to logits; clamped to [1e-3, 1e3]."""

    t: float

    def __post_init__(self) -> None:
        if not (T_MIN <= self.t <= T_MAX):
            raise ValidationError(f"temperature {self.t:.6g} outside [{T_MIN:g}, {T_MAX:g}]")


@dataclass(frozen=True, eq=False)
class LogitRecord:
    id: str
    logits: np.ndarray
    label: int

    def __post_init__(self) -> None:
        try:
            arr = np.array(self.logits, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"record '{self.id}': non-numeric logit: {exc}") from exc
        arr.setflags(write=False)
        object.__setattr__(self, "logits", arr)
        if arr.ndim != 1 or arr.size < 2:
            raise ValidationError(f"record '{self.id}': needs at least 2 logits")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"record '{self.id}': non-finite logit")
        if not 0 <= self.label < arr.size:
            raise ValidationError(
                f"record '{self.id}': label {self.label} outside [0, {arr.size})"
            )


def load_logits(path: str | Path) -> list[LogitRecord]:
    """Read logit records from JSONL: one {"id", "logits", "label"} per line."""
    records: list[LogitRecord] = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"line {lineno}: malformed JSON: {exc.msg}") from exc
            if (
                not isinstance(obj, dict)
                or not isinstance(obj.get("id"), str)
                or not isinstance(obj.get("logits"), list)
                or not isinstance(obj.get("label"), int)
            ):
                raise ValidationError(
                    f"line {lineno}: logit records need 'id', 'logits' and an integer 'label'"
                )
            try:
                records.append(LogitRecord(obj["id"], obj["logits"], obj["label"]))
            except ValidationError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from exc
    if not records:
        raise ValidationError(f"{path}: no logit records")
    k = records[0].logits.size
    for r in records:
        if r.logits.size != k:
            raise ValidationError(
                f"record '{r.id}': inconsistent number of classes ({r.logits.size} vs {k})"
            )
    return records


def scaled_softmax(logits: np.ndarray, t: float) -> np.ndarray:
    """Softmax of logits / t, shifted by the max logit for overflow safety."""
    z = (logits - logits.max()) / t
    e = np.exp(z)
    return e / e.sum()


def apply_temperature(record: LogitRecord, temperature: Temperature) -> Distribution:
    return Distribution(scaled_softmax(record.logits, temperature.t))


def predicted_class(logits: np.ndarray) -> int:
    # ties resolve to the lowest class index
    return int(np.argmax(logits))


def accuracy(records: Sequence[LogitRecord]) -> float:
    if not records:
        raise ValidationError("no logit records")
    hits = sum(1 for r in records if predicted_class(r.logits) == r.label)
    return hits / len(records)


def mean_max_probability(records: Sequence[LogitRecord], t: float) -> float:
    return math.fsum(
        float(scaled_softmax(r.logits, t).max()) for r in records
    ) / len(records)


def fit_temperature(records: Sequence[LogitRecord]) -> Temperature:
    """Find t with mean max probability equal to accuracy, to within 1e-6.

    Raises :class:`CalibrationError` when no temperature in
    [T_MIN, T_MAX] can reach the accuracy (e.g. accuracy at or below
    chance, or all logits tied so the mean max probability is pinned).
    """
    acc = accuracy(records)
    highest = mean_max_probability(records, T_MIN)
    lowest = mean_max_probability(records, T_MAX)
    if acc > highest + _GAP_TOLERANCE or acc < lowest - _GAP_TOLERANCE:
        raise CalibrationError(
            f"calibration target unattainable: accuracy {acc:.6g} outside attainable "
            f"mean max probability range [{lowest:.6g}, {highest:.6g}]"
        )
    lo, hi = math.log(T_MIN), math.log(T_MAX)  # objective decreasing on [lo, hi]
    for _ in range(_MAX_ITERATIONS):
        mid = 0.5 * (lo + hi)
        m = mean_max_probability(records, math.exp(mid))
        if abs(m - acc) <= _GAP_TOLERANCE:
            return Temperature(math.exp(mid))
        if m > acc:
            lo = mid
        else:
            hi = mid
    raise CalibrationError("calibration did not converge within the iteration budget")
