"""Temperature annealing tests.

The fitted-temperature fixture is checked against an independent brentq
root of the mean-max-probability equation.
"""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from influx.calibration import (
    CalibrationError,
    LogitRecord,
    Temperature,
    T_MAX,
    T_MIN,
    accuracy,
    apply_temperature,
    fit_temperature,
    load_logits,
    mean_max_probability,
    predicted_class,
)
from influx.dataset import ValidationError


def records_from(pairs):
    return [LogitRecord(f"r{i}", logits, label) for i, (logits, label) in enumerate(pairs)]


THREE_RECORDS = records_from([([2.0, 0.0], 0), ([1.0, 0.0], 1), ([3.0, 0.0], 0)])


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


class TestApplyTemperature:
    def test_unit_temperature_sigmoid(self):
        d = apply_temperature(LogitRecord("a", [2.0, 0.0], 0), Temperature(1.0))
        assert d.probs[0] == pytest.approx(sigmoid(2.0), abs=1e-12)
        assert f"{d.probs[0]:.6f}" == "0.880797"

    def test_high_temperature_flattens(self):
        d = apply_temperature(LogitRecord("a", [2.0, 0.0], 0), Temperature(1e3))
        assert d.probs[0] == pytest.approx(0.5005, abs=1e-4)
        assert d.probs[1] == pytest.approx(0.4995, abs=1e-4)

    def test_tied_logits_are_uniform(self):
        for t in (1e-3, 1.0, 37.0, 1e3):
            d = apply_temperature(LogitRecord("a", [4.2, 4.2], 0), Temperature(t))
            assert d.probs.tolist() == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_overflow_safe(self):
        d = apply_temperature(LogitRecord("a", [800.0, -800.0], 0), Temperature(T_MIN))
        assert np.all(np.isfinite(d.probs))
        assert d.probs[0] == pytest.approx(1.0, abs=1e-12)

    def test_temperature_range_enforced(self):
        with pytest.raises(ValidationError):
            Temperature(0.0)
        with pytest.raises(ValidationError):
            Temperature(2e3)


class TestFitTemperature:
    def test_three_record_fixture_matches_brentq(self):
        # accuracy = 2/3; solve (s(2/t) + s(1/t) + s(3/t)) / 3 = 2/3 independently
        def gap(t):
            return (sigmoid(2 / t) + sigmoid(1 / t) + sigmoid(3 / t)) / 3 - 2 / 3

        root = brentq(gap, T_MIN, T_MAX, xtol=1e-12)
        fitted = fit_temperature(THREE_RECORDS)
        assert root == pytest.approx(2.83, abs=0.01)
        assert fitted.t == pytest.approx(root, abs=0.01)
        post = mean_max_probability(THREE_RECORDS, fitted.t)
        assert abs(post - accuracy(THREE_RECORDS)) <= 1e-6

    def test_already_calibrated_returns_one(self):
        # logit(0.75) on every record, 3 of 4 correct: mean max prob at
        # t = 1 equals accuracy, and ln t = 0 is the first bisection midpoint.
        l = math.log(3.0)
        recs = records_from(
            [([l, 0.0], 0), ([l, 0.0], 0), ([l, 0.0], 0), ([l, 0.0], 1)]
        )
        assert mean_max_probability(recs, 1.0) == pytest.approx(0.75, abs=1e-12)
        assert fit_temperature(recs).t == 1.0

    def test_fit_is_deterministic(self):
        assert fit_temperature(THREE_RECORDS).t == fit_temperature(THREE_RECORDS).t

    def test_tied_logits_unattainable(self):
        recs = records_from([([1.0, 1.0], 0)] * 4 + [([1.0, 1.0], 1)])
        # accuracy 0.8, mean max prob pinned at 0.5
        with pytest.raises(CalibrationError, match="calibration target unattainable"):
            fit_temperature(recs)

    def test_below_chance_unattainable(self):
        recs = records_from([([3.0, 0.0], 1), ([2.5, 0.0], 1)])  # accuracy 0
        with pytest.raises(CalibrationError, match="unattainable"):
            fit_temperature(recs)

    def test_reports_attainable_range(self):
        recs = records_from([([1.0, 1.0], 0)] * 4 + [([1.0, 1.0], 1)])
        with pytest.raises(CalibrationError, match=r"range \[0.5, 0.5\]"):
            fit_temperature(recs)


class TestInvariances:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_argmax_and_accuracy_invariant(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 6))
        recs = [
            LogitRecord(f"r{i}", rng.normal(0, 3, size=k).tolist(), int(rng.integers(0, k)))
            for i in range(int(rng.integers(1, 12)))
        ]
        base_acc = accuracy(recs)
        for t in np.geomspace(T_MIN, T_MAX, 7):
            scaled = [
                LogitRecord(r.id, apply_temperature(r, Temperature(float(t))).probs, r.label)
                for r in recs
            ]
            for r, s in zip(recs, scaled):
                assert predicted_class(r.logits) == predicted_class(s.logits)
            assert accuracy(scaled) == base_acc

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_mean_max_prob_monotone(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 5))
        recs = [
            LogitRecord(f"r{i}", rng.normal(0, 2, size=k).tolist(), 0)
            for i in range(int(rng.integers(1, 8)))
        ]
        grid = np.geomspace(T_MIN, T_MAX, 20)
        values = [mean_max_probability(recs, float(t)) for t in grid]
        for a, b in zip(values, values[1:]):
            assert b <= a + 1e-12


class TestLoadLogits:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "logits.jsonl"
        rows = [
            {"id": "a", "logits": [2.0, 0.0], "label": 0},
            {"id": "b", "logits": [1.0, 0.5], "label": 1},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
        recs = load_logits(path)
        assert [r.id for r in recs] == ["a", "b"]
        assert recs[0].logits.tolist() == [2.0, 0.0]

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "logits.jsonl"
        path.write_text(json.dumps({"id": "a", "logits": [1.0, 0.0], "label": 7}) + "\n")
        with pytest.raises(ValidationError, match=r"label 7 outside \[0, 2\)"):
            load_logits(path)

    def test_inconsistent_k(self, tmp_path):
        path = tmp_path / "logits.jsonl"
        rows = [
            {"id": "a", "logits": [1.0, 0.0], "label": 0},
            {"id": "b", "logits": [1.0, 0.0, 0.0], "label": 0},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        with pytest.raises(ValidationError, match="inconsistent number of classes"):
            load_logits(path)
