"""Canonical serialization: float policy, atomicity, stability."""

import json
import math

import numpy as np

from spikekit import report


def test_float_17_digits_round_trip():
    values = [1 / 3, math.pi**3, 1e-300, -2.5e17, 0.1 + 0.2]
    text = report.dumps({"values": values})
    parsed = json.loads(text)
    assert parsed["values"] == values  # 17 significant digits round-trip


def test_numpy_types_and_nesting():
    payload = {
        "arr": np.arange(3, dtype=np.int64),
        "mat": np.eye(2) * 0.5,
        "flag": np.bool_(True),
        "scalar": np.float64(1.25),
        "none": None,
        "text": "alpha \"quoted\"",
        "empty_list": [],
        "empty_dict": {},
    }
    parsed = json.loads(report.dumps(payload))
    assert parsed["arr"] == [0, 1, 2]
    assert parsed["mat"] == [[0.5, 0.0], [0.0, 0.5]]
    assert parsed["flag"] is True
    assert parsed["scalar"] == 1.25
    assert parsed["none"] is None
    assert parsed["empty_list"] == [] and parsed["empty_dict"] == {}


def test_non_finite_encoding():
    parsed = json.loads(report.dumps({"a": float("nan"), "b": float("inf")}))
    assert parsed["a"] == "nan" and parsed["b"] == "inf"


def test_identical_payload_identical_bytes():
    payload = {"x": [0.1, 0.2, {"y": 3}]}
    assert report.dumps(payload) == report.dumps(payload)


def test_write_json_and_csv(tmp_path):
    path = tmp_path / "records.json"
    report.write_json(path, {"a": 1.0})
    assert json.loads(path.read_text())["a"] == 1.0
    assert not (tmp_path / "records.json.tmp").exists()

    csv_path = tmp_path / "summary.csv"
    report.write_csv(csv_path, ["name", "value"], [["row", 1 / 3]])
    text = csv_path.read_text()
    assert "0.33333333333333331" in text
