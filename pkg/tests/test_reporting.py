"""Tests for deterministic report/CSV rendering."""
import json
import math

import numpy as np
import pytest

from alet.reporting import fmt, render_csv, render_json


def test_fmt_seventeen_significant_digits():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(1.0) == "1"
    assert fmt(math.pi) == "3.1415926535897931"
    assert fmt(7) == "7"
    assert fmt(np.float64(0.25)) == "0.25"
    assert fmt(True) == "true"


def test_fmt_round_trips_doubles():
    rng = np.random.default_rng(0)
    for value in rng.uniform(-1e6, 1e6, size=200):
        assert float(fmt(float(value))) == value


def test_fmt_rejects_non_finite():
    with pytest.raises(ValueError):
        fmt(float("nan"))
    with pytest.raises(ValueError):
        fmt(float("inf"))


def test_render_json_is_valid_and_ordered():
    doc = {"b_first": 1, "a_second": {"x": 0.5, "y": [1, 2.5, None]}, "s": "text"}
    text = render_json(doc)
    parsed = json.loads(text)
    assert parsed["a_second"]["y"] == [1, 2.5, None]
    # insertion order preserved, not alphabetical
    assert text.index("b_first") < text.index("a_second")


def test_render_json_deterministic():
    doc = {"value": 1 / 3, "list": [math.e, math.tau]}
    assert render_json(doc) == render_json(doc)


def test_render_csv():
    text = render_csv(("a", "b"), [(1, 0.5), ("x", 2)])
    assert text == "a,b\n1,0.5\nx,2\n"
