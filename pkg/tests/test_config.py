"""Schema validation tests: unknown fields, mode sections, budget checks."""
import math

import pytest
from pydantic import ValidationError

from alet.config import RunConfig


def minimal_flat_config(**overrides):
    cfg = {
        "mode": "flat",
        "seed": 0,
        "oracle": {
            "kind": "synthetic",
            "landscape": {
                "kind": "dent",
                "p": 2,
                "normal_axes": [0],
                "offsets": [0.0],
                "curvatures": [1.0],
            },
        },
        "engine": {"r_fin": 0.2, "noise": {"kind": "exact"}},
        "flat": {"axes": [0]},
    }
    cfg.update(overrides)
    return cfg


def test_minimal_flat_config_validates():
    cfg = RunConfig.model_validate(minimal_flat_config())
    assert cfg.mode == "flat"
    assert cfg.engine.delta_noise == 0.05  # default resolved
    assert cfg.engine.noise.kind == "exact"


def test_unknown_top_level_field_rejected():
    with pytest.raises(ValidationError) as err:
        RunConfig.model_validate(minimal_flat_config(extra_knob=1))
    assert "extra_knob" in str(err.value)


def test_unknown_nested_field_rejected():
    bad = minimal_flat_config()
    bad["engine"]["zeta"] = 3
    with pytest.raises(ValidationError) as err:
        RunConfig.model_validate(bad)
    assert "zeta" in str(err.value)


def test_missing_mode_section_rejected():
    bad = minimal_flat_config()
    del bad["flat"]
    with pytest.raises(ValidationError) as err:
        RunConfig.model_validate(bad)
    assert "flat" in str(err.value)


def test_unconsumed_section_rejected():
    bad = minimal_flat_config()
    bad["bench"] = {"cells": [{"d": 1, "epsilon": 0.4}]}
    with pytest.raises(ValidationError) as err:
        RunConfig.model_validate(bad)
    assert "bench" in str(err.value)


def test_budget_sum_rejected_naming_both_fields():
    bad = {
        "mode": "global",
        "oracle": minimal_flat_config()["oracle"],
        "engine": {"r_fin": 0.5, "delta_noise": 0.6, "noise": {"kind": "exact"}},
        "global": {"axes": [0], "fiber_constant": 1.0, "delta_int": 0.6},
    }
    with pytest.raises(ValidationError) as err:
        RunConfig.model_validate(bad)
    message = str(err.value)
    assert "delta_int" in message and "delta_noise" in message


def test_radius_ordering_rejected():
    bad = minimal_flat_config()
    bad["engine"]["r0"] = 0.1
    with pytest.raises(ValidationError) as err:
        RunConfig.model_validate(bad)
    assert "r_fin" in str(err.value)


def test_audit_requires_quantum_oracle():
    bad = {
        "mode": "landscape-audit",
        "oracle": minimal_flat_config()["oracle"],
    }
    with pytest.raises(ValidationError) as err:
        RunConfig.model_validate(bad)
    assert "quantum" in str(err.value)


def test_band_slice_model_rejects_piece_table():
    bad = {
        "mode": "slice-stats",
        "slice-stats": {
            "models": [
                {
                    "kind": "band",
                    "p": 3,
                    "m": 2,
                    "base_starts": [0.0],
                    "base_lengths": [1.0],
                    "piece_half_widths": [0.1],
                    "piece_weights": [1.0],
                }
            ]
        },
    }
    with pytest.raises(ValidationError):
        RunConfig.model_validate(bad)


def test_tube_slice_model_requires_piece_table():
    bad = {
        "mode": "slice-stats",
        "slice-stats": {
            "models": [
                {
                    "kind": "tube",
                    "p": 3,
                    "m": 2,
                    "base_starts": [0.0],
                    "base_lengths": [1.0],
                }
            ]
        },
    }
    with pytest.raises(ValidationError):
        RunConfig.model_validate(bad)


def test_quantum_oracle_builds_specs():
    cfg = RunConfig.model_validate(
        {
            "mode": "landscape-audit",
            "oracle": {
                "kind": "quantum",
                "n_qubits": 2,
                "generators": ["XI", "IZ"],
                "hamiltonian": [{"string": "ZZ", "coefficient": 0.5}],
                "lambda_mode": "dense",
            },
        }
    )
    ansatz = cfg.oracle.build_ansatz()
    ham = cfg.oracle.build_hamiltonian()
    assert ansatz.n_params == 2
    assert ham.lambda_bound == pytest.approx(0.5)


def test_config_echo_is_round_trippable():
    cfg = RunConfig.model_validate(minimal_flat_config())
    echo = cfg.model_dump(mode="json", by_alias=True)
    again = RunConfig.model_validate(echo)
    assert again == cfg
