"""Tests for the CLI thin client: exit codes, artifacts, determinism."""
import json
import math
import threading

import pytest

from alet.cli import main

DENT_ORACLE = {
    "kind": "synthetic",
    "landscape": {
        "kind": "dent",
        "p": 2,
        "normal_axes": [0],
        "offsets": [0.0],
        "curvatures": [1.0],
    },
}


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def flat_config(**engine_overrides):
    engine = {"r_fin": math.pi / 8, "r0": math.pi, "noise": {"kind": "exact"}}
    engine.update(engine_overrides)
    return {"mode": "flat", "seed": 1, "oracle": DENT_ORACLE, "engine": engine,
            "flat": {"axes": [0]}}


def test_flat_run_writes_artifacts(tmp_path):
    cfg = write_config(tmp_path, flat_config())
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out), "--workers", "1"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "ok"
    assert (out / "rounds.csv").exists()
    survivors = (out / "survivors.csv").read_text().splitlines()
    assert len(survivors) > 1  # header plus at least one survivor
    assert (out / "timing.json").exists()


def test_validation_error_exit_code(tmp_path):
    bad = flat_config()
    bad["engine"]["delta_noise"] = 0.6
    bad["mode"] = "global"
    bad["global"] = {"axes": [0], "fiber_constant": 1.0, "delta_int": 0.6}
    cfg = write_config(tmp_path, bad)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_unreadable_config_exit_code(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2


def test_anomaly_exit_code(tmp_path):
    cfg = write_config(tmp_path, flat_config(lipschitz=0.01))
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 3
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "certificate-anomaly"


def global_config(seed=4):
    return {
        "mode": "global",
        "seed": seed,
        "oracle": {
            "kind": "synthetic",
            "landscape": {
                "kind": "dent",
                "p": 3,
                "normal_axes": [0, 1],
                "offsets": [1.0, 4.0],
                "curvatures": [1.0, 0.5],
            },
        },
        "engine": {
            "r_fin": math.pi * math.sqrt(2) / 8,
            "delta_noise": 0.05,
            "noise": {"kind": "two-point", "outcome_range": 8.0, "n_shots": 200},
        },
        "global": {"axes": [0, 1], "fiber_constant": 1.0, "delta_int": 0.05},
    }


def test_reports_byte_identical_across_worker_counts(tmp_path):
    cfg = write_config(tmp_path, global_config())
    outs = []
    for label, workers in (("a", "1"), ("b", "4"), ("c", "1")):
        out = tmp_path / label
        assert main(["run", "--config", cfg, "--out", str(out), "--workers", workers]) == 0
        outs.append(out)
    ref_report = outs[0].joinpath("report.json").read_bytes()
    ref_csvs = {
        p.name: p.read_bytes() for p in outs[0].glob("*.csv")
    }
    for out in outs[1:]:
        assert out.joinpath("report.json").read_bytes() == ref_report
        for name, payload in ref_csvs.items():
            assert out.joinpath(name).read_bytes() == payload


def test_seed_override_changes_payload(tmp_path):
    cfg = write_config(tmp_path, global_config())
    out_a, out_b = tmp_path / "sa", tmp_path / "sb"
    assert main(["run", "--config", cfg, "--out", str(out_a), "--seed", "99"]) == 0
    assert main(["run", "--config", cfg, "--out", str(out_b), "--seed", "100"]) == 0
    assert (
        out_a.joinpath("report.json").read_bytes()
        != out_b.joinpath("report.json").read_bytes()
    )


def test_remote_run_matches_local(tmp_path):
    import uvicorn

    from alet.service import create_app

    config = uvicorn.Config(create_app(), host="127.0.0.1", port=8765, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        import time

        for _ in range(100):
            if server.started:
                break
            time.sleep(0.05)
        assert server.started
        cfg = write_config(tmp_path, flat_config())
        local_out = tmp_path / "local"
        remote_out = tmp_path / "remote"
        assert main(["run", "--config", cfg, "--out", str(local_out)]) == 0
        assert (
            main(
                [
                    "run",
                    "--config",
                    cfg,
                    "--out",
                    str(remote_out),
                    "--server",
                    "http://127.0.0.1:8765",
                ]
            )
            == 0
        )
        assert (
            local_out.joinpath("report.json").read_bytes()
            == remote_out.joinpath("report.json").read_bytes()
        )
        assert (
            local_out.joinpath("rounds.csv").read_bytes()
            == remote_out.joinpath("rounds.csv").read_bytes()
        )
    finally:
        server.should_exit = True
        thread.join(timeout=5)
