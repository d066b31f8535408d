"""Executors for every run mode; shared by the HTTP service and the CLI.

Each executor returns a deterministic report dict plus named artifact
payloads (CSV/JSON text). Nothing here touches the filesystem or the
clock; callers own persistence and timing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .config import AuditModeConfig, RunConfig
from .engine import (
    EngineConfig,
    epsilon_bound,
    query_bound,
    run_flat,
    verify_nested,
)
from .errors import CertificateAnomalyError
from .landscapes import DentLandscape
from .multiflat import GlobalConfig, run_global
from .noise import STREAM_MISC, ExactOracle, NoiseSpec, make_oracle, substream
from .quantum import (
    DENSE_QUBIT_LIMIT,
    QuantumShotOracle,
    cost as quantum_cost,
    directional_derivative,
    directional_second_derivative,
    effective_rank,
    fd_gradient_norms,
    lambda_bound,
    lipschitz_bound,
)
from .reporting import (
    bench_csv,
    flats_csv,
    rank_table_csv,
    rounds_csv,
    stats_csv,
    survivors_csv,
)
from .slicing import (
    fiber_regularity_check,
    second_moment_check,
    slice_moments,
    translation_average_check,
)
from .torus import TWO_PI, FlatSpec


@dataclass
class RunOutcome:
    report: dict
    artifacts: Dict[str, str] = field(default_factory=dict)
    exit_code: int = 0


def _flat_summary(result) -> dict:
    return {
        "r_final": result.r_final,
        "rad_final": result.terminal_rad,
        "epsilon": result.epsilon,
        "min_estimate": result.min_estimate,
        "survivor_count": len(result.survivors),
        "total_queries": result.total_queries,
        "rounds": [
            {
                "t": rec.t,
                "r_t": rec.radius,
                "N_t": rec.n_centers,
                "ucb_star": rec.ucb_star,
                "kept": rec.kept_count,
                "queries_cum": rec.queries_cum,
                "rad": rec.rad,
                "n_shots": rec.n_shots,
            }
            for rec in result.rounds
        ],
    }


def _build_oracle(config: RunConfig):
    """Landscape/circuit, oracle, and the default Lipschitz bound."""
    oracle_cfg = config.oracle
    noise = config.engine.noise
    if oracle_cfg.kind == "synthetic":
        landscape = oracle_cfg.landscape.build()
        oracle = make_oracle(landscape.cost, noise.to_spec(config.seed))
        return landscape, oracle, landscape.lipschitz(), landscape.p
    ansatz = oracle_cfg.build_ansatz()
    ham = oracle_cfg.build_hamiltonian()
    bound = lipschitz_bound(ansatz, ham)
    if noise.kind == "exact":
        oracle = make_oracle(
            lambda thetas: quantum_cost(ansatz, ham, thetas), noise.to_spec(config.seed)
        )
    else:
        oracle = QuantumShotOracle(ansatz, ham, noise.to_spec(config.seed))
    return None, oracle, bound, ansatz.n_params


def _run_flat_mode(config: RunConfig, workers: int) -> RunOutcome:
    landscape, oracle, default_lip, p = _build_oracle(config)
    lipschitz = config.engine.lipschitz or default_lip
    base = config.flat.base if config.flat.base is not None else [0.0] * p
    flat = FlatSpec(axes=tuple(config.flat.axes), base=np.array(base, dtype=float))
    engine_cfg = config.engine.to_engine_config(lipschitz, config.seed)
    try:
        result = run_flat(flat, oracle, engine_cfg)
    except CertificateAnomalyError as exc:
        report = {
            "status": "certificate-anomaly",
            "mode": config.mode,
            "config": _echo(config),
            "results": {
                "message": str(exc),
                "flat_id": exc.flat_id,
                "round": exc.round_index,
            },
            "versions": _versions(),
            "totals": {"queries": 0},
        }
        return RunOutcome(report=report, artifacts={}, exit_code=3)
    verify_nested(result)
    summary = _flat_summary(result)
    summary["flat"] = {"axes": list(flat.axes), "base": list(flat.base)}
    summary["lipschitz"] = lipschitz
    if landscape is not None:
        centers = result.flat.embed(result.survivors.centers)
        summary["flat_min_value"] = landscape.flat_min_value(flat)
        summary["max_excess_at_centers"] = float(
            np.max(landscape.cost(centers)) - landscape.flat_min_value(flat)
        )
        local_star = landscape.flat_min_local(flat)
        summary["minimizer_in_region"] = bool(
            result.region_contains(local_star[None, :])[0]
        )
    report = {
        "status": "ok",
        "mode": config.mode,
        "config": _echo(config),
        "results": summary,
        "versions": _versions(),
        "totals": {"queries": result.total_queries},
    }
    artifacts = {
        "rounds.csv": rounds_csv(result),
        "survivors.csv": survivors_csv([result]),
    }
    return RunOutcome(report=report, artifacts=artifacts)


def _run_global_mode(config: RunConfig, workers: int) -> RunOutcome:
    landscape, oracle, default_lip, p = _build_oracle(config)
    lipschitz = config.engine.lipschitz or default_lip
    engine_cfg = config.engine.to_engine_config(lipschitz, config.seed)
    gcfg = GlobalConfig(
        p=p,
        axes=tuple(config.global_.axes),
        fiber_constant=config.global_.fiber_constant,
        delta_int=config.global_.delta_int,
        delta_noise=config.engine.delta_noise,
        engine=engine_cfg,
        master_seed=config.seed,
    )
    result = run_global(gcfg, oracle, workers=workers, landscape=landscape)
    for res in result.results:
        if res is not None:
            verify_nested(res)
    summary = {
        "n_flats": len(result.flats),
        "kept_flats": list(result.kept_flats),
        "c_hat_min": result.c_hat_min,
        "band": result.band,
        "epsilon": result.epsilon,
        "r_final": result.r_final,
        "rad_shared": result.rad_shared,
        "certified": result.certified,
        "anomalies": [
            {"flat_id": fid, "message": msg} for fid, msg in result.anomalies
        ],
        "delta": gcfg.delta,
        "per_flat_noise_budget": gcfg.delta_noise / len(result.flats),
        "lipschitz": lipschitz,
    }
    if landscape is not None:
        summary["max_excess_at_centers"] = result.max_excess_at_centers
        summary["min_dist_to_min_set"] = result.min_dist_to_min_set
    report = {
        "status": "ok" if result.certified else "certificate-anomaly",
        "mode": config.mode,
        "config": _echo(config),
        "results": summary,
        "versions": _versions(),
        "totals": {"queries": result.total_queries},
    }
    artifacts = {"flats.csv": flats_csv(result)}
    included = [res for res in result.results if res is not None]
    for res in included:
        artifacts[f"flat_{res.flat_id:03d}_rounds.csv"] = rounds_csv(res)
    artifacts["survivors.csv"] = survivors_csv(
        [result.results[j] for j in result.kept_flats]
    )
    return RunOutcome(
        report=report, artifacts=artifacts, exit_code=0 if result.certified else 3
    )


def _run_slice_mode(config: RunConfig, workers: int) -> RunOutcome:
    rows = []
    details = []
    for idx, model_cfg in enumerate(config.slice_stats.models):
        model = model_cfg.build()
        stats = slice_moments(
            model, config.slice_stats.n_samples, seed=config.seed + idx
        )
        a_realized, a_bound = fiber_regularity_check(model)
        m2_exact, m2_bound = second_moment_check(model)
        entry = {
            "model": model_cfg.model_id,
            "kind": model_cfg.kind,
            "exact_mean": model.exact_mean(),
            "exact_second_moment": m2_exact,
            "exact_hit_probability": model.hit_probability(),
            "a_realized": a_realized,
            "a_bound": a_bound,
            "second_moment_bound": m2_bound,
            "stats": {
                "mean": stats.mean,
                "se_mean": stats.se_mean,
                "second_moment": stats.second_moment,
                "se_second_moment": stats.se_second_moment,
                "pz_bound": stats.pz_bound,
                "se_pz": stats.se_pz,
                "hit_freq": stats.hit_freq,
                "se_hit": stats.se_hit,
            },
        }
        try:
            lhs, rhs = translation_average_check(model)
            entry["translation_average"] = {"lhs": lhs, "rhs": rhs}
        except NotImplementedError:
            entry["translation_average"] = None
        details.append(entry)
        rows.append(
            {
                "model": model_cfg.model_id,
                "n": stats.n_samples,
                "mean": stats.mean,
                "se_mean": stats.se_mean,
                "m2": stats.second_moment,
                "se_m2": stats.se_second_moment,
                "pz": stats.pz_bound,
                "hit_freq": stats.hit_freq,
            }
        )
    report = {
        "status": "ok",
        "mode": config.mode,
        "config": _echo(config),
        "results": {"models": details},
        "versions": _versions(),
        "totals": {"queries": 0},
    }
    return RunOutcome(report=report, artifacts={"stats.csv": stats_csv(rows)})


def _run_audit_mode(config: RunConfig, workers: int) -> RunOutcome:
    audit = config.audit if config.audit is not None else AuditModeConfig()
    ansatz = config.oracle.build_ansatz()
    ham = config.oracle.build_hamiltonian()
    p = ansatz.n_params
    rng = substream(config.seed, STREAM_MISC)

    thetas = rng.uniform(0.0, TWO_PI, size=(audit.n_gradient_samples, p))
    grad_norms = fd_gradient_norms(ansatz, ham, thetas, step=audit.fd_step)
    bound = lipschitz_bound(ansatz, ham)

    first_res = 0.0
    second_res = 0.0
    for _ in range(audit.n_residual_samples):
        theta = rng.uniform(0.0, TWO_PI, size=p)
        v = rng.normal(size=p)
        v /= np.linalg.norm(v)
        exact1 = directional_derivative(ansatz, ham, theta, v)
        h = audit.fd_step
        fd1 = float(
            quantum_cost(ansatz, ham, theta + h * v)
            - quantum_cost(ansatz, ham, theta - h * v)
        ) / (2 * h)
        first_res = max(first_res, abs(exact1 - fd1) / max(1.0, abs(exact1)))
        exact2 = directional_second_derivative(ansatz, ham, theta, v)
        h2 = 1e-3
        samples = [
            float(quantum_cost(ansatz, ham, theta + k * h2 * v))
            for k in (-2, -1, 0, 1, 2)
        ]
        fd2 = (-samples[0] + 16 * samples[1] - 30 * samples[2] + 16 * samples[3] - samples[4]) / (
            12 * h2**2
        )
        second_res = max(second_res, abs(exact2 - fd2) / max(1.0, abs(exact2)))

    rank_rows = []
    for sample in range(audit.n_rank_samples):
        if ansatz.tying is not None:
            theta = ansatz.expand_tied(rng.uniform(0.0, TWO_PI, size=ansatz.n_classes))
        else:
            theta = rng.uniform(0.0, TWO_PI, size=p)
        rank_rows.append(
            {"sample": sample, "effective_rank": effective_rank(ansatz, theta, audit.rank_tol)}
        )

    dense_ok = ansatz.n_qubits <= DENSE_QUBIT_LIMIT
    results = {
        "n_qubits": ansatz.n_qubits,
        "n_params": p,
        "tied_classes": ansatz.n_classes,
        "lipschitz_bound": bound,
        "lambda_coefficient_sum": lambda_bound(ham, "coefficient-sum"),
        "lambda_dense": lambda_bound(ham, "dense") if dense_ok else None,
        "max_fd_gradient": float(np.max(grad_norms)),
        "first_derivative_max_rel_residual": first_res,
        "second_derivative_max_rel_residual": second_res,
        "rank_tolerance": audit.rank_tol,
        "effective_rank": [r["effective_rank"] for r in rank_rows],
    }
    report = {
        "status": "ok",
        "mode": config.mode,
        "config": _echo(config),
        "results": results,
        "versions": _versions(),
        "totals": {"queries": 0},
    }
    return RunOutcome(report=report, artifacts={"rank_table.csv": rank_table_csv(rank_rows)})


def _aligned_initial_radius(d: int, r_fin: float, shrink: float) -> Tuple[float, int]:
    """Initial radius >= pi*sqrt(d) whose shrink steps land exactly on r_fin."""
    full = math.pi * math.sqrt(d)
    if r_fin >= full:
        return r_fin, 0
    steps = int(math.ceil(math.log(full / r_fin) / math.log(shrink) - 1e-12))
    return r_fin * shrink**steps, steps


def _run_bench_mode(config: RunConfig, workers: int) -> RunOutcome:
    rows = []
    total = 0
    curvature = config.bench.curvature
    for cell in config.bench.cells:
        d = cell.d
        landscape = DentLandscape(
            p=d + 1,
            normal_axes=(d,),
            offsets=np.array([math.pi]),
            curvatures=np.array([curvature]),
        )
        lipschitz = landscape.lipschitz()
        r_fin = cell.epsilon / (3.0 * lipschitz)
        r0, _ = _aligned_initial_radius(d, r_fin, 2.0)
        engine_cfg = EngineConfig(
            r_fin=r_fin,
            lipschitz=lipschitz,
            delta_noise=0.05,
            noise=NoiseSpec(kind="exact"),
            r0=r0,
        )
        flat = FlatSpec(axes=tuple(range(d)), base=np.zeros(d + 1))
        result = run_flat(flat, ExactOracle(landscape.cost), engine_cfg)
        measured = result.total_queries
        total += measured
        rows.append(
            {
                "d": d,
                "epsilon": cell.epsilon,
                "measured_queries": measured,
                "query_bound": query_bound(d, lipschitz, cell.epsilon, config.bench.c0),
            }
        )
    slopes = {}
    for d in sorted({r["d"] for r in rows}):
        cells = [r for r in rows if r["d"] == d]
        if len(cells) >= 2:
            xs = np.log([1.0 / r["epsilon"] for r in cells])
            ys = np.log([r["measured_queries"] for r in cells])
            slopes[str(d)] = float(np.polyfit(xs, ys, 1)[0])
    report = {
        "status": "ok",
        "mode": config.mode,
        "config": _echo(config),
        "results": {
            "cells": rows,
            "fitted_slopes": slopes,
            "c0": config.bench.c0,
            "within_bound": all(
                r["measured_queries"] <= r["query_bound"] for r in rows
            ),
        },
        "versions": _versions(),
        "totals": {"queries": total},
    }
    return RunOutcome(report=report, artifacts={"bench.csv": bench_csv(rows)})


def _echo(config: RunConfig) -> dict:
    return config.model_dump(mode="json", by_alias=True, exclude={"output_dir"})


def _versions() -> dict:
    return {"alet": __version__, "numpy": np.__version__}


_EXECUTORS = {
    "flat": _run_flat_mode,
    "global": _run_global_mode,
    "slice-stats": _run_slice_mode,
    "landscape-audit": _run_audit_mode,
    "bench": _run_bench_mode,
}


def execute(config: RunConfig, workers: int = 1) -> RunOutcome:
    """Run one validated configuration and collect its report and artifacts."""
    outcome = _EXECUTORS[config.mode](config, workers)
    return outcome
