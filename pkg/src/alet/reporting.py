"""Deterministic report and CSV rendering.

All floating-point output is printed with 17 significant digits, which
round-trips doubles exactly, so identical runs produce byte-identical
payloads. Report JSON preserves insertion order; no volatile data
(timestamps, durations) belongs here.
"""
from __future__ import annotations

import json
import math
from typing import Iterable, List, Sequence

import numpy as np


def fmt(value) -> str:
    """17-significant-digit text for floats; plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            raise ValueError("non-finite value in report output")
        return format(value, ".17g")
    raise TypeError(f"unsupported scalar {type(value)!r}")


def render_json(obj, indent: int = 0) -> str:
    """JSON text with deterministic float formatting and field order."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f"{inner}{json.dumps(str(key))}: {render_json(val, indent + 1)}"
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        rows = [f"{inner}{render_json(val, indent + 1)}" for val in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return fmt(obj)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def rounds_csv(result) -> str:
    """Per-round elimination trace for one flat."""
    return render_csv(
        ("t", "r_t", "N_t", "ucb_star", "kept", "queries_cum"),
        (
            (rec.t, rec.radius, rec.n_centers, rec.ucb_star, rec.kept_count, rec.queries_cum)
            for rec in result.rounds
        ),
    )


def survivors_csv(results: List) -> str:
    """Terminal kept centers (embedded) for one or more flat results."""
    header = None
    rows = []
    for res in results:
        p = res.flat.ambient_dim
        if header is None:
            header = (
                ["flat_id", "center_index"]
                + [f"local_{j}" for j in range(res.flat.dim)]
                + [f"theta_{i}" for i in range(p)]
                + ["estimate"]
            )
        kept_positions = np.nonzero(res.terminal_kept)[0]
        centers = res.survivors.centers
        thetas = res.flat.embed(centers)
        for row_idx, pos in enumerate(kept_positions):
            rows.append(
                [res.flat_id, int(pos)]
                + list(centers[row_idx])
                + list(thetas[row_idx])
                + [res.terminal_values[pos]]
            )
    return render_csv(header or ("flat_id", "center_index"), rows)


def flats_csv(global_result) -> str:
    """Per-flat summary of a multi-flat run."""
    rows = []
    anomalies = dict(global_result.anomalies)
    p = global_result.flats[0].ambient_dim
    for j, flat in enumerate(global_result.flats):
        res = global_result.results[j]
        rows.append(
            [j]
            + list(flat.base)
            + [
                "anomaly" if res is None else "ok",
                "" if res is None else fmt(res.min_estimate),
                "yes" if j in global_result.kept_flats else "no",
                0 if res is None else res.total_queries,
            ]
        )
    header = (
        ["flat_id"]
        + [f"base_{i}" for i in range(p)]
        + ["status", "min_estimate", "kept", "queries"]
    )
    return render_csv(header, rows)


def stats_csv(rows: List[dict]) -> str:
    """Slice statistics table: one row per model."""
    return render_csv(
        ("model", "n", "mean", "se_mean", "m2", "se_m2", "pz", "hit_freq"),
        (
            (
                r["model"],
                r["n"],
                r["mean"],
                r["se_mean"],
                r["m2"],
                r["se_m2"],
                r["pz"],
                r["hit_freq"],
            )
            for r in rows
        ),
    )


def bench_csv(rows: List[dict]) -> str:
    """Query-scaling table with log-log ready columns."""
    return render_csv(
        ("d", "epsilon", "measured_queries", "query_bound", "log_inv_epsilon", "log_queries"),
        (
            (
                r["d"],
                r["epsilon"],
                r["measured_queries"],
                r["query_bound"],
                math.log(1.0 / r["epsilon"]),
                math.log(r["measured_queries"]),
            )
            for r in rows
        ),
    )


def rank_table_csv(rows: List[dict]) -> str:
    return render_csv(
        ("sample", "effective_rank"),
        ((r["sample"], r["effective_rank"]) for r in rows),
    )
