"""Global PAC search: elimination over many randomly translated flats.

Samples uniformly translated copies of one coordinate-aligned flat, runs
the single-flat engine on each with an evenly split noise budget, then
keeps every flat owning a terminal center whose estimate comes within the
selection band of the best estimate seen anywhere. The union of the kept
flats' survivor sets is the certified output region.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .engine import EngineConfig, FlatResult, run_flat
from .errors import CertificateAnomalyError
from .noise import STREAM_FLAT_SAMPLING, substream
from .torus import FlatSpec


@dataclass(frozen=True)
class GlobalConfig:
    """Inputs of a multi-flat run."""

    p: int
    axes: tuple
    fiber_constant: float
    delta_int: float
    delta_noise: float
    engine: EngineConfig
    master_seed: int = 0

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        if len(set(axes)) != len(axes) or any(a < 0 or a >= self.p for a in axes):
            raise ValueError("flat axes must be distinct indices inside the torus")
        if self.fiber_constant < 1.0:
            raise ValueError("fiber-regularity constant must be >= 1")
        if not (0.0 < self.delta_int < 1.0) or not (0.0 < self.delta_noise < 1.0):
            raise ValueError("failure budgets must lie in (0, 1)")
        if self.delta_int + self.delta_noise > 1.0:
            raise ValueError("delta_int + delta_noise must not exceed 1")
        object.__setattr__(self, "axes", axes)

    @property
    def delta(self) -> float:
        return self.delta_int + self.delta_noise


def num_flats(fiber_constant: float, delta_int: float) -> int:
    """Flat count ceil(A * ln(1/delta_int)), clamped to at least one."""
    if fiber_constant < 1.0:
        raise ValueError("fiber-regularity constant must be >= 1")
    if not (0.0 < delta_int <= 1.0):
        raise ValueError("intersection budget must lie in (0, 1]")
    return max(1, math.ceil(fiber_constant * math.log(1.0 / delta_int)))


def sample_flats(cfg: GlobalConfig) -> List[FlatSpec]:
    """Independent uniform translations of the configured flat axes."""
    count = num_flats(cfg.fiber_constant, cfg.delta_int)
    flats = []
    for j in range(count):
        rng = substream(cfg.master_seed, STREAM_FLAT_SAMPLING, j)
        base = rng.uniform(0.0, 2.0 * math.pi, size=cfg.p)
        flats.append(FlatSpec(axes=cfg.axes, base=base))
    return flats


def selection_band(lipschitz: float, r_final: float, rad_final: float) -> float:
    """Width L * r_T + 2 R_T of the near-minimal selection band."""
    if lipschitz < 0 or r_final < 0 or rad_final < 0:
        raise ValueError("band inputs must be nonnegative")
    return lipschitz * r_final + 2.0 * rad_final


def select_flats(results: List[FlatResult], band: float) -> Tuple[tuple, float]:
    """Flats holding a terminal center within the band of the global best.

    Minima are taken over every terminal-net center (kept or not), so the
    flat achieving the global best estimate is always selected.
    """
    if not results:
        raise ValueError("no flat results to select from")
    minima = np.array([res.min_estimate for res in results])
    best = float(np.min(minima))
    kept = tuple(int(j) for j in np.nonzero(minima <= best + band)[0])
    return kept, best


@dataclass(frozen=True)
class GlobalResult:
    """Outcome of a multi-flat run."""

    flats: List[FlatSpec]
    results: List[Optional[FlatResult]]
    anomalies: List[Tuple[int, str]]
    kept_flats: tuple
    c_hat_min: float
    band: float
    epsilon: float
    r_final: float
    rad_shared: float
    total_queries: int
    certified: bool
    max_excess_at_centers: Optional[float] = None
    min_dist_to_min_set: Optional[float] = None

    def survivor_points(self) -> np.ndarray:
        """Embedded terminal kept centers of every selected flat."""
        points = []
        for j in self.kept_flats:
            res = self.results[j]
            points.append(res.flat.embed(res.survivors.centers))
        return np.concatenate(points, axis=0)


def _run_one(args):
    flat_id, flat, oracle, cfg = args
    try:
        return flat_id, run_flat(flat, oracle, cfg, flat_id=flat_id), None
    except CertificateAnomalyError as exc:
        return flat_id, None, str(exc)


def run_global(
    cfg: GlobalConfig,
    oracle,
    workers: int = 1,
    landscape=None,
) -> GlobalResult:
    """Sample flats, run the engine on each, and select the output region.

    Flats aborted by a certificate anomaly are excluded and flagged, and
    the run is marked non-certified. When ``landscape`` exposes ground
    truth (cost / min_value / distance_to_min_set), the realized excess
    and distance of the output centers are reported.
    """
    flats = sample_flats(cfg)
    count = len(flats)
    per_flat = replace(cfg.engine, delta_noise=cfg.delta_noise / count)
    jobs = [(j, flats[j], oracle, per_flat) for j in range(count)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, jobs))
    else:
        outcomes = [_run_one(job) for job in jobs]
    outcomes.sort(key=lambda item: item[0])

    results: List[Optional[FlatResult]] = [None] * count
    anomalies: List[Tuple[int, str]] = []
    for flat_id, result, message in outcomes:
        if message is None:
            results[flat_id] = result
        else:
            anomalies.append((flat_id, message))
    included = [res for res in results if res is not None]
    if not included:
        raise CertificateAnomalyError("every flat aborted with a certificate anomaly")

    r_final = included[0].r_final
    rad_shared = max(res.terminal_rad for res in included)
    band = selection_band(cfg.engine.lipschitz, r_final, rad_shared)
    kept_compact, best = select_flats(included, band)
    # map positions among included results back to flat ids
    included_ids = [j for j, res in enumerate(results) if res is not None]
    kept = tuple(included_ids[k] for k in kept_compact)

    epsilon = 5.0 * cfg.engine.lipschitz * r_final + 8.0 * rad_shared
    total_queries = sum(res.total_queries for res in included)
    out = GlobalResult(
        flats=flats,
        results=results,
        anomalies=anomalies,
        kept_flats=kept,
        c_hat_min=best,
        band=band,
        epsilon=epsilon,
        r_final=r_final,
        rad_shared=rad_shared,
        total_queries=total_queries,
        certified=not anomalies,
    )
    if landscape is not None:
        points = out.survivor_points()
        excess = np.asarray(landscape.cost(points)) - landscape.min_value
        dists = np.asarray(landscape.distance_to_min_set(points))
        out = replace(
            out,
            max_excess_at_centers=float(np.max(excess)),
            min_dist_to_min_set=float(np.min(dists)),
        )
    return out
