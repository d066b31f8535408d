"""Bounded shot noise: Hoeffding radii, confidence schedules, oracle wrappers.

Every noisy evaluation draws from its own RNG substream keyed by
(master seed, flat id, round, center index), so estimates are reproducible
under any execution order or degree of parallelism.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError

# substream domain tags, so different consumers never share a stream
STREAM_EVAL = 2
STREAM_FLAT_SAMPLING = 3
STREAM_MISC = 4


def hoeffding_radius(n_shots: int, alpha: float, outcome_range: float) -> float:
    """Confidence radius R * sqrt(ln(2/alpha) / (2 n)) for bounded outcomes."""
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    if not (0.0 < alpha <= 2.0):
        raise ValueError("confidence level must lie in (0, 2]")
    if outcome_range <= 0:
        raise ValueError("outcome range must be positive")
    return outcome_range * math.sqrt(math.log(2.0 / alpha) / (2.0 * n_shots))


def alpha_schedule(t: int, n_centers: int, delta_noise: float) -> float:
    """Per-point confidence level 6*delta/(pi^2 t^2 N_t).

    Summing N_t of these over rounds t = 1, 2, ... never exceeds the
    total noise budget delta_noise.
    """
    if t < 1 or n_centers < 1:
        raise ValueError("round index and center count must be >= 1")
    if not (0.0 < delta_noise < 1.0):
        raise ValueError("noise budget must lie in (0, 1)")
    return 6.0 * delta_noise / (math.pi**2 * t**2 * n_centers)


@dataclass(frozen=True)
class NoisyEstimate:
    """An unbiased finite-shot estimate with its confidence radius."""

    value: float
    radius: float
    level: float
    n_shots: int


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model configuration for engine runs.

    kind "two-point" draws n_shots outcomes at +-R/2 (the Hoeffding-extremal
    bounded unbiased model); kind "exact" evaluates the oracle exactly with
    zero radius. Schedule "fixed-radius" grows n_shots per round so the
    radius never exceeds rad_target; the default keeps n_shots constant.
    """

    outcome_range: float = 1.0
    n_shots: int = 1
    master_seed: int = 0
    kind: str = "two-point"
    schedule: str = "per-round"
    rad_target: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("two-point", "exact"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.schedule not in ("per-round", "fixed-radius"):
            raise ValueError(f"unknown noise schedule {self.schedule!r}")
        if self.kind == "two-point":
            if self.outcome_range <= 0:
                raise ValueError("outcome range must be positive")
            if self.n_shots < 1:
                raise ValueError("n_shots must be >= 1")
        if self.schedule == "fixed-radius" and not self.rad_target:
            raise ValueError("fixed-radius schedule needs rad_target > 0")

    def shots_for(self, alpha: float) -> int:
        """Shot count for one round at per-point level alpha."""
        if self.schedule == "per-round":
            return self.n_shots
        n = math.ceil(
            self.outcome_range**2 * math.log(2.0 / alpha) / (2.0 * self.rad_target**2)
        )
        return max(self.n_shots, n, 1)


def substream(master_seed: int, *key) -> np.random.Generator:
    """Independent generator for a (seed, key...) context."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def noisy_eval(
    cost_fn: Callable,
    theta: np.ndarray,
    spec: NoiseSpec,
    alpha: float,
    context: tuple,
) -> NoisyEstimate:
    """Two-point bounded-noise estimate of cost_fn(theta).

    Draws n_shots outcomes taking +R/2 with probability 1/2 + C/R and -R/2
    otherwise; the sample mean is an unbiased estimate of C with outcomes
    exactly in [-R/2, R/2]. Deterministic in (master_seed, context).
    """
    value = float(np.ravel(cost_fn(np.asarray(theta, dtype=float)))[0])
    half = spec.outcome_range / 2.0
    if abs(value) > half:
        raise ConfigurationError(
            f"|cost|={abs(value):.6g} exceeds R/2={half:.6g}; increase the outcome range"
        )
    n = spec.shots_for(alpha)
    rng = substream(spec.master_seed, STREAM_EVAL, *context)
    q = 0.5 + value / spec.outcome_range
    successes = rng.binomial(n, q)
    estimate = half * (2.0 * successes / n - 1.0)
    return NoisyEstimate(
        value=estimate,
        radius=hoeffding_radius(n, alpha, spec.outcome_range),
        level=alpha,
        n_shots=n,
    )


class ExactOracle:
    """Noiseless oracle: exact cost values, zero confidence radius.

    Oracles expose ``evaluate_round(thetas, alpha, flat_id, round_index)``
    returning (values, shared confidence radius, shots per evaluation).
    """

    noiseless = True

    def __init__(self, cost_fn: Callable):
        self.cost_fn = cost_fn

    def evaluate_round(self, thetas, alpha, flat_id, round_index):
        values = np.asarray(self.cost_fn(np.atleast_2d(thetas)), dtype=float)
        return values.reshape(-1), 0.0, 0


class TwoPointOracle:
    """Synthetic bounded-noise oracle around an exact cost function."""

    noiseless = False

    def __init__(self, cost_fn: Callable, spec: NoiseSpec):
        if spec.kind != "two-point":
            raise ValueError("TwoPointOracle needs a two-point noise spec")
        self.cost_fn = cost_fn
        self.spec = spec

    def evaluate_round(self, thetas, alpha, flat_id, round_index):
        thetas = np.atleast_2d(thetas)
        estimates = np.empty(thetas.shape[0])
        n_used = self.spec.shots_for(alpha)
        for idx in range(thetas.shape[0]):
            est = noisy_eval(
                self.cost_fn, thetas[idx], self.spec, alpha, (flat_id, round_index, idx)
            )
            estimates[idx] = est.value
        radius = hoeffding_radius(n_used, alpha, self.spec.outcome_range)
        return estimates, radius, n_used


def make_oracle(cost_fn: Callable, spec: NoiseSpec):
    """Build the oracle matching a noise spec."""
    if spec.kind == "exact":
        return ExactOracle(cost_fn)
    return TwoPointOracle(cost_fn, spec)
