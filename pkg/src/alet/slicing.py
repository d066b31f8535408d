"""Slice-length statistics for randomly translated flats.

A coordinate-aligned flat meets a band- or tube-shaped minimum set in a
one-dimensional slice whose length depends only on the translation's base
coordinates. Closed-form slice lengths make the translation-average
identity, the fiber-regularity second-moment bound, and the two-moment
hit-probability ratio exactly checkable, with Monte Carlo estimates
layered on top for consistency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .landscapes import (
    TubeDentSet,
    tube_exact_mean,
    tube_exact_second_moment,
    tube_regularity_constant,
    tube_slice_length,
    tube_sup_slice,
)
from .noise import STREAM_MISC, substream
from .torus import TWO_PI


@dataclass(frozen=True)
class SliceModel:
    """A minimum-set shape with closed-form slice lengths.

    kind "band": the set crosses the flat in a full circle (length 2pi)
    whenever the base point lies in a product of arcs. kind "tube": the
    crossing is an interval of length 2*rho(base) from a piecewise table.
    Both reduce to a :class:`TubeDentSet` for the moment formulas; the
    projection Jacobian onto the base subtorus is 1 for these
    coordinate-aligned shapes.
    """

    kind: str
    tube: TubeDentSet

    def __post_init__(self):
        if self.kind not in ("band", "tube"):
            raise ValueError(f"unknown slice model kind {self.kind!r}")
        if self.kind == "band" and not np.allclose(
            self.tube.piece_half_widths, math.pi
        ):
            raise ValueError("band models fix the slice length at 2pi")

    @property
    def base_dim(self) -> int:
        return self.tube.m - 1

    def slice_length(self, b) -> np.ndarray:
        return tube_slice_length(self.tube, b)

    def hit_probability(self) -> float:
        return self.tube.base_measure() / TWO_PI**self.base_dim

    def exact_mean(self) -> float:
        return tube_exact_mean(self.tube)

    def exact_second_moment(self) -> float:
        return tube_exact_second_moment(self.tube)

    def sup_slice(self) -> float:
        return tube_sup_slice(self.tube)


def band_model(p: int, m: int, base_starts, base_lengths) -> SliceModel:
    """Band whose slices are full circles over a product-of-arcs base."""
    tube = TubeDentSet(
        p=p,
        m=m,
        base_starts=np.asarray(base_starts, dtype=float),
        base_lengths=np.asarray(base_lengths, dtype=float),
        piece_weights=np.array([1.0]),
        piece_half_widths=np.array([math.pi]),
    )
    return SliceModel(kind="band", tube=tube)


def tube_model(tube: TubeDentSet) -> SliceModel:
    return SliceModel(kind="tube", tube=tube)


@dataclass(frozen=True)
class SliceStats:
    """Monte Carlo slice-length statistics with standard errors."""

    mean: float
    second_moment: float
    pz_bound: float
    hit_freq: float
    n_samples: int
    se_mean: float
    se_second_moment: float
    se_pz: float
    se_hit: float


def pz_hit_bound(mean: float, second_moment: float) -> float:
    """Two-moment lower bound mean^2 / E X^2 on the hit probability."""
    if second_moment <= 0.0:
        return 0.0
    return mean * mean / second_moment


def slice_moments(model: SliceModel, n_samples: int, seed: int = 0) -> SliceStats:
    """Sample base translations uniformly and accumulate slice statistics."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    rng = substream(seed, STREAM_MISC)
    b = rng.uniform(0.0, TWO_PI, size=(n_samples, model.base_dim))
    x = model.slice_length(b)
    x2 = x * x
    mean = float(np.mean(x))
    m2 = float(np.mean(x2))
    hit = x > 0.0
    hit_freq = float(np.mean(hit))
    se_mean = float(np.std(x) / math.sqrt(n_samples))
    se_m2 = float(np.std(x2) / math.sqrt(n_samples))
    se_hit = float(np.std(hit.astype(float)) / math.sqrt(n_samples))
    pz = pz_hit_bound(mean, m2)
    # delta method for g(mean, m2) = mean^2/m2 with the sample covariance
    if m2 > 0.0:
        grad = np.array([2.0 * mean / m2, -(mean * mean) / (m2 * m2)])
        cov = np.cov(np.stack([x, x2]), bias=True) / n_samples
        se_pz = float(math.sqrt(max(0.0, grad @ cov @ grad)))
    else:
        se_pz = 0.0
    return SliceStats(
        mean=mean,
        second_moment=m2,
        pz_bound=pz,
        hit_freq=hit_freq,
        n_samples=n_samples,
        se_mean=se_mean,
        se_second_moment=se_m2,
        se_pz=se_pz,
        se_hit=se_hit,
    )


def translation_average_check(model: SliceModel) -> Tuple[float, float]:
    """Both sides of the translation-average identity, computed separately.

    Left: the exact expectation of the slice length. Right: the set's
    m-volume scaled by (2pi)^-(m-1), with unit projection Jacobian.
    Supported for bands and constant-width tubes.
    """
    tube = model.tube
    if model.kind == "tube" and tube.rho_min != tube.rho_max:
        raise NotImplementedError(
            "closed-form set volume requires a constant tube width"
        )
    lhs = model.exact_mean()
    if model.kind == "band":
        set_volume = TWO_PI * tube.base_measure()
    else:
        set_volume = 2.0 * tube.rho_max * tube.base_measure()
    rhs = set_volume / TWO_PI ** (tube.m - 1)
    return lhs, rhs


def fiber_regularity_check(model: SliceModel) -> Tuple[float, float]:
    """Realized sup X / mean X against the tube regularity constant."""
    mu = model.exact_mean()
    if mu <= 0.0:
        raise ValueError("degenerate model: zero mean slice length")
    a_realized = model.sup_slice() / mu
    a_bound = tube_regularity_constant(model.tube)
    return a_realized, a_bound


def second_moment_check(model: SliceModel) -> Tuple[float, float]:
    """Exact E X^2 against the fiber-regularity bound A * (E X)^2."""
    a_realized, _ = fiber_regularity_check(model)
    return model.exact_second_moment(), a_realized * model.exact_mean() ** 2
