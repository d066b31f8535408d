"""Analytic periodic cost landscapes with known minima and Lipschitz constants.

Two families share one mechanism: each coordinate contributes a separable,
2pi-periodic well. Normal axes carry cosine wells with a point minimum;
arc axes carry wells that vanish on a whole arc, which widens the global
minimum set into a band/tube. Minimum sets, Lipschitz constants, distances
and flat-restricted minima are all closed-form, so these landscapes serve
as oracles for the elimination engine's guarantees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .torus import TWO_PI, FlatSpec, wrap, wrap_diff


def _arc_distance(theta, start: float, length: float) -> np.ndarray:
    """Wrapped distance from angle(s) to the closed arc [start, start+length]."""
    u = np.mod(np.asarray(theta, dtype=float) - start, TWO_PI)
    past = u - length
    back = TWO_PI - u
    return np.where(u <= length, 0.0, np.minimum(past, back))


def _check_axes(p: int, axes) -> tuple:
    axes = tuple(int(a) for a in axes)
    if len(set(axes)) != len(axes):
        raise ValueError("axes must be distinct")
    if any(a < 0 or a >= p for a in axes):
        raise ValueError(f"axes out of range for dimension {p}")
    return axes


@dataclass(frozen=True)
class DentLandscape:
    """Cosine wells on ``normal_axes``; flat in every other coordinate.

    cost(theta) = floor + sum_i curvature_i * (1 - cos(theta_i - offset_i))
    over the normal axes. The global minimum set is the subtorus where
    every normal coordinate equals its offset; there the Hessian is
    diag(curvatures) normally and zero tangentially.
    """

    p: int
    normal_axes: tuple
    offsets: np.ndarray
    curvatures: np.ndarray
    floor: float = 0.0

    def __post_init__(self):
        axes = _check_axes(self.p, self.normal_axes)
        if len(axes) < 1:
            raise ValueError("need at least one normal axis")
        offsets = wrap(np.asarray(self.offsets, dtype=float))
        curvatures = np.asarray(self.curvatures, dtype=float)
        if offsets.shape != (len(axes),) or curvatures.shape != (len(axes),):
            raise ValueError("offsets/curvatures must match the normal axes")
        if np.any(curvatures <= 0):
            raise ValueError("curvatures must be positive")
        object.__setattr__(self, "normal_axes", axes)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "curvatures", curvatures)

    @property
    def rank(self) -> int:
        return len(self.normal_axes)

    @property
    def min_value(self) -> float:
        return self.floor

    def cost(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        sel = theta[..., list(self.normal_axes)]
        wells = self.curvatures * (1.0 - np.cos(sel - self.offsets))
        return self.floor + np.sum(wells, axis=-1)

    def lipschitz(self) -> float:
        """Tight global Lipschitz constant: sqrt(sum curvature_i^2)."""
        return float(np.sqrt(np.sum(self.curvatures**2)))

    def distance_to_min_set(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        d = wrap_diff(theta[..., list(self.normal_axes)], self.offsets)
        return np.sqrt(np.sum(d * d, axis=-1))

    def minimizer(self) -> np.ndarray:
        """The canonical global minimizer (free coordinates at zero)."""
        theta = np.zeros(self.p)
        theta[list(self.normal_axes)] = self.offsets
        return theta

    def flat_min_local(self, flat: FlatSpec) -> np.ndarray:
        """Local coordinates of a minimizer of cost restricted to the flat."""
        local = np.zeros(flat.dim)
        for j, axis in enumerate(flat.axes):
            if axis in self.normal_axes:
                k = self.normal_axes.index(axis)
                local[j] = wrap(np.array(self.offsets[k] - flat.base[axis]))
        return local

    def flat_min_value(self, flat: FlatSpec) -> float:
        return float(self.cost(flat.embed(self.flat_min_local(flat))))


@dataclass(frozen=True)
class BandDentLandscape:
    """Cosine wells plus arc wells: the minimum set is a band/tube.

    Arc axes contribute curvature * (1 - cos(d)) where d is the wrapped
    distance to the axis arc, so the cost vanishes exactly on
    {normal coords = offsets} x {arc coords inside their arcs}. Slices of
    the minimum set by coordinate-aligned flats are empty or full arcs,
    giving exactly computable hit probabilities and fiber regularity.
    """

    p: int
    normal_axes: tuple
    offsets: np.ndarray
    curvatures: np.ndarray
    arc_axes: tuple
    arc_starts: np.ndarray
    arc_lengths: np.ndarray
    arc_curvatures: np.ndarray
    floor: float = 0.0

    def __post_init__(self):
        n_axes = _check_axes(self.p, self.normal_axes)
        a_axes = _check_axes(self.p, self.arc_axes)
        if set(n_axes) & set(a_axes):
            raise ValueError("normal and arc axes must be disjoint")
        offsets = wrap(np.asarray(self.offsets, dtype=float))
        curv = np.asarray(self.curvatures, dtype=float)
        starts = wrap(np.asarray(self.arc_starts, dtype=float))
        lengths = np.asarray(self.arc_lengths, dtype=float)
        acurv = np.asarray(self.arc_curvatures, dtype=float)
        if offsets.shape != (len(n_axes),) or curv.shape != (len(n_axes),):
            raise ValueError("offsets/curvatures must match the normal axes")
        if not (starts.shape == lengths.shape == acurv.shape == (len(a_axes),)):
            raise ValueError("arc parameters must match the arc axes")
        if np.any(curv <= 0) or np.any(acurv <= 0):
            raise ValueError("curvatures must be positive")
        if np.any(lengths <= 0) or np.any(lengths > TWO_PI):
            raise ValueError("arc lengths must lie in (0, 2pi]")
        object.__setattr__(self, "normal_axes", n_axes)
        object.__setattr__(self, "arc_axes", a_axes)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "curvatures", curv)
        object.__setattr__(self, "arc_starts", starts)
        object.__setattr__(self, "arc_lengths", lengths)
        object.__setattr__(self, "arc_curvatures", acurv)

    @property
    def min_value(self) -> float:
        return self.floor

    def _arc_dists(self, theta: np.ndarray) -> np.ndarray:
        cols = [
            _arc_distance(theta[..., axis], self.arc_starts[q], self.arc_lengths[q])
            for q, axis in enumerate(self.arc_axes)
        ]
        return np.stack(cols, axis=-1)

    def cost(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        sel = theta[..., list(self.normal_axes)]
        wells = np.sum(self.curvatures * (1.0 - np.cos(sel - self.offsets)), axis=-1)
        arcs = np.sum(self.arc_curvatures * (1.0 - np.cos(self._arc_dists(theta))), axis=-1)
        return self.floor + wells + arcs

    def lipschitz(self) -> float:
        return float(
            np.sqrt(np.sum(self.curvatures**2) + np.sum(self.arc_curvatures**2))
        )

    def distance_to_min_set(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        d_norm = wrap_diff(theta[..., list(self.normal_axes)], self.offsets)
        d_arc = self._arc_dists(theta)
        return np.sqrt(np.sum(d_norm**2, axis=-1) + np.sum(d_arc**2, axis=-1))

    def hit_probability(self, flat_axes) -> float:
        """Probability that a uniformly translated flat meets the minimum set.

        Exact when the flat axes contain every normal axis: the slice is
        nonempty iff each remaining arc coordinate of the translation lands
        in its arc.
        """
        flat_axes = set(int(a) for a in flat_axes)
        if not set(self.normal_axes) <= flat_axes:
            raise ValueError("flat axes must contain all normal axes")
        prob = 1.0
        for q, axis in enumerate(self.arc_axes):
            if axis not in flat_axes:
                prob *= self.arc_lengths[q] / TWO_PI
        return prob

    def minimizer(self) -> np.ndarray:
        theta = np.zeros(self.p)
        theta[list(self.normal_axes)] = self.offsets
        for q, axis in enumerate(self.arc_axes):
            theta[axis] = wrap(
                np.array(self.arc_starts[q] + 0.5 * self.arc_lengths[q])
            )
        return theta

    def flat_min_local(self, flat: FlatSpec) -> np.ndarray:
        local = np.zeros(flat.dim)
        for j, axis in enumerate(flat.axes):
            if axis in self.normal_axes:
                k = self.normal_axes.index(axis)
                local[j] = wrap(np.array(self.offsets[k] - flat.base[axis]))
            elif axis in self.arc_axes:
                q = self.arc_axes.index(axis)
                mid = self.arc_starts[q] + 0.5 * self.arc_lengths[q]
                local[j] = wrap(np.array(mid - flat.base[axis]))
        return local

    def flat_min_value(self, flat: FlatSpec) -> float:
        return float(self.cost(flat.embed(self.flat_min_local(flat))))


@dataclass(frozen=True)
class TubeDentSet:
    """A tube-shaped subset of T^p for slicing statistics.

    The tube lives over a base set B in the (m-1)-dimensional subtorus,
    given as a product of arcs, with piecewise-constant half-width rho(b).
    The width table partitions the first base arc into consecutive pieces
    with lengths proportional to ``piece_weights``.
    """

    p: int
    m: int
    base_starts: np.ndarray
    base_lengths: np.ndarray
    piece_weights: np.ndarray
    piece_half_widths: np.ndarray

    def __post_init__(self):
        if self.m < 2 or self.m > self.p:
            raise ValueError("need 2 <= m <= p")
        starts = wrap(np.asarray(self.base_starts, dtype=float))
        lengths = np.asarray(self.base_lengths, dtype=float)
        if starts.shape != (self.m - 1,) or lengths.shape != (self.m - 1,):
            raise ValueError("base arcs must match the base dimension m-1")
        if np.any(lengths <= 0) or np.any(lengths > TWO_PI):
            raise ValueError("base arc lengths must lie in (0, 2pi]")
        weights = np.asarray(self.piece_weights, dtype=float)
        rhos = np.asarray(self.piece_half_widths, dtype=float)
        if weights.ndim != 1 or weights.shape != rhos.shape or weights.size == 0:
            raise ValueError("width table needs matching weights and half-widths")
        if np.any(weights <= 0) or np.any(rhos <= 0):
            raise ValueError("weights and half-widths must be positive")
        object.__setattr__(self, "base_starts", starts)
        object.__setattr__(self, "base_lengths", lengths)
        object.__setattr__(self, "piece_weights", weights / np.sum(weights))
        object.__setattr__(self, "piece_half_widths", rhos)

    @property
    def rho_min(self) -> float:
        return float(np.min(self.piece_half_widths))

    @property
    def rho_max(self) -> float:
        return float(np.max(self.piece_half_widths))

    def base_measure(self) -> float:
        return float(np.prod(self.base_lengths))

    def contains_base(self, b: np.ndarray) -> np.ndarray:
        b = np.atleast_2d(np.asarray(b, dtype=float))
        u = np.mod(b - self.base_starts, TWO_PI)
        return np.all(u <= self.base_lengths, axis=-1)

    def half_width(self, b: np.ndarray) -> np.ndarray:
        """rho(b) from the piecewise table, keyed by the first base coordinate."""
        b = np.atleast_2d(np.asarray(b, dtype=float))
        u = np.mod(b[..., 0] - self.base_starts[0], TWO_PI)
        frac = np.clip(u / self.base_lengths[0], 0.0, 1.0)
        edges = np.cumsum(self.piece_weights)
        piece = np.minimum(
            np.searchsorted(edges, frac, side="right"), len(edges) - 1
        )
        return self.piece_half_widths[piece]


def tube_slice_length(tube: TubeDentSet, b) -> np.ndarray:
    """Slice length X(b): 2 rho(b) inside the base set, else zero."""
    b = np.atleast_2d(np.asarray(b, dtype=float))
    inside = tube.contains_base(b)
    return np.where(inside, 2.0 * tube.half_width(b), 0.0)


def tube_regularity_constant(tube: TubeDentSet) -> float:
    """Fiber-regularity constant (rho_max/rho_min) * (2pi)^(m-1) / measure(B)."""
    measure = tube.base_measure()
    if measure <= 0:
        raise ValueError("base set must have positive measure")
    return tube.rho_max / tube.rho_min * TWO_PI ** (tube.m - 1) / measure


def tube_exact_mean(tube: TubeDentSet) -> float:
    """Exact E_b X(b) under the uniform base distribution."""
    q = tube.base_measure() / TWO_PI ** (tube.m - 1)
    return q * float(np.sum(tube.piece_weights * 2.0 * tube.piece_half_widths))


def tube_exact_second_moment(tube: TubeDentSet) -> float:
    q = tube.base_measure() / TWO_PI ** (tube.m - 1)
    return q * float(np.sum(tube.piece_weights * (2.0 * tube.piece_half_widths) ** 2))


def tube_sup_slice(tube: TubeDentSet) -> float:
    return 2.0 * tube.rho_max
