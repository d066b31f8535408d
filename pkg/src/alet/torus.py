"""Geometry of the flat torus T^d = (R/2piZ)^d.

Angles live in the fundamental domain [0, 2pi). Distances are geodesic
(per-coordinate wrap, then Euclidean). Covering nets are uniform
axis-aligned lattices stored by integer index, so survivor sets remain
exactly representable across refinement rounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Tolerance for classifying points on ball/lattice boundaries.
BOUNDARY_TOL = 1e-12


def wrap(raw) -> np.ndarray:
    """Reduce angles into [0, 2pi) by floor division."""
    arr = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("angles must be finite")
    out = np.mod(arr, TWO_PI)
    # np.mod can round x mod 2pi up to exactly 2pi for tiny negative x
    if out.ndim == 0:
        return np.array(0.0) if out >= TWO_PI else out
    out[out >= TWO_PI] = 0.0
    return out


def wrap_diff(a, b) -> np.ndarray:
    """Per-coordinate wrapped distance |a - b| mod 2pi, in [0, pi]."""
    d = np.abs(np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI))
    return np.minimum(d, TWO_PI - d)


def geodesic_dist(x, y) -> float:
    """Geodesic distance on T^p: min over integer shifts of the l2 norm."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.linalg.norm(wrap_diff(x, y)))


def pairwise_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geodesic distances between rows of a (N,d) and rows of b (M,d)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    diff = wrap_diff(a[:, None, :], b[None, :, :])
    return np.sqrt(np.sum(diff * diff, axis=-1))


@dataclass(frozen=True)
class FlatSpec:
    """A coordinate-aligned geodesic flat: axis index set plus a base translation.

    The flat is the set of torus points that agree with ``base`` on every
    coordinate outside ``axes``. Axis indices are 0-based.
    """

    axes: tuple
    base: np.ndarray

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        base = wrap(self.base)
        p = base.shape[0]
        if len(axes) < 1:
            raise ValueError("a flat needs at least one axis")
        if len(set(axes)) != len(axes):
            raise ValueError("flat axes must be distinct")
        if any(a < 0 or a >= p for a in axes):
            raise ValueError(f"flat axes out of range for dimension {p}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "base", base)

    @property
    def ambient_dim(self) -> int:
        return self.base.shape[0]

    @property
    def dim(self) -> int:
        return len(self.axes)

    def embed(self, local) -> np.ndarray:
        """Map local flat coordinates to the ambient torus point."""
        local = np.asarray(local, dtype=float)
        if local.shape[-1] != self.dim:
            raise ValueError("local coordinate dimension does not match flat")
        if local.ndim == 1:
            theta = self.base.copy()
            theta[list(self.axes)] = wrap(self.base[list(self.axes)] + local)
            return theta
        theta = np.broadcast_to(self.base, local.shape[:-1] + (self.ambient_dim,)).copy()
        theta[..., list(self.axes)] = wrap(self.base[list(self.axes)] + local)
        return theta


@dataclass(frozen=True)
class FlatPoint:
    """A point of a flat, held in the flat's local chart."""

    flat: FlatSpec
    local: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "local", wrap(self.local))
        if self.local.shape != (self.flat.dim,):
            raise ValueError("local coordinates must match the flat dimension")


def embed(point: FlatPoint) -> np.ndarray:
    """Embed a FlatPoint into T^p. Isometric on each flat."""
    return point.flat.embed(point.local)


def _per_axis_count(d: int, radius: float) -> int:
    # count per axis = ceil(2pi / s) with spacing s = 2*rho/sqrt(d);
    # the 1e-12 backoff absorbs float noise when the ratio is integral
    return max(1, math.ceil(TWO_PI * math.sqrt(d) / (2.0 * radius) - 1e-12))


@dataclass(frozen=True)
class CoveringNet:
    """A rho-cover of a region of T^d by points of a uniform lattice.

    The lattice has ``n_per_axis`` points per axis at spacing 2pi/n, and
    ``indices`` (N, d) selects the retained lattice points. Index storage
    keeps membership exact across refinements.
    """

    dim: int
    radius: float
    n_per_axis: int
    indices: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n_per_axis

    @property
    def centers(self) -> np.ndarray:
        return self.indices.astype(float) * self.spacing

    def __len__(self) -> int:
        return self.indices.shape[0]


def _full_lattice(d: int, n: int) -> np.ndarray:
    grids = np.meshgrid(*([np.arange(n, dtype=np.int64)] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def grid_net(d: int, radius: float) -> CoveringNet:
    """Uniform lattice covering all of T^d at the given radius."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if radius <= 0:
        raise ValueError("net radius must be positive")
    n = _per_axis_count(d, radius)
    return CoveringNet(dim=d, radius=radius, n_per_axis=n, indices=_full_lattice(d, n))


def _dedupe_sorted(indices: np.ndarray, n: int, d: int) -> np.ndarray:
    # encode rows to a single integer key; unique() sorts, giving a
    # canonical order independent of generation order
    key = np.zeros(indices.shape[0], dtype=np.int64)
    for j in range(d):
        key = key * n + indices[:, j]
    key = np.unique(key)
    out = np.empty((key.shape[0], d), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        out[:, j] = key % n
        key //= n
    return out


def refine_net(kept: np.ndarray, r_old: float, r_new: float, d: int) -> CoveringNet:
    """Cover the union of balls B(kept_i, r_old) at the finer radius r_new.

    Retains exactly the points of the global r_new lattice within
    r_old + r_new of some kept center; every point of the ball union is
    then within r_new of a retained center. ``kept`` is an (N, d) array of
    local centers (angles).
    """
    if r_new >= r_old:
        raise ValueError("refinement requires r_new < r_old")
    kept = np.atleast_2d(np.asarray(kept, dtype=float))
    n = _per_axis_count(d, r_new)
    if kept.size == 0:
        return CoveringNet(dim=d, radius=r_new, n_per_axis=n,
                           indices=np.empty((0, d), dtype=np.int64))
    window = r_old + r_new
    spacing = TWO_PI / n
    # rounding the base index costs up to half a step, hence the +0.5
    reach = int(math.ceil(window / spacing + 0.5))

    chunks = []
    offsets = np.arange(-reach, reach + 1, dtype=np.int64)
    for center in kept:
        # per-axis candidate indices around the kept center
        base_idx = np.round(center / spacing).astype(np.int64)
        if 2 * reach + 1 >= n:
            axis_indices = [np.arange(n, dtype=np.int64)] * d
        else:
            axis_indices = [np.mod(base_idx[j] + offsets, n) for j in range(d)]
        box = np.meshgrid(*axis_indices, indexing="ij")
        cand = np.stack([g.ravel() for g in box], axis=-1)
        dist = np.sqrt(np.sum(wrap_diff(cand * spacing, center) ** 2, axis=-1))
        chunks.append(cand[dist <= window + BOUNDARY_TOL])
    indices = _dedupe_sorted(np.concatenate(chunks, axis=0), n, d)
    return CoveringNet(dim=d, radius=r_new, n_per_axis=n, indices=indices)


def refine_full(net: CoveringNet, r_new: float) -> CoveringNet:
    """Refine a net whose kept set is the full lattice (covers all of T^d).

    Equivalent to :func:`refine_net` on the full center list: the old
    lattice covers T^d at r_old, so every new lattice point is within
    r_old + r_new of some old center.
    """
    return grid_net(net.dim, r_new)


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional Euclidean unit ball."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def covering_number_bound(d: int, radius: float, c1: float = 1.0) -> float:
    """Volume-argument upper bound on the rho-covering number of T^d."""
    if radius <= 0 or radius > TWO_PI:
        raise ValueError("covering radius must lie in (0, 2pi]")
    if c1 < 1:
        raise ValueError("covering constant must be >= 1")
    return c1 / unit_ball_volume(d) * (TWO_PI / radius) ** d
