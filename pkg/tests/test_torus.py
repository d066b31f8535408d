"""Tests for torus geometry: wrapping, distances, flats, covering nets."""
import math

import numpy as np
import pytest

from alet.torus import (
    TWO_PI,
    CoveringNet,
    FlatPoint,
    FlatSpec,
    covering_number_bound,
    embed,
    geodesic_dist,
    grid_net,
    pairwise_dist,
    refine_full,
    refine_net,
    unit_ball_volume,
    wrap,
)


# --- wrap ---

def test_wrap_identity():
    assert np.allclose(wrap([0.0, 0.0]), [0.0, 0.0])


def test_wrap_period_boundary():
    assert wrap([TWO_PI])[0] == 0.0


def test_wrap_negative():
    assert wrap([-0.1])[0] == pytest.approx(TWO_PI - 0.1, abs=1e-15)


def test_wrap_tiny_negative_stays_in_domain():
    out = wrap([-1e-18])
    assert 0.0 <= out[0] < TWO_PI


def test_wrap_rejects_non_finite():
    with pytest.raises(ValueError):
        wrap([np.nan])
    with pytest.raises(ValueError):
        wrap([np.inf, 0.0])


# --- geodesic distance ---

def test_antipodal_on_circle():
    assert geodesic_dist([0.0], [math.pi]) == pytest.approx(math.pi)


def test_wraps_through_boundary():
    # brute-force oracle: min over k in {-1,0,1}^2 of ||x - y + 2 pi k||
    expected = min(
        math.hypot(0.1 - 6.2 + TWO_PI * k1, TWO_PI * k2)
        for k1 in (-1, 0, 1)
        for k2 in (-1, 0, 1)
    )
    assert expected == pytest.approx(0.1831853071795857, abs=1e-12)
    assert geodesic_dist([0.1, 0.0], [6.2, 0.0]) == pytest.approx(expected, abs=1e-12)


def test_zero_at_identical_points():
    rng = np.random.default_rng(7)
    x = rng.uniform(0, TWO_PI, size=5)
    assert geodesic_dist(x, x) == 0.0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        geodesic_dist([0.0], [0.0, 0.0])


def test_metric_axioms_random_triples():
    rng = np.random.default_rng(0)
    for p in (1, 2, 4, 8):
        x = rng.uniform(0, TWO_PI, size=(2500, p))
        y = rng.uniform(0, TWO_PI, size=(2500, p))
        z = rng.uniform(0, TWO_PI, size=(2500, p))
        dxy = np.array([geodesic_dist(a, b) for a, b in zip(x, y)])
        dyx = np.array([geodesic_dist(b, a) for a, b in zip(x, y)])
        dxz = np.array([geodesic_dist(a, c) for a, c in zip(x, z)])
        dzy = np.array([geodesic_dist(c, b) for c, b in zip(z, y)])
        assert np.max(np.abs(dxy - dyx)) <= 1e-12
        assert np.all(dxy <= dxz + dzy + 1e-12)
        assert np.all(dxy <= math.pi * math.sqrt(p) + 1e-12)


def test_diameter_approached_at_antipodes():
    p = 3
    x = np.zeros(p)
    y = np.full(p, math.pi)
    assert geodesic_dist(x, y) == pytest.approx(math.pi * math.sqrt(p))


# --- flats and embedding ---

def test_embed_zero_offset():
    flat = FlatSpec(axes=(0, 2), base=np.array([1.0, 2.0, 3.0]))
    assert np.allclose(flat.embed([0.0, 0.0]), [1.0, 2.0, 3.0])


def test_embed_direct_substitution():
    flat = FlatSpec(axes=(0, 2), base=np.array([0.0, 2.0, 0.0]))
    assert np.allclose(flat.embed([math.pi, math.pi]), [math.pi, 2.0, math.pi])


def test_embed_wraps():
    flat = FlatSpec(axes=(1,), base=np.array([5.0, 6.0]))
    out = flat.embed([TWO_PI - 6.0 + 0.5])
    assert np.allclose(out, [5.0, 0.5], atol=1e-12)


def test_flat_point_embed_function():
    flat = FlatSpec(axes=(1,), base=np.array([5.0, 6.0]))
    q = FlatPoint(flat=flat, local=np.array([0.25]))
    assert np.allclose(embed(q), flat.embed([0.25]))


def test_flat_validation():
    with pytest.raises(ValueError):
        FlatSpec(axes=(0, 0), base=np.zeros(3))
    with pytest.raises(ValueError):
        FlatSpec(axes=(3,), base=np.zeros(3))
    with pytest.raises(ValueError):
        FlatSpec(axes=(), base=np.zeros(3))


def test_embedding_is_isometric():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = int(rng.integers(2, 7))
        d = int(rng.integers(1, p + 1))
        axes = tuple(sorted(rng.choice(p, size=d, replace=False).tolist()))
        flat = FlatSpec(axes=axes, base=rng.uniform(0, TWO_PI, size=p))
        u = rng.uniform(0, TWO_PI, size=d)
        v = rng.uniform(0, TWO_PI, size=d)
        d_local = geodesic_dist(u, v)
        d_ambient = geodesic_dist(flat.embed(u), flat.embed(v))
        assert abs(d_local - d_ambient) <= 1e-12


# --- covering nets ---

def _cover_shortfall(net: CoveringNet, points: np.ndarray) -> float:
    dist = pairwise_dist(points, net.centers)
    return float(np.max(np.min(dist, axis=1)) - net.radius)


@pytest.mark.parametrize(
    "d, radius, expected_total",
    [(1, math.pi, 1), (1, math.pi / 4, 4), (2, 1.0, 25)],
)
def test_grid_net_counts(d, radius, expected_total):
    net = grid_net(d, radius)
    assert len(net) == expected_total


@pytest.mark.parametrize("d, radius", [(1, math.pi), (1, math.pi / 4), (2, 1.0), (3, 1.7)])
def test_grid_net_covers(d, radius):
    net = grid_net(d, radius)
    rng = np.random.default_rng(11)
    points = rng.uniform(0, TWO_PI, size=(10_000, d))
    assert _cover_shortfall(net, points) <= 1e-12


def test_grid_net_rejects_bad_radius():
    with pytest.raises(ValueError):
        grid_net(1, 0.0)
    with pytest.raises(ValueError):
        grid_net(1, -1.0)


def test_refine_net_matches_oracle_on_circle():
    # enumerate the spacing-pi/2 lattice and filter by distance by hand
    net = refine_net(np.array([[0.0]]), r_old=math.pi / 2, r_new=math.pi / 4, d=1)
    assert net.n_per_axis == 4
    assert sorted(net.centers.ravel().tolist()) == pytest.approx(
        [0.0, math.pi / 2, 3 * math.pi / 2]
    )


def test_refine_net_empty_kept():
    net = refine_net(np.empty((0, 2)), r_old=1.0, r_new=0.5, d=2)
    assert len(net) == 0


def test_refine_full_survivors_equals_fresh_grid():
    old = grid_net(2, 1.0)
    refined = refine_net(old.centers, r_old=1.0, r_new=0.5, d=2)
    fresh = grid_net(2, 0.5)
    assert len(refined) == len(fresh)
    assert np.array_equal(refined.indices, fresh.indices)
    shortcut = refine_full(old, 0.5)
    assert np.array_equal(shortcut.indices, fresh.indices)


def test_refine_net_covers_ball_union():
    rng = np.random.default_rng(5)
    for d in (1, 2):
        r_old = 1.1
        r_new = 0.4
        kept = rng.uniform(0, TWO_PI, size=(3, d))
        net = refine_net(kept, r_old=r_old, r_new=r_new, d=d)
        # sample the union of balls B(kept_i, r_old)
        raw = kept[rng.integers(0, 3, size=12_000)] + rng.uniform(
            -r_old, r_old, size=(12_000, d)
        )
        points = wrap(raw)
        inside = np.min(pairwise_dist(points, kept), axis=1) <= r_old
        assert _cover_shortfall(net, points[inside]) <= 1e-12


def test_refine_net_is_lattice_subset():
    net = refine_net(np.array([[0.2, 4.0]]), r_old=0.9, r_new=0.33, d=2)
    assert net.indices.dtype == np.int64
    assert np.all(net.indices >= 0)
    assert np.all(net.indices < net.n_per_axis)
    # canonical (lexicographic) ordering
    key = net.indices[:, 0] * net.n_per_axis + net.indices[:, 1]
    assert np.all(np.diff(key) > 0)


def test_refine_net_requires_shrink():
    with pytest.raises(ValueError):
        refine_net(np.array([[0.0]]), r_old=0.5, r_new=0.5, d=1)


# --- volume formulas ---

@pytest.mark.parametrize("d, expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)])
def test_unit_ball_volume(d, expected):
    assert unit_ball_volume(d) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize(
    "d, radius, c1, expected",
    [
        (1, TWO_PI, 1.0, 0.5),
        (1, math.pi / 4, 1.0, 4.0),
        (2, 1.0, 1.0, TWO_PI ** 2 / math.pi),
    ],
)
def test_covering_number_bound(d, radius, c1, expected):
    assert covering_number_bound(d, radius, c1) == pytest.approx(expected, rel=1e-12)


def test_covering_number_bound_validation():
    with pytest.raises(ValueError):
        covering_number_bound(1, 0.0)
    with pytest.raises(ValueError):
        covering_number_bound(1, 7.0)
    with pytest.raises(ValueError):
        covering_number_bound(1, 1.0, c1=0.5)
