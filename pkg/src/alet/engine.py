"""Adaptive Lipschitz elimination on a single geodesic flat.

Each round nets the surviving region, queries every net center through a
noisy oracle, and removes any ball whose lower confidence bound exceeds
the best upper confidence bound by more than the Lipschitz slack. Radii
shrink geometrically until the final resolution is reached.

Survivor bookkeeping is conservative: the region after round t is the
intersection of all rounds' kept-ball unions, which makes the nesting
S_{t+1} subset-of S_t exact by construction while preserving every
guarantee (the flat minimizer is never dropped on the good event, and the
terminal accuracy bound only concerns the terminal kept balls).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import CertificateAnomalyError, ConfigurationError, ResourceLimitError
from .noise import NoiseSpec, alpha_schedule, hoeffding_radius
from .torus import (
    CoveringNet,
    FlatSpec,
    covering_number_bound,
    grid_net,
    pairwise_dist,
    refine_full,
    refine_net,
    unit_ball_volume,
)

# slack for floating-point comparisons on certificate and membership boundaries
_EDGE_TOL = 1e-9

# pairwise Lipschitz-consistency checks are quadratic; above this net size
# only the coarse diameter check runs
_PAIRWISE_LIMIT = 1024


@dataclass(frozen=True)
class EngineConfig:
    """Inputs of a single-flat elimination run."""

    r_fin: float
    lipschitz: float
    delta_noise: float
    noise: NoiseSpec
    shrink: float = 2.0
    r0: Optional[float] = None
    c1: float = 1.0

    def __post_init__(self):
        if self.shrink <= 1.0:
            raise ValueError("shrink factor must exceed 1")
        if self.r_fin <= 0:
            raise ValueError("final radius must be positive")
        if self.r0 is not None and self.r_fin > self.r0:
            raise ValueError("final radius cannot exceed the initial radius")
        if self.lipschitz < 0:
            raise ValueError("Lipschitz bound must be nonnegative")
        if not (0.0 < self.delta_noise < 1.0):
            raise ValueError("noise budget must lie in (0, 1)")
        if self.c1 < 1.0:
            raise ValueError("covering constant must be >= 1")

    def initial_radius(self, flat_dim: int) -> float:
        # one ball of radius pi*sqrt(d) covers the whole flat, so the
        # default start costs a single query
        return self.r0 if self.r0 is not None else math.pi * math.sqrt(flat_dim)


@dataclass(frozen=True)
class SurvivorSet:
    """Kept centers of one round: lattice indices plus the ball radius."""

    radius: float
    n_per_axis: int
    indices: np.ndarray = field(repr=False)

    @property
    def centers(self) -> np.ndarray:
        return self.indices.astype(float) * (2.0 * math.pi / self.n_per_axis)

    def __len__(self) -> int:
        return self.indices.shape[0]

    def contains(self, local) -> np.ndarray:
        """Membership in the kept-ball union, exact up to boundary tolerance."""
        local = np.atleast_2d(np.asarray(local, dtype=float))
        dist = pairwise_dist(local, self.centers)
        return np.min(dist, axis=1) <= self.radius + _EDGE_TOL


@dataclass(frozen=True)
class RoundRecord:
    t: int
    radius: float
    n_centers: int
    ucb_star: float
    kept_count: int
    queries_cum: int
    rad: float
    n_shots: int


@dataclass(frozen=True)
class FlatResult:
    """Full audit of one elimination run on a flat."""

    flat: FlatSpec
    flat_id: int
    rounds: List[RoundRecord]
    history: List[SurvivorSet]
    epsilon: float
    total_queries: int
    terminal_net: CoveringNet
    terminal_values: np.ndarray
    terminal_rad: float
    terminal_kept: np.ndarray

    @property
    def survivors(self) -> SurvivorSet:
        return self.history[-1]

    @property
    def r_final(self) -> float:
        return self.history[-1].radius

    @property
    def min_estimate(self) -> float:
        return float(np.min(self.terminal_values))

    def region_contains(self, local) -> np.ndarray:
        """Exact membership in the final survivor region (all rounds)."""
        local = np.atleast_2d(np.asarray(local, dtype=float))
        inside = np.ones(local.shape[0], dtype=bool)
        for layer in self.history:
            inside &= layer.contains(local)
        return inside


def elimination_certificate(lcb: float, ucb_star: float, lipschitz: float, radius: float) -> bool:
    """True iff the ball at this center is certified suboptimal (strict test)."""
    return lcb > ucb_star + lipschitz * radius


def epsilon_bound(lipschitz: float, r_final: float, rad_final: float) -> float:
    """Terminal accuracy 3 L r_T + 4 rad_T for every surviving point."""
    if lipschitz < 0 or r_final < 0 or rad_final < 0:
        raise ValueError("epsilon inputs must be nonnegative")
    return 3.0 * lipschitz * r_final + 4.0 * rad_final


def _check_lipschitz_consistency(
    centers: np.ndarray,
    values: np.ndarray,
    rad: float,
    lipschitz: float,
    flat_dim: int,
    flat_id: int,
    round_index: int,
):
    """Raise if the estimates contradict L-Lipschitzness beyond noise slack.

    On the good event |estimate - cost| <= rad everywhere, any two centers
    obey |est_i - est_j| <= L dist + 2 rad. A violation therefore signals
    an invalid Lipschitz bound or a broken noise model. Never fires on a
    noiseless oracle with a valid bound.
    """
    n = values.shape[0]
    if n < 2:
        return
    slack = 2.0 * rad + _EDGE_TOL
    spread = float(np.max(values) - np.min(values))
    diameter = math.pi * math.sqrt(flat_dim)
    if spread > lipschitz * diameter + slack:
        raise CertificateAnomalyError(
            f"estimate spread {spread:.6g} exceeds L*diameter+2rad="
            f"{lipschitz * diameter + 2.0 * rad:.6g}; Lipschitz bound or noise "
            "range is misconfigured",
            flat_id=flat_id,
            round_index=round_index,
        )
    if n <= _PAIRWISE_LIMIT:
        dist = pairwise_dist(centers, centers)
        gap = np.abs(values[:, None] - values[None, :]) - lipschitz * dist
        worst = float(np.max(gap))
        if worst > slack:
            raise CertificateAnomalyError(
                f"estimate pair differs by {worst:.6g} more than L*dist+2rad allows; "
                "Lipschitz bound or noise range is misconfigured",
                flat_id=flat_id,
                round_index=round_index,
            )


def run_flat(flat: FlatSpec, oracle, cfg: EngineConfig, flat_id: int = 0) -> FlatResult:
    """Run the elimination loop on one flat until the final radius."""
    d = flat.dim
    radius = cfg.initial_radius(d)
    if cfg.r_fin > radius:
        raise ConfigurationError("final radius exceeds the initial radius")
    net = grid_net(d, radius)
    rounds: List[RoundRecord] = []
    history: List[SurvivorSet] = []
    queries = 0
    t = 0
    while True:
        n_centers = len(net)
        if n_centers == 0:
            # cannot occur: the keep rule always retains the running argmin
            raise ConfigurationError("empty net; no centers to query")
        alpha = alpha_schedule(t + 1, n_centers, cfg.delta_noise)
        centers = net.centers
        values, rad, n_shots = oracle.evaluate_round(
            flat.embed(centers), alpha, flat_id, t
        )
        values = np.asarray(values, dtype=float)
        queries += n_centers
        _check_lipschitz_consistency(
            centers, values, rad, cfg.lipschitz, d, flat_id, t
        )
        ucb_star = float(np.min(values)) + rad
        lcb = values - rad
        # keep rule is the exact complement of the strict certificate
        keep = lcb <= ucb_star + cfg.lipschitz * radius
        if not np.any(keep):
            raise CertificateAnomalyError(
                "every center eliminated; impossible under a round-common "
                "confidence radius unless inputs are inconsistent",
                flat_id=flat_id,
                round_index=t,
            )
        kept_indices = net.indices[keep]
        history.append(
            SurvivorSet(radius=radius, n_per_axis=net.n_per_axis, indices=kept_indices)
        )
        rounds.append(
            RoundRecord(
                t=t,
                radius=radius,
                n_centers=n_centers,
                ucb_star=ucb_star,
                kept_count=int(np.sum(keep)),
                queries_cum=queries,
                rad=rad,
                n_shots=n_shots,
            )
        )
        if radius <= cfg.r_fin:
            return FlatResult(
                flat=flat,
                flat_id=flat_id,
                rounds=rounds,
                history=history,
                epsilon=epsilon_bound(cfg.lipschitz, radius, rad),
                total_queries=queries,
                terminal_net=net,
                terminal_values=values,
                terminal_rad=rad,
                terminal_kept=keep,
            )
        new_radius = radius / cfg.shrink
        if kept_indices.shape[0] == len(net):
            # full survivor set: the old lattice covers T^d, so the fresh
            # fine lattice equals the filtered refinement
            net = refine_full(net, new_radius)
        else:
            net = refine_net(
                history[-1].centers, r_old=radius, r_new=new_radius, d=d
            )
        radius = new_radius
        t += 1


def verify_nested(result: FlatResult, tol: float = 1e-9) -> None:
    """Assert the recorded survivor history is exactly nested.

    Checks, per consecutive round pair: radii strictly shrink, and every
    kept center arose inside the refinement window (r_t + r_{t+1}) of the
    previous kept set. Together with the intersection bookkeeping of
    :class:`FlatResult`, this certifies S_{t+1} subset-of S_t on the exact
    lattice representation.
    """
    layers = result.history
    for prev, cur in zip(layers, layers[1:]):
        if not cur.radius < prev.radius:
            raise AssertionError("survivor radii must strictly decrease")
        if len(cur) == 0:
            raise AssertionError("empty survivor layer recorded")
        window = prev.radius + cur.radius + tol
        dist = pairwise_dist(cur.centers, prev.centers)
        worst = float(np.max(np.min(dist, axis=1)))
        if worst > window:
            raise AssertionError(
                f"kept center escapes the refinement window: {worst} > {window}"
            )


@dataclass(frozen=True)
class ResolutionPlan:
    r_final: float
    n_shots: int
    n_rounds: int


def plan_resolution(
    eps_target: float,
    lipschitz: float,
    outcome_range: float,
    delta_noise: float,
    d: int,
    shrink: float = 2.0,
    r0: Optional[float] = None,
    c1: float = 1.0,
) -> ResolutionPlan:
    """Split an accuracy target into a final radius and a shot budget.

    Budgets half of eps to geometry (3 L r_T = eps/2) and half to noise
    (4 rad_T = eps/2), sizing n_shots against a conservative overestimate
    of the terminal net.
    """
    if eps_target <= 0:
        raise ValueError("accuracy target must be positive")
    if lipschitz <= 0:
        raise ValueError("Lipschitz bound must be positive")
    r_final = eps_target / (6.0 * lipschitz)
    start = r0 if r0 is not None else math.pi * math.sqrt(d)
    if r_final >= start:
        n_rounds = 0
    else:
        n_rounds = int(math.ceil(math.log(start / r_final) / math.log(shrink) - 1e-12))
    # conservative terminal-net size: volume bound or the full lattice count
    per_axis = max(1, math.ceil(2.0 * math.pi * math.sqrt(d) / (2.0 * r_final) - 1e-12))
    n_terminal = max(
        int(math.ceil(covering_number_bound(d, min(r_final, 2 * math.pi), c1))),
        per_axis**d,
    )
    alpha = alpha_schedule(n_rounds + 1, n_terminal, delta_noise)
    target_rad = eps_target / 8.0
    n_shots = math.ceil(
        outcome_range**2 * math.log(2.0 / alpha) / (2.0 * target_rad**2)
    )
    if n_shots > 10**15:
        raise ResourceLimitError(f"required shot count {n_shots:.3g} is infeasible")
    n_shots = max(1, n_shots)
    assert hoeffding_radius(n_shots, alpha, outcome_range) <= target_rad + 1e-12
    return ResolutionPlan(r_final=r_final, n_shots=n_shots, n_rounds=n_rounds)


def query_bound(d: int, lipschitz: float, eps_eff: float, c0: float = 1.0) -> float:
    """Volume-argument bound C0 / kappa_d * (6 pi L / eps_eff)^d on total queries."""
    if eps_eff <= 0:
        raise ValueError("effective accuracy must be positive")
    return c0 / unit_ball_volume(d) * (6.0 * math.pi * lipschitz / eps_eff) ** d


def log_query_scale(d: int, lipschitz: float, eps_eff: float) -> float:
    """Asymptotic exponent d*log d + d*log(L/eps_eff) of the query bound."""
    if eps_eff <= 0:
        raise ValueError("effective accuracy must be positive")
    return d * math.log(d) + d * math.log(lipschitz / eps_eff)
