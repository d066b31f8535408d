"""Run configuration schema shared by the HTTP service and the CLI.

Everything is validated up front: unknown fields are hard errors, each
mode requires exactly its own sections, and cross-field constraints
(budget sums, radius ordering) fail with the offending field paths.
"""
from __future__ import annotations

import math
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .engine import EngineConfig
from .landscapes import BandDentLandscape, DentLandscape, TubeDentSet
from .noise import NoiseSpec
from .quantum import AnsatzSpec, HamiltonianSpec, PauliString, lambda_bound
from .slicing import SliceModel, band_model, tube_model


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class NoiseConfig(StrictModel):
    kind: Literal["two-point", "exact"] = "two-point"
    outcome_range: float = Field(default=1.0, gt=0)
    n_shots: int = Field(default=100, ge=1)
    schedule: Literal["per-round", "fixed-radius"] = "per-round"
    rad_target: Optional[float] = Field(default=None, gt=0)

    def to_spec(self, master_seed: int) -> NoiseSpec:
        return NoiseSpec(
            outcome_range=self.outcome_range,
            n_shots=self.n_shots,
            master_seed=master_seed,
            kind=self.kind,
            schedule=self.schedule,
            rad_target=self.rad_target,
        )


class DentLandscapeConfig(StrictModel):
    kind: Literal["dent"] = "dent"
    p: int = Field(ge=1)
    normal_axes: List[int]
    offsets: List[float]
    curvatures: List[float]
    floor: float = 0.0

    def build(self) -> DentLandscape:
        return DentLandscape(
            p=self.p,
            normal_axes=tuple(self.normal_axes),
            offsets=np.array(self.offsets),
            curvatures=np.array(self.curvatures),
            floor=self.floor,
        )


class BandDentLandscapeConfig(StrictModel):
    kind: Literal["band-dent"] = "band-dent"
    p: int = Field(ge=1)
    normal_axes: List[int]
    offsets: List[float]
    curvatures: List[float]
    arc_axes: List[int]
    arc_starts: List[float]
    arc_lengths: List[float]
    arc_curvatures: List[float]
    floor: float = 0.0

    def build(self) -> BandDentLandscape:
        return BandDentLandscape(
            p=self.p,
            normal_axes=tuple(self.normal_axes),
            offsets=np.array(self.offsets),
            curvatures=np.array(self.curvatures),
            arc_axes=tuple(self.arc_axes),
            arc_starts=np.array(self.arc_starts),
            arc_lengths=np.array(self.arc_lengths),
            arc_curvatures=np.array(self.arc_curvatures),
            floor=self.floor,
        )


LandscapeConfig = Union[DentLandscapeConfig, BandDentLandscapeConfig]


class SyntheticOracleConfig(StrictModel):
    kind: Literal["synthetic"] = "synthetic"
    landscape: LandscapeConfig = Field(discriminator="kind")


class PauliTermConfig(StrictModel):
    string: str
    coefficient: float = 1.0


class QuantumOracleConfig(StrictModel):
    kind: Literal["quantum"] = "quantum"
    n_qubits: int = Field(ge=1)
    generators: List[str]
    hamiltonian: List[PauliTermConfig]
    tying: Optional[List[int]] = None
    lambda_mode: Literal["coefficient-sum", "dense"] = "coefficient-sum"

    def build_ansatz(self) -> AnsatzSpec:
        gens = tuple(PauliString(self.n_qubits, s) for s in self.generators)
        tying = tuple(self.tying) if self.tying is not None else None
        return AnsatzSpec(n_qubits=self.n_qubits, generators=gens, tying=tying)

    def build_hamiltonian(self) -> HamiltonianSpec:
        terms = tuple(
            PauliString(self.n_qubits, t.string, t.coefficient)
            for t in self.hamiltonian
        )
        ham = HamiltonianSpec(terms=terms)
        if self.lambda_mode == "dense":
            ham = HamiltonianSpec(terms=terms, lambda_bound=lambda_bound(ham, "dense"))
        return ham


OracleConfig = Union[SyntheticOracleConfig, QuantumOracleConfig]


class EngineSettings(StrictModel):
    r_fin: float = Field(gt=0)
    lipschitz: Optional[float] = Field(default=None, gt=0)
    delta_noise: float = Field(default=0.05, gt=0, lt=1)
    shrink: float = Field(default=2.0, gt=1)
    r0: Optional[float] = Field(default=None, gt=0)
    c1: float = Field(default=1.0, ge=1)
    noise: NoiseConfig = NoiseConfig()

    def to_engine_config(self, lipschitz: float, master_seed: int) -> EngineConfig:
        return EngineConfig(
            r_fin=self.r_fin,
            lipschitz=lipschitz,
            delta_noise=self.delta_noise,
            noise=self.noise.to_spec(master_seed),
            shrink=self.shrink,
            r0=self.r0,
            c1=self.c1,
        )


class FlatModeConfig(StrictModel):
    axes: List[int]
    base: Optional[List[float]] = None


class GlobalModeConfig(StrictModel):
    axes: List[int]
    fiber_constant: float = Field(ge=1)
    delta_int: float = Field(gt=0, lt=1)


class SliceModelConfig(StrictModel):
    model_id: str = "model"
    kind: Literal["band", "tube"]
    p: int = Field(ge=2)
    m: int = Field(ge=2)
    base_starts: List[float]
    base_lengths: List[float]
    piece_weights: Optional[List[float]] = None
    piece_half_widths: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_kind_params(self):
        if self.kind == "tube" and (
            self.piece_weights is None or self.piece_half_widths is None
        ):
            raise ValueError("tube models need piece_weights and piece_half_widths")
        if self.kind == "band" and (
            self.piece_weights is not None or self.piece_half_widths is not None
        ):
            raise ValueError("band models fix the slice profile; drop the piece table")
        return self

    def build(self) -> SliceModel:
        if self.kind == "band":
            return band_model(self.p, self.m, self.base_starts, self.base_lengths)
        tube = TubeDentSet(
            p=self.p,
            m=self.m,
            base_starts=np.array(self.base_starts),
            base_lengths=np.array(self.base_lengths),
            piece_weights=np.array(self.piece_weights),
            piece_half_widths=np.array(self.piece_half_widths),
        )
        return tube_model(tube)


class SliceStatsModeConfig(StrictModel):
    models: List[SliceModelConfig] = Field(min_length=1)
    n_samples: int = Field(default=10_000, ge=1)


class AuditModeConfig(StrictModel):
    n_rank_samples: int = Field(default=12, ge=1)
    n_gradient_samples: int = Field(default=2000, ge=1)
    n_residual_samples: int = Field(default=25, ge=1)
    fd_step: float = Field(default=1e-5, gt=0)
    rank_tol: float = Field(default=1e-8, gt=0, lt=1)


class BenchCellConfig(StrictModel):
    d: int = Field(ge=1)
    epsilon: float = Field(gt=0)


class BenchModeConfig(StrictModel):
    cells: List[BenchCellConfig] = Field(min_length=1)
    curvature: float = Field(default=0.25, gt=0)
    c0: float = Field(default=8.0, gt=0)


_MODE_SECTIONS = {
    "flat": ("oracle", "engine", "flat"),
    "global": ("oracle", "engine", "global_"),
    "slice-stats": ("slice_stats",),
    "landscape-audit": ("oracle", "audit"),
    "bench": ("bench",),
}
_OPTIONAL_SECTIONS = {"landscape-audit": ("audit",)}
_ALL_SECTIONS = ("oracle", "engine", "flat", "global_", "slice_stats", "audit", "bench")


class RunConfig(StrictModel):
    """Top-level description of one run; the service request body."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    mode: Literal["flat", "global", "slice-stats", "landscape-audit", "bench"]
    seed: int = Field(default=0, ge=0)
    output_dir: Optional[str] = None
    oracle: Optional[OracleConfig] = Field(default=None, discriminator="kind")
    engine: Optional[EngineSettings] = None
    flat: Optional[FlatModeConfig] = None
    global_: Optional[GlobalModeConfig] = Field(default=None, alias="global")
    slice_stats: Optional[SliceStatsModeConfig] = Field(default=None, alias="slice-stats")
    audit: Optional[AuditModeConfig] = None
    bench: Optional[BenchModeConfig] = None

    @model_validator(mode="after")
    def _check_sections(self):
        required = _MODE_SECTIONS[self.mode]
        optional = _OPTIONAL_SECTIONS.get(self.mode, ())
        for name in required:
            if name not in optional and getattr(self, name) is None:
                raise ValueError(f"mode {self.mode!r} requires section {name.rstrip('_')!r}")
        for name in _ALL_SECTIONS:
            if name not in required and getattr(self, name) is not None:
                raise ValueError(
                    f"section {name.rstrip('_')!r} is not consumed in mode {self.mode!r}"
                )
        if self.mode == "global":
            total = self.global_.delta_int + self.engine.delta_noise
            if total > 1.0:
                raise ValueError(
                    "global.delta_int + engine.delta_noise ="
                    f" {total:.6g} exceeds 1; shrink one of the two budgets"
                )
        if self.mode == "landscape-audit":
            if self.oracle is not None and self.oracle.kind != "quantum":
                raise ValueError("landscape-audit requires a quantum oracle")
        if (
            self.engine is not None
            and self.engine.r0 is not None
            and self.engine.r_fin > self.engine.r0
        ):
            raise ValueError("engine.r_fin must not exceed engine.r0")
        return self
