"""Experiment configuration: JSON-compatible schema and bundled setups.

A config is a flat key/value mapping (see ``ExperimentConfig`` fields for
the schema; unknown keys are rejected).  Five bundled problem setups cover
the studies this harness reproduces; "custom" assembles a model entirely
from the override fields.  Desk-scale resolutions keep every study in CI
territory; --paper-scale restores the production grids.

    p1_nonlinear_1d     cubic coupling on (-32,32), rational potential
    p2_soliton          attractive cubic, closed-form traveling wave
    p3_linear_magnetic_1d  linear variant with electric + magnetic fields
    p4_nonlinear_2d     honeycomb lattice potential on (-16,16)^2
    p5_linear_2d        linear variant, honeycomb potential, (-10,10)^2
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigurationError
from ..model import ModelSpec, make_model, sample_named_field, soliton_state
from ..spectral import SpatialGrid, build_grid

PROBLEMS = ("p1_nonlinear_1d", "p2_soliton", "p3_linear_magnetic_1d",
            "p4_nonlinear_2d", "p5_linear_2d", "custom")
CFG_SCHEMES = ("sep_ts4", "eep_ts4", "strang_ref")
REFERENCES = ("self", "strang", "exact")


@dataclass
class ExperimentConfig:
    problem: str = "p1_nonlinear_1d"
    scheme: str = "sep_ts4"
    eps: tuple = (1.0, 0.5, 0.1, 0.05, 0.01)
    dt: tuple = (0.1, 0.05, 0.025, 0.0125, 0.00625)
    t_end: float = 1.0
    out_dir: str = "tsdirac-out"
    paper_scale: bool = False

    # resolution (None -> problem/scale default)
    nx: Optional[int] = None
    ntau: Optional[int] = None

    # resolution sweeps: lists swept, *_ref fixes the fine reference run,
    # sweep_dt the common step of sweep and reference
    nx_list: tuple = (64, 128, 256)
    ntau_list: tuple = (8, 16, 32)
    nx_ref: int = 1024
    ntau_ref: int = 256
    sweep_dt: float = 0.01

    # temporal-study reference strategy
    reference: str = "self"
    ref_refine: int = 16
    dt_ref: float = 1e-5

    # conservation / dynamics
    diag_stride: int = 1
    snapshot_times: tuple = ()

    # model overrides (required for problem="custom")
    domain: Optional[tuple] = None        # (lo, hi) of scalars or pairs
    potential: Optional[str] = None       # registry name or "none"
    magnetic: Optional[str] = None
    lam1: Optional[float] = None
    lam2: Optional[float] = None
    variant: Optional[str] = None
    initial: Optional[str] = None         # registry name for custom data

    # soliton / collision parameters (p2)
    omega: float = 0.8
    x0: float = -5.0
    speed: float = 0.2
    collision: bool = False
    collision_omega: float = 0.8
    collision_x: float = 10.0
    collision_speed: float = 0.2

    # scheme internals
    h3_mixed_term: str = "composition"
    tableau_variant: str = "classical"
    workers: int = 1

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigurationError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.scheme not in CFG_SCHEMES:
            raise ConfigurationError(f"scheme must be one of {CFG_SCHEMES}, got {self.scheme!r}")
        if self.reference not in REFERENCES:
            raise ConfigurationError(f"reference must be one of {REFERENCES}, got {self.reference!r}")
        self.eps = tuple(float(e) for e in self.eps)
        self.dt = tuple(float(d) for d in self.dt)
        self.nx_list = tuple(int(n) for n in self.nx_list)
        self.ntau_list = tuple(int(n) for n in self.ntau_list)
        self.snapshot_times = tuple(float(t) for t in self.snapshot_times)
        for e in self.eps:
            if not 0.0 < e <= 1.0:
                raise ConfigurationError(f"eps values must lie in (0, 1], got {e}")
        for d in self.dt:
            n = round(self.t_end / d)
            if n < 1 or abs(n * d - self.t_end) > 1e-9 * max(1.0, self.t_end):
                raise ConfigurationError(f"dt={d} does not divide t_end={self.t_end}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")


_FIELD_NAMES = {f.name for f in dataclasses.fields(ExperimentConfig)}


def config_from_dict(data: dict) -> ExperimentConfig:
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    coerced = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
    return ExperimentConfig(**coerced)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a JSON object")
    return config_from_dict(data)


# default (desk, paper) resolutions per problem
_SCALE = {
    "p1_nonlinear_1d": ((256, 32), (1024, 64)),
    "p2_soliton": ((256, 32), (1024, 64)),
    "p3_linear_magnetic_1d": ((256, 32), (1024, 64)),
    "p4_nonlinear_2d": ((128, 32), (256, 64)),
    "p5_linear_2d": ((128, 32), (320, 64)),
    "custom": ((256, 32), (1024, 64)),
}


@dataclass
class ProblemSetup:
    """Resolved grid/model factory/initial data for one configuration."""

    name: str
    grid: SpatialGrid
    ntau: int
    model_for: Callable[[float], ModelSpec]
    phi0: np.ndarray
    exact: Optional[Callable[[float, float], np.ndarray]] = None  # (eps, t)


def _resolution(cfg: ExperimentConfig) -> tuple[int, int]:
    desk, paper = _SCALE[cfg.problem]
    nx, ntau = paper if cfg.paper_scale else desk
    return cfg.nx or nx, cfg.ntau or ntau


def build_setup(cfg: ExperimentConfig, nx: Optional[int] = None,
                ntau: Optional[int] = None) -> ProblemSetup:
    """Resolve a config into grid + model factory (nx/ntau overridable)."""
    nx0, ntau0 = _resolution(cfg)
    nx = nx or nx0
    ntau = ntau or ntau0
    p = cfg.problem

    def grid_for(lo, hi):
        dom = cfg.domain or (lo, hi)
        return build_grid(dom[0], dom[1], nx)

    lam1 = cfg.lam1
    lam2 = cfg.lam2 if cfg.lam2 is not None else 0.0

    if p == "p1_nonlinear_1d":
        grid = grid_for(-32.0, 32.0)
        pot = _sample(cfg.potential or "pot_rational_odd", grid)
        l1 = lam1 if lam1 is not None else 1.0
        phi0 = sample_named_field(cfg.initial or "gauss_pair", grid)
        return ProblemSetup(p, grid, ntau,
                            lambda e: make_model(grid, e, pot, l1, lam2), phi0)

    if p == "p2_soliton":
        grid = grid_for(-32.0, 32.0)
        pot = np.zeros(grid.shape)
        l1 = lam1 if lam1 is not None else -1.0
        if cfg.collision:
            left = soliton_state(grid, l1, cfg.collision_omega, -cfg.collision_x,
                                 cfg.collision_speed)
            right = soliton_state(grid, l1, cfg.collision_omega, cfg.collision_x,
                                  -cfg.collision_speed)
            phi0 = left + right
            exact = None
        else:
            phi0 = soliton_state(grid, l1, cfg.omega, cfg.x0, cfg.speed)

            def exact(eps, t, _g=grid, _l=l1):
                if eps != 1.0:
                    raise ConfigurationError("closed-form soliton needs eps=1")
                return soliton_state(_g, _l, cfg.omega, cfg.x0, cfg.speed, t=t)

        return ProblemSetup(p, grid, ntau,
                            lambda e: make_model(grid, e, pot, l1, lam2), phi0,
                            exact=exact)

    if p == "p3_linear_magnetic_1d":
        grid = grid_for(-32.0, 32.0)
        pot = _sample(cfg.potential or "pot_rational_neg", grid)
        mag = (_sample(cfg.magnetic or "mag_rational_sq", grid),)
        phi0 = sample_named_field(cfg.initial or "gauss_pair_narrow", grid)
        return ProblemSetup(p, grid, ntau,
                            lambda e: make_model(grid, e, pot, magnetic=mag,
                                                 variant="linear_magnetic"), phi0)

    if p == "p4_nonlinear_2d":
        grid = grid_for((-16.0, -16.0), (16.0, 16.0))
        pot = _sample(cfg.potential or "pot_honeycomb", grid)
        l1 = lam1 if lam1 is not None else -1.0
        phi0 = sample_named_field(cfg.initial or "gauss_pair_2d", grid)
        return ProblemSetup(p, grid, ntau,
                            lambda e: make_model(grid, e, pot, l1, lam2), phi0)

    if p == "p5_linear_2d":
        grid = grid_for((-10.0, -10.0), (10.0, 10.0))
        pot = _sample(cfg.potential or "pot_honeycomb", grid)
        mag = tuple(np.zeros(grid.shape) for _ in range(grid.ndim))
        phi0 = sample_named_field(cfg.initial or "gauss_pair_2d", grid)
        return ProblemSetup(p, grid, ntau,
                            lambda e: make_model(grid, e, pot, magnetic=mag,
                                                 variant="linear_magnetic"), phi0)

    # custom: everything explicit
    if cfg.domain is None or cfg.initial is None:
        raise ConfigurationError("custom problem needs domain and initial fields")
    grid = build_grid(cfg.domain[0], cfg.domain[1], nx)
    pot = _sample(cfg.potential or "none", grid)
    phi0 = sample_named_field(cfg.initial, grid)
    variant = cfg.variant or "nonlinear"
    if variant == "linear_magnetic":
        mag_arr = (_sample(cfg.magnetic or "none", grid),) * grid.ndim \
            if cfg.magnetic else tuple(np.zeros(grid.shape) for _ in range(grid.ndim))
        return ProblemSetup(p, grid, ntau,
                            lambda e: make_model(grid, e, pot, magnetic=mag_arr,
                                                 variant=variant), phi0)
    return ProblemSetup(p, grid, ntau,
                        lambda e: make_model(grid, e, pot, lam1 or 0.0, lam2), phi0)


def _sample(name: str, grid: SpatialGrid) -> np.ndarray:
    if name == "none":
        return np.zeros(grid.shape)
    return sample_named_field(name, grid)
