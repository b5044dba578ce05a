"""Study runners: convergence sweeps, conservation series, dynamics snapshots.

Every runner is deterministic (no randomness anywhere in the pipeline) and
records one CSV row per sweep point carrying the full parameter tuple, so
each output file is self-describing.  A numerical failure at one sweep
point is recorded in its row's status column and the sweep continues.

Reference strategies for the temporal study:

    self    same scheme at dt_min/ref_refine, same resolution (default).
            Representation floors (x-, tau-truncation) are common to run
            and reference and cancel, which is what makes small-eps
            temporal orders measurable.
    strang  operator splitting at dt_ref; only trustworthy for moderate
            eps (error ~ dt_ref^2/eps^4).
    exact   closed-form solution where the setup provides one.

Resolution sweeps replicate the fine-reference protocol: the reference is
the same scheme at the same step size with nx_ref/ntau_ref, so the only
difference between run and reference is the resolution under study.

Long-time runs also log the step-size/oscillation alignment diagnostics
min_l |sin(dt l / (2 eps^2))| (l != 0) and dt/sqrt(eps); small values of
the former flag potential resonance between the step and the fast phases.
Flags are informational, never failures.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from ..errors import ConfigurationError, ConsistencyError, StepError
from ..model import energy, mass
from ..spectral import SpatialGrid, to_modes
from ..strang import run_reference, strang_step
from ..stepper import run_simulation
from ..twoscale import TauGrid
from .config import ExperimentConfig, ProblemSetup, build_setup
from .io import write_csv, write_snapshot

_FAILURES = (StepError, ConsistencyError)

CONV_HEADER = ["problem", "scheme", "kind", "eps", "dt", "nx", "ntau", "t_end",
               "err_linf", "err_h1", "observed_order", "runtime_s", "fp_max", "status"]
SERIES_HEADER = ["problem", "scheme", "eps", "dt", "t", "err_h", "err_m"]
SUMMARY_HEADER = ["problem", "scheme", "eps", "dt", "t_end", "max_err_h", "max_err_m",
                  "trend_h", "trend_m", "fp_max", "min_sin_half_dt_omega",
                  "sqrt_eps", "dt_over_sqrt_eps", "resonance_flag", "runtime_s", "status"]
DYN_HEADER = ["problem", "scheme", "eps", "dt", "t", "file", "mass",
              "peak_x", "n_humps"]


def rel_linf(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def rel_h1(grid: SpatialGrid, a: np.ndarray, b: np.ndarray) -> float:
    w = 1.0 + grid.xi_sq

    def norm(f):
        fh = to_modes(grid, f)
        return np.sqrt(np.sum(w * np.abs(fh) ** 2))

    return float(norm(a - b) / norm(b))


def least_squares_slope(xs, errs) -> float:
    """Slope of log(err) against log(x) (x = dt or grid spacing)."""
    xs = np.log(np.asarray(xs, dtype=float))
    errs = np.log(np.asarray(errs, dtype=float))
    return float(np.polyfit(xs, errs, 1)[0])


def _final_state(cfg: ExperimentConfig, setup: ProblemSetup, model, dt: float,
                 t_end: float, ntau: int):
    """Run cfg.scheme to t_end; returns (phi, fp_max)."""
    if cfg.scheme == "strang_ref":
        return run_reference(model, setup.phi0, t_end, dt), 0
    res = run_simulation(model, TauGrid(ntau), cfg.scheme, dt, t_end,
                         phi0=setup.phi0, tableau_variant=cfg.tableau_variant,
                         h3_mixed_term=cfg.h3_mixed_term)
    return res.phi, res.fp_max


def _map_points(cfg: ExperimentConfig, fn, points):
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(fn, points))
    return [fn(p) for p in points]


def run_convergence_study(cfg: ExperimentConfig, kind: str = "time") -> list[dict]:
    """Sweep dt (kind="time"), Nx ("space") or Ntau ("tau") per eps.

    Returns the rows as dicts and, when cfg.out_dir is set, writes
    convergence_<kind>_<problem>_<scheme>.csv.
    """
    if kind not in ("time", "space", "tau"):
        raise ConfigurationError(f"unknown sweep kind {kind!r}")
    if kind == "tau" and cfg.scheme == "strang_ref":
        raise ConfigurationError("the splitting reference has no tau resolution")

    rows = []
    for eps in cfg.eps:
        rows.extend(_sweep_one_eps(cfg, kind, eps))

    if cfg.out_dir:
        path = os.path.join(cfg.out_dir,
                            f"convergence_{kind}_{cfg.problem}_{cfg.scheme}.csv")
        write_csv(path, CONV_HEADER, [[r[k] for k in CONV_HEADER] for r in rows])
    return rows


def _sweep_one_eps(cfg: ExperimentConfig, kind: str, eps: float) -> list[dict]:
    base = build_setup(cfg)

    def make_row(dt, nx, ntau):
        return {"problem": cfg.problem, "scheme": cfg.scheme, "kind": kind,
                "eps": eps, "dt": dt, "nx": nx, "ntau": ntau, "t_end": cfg.t_end,
                "err_linf": "", "err_h1": "", "observed_order": "",
                "runtime_s": "", "fp_max": "", "status": "ok"}

    # reference state (on the fine grid for space sweeps)
    try:
        if kind == "time":
            ref_setup = base
            ref_grid = base.grid
            model = ref_setup.model_for(eps)
            if cfg.reference == "exact":
                if base.exact is None:
                    raise ConfigurationError(f"no closed form for {cfg.problem}")
                ref = base.exact(eps, cfg.t_end)
            elif cfg.reference == "strang":
                ref = run_reference(model, ref_setup.phi0, cfg.t_end, cfg.dt_ref)
            else:
                dt_fine = min(cfg.dt) / cfg.ref_refine
                ref, _ = _final_state(cfg, ref_setup, model, dt_fine,
                                      cfg.t_end, ref_setup.ntau)
        elif kind == "space":
            ref_setup = build_setup(cfg, nx=cfg.nx_ref)
            ref_grid = ref_setup.grid
            ntau_fixed = max(base.ntau, 64)
            ref, _ = _final_state(cfg, ref_setup, ref_setup.model_for(eps),
                                  cfg.sweep_dt, cfg.t_end, ntau_fixed)
        else:
            ref_setup = build_setup(cfg, ntau=cfg.ntau_ref)
            ref_grid = ref_setup.grid
            ref, _ = _final_state(cfg, ref_setup, ref_setup.model_for(eps),
                                  cfg.sweep_dt, cfg.t_end, cfg.ntau_ref)
    except _FAILURES as exc:
        row = make_row("", "", "")
        row["status"] = f"reference failed: {exc}"
        return [row]

    if kind == "time":
        points = [(dt, base.grid.shape[0], base.ntau) for dt in
                  sorted(cfg.dt, reverse=True)]
    elif kind == "space":
        points = [(cfg.sweep_dt, nx, max(base.ntau, 64)) for nx in cfg.nx_list]
    else:
        points = [(cfg.sweep_dt, base.grid.shape[0], nt) for nt in cfg.ntau_list]

    def run_point(point):
        dt, nx, ntau = point
        row = make_row(dt, nx, ntau)
        t0 = time.perf_counter()
        try:
            if kind == "space":
                setup = build_setup(cfg, nx=nx)
                if cfg.nx_ref % nx:
                    raise ConfigurationError(f"nx_ref={cfg.nx_ref} not a multiple of {nx}")
                stride = cfg.nx_ref // nx
                sl = (slice(None),) + (slice(None, None, stride),) * setup.grid.ndim
                target = ref[sl]
            else:
                setup = build_setup(cfg, ntau=ntau) if kind == "tau" else base
                target = ref
            phi, fp_max = _final_state(cfg, setup, setup.model_for(eps), dt,
                                       cfg.t_end, ntau)
            row["err_linf"] = rel_linf(phi, target)
            row["err_h1"] = rel_h1(setup.grid, phi, target)
            row["fp_max"] = fp_max
        except _FAILURES as exc:
            row["status"] = f"failed: {exc}"
        row["runtime_s"] = time.perf_counter() - t0
        return row

    rows = _map_points(cfg, run_point, points)

    # observed order from consecutive points: resolution enters via spacing
    prev = None
    for row in rows:
        if row["status"] == "ok" and row["err_linf"]:
            h = row["dt"] if kind == "time" else 1.0 / (row["nx"] if kind == "space" else row["ntau"])
            if prev is not None and row["err_linf"] > 0 and prev[1] > 0:
                row["observed_order"] = float(np.log(prev[1] / row["err_linf"])
                                              / np.log(prev[0] / h))
            prev = (h, row["err_linf"])
    return rows


def _resonance_columns(dt: float, eps: float, ntau: int) -> tuple[float, float, float, int]:
    ell = np.arange(1, ntau // 2 + 1, dtype=float)
    min_sin = float(np.min(np.abs(np.sin(0.5 * dt * ell / (eps * eps)))))
    sqrt_eps = float(np.sqrt(eps))
    return min_sin, sqrt_eps, dt / sqrt_eps, int(min_sin < sqrt_eps)


def run_conservation_study(cfg: ExperimentConfig) -> tuple[list[dict], list[dict]]:
    """Mass/energy drift series over t in [0, t_end] at dt = cfg.dt[0].

    Returns (series_rows, summary_rows); writes two CSVs when out_dir is
    set.  The trend columns are least-squares slopes of the drift vs t,
    the quantity that separates bounded oscillation from linear growth.
    """
    dt = cfg.dt[0]
    setup = build_setup(cfg)
    series: list[dict] = []
    summary: list[dict] = []

    for eps in cfg.eps:
        model = setup.model_for(eps)
        t0 = time.perf_counter()
        srow = {"problem": cfg.problem, "scheme": cfg.scheme, "eps": eps, "dt": dt,
                "t_end": cfg.t_end, "max_err_h": "", "max_err_m": "",
                "trend_h": "", "trend_m": "", "fp_max": "",
                "min_sin_half_dt_omega": "", "sqrt_eps": "", "dt_over_sqrt_eps": "",
                "resonance_flag": "", "runtime_s": "", "status": "ok"}
        (srow["min_sin_half_dt_omega"], srow["sqrt_eps"],
         srow["dt_over_sqrt_eps"], srow["resonance_flag"]) = \
            _resonance_columns(dt, eps, setup.ntau)
        try:
            ts, hs, ms, fp_max = _diag_series(cfg, setup, model, dt, eps)
            err_h = np.abs(hs - hs[0]) / abs(hs[0])
            err_m = np.abs(ms - ms[0]) / abs(ms[0])
            for t, eh, em in zip(ts, err_h, err_m):
                series.append({"problem": cfg.problem, "scheme": cfg.scheme,
                               "eps": eps, "dt": dt, "t": t,
                               "err_h": float(eh), "err_m": float(em)})
            srow["max_err_h"] = float(np.max(err_h))
            srow["max_err_m"] = float(np.max(err_m))
            srow["trend_h"] = float(np.polyfit(ts, err_h, 1)[0])
            srow["trend_m"] = float(np.polyfit(ts, err_m, 1)[0])
            srow["fp_max"] = fp_max
        except _FAILURES as exc:
            srow["status"] = f"failed: {exc}"
        srow["runtime_s"] = time.perf_counter() - t0
        summary.append(srow)

    if cfg.out_dir:
        stem = os.path.join(cfg.out_dir, f"conservation_{cfg.problem}_{cfg.scheme}")
        write_csv(stem + "_series.csv", SERIES_HEADER,
                  [[r[k] for k in SERIES_HEADER] for r in series])
        write_csv(stem + "_summary.csv", SUMMARY_HEADER,
                  [[r[k] for k in SUMMARY_HEADER] for r in summary])
    return series, summary


def _diag_series(cfg: ExperimentConfig, setup: ProblemSetup, model, dt: float,
                 eps: float):
    if cfg.scheme == "strang_ref":
        n = int(round(cfg.t_end / dt))
        phi = setup.phi0.astype(complex)
        ts = [0.0]
        hs = [energy(model, phi)]
        ms = [mass(model.grid, phi)]
        for k in range(n):
            phi = strang_step(model, phi, dt)
            if (k + 1) % cfg.diag_stride == 0 or k + 1 == n:
                ts.append((k + 1) * dt)
                hs.append(energy(model, phi))
                ms.append(mass(model.grid, phi))
        return np.asarray(ts), np.asarray(hs), np.asarray(ms), 0
    res = run_simulation(model, TauGrid(setup.ntau), cfg.scheme, dt, cfg.t_end,
                         phi0=setup.phi0, diag_stride=cfg.diag_stride,
                         tableau_variant=cfg.tableau_variant,
                         h3_mixed_term=cfg.h3_mixed_term)
    return res.diag_times, res.energy, res.mass, res.fp_max


def _count_humps(rho: np.ndarray) -> int:
    """Strict interior local maxima above a tenth of the global peak."""
    big = rho > 0.1 * np.max(rho)
    up = np.r_[False, rho[1:] > rho[:-1]]
    down = np.r_[rho[:-1] > rho[1:], False]
    return int(np.sum(up & down & big))


def run_dynamics(cfg: ExperimentConfig) -> list[dict]:
    """Evolve each eps and write density snapshots plus an index CSV.

    Snapshot times default to eleven evenly spaced times in [0, t_end]
    (snapped to step multiples).  The index carries per-snapshot mass and,
    in 1D, the density peak location and hump count used by the
    wave-tracking checks.
    """
    dt = cfg.dt[0]
    setup = build_setup(cfg)
    grid = setup.grid
    if cfg.snapshot_times:
        snap_times = list(cfg.snapshot_times)
    else:
        n = int(round(cfg.t_end / dt))
        snap_times = sorted({round(i * n / 10) * dt for i in range(11)})
    rows: list[dict] = []

    for eps in cfg.eps:
        model = setup.model_for(eps)
        if cfg.scheme == "strang_ref":
            snaps = _strang_snapshots(model, setup.phi0, dt, cfg.t_end, snap_times)
        else:
            res = run_simulation(model, TauGrid(setup.ntau), cfg.scheme, dt,
                                 cfg.t_end, phi0=setup.phi0, diag_stride=0,
                                 snapshot_times=snap_times,
                                 tableau_variant=cfg.tableau_variant,
                                 h3_mixed_term=cfg.h3_mixed_term)
            snaps = res.snapshots
        for t, phi in snaps:
            rho1 = np.abs(phi[0]) ** 2
            rho2 = np.abs(phi[1]) ** 2
            name = f"dyn_{cfg.problem}_{cfg.scheme}_eps{eps:g}_t{t:012.6f}.snap"
            if cfg.out_dir:
                write_snapshot(os.path.join(cfg.out_dir, name), grid, t, rho1, rho2)
            rho = rho1 + rho2
            row = {"problem": cfg.problem, "scheme": cfg.scheme, "eps": eps,
                   "dt": dt, "t": t, "file": name,
                   "mass": grid.cell_volume * float(np.sum(rho)),
                   "peak_x": "", "n_humps": ""}
            if grid.ndim == 1:
                row["peak_x"] = float(grid.x[0][int(np.argmax(rho))])
                row["n_humps"] = _count_humps(rho)
            rows.append(row)

    if cfg.out_dir:
        path = os.path.join(cfg.out_dir, f"dynamics_{cfg.problem}_{cfg.scheme}_index.csv")
        write_csv(path, DYN_HEADER, [[r[k] for k in DYN_HEADER] for r in rows])
    return rows


def _strang_snapshots(model, phi0, dt, t_end, snap_times):
    n = int(round(t_end / dt))
    snap_at = {int(round(t / dt)): t for t in snap_times}
    phi = phi0.astype(complex)
    out = []
    if 0 in snap_at:
        out.append((0.0, phi.copy()))
    for k in range(n):
        phi = strang_step(model, phi, dt)
        if k + 1 in snap_at:
            out.append((snap_at[k + 1], phi.copy()))
    return out
