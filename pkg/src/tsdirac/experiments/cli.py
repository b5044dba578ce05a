"""Command-line entry point.

    tsdirac converge-time  [--config cfg.json] [--out DIR] [--scheme S]
                           [--eps E ...] [--dt D ...] [--paper-scale]
    tsdirac converge-space ...
    tsdirac converge-tau   ...
    tsdirac conserve       ...
    tsdirac dynamics       ...
    tsdirac tableau-check  [--scheme S]

Exit codes: 0 success, 2 configuration error, 3 numerical failure (a sweep
point failed, a self-check tolerance was exceeded, or a run diverged).
Config files are JSON objects over the ExperimentConfig schema; command
line flags override file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from ..errors import ConfigurationError, ConsistencyError, StepError
from ..tableaux import SCHEMES, build_tableau, order_residuals, symmetry_defects
from .config import ExperimentConfig, config_from_dict, load_config
from .studies import run_conservation_study, run_convergence_study, run_dynamics

_STUDY_DEFAULTS = {
    "converge-time": {},
    "converge-space": {"eps": (1.0, 0.01)},
    "converge-tau": {"eps": (1.0, 0.01)},
    "conserve": {"eps": (0.5, 0.1), "dt": (0.05,), "t_end": 100.0, "diag_stride": 10},
    "dynamics": {"problem": "p2_soliton", "eps": (1.0,), "dt": (0.05,), "t_end": 10.0},
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsdirac", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in (*_STUDY_DEFAULTS, "tableau-check"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--paper-scale", action="store_true", default=None)
        p.add_argument("--scheme", choices=("sep_ts4", "eep_ts4", "strang_ref"))
        p.add_argument("--eps", type=float, nargs="+")
        p.add_argument("--dt", type=float, nargs="+")
    return ap


def _build_config(args) -> ExperimentConfig:
    if args.config:
        cfg = load_config(args.config)
        data = dataclasses.asdict(cfg)
    else:
        data = {}
    data = {**_STUDY_DEFAULTS.get(args.command, {}), **data}
    if args.scheme:
        data["scheme"] = args.scheme
    if args.eps:
        data["eps"] = tuple(args.eps)
    if args.dt:
        data["dt"] = tuple(args.dt)
    if args.out:
        data["out_dir"] = args.out
    if args.paper_scale:
        data["paper_scale"] = True
    return config_from_dict(data)


def _tableau_check(args) -> int:
    """Numerical self-check of both coefficient tables; prints residuals."""
    schemes = (args.scheme,) if args.scheme and args.scheme != "strang_ref" else SCHEMES
    z = 1j * np.linspace(-20.0, 20.0, 100)
    bad = False
    for scheme in schemes:
        tab = build_tableau(scheme)
        psi = order_residuals(tab, z, rho_max=4)
        worst123 = float(np.max(np.abs(psi[0:3])))
        print(f"{scheme}: max |Psi_1..3| on i[-20,20]: {worst123:.3e}")
        bad |= worst123 > 1e-12
        if tab.symmetric:
            psi4_0 = float(np.abs(order_residuals(tab, np.zeros(1))[3, 0]))
            psi4_1 = float(np.abs(order_residuals(tab, np.ones(1))[3, 0]))
            sym = symmetry_defects(tab, z)
            print(f"  Psi_4(0) = {psi4_0:.3e}   Psi_4(1) = {psi4_1:.10e}")
            print(f"  symmetry defects: {sym:.3e}")
            bad |= psi4_0 > 1e-14 or sym > 1e-12
        else:
            psi4 = float(np.max(np.abs(order_residuals(tab, np.zeros(1)))))
            print(f"  order conditions at z=0: {psi4:.3e}")
            bad |= psi4 > 1e-14
    return 3 if bad else 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "tableau-check":
            return _tableau_check(args)
        cfg = _build_config(args)
        if args.command.startswith("converge-"):
            kind = args.command.split("-", 1)[1]
            rows = run_convergence_study(cfg, kind)
            n_bad = sum(r["status"] != "ok" for r in rows)
            for r in rows:
                res = f"nx={r['nx']} ntau={r['ntau']} dt={r['dt']}"
                err = f"err_linf={r['err_linf']:.3e}" if r["err_linf"] != "" else r["status"]
                print(f"{r['problem']} {r['scheme']} eps={r['eps']} {res}: {err}")
            print(f"wrote {len(rows)} rows to {cfg.out_dir}")
            return 3 if n_bad else 0
        if args.command == "conserve":
            _, summary = run_conservation_study(cfg)
            n_bad = 0
            for r in summary:
                if r["status"] != "ok":
                    n_bad += 1
                    print(f"eps={r['eps']}: {r['status']}")
                else:
                    print(f"eps={r['eps']}: max_err_h={r['max_err_h']:.3e} "
                          f"max_err_m={r['max_err_m']:.3e} trend_h={r['trend_h']:.3e} "
                          f"resonance_flag={r['resonance_flag']}")
            print(f"wrote series/summary to {cfg.out_dir}")
            return 3 if n_bad else 0
        rows = run_dynamics(cfg)
        print(f"wrote {len(rows)} snapshots to {cfg.out_dir}")
        return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (StepError, ConsistencyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
