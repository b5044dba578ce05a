from .config import (PROBLEMS, ExperimentConfig, ProblemSetup, build_setup,
                     config_from_dict, load_config)
from .io import read_csv, read_snapshot, write_csv, write_snapshot
from .studies import (least_squares_slope, rel_h1, rel_linf,
                      run_conservation_study, run_convergence_study,
                      run_dynamics)

__all__ = [
    "PROBLEMS", "ExperimentConfig", "ProblemSetup", "build_setup",
    "config_from_dict", "load_config",
    "read_csv", "read_snapshot", "write_csv", "write_snapshot",
    "least_squares_slope", "rel_h1", "rel_linf",
    "run_conservation_study", "run_convergence_study", "run_dynamics",
]
