"""Uniformly accurate two-scale exponential integrators for Dirac-type systems."""

from .errors import ConfigurationError, ConsistencyError, ShapeError, StepError
from .model import (ModelSpec, energy, g_eval, make_model, mass,
                    sample_named_field, soliton_state)
from .spectral import (SpatialGrid, apply_dirac_operator, apply_free_flow,
                       apply_projector_pair, build_grid, dirac_symbols,
                       from_modes, to_modes)
from .stepper import (SimulationResult, assemble_theta,
                      reconstruct_physical_solution, run_simulation, step)
from .strang import run_reference, strang_step
from .tableaux import SCHEMES, Tableau, build_tableau, phi_eval
from .twoscale import (TauGrid, chapman_enskog_h, g_big, preparation_level,
                       prepare_initial_data)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "ConsistencyError", "ShapeError", "StepError",
    "ModelSpec", "energy", "g_eval", "make_model", "mass",
    "sample_named_field", "soliton_state",
    "SpatialGrid", "apply_dirac_operator", "apply_free_flow",
    "apply_projector_pair", "build_grid", "dirac_symbols",
    "from_modes", "to_modes",
    "SimulationResult", "assemble_theta", "reconstruct_physical_solution",
    "run_simulation", "step",
    "run_reference", "strang_step",
    "SCHEMES", "Tableau", "build_tableau", "phi_eval",
    "TauGrid", "chapman_enskog_h", "g_big", "preparation_level",
    "prepare_initial_data",
    "__version__",
]
