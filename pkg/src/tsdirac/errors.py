"""Error taxonomy shared across the package.

Configuration problems (bad grids, malformed configs, out-of-range
parameters) raise ConfigurationError; mismatched array layouts raise
ShapeError; quantities that must come out real/consistent but do not raise
ConsistencyError; time-stepping failures (fixed point not contracting)
raise StepError.  The CLI maps ConfigurationError to exit code 2 and the
runtime errors to exit code 3.
"""

from __future__ import annotations

__all__ = ["ConfigurationError", "ShapeError", "ConsistencyError", "StepError"]


class ConfigurationError(ValueError):
    """Invalid configuration: grid sizes, domains, parameters, config files."""


class ShapeError(ValueError):
    """Array layout does not match the grid it is claimed to live on."""


class ConsistencyError(RuntimeError):
    """A numerically-checked identity failed beyond tolerance."""


class StepError(RuntimeError):
    """A time step could not be completed (e.g. implicit solve diverged)."""
