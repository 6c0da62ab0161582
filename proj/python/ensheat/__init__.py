"""Ensemble heat conduction with temperature-dependent conductivity.

Thin wrapper over the C++ core. Fields come back as numpy arrays; members
are rows.
"""

from ._core import (
    Conductivity,
    FactorizationError,
    FormatError,
    Mesh,
    ValidationError,
    __version__,
    convergence_rate,
    convergence_study,
    ensemble_size_study,
    factorization_count,
    manufactured_source,
    manufactured_temperature,
    perturbation_study,
    run_config,
    run_manufactured,
    run_printing,
    steady_state_analytic,
    steady_state_study,
)

__all__ = [
    "Conductivity",
    "FactorizationError",
    "FormatError",
    "Mesh",
    "ValidationError",
    "__version__",
    "convergence_rate",
    "convergence_study",
    "ensemble_size_study",
    "factorization_count",
    "manufactured_source",
    "manufactured_temperature",
    "perturbation_study",
    "run_config",
    "run_manufactured",
    "run_printing",
    "steady_state_analytic",
    "steady_state_study",
]
