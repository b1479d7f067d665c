"""Darcy flow through random permeable media: annealed and finite-volume
pressure solvers with ensemble pressure/flow statistics."""

__version__ = "0.1.0"

from .grid import BoundaryConditions, GridSpec, delinearize, faces, linearize, locate
from .darcy import (
    PressureState,
    ScalarField,
    Transmissibilities,
    action,
    cell_velocities,
    face_flux,
    local_action_delta,
    local_minimizer,
    residual,
    transmissibilities,
)
from .randfield import CovarianceSpec, EmbeddingPlan, exponentiate, plan_embedding, sample_log_field
from .anneal import AnnealConfig, AnnealTrace, solve
from .fvm import LinearSystem, assemble, reference_solution, solve_linear
from .config import RunConfig, parse_config
from .runner import RunManifest, flop_report, run

__all__ = [
    "AnnealConfig", "AnnealTrace", "BoundaryConditions", "CovarianceSpec",
    "EmbeddingPlan", "GridSpec", "LinearSystem", "PressureState", "RunConfig",
    "RunManifest", "ScalarField", "Transmissibilities", "action", "assemble",
    "cell_velocities", "delinearize", "exponentiate", "face_flux", "faces",
    "flop_report", "linearize", "local_action_delta", "local_minimizer",
    "locate", "parse_config", "plan_embedding", "reference_solution",
    "residual", "run", "sample_log_field", "solve", "solve_linear",
    "transmissibilities",
]
