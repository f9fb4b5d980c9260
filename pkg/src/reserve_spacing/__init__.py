"""Optimal spacing of two marine reserves under colonisation and shared catastrophes."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateEigenvectorError,
    IncompatibleObjectiveError,
    InvalidParameterError,
    IrreducibilityError,
    ReserveSpacingError,
    StructureError,
)
from .model import (
    ModelParams,
    ModelVariant,
    colonisation_matrix,
    compose,
    extinction_matrix,
    local_extinction_matrix,
    recruitment_matrix,
    step_distribution,
)
from .simulate import (
    SimConfig,
    SimulationEstimate,
    StationaryEstimate,
    estimate_stationary,
    estimate_survival,
    simulate_step,
)
from .spacing import (
    ObjectiveKind,
    ObjectiveSpec,
    SpacingOptimum,
    objective,
    optimize_spacing,
    sweep,
)
from .spectral import (
    SpectralSummary,
    StationarySummary,
    decay_rate,
    second_eigenvalue,
    stationary_distribution,
    survival_probability,
)

__all__ = [
    "ConfigError",
    "DegenerateEigenvectorError",
    "IncompatibleObjectiveError",
    "InvalidParameterError",
    "IrreducibilityError",
    "ModelParams",
    "ModelVariant",
    "ObjectiveKind",
    "ObjectiveSpec",
    "ReserveSpacingError",
    "SimConfig",
    "SimulationEstimate",
    "SpacingOptimum",
    "SpectralSummary",
    "StationaryEstimate",
    "StationarySummary",
    "StructureError",
    "colonisation_matrix",
    "compose",
    "decay_rate",
    "estimate_stationary",
    "estimate_survival",
    "extinction_matrix",
    "local_extinction_matrix",
    "objective",
    "optimize_spacing",
    "recruitment_matrix",
    "second_eigenvalue",
    "simulate_step",
    "stationary_distribution",
    "step_distribution",
    "survival_probability",
    "sweep",
]
