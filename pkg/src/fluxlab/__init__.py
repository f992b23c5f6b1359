"""Numerical laboratory for BCS-paired lattice fermions coupled to
classical U(1) gauge fields, verified by sector-blocked exact
diagonalization on small periodic lattices."""

from .anneal import AnnealConfig, AnnealResult, ObjectiveEvaluator, objective, run_anneal
from .config import RunConfig, parse_config
from .errors import (
    ConfigError,
    DegenerateToleranceAmbiguity,
    DimensionTooSmall,
    FluxlabError,
    InvalidPath,
    NotBlockDiagonal,
    SizeExceedsCap,
    UnknownLabel,
)
from .experiments import (
    CorrelationReport,
    GroundEnergyReport,
    TheoremReport,
    check_covariance,
    check_ground_energy,
    check_theorem1,
    cooper_correlation,
    gauge_sample_study,
    orbit_average,
    string_correlation,
    string_suite,
)
from .gauge import GaugeField, SitePhases, compose, decompose, flux, flux_all
from .lattice import Lattice, build_lattice
from .model import HamiltonianBundle, ModelParams, build_fermionic, build_full
from .spectral import (
    SpectralData,
    diagonalize,
    ground_expectation,
    partition_function,
    thermal_expectation,
)
from .transforms import IDENTITY_KINDS, identity_suite, verify_identity

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig",
    "AnnealResult",
    "ConfigError",
    "CorrelationReport",
    "DegenerateToleranceAmbiguity",
    "DimensionTooSmall",
    "FluxlabError",
    "GaugeField",
    "GroundEnergyReport",
    "HamiltonianBundle",
    "IDENTITY_KINDS",
    "InvalidPath",
    "Lattice",
    "ModelParams",
    "NotBlockDiagonal",
    "ObjectiveEvaluator",
    "RunConfig",
    "SitePhases",
    "SizeExceedsCap",
    "SpectralData",
    "TheoremReport",
    "UnknownLabel",
    "__version__",
    "build_fermionic",
    "build_full",
    "build_lattice",
    "check_covariance",
    "check_ground_energy",
    "check_theorem1",
    "compose",
    "cooper_correlation",
    "decompose",
    "diagonalize",
    "flux",
    "flux_all",
    "gauge_sample_study",
    "ground_expectation",
    "identity_suite",
    "objective",
    "orbit_average",
    "parse_config",
    "partition_function",
    "run_anneal",
    "string_correlation",
    "string_suite",
    "thermal_expectation",
    "verify_identity",
]
