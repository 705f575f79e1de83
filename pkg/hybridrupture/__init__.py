from .models.materials import ElasticMaterial, RegionSpec, derive_wavespeeds
from .models.grid import StructuredGrid, build_grid, assign_regions
from .models.friction import SlipWeakeningLaw, NucleationPatch, FrictionOverride, Prestress
from .models.scenario import Scenario, FaultSpec, Station
from .core.env_handler import EnvHandler
from .core.coupler import HybridSolver, hybrid_step
from .core.sbim import sbim_fault_solver
from .core.scenarios import PRESETS, build_preset, strength_ratio, validate_scenario
from .core.config import RunConfig
from .core.simulation_handler import SimulationHandler, RunArtifacts, run
from .core.harness import converge, bench, strip_study, error_vs_time
from .core.plotting import plot
from .core.utils import Path, parse_message


__all__ = [
    "ElasticMaterial",
    "RegionSpec",
    "derive_wavespeeds",
    "StructuredGrid",
    "build_grid",
    "assign_regions",
    "SlipWeakeningLaw",
    "NucleationPatch",
    "FrictionOverride",
    "Prestress",
    "Scenario",
    "FaultSpec",
    "Station",
    "EnvHandler",
    "HybridSolver",
    "hybrid_step",
    "sbim_fault_solver",
    "PRESETS",
    "build_preset",
    "strength_ratio",
    "validate_scenario",
    "RunConfig",
    "SimulationHandler",
    "RunArtifacts",
    "run",
    "converge",
    "bench",
    "strip_study",
    "error_vs_time",
    "plot",
    "Path",
    "parse_message"
]
