"""Monte Carlo simulation of photon absorption as amplitude diffusion."""
from .amplitudes import (AbsorptionOutcome, DiffusionCoordinates, EntangledAmplitudes,
                         binary_expansion, from_diffusion, to_diffusion)
from .diffusion import DiffusionParams, TrajectoryRecord, run_to_absorption, simulate
from .experiments import ExperimentReport, ScenarioConfig

__all__ = [
    "AbsorptionOutcome", "DiffusionCoordinates", "EntangledAmplitudes",
    "binary_expansion", "from_diffusion", "to_diffusion",
    "DiffusionParams", "TrajectoryRecord", "run_to_absorption", "simulate",
    "ExperimentReport", "ScenarioConfig",
]
__version__ = "0.1.0"
