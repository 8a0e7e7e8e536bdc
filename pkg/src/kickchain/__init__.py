"""Kicked spin-chain simulator.

Chains of N spin-1/2 particles with nearest-neighbor couplings, driven by
kick trains whose strengths and delays follow classical dynamics on a
torus.  The package computes the stroboscopic evolution and the disorder
observables it carries: entropies, coherences, populations, and Husimi
maps.
"""

__version__ = "0.1.0"

from .bath import BathKind, BathSpec, KickSchedule, TorusPoint, generate_schedule
from .chain import ChainConfig, Coupling, SpectralDecomp
from .experiments import ExperimentSpec, SweepResult, list_presets, make_preset, run_experiment
from .observables import HusimiGrid, ObservableRecord, chain_entropy, husimi, vn_entropy
from .propagator import PeriodKicks, Trajectory, evolve, iter_trajectory

__all__ = [
    "__version__",
    "BathKind", "BathSpec", "KickSchedule", "TorusPoint", "generate_schedule",
    "ChainConfig", "Coupling", "SpectralDecomp",
    "ExperimentSpec", "SweepResult", "list_presets", "make_preset", "run_experiment",
    "HusimiGrid", "ObservableRecord", "chain_entropy", "husimi", "vn_entropy",
    "PeriodKicks", "Trajectory", "evolve", "iter_trajectory",
]
