"""Noisy voter dynamics on graphs: simulation, influence measurement,
line-chain analytics, channel capacity and Gramian diagnostics."""

from .channel import ChannelSpec, capacity, error_probability
from .dynamics import ForcingPlan, NoiseResponse, StateTrajectory, simulate, step
from .ensemble import EnsembleSpec, EnsembleSummary, precision, run_ensemble
from .infotheory import (
    delayed_multi_information,
    delayed_mutual_information,
    mutual_information_profile,
)
from .meanfield import MeanFieldSystem, control_length, mean_density, stationary
from .topology import Graph, load_graph, make_line, make_scale_free, save_graph

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "EnsembleSpec",
    "EnsembleSummary",
    "ForcingPlan",
    "Graph",
    "MeanFieldSystem",
    "NoiseResponse",
    "StateTrajectory",
    "__version__",
    "capacity",
    "control_length",
    "delayed_multi_information",
    "delayed_mutual_information",
    "error_probability",
    "load_graph",
    "make_line",
    "make_scale_free",
    "mean_density",
    "mutual_information_profile",
    "precision",
    "run_ensemble",
    "save_graph",
    "simulate",
    "stationary",
    "step",
]
