"""Accelerated gradient descent over noisy fading multiple-access channels."""

from .algorithms import Algorithm, AlgorithmConfig, monte_carlo, run
from .channel import ChannelModel
from .problems import Family, NodeDataset, ProblemInstance, compute_constants

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "AlgorithmConfig",
    "ChannelModel",
    "Family",
    "NodeDataset",
    "ProblemInstance",
    "compute_constants",
    "monte_carlo",
    "run",
]
