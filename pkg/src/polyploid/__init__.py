"""Polyploid multi-objective evolutionary optimization with partial dominance.

The package bundles the d-ploid algorithm, an NSGA-II baseline, the DTLZ1-4
test problems, the convergence/diversity running metrics and a small
benchmark harness (``python -m polyploid``).
"""

from polyploid.core import (
    Individual,
    dominates,
    domination_count,
    make_rng,
    nondominated_indices,
)
from polyploid.problems import ProblemSpec, evaluate, front_distance
from polyploid.variation import VariationParams
from polyploid.polyploid_ea import EaConfig, RunRecord, run
from polyploid.nsga2 import run_nsga2

__all__ = [
    "EaConfig",
    "Individual",
    "ProblemSpec",
    "RunRecord",
    "VariationParams",
    "dominates",
    "domination_count",
    "evaluate",
    "front_distance",
    "make_rng",
    "nondominated_indices",
    "run",
    "run_nsga2",
]

__version__ = "0.1.0"
