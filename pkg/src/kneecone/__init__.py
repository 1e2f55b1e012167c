"""Knee-point multi-objective evolutionary optimization via cone domination.

The library provides a generational evolutionary engine in three flavours
(plain Pareto ranking, fixed-angle cone ranking, and self-adaptive cone
ranking driven by a golden-section search), quality indicators, benchmark
problems, and a batch experiment harness with a CLI front end.
"""

from kneecone.core import Bounds, Fitness, Individual, bounds_init, bounds_update, normalize
from kneecone.dominance import (
    ConeParams,
    assign_front_ranks,
    cone_coefficient,
    cone_dominates,
    cone_value,
    knee_front,
    pareto_dominates,
)
from kneecone.engine import AlgorithmConfig, RunRecord, run

__all__ = [
    "AlgorithmConfig",
    "Bounds",
    "ConeParams",
    "Fitness",
    "Individual",
    "RunRecord",
    "assign_front_ranks",
    "bounds_init",
    "bounds_update",
    "cone_coefficient",
    "cone_dominates",
    "cone_value",
    "knee_front",
    "normalize",
    "pareto_dominates",
    "run",
]

__version__ = "0.1.0"
