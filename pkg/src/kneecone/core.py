"""Shared domain types and the running objective-normalization bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np


@dataclass
class Fitness:
    """Evaluated quality of an individual: objective values plus constraint bookkeeping.

    ``rank`` and ``sparsity`` are filled in by environmental selection and are
    unset right after evaluation.
    """

    objectives: np.ndarray
    constraints_satisfied: int = 0
    constraints_total: int = 0
    rank: Optional[int] = None
    sparsity: Optional[float] = None

    def __post_init__(self) -> None:
        self.objectives = np.asarray(self.objectives, dtype=float)
        if self.objectives.ndim != 1:
            raise ValueError("objectives must be a flat vector")
        if not np.all(np.isfinite(self.objectives)):
            raise ValueError(f"non-finite objective values: {self.objectives}")
        if not 0 <= self.constraints_satisfied <= self.constraints_total:
            raise ValueError(
                f"constraint counts out of range: "
                f"{self.constraints_satisfied}/{self.constraints_total}"
            )

    @property
    def feasible(self) -> bool:
        return self.constraints_satisfied == self.constraints_total

    def copy(self) -> "Fitness":
        return Fitness(
            self.objectives.copy(),
            self.constraints_satisfied,
            self.constraints_total,
            self.rank,
            self.sparsity,
        )


@dataclass
class Individual:
    """A candidate solution: problem-specific genome plus (once evaluated) a Fitness."""

    genome: object
    fitness: Optional[Fitness] = None

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


# A population is an ordered sequence of individuals sharing one problem.
Population = List[Individual]


@dataclass
class Bounds:
    """Running per-objective extremes used to normalize objectives into [0, 1]."""

    max_p: np.ndarray
    min_p: np.ndarray

    @property
    def m(self) -> int:
        return self.max_p.shape[0]


def bounds_init(m: int, upper: Sequence[float]) -> Bounds:
    """Start the tracker: maxima at zero, minima at the problem's upper bound vector.

    The upper bounds are deliberately far above typical objective values, so the
    first observed point immediately replaces both extremes.
    """
    upper_arr = np.asarray(upper, dtype=float)
    if upper_arr.shape != (m,):
        raise ValueError(f"upper bounds must have length {m}, got shape {upper_arr.shape}")
    if not np.all(upper_arr > 0):
        raise ValueError("upper bounds must be positive")
    return Bounds(max_p=np.zeros(m), min_p=upper_arr.copy())


def bounds_update(b: Bounds, f: Sequence[float]) -> Bounds:
    """Fold one objective vector into the running element-wise extremes."""
    f_arr = np.asarray(f, dtype=float)
    if f_arr.shape != (b.m,):
        raise ValueError(f"objective vector must have length {b.m}")
    if not np.all(np.isfinite(f_arr)):
        raise ValueError(f"non-finite objective vector: {f_arr}")
    return Bounds(max_p=np.maximum(b.max_p, f_arr), min_p=np.minimum(b.min_p, f_arr))


def normalize(f: Sequence[float], b: Bounds) -> np.ndarray:
    """Map an objective vector into [0, 1]^m using the observed extremes.

    A degenerate axis (max == min) maps to 0 so constant objectives in early
    generations do not stall the run.
    """
    f_arr = np.asarray(f, dtype=float)
    span = b.max_p - b.min_p
    out = np.zeros_like(f_arr)
    nz = span > 0
    out[nz] = (f_arr[nz] - b.min_p[nz]) / span[nz]
    return out


def normalize_many(points: np.ndarray, b: Bounds) -> np.ndarray:
    """Vectorized :func:`normalize` for an (n, m) matrix of objective vectors."""
    points = np.asarray(points, dtype=float)
    span = b.max_p - b.min_p
    safe = np.where(span > 0, span, 1.0)
    out = (points - b.min_p) / safe
    out[:, span <= 0] = 0.0
    return out


def objectives_matrix(pop: Population) -> np.ndarray:
    """Stack a population's objective vectors into an (n, m) matrix."""
    return np.array([ind.fitness.objectives for ind in pop], dtype=float)
