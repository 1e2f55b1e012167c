"""Pareto and cone domination, knee-front extraction, and front ranking.

Cone domination compares solutions through linearly mixed objectives

    omega_i(f) = f_i + c * sum_{j != i} f_j,      c = tan((theta - 90) / 2)

on normalized objective vectors. At theta = 90 the mix coefficient is 0 and
the relation collapses to plain Pareto dominance; at theta = 180 it collapses
to an equal-weight sum, i.e. single-objective comparison. Angles in between
enlarge each point's dominated region, which thins the non-dominated front
down to the knee regions.

Constrained problems are handled by layering a feasibility comparison in
front of the cone check: a solution satisfying more constraints dominates one
satisfying fewer, regardless of objectives. On unconstrained problems the
layer is inert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from kneecone.core import Bounds, Population, normalize, normalize_many, objectives_matrix

THETA_MIN = 90.0
THETA_MAX = 180.0


def cone_coefficient(theta: float) -> float:
    """Off-diagonal mixing coefficient tan((theta - 90) / 2) for angle theta in degrees."""
    if not THETA_MIN <= theta <= THETA_MAX:
        raise ValueError(f"cone angle must be in [{THETA_MIN}, {THETA_MAX}], got {theta}")
    if theta == THETA_MAX:
        return 1.0  # tan(45 degrees), exact
    return math.tan(math.radians((theta - THETA_MIN) / 2.0))


@dataclass(frozen=True)
class ConeParams:
    """A symmetric cone angle (degrees) with its derived mixing coefficient."""

    theta: float
    coeff: float

    @classmethod
    def from_angle(cls, theta: float) -> "ConeParams":
        return cls(theta=theta, coeff=cone_coefficient(theta))


PARETO = ConeParams(theta=90.0, coeff=0.0)


def cone_value(x_norm: Sequence[float], i: int, c: ConeParams) -> float:
    """omega_i of a normalized objective vector: own axis plus the mixed others."""
    x = np.asarray(x_norm, dtype=float)
    return float(x[i] + c.coeff * (x.sum() - x[i]))


def cone_values(points: np.ndarray, coeff: float) -> np.ndarray:
    """All omega_i for every row of an (n, m) matrix of normalized objectives."""
    points = np.asarray(points, dtype=float)
    return (1.0 - coeff) * points + coeff * points.sum(axis=1, keepdims=True)


def pareto_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff a is no worse on every objective and strictly better on one."""
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if a_arr.shape != b_arr.shape:
        raise ValueError("objective vectors must have equal length")
    return bool(np.all(a_arr <= b_arr) and np.any(a_arr < b_arr))


def cone_dominates(a, b, c: ConeParams, bounds: Bounds) -> bool:
    """True iff a cone-dominates b under angle ``c.theta``, after normalization.

    Accepts Individuals or raw objective vectors.
    """
    fa = a.fitness.objectives if hasattr(a, "fitness") else np.asarray(a, dtype=float)
    fb = b.fitness.objectives if hasattr(b, "fitness") else np.asarray(b, dtype=float)
    xa = normalize(fa, bounds)
    xb = normalize(fb, bounds)
    oa = cone_values(xa[None, :], c.coeff)[0]
    ob = cone_values(xb[None, :], c.coeff)[0]
    return bool(np.all(oa <= ob) and np.any(oa < ob))


def domination_matrix(
    points_norm: np.ndarray,
    coeff: float,
    constraints_satisfied: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Boolean matrix D with D[i, j] true iff solution i dominates solution j.

    Feasibility is layered first when constraint counts are given: a higher
    count dominates outright; equal counts fall through to cone domination.
    """
    omega = cone_values(points_norm, coeff)
    le = np.all(omega[:, None, :] <= omega[None, :, :], axis=2)
    lt = np.any(omega[:, None, :] < omega[None, :, :], axis=2)
    dom = le & lt
    if constraints_satisfied is not None:
        sat = np.asarray(constraints_satisfied)
        more = sat[:, None] > sat[None, :]
        same = sat[:, None] == sat[None, :]
        dom = more | (same & dom)
    return dom


def _population_matrix(s: Population, bounds: Bounds):
    points = normalize_many(objectives_matrix(s), bounds)
    sat = np.array([ind.fitness.constraints_satisfied for ind in s], dtype=int)
    sat_arg = sat if len(sat) and sat.max() != sat.min() else None
    return points, sat_arg


def knee_front(s: Population, c: ConeParams, bounds: Bounds) -> Population:
    """Members of ``s`` not cone-dominated by any other member (set semantics)."""
    if not s:
        return []
    points, sat = _population_matrix(s, bounds)
    dom = domination_matrix(points, c.coeff, sat)
    nondominated = ~dom.any(axis=0)
    return [ind for ind, keep in zip(s, nondominated) if keep]


@dataclass
class RankedFronts:
    """Population partitioned by non-cone-domination level; fronts[0] is rank 1."""

    fronts: List[Population]

    def __iter__(self):
        return iter(self.fronts)

    def __len__(self) -> int:
        return len(self.fronts)


def assign_front_ranks(s: Population, c: ConeParams, bounds: Bounds) -> RankedFronts:
    """Peel successive knee fronts off the population and stamp ranks 1, 2, ...

    Each member's ``fitness.rank`` is set as a side effect.
    """
    if not s:
        return RankedFronts(fronts=[])
    points, sat = _population_matrix(s, bounds)
    dom = domination_matrix(points, c.coeff, sat)
    remaining = np.ones(len(s), dtype=bool)
    fronts: List[Population] = []
    rank = 1
    while remaining.any():
        dominated = dom[remaining].any(axis=0) & remaining
        front_mask = remaining & ~dominated
        if not front_mask.any():
            # cannot happen for a strict partial order; guard against cycles
            front_mask = remaining
        front = [s[i] for i in np.flatnonzero(front_mask)]
        for ind in front:
            ind.fitness.rank = rank
        fronts.append(front)
        remaining &= ~front_mask
        rank += 1
    return RankedFronts(fronts=fronts)
