"""Environmental selection: archive truncation, sparsity, elitism, tournaments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from kneecone.core import Bounds, Individual, Population, normalize_many, objectives_matrix
from kneecone.dominance import ConeParams, assign_front_ranks


@dataclass(frozen=True)
class SelectionConfig:
    """Population size (lambda), elite count (mu), and tournament size."""

    population_size: int
    elite_count: int
    tournament_size: int = 2

    def __post_init__(self) -> None:
        if self.population_size <= 0 or self.elite_count <= 0 or self.tournament_size <= 0:
            raise ValueError("selection parameters must be positive")
        if self.elite_count >= self.population_size:
            raise ValueError("elite count must be smaller than the population size")


def assign_sparsity(front: Population, bounds: Bounds) -> Population:
    """Crowding-distance sparsity on normalized objectives, per front.

    Per objective the extreme members get +inf; interior members accumulate
    the normalized gap between their two neighbors.
    """
    if not front:
        return front
    points = normalize_many(objectives_matrix(front), bounds)
    n, m = points.shape
    sparsity = np.zeros(n)
    for axis in range(m):
        order = np.argsort(points[:, axis], kind="stable")
        sparsity[order[0]] = np.inf
        sparsity[order[-1]] = np.inf
        if n > 2:
            vals = points[order, axis]
            sparsity[order[1:-1]] += vals[2:] - vals[:-2]
    for ind, sp in zip(front, sparsity):
        ind.fitness.sparsity = float(sp)
    return front


def _crowded_key(ind: Individual):
    # rank ascending, sparsity descending
    return (ind.fitness.rank, -ind.fitness.sparsity)


def build_archive(
    s: Population, cfg: SelectionConfig, c: ConeParams, bounds: Bounds
) -> Population:
    """Rank and truncate a population down to exactly lambda members.

    Whole fronts are admitted while they fit; the front that would overflow is
    sorted by descending sparsity (stable) and cut. Undersized populations are
    returned intact with ranks and sparsity assigned (warm-up generations).
    """
    ranked = assign_front_ranks(s, c, bounds)
    for front in ranked:
        assign_sparsity(front, bounds)
    if len(s) <= cfg.population_size:
        return list(s)
    out: Population = []
    for front in ranked:
        room = cfg.population_size - len(out)
        if room <= 0:
            break
        if len(front) <= room:
            out.extend(front)
        else:
            by_sparsity = sorted(front, key=lambda ind: -ind.fitness.sparsity)
            out.extend(by_sparsity[:room])
    return out


def select_elites(s: Population, mu: int) -> Population:
    """The mu best members under (rank asc, sparsity desc); all of s if mu exceeds it."""
    ordered = sorted(s, key=_crowded_key)
    return ordered[: min(mu, len(s))]


def tournament_select(s: Population, k: int, rng: np.random.Generator) -> Individual:
    """Draw k members with replacement, return the best by (rank asc, sparsity desc)."""
    if not s:
        raise ValueError("cannot select from an empty population")
    draws = rng.integers(0, len(s), size=k)
    best = s[draws[0]]
    for idx in draws[1:]:
        if _crowded_key(s[idx]) < _crowded_key(best):
            best = s[idx]
    return best
