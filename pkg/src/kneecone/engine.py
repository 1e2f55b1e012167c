"""Generational loop in three variants: Pareto, fixed cone angle, self-adaptive angle."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from kneecone import adaptation
from kneecone.adaptation import GoldenSectionState
from kneecone.archive import SelectionConfig, build_archive, select_elites, tournament_select
from kneecone.core import (
    Bounds,
    Fitness,
    Individual,
    Population,
    bounds_init,
    bounds_update,
    normalize_many,
    objectives_matrix,
)
from kneecone.dominance import ConeParams
from kneecone.metrics import hypervolume, hypervolume_estimate, pareto_filter
from kneecone.problems import Problem

VARIANTS = ("pareto", "fixed_angle", "self_adaptive")

#: Per-generation trace hypervolume is exact up to this many objectives; the
#: exact sweep's cost explodes with dimension, so higher-dimensional fronts
#: use a seeded Monte-Carlo estimate.
EXACT_HV_MAX_OBJECTIVES = 3
TRACE_HV_SAMPLES = 4096


class EvaluationError(RuntimeError):
    """An individual's fitness evaluation failed; the run is aborted."""


@dataclass(frozen=True)
class AlgorithmConfig:
    variant: str = "pareto"
    theta: float = 90.0  # fixed_angle only
    population_size: int = 200
    elite_count: int = 10
    tournament_size: int = 2
    mut_probability: float = 0.05
    stop_gen: int = 10
    max_gen: int = 300
    seed: int = 0
    objective_upper_bounds: Optional[Sequence[float]] = None
    golden_tolerance: float = adaptation.DEFAULT_TOLERANCE_DEG

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0.0 <= self.mut_probability <= 1.0:
            raise ValueError("mutation probability must be in [0, 1]")
        if self.stop_gen < 1 or self.max_gen < 1:
            raise ValueError("stop_gen and max_gen must be >= 1")

    def selection(self) -> SelectionConfig:
        return SelectionConfig(self.population_size, self.elite_count, self.tournament_size)


@dataclass
class GenerationEntry:
    generation: int
    theta: float
    front_size: int
    hypervolume: float
    hdist: float
    evaluations: int


@dataclass
class RunRecord:
    entries: List[GenerationEntry]
    final_front: Population
    generations_to_converge: int
    converged: bool
    wall_time: float
    seed: int
    variant: str
    final_theta: float
    bounds: Bounds


def feasibility_compare(a: Fitness, b: Fitness) -> int:
    """Constraint-first ordering: 1 if a wins, -1 if b wins, 0 if dominance decides.

    A feasible solution beats an infeasible one; two infeasible solutions are
    ordered by satisfied-constraint count; otherwise they are incomparable
    here and cone domination takes over.
    """
    if a.constraints_total != b.constraints_total:
        raise ValueError("fitnesses compare across different constraint sets")
    if a.constraints_satisfied > b.constraints_satisfied:
        return 1
    if a.constraints_satisfied < b.constraints_satisfied:
        return -1
    return 0


def _front_hypervolume(front: Population, bounds: Bounds, seed: int) -> float:
    """Normalized hypervolume of a knee front against the all-ones reference point."""
    points = normalize_many(objectives_matrix(front), bounds)
    points = np.clip(points, 0.0, 1.0)
    ref = np.ones(points.shape[1])
    if points.shape[1] <= EXACT_HV_MAX_OBJECTIVES:
        return hypervolume(points, ref)
    return hypervolume_estimate(points, ref, n_samples=TRACE_HV_SAMPLES, seed=seed)


def _front_key(front: Population) -> Tuple[Tuple[float, ...], ...]:
    return tuple(sorted(tuple(ind.fitness.objectives) for ind in front))


def _dedupe_front(front: Population) -> Population:
    # duplicates never dominate each other, so converged populations would
    # otherwise flood the front with copies; report distinct objective vectors
    seen = set()
    out: Population = []
    for ind in front:
        key = tuple(ind.fitness.objectives)
        if key not in seen:
            seen.add(key)
            out.append(ind)
    return out


def run(problem: Problem, cfg: AlgorithmConfig) -> RunRecord:
    """Execute one optimization run and return its full trace and final knee front."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    sel = cfg.selection()
    upper = (
        np.asarray(cfg.objective_upper_bounds, dtype=float)
        if cfg.objective_upper_bounds is not None
        else problem.objective_upper_bounds
    )
    bounds = bounds_init(problem.m, upper)

    if cfg.variant == "fixed_angle":
        theta = cfg.theta
    else:
        theta = 90.0
    gstate = GoldenSectionState()

    population: Population = [Individual(problem.random_genome(rng)) for _ in range(sel.population_size)]
    entries: List[GenerationEntry] = []
    prev_key = None
    prev_hv: Optional[float] = None
    convergence = 0
    evaluations = 0
    generation = 0
    front: Population = []

    while generation < cfg.max_gen:
        generation += 1
        for ind in population:
            if ind.fitness is None:
                try:
                    ind.fitness = problem.evaluate(ind.genome)
                except Exception as exc:  # no silent skips
                    raise EvaluationError(
                        f"evaluation failed at generation {generation}: {exc}"
                    ) from exc
                bounds = bounds_update(bounds, ind.fitness.objectives)
                evaluations += 1

        cone = ConeParams.from_angle(theta)
        population = build_archive(population, sel, cone, bounds)
        # rank-1 members of the truncated archive are exactly its knee front
        front = _dedupe_front([ind for ind in population if ind.fitness.rank == 1])

        hv = _front_hypervolume(front, bounds, seed=cfg.seed * 1_000_003 + generation)
        gstate = adaptation.record_extremes(gstate, hv, len(front))
        hdist_now = adaptation.online_hdist(hv, len(front), gstate)
        entries.append(
            GenerationEntry(generation, theta, len(front), hv, hdist_now, evaluations)
        )

        key = _front_key(front)
        if prev_key is not None and key == prev_key:
            convergence += 1
        else:
            convergence = 0
        prev_key = key

        if cfg.variant == "self_adaptive" and not gstate.frozen:
            if not gstate.active:
                gstate = adaptation.golden_trigger(len(front), hv, prev_hv, sel.elite_count, gstate)
            else:
                gstate = adaptation.golden_step(hdist_now, gstate)
                if adaptation.golden_converged(gstate, cfg.golden_tolerance):
                    gstate = adaptation.freeze(gstate)
            theta = gstate.theta
        prev_hv = hv

        if convergence >= cfg.stop_gen or generation >= cfg.max_gen:
            break

        offspring: Population = [
            Individual(e.genome, e.fitness.copy()) for e in select_elites(population, sel.elite_count)
        ]
        while len(offspring) < sel.population_size:
            p1 = tournament_select(population, sel.tournament_size, rng)
            p2 = tournament_select(population, sel.tournament_size, rng)
            c1, c2 = problem.crossover(p1.genome, p2.genome, rng)
            offspring.append(Individual(problem.mutate(c1, cfg.mut_probability, rng)))
            if len(offspring) < sel.population_size:
                offspring.append(Individual(problem.mutate(c2, cfg.mut_probability, rng)))
        population = population + offspring

    return RunRecord(
        entries=entries,
        final_front=front,
        generations_to_converge=generation,
        converged=convergence >= cfg.stop_gen,
        wall_time=time.perf_counter() - t0,
        seed=cfg.seed,
        variant=cfg.variant,
        final_theta=theta,
        bounds=bounds,
    )
