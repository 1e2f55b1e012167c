import numpy as np
import pytest

from kneecone.archive import (
    SelectionConfig,
    assign_sparsity,
    build_archive,
    select_elites,
    tournament_select,
)
from kneecone.core import Bounds, Fitness, Individual
from kneecone.dominance import PARETO

UNIT = Bounds(max_p=np.ones(2), min_p=np.zeros(2))


def pop_of(points, ranks=None, sparsities=None):
    out = []
    for i, p in enumerate(points):
        fit = Fitness(np.asarray(p, dtype=float))
        if ranks is not None:
            fit.rank = ranks[i]
        if sparsities is not None:
            fit.sparsity = sparsities[i]
        out.append(Individual(None, fit))
    return out


class TestSelectionConfig:
    def test_valid(self):
        cfg = SelectionConfig(100, 10, 2)
        assert cfg.tournament_size == 2

    @pytest.mark.parametrize("args", [(0, 1, 2), (10, 0, 2), (10, 5, 0), (10, 10, 2), (10, 12, 2)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            SelectionConfig(*args)


class TestAssignSparsity:
    def test_extremes_get_infinity(self):
        pop = pop_of([[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]])
        assign_sparsity(pop, UNIT)
        assert pop[0].fitness.sparsity == np.inf
        assert pop[2].fitness.sparsity == np.inf

    def test_interior_value_is_neighbor_gap_sum(self):
        pop = pop_of([[0.0, 1.0], [0.2, 0.7], [1.0, 0.0]])
        assign_sparsity(pop, UNIT)
        # axis 0 gap 1.0-0.0, axis 1 gap 1.0-0.0
        assert pop[1].fitness.sparsity == pytest.approx(2.0)

    def test_two_members_both_infinite(self):
        pop = pop_of([[0.0, 1.0], [1.0, 0.0]])
        assign_sparsity(pop, UNIT)
        assert all(ind.fitness.sparsity == np.inf for ind in pop)

    def test_wider_gap_means_higher_sparsity(self):
        pop = pop_of([[0.0, 1.0], [0.1, 0.9], [0.5, 0.5], [1.0, 0.0]])
        assign_sparsity(pop, UNIT)
        assert pop[2].fitness.sparsity > pop[1].fitness.sparsity

    def test_empty_front(self):
        assert assign_sparsity([], UNIT) == []


class TestBuildArchive:
    def test_undersized_population_kept_with_ranks(self):
        pop = pop_of([[0.1, 0.1], [0.5, 0.5]])
        out = build_archive(pop, SelectionConfig(10, 2), PARETO, UNIT)
        assert len(out) == 2
        assert all(ind.fitness.rank is not None for ind in out)
        assert all(ind.fitness.sparsity is not None for ind in out)

    def test_truncates_to_population_size(self):
        rng = np.random.default_rng(3)
        pop = pop_of(rng.random((40, 2)))
        out = build_archive(pop, SelectionConfig(15, 2), PARETO, UNIT)
        assert len(out) == 15

    def test_whole_better_fronts_admitted_first(self):
        # two clear layers: the inner square and an offset copy it dominates
        inner = [[0.1, 0.4], [0.2, 0.3], [0.3, 0.2], [0.4, 0.1]]
        outer = [[p[0] + 0.5, p[1] + 0.5] for p in inner]
        pop = pop_of(inner + outer)
        out = build_archive(pop, SelectionConfig(6, 2), PARETO, UNIT)
        ranks = [ind.fitness.rank for ind in out]
        assert ranks.count(1) == 4
        assert ranks.count(2) == 2

    def test_overflow_front_cut_by_sparsity(self):
        pop = pop_of([[0.0, 1.0], [0.45, 0.5], [0.5, 0.45], [1.0, 0.0]])
        out = build_archive(pop, SelectionConfig(2, 1), PARETO, UNIT)
        got = {tuple(ind.fitness.objectives) for ind in out}
        assert got == {(0.0, 1.0), (1.0, 0.0)}  # extreme members survive the cut


class TestSelectElites:
    def test_rank_then_sparsity(self):
        pop = pop_of(
            [[0.1, 0.1]] * 4,
            ranks=[2, 1, 1, 3],
            sparsities=[np.inf, 0.5, 2.0, np.inf],
        )
        elites = select_elites(pop, 2)
        assert elites == [pop[2], pop[1]]

    def test_mu_larger_than_population(self):
        pop = pop_of([[0.1, 0.1]], ranks=[1], sparsities=[1.0])
        assert select_elites(pop, 5) == pop


class TestTournamentSelect:
    def test_deterministic_given_seed(self):
        pop = pop_of([[0.1, 0.1]] * 6, ranks=[3, 1, 2, 1, 2, 3], sparsities=[1.0] * 6)
        a = tournament_select(pop, 2, np.random.default_rng(5))
        b = tournament_select(pop, 2, np.random.default_rng(5))
        assert a is b

    def test_best_of_draws_wins(self):
        pop = pop_of([[0.1, 0.1]] * 3, ranks=[3, 2, 1], sparsities=[1.0] * 3)
        # with k == population size and replacement, many draws; the winner can
        # never be worse than a drawn competitor
        rng = np.random.default_rng(9)
        for _ in range(50):
            winner = tournament_select(pop, 3, rng)
            assert winner.fitness.rank in (1, 2, 3)
        # selection pressure: rank 1 wins most tournaments
        rng = np.random.default_rng(11)
        wins = sum(tournament_select(pop, 2, rng) is pop[2] for _ in range(300))
        assert wins > 150

    def test_empty_population_rejected(self):
        with pytest.raises(ValueError):
            tournament_select([], 2, np.random.default_rng(0))
