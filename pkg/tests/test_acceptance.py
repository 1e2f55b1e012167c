"""Acceptance suite: ten go/no-go checks at fixed tolerances.

Each criterion is one test and reports a single ``[PASS]``/``[FAIL]`` line.
Criteria 6-9 share one experiment bundle (four problems x five variants x
30 repetitions at population 200) built once per session; expect a total
runtime around an hour on a single core.
"""

import csv
import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

from kneecone.adaptation import (
    PHI,
    freeze,
    golden_converged,
    golden_step,
    golden_trigger,
    GoldenSectionState,
)
from kneecone.core import Bounds, Fitness, Individual, normalize_many
from kneecone.dominance import (
    ConeParams,
    PARETO,
    assign_front_ranks,
    cone_values,
    knee_front,
    pareto_dominates,
)
from kneecone.experiment import ExperimentConfig, run_experiment
from kneecone.metrics import hypervolume, hypervolume_estimate, pareto_filter


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def unit_bounds(m: int) -> Bounds:
    return Bounds(max_p=np.ones(m), min_p=np.zeros(m))


def pop_of(points):
    return [Individual(None, Fitness(np.asarray(p, dtype=float))) for p in points]


# ---------------------------------------------------------------------------
# Criteria 1-3: domination semantics against brute-force oracles


def brute_pareto_front(points):
    return [
        i
        for i, p in enumerate(points)
        if not any(pareto_dominates(q, p) for j, q in enumerate(points) if j != i)
    ]


def brute_peeling_ranks(points):
    remaining = set(range(len(points)))
    ranks = {}
    rank = 1
    while remaining:
        front = [
            i
            for i in remaining
            if not any(
                pareto_dominates(points[j], points[i]) for j in remaining if j != i
            )
        ]
        for i in front:
            ranks[i] = rank
        remaining -= set(front)
        rank += 1
    return ranks


def test_criterion_01_pareto_equivalence_oracle():
    rng = np.random.default_rng(11)
    t0 = time.perf_counter()
    for _ in range(200):
        m = int(rng.choice([2, 3, 7]))
        n = int(rng.integers(1, 51))
        pts = rng.random((n, m))
        pop = pop_of(pts)
        b = unit_bounds(m)
        front = knee_front(pop, PARETO, b)
        want = [pop[i] for i in brute_pareto_front(pts)]
        assert front == want
        ranked = assign_front_ranks(pop, PARETO, b)
        oracle = brute_peeling_ranks(pts)
        assert [ind.fitness.rank for ind in pop] == [oracle[i] for i in range(n)]
        assert sum(len(f) for f in ranked) == n
    elapsed = time.perf_counter() - t0
    report(
        1,
        elapsed < 10.0,
        f"knee_front and front ranks match brute force on 200 populations in {elapsed:.2f}s (< 10s)",
    )


def test_criterion_02_theta_monotonicity():
    rng = np.random.default_rng(12)
    failures = 0
    for _ in range(100):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(2, 40))
        pts = rng.random((n, m))
        t1 = float(rng.uniform(90, 180))
        t2 = float(rng.uniform(t1, 180))
        pop = pop_of(pts)
        b = unit_bounds(m)
        narrow = {id(i) for i in knee_front(pop, ConeParams.from_angle(t1), b)}
        wide = {id(i) for i in knee_front(pop, ConeParams.from_angle(t2), b)}
        if not wide <= narrow:
            failures += 1
    report(
        2,
        failures == 0,
        f"front(theta2) subset of front(theta1) for all 100 angle pairs ({failures} violations)",
    )


def test_criterion_03_weighted_sum_limit():
    rng = np.random.default_rng(13)
    bad = 0
    for _ in range(100):
        m = int(rng.integers(2, 6))
        n = int(rng.integers(1, 40))
        pts = rng.random((n, m))
        pop = pop_of(pts)
        b = unit_bounds(m)
        front = knee_front(pop, ConeParams.from_angle(180.0), b)
        sums = cone_values(normalize_many(pts, b), 1.0)[:, 0]
        best = sums.min()
        members = {id(ind) for ind in front}
        for i, ind in enumerate(pop):
            in_front = id(ind) in members
            if in_front != (sums[i] == best):
                bad += 1
    report(
        3,
        bad == 0,
        f"theta=180 fronts equal the exact argmin set of the normalized sum ({bad} mismatches)",
    )


# ---------------------------------------------------------------------------
# Criterion 4: hypervolume against independent oracles


def hv_inclusion_exclusion(points, ref):
    ref = np.asarray(ref, dtype=float)
    total = 0.0
    pts = [np.asarray(p, dtype=float) for p in points]
    for k in range(1, len(pts) + 1):
        for combo in itertools.combinations(pts, k):
            corner = np.max(combo, axis=0)
            total += (-1) ** (k + 1) * float(np.prod(np.maximum(ref - corner, 0.0)))
    return total


def test_criterion_04_hypervolume_correctness():
    ref2 = (1.0, 1.0)
    # the pinned two-point value
    pinned = hypervolume([(0.25, 0.75), (0.75, 0.25)], ref2)
    assert pinned == pytest.approx(0.3125, abs=1e-12)

    # every front of up to 4 points drawn from a fixed 2-D grid
    grid = [0.1, 0.35, 0.6, 0.85]
    grid_pts = [(a, b) for a in grid for b in grid]
    worst = 0.0
    checked = 0
    for k in range(1, 5):
        for combo in itertools.combinations(grid_pts, k):
            got = hypervolume(combo, ref2)
            want = hv_inclusion_exclusion(combo, ref2)
            worst = max(worst, abs(got - want))
            checked += 1
    exact_ok = worst < 1e-12

    # Monte-Carlo cross-check on random fronts up to 7 objectives
    rng = np.random.default_rng(14)
    mc_ok = True
    for _ in range(50):
        m = int(rng.integers(2, 8))
        pts = pareto_filter(rng.random((8, m)))
        ref = np.ones(m)
        exact = hypervolume(pts, ref)
        n = 1_000_000
        est = hypervolume_estimate(pts, ref, n_samples=n, seed=int(rng.integers(2**31)))
        box = float(np.prod(ref - pts.min(axis=0)))
        p = exact / box if box > 0 else 0.0
        sigma = box * math.sqrt(max(p * (1 - p), 1e-12) / n)
        if abs(est - exact) > 3 * sigma + 1e-12:
            mc_ok = False
    report(
        4,
        exact_ok and mc_ok,
        f"{checked} grid fronts match inclusion-exclusion (max err {worst:.2e}); "
        f"50 Monte-Carlo cross-checks within 3 sigma; two-point value 0.3125",
    )


# ---------------------------------------------------------------------------
# Criterion 5: golden-section contract


def test_criterion_05_golden_section_contract():
    # bracket width after k probe pairs
    st = golden_trigger(front_size=11, hv_now=1.0, hv_prev=0.0, mu=10, st=GoldenSectionState())
    width_ok = True
    for k in range(1, 26):
        st = golden_step(0.5, st)
        st = golden_step(0.6, st)
        expected = 90.0 / PHI**k
        if not math.isclose(st.bracket_width, expected, rel_tol=1e-9):
            width_ok = False

    # synthetic unimodal scores peaked at theta* = 137, varied per seed
    target = 137.0
    freeze_errors = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        w = float(rng.uniform(5.0, 40.0))
        cubic = float(rng.uniform(0.0, 0.01))

        def score(theta):
            d = theta - target
            return math.exp(-((d / w) ** 2)) - cubic * abs(d) ** 3 / 90.0**3

        st = golden_trigger(11, 1.0, 0.0, 10, GoldenSectionState())
        guard = 0
        while not golden_converged(st, 1.0):
            st = golden_step(score(st.theta), st)
            guard += 1
            assert guard < 200
        st = freeze(st)
        freeze_errors.append(abs(st.theta - target))
    peak_ok = all(err <= 1.0 for err in freeze_errors)
    report(
        5,
        width_ok and peak_ok,
        f"bracket width follows 90/phi^k to 1e-9 rel; frozen angle within 1 degree of "
        f"137 in 20/20 runs (max err {max(freeze_errors):.3f})",
    )


# ---------------------------------------------------------------------------
# Criteria 6-9: the experiment bundle

VARIANTS = (
    {"name": "pareto"},
    {"name": "fixed_angle", "theta": 120},
    {"name": "fixed_angle", "theta": 135},
    {"name": "fixed_angle", "theta": 150},
    {"name": "self_adaptive"},
)

CONE_IDS = ("fixed_angle_120", "fixed_angle_135", "fixed_angle_150")

PROBLEMS = {
    "knee": {"kind": "knee", "n": 30, "knees": 1},
    "mission1": {"kind": "mission", "mission_id": 1, "scenario_seed": 1},
    "mission4": {"kind": "mission", "mission_id": 4, "scenario_seed": 4},
    "mission12": {"kind": "mission", "mission_id": 12, "scenario_seed": 12},
}


def experiment_config(problem):
    return ExperimentConfig(
        problem=problem,
        variants=VARIANTS,
        repetitions=30,
        base_seed=100,
        population_size=200,
        elite_count=10,
        mut_probability=0.05,
        stop_gen=10,
        max_gen=300,
    )


def load_summary(out_dir):
    means = {}
    with (Path(out_dir) / "summary.csv").open() as fh:
        for row in csv.DictReader(fh):
            means[(row["config_id"], row["metric"])] = float(row["mean"])
    return means


def load_pvalues(out_dir):
    pvals = {}
    with (Path(out_dir) / "pvalues.csv").open() as fh:
        for row in csv.DictReader(fh):
            key = (row["metric"], row["variant_a"], row["variant_b"])
            pvals[key] = float(row["p_value"])
            pvals[(row["metric"], row["variant_b"], row["variant_a"])] = float(row["p_value"])
    return pvals


@pytest.fixture(scope="session")
def bundle(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    out = {}
    for tag, problem in PROBLEMS.items():
        out_dir = root / tag
        run_experiment(experiment_config(problem), out_dir)
        out[tag] = {
            "dir": out_dir,
            "means": load_summary(out_dir),
            "pvalues": load_pvalues(out_dir),
        }
    return out


def test_criterion_06_front_size_collapse(bundle):
    ok = True
    parts = []
    for tag, data in bundle.items():
        means = data["means"]
        sizes = {vid: means[(vid, "front_size")] for vid in CONE_IDS + ("pareto",)}
        ordered = (
            sizes["fixed_angle_150"]
            < sizes["fixed_angle_135"]
            < sizes["fixed_angle_120"]
            < sizes["pareto"]
        )
        min_ratio = min(sizes["pareto"] / sizes[vid] for vid in CONE_IDS)
        ok = ok and ordered and min_ratio >= 5.0
        parts.append(
            f"{tag} sizes 150/135/120/pareto = "
            f"{sizes['fixed_angle_150']:.1f}/{sizes['fixed_angle_135']:.1f}/"
            f"{sizes['fixed_angle_120']:.1f}/{sizes['pareto']:.1f} "
            f"(min ratio {min_ratio:.1f}x)"
        )
    report(6, ok, "; ".join(parts))


def test_criterion_07_hdist_dominance(bundle):
    ok = True
    parts = []
    for tag, data in bundle.items():
        sa = data["means"][("self_adaptive", "hdist")]
        pa = data["means"][("pareto", "hdist")]
        p = data["pvalues"][("hdist", "pareto", "self_adaptive")]
        ok = ok and sa > pa and p < 0.05
        parts.append(f"{tag} HDist {sa:.3f} > {pa:.3f} (p={p:.2e})")
    report(7, ok, "; ".join(parts))


def test_criterion_08_hypervolume_ordering(bundle):
    ok = True
    parts = []
    for tag, data in bundle.items():
        pa = data["means"][("pareto", "hypervolume")]
        cones = {vid: data["means"][(vid, "hypervolume")] for vid in CONE_IDS}
        ok = ok and all(pa >= hv for hv in cones.values())
        parts.append(
            f"{tag} HV pareto {pa:.3f} >= cones "
            + "/".join(f"{cones[v]:.3f}" for v in CONE_IDS)
        )
    report(8, ok, "; ".join(parts))


def test_criterion_09_convergence_speed(bundle):
    means = bundle["mission4"]["means"]
    pa = means[("pareto", "generations")]
    cone_gens = {vid: means[(vid, "generations")] for vid in CONE_IDS + ("self_adaptive",)}
    ok = all(g < pa for g in cone_gens.values())
    detail = (
        "mission4 generations pareto "
        f"{pa:.1f} vs "
        + ", ".join(f"{vid} {g:.1f}" for vid, g in cone_gens.items())
    )
    report(9, ok, detail)


def test_criterion_10_determinism_and_replay(bundle, tmp_path_factory):
    first = bundle["mission4"]["dir"]
    second = tmp_path_factory.mktemp("replay") / "mission4"
    run_experiment(experiment_config(PROBLEMS["mission4"]), second)
    tables = ("run_metrics.csv", "summary.csv", "pvalues.csv")
    same = {t: (first / t).read_bytes() == (Path(second) / t).read_bytes() for t in tables}
    report(
        10,
        all(same.values()),
        "byte-identical metric tables across two full executions: "
        + ", ".join(f"{t}={'yes' if v else 'NO'}" for t, v in same.items()),
    )
