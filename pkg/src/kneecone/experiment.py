"""Batch experiment harness: multi-run execution, persistence, and comparison tables.

Artifact layout under the output directory:

    config.json                     resolved experiment configuration
    scenario.json                   generated mission scenario (mission problems)
    runs/<variant>/rep<NNN>/record.json   run metadata
    runs/<variant>/rep<NNN>/trace.csv     per-generation series
    runs/<variant>/rep<NNN>/front.csv     final knee front
    run_metrics.csv                 one row per run, recomputable from runs/
    summary.csv                     (config_id, metric, mean, std, n)
    pvalues.csv                     pairwise rank-sum p-values per metric

Every summary number is derived from the persisted per-run files, so
``summarize`` can rebuild the tables from an existing artifact directory.
"""

from __future__ import annotations

import csv
import itertools
import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from kneecone.engine import AlgorithmConfig, RunRecord, run
from kneecone.metrics import (
    front_stats,
    hypervolume,
    hypervolume_estimate,
    pareto_filter,
    rank_sum_test,
)
from kneecone.problems import (
    KneeBenchmark,
    MISSION_SPECS,
    MissionProblem,
    Problem,
    generate_scenario,
    load_scenario,
    save_scenario,
)

SUMMARY_METRICS = ("hypervolume", "front_size", "hdist", "generations")

#: Summary hypervolume is exact up to this many objectives; higher-dimensional
#: fronts fall back to seeded Monte Carlo (the exact sweep's cost explodes
#: with dimension).
EXACT_HV_MAX_OBJECTIVES = 3
OFFLINE_HV_SAMPLES = 50_000


@dataclass(frozen=True)
class ExperimentConfig:
    problem: Dict[str, object]
    variants: Tuple[Dict[str, object], ...]
    repetitions: int = 30
    base_seed: int = 0
    population_size: int = 200
    elite_count: int = 10
    tournament_size: int = 2
    mut_probability: float = 0.05
    stop_gen: int = 10
    max_gen: int = 300
    golden_tolerance: float = 1.0

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.variants:
            raise ValueError("at least one algorithm variant is required")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        data = dict(data)
        data["variants"] = tuple(data.get("variants", ()))
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variants"] = list(self.variants)
        return d


def variant_id(variant: Dict[str, object]) -> str:
    name = variant["name"]
    if name == "fixed_angle":
        theta = variant.get("theta", 90.0)
        theta_txt = str(int(theta)) if float(theta).is_integer() else str(theta)
        return f"fixed_angle_{theta_txt}"
    return str(name)


def build_problem(problem_cfg: Dict[str, object]) -> Problem:
    kind = problem_cfg.get("kind")
    if kind == "knee":
        return KneeBenchmark(
            n=int(problem_cfg.get("n", 6)), knees=int(problem_cfg.get("knees", 1))
        )
    if kind == "mission":
        mission_id = int(problem_cfg["mission_id"])
        if mission_id not in MISSION_SPECS:
            raise ValueError(f"unknown mission id {mission_id}")
        scenario = generate_scenario(
            MISSION_SPECS[mission_id], seed=int(problem_cfg.get("scenario_seed", 0))
        )
        return MissionProblem(scenario)
    if kind == "scenario_file":
        return MissionProblem(load_scenario(problem_cfg["path"]))
    raise ValueError(f"unknown problem kind: {kind!r}")


def _algorithm_config(cfg: ExperimentConfig, variant: Dict[str, object], rep: int) -> AlgorithmConfig:
    return AlgorithmConfig(
        variant=str(variant["name"]),
        theta=float(variant.get("theta", 90.0)),
        population_size=cfg.population_size,
        elite_count=cfg.elite_count,
        tournament_size=cfg.tournament_size,
        mut_probability=cfg.mut_probability,
        stop_gen=cfg.stop_gen,
        max_gen=cfg.max_gen,
        seed=cfg.base_seed + rep,
        golden_tolerance=cfg.golden_tolerance,
    )


def _run_dir(out_dir: Path, vid: str, rep: int) -> Path:
    return out_dir / "runs" / vid / f"rep{rep:03d}"


def _persist_run(run_dir: Path, record: RunRecord, rep: int, vid: str) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "variant": vid,
        "rep": rep,
        "seed": record.seed,
        "generations": record.generations_to_converge,
        "converged": record.converged,
        "wall_time": record.wall_time,
        "final_theta": record.final_theta,
        "bounds_max": record.bounds.max_p.tolist(),
        "bounds_min": record.bounds.min_p.tolist(),
    }
    (run_dir / "record.json").write_text(json.dumps(meta, indent=2) + "\n")
    with (run_dir / "trace.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation", "theta", "front_size", "hypervolume", "hdist", "evaluations"])
        for e in record.entries:
            w.writerow(
                [
                    e.generation,
                    repr(float(e.theta)),
                    e.front_size,
                    repr(float(e.hypervolume)),
                    repr(float(e.hdist)),
                    e.evaluations,
                ]
            )
    m = record.final_front[0].fitness.objectives.shape[0] if record.final_front else 0
    with (run_dir / "front.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [f"f{i + 1}" for i in range(m)] + ["constraints_satisfied", "constraints_total"]
        )
        for ind in record.final_front:
            w.writerow(
                [repr(float(v)) for v in ind.fitness.objectives]
                + [ind.fitness.constraints_satisfied, ind.fitness.constraints_total]
            )


def _execute_one(cfg_dict: dict, variant: Dict[str, object], rep: int, out_dir: str) -> Tuple[str, int]:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    problem = build_problem(cfg.problem)
    vid = variant_id(variant)
    record = run(problem, _algorithm_config(cfg, variant, rep))
    _persist_run(_run_dir(Path(out_dir), vid, rep), record, rep, vid)
    return vid, rep


def run_experiment(
    cfg: ExperimentConfig, out_dir, jobs: int = 1, progress=None
) -> Path:
    """Execute every variant x repetition, persist artifacts, and build the tables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise RuntimeError(f"output directory not writable: {out}") from exc

    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    if cfg.problem.get("kind") == "mission":
        scenario = generate_scenario(
            MISSION_SPECS[int(cfg.problem["mission_id"])],
            seed=int(cfg.problem.get("scenario_seed", 0)),
        )
        save_scenario(scenario, out / "scenario.json")

    tasks = [(variant, rep) for variant in cfg.variants for rep in range(cfg.repetitions)]
    cfg_dict = cfg.to_dict()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_execute_one, cfg_dict, variant, rep, str(out))
                for variant, rep in tasks
            ]
            for fut in futures:
                done = fut.result()
                if progress:
                    progress(done)
    else:
        for variant, rep in tasks:
            done = _execute_one(cfg_dict, variant, rep, str(out))
            if progress:
                progress(done)

    summarize_artifacts(out)
    return out


# ---------------------------------------------------------------------------
# Aggregation


def _stable_seed(*parts) -> int:
    return zlib.crc32(":".join(str(p) for p in parts).encode())


def _make_hv(tag: str):
    counter = itertools.count()

    def hv(points, ref):
        pts = np.asarray(list(points), dtype=float)
        seed = _stable_seed(tag, next(counter))
        if pts.size == 0:
            return 0.0
        if pts.shape[1] <= EXACT_HV_MAX_OBJECTIVES:
            return hypervolume(pts, ref)
        return hypervolume_estimate(pts, ref, n_samples=OFFLINE_HV_SAMPLES, seed=seed)

    return hv


def _load_front(run_dir: Path) -> np.ndarray:
    with (run_dir / "front.csv").open() as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    m = sum(1 for h in header if h.startswith("f"))
    return np.array([[float(v) for v in row[:m]] for row in data], dtype=float)


def _offline_hdist(s_norm: np.ndarray, p_norm: np.ndarray, hv_func) -> float:
    from kneecone.metrics import hdist_offline

    ref = np.ones(p_norm.shape[1])
    try:
        return hdist_offline(s_norm, p_norm, ref, hv_func=hv_func)
    except ValueError:
        # degenerate reference front (zero hypervolume) in toy-sized runs
        return 0.0


def summarize_artifacts(out_dir) -> Path:
    """Rebuild run_metrics.csv, summary.csv and pvalues.csv from persisted runs."""
    out = Path(out_dir)
    runs_root = out / "runs"
    if not runs_root.is_dir():
        raise FileNotFoundError(f"no runs/ directory under {out}")
    variants = sorted(d.name for d in runs_root.iterdir() if d.is_dir())
    if not variants:
        raise FileNotFoundError(f"no run artifacts under {runs_root}")

    fronts: Dict[Tuple[str, int], np.ndarray] = {}
    meta: Dict[Tuple[str, int], dict] = {}
    for vid in variants:
        for rep_dir in sorted((runs_root / vid).iterdir()):
            rep = int(rep_dir.name.replace("rep", ""))
            fronts[(vid, rep)] = _load_front(rep_dir)
            meta[(vid, rep)] = json.loads((rep_dir / "record.json").read_text())
    reps = sorted({rep for _, rep in fronts})

    all_points = np.vstack([f for f in fronts.values() if f.size])
    lo = all_points.min(axis=0)
    hi = all_points.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)

    def norm(points: np.ndarray) -> np.ndarray:
        return (points - lo) / span

    m = all_points.shape[1]
    ref = np.ones(m)

    # per-repetition merged reference front across all variants
    p_by_rep: Dict[int, np.ndarray] = {}
    for rep in reps:
        merged = np.vstack([fronts[(vid, rep)] for vid in variants if fronts[(vid, rep)].size])
        p_by_rep[rep] = pareto_filter(merged)

    run_rows: List[dict] = []
    values: Dict[str, Dict[str, List[float]]] = {
        vid: {metric: [] for metric in SUMMARY_METRICS} for vid in variants
    }
    for vid in variants:
        for rep in reps:
            pts = fronts[(vid, rep)]
            hv_run = _make_hv(f"{vid}:{rep}:hv")(norm(pts), ref) if pts.size else 0.0
            hdist = (
                _offline_hdist(norm(pts), norm(p_by_rep[rep]), _make_hv(f"{vid}:{rep}:hdist"))
                if pts.size
                else 0.0
            )
            info = meta[(vid, rep)]
            row = {
                "variant": vid,
                "rep": rep,
                "seed": info["seed"],
                "front_size": len(pts),
                "hypervolume": hv_run,
                "hdist": hdist,
                "generations": info["generations"],
                "converged": int(info["converged"]),
            }
            run_rows.append(row)
            values[vid]["hypervolume"].append(hv_run)
            values[vid]["front_size"].append(float(len(pts)))
            values[vid]["hdist"].append(hdist)
            values[vid]["generations"].append(float(info["generations"]))

    with (out / "run_metrics.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        cols = ["variant", "rep", "seed", "front_size", "hypervolume", "hdist", "generations", "converged"]
        w.writerow(cols)
        for row in run_rows:
            w.writerow(
                [row[c] if not isinstance(row[c], float) else repr(float(row[c])) for c in cols]
            )

    rows = front_stats(values)
    with (out / "summary.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["config_id", "metric", "mean", "std", "n"])
        for row in rows:
            w.writerow(
                [
                    row["config_id"],
                    row["metric"],
                    repr(float(row["mean"])),
                    repr(float(row["std"])),
                    row["n"],
                ]
            )

    with (out / "pvalues.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "variant_a", "variant_b", "p_value"])
        for metric in SUMMARY_METRICS:
            for va, vb in itertools.combinations(variants, 2):
                p = rank_sum_test(values[va][metric], values[vb][metric])
                w.writerow([metric, va, vb, repr(p)])
    return out


# ---------------------------------------------------------------------------
# Plot-ready tables


def emit_plot_data(out_dir) -> Path:
    """Emit per-generation mean series and a normalized parallel-coordinates table."""
    out = Path(out_dir)
    runs_root = out / "runs"
    missing = [str(p) for p in (runs_root,) if not p.is_dir()]
    if missing:
        raise FileNotFoundError(f"missing experiment artifacts: {missing}")
    variants = sorted(d.name for d in runs_root.iterdir() if d.is_dir())
    plot_dir = out / "plotdata"
    plot_dir.mkdir(exist_ok=True)

    fronts: Dict[Tuple[str, int], np.ndarray] = {}
    for vid in variants:
        traces = []
        for rep_dir in sorted((runs_root / vid).iterdir()):
            rep = int(rep_dir.name.replace("rep", ""))
            fronts[(vid, rep)] = _load_front(rep_dir)
            with (rep_dir / "trace.csv").open() as fh:
                rows = list(csv.DictReader(fh))
            traces.append(rows)
        max_len = max(len(t) for t in traces)
        with (plot_dir / f"series_{vid}.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["generation", "n_runs", "theta", "front_size", "hypervolume", "hdist"])
            for g in range(max_len):
                alive = [t[g] for t in traces if g < len(t)]
                w.writerow(
                    [
                        g + 1,
                        len(alive),
                        repr(float(np.mean([float(r["theta"]) for r in alive]))),
                        repr(float(np.mean([float(r["front_size"]) for r in alive]))),
                        repr(float(np.mean([float(r["hypervolume"]) for r in alive]))),
                        repr(float(np.mean([float(r["hdist"]) for r in alive]))),
                    ]
                )

    all_points = np.vstack([f for f in fronts.values() if f.size])
    lo = all_points.min(axis=0)
    hi = all_points.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    m = all_points.shape[1]
    with (plot_dir / "parallel.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "rep", "solution"] + [f"f{i + 1}" for i in range(m)])
        for (vid, rep), pts in sorted(fronts.items()):
            for s_idx, point in enumerate((pts - lo) / span if pts.size else []):
                w.writerow([vid, rep, s_idx] + [repr(float(v)) for v in point])
    return plot_dir
