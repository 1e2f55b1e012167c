"""Benchmark problems: a parametric knee test family and a multi-UAV mission surrogate.

The mission surrogate keeps the structure that matters to the optimizer --
task/vehicle assignment, ordering, ground-station capacity, sensors, fuel,
and no-fly-zone detours expressed as precomputed pairwise route penalties --
without any geometric path planning. Infeasibility is counted, not enforced:
every genome decodes and the fitness carries the number of satisfied
constraints alongside the seven mission objectives.
"""

from __future__ import annotations

import abc
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from kneecone.core import Fitness

MAP_SIZE_KM = 100.0
SENSORS: Tuple[str, ...] = ("camera", "radar", "infrared", "lidar")
PROFILE_MULTIPLIERS: Tuple[float, float] = (0.8, 1.0)  # slow, fast
MULTI_UAV_CREW = 2  # vehicles required by a multi-UAV task


class Problem(abc.ABC):
    """Contract every optimizable problem satisfies."""

    m: int
    constraints_total: int
    objective_upper_bounds: np.ndarray

    @abc.abstractmethod
    def random_genome(self, rng: np.random.Generator):
        ...

    @abc.abstractmethod
    def evaluate(self, genome) -> Fitness:
        ...

    @abc.abstractmethod
    def crossover(self, g1, g2, rng: np.random.Generator):
        ...

    @abc.abstractmethod
    def mutate(self, genome, prob: float, rng: np.random.Generator):
        ...


class KneeBenchmark(Problem):
    """Bi-objective test family with K tunable knees on the trade-off curve.

    Decision vector x in [0, 1]^n. With
        g(x) = 1 + 9 * sum(x_2..x_n) / (n - 1)
        r(x1) = 5 + 10 (x1 - 0.5)^2 + cos(2 K pi x1) / K
    the objectives are f1 = g r sin(pi x1 / 2), f2 = g r cos(pi x1 / 2); the
    front candidates lie on the curve r(x1) at g = 1 and dip at the knees.
    """

    m = 2
    constraints_total = 0

    def __init__(self, n: int = 6, knees: int = 1):
        if n < 2:
            raise ValueError("need at least 2 decision variables")
        if knees < 1:
            raise ValueError("need at least one knee")
        self.n = n
        self.knees = knees
        f_max = 10.0 * (7.5 + 1.0 / knees)
        self.objective_upper_bounds = np.array([f_max, f_max]) * 1.2

    def random_genome(self, rng: np.random.Generator) -> np.ndarray:
        return rng.random(self.n)

    def evaluate(self, genome: np.ndarray) -> Fitness:
        x = np.asarray(genome, dtype=float)
        if x.shape != (self.n,) or np.any(x < 0) or np.any(x > 1):
            raise ValueError("genome outside [0, 1]^n")
        g = 1.0 + 9.0 * x[1:].sum() / (self.n - 1)
        x1 = x[0]
        r = 5.0 + 10.0 * (x1 - 0.5) ** 2 + math.cos(2.0 * self.knees * math.pi * x1) / self.knees
        f1 = g * r * math.sin(math.pi * x1 / 2.0)
        f2 = g * r * math.cos(math.pi * x1 / 2.0)
        return Fitness(np.array([f1, f2]), 0, 0)

    def crossover(self, g1, g2, rng) -> Tuple[np.ndarray, np.ndarray]:
        mask = rng.random(self.n) < 0.5
        c1 = np.where(mask, g1, g2)
        c2 = np.where(mask, g2, g1)
        return c1, c2

    def mutate(self, genome, prob, rng) -> np.ndarray:
        out = np.asarray(genome, dtype=float).copy()
        mask = rng.random(self.n) < prob
        out[mask] = rng.random(int(mask.sum()))
        return out


# ---------------------------------------------------------------------------
# Mission scenarios


@dataclass(frozen=True)
class Task:
    position: Tuple[float, float]
    duration_min: float
    multi_uav: bool
    required_sensor: str


@dataclass(frozen=True)
class Uav:
    base: Tuple[float, float]
    speed_kmh: float
    fuel_capacity_l: float
    fuel_rate_lph: float
    cost_rate: float
    sensors: Tuple[str, ...]


@dataclass(frozen=True)
class Gcs:
    capacity: int


@dataclass(frozen=True)
class ScenarioSpec:
    """Row of scenario features: counts of every structural element."""

    tasks: int
    multi_uav_tasks: int
    uavs: int
    gcss: int
    nfzs: int
    dependencies: int


#: The twelve stock mission feature rows, by mission id.
MISSION_SPECS: Dict[int, ScenarioSpec] = {
    1: ScenarioSpec(5, 0, 3, 1, 0, 0),
    2: ScenarioSpec(6, 1, 3, 1, 1, 0),
    3: ScenarioSpec(6, 1, 4, 2, 2, 1),
    4: ScenarioSpec(7, 1, 5, 2, 1, 2),
    5: ScenarioSpec(8, 2, 5, 2, 3, 1),
    6: ScenarioSpec(9, 2, 5, 2, 0, 2),
    7: ScenarioSpec(9, 2, 6, 2, 2, 2),
    8: ScenarioSpec(10, 2, 6, 2, 3, 3),
    9: ScenarioSpec(11, 3, 6, 2, 3, 2),
    10: ScenarioSpec(12, 3, 7, 3, 0, 2),
    11: ScenarioSpec(12, 3, 8, 3, 2, 3),
    12: ScenarioSpec(13, 4, 7, 3, 4, 4),
}


@dataclass
class MissionScenario:
    tasks: List[Task]
    uavs: List[Uav]
    gcss: List[Gcs]
    nfz_penalty: Dict[Tuple[int, int], float]  # unordered task pair -> extra km
    dependencies: List[Tuple[int, int]]  # (before, after) task indices

    def penalty(self, t1: int, t2: int) -> float:
        if t1 > t2:
            t1, t2 = t2, t1
        return self.nfz_penalty.get((t1, t2), 0.0)


def generate_scenario(spec: ScenarioSpec, seed: int) -> MissionScenario:
    """Deterministically sample a scenario realizing exactly the spec's counts."""
    if spec.uavs < 1 or spec.gcss < 1 or spec.tasks < 1:
        raise ValueError("need at least one task, one UAV, and one GCS")
    if spec.multi_uav_tasks > spec.tasks:
        raise ValueError("more multi-UAV tasks than tasks")
    max_pairs = spec.tasks * (spec.tasks - 1) // 2
    if spec.dependencies > max_pairs:
        raise ValueError("more dependencies than acyclic task pairs")
    if spec.nfzs > max_pairs:
        raise ValueError("more no-fly-zone penalties than task pairs")
    rng = np.random.default_rng(seed)

    multi_idx = set(rng.choice(spec.tasks, size=spec.multi_uav_tasks, replace=False).tolist())
    tasks = [
        Task(
            position=(float(rng.uniform(0, MAP_SIZE_KM)), float(rng.uniform(0, MAP_SIZE_KM))),
            duration_min=float(rng.uniform(10, 60)),
            multi_uav=t in multi_idx,
            required_sensor=SENSORS[int(rng.integers(len(SENSORS)))],
        )
        for t in range(spec.tasks)
    ]

    uavs = [
        Uav(
            base=(float(rng.uniform(0, MAP_SIZE_KM)), float(rng.uniform(0, MAP_SIZE_KM))),
            speed_kmh=float(rng.uniform(80, 140)),
            fuel_capacity_l=float(rng.uniform(40, 80)),
            fuel_rate_lph=float(rng.uniform(8, 15)),
            cost_rate=float(rng.uniform(50, 150)),
            sensors=tuple(
                sorted(
                    rng.choice(
                        SENSORS, size=int(rng.integers(1, len(SENSORS) + 1)), replace=False
                    ).tolist()
                )
            ),
        )
        for _ in range(spec.uavs)
    ]
    # guarantee sensor coverage: every required sensor carried by >= 1 UAV
    for sensor in sorted({t.required_sensor for t in tasks}):
        if not any(sensor in u.sensors for u in uavs):
            u = int(rng.integers(spec.uavs))
            uavs[u] = Uav(
                base=uavs[u].base,
                speed_kmh=uavs[u].speed_kmh,
                fuel_capacity_l=uavs[u].fuel_capacity_l,
                fuel_rate_lph=uavs[u].fuel_rate_lph,
                cost_rate=uavs[u].cost_rate,
                sensors=tuple(sorted(set(uavs[u].sensors) | {sensor})),
            )

    min_cap = math.ceil(spec.uavs / spec.gcss)
    gcss = [Gcs(capacity=int(rng.integers(min_cap, spec.uavs + 1))) for _ in range(spec.gcss)]

    all_pairs = [(i, j) for i in range(spec.tasks) for j in range(i + 1, spec.tasks)]
    nfz_choice = rng.choice(len(all_pairs), size=spec.nfzs, replace=False)
    nfz_penalty = {all_pairs[int(k)]: float(rng.uniform(10, 40)) for k in nfz_choice}

    # acyclic dependencies: orient sampled pairs along a random topological order
    topo = rng.permutation(spec.tasks)
    pos = {int(t): i for i, t in enumerate(topo)}
    dep_choice = rng.choice(len(all_pairs), size=spec.dependencies, replace=False)
    dependencies = []
    for k in dep_choice:
        i, j = all_pairs[int(k)]
        dependencies.append((i, j) if pos[i] < pos[j] else (j, i))

    return MissionScenario(tasks, uavs, gcss, nfz_penalty, sorted(dependencies))


def scenario_to_dict(sc: MissionScenario) -> dict:
    return {
        "tasks": [
            {
                "position": list(t.position),
                "duration_min": t.duration_min,
                "multi_uav": t.multi_uav,
                "required_sensor": t.required_sensor,
            }
            for t in sc.tasks
        ],
        "uavs": [
            {
                "base": list(u.base),
                "speed_kmh": u.speed_kmh,
                "fuel_capacity_l": u.fuel_capacity_l,
                "fuel_rate_lph": u.fuel_rate_lph,
                "cost_rate": u.cost_rate,
                "sensors": list(u.sensors),
            }
            for u in sc.uavs
        ],
        "gcss": [{"capacity": g.capacity} for g in sc.gcss],
        "penalties": [
            {"pair": list(pair), "extra_km": km} for pair, km in sorted(sc.nfz_penalty.items())
        ],
        "dependencies": [list(d) for d in sc.dependencies],
    }


def scenario_from_dict(data: dict) -> MissionScenario:
    tasks = [
        Task(tuple(t["position"]), t["duration_min"], t["multi_uav"], t["required_sensor"])
        for t in data["tasks"]
    ]
    uavs = [
        Uav(
            tuple(u["base"]),
            u["speed_kmh"],
            u["fuel_capacity_l"],
            u["fuel_rate_lph"],
            u["cost_rate"],
            tuple(u["sensors"]),
        )
        for u in data["uavs"]
    ]
    gcss = [Gcs(g["capacity"]) for g in data["gcss"]]
    penalties = {tuple(p["pair"]): p["extra_km"] for p in data.get("penalties", [])}
    dependencies = [tuple(d) for d in data.get("dependencies", [])]
    return MissionScenario(tasks, uavs, gcss, penalties, dependencies)


def save_scenario(sc: MissionScenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=2) + "\n")


def load_scenario(path) -> MissionScenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Mission genome and evaluation


@dataclass(frozen=True)
class MissionGenome:
    """Per-allele plan: who flies what, in which order, controlled from where."""

    assignment: Tuple[Tuple[int, ...], ...]  # per task: sorted UAV indices
    order: Tuple[int, ...]  # per task: permutation rank (lower flies first)
    gcs: Tuple[int, ...]  # per UAV: controlling GCS
    sensor: Tuple[int, ...]  # per task: sensor index into SENSORS
    profile: Tuple[int, ...]  # per task: 0 slow / 1 fast inbound leg
    return_profile: Tuple[int, ...]  # per UAV: profile of the return leg


class MissionProblem(Problem):
    """Seven-objective mission planning over a fixed scenario.

    Objectives (all minimized): total cost, makespan, risk (fuel-margin proxy
    in percent), number of UAVs used, total fuel, total flight time, total
    distance.
    """

    m = 7

    def __init__(self, scenario: MissionScenario):
        self.scenario = scenario
        self.n_tasks = len(scenario.tasks)
        self.n_uavs = len(scenario.uavs)
        self.n_gcss = len(scenario.gcss)
        self.n_multi = sum(1 for t in scenario.tasks if t.multi_uav)
        self.constraints_total = (
            self.n_tasks  # sensor per task
            + self.n_gcss  # capacity per GCS
            + self.n_uavs  # fuel per UAV
            + len(scenario.dependencies)  # order realizable per dependency
            + self.n_multi  # crew size per multi-UAV task
        )
        self._precompute()
        self.objective_upper_bounds = self._upper_bounds()

    def _precompute(self) -> None:
        sc = self.scenario
        tp = np.array([t.position for t in sc.tasks])
        diff = tp[:, None, :] - tp[None, :, :]
        self._task_dist = np.sqrt((diff**2).sum(axis=2))
        for (i, j), km in sc.nfz_penalty.items():
            self._task_dist[i, j] += km
            self._task_dist[j, i] += km
        bases = np.array([u.base for u in sc.uavs])
        bdiff = bases[:, None, :] - tp[None, :, :]
        self._base_dist = np.sqrt((bdiff**2).sum(axis=2))
        self._uav_sensors = [frozenset(u.sensors) for u in sc.uavs]
        self._durations_h = [t.duration_min / 60.0 for t in sc.tasks]
        self._deps_by_task: List[List[int]] = [[] for _ in range(self.n_tasks)]
        for before, after in sc.dependencies:
            self._deps_by_task[after].append(before)

    def _upper_bounds(self) -> np.ndarray:
        sc = self.scenario
        max_pen = max(sc.nfz_penalty.values()) if sc.nfz_penalty else 0.0
        max_leg = MAP_SIZE_KM * math.sqrt(2) + max_pen
        slow = PROFILE_MULTIPLIERS[0]
        min_speed = min(u.speed_kmh for u in sc.uavs) * slow
        total_dur = sum(self._durations_h)
        horizon_h = (self.n_tasks + 1) * max_leg / min_speed + total_dur
        cost_up = sum(u.cost_rate for u in sc.uavs) * horizon_h
        fuel_up = sum(u.fuel_rate_lph for u in sc.uavs) * horizon_h
        time_up = self.n_uavs * horizon_h
        dist_up = self.n_uavs * (self.n_tasks + 1) * max_leg
        bounds = np.array(
            [cost_up, horizon_h, 100.0, float(self.n_uavs), fuel_up, time_up, dist_up]
        )
        return bounds * 1.1

    # -- genome sampling and variation

    def _random_assignment(self, task: Task, rng: np.random.Generator) -> Tuple[int, ...]:
        if task.multi_uav:
            size = int(rng.integers(1, MULTI_UAV_CREW + 1))
            size = min(size, self.n_uavs)
            return tuple(sorted(rng.choice(self.n_uavs, size=size, replace=False).tolist()))
        return (int(rng.integers(self.n_uavs)),)

    def random_genome(self, rng: np.random.Generator) -> MissionGenome:
        return MissionGenome(
            assignment=tuple(self._random_assignment(t, rng) for t in self.scenario.tasks),
            order=tuple(int(v) for v in rng.permutation(self.n_tasks)),
            gcs=tuple(int(rng.integers(self.n_gcss)) for _ in range(self.n_uavs)),
            sensor=tuple(int(rng.integers(len(SENSORS))) for _ in range(self.n_tasks)),
            profile=tuple(int(rng.integers(2)) for _ in range(self.n_tasks)),
            return_profile=tuple(int(rng.integers(2)) for _ in range(self.n_uavs)),
        )

    def crossover(self, g1: MissionGenome, g2: MissionGenome, rng) -> Tuple[MissionGenome, MissionGenome]:
        def exchange(a: tuple, b: tuple):
            mask = rng.random(len(a)) < 0.5
            c = tuple(x if keep else y for x, y, keep in zip(a, b, mask))
            d = tuple(y if keep else x for x, y, keep in zip(a, b, mask))
            return c, d

        a1, a2 = exchange(g1.assignment, g2.assignment)
        s1, s2 = exchange(g1.sensor, g2.sensor)
        p1, p2 = exchange(g1.profile, g2.profile)
        c1, c2 = exchange(g1.gcs, g2.gcs)
        r1, r2 = exchange(g1.return_profile, g2.return_profile)
        # order keys travel as whole permutations so both children stay valid
        if rng.random() < 0.5:
            o1, o2 = g1.order, g2.order
        else:
            o1, o2 = g2.order, g1.order
        return (
            MissionGenome(a1, o1, c1, s1, p1, r1),
            MissionGenome(a2, o2, c2, s2, p2, r2),
        )

    def mutate(self, genome: MissionGenome, prob: float, rng) -> MissionGenome:
        if not 0.0 <= prob <= 1.0:
            raise ValueError("mutation probability must be in [0, 1]")
        assignment = tuple(
            self._random_assignment(t, rng) if rng.random() < prob else a
            for t, a in zip(self.scenario.tasks, genome.assignment)
        )
        sensor = tuple(
            int(rng.integers(len(SENSORS))) if rng.random() < prob else s
            for s in genome.sensor
        )
        profile = tuple(
            int(rng.integers(2)) if rng.random() < prob else p for p in genome.profile
        )
        gcs = tuple(
            int(rng.integers(self.n_gcss)) if rng.random() < prob else g for g in genome.gcs
        )
        return_profile = tuple(
            int(rng.integers(2)) if rng.random() < prob else r for r in genome.return_profile
        )
        order = list(genome.order)
        for i in range(self.n_tasks):
            if rng.random() < prob:
                j = int(rng.integers(self.n_tasks))
                order[i], order[j] = order[j], order[i]
        return MissionGenome(assignment, tuple(order), gcs, sensor, profile, return_profile)

    # -- evaluation

    def evaluate(self, genome: MissionGenome) -> Fitness:
        sc = self.scenario
        satisfied = 0

        # sensor constraint per task: chosen sensor matches and all crew carry it
        for t_idx, task in enumerate(sc.tasks):
            chosen = SENSORS[genome.sensor[t_idx]]
            if chosen == task.required_sensor and all(
                chosen in self._uav_sensors[u] for u in genome.assignment[t_idx]
            ):
                satisfied += 1

        # GCS capacity
        load = [0] * self.n_gcss
        for g in genome.gcs:
            load[g] += 1
        for g_idx, gcs in enumerate(sc.gcss):
            if load[g_idx] <= gcs.capacity:
                satisfied += 1

        # dependency order realizable
        for before, after in sc.dependencies:
            if genome.order[before] < genome.order[after]:
                satisfied += 1

        # multi-UAV crew size
        for t_idx, task in enumerate(sc.tasks):
            if task.multi_uav and len(genome.assignment[t_idx]) == MULTI_UAV_CREW:
                satisfied += 1

        # route simulation in global order-key order
        processing = sorted(range(self.n_tasks), key=lambda t: genome.order[t])
        clock = [0.0] * self.n_uavs
        at_task: List[Optional[int]] = [None] * self.n_uavs  # None = at base
        flight_h = [0.0] * self.n_uavs
        dist_km = [0.0] * self.n_uavs
        completion = [0.0] * self.n_tasks
        scheduled = [False] * self.n_tasks

        for t_idx in processing:
            crew = genome.assignment[t_idx]
            mult = PROFILE_MULTIPLIERS[genome.profile[t_idx]]
            duration = self._durations_h[t_idx] / len(crew)
            arrivals = []
            legs = []
            for u in crew:
                frm = at_task[u]
                d = self._base_dist[u][t_idx] if frm is None else self._task_dist[frm][t_idx]
                travel = d / (sc.uavs[u].speed_kmh * mult)
                arrivals.append(clock[u] + travel)
                legs.append((u, d, travel))
            start = max(arrivals)
            for dep in self._deps_by_task[t_idx]:
                if scheduled[dep]:
                    start = max(start, completion[dep])
            end = start + duration
            for u, d, travel in legs:
                flight_h[u] += travel + duration
                dist_km[u] += d
                clock[u] = end
                at_task[u] = t_idx
            completion[t_idx] = end
            scheduled[t_idx] = True

        used = [u for u in range(self.n_uavs) if at_task[u] is not None]
        makespan = 0.0
        for u in used:
            uav = sc.uavs[u]
            d_back = self._base_dist[u][at_task[u]]
            travel = d_back / (uav.speed_kmh * PROFILE_MULTIPLIERS[genome.return_profile[u]])
            flight_h[u] += travel
            dist_km[u] += d_back
            makespan = max(makespan, clock[u] + travel)

        fuel = [sc.uavs[u].fuel_rate_lph * flight_h[u] for u in range(self.n_uavs)]
        for u in range(self.n_uavs):
            if fuel[u] <= sc.uavs[u].fuel_capacity_l:
                satisfied += 1

        cost = sum(sc.uavs[u].cost_rate * flight_h[u] for u in range(self.n_uavs))
        risk = (
            100.0 * sum(min(fuel[u] / sc.uavs[u].fuel_capacity_l, 1.0) for u in used) / len(used)
            if used
            else 0.0
        )
        objectives = np.array(
            [
                cost,
                makespan,
                risk,
                float(len(used)),
                sum(fuel),
                sum(flight_h),
                sum(dist_km),
            ]
        )
        return Fitness(objectives, satisfied, self.constraints_total)
