"""Quality indicators: hypervolume, offline HDist, summary stats, rank-sum test."""

from __future__ import annotations

import itertools
import math
import statistics
import warnings
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np


def pareto_filter(points: np.ndarray) -> np.ndarray:
    """Unique, mutually non-dominated (minimization) subset of an (n, m) matrix."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    keep = []
    for i, p in enumerate(pts):
        le = np.all(pts <= p, axis=1)
        lt = np.any(pts < p, axis=1)
        if not np.any(le & lt):
            keep.append(i)
    return pts[keep]


def _hv_recursive(pts: np.ndarray, ref: np.ndarray) -> float:
    # pts: non-dominated, all <= ref. Dimension sweep on the last objective.
    m = pts.shape[1]
    if len(pts) == 0:
        return 0.0
    if m == 1:
        return float(ref[0] - pts[:, 0].min())
    zs = np.unique(pts[:, -1])
    vol = 0.0
    for i, z in enumerate(zs):
        z_next = zs[i + 1] if i + 1 < len(zs) else ref[-1]
        depth = z_next - z
        if depth <= 0:
            continue
        slab = pareto_filter(pts[pts[:, -1] <= z][:, :-1])
        vol += depth * _hv_recursive(slab, ref[:-1])
    return vol


def hypervolume(front: Iterable[Sequence[float]], ref_point: Sequence[float]) -> float:
    """Exact hypervolume of a minimization front relative to a reference point.

    Computed by a recursive dimension sweep: slice along the last objective and
    recurse on the non-dominated projection of each slab. Points not weakly
    below the reference point contribute nothing and are dropped with a
    warning; duplicates and dominated points are filtered first.
    """
    pts = np.asarray(list(front), dtype=float)
    if pts.size == 0:
        return 0.0
    ref = np.asarray(ref_point, dtype=float)
    inside = np.all(pts <= ref, axis=1)
    if not inside.all():
        warnings.warn(
            f"dropping {int((~inside).sum())} points beyond the reference point",
            stacklevel=2,
        )
        pts = pts[inside]
    if len(pts) == 0:
        return 0.0
    return float(_hv_recursive(pareto_filter(pts), ref))


def hypervolume_estimate(
    front: Iterable[Sequence[float]],
    ref_point: Sequence[float],
    n_samples: int = 100_000,
    seed: int = 0,
) -> float:
    """Monte-Carlo hypervolume estimate; deterministic for a given seed.

    Samples uniformly in the box spanned by the points' lower corner and the
    reference point; suitable for fronts too large for the exact sweep.
    """
    pts = np.asarray(list(front), dtype=float)
    if pts.size == 0:
        return 0.0
    ref = np.asarray(ref_point, dtype=float)
    pts = pts[np.all(pts <= ref, axis=1)]
    if len(pts) == 0:
        return 0.0
    lo = pts.min(axis=0)
    box = np.prod(ref - lo)
    if box <= 0:
        return 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = max(1, min(n_samples, 20_000_000 // max(len(pts), 1)))
    remaining = n_samples
    while remaining > 0:
        take = min(chunk, remaining)
        x = rng.uniform(lo, ref, size=(take, len(ref)))
        dominated = np.zeros(take, dtype=bool)
        for p in pts:
            dominated |= np.all(x >= p, axis=1)
            if dominated.all():
                break
        hits += int(dominated.sum())
        remaining -= take
    return float(box) * hits / n_samples


def hdist_offline(
    s: Iterable[Sequence[float]],
    p: Iterable[Sequence[float]],
    ref_point: Sequence[float],
    hv_func=None,
) -> float:
    """Trade-off between front compactness and retained hypervolume.

    ``p`` is the reference front (best known approximation); ``s`` is the
    subset under evaluation. Members of ``s`` dominated within ``p`` are
    excluded. Returns (#p - #s) / #p * HV(s) / HV(p).
    """
    hv = hv_func if hv_func is not None else hypervolume
    p_pts = pareto_filter(np.asarray(list(p), dtype=float))
    if len(p_pts) == 0:
        raise ValueError("reference front is empty")
    hv_p = hv(p_pts, ref_point)
    if hv_p <= 0:
        raise ValueError("reference front has zero hypervolume")
    s_list = list(s)
    if not s_list:
        return 0.0
    s_pts = pareto_filter(np.asarray(s_list, dtype=float))
    # keep only members non-dominated within the reference front
    keep = []
    for q in s_pts:
        le = np.all(p_pts <= q, axis=1)
        lt = np.any(p_pts < q, axis=1)
        if not np.any(le & lt):
            keep.append(q)
    if not keep:
        return 0.0
    s_pts = np.asarray(keep)
    count_factor = (len(p_pts) - len(s_pts)) / len(p_pts)
    return count_factor * hv(s_pts, ref_point) / hv_p


def front_stats(
    values_by_config: Dict[str, Dict[str, List[float]]]
) -> List[Dict[str, object]]:
    """Mean and sample standard deviation per (configuration, metric).

    Input maps config id -> metric name -> per-run values. Output rows carry
    (config_id, metric, mean, std, n); a single value has std 0.
    """
    rows: List[Dict[str, object]] = []
    for config_id, metrics in values_by_config.items():
        for metric, values in metrics.items():
            if not values:
                continue
            mean = statistics.fmean(values)
            std = statistics.stdev(values) if len(values) > 1 else 0.0
            rows.append(
                {
                    "config_id": config_id,
                    "metric": metric,
                    "mean": mean,
                    "std": std,
                    "n": len(values),
                }
            )
    return rows


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_rank_sum_p(ranks: np.ndarray, n1: int, w_obs: float) -> float:
    # Permutation distribution of the size-n1 rank sum, counted by dynamic
    # programming over doubled ranks (midranks are half-integers).
    r2 = np.rint(ranks * 2).astype(int)
    total_sum = int(r2.sum())
    n = len(r2)
    # counts[k][s]: subsets of size k with doubled-rank sum s
    counts = np.zeros((n1 + 1, total_sum + 1), dtype=float)
    counts[0][0] = 1.0
    for r in r2:
        for k in range(min(n1, n), 0, -1):
            counts[k][r:] += counts[k - 1][: total_sum + 1 - r]
    n_combos = math.comb(n, n1)
    mean2 = n1 * (n + 1)  # doubled mean rank sum
    dev_obs = abs(2.0 * w_obs - mean2) - 1e-9
    sums = np.arange(total_sum + 1)
    extreme = np.abs(sums - mean2) >= dev_obs
    return float(counts[n1][extreme].sum() / n_combos)


def rank_sum_test(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided Mann-Whitney rank-sum p-value with midranks for ties.

    Exact permutation enumeration for samples of at most 12 per side; normal
    approximation with tie correction and continuity correction above that.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if len(a_arr) == 0 or len(b_arr) == 0:
        raise ValueError("both samples must be non-empty")
    n1, n2 = len(a_arr), len(b_arr)
    combined = np.concatenate([a_arr, b_arr])
    ranks = _midranks(combined)
    w = float(ranks[:n1].sum())
    if max(n1, n2) <= 12:
        return min(1.0, _exact_rank_sum_p(ranks, n1, w))
    n = n1 + n2
    mu = n1 * (n + 1) / 2.0
    _, tie_counts = np.unique(combined, return_counts=True)
    tie_term = float(((tie_counts**3 - tie_counts)).sum()) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = (abs(w - mu) - 0.5) / math.sqrt(var)
    z = max(z, 0.0)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))
