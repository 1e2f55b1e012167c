"""Figure rendering for experiment artifacts.

Renders the per-generation metric series (one figure per metric, one line per
algorithm variant) and a parallel-coordinates view of the final fronts, next
to the delimited tables produced by :func:`kneecone.experiment.emit_plot_data`.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SERIES_METRICS = ("theta", "front_size", "hypervolume", "hdist")

_METRIC_LABELS = {
    "theta": "cone angle (degrees)",
    "front_size": "knee front size",
    "hypervolume": "normalized hypervolume",
    "hdist": "online HDist",
}


def render_figures(out_dir) -> List[Path]:
    """Render PNG figures from the plotdata tables; returns the written paths."""
    plot_dir = Path(out_dir) / "plotdata"
    series_files = sorted(plot_dir.glob("series_*.csv"))
    parallel_file = plot_dir / "parallel.csv"
    missing = [str(p) for p in [plot_dir, parallel_file] if not p.exists()]
    if not series_files:
        missing.append(str(plot_dir / "series_*.csv"))
    if missing:
        raise FileNotFoundError(f"missing plot tables: {missing}")

    series: Dict[str, List[dict]] = {}
    for path in series_files:
        vid = path.stem.replace("series_", "", 1)
        with path.open() as fh:
            series[vid] = list(csv.DictReader(fh))

    written: List[Path] = []
    for metric in SERIES_METRICS:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for vid, rows in series.items():
            gens = [int(r["generation"]) for r in rows]
            vals = [float(r[metric]) for r in rows]
            ax.plot(gens, vals, label=vid, linewidth=1.3)
        ax.set_xlabel("generation")
        ax.set_ylabel(_METRIC_LABELS[metric])
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        out_path = plot_dir / f"fig_{metric}.png"
        fig.savefig(out_path, dpi=130)
        plt.close(fig)
        written.append(out_path)

    with parallel_file.open() as fh:
        rows = list(csv.DictReader(fh))
    if rows:
        axes_names = [k for k in rows[0] if k.startswith("f")]
        variants = sorted({r["variant"] for r in rows})
        cmap = plt.get_cmap("tab10")
        colors = {vid: cmap(i % 10) for i, vid in enumerate(variants)}
        fig, ax = plt.subplots(figsize=(8, 4.5))
        xs = range(len(axes_names))
        for r in rows:
            ax.plot(
                xs,
                [float(r[a]) for a in axes_names],
                color=colors[r["variant"]],
                alpha=0.35,
                linewidth=0.8,
            )
        handles = [plt.Line2D([0], [0], color=colors[v], label=v) for v in variants]
        ax.legend(handles=handles, fontsize=8)
        ax.set_xticks(list(xs))
        ax.set_xticklabels(axes_names)
        ax.set_ylabel("normalized objective value")
        ax.grid(alpha=0.3)
        fig.tight_layout()
        out_path = plot_dir / "fig_parallel.png"
        fig.savefig(out_path, dpi=130)
        plt.close(fig)
        written.append(out_path)
    return written
