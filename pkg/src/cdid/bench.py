"""Monte-Carlo benchmark: scenes x noise levels x algorithms x runs."""
from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .metrics import boxplot_deltas, evaluate
from .pipelines import ALGORITHMS, run_algorithms
from .scenes import NoiseSpec, TestScene, make_noisy, noise_sigma

__all__ = ["DEFAULT_SIGMAS", "NOISY", "BenchPlan", "run_benchmark", "aggregate_means", "boxplot_table"]

DEFAULT_SIGMAS = (0.05, 0.1, 0.2, 0.3, 0.5, 0.9)
NOISY = "noisy"  # baseline label: metrics of the unfiltered observation
METRICS = ("psnr_phi", "psnr_ampl", "rmse_phi_abs", "rmse_a", "snr_c", "snr_phi_abs")


@dataclass
class BenchPlan:
    scenes: list  # of TestScene
    sigmas: tuple = DEFAULT_SIGMAS
    algorithms: tuple = ("imre-ht", "imre-wi", "imre-it")
    runs: int = 10
    seed: int = 0
    config: dict | None = None

    def __post_init__(self):
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {list(ALGORITHMS)}")
        for s in self.sigmas:
            NoiseSpec(s, self.seed, self.runs)  # validates the range


def run_benchmark(plan: BenchPlan, *, workers: int | None = None, manifest: str = "",
                  include_noisy: bool = True, progress=None) -> list[dict]:
    """One row per (scene, sigma, algorithm, run), plus a ``noisy`` row per
    (scene, sigma, run) when ``include_noisy``.

    Noise for run ``r`` comes from the stream ``(seed, r)``, so every cell is
    reproducible on its own. Rows are emitted in a fixed nested order.
    """
    rows = []
    for scene in plan.scenes:
        if not isinstance(scene, TestScene):
            raise TypeError("plan.scenes must hold TestScene objects")
        for sigma in plan.sigmas:
            spec = NoiseSpec(float(sigma), plan.seed, plan.runs)
            for run in range(plan.runs):
                z = make_noisy(scene, spec, run)
                base = {"image": scene.name, "sigma_phi": float(sigma), "run": run, "manifest": manifest}
                if include_noisy:
                    rows.append({**base, "algorithm": NOISY, "wall_s": 0.0,
                                 **evaluate(z, scene).as_dict()})
                for algo in plan.algorithms:
                    t0 = time.perf_counter()
                    est = run_algorithms(z, [algo], _cfg_with_sigma(plan.config, scene, sigma),
                                         workers=workers)[algo]
                    wall = time.perf_counter() - t0
                    rows.append({**base, "algorithm": algo, "wall_s": wall,
                                 **evaluate(est, scene).as_dict()})
                    if progress is not None:
                        progress(rows[-1])
    return rows


def _cfg_with_sigma(config, scene, sigma_phi):
    cfg = dict(config or {})
    cfg["sigma"] = noise_sigma(sigma_phi, scene.amplitude)
    return cfg


def aggregate_means(rows) -> list[dict]:
    """Mean of every metric over runs, per (image, sigma_phi, algorithm), in first-seen order."""
    groups: dict = defaultdict(list)
    for r in rows:
        groups[(r["image"], float(r["sigma_phi"]), r["algorithm"])].append(r)
    out = []
    for (image, sigma, algo), rs in groups.items():
        row = {"image": image, "sigma_phi": sigma, "algorithm": algo, "run": "", "n_runs": len(rs)}
        for m in METRICS:
            vals = [float(r[m]) for r in rs if r.get(m) not in (None, "")]
            row[m] = float(np.mean(vals)) if vals else ""
        out.append(row)
    return out


def boxplot_table(rows, metric: str = "psnr_phi", exclude=(NOISY,)) -> dict:
    """Box-plot deltas of run-averaged ``metric`` against the per-cell best.

    ``rows`` may mix benchmark output with external-method rows of the same
    CSV schema. Lower-is-better metrics (RMSE) are negated first so that the
    best algorithm always sits at 0.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    sign = -1.0 if metric.startswith("rmse") else 1.0
    means = [r for r in aggregate_means(rows) if r["algorithm"] not in exclude]
    return boxplot_deltas((r["algorithm"], r["sigma_phi"], r["image"], sign * r[metric]) for r in means)
