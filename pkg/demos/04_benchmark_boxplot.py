"""A small Monte-Carlo comparison with box-plot deltas.

Runs two scenes at two noise levels for three algorithms, writes the per-run
CSV, then summarizes how far each algorithm sits below the per-cell best.
External methods can be added by appending rows of the same CSV schema
before calling ``boxplot_table``.

    python demos/04_benchmark_boxplot.py [outdir]
"""
import sys
from pathlib import Path

from cdid import builtin_scene
from cdid.bench import BenchPlan, aggregate_means, boxplot_table, run_benchmark
from cdid.io import write_boxplot_csv, write_metric_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else "bench_out")
out.mkdir(exist_ok=True)

plan = BenchPlan(scenes=[builtin_scene("gauss", size=64), builtin_scene("hills", size=64)],
                 sigmas=(0.1, 0.5), algorithms=("imre-ht", "imre-wi", "cd-it"), runs=3)
rows = run_benchmark(plan, progress=lambda r: print(
    f"{r['image']:6s} {r['sigma_phi']:4.2f} {r['algorithm']:8s} run {r['run']}  "
    f"PSNR_phi {r['psnr_phi']:6.2f}"))
write_metric_csv(rows, out / "runs.csv", extra_columns=("wall_s",))
write_metric_csv(aggregate_means(rows), out / "means.csv", extra_columns=("n_runs",))

stats = boxplot_table(rows)
write_boxplot_csv(stats, out / "box.csv", "psnr_phi")
print("\ndelta PSNR_phi to the per-cell best (dB)")
for algo, s in stats.items():
    print(f"{algo:8s} min {s['min']:6.2f}  q25 {s['q25']:6.2f}  median {s['median']:6.2f}  max {s['max']:6.2f}")
