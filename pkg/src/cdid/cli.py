"""Command-line entry point: ``cdid {denoise,simulate,evaluate,benchmark}``.

Errors are reported as a single JSON object on stderr, e.g.
``{"error": "missing_file", "message": "..."}``, with exit code 2 for usage
problems and 1 for everything else.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bench import DEFAULT_SIGMAS, NOISY, BenchPlan, aggregate_means, boxplot_table, run_benchmark
from .config import FilterConfig
from .io import (
    FormatError,
    RunManifest,
    load_gray_image,
    read_field,
    read_metric_csv,
    sha256_file,
    write_boxplot_csv,
    write_field,
    write_metric_csv,
)
from .metrics import evaluate
from .pipelines import ALGORITHMS, run_named_algorithm
from .scenes import NoiseSpec, SceneKind, TestScene, build_scene, builtin_scene, make_noisy, noise_sigma

__all__ = ["main", "CliError"]


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int = 1):
        super().__init__(message)
        self.code = code
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message, status=2)


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from None


def _str_list(text: str) -> tuple:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cdid", description="Complex-domain HOSVD denoising of complex-valued images.")
    p.add_argument("--version", action="version", version=f"cdid {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("denoise", help="filter a complex field with known noise level")
    d.add_argument("--in", dest="inp", required=True, help="noisy CDID1 field")
    d.add_argument("--algo", required=True, choices=ALGORITHMS)
    d.add_argument("--sigma", required=True, type=float, help="complex noise std")
    d.add_argument("--out", required=True)
    d.add_argument("--config", help="JSON file with FilterConfig overrides")
    d.add_argument("--workers", type=int, default=None)
    d.add_argument("--manifest", help="write a run manifest JSON here")

    s = sub.add_parser("simulate", help="noisy observation of a test scene")
    s.add_argument("--scene", required=True, help="gauss | hills | file:image.pgm")
    s.add_argument("--kind", default="interf", choices=[k.value for k in SceneKind])
    s.add_argument("--size", type=int, default=256, help="side of built-in scenes")
    s.add_argument("--sigma-phi", dest="sigma_phi", required=True, type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--run", type=int, default=0, help="Monte-Carlo run index")
    s.add_argument("--out", required=True)
    s.add_argument("--truth", required=True, help="amplitude + 1j * phase of the clean scene")
    s.add_argument("--manifest")

    e = sub.add_parser("evaluate", help="accuracy criteria of an estimate")
    e.add_argument("--est", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--kind", default="interf", choices=[k.value for k in SceneKind])
    e.add_argument("--csv", required=True)
    e.add_argument("--name", default="scene", help="image column value")
    e.add_argument("--algo", default="", help="algorithm column value")
    e.add_argument("--sigma-phi", dest="sigma_phi", type=float, default=None)

    b = sub.add_parser("benchmark", help="Monte-Carlo table and box-plot statistics")
    b.add_argument("--scenes", type=_str_list, default=("gauss", "hills"))
    b.add_argument("--kind", default="interf", choices=[k.value for k in SceneKind])
    b.add_argument("--size", type=int, default=256)
    b.add_argument("--sigmas", type=_float_list, default=DEFAULT_SIGMAS)
    b.add_argument("--algos", type=_str_list, default=("imre-ht", "imre-wi", "imre-it"))
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv", required=True, help="per-run rows")
    b.add_argument("--boxplot", help="box-plot delta stats of PSNR_phi")
    b.add_argument("--means", help="per-cell means over runs")
    b.add_argument("--external", action="append", default=[],
                   help="CSV of other methods, same schema; joins the box plot")
    b.add_argument("--config")
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--manifest", help="default: <csv>.manifest.json")
    return p


def _require(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CliError("missing_file", f"no such file: {path}")
    return p


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(_require(path).read_text())
        FilterConfig.from_dict({**FilterConfig().to_dict(), **data})
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise CliError("bad_config", f"{path}: {exc}") from None
    return data


def _scene(spec: str, kind: str, size: int) -> TestScene:
    if spec.startswith("file:"):
        path = _require(spec[5:])
        return build_scene(path.stem, load_gray_image(path), kind)
    return builtin_scene(spec, kind, size)


def _cmd_denoise(a) -> dict:
    t0 = time.perf_counter()
    z = read_field(_require(a.inp))
    cfg = _load_config(a.config)
    cfg["sigma"] = a.sigma
    est = run_named_algorithm(z, a.algo, cfg, workers=a.workers)
    write_field(est, a.out)
    if a.manifest:
        RunManifest("denoise", {**cfg, "algo": a.algo}, inputs={a.inp: sha256_file(a.inp)},
                    timing={"denoise": time.perf_counter() - t0}).write(a.manifest)
    return {"out": a.out, "shape": list(est.shape)}


def _cmd_simulate(a) -> dict:
    scene = _scene(a.scene, a.kind, a.size)
    spec = NoiseSpec(a.sigma_phi, a.seed)
    z = make_noisy(scene, spec, a.run)
    write_field(z, a.out)
    write_field(scene.amplitude + 1j * scene.phase, a.truth)
    sigma = noise_sigma(a.sigma_phi, scene.amplitude)
    if a.manifest:
        inputs = {a.scene[5:]: sha256_file(a.scene[5:])} if a.scene.startswith("file:") else {}
        RunManifest("simulate", {"scene": a.scene, "kind": a.kind, "size": a.size,
                                 "sigma_phi": a.sigma_phi, "run": a.run},
                    seed=a.seed, inputs=inputs).write(a.manifest)
    return {"out": a.out, "truth": a.truth, "sigma": sigma}


def _cmd_evaluate(a) -> dict:
    est = read_field(_require(a.est))
    truth = read_field(_require(a.truth))
    if est.shape != truth.shape:
        raise CliError("dims_mismatch", f"estimate {est.shape} vs truth {truth.shape}")
    scene = TestScene(phase=truth.imag.copy(), amplitude=truth.real.copy(), kind=SceneKind(a.kind), name=a.name)
    report = evaluate(est, scene).as_dict()
    sigma_phi = "" if a.sigma_phi is None else a.sigma_phi
    row = {"image": a.name, "sigma_phi": sigma_phi, "algorithm": a.algo, "run": "", **report}
    write_metric_csv([row], a.csv, extra_columns=("delta_phi_shift",))
    return report


def _cmd_benchmark(a) -> dict:
    t0 = time.perf_counter()
    cfg = _load_config(a.config)
    scenes = [_scene(s, a.kind, a.size) for s in a.scenes]
    try:
        plan = BenchPlan(scenes=scenes, sigmas=a.sigmas, algorithms=a.algos, runs=a.runs,
                         seed=a.seed, config=cfg)
    except ValueError as exc:
        raise CliError("bad_plan", str(exc), status=2) from None
    inputs = {s[5:]: sha256_file(s[5:]) for s in a.scenes if s.startswith("file:")}
    inputs.update({p: sha256_file(_require(p)) for p in a.external})
    manifest = RunManifest("benchmark", {"filter": cfg, "scenes": list(a.scenes), "kind": a.kind,
                                         "size": a.size, "sigmas": list(a.sigmas),
                                         "algos": list(a.algos), "runs": a.runs},
                           seed=a.seed, inputs=inputs)
    digest = manifest.digest()
    rows = run_benchmark(plan, workers=a.workers, manifest=digest)
    extra = ("delta_phi_shift", "wall_s", "manifest")
    write_metric_csv(rows, a.csv, extra_columns=extra)
    external = [r for p in a.external for r in read_metric_csv(p)]
    if a.means:
        write_metric_csv(aggregate_means(rows + external), a.means, extra_columns=("n_runs",))
    if a.boxplot:
        write_boxplot_csv(boxplot_table(rows + external), a.boxplot, "psnr_phi")
    manifest.timing = {"benchmark": time.perf_counter() - t0}
    manifest.write(a.manifest or f"{a.csv}.manifest.json")
    return {"rows": len(rows), "manifest": digest,
            "algorithms": sorted({r["algorithm"] for r in rows if r["algorithm"] != NOISY})}


COMMANDS = {"denoise": _cmd_denoise, "simulate": _cmd_simulate,
            "evaluate": _cmd_evaluate, "benchmark": _cmd_benchmark}


def _fail(code: str, message: str, status: int) -> int:
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        result = COMMANDS[args.command](args)
    except CliError as exc:
        return _fail(exc.code, str(exc), exc.status)
    except FormatError as exc:
        return _fail(exc.code, str(exc), 1)
    except FileNotFoundError as exc:
        return _fail("missing_file", str(exc), 1)
    except (ValueError, IndexError, OSError) as exc:
        return _fail("invalid_input", str(exc), 1)
    print(json.dumps(result, default=_jsonable))
    return 0


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(type(v).__name__)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
