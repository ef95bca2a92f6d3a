"""Phase wrapping, Itoh unwrapping, accuracy criteria and box-plot statistics."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass

import numpy as np

from .domains import principal_angle

__all__ = [
    "wrap",
    "unwrap_simple",
    "psnr_phi",
    "psnr_ampl",
    "rmse_abs_phase",
    "rmse_a",
    "snr_c",
    "snr_phi_abs",
    "MetricReport",
    "evaluate",
    "boxplot_deltas",
]

TWO_PI = 2.0 * math.pi


def wrap(phi):
    """Map phases to ``[-pi, pi)``; values already in range are returned untouched."""
    phi = np.asarray(phi, dtype=float)
    inside = (phi >= -math.pi) & (phi < math.pi)
    w = np.mod(phi + math.pi, TWO_PI) - math.pi
    w = np.where(w >= math.pi, w - TWO_PI, w)
    w = np.where(w < -math.pi, -math.pi, w)
    out = np.where(inside, phi, w)
    return out[()] if out.ndim == 0 else out


def _same_shape(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def _db(num: float, den: float) -> float:
    if den == 0:
        return math.inf
    return 10.0 * math.log10(num / den)


def psnr_phi(est_phase, true_phase) -> float:
    """Interferometric-phase PSNR with peak ``2 pi`` on the wrapped error."""
    est, true = _same_shape(est_phase, true_phase)
    err = wrap(est - true)
    return _db(err.size * TWO_PI ** 2, float(np.sum(err ** 2)))


def psnr_ampl(est_a, true_a) -> float:
    est, true = _same_shape(est_a, true_a)
    peak = float(np.max(true))
    if peak == 0:
        raise ValueError("true amplitude is identically zero")
    return _db(true.size * peak ** 2, float(np.sum((true - est) ** 2)))


def _integer_part(x: float) -> int:
    """Nearest integer, half-integers going to the smaller magnitude.

    Pure truncation would send 0.999... (a 2 pi offset seen through rounding
    noise) to 0, so the bracket is read as rounding with ties toward zero.
    """
    return int(math.copysign(math.ceil(abs(x) - 0.5), x))


def _shift(est, true) -> float:
    return TWO_PI * _integer_part((float(np.mean(est)) - float(np.mean(true))) / TWO_PI)


def rmse_abs_phase(est_abs, true_abs) -> tuple[float, float]:
    """RMSE of an absolute-phase estimate after removing a global ``2 pi k`` shift.

    Returns ``(rmse, shift)``; ``k`` is the mean difference in units of
    ``2 pi`` rounded to the nearest integer, ties toward zero.
    """
    est, true = _same_shape(est_abs, true_abs)
    delta = _shift(est, true)
    return math.sqrt(float(np.mean((true - est + delta) ** 2))), delta


def rmse_a(est_a, true_a) -> float:
    est, true = _same_shape(est_a, true_a)
    return math.sqrt(float(np.mean((true - est) ** 2)))


def snr_c(est_field, true_field) -> float:
    est, true = _same_shape(est_field, true_field)
    num = float(np.sum(np.abs(true - true.mean()) ** 2))
    if num == 0:
        raise ValueError("true field is constant")
    return _db(num, float(np.sum(np.abs(true - est) ** 2)))


def snr_phi_abs(est_abs, true_abs) -> float:
    est, true = _same_shape(est_abs, true_abs)
    num = float(np.sum((true - true.mean()) ** 2))
    if num == 0:
        raise ValueError("true phase is constant")
    delta = _shift(est, true)
    return _db(num, float(np.sum((true - est + delta) ** 2)))


def unwrap_simple(wrapped) -> np.ndarray:
    """Itoh unwrapping: down the first column, then along every row.

    Consecutive differences along that path are re-wrapped into ``(-pi, pi]``
    and integrated. Exact when every true step is below ``pi`` in magnitude.
    """
    p = np.asarray(wrapped, dtype=float)
    if p.ndim != 2:
        raise ValueError("unwrap_simple expects a 2-D field")

    def rewrap(d):
        return -wrap(-d)

    first = p[0, 0] + np.concatenate([[0.0], np.cumsum(rewrap(np.diff(p[:, 0])))])
    steps = rewrap(np.diff(p, axis=1))
    return first[:, None] + np.concatenate([np.zeros((p.shape[0], 1)), np.cumsum(steps, axis=1)], axis=1)


@dataclass
class MetricReport:
    psnr_phi: float
    psnr_ampl: float
    rmse_phi_abs: float
    rmse_a: float
    snr_c: float
    snr_phi_abs: float
    delta_phi_shift: float

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(est_field, scene) -> MetricReport:
    """All criteria for a complex estimate of ``scene``.

    Phase and amplitude are read off as ``arg`` and ``|.|``; the absolute
    phase estimate is the Itoh unwrapping of ``arg``.
    """
    est = np.asarray(est_field)
    if est.shape != scene.shape:
        raise ValueError(f"estimate {est.shape} does not match scene {scene.shape}")
    phase = principal_angle(est)
    amp = np.abs(est)
    est_abs = unwrap_simple(phase)
    rmse_phi, shift = rmse_abs_phase(est_abs, scene.phase)
    return MetricReport(
        psnr_phi=psnr_phi(phase, scene.phase),
        psnr_ampl=psnr_ampl(amp, scene.amplitude),
        rmse_phi_abs=rmse_phi,
        rmse_a=rmse_a(amp, scene.amplitude),
        snr_c=snr_c(est, scene.clean),
        snr_phi_abs=snr_phi_abs(est_abs, scene.phase),
        delta_phi_shift=shift,
    )


def boxplot_deltas(results) -> dict:
    """Distance of every algorithm from the per-cell best.

    ``results`` is an iterable of ``(algorithm, sigma, image, value)``; every
    algorithm must cover every (sigma, image) cell exactly once. For each
    algorithm returns ``{"min", "q25", "median", "q75", "max", "n"}`` over
    ``value - max_over_algorithms(value)``.
    """
    table: dict = defaultdict(dict)
    algos: list = []
    for algo, sigma, image, value in results:
        cell = (float(sigma), str(image))
        if cell in table[algo]:
            raise ValueError(f"duplicate cell {cell} for {algo}")
        table[algo][cell] = float(value)
        if algo not in algos:
            algos.append(algo)
    if not algos:
        raise ValueError("empty results table")
    cells = sorted(set().union(*(t.keys() for t in table.values())))
    for algo in algos:
        missing = [c for c in cells if c not in table[algo]]
        if missing:
            raise ValueError(f"{algo} is missing cells {missing}")
    best = {c: max(table[a][c] for a in algos) for c in cells}
    stats = {}
    for algo in algos:
        d = np.array([table[algo][c] - best[c] for c in cells])
        q25, med, q75 = np.quantile(d, [0.25, 0.5, 0.75])
        stats[algo] = {"min": float(d.min()), "q25": float(q25), "median": float(med),
                       "q75": float(q75), "max": float(d.max()), "n": int(d.size)}
    return stats
