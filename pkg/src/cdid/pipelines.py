"""Complex-domain BM3D-style filters: hard-threshold stage, Wiener stage,
the iterative wrapper and the named-algorithm dispatcher.

Work is split into fixed bands of reference rows. Each band fills its own
aggregation buffers and the bands are summed in band order, so the output is
bitwise identical for any number of workers.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import multiprocessing as mp

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from threadpoolctl import threadpool_limits

from .config import DEFAULT_SCHEDULE, DeltaSemantics, FilterConfig
from .domains import SparsityType, from_domain, to_domain
from .grouping import _axis_positions, as_field, match_groups
from .shrinkage import ThresholdSpec, shrink, universal_threshold, wiener_weights
from .tensor import analysis_batch, hosvd_batch, synthesis_batch

__all__ = [
    "ALGORITHMS",
    "AggregationBuffers",
    "ht_buffers",
    "wiener_buffers",
    "cdf_ht",
    "cdf_wiener",
    "cdf_iterative",
    "parse_algorithm",
    "run_named_algorithm",
    "run_algorithms",
    "resolve_workers",
]

BAND_ROWS = 8  # reference rows per work unit; never derived from the worker count
WIENER_ENERGY_FLOOR = 1e-12

ALGORITHMS = tuple(f"{s}-{p}" for s in ("cd", "imre", "pham") for p in ("ht", "wi", "it"))


@dataclass
class AggregationBuffers:
    numerator: np.ndarray  # complex, field-shaped
    denominator: np.ndarray  # real weights, field-shaped

    @classmethod
    def zeros(cls, shape) -> "AggregationBuffers":
        return cls(np.zeros(shape, complex), np.zeros(shape))

    def add(self, other: "AggregationBuffers") -> None:
        self.numerator += other.numerator
        self.denominator += other.denominator

    def estimate(self) -> np.ndarray:
        if not np.all(self.denominator > 0):
            raise AssertionError("aggregation left pixels without any patch estimate")
        return self.numerator / self.denominator


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get("CDID_THREADS", "1") or 1)
    cap = os.environ.get("CDID_THREADS")
    if cap:
        workers = min(workers, int(cap))
    return max(1, int(workers))


def _gather(view: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """(G, J, 2) coordinates -> (G, n1, n2, J) patch stack."""
    return np.moveaxis(view[coords[..., 0], coords[..., 1]], 1, -1)


def _accumulate(buf: AggregationBuffers, est: np.ndarray, coords: np.ndarray,
                weights: np.ndarray) -> None:
    h, w = buf.denominator.shape
    _, n1, n2, _ = est.shape
    rr = coords[:, None, None, :, 0] + np.arange(n1)[None, :, None, None]
    cc = coords[:, None, None, :, 1] + np.arange(n2)[None, None, :, None]
    idx = (rr * w + cc).ravel()
    wt = np.broadcast_to(weights[:, None, None, None], est.shape).ravel()
    val = (est * weights[:, None, None, None]).ravel()
    n = h * w
    buf.numerator += (np.bincount(idx, weights=val.real, minlength=n)
                      + 1j * np.bincount(idx, weights=val.imag, minlength=n)).reshape(h, w)
    buf.denominator += np.bincount(idx, weights=wt, minlength=n).reshape(h, w)


def _bands(field_shape, cfg):
    rows = _axis_positions(field_shape[0], cfg.n1, cfg.step)
    cols = _axis_positions(field_shape[1], cfg.n2, cfg.step)
    return [rows[i:i + BAND_ROWS] for i in range(0, rows.size, BAND_ROWS)], cols


def _ht_band(task):
    f, rows, cols, cfg, eta, absolute = task
    s = cfg.sparsity
    buf = AggregationBuffers.zeros(f.shape)
    view = sliding_window_view(f, (cfg.n1, cfg.n2))
    with threadpool_limits(1):
        coords, _, sizes = match_groups(f, rows, cols, cfg)
        for j in np.unique(sizes):
            c = coords[sizes == j, :j]
            t = to_domain(_gather(view, c), s)
            core, factors = hosvd_batch(t)
            if absolute is None:
                card = cfg.n1 * cfg.n2 * int(j)
                delta = universal_threshold(ThresholdSpec(eta, cfg.sigma, card)) if cfg.sigma > 0 else 0.0
            else:
                delta = absolute
            core, retained = shrink(core, delta, cfg.threshold_mode)
            est = from_domain(synthesis_batch(core, factors), s)
            _accumulate(buf, est, c, 1.0 / (1.0 + retained))
    return buf


def _wiener_band(task):
    noisy, pilot, rows, cols, cfg = task
    s = cfg.sparsity
    sigma = cfg.sigma / math.sqrt(2.0) if s.is_real else cfg.sigma
    buf = AggregationBuffers.zeros(noisy.shape)
    nview = sliding_window_view(noisy, (cfg.n1, cfg.n2))
    pview = sliding_window_view(pilot, (cfg.n1, cfg.n2))
    with threadpool_limits(1):
        coords, _, sizes = match_groups(pilot, rows, cols, cfg)
        for j in np.unique(sizes):
            c = coords[sizes == j, :j]
            pcore, factors = hosvd_batch(to_domain(_gather(pview, c), s))
            ncore = analysis_batch(to_domain(_gather(nview, c), s), factors)
            w = wiener_weights(pcore, sigma)
            energy = np.sum(w ** 2, axis=tuple(range(1, w.ndim)))
            est = from_domain(synthesis_batch(ncore * w, factors), s)
            _accumulate(buf, est, c, 1.0 / np.maximum(energy, WIENER_ENERGY_FLOOR))
    return buf


def _run_bands(fn, tasks, shape, workers):
    total = AggregationBuffers.zeros(shape)
    if workers <= 1 or len(tasks) <= 1:
        for t in tasks:
            total.add(fn(t))
        return total
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks)), mp_context=ctx) as ex:
        for part in ex.map(fn, tasks):
            total.add(part)
    return total


def ht_buffers(field, cfg: FilterConfig, *, eta: float | None = None,
               threshold: float | None = None, workers: int | None = None) -> AggregationBuffers:
    """Aggregation buffers of one hard/soft-threshold pass over ``field``.

    ``eta`` overrides ``cfg.eta``; ``threshold`` bypasses the universal
    threshold and is used as the absolute shrinkage level for every group.
    """
    f = as_field(field, cfg.n1, cfg.n2)
    eta = cfg.eta if eta is None else float(eta)
    bands, cols = _bands(f.shape, cfg)
    tasks = [(f, rows, cols, cfg, eta, threshold) for rows in bands]
    return _run_bands(_ht_band, tasks, f.shape, resolve_workers(workers))


def cdf_ht(field, cfg: FilterConfig, *, eta: float | None = None,
           threshold: float | None = None, workers: int | None = None) -> np.ndarray:
    """Grouping, HOSVD analysis, shrinkage, synthesis and aggregation."""
    return ht_buffers(field, cfg, eta=eta, threshold=threshold, workers=workers).estimate()


def wiener_buffers(noisy, pilot, cfg: FilterConfig, *,
                   workers: int | None = None) -> AggregationBuffers:
    z = as_field(noisy, cfg.n1, cfg.n2)
    p = as_field(pilot, cfg.n1, cfg.n2)
    if z.shape != p.shape:
        raise ValueError(f"noisy {z.shape} and pilot {p.shape} differ in shape")
    bands, cols = _bands(z.shape, cfg)
    tasks = [(z, p, rows, cols, cfg) for rows in bands]
    return _run_bands(_wiener_band, tasks, z.shape, resolve_workers(workers))


def cdf_wiener(noisy, pilot, cfg: FilterConfig, *, workers: int | None = None) -> np.ndarray:
    """Empirical Wiener stage. Groups are matched on ``pilot`` and both the
    pilot and the noisy groups are expanded in the pilot group's HOSVD basis."""
    return wiener_buffers(noisy, pilot, cfg, workers=workers).estimate()


def cdf_iterative(z, cfg: FilterConfig, *, workers: int | None = None, callback=None) -> np.ndarray:
    """Iterated threshold filter ``v = u + alpha (z - u); u = CDF(v, delta)``.

    ``callback(t, v, u, delta)`` is invoked after every pass (t starts at 1).
    """
    schedule = cfg.iter_schedule if cfg.iter_schedule is not None else DEFAULT_SCHEDULE
    if not schedule:
        raise ValueError("empty iteration schedule")
    z = as_field(z, cfg.n1, cfg.n2)
    u = z
    for t, (alpha, delta) in enumerate(schedule, start=1):
        v = u + alpha * (z - u)
        if cfg.delta_semantics is DeltaSemantics.ETA:
            u = cdf_ht(v, cfg, eta=delta, workers=workers)
        else:
            u = cdf_ht(v, cfg, threshold=delta, workers=workers)
        if callback is not None:
            callback(t, v, u, delta)
    return u


def parse_algorithm(name: str) -> tuple[SparsityType, str]:
    try:
        kind, stage = name.lower().split("-")
        sparsity = SparsityType(kind)
    except ValueError:
        raise ValueError(f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}") from None
    if stage not in ("ht", "wi", "it"):
        raise ValueError(f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}")
    return sparsity, stage


def _as_config(cfg_overrides) -> FilterConfig:
    if cfg_overrides is None:
        return FilterConfig()
    if isinstance(cfg_overrides, FilterConfig):
        return cfg_overrides
    return FilterConfig.from_dict(dict(cfg_overrides))


def run_algorithms(z, names, cfg_overrides=None, *, workers: int | None = None) -> dict:
    """Run several named algorithms on one input, reusing shared HT passes
    (``*-wi`` starts from the ``*-ht`` output of the same sparsity type)."""
    base = _as_config(cfg_overrides)
    out: dict = {}
    ht_cache: dict = {}
    for name in names:
        sparsity, stage = parse_algorithm(name)
        cfg = base.replace(sparsity=sparsity, wiener=(stage == "wi"))
        if stage == "it":
            out[name] = cdf_iterative(z, cfg.replace(wiener=False), workers=workers)
            continue
        if sparsity not in ht_cache:
            ht_cache[sparsity] = cdf_ht(z, cfg.replace(wiener=False), workers=workers)
        pilot = ht_cache[sparsity]
        out[name] = pilot if stage == "ht" else cdf_wiener(z, pilot, cfg, workers=workers)
    return out


def run_named_algorithm(z, name: str, cfg_overrides=None, *, workers: int | None = None) -> np.ndarray:
    """Dispatch ``{cd,imre,pham}-{ht,wi,it}`` to the matching stage plan."""
    return run_algorithms(z, [name], cfg_overrides, workers=workers)[name]
