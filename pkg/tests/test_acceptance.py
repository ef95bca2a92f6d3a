"""Acceptance criteria 1-10, one test each (criterion 9 is split in two).

Run alone with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary. Budget: about 15 minutes on
one core.
"""
import math
import os
import time

import numpy as np
import pytest

import cdid.pipelines as pipelines
from cdid import FilterConfig, NoiseSpec, SceneKind, builtin_scene, evaluate, make_noisy, run_algorithms
from cdid.metrics import psnr_phi, rmse_abs_phase, snr_c, wrap
from cdid.scenes import TestScene as Scene
from cdid.scenes import noise_sigma
from cdid.shrinkage import (
    hard_threshold_complex,
    hard_threshold_real,
    soft_threshold_complex,
    soft_threshold_real,
)
from cdid.tensor import hosvd, hosvd_synthesis

SEEDS = range(10)


def crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def noisy_and_sigma(scene, sigma_phi, seed):
    return make_noisy(scene, NoiseSpec(sigma_phi, seed)), noise_sigma(sigma_phi, scene.amplitude)


def test_c1_hosvd_suite(record):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = dict(roundtrip=0.0, unitary=0.0, parseval=0.0)
    for i in range(200):
        dims = [int(rng.integers(1, 9)), int(rng.integers(1, 9)), int(rng.integers(1, 33))]
        if i % 2:
            dims.append(2)
        t = crandn(rng, dims)
        f = hosvd(t)
        nrm = np.linalg.norm(t)
        worst["roundtrip"] = max(worst["roundtrip"], np.linalg.norm(hosvd_synthesis(f) - t) / nrm)
        worst["parseval"] = max(worst["parseval"], abs(np.linalg.norm(f.core) - nrm) / nrm)
        for m in f.factors:
            worst["unitary"] = max(worst["unitary"], np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
    elapsed = time.perf_counter() - t0
    ok = (worst["roundtrip"] <= 1e-10 and worst["unitary"] <= 1e-8 and worst["parseval"] <= 1e-10
          and elapsed < 60)
    record("1", ok, f"roundtrip {worst['roundtrip']:.1e}, unitarity {worst['unitary']:.1e}, "
                    f"energy {worst['parseval']:.1e}, {elapsed:.1f}s")
    assert ok


def test_c2_shrinkage_prox_oracle(record):
    rng = np.random.default_rng(7)
    x = rng.uniform(-5, 5, 1000)
    theta = rng.uniform(-np.pi, np.pi, 1000)
    alphas = np.linspace(0.05, 4.0, 20)
    # 10^4 intervals on [-R, R], built from integers so y = 0 is exactly on the grid
    R = 6.0
    h = 2 * R / 10000
    grid = np.arange(-5000, 5001) * h
    bad = 0
    for a in alphas:
        quad = 0.5 * (x[:, None] - grid[None, :]) ** 2
        for p in (0, 1):
            pen = a * (grid != 0) if p == 0 else a * np.abs(grid)
            cost = quad + pen[None, :]
            y_grid = grid[np.argmin(cost, axis=1)]
            best = cost.min(axis=1)
            if p == 0:
                y = hard_threshold_real(x, math.sqrt(2 * a))[0]
                # on the complex ray x e^{j theta} the prox acts on the signed radius
                yc = hard_threshold_complex(x * np.exp(1j * theta), math.sqrt(2 * a))[0]
            else:
                y = soft_threshold_real(x, a)[0]
                yc = soft_threshold_complex(x * np.exp(1j * theta), a)[0]
            yc_radius = np.real(yc * np.exp(-1j * theta))
            for out in (y, yc_radius):
                own = 0.5 * (x - out) ** 2 + (a * (out != 0) if p == 0 else a * np.abs(out))
                # a miss is allowed only where two minima tie to within the grid's cost error
                tie = np.abs(own - best) <= h * (np.abs(x) + R)
                bad += int(np.count_nonzero((np.abs(out - y_grid) > h) & ~tie))
                bad += int(np.count_nonzero(own > best + 1e-12))
    record("2", bad == 0, f"{bad} mismatches over 1000 scalars x 20 alphas x (hard, soft) x (real, complex)")
    assert bad == 0


def unit_amplitude(scene):
    return Scene(scene.phase, np.ones_like(scene.amplitude), scene.kind, scene.name + "-unit")


def test_c3_noise_statistics(record):
    scene = unit_amplitude(builtin_scene("gauss", size=256))
    z, sigma = noisy_and_sigma(scene, 0.1, 0)
    eps = z - scene.clean
    var_i = np.var(eps.real) / (sigma ** 2 / 2)
    var_q = np.var(eps.imag) / (sigma ** 2 / 2)
    phase_std = float(np.std(wrap(np.angle(z) - scene.phase)))
    bands = []
    for name in ("gauss", "hills"):
        s = unit_amplitude(builtin_scene(name, size=256))
        bands.append(evaluate(make_noisy(s, NoiseSpec(0.1, 1)), s).psnr_phi)
    ok = (abs(var_i - 1) <= 0.03 and abs(var_q - 1) <= 0.03 and abs(phase_std / 0.1 - 1) <= 0.05
          and all(34 <= b <= 36.5 for b in bands))
    record("3", ok, f"var ratios {var_i:.4f}/{var_q:.4f}, phase std {phase_std:.4f}, "
                    f"noisy PSNR_phi {bands[0]:.2f}/{bands[1]:.2f} dB")
    assert ok


def test_c4_denoising_gain(record):
    scene = builtin_scene("gauss", SceneKind.INTERFEROMETRIC, 256)
    t0 = time.perf_counter()
    gains = []
    for seed in SEEDS:
        z, sigma = noisy_and_sigma(scene, 0.1, seed)
        est = run_algorithms(z, ["imre-it"], {"sigma": sigma})["imre-it"]
        gains.append(evaluate(est, scene).psnr_phi - evaluate(z, scene).psnr_phi)
    elapsed = time.perf_counter() - t0
    ok = np.mean(gains) >= 12 and elapsed <= 600
    record("4", ok, f"mean gain {np.mean(gains):.2f} dB (min {min(gains):.2f}), {elapsed:.0f}s")
    assert ok


# 128^2 keeps 2 scenes x 2 noise levels x 10 seeds x 3 algorithms within budget
ORDER_SIZE = 128


def test_c5_algorithm_ordering(record):
    lines, ok = [], True
    for name in ("gauss", "hills"):
        scene = builtin_scene(name, SceneKind.INTERFEROMETRIC, ORDER_SIZE)
        for sigma_phi in (0.1, 0.3):
            acc = {k: [] for k in ("imre-ht", "imre-wi", "imre-it")}
            for seed in SEEDS:
                z, sigma = noisy_and_sigma(scene, sigma_phi, seed)
                for k, v in run_algorithms(z, list(acc), {"sigma": sigma}).items():
                    acc[k].append(evaluate(v, scene).psnr_phi)
            m = {k: float(np.mean(v)) for k, v in acc.items()}
            cell_ok = m["imre-it"] >= m["imre-ht"] - 0.3 and m["imre-wi"] >= m["imre-ht"] - 0.3
            ok &= cell_ok
            lines.append(f"{name}@{sigma_phi}: it-ht {m['imre-it'] - m['imre-ht']:+.2f}, "
                         f"wi-ht {m['imre-wi'] - m['imre-ht']:+.2f}")
    record("5", ok, "; ".join(lines))
    assert ok


def test_c6_iterative_schedule(record, monkeypatch):
    scene = builtin_scene("hills", size=48)
    z, sigma = noisy_and_sigma(scene, 0.2, 0)
    passes, seen = [], []
    real_ht = pipelines.cdf_ht

    def counting_ht(field, cfg, **kw):
        passes.append(kw)
        return real_ht(field, cfg, **kw)

    monkeypatch.setattr(pipelines, "cdf_ht", counting_ht)
    pipelines.cdf_iterative(z, FilterConfig(sigma=sigma), callback=lambda t, v, u, d: seen.append((t, v, d)))
    v1_exact = seen[0][1].tobytes() == z.tobytes()
    deltas = [p.get("eta") for p in passes]
    ok = v1_exact and len(passes) == 3 and deltas == [0.9, 0.5, 0.4] and [s[0] for s in seen] == [1, 2, 3]
    record("6", ok, f"v1 == z bitwise: {v1_exact}, passes {len(passes)}, deltas {deltas}")
    assert ok


def test_c7_metric_closed_forms(record):
    rng = np.random.default_rng(3)
    t = rng.uniform(-np.pi, np.pi, (32, 32))
    p = psnr_phi(wrap(t + np.pi), t)
    absolute = rng.uniform(0, 50, (32, 32))
    rmse, shift = rmse_abs_phase(absolute + 2 * np.pi, absolute)
    u = builtin_scene("gauss", size=32).clean
    s = snr_c(np.full(u.shape, u.mean()), u)
    ok = abs(p - 10 * math.log10(4)) <= 1e-6 and rmse <= 1e-12 and shift == 2 * np.pi and abs(s) <= 1e-9
    record("7", ok, f"psnr_phi(pi) {p:.9f} dB, rmse after +2pi {rmse:.1e}, snr_c(mean) {s:.1e} dB")
    assert ok


def test_c8_absolute_phase_smoke(record):
    scene = builtin_scene("gauss", SceneKind.ABSOLUTE, 256)
    wins, diffs = 0, []
    for seed in SEEDS:
        z, sigma = noisy_and_sigma(scene, 0.1, seed)
        est = run_algorithms(z, ["imre-it"], {"sigma": sigma})["imre-it"]
        d = evaluate(est, scene).snr_phi_abs - evaluate(z, scene).snr_phi_abs
        diffs.append(d)
        wins += d >= 3
    ok = wins >= 8
    record("8", ok, f"{wins}/10 seeds gain >= 3 dB (median gain {np.median(diffs):.2f} dB)")
    assert ok


@pytest.fixture(scope="module")
def perf_field():
    scene = builtin_scene("hills", size=256)
    return noisy_and_sigma(scene, 0.1, 0)


def test_c9a_single_thread_time_and_bitwise(record, perf_field, monkeypatch):
    monkeypatch.delenv("CDID_THREADS", raising=False)
    z, sigma = perf_field
    cfg = FilterConfig(sigma=sigma)
    t0 = time.perf_counter()
    one = pipelines.cdf_ht(z, cfg, workers=1)
    t1 = time.perf_counter() - t0
    four = pipelines.cdf_ht(z, cfg, workers=4)
    same = one.tobytes() == four.tobytes()
    ok = t1 <= 60 and same
    record("9a", ok, f"imre-ht 256^2 single worker {t1:.1f}s, 4-worker output bitwise identical: {same}")
    assert ok


def test_c9b_parallel_speedup(record, perf_field, monkeypatch):
    monkeypatch.delenv("CDID_THREADS", raising=False)
    z, sigma = perf_field
    cfg = FilterConfig(sigma=sigma)
    pipelines.cdf_ht(z, cfg, workers=4)  # warm the pool path
    t0 = time.perf_counter()
    pipelines.cdf_ht(z, cfg, workers=1)
    t1 = time.perf_counter() - t0
    t0 = time.perf_counter()
    pipelines.cdf_ht(z, cfg, workers=4)
    t4 = time.perf_counter() - t0
    speedup = t1 / t4
    ok = speedup >= 2.5
    record("9b", ok, f"4-worker speedup {speedup:.2f}x on {os.cpu_count()} visible CPU(s)")
    assert ok


def test_c10_no_table_reproduction_claimed(record):
    # the substitute band and ordering checks are criteria 3, 4, 5 and 8 above
    substitutes = [test_c3_noise_statistics, test_c4_denoising_gain, test_c5_algorithm_ordering,
                   test_c8_absolute_phase_smoke]
    ok = all(callable(f) for f in substitutes)
    record("10", ok, "full table reproduction not claimed; substitutes are criteria 3, 4, 5, 8")
    assert ok
