import numpy as np
import pytest

from cdid.config import DEFAULT_SCHEDULE, DeltaSemantics, FilterConfig
from cdid.pipelines import (
    ALGORITHMS,
    AggregationBuffers,
    cdf_ht,
    cdf_iterative,
    cdf_wiener,
    ht_buffers,
    parse_algorithm,
    resolve_workers,
    run_algorithms,
    run_named_algorithm,
)
from cdid.domains import SparsityType

SMALL = dict(search_window=11, j_max=16)


def field(seed, size=32):
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size] / size
    a = 1 + 0.3 * np.sin(3 * x)
    return a * np.exp(1j * (2 * y + x)), rng


def noise(rng, shape, sigma):
    return sigma / np.sqrt(2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def test_config_defaults_and_validation():
    c = FilterConfig()
    assert (c.n1, c.n2, c.step, c.search_window, c.j_max) == (8, 8, 3, 39, 32)
    assert c.iter_schedule == DEFAULT_SCHEDULE
    for bad in (dict(n1=0), dict(search_window=10), dict(step=9), dict(eta=0), dict(sigma=-1)):
        with pytest.raises(ValueError):
            FilterConfig(**bad)
    with pytest.raises(ValueError):
        FilterConfig.from_dict({"bogus": 1})
    assert FilterConfig.from_dict(c.to_dict()) == c
    assert FilterConfig.from_dict({"sparsity": "pham"}).sparsity is SparsityType.AMPHASE


@pytest.mark.parametrize("name", ALGORITHMS)
def test_noise_free_fixed_point(name):
    u, _ = field(0, 24)
    out = run_named_algorithm(u, name, dict(SMALL, sigma=0.0))
    assert np.max(np.abs(out - u)) <= 1e-9 * np.max(np.abs(u))


def test_constant_field_stays_constant():
    c = 0.3 - 0.7j
    out = cdf_ht(np.full((20, 20), c), FilterConfig(sigma=0.5, **SMALL))
    assert np.allclose(out, c, atol=1e-12)


@pytest.mark.parametrize("s", ["cd", "imre", "pham"])
def test_ht_reduces_mse_on_piecewise_constant(s):
    clean = np.ones((32, 32), complex)
    clean[:, 16:] = 0.6 * np.exp(1j * 1.0)
    wins = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        z = clean + noise(rng, clean.shape, 0.1 * np.sqrt(2))
        out = cdf_ht(z, FilterConfig(sigma=0.1 * np.sqrt(2), sparsity=s, **SMALL))
        wins += np.mean(np.abs(out - clean) ** 2) < np.mean(np.abs(z - clean) ** 2)
    assert wins == 10


def test_aggregation_is_convex_and_covers():
    u, rng = field(1)
    z = u + noise(rng, u.shape, 0.2)
    buf = ht_buffers(z, FilterConfig(sigma=0.2, **SMALL))
    assert np.all(buf.denominator > 0)
    with pytest.raises(AssertionError):
        AggregationBuffers.zeros((4, 4)).estimate()


def test_workers_bitwise_identical():
    u, rng = field(2, 40)
    z = u + noise(rng, u.shape, 0.2)
    cfg = FilterConfig(sigma=0.2, **SMALL)
    one = cdf_ht(z, cfg, workers=1)
    assert np.array_equal(one, cdf_ht(z, cfg, workers=3))
    assert np.array_equal(one, cdf_ht(z, cfg, workers=1))


def test_resolve_workers_env(monkeypatch):
    monkeypatch.setenv("CDID_THREADS", "2")
    assert resolve_workers(8) == 2
    assert resolve_workers(None) == 2
    monkeypatch.delenv("CDID_THREADS")
    assert resolve_workers(None) == 1


def test_wiener_examples():
    u, rng = field(3, 24)
    cfg = FilterConfig(sigma=0.0, **SMALL)
    assert np.allclose(cdf_wiener(u, u, cfg), u, atol=1e-10)
    z = u + noise(rng, u.shape, 0.3)
    zero = cdf_wiener(z, np.zeros_like(z), cfg.replace(sigma=0.3))
    assert np.all(zero == 0)
    with pytest.raises(ValueError):
        cdf_wiener(z, z[:-1], cfg)


def test_wiener_with_clean_pilot_reduces_variance():
    clean = np.full((32, 32), 1 + 0j)
    rng = np.random.default_rng(4)
    z = clean + noise(rng, clean.shape, 0.8)
    out = cdf_wiener(z, clean, FilterConfig(sigma=0.8, **SMALL))
    assert np.var(out) < np.var(z)


def test_energy_sanity():
    rng = np.random.default_rng(5)
    sigma = 0.3
    z = np.full((32, 32), 0.8j) + noise(rng, (32, 32), sigma)
    out = run_named_algorithm(z, "imre-wi", dict(SMALL, sigma=sigma))
    assert np.linalg.norm(out) <= np.linalg.norm(z) + 3 * sigma * np.sqrt(z.size)


def test_iterative_schedule_instrumented():
    u, rng = field(6, 24)
    z = u + noise(rng, u.shape, 0.2)
    seen = []
    cfg = FilterConfig(sigma=0.2, **SMALL)
    out = cdf_iterative(z, cfg, callback=lambda t, v, uu, d: seen.append((t, v, uu, d)))
    assert [s[0] for s in seen] == [1, 2, 3]
    assert [s[3] for s in seen] == [0.9, 0.5, 0.4]
    assert np.array_equal(seen[0][1], z)
    assert np.array_equal(seen[-1][2], out)
    # line 2 of the recursion for t = 2
    assert np.array_equal(seen[1][1], seen[0][2] + 0.35 * (z - seen[0][2]))


def test_iterative_single_step_equals_ht():
    u, rng = field(7, 24)
    z = u + noise(rng, u.shape, 0.2)
    cfg = FilterConfig(sigma=0.2, **SMALL)
    it = cdf_iterative(z, cfg.replace(iter_schedule=((1.0, cfg.eta),)))
    assert np.array_equal(it, cdf_ht(z, cfg))


def test_iterative_absolute_delta_semantics():
    u, rng = field(8, 24)
    z = u + noise(rng, u.shape, 0.2)
    cfg = FilterConfig(sigma=0.2, iter_schedule=((1.0, 0.5),), delta_semantics=DeltaSemantics.ABSOLUTE, **SMALL)
    assert np.array_equal(cdf_iterative(z, cfg), cdf_ht(z, cfg, threshold=0.5))


def test_iterative_empty_schedule():
    with pytest.raises(ValueError):
        cdf_iterative(np.zeros((16, 16), complex), FilterConfig(iter_schedule=()))


def test_dispatch():
    assert parse_algorithm("imre-it") == (SparsityType.REIM, "it")
    assert parse_algorithm("cd-ht") == (SparsityType.COMPLEX, "ht")
    with pytest.raises(ValueError):
        parse_algorithm("foo")
    with pytest.raises(ValueError):
        run_named_algorithm(np.zeros((16, 16), complex), "imre-xx")


def test_run_algorithms_shares_ht_pass():
    u, rng = field(9, 24)
    z = u + noise(rng, u.shape, 0.2)
    cfg = dict(SMALL, sigma=0.2)
    both = run_algorithms(z, ["cd-ht", "cd-wi"], cfg)
    assert np.array_equal(both["cd-ht"], run_named_algorithm(z, "cd-ht", cfg))
    assert np.array_equal(both["cd-wi"], run_named_algorithm(z, "cd-wi", cfg))
