"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion. The Monte Carlo criteria take minutes.
"""

import dataclasses
import os
import pickle
import sys
import time
import warnings

import numpy as np
import pytest
from scipy import stats

from freqgc.bc_test import bc_test
from freqgc.bootstrap import BootstrapConfig, test_unconditional as run_unconditional
from freqgc.errors import InsufficientLags, QuantileUnstable
from freqgc.filters import hp_filter
from freqgc.sim_harness import (
    SimConfig,
    breitung_design,
    builtin_designs,
    design_by_name,
    run_design,
    simulate_var,
)
from freqgc.spectra import (
    FrequencyGrid,
    conditional_gc,
    spectral_matrix,
    unconditional_gc,
)
from freqgc.var_core import VarModel, autocovariance_var1, fit_var, is_stationary

WORKERS = int(os.environ.get("FREQGC_WORKERS", os.cpu_count() or 1))
ALPHA = 0.05


def _sim(name, n_boot=500, seed=20240101, **changes):
    design = design_by_name(name)
    if changes:
        design = design.with_(**changes)
    return run_design(design, SimConfig(n_boot=n_boot, seed=seed, workers=WORKERS))


def _random_stationary(rng, p, k):
    while True:
        L = rng.standard_normal((p, p))
        m = VarModel(rng.uniform(-0.5, 0.5, (k, p, p)) / k, L @ L.T + 0.2 * np.eye(p))
        if is_stationary(m):
            return m


def test_criterion_1_breitung_analytic_zero():
    t0 = time.perf_counter()
    worst = 0.0
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        for sigma_x in (1.0, 0.2, 5.0):
            for own in (0.0, 0.25):
                design = breitung_design(frac * np.pi, sigma_x, own)
                assert design.k == 3
                assert design.coefs[1, 0, 1] == pytest.approx(-2 * np.cos(frac * np.pi), abs=1e-15)
                worst = max(worst, abs(float(unconditional_gc(design.model, frac * np.pi))))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-8, worst
    assert elapsed < 1.0, elapsed


def test_criterion_2_autocovariance_oracle():
    t0 = time.perf_counter()
    R0a, _ = autocovariance_var1(VarModel([[0.0, 0.5], [0.0, 0.0]], np.eye(2)))
    R0b, _ = autocovariance_var1(VarModel([[0.5, 0.5], [0.0, 0.0]], np.eye(2)))
    elapsed = time.perf_counter() - t0
    np.testing.assert_allclose(R0a, np.diag([1.25, 1.0]), rtol=0, atol=1e-12)
    np.testing.assert_allclose(R0b, np.diag([5 / 3, 1.0]), rtol=0, atol=1e-12)
    assert elapsed < 1.0


@pytest.mark.slow
@pytest.mark.parametrize("functional", ["unconditional", "conditional", "difference"])
def test_criterion_3_level(functional):
    report = _sim(f"white-noise-{functional}", n_boot=500, T=200, n_mc=100)
    bound = ALPHA + 2 * np.sqrt(ALPHA * (1 - ALPHA) / 100)
    print(f"{functional}: max rejection {report.rejection_rate.max():.3f} (bound {bound:.4f}), "
          f"Bonferroni {report.overall_bonferroni_rate:.3f}")
    assert report.rejection_rate.max() <= bound
    assert 0.0 <= report.overall_bonferroni_rate <= 0.12


@pytest.mark.slow
def test_criterion_4_power_limit():
    report = _sim("decreasing-1", n_boot=500, T=200, n_mc=100)
    assert report.design.boundary
    print(f"lowest-frequency rejection {report.rejection_rate[0]:.3f}, "
          f"Bonferroni {report.overall_bonferroni_rate:.3f}")
    assert report.rejection_rate[0] == 1.0
    assert report.overall_bonferroni_rate >= 0.9
    assert abs(report.overall_bonferroni_rate - 0.98) <= 0.1


@pytest.mark.slow
def test_criterion_5_decreasing_shape():
    report = _sim("decreasing-0.5", n_boot=500, T=200, n_mc=100)
    rates = report.rejection_rate
    rho = stats.spearmanr(report.frequencies, rates).statistic
    print(f"spearman {rho}, first {rates[0]:.3f}, last {rates[-1]:.3f}")
    assert rho <= -0.8, f"Spearman rho {rho} (rates {rates.min():.3f}..{rates.max():.3f})"
    assert abs(rates[0] - 0.9) <= 0.15, rates[0]
    assert abs(rates[-1] - 0.3) <= 0.15, rates[-1]


def test_criterion_6_bc_comparator():
    rng = np.random.default_rng(6)
    x, y = rng.standard_normal((2, 200))
    x[1:] += 0.3 * y[:-1]
    grid = FrequencyGrid(200)
    p = bc_test(x, y, 2, grid).p_values
    assert np.ptp(p[:-1]) <= 1e-10
    with pytest.raises(InsufficientLags):
        bc_test(x, y, 1, np.array([np.pi / 3]))
    with pytest.raises(InsufficientLags):
        bc_test(x, y, 1, grid)

    T, n_trials = 500, 200
    grid = FrequencyGrid(T)
    rejections = np.zeros(len(grid))
    for child in np.random.SeedSequence(0).spawn(n_trials):
        xs, ys = np.random.default_rng(child).standard_normal((2, T))
        rejections += bc_test(xs, ys, 3, grid).p_values < ALPHA
    rates = rejections / n_trials
    se = np.sqrt(ALPHA * (1 - ALPHA) / n_trials)
    print(f"BC level range {rates.min():.3f}..{rates.max():.3f}, band +-{2 * se:.4f}")
    assert np.all(np.abs(rates - ALPHA) <= 2 * se + 1e-12)


def test_criterion_7_properties():
    rng = np.random.default_rng(7)
    for _ in range(20):
        model = _random_stationary(rng, int(rng.integers(2, 4)), int(rng.integers(1, 4)))
        h = spectral_matrix(model, rng.uniform(0, 2 * np.pi, 32))
        assert np.abs(h - np.conj(np.swapaxes(h, 1, 2))).max() <= 1e-10
        assert np.linalg.eigvalsh(h).min() >= -1e-10

    w = FrequencyGrid(100).omegas
    for _ in range(20):
        m2 = _random_stationary(rng, 2, int(rng.integers(1, 4)))
        u = unconditional_gc(m2, w)
        assert np.all(u >= 0)
        np.testing.assert_allclose(unconditional_gc(m2, 2 * np.pi - w), u, atol=1e-10)
        np.testing.assert_allclose(spectral_matrix(m2, 2 * np.pi - w), np.conj(spectral_matrix(m2, w)),
                                   atol=1e-10)
    for _ in range(20):
        # fitted pairs, as conditional spectra are only defined for consistent models
        design = design_by_name("cond-decreasing-0.5").with_(T=300)
        data = simulate_var(design, int(rng.integers(2**31)))
        k = int(rng.integers(1, 4))
        m3 = fit_var(data.values, k)
        m2 = fit_var(data.values[:, [0, 2]], k)
        c = conditional_gc(m2, m3, w)
        assert np.all(c >= 0)
        np.testing.assert_allclose(conditional_gc(m2, m3, 2 * np.pi - w), c, atol=1e-10)
        mu = fit_var(data.values[:, :2], k)
        d = unconditional_gc(mu, w) - c
        d_mirror = unconditional_gc(mu, 2 * np.pi - w) - conditional_gc(m2, m3, 2 * np.pi - w)
        np.testing.assert_allclose(d_mirror, d, atol=1e-10)

    x, y = np.random.default_rng(70).standard_normal((2, 80))
    config = BootstrapConfig(n_boot=160, seed=99)
    blobs = []
    for workers in (1, 4, 16):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QuantileUnstable)
            res = run_unconditional(x, y, dataclasses.replace(config, workers=workers))
        blobs.append(pickle.dumps(res))
    assert blobs[0] == blobs[1] == blobs[2]

    series = np.random.default_rng(71).standard_normal(100).cumsum()
    dec = hp_filter(series, 1600)
    n = len(series)
    D = np.diff(np.eye(n), n=2, axis=0)
    dense = np.linalg.solve(np.eye(n) + 1600 * D.T @ D, series)
    assert np.abs(dec.trend - dense).max() <= 1e-8
    assert np.abs(dec.trend + dec.cycle - series).max() <= 1e-9 * np.abs(series).max()


@pytest.mark.slow
def test_criterion_8_dp_at_least_prom():
    bad = []
    for design in builtin_designs():
        report = run_design(design.with_(n_mc=50),
                            SimConfig(n_boot=100, seed=8, workers=WORKERS))
        if np.any(report.degree_of_prominence < report.prominence_rate):
            bad.append(design.name)
    assert not bad, bad


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
