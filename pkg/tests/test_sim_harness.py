import json

import numpy as np
import pytest

from freqgc.errors import ExplodingPath
from freqgc.sim_harness import (
    SimConfig,
    SimDesign,
    breitung_design,
    builtin_designs,
    design_by_name,
    load_designs,
    run_design,
    simulate_var,
    bonferroni_cases,
)
from freqgc.spectra import SpectrumConfig, gc_spectrum
from freqgc.var_core import is_stationary

SMALL = SimConfig(n_boot=100, seed=5)


class TestSimulate:
    def test_white_noise_covariance(self):
        d = SimDesign("wn", np.zeros((1, 2, 2)), np.eye(2), T=5000)
        data = simulate_var(d, 1)
        assert data.T == 5000 and data.names == ("x", "y")
        assert np.abs(np.cov(data.values.T) - np.eye(2)).max() < 0.1

    def test_pathological_autocovariance(self):
        d = SimDesign("path", [[0.0, 0.5], [0.0, 0.0]], np.eye(2), T=100_000)
        R0 = np.cov(simulate_var(d, 2).values.T)
        np.testing.assert_allclose(np.diag(R0), [1.25, 1.0], rtol=0.02)
        assert abs(R0[0, 1]) < 0.02

    def test_correlated_innovations(self):
        S = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 2.0]])
        d = SimDesign("c", np.zeros((1, 3, 3)), S, functional="conditional", T=20_000)
        np.testing.assert_allclose(np.cov(simulate_var(d, 3).values.T), S, atol=0.05)

    def test_deterministic(self):
        d = design_by_name("decreasing-0.5")
        np.testing.assert_array_equal(simulate_var(d, 9).values, simulate_var(d, 9).values)
        assert not np.array_equal(simulate_var(d, 9).values, simulate_var(d, 10).values)

    def test_exploding(self):
        d = SimDesign("boom", 1.5 * np.eye(2), np.eye(2), boundary=True)
        with pytest.raises(ExplodingPath):
            simulate_var(d, 0)

    def test_non_stationary_needs_flag(self):
        with pytest.raises(ValueError):
            simulate_var(SimDesign("rw", np.eye(2), np.eye(2)), 0)

    def test_boundary_allowed(self):
        data = simulate_var(design_by_name("decreasing-1"), 0)
        assert np.all(np.isfinite(data.values))


class TestDesign:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimDesign("bad", np.zeros((1, 3, 3)), np.eye(3))  # unconditional needs p=2
        with pytest.raises(ValueError):
            SimDesign("bad", np.zeros((1, 2, 2)), np.eye(2), n_mc=49)
        with pytest.raises(ValueError):
            SimDesign("bad", np.zeros((1, 2, 2)), np.eye(3))

    def test_diagonal_sigma_shorthand(self):
        d = SimDesign("d", np.zeros((1, 2, 2)), [5.0, 1.0])
        np.testing.assert_array_equal(d.sigma, np.diag([5.0, 1.0]))


class TestCatalogue:
    def test_contents(self):
        designs = builtin_designs()
        names = [d.name for d in designs]
        assert len(set(names)) == len(names) >= 7
        for a in ("0", "0.2", "0.5", "0.8", "1"):
            assert f"diag-{a}" in names
        assert sum(n.startswith("breitung-") for n in names) == 45

    def test_case_binding_resolves(self):
        cases = bonferroni_cases()
        assert sorted(cases) == list(range(1, 8))
        for case in cases.values():
            design_by_name(case["design"])
        assert cases[3]["reported_rate"] == 0.05
        assert cases[2]["reported_rate"] == 0.98
        assert cases[7]["reported_rate"] == 0.99

    def test_breitung_middle_coefficient(self):
        d = breitung_design(np.pi / 2)
        assert abs(d.coefs[1, 0, 1]) < 1e-15
        assert d.coefs[0, 0, 1] == d.coefs[2, 0, 1] == 1.0
        assert breitung_design(0.0).coefs[1, 0, 1] == -2.0

    def test_non_boundary_designs_are_stationary(self):
        for d in builtin_designs():
            if not d.boundary:
                assert is_stationary(d.model), d.name

    def test_masked_design(self):
        # W - Y is an AR(1) independent of Y and X loads on its lag, so Y alone
        # carries no information about X while Y given W does.
        d = design_by_name("diff-masked-0.5").with_(T=5000)
        data = simulate_var(d, 1)
        cfg = SpectrumConfig(k=4)
        uncond = gc_spectrum(data, "x", "y", config=cfg).values
        cond = gc_spectrum(data, "x", "y", "w", config=cfg).values
        assert uncond.max() < 0.01
        assert cond.min() > 0.1
        assert cond[0] > cond[-1]

    def test_load_designs_round_trip(self, tmp_path):
        spec = [
            {"name": "mine", "k": 2, "A": list(range(8)), "Sigma": [1.0, 2.0], "T": 80, "n_mc": 60,
             "boundary": True},
            {"name": "tri", "k": 1, "A": [[0.1, 0, 0], [0, 0.2, 0], [0, 0, 0.3]],
             "Sigma": np.eye(3).tolist(), "functional": "difference"},
        ]
        path = tmp_path / "designs.json"
        path.write_text(json.dumps({"designs": spec}))
        a, b = load_designs(path)
        np.testing.assert_array_equal(a.coefs[1], [[4, 5], [6, 7]])
        np.testing.assert_array_equal(a.sigma, np.diag([1.0, 2.0]))
        assert (a.T, a.n_mc, a.boundary) == (80, 60, True)
        assert b.functional == "difference" and b.T == 200


class TestRunDesign:
    def test_rates(self):
        d = design_by_name("decreasing-1").with_(T=60, n_mc=50)
        r = run_design(d, SMALL)
        assert r.n_trials + r.n_failed == 50
        for rates in (r.rejection_rate, r.prominence_rate, r.degree_of_prominence):
            assert rates.shape == (30,)
            assert np.all((rates >= 0) & (rates <= 1))
        assert np.all(r.degree_of_prominence >= r.prominence_rate)
        np.testing.assert_array_equal(r.rejection_rate, r.prominence_rate)
        assert 0 <= r.overall_bonferroni_rate <= 1
        assert r.rejection_rate[0] > 0.9
        assert r.summary()["design"] == "decreasing-1"

    def test_reproducible_and_schedule_invariant(self):
        d = design_by_name("white-noise-unconditional").with_(T=40, n_mc=50)
        a = run_design(d, SMALL)
        b = run_design(d, SimConfig(n_boot=100, seed=5, workers=2))
        assert a.summary() == b.summary()

    def test_white_noise_flat(self):
        d = design_by_name("white-noise-unconditional").with_(T=60, n_mc=100)
        r = run_design(d, SMALL)
        se = np.sqrt(0.05 * 0.95 / 100)
        assert np.ptp(r.rejection_rate) < 4 * se

    def test_bc_rates_reported(self):
        d = breitung_design(np.pi / 2).with_(T=80, n_mc=50)
        r = run_design(d, SMALL)
        assert r.bc_rejection_rate.shape == r.rejection_rate.shape
        i = int(np.argmin(np.abs(r.frequencies - 0.25)))
        assert r.bc_rejection_rate[i] < r.bc_rejection_rate[0]


@pytest.mark.slow
def test_breitung_dip_at_zero_frequency():
    d = breitung_design(np.pi / 2, sigma_x=5.0).with_(n_mc=100)
    r = run_design(d, SimConfig(n_boot=200, seed=1))
    i = int(np.argmin(np.abs(r.frequencies - 0.25)))
    assert r.rejection_rate[0] >= 0.95 and r.rejection_rate[-1] >= 0.95
    assert r.rejection_rate[i] == r.rejection_rate.min() < 0.8
    assert r.bc_rejection_rate[i] <= 0.05 + 2 * np.sqrt(0.05 * 0.95 / 100)
