"""Monte Carlo engine for level, power and prominence of the bootstrap tests.

A :class:`SimDesign` is a Gaussian VAR data-generating process plus the
functional to test. :func:`run_design` simulates ``n_mc`` paths, runs the
matching prominence test on each and aggregates per-frequency rates.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .bc_test import bc_test
from .bootstrap import BootstrapConfig, test_conditional, test_difference, test_unconditional
from .errors import ExplodingPath, FreqGCError, QuantileUnstable, TooManyFailures
from .spectra import CONDITIONAL, DIFFERENCE, KINDS, UNCONDITIONAL, FrequencyGrid
from .var_core import MultiSeries, VarModel, is_stationary

__all__ = [
    "SimDesign",
    "SimConfig",
    "SimReport",
    "simulate_var",
    "run_design",
    "builtin_designs",
    "design_by_name",
    "load_designs",
    "bonferroni_cases",
]

EXPLODE_LIMIT = 1e12
MAX_FAILURE_SHARE = 0.10


@dataclass(frozen=True)
class SimDesign:
    """A VAR data-generating process and Monte Carlo settings.

    Series are ordered ``(X, Y)`` for the unconditional functional and
    ``(X, Y, W)`` otherwise; causality is always tested from Y to X.
    ``boundary`` marks designs with a unit root that are simulated on purpose.
    """

    name: str
    coefs: np.ndarray
    sigma: np.ndarray
    functional: str = UNCONDITIONAL
    T: int = 200
    n_mc: int = 100
    burn_in: int = 200
    boundary: bool = False
    bc_lags: int | None = None
    description: str = ""

    def __post_init__(self):
        coefs = np.asarray(self.coefs, dtype=float)
        if coefs.ndim == 2:
            coefs = coefs[None]
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim == 1:
            sigma = np.diag(sigma)
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "sigma", sigma)
        if coefs.ndim != 3 or coefs.shape[1] != coefs.shape[2]:
            raise ValueError("coefs must have shape (k, p, p)")
        if sigma.shape != coefs.shape[1:]:
            raise ValueError("sigma does not match the coefficient dimension")
        if self.functional not in KINDS:
            raise ValueError(f"unknown functional {self.functional!r}")
        expected_p = 2 if self.functional == UNCONDITIONAL else 3
        if self.p != expected_p:
            raise ValueError(f"{self.functional} designs need {expected_p} series")
        if self.n_mc < 50:
            raise ValueError("n_mc must be at least 50")

    @property
    def k(self) -> int:
        return self.coefs.shape[0]

    @property
    def p(self) -> int:
        return self.coefs.shape[1]

    @property
    def model(self) -> VarModel:
        return VarModel(self.coefs, self.sigma)

    def with_(self, **changes) -> "SimDesign":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SimConfig:
    """Bootstrap and scheduling settings for a Monte Carlo run."""

    n_boot: int = 500
    alpha: float = 0.05
    seed: int = 20240101
    block_length: float | None = None
    lag_policy: str = "fixed_from_data"
    k_max: int = 4
    workers: int = 1


@dataclass(frozen=True)
class SimReport:
    design: SimDesign
    frequencies: np.ndarray
    rejection_rate: np.ndarray
    prominence_rate: np.ndarray
    degree_of_prominence: np.ndarray
    overall_bonferroni_rate: float
    n_trials: int
    n_failed: int
    seed: int
    bc_rejection_rate: np.ndarray | None = None

    def summary(self) -> dict:
        return {
            "design": self.design.name,
            "functional": self.design.functional,
            "n_trials": self.n_trials,
            "n_failed": self.n_failed,
            "seed": self.seed,
            "overall_bonferroni_rate": self.overall_bonferroni_rate,
            "frequencies": self.frequencies.tolist(),
            "rejection_rate": self.rejection_rate.tolist(),
            "prominence_rate": self.prominence_rate.tolist(),
            "degree_of_prominence": self.degree_of_prominence.tolist(),
            "bc_rejection_rate": None if self.bc_rejection_rate is None
            else self.bc_rejection_rate.tolist(),
        }


def simulate_var(design: SimDesign, seed: int | np.random.SeedSequence) -> MultiSeries:
    """Simulate ``design.T`` observations after ``design.burn_in`` warm-up steps."""
    if not design.boundary and not is_stationary(design.model):
        raise ValueError(f"design {design.name!r} is not stationary; set boundary=True")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)
    k, p = design.k, design.p
    n = design.T + design.burn_in
    evals, evecs = np.linalg.eigh(design.sigma)
    root = evecs * np.sqrt(np.clip(evals, 0, None))
    eps = rng.standard_normal((n, p)) @ root.T
    z = np.zeros((n + k, p))
    lagged = design.coefs
    for t in range(n):
        acc = eps[t].copy()
        for j in range(k):
            acc += lagged[j] @ z[k + t - 1 - j]
        z[k + t] = acc
    path = z[k + design.burn_in:]
    if not np.all(np.abs(path) <= EXPLODE_LIMIT):
        raise ExplodingPath(f"design {design.name!r} produced values above {EXPLODE_LIMIT:g}")
    names = ("x", "y") if p == 2 else ("x", "y", "w")
    return MultiSeries(names, path)


_TESTS = {
    UNCONDITIONAL: test_unconditional,
    CONDITIONAL: test_conditional,
    DIFFERENCE: test_difference,
}


def _trial(task):
    design, config, trial = task
    sim_ss = np.random.SeedSequence(config.seed, spawn_key=(trial, 0))
    boot_seed = int(np.random.SeedSequence(config.seed, spawn_key=(trial, 1))
                    .generate_state(1, np.uint64)[0])
    data = simulate_var(design, sim_ss)
    bconf = BootstrapConfig(
        n_boot=config.n_boot, alpha=config.alpha, block_length=config.block_length,
        seed=boot_seed, lag_policy=config.lag_policy, k_max=config.k_max,
    )
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QuantileUnstable)
            res = _TESTS[design.functional](*data.values.T, config=bconf)
    except FreqGCError:
        return None
    values = res.spectrum.values
    out = {
        "reject": res.flags,
        "prominent": values > res.q_upper,
        "above_median": values > res.null_median,
        "overall": res.overall_significant,
        "bc": None,
    }
    if design.bc_lags is not None:
        grid = FrequencyGrid(data.T)
        out["bc"] = bc_test(data.column("x"), data.column("y"), design.bc_lags, grid).p_values
    return out


def run_design(design: SimDesign, config: SimConfig = SimConfig()) -> SimReport:
    """Monte Carlo rates for one design.

    ``rejection_rate`` is the share of trials flagged at each frequency,
    ``prominence_rate`` the share whose estimate exceeds the upper bootstrap
    quantile, and ``degree_of_prominence`` the share whose estimate exceeds
    the bootstrap median causality under independence.
    """
    tasks = [(design, config, t) for t in range(design.n_mc)]
    if config.workers == 1:
        outcomes = [_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_trial, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    ok = [o for o in outcomes if o is not None]
    n_failed = len(outcomes) - len(ok)
    if n_failed > MAX_FAILURE_SHARE * design.n_mc:
        raise TooManyFailures(f"{n_failed} of {design.n_mc} trials failed for {design.name!r}")

    def rate(key):
        return np.mean([o[key] for o in ok], axis=0)

    bc_rate = None
    if design.bc_lags is not None:
        bc_rate = np.mean([o["bc"] < config.alpha for o in ok], axis=0)
    return SimReport(
        design=design,
        frequencies=FrequencyGrid(design.T).frequencies,
        rejection_rate=rate("reject"),
        prominence_rate=rate("prominent"),
        degree_of_prominence=rate("above_median"),
        overall_bonferroni_rate=float(np.mean([o["overall"] for o in ok])),
        n_trials=len(ok),
        n_failed=n_failed,
        seed=config.seed,
        bc_rejection_rate=bc_rate,
    )


# --- design catalogue -------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:g}"


def _diagonal(a: float) -> SimDesign:
    return SimDesign(
        f"diag-{_fmt(a)}", np.diag([a, a])[None], np.eye(2),
        boundary=a >= 1,
        description="no causality, both series AR(1) with the same coefficient",
    )


def _decreasing(a: float, functional: str) -> SimDesign:
    if functional == UNCONDITIONAL:
        A = np.array([[0.0, a], [0.0, a]])
        sigma = np.eye(2)
    else:
        A = np.array([[0.0, a, 0.0], [0.0, a, 0.0], [0.0, 0.0, 0.0]])
        sigma = np.eye(3)
    prefix = {UNCONDITIONAL: "decreasing", CONDITIONAL: "cond-decreasing",
              DIFFERENCE: "diff-decreasing"}[functional]
    return SimDesign(
        f"{prefix}-{_fmt(a)}", A[None], sigma, functional=functional,
        boundary=a >= 1,
        description="Y is AR(1) and drives X at lag one; causality decreases with frequency",
    )


def _masked(a: float) -> SimDesign:
    # W - Y is an AR(1) independent of Y and X loads on its lag, so Y alone says
    # nothing about X while Y given W does.
    A = np.array([[0.0, a, -a], [0.0, a, 0.0], [0.0, 0.0, a]])
    sigma = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 2.0]])
    return SimDesign(
        f"diff-masked-{_fmt(a)}", A[None], sigma, functional=DIFFERENCE,
        boundary=a >= 1,
        description="null unconditional causality, decreasing conditional causality",
    )


def _white_noise(functional: str) -> SimDesign:
    p = 2 if functional == UNCONDITIONAL else 3
    return SimDesign(
        f"white-noise-{functional}", np.zeros((1, p, p)), np.eye(p), functional=functional,
        description="independent white noise",
    )


_OMEGA_LABELS = {0.0: "0", 0.25: "pi/4", 0.5: "pi/2", 0.75: "3pi/4", 1.0: "pi"}


def breitung_design(omega_star: float, sigma_x: float = 1.0, own: float = 0.0) -> SimDesign:
    """Three-lag design whose causality from Y to X vanishes at ``omega_star``.

    The X equation loads ``Y_{t-1} - 2 cos(omega_star) Y_{t-2} + Y_{t-3}``;
    ``own`` is Y's coefficient on its own first and third lags.
    """
    coefs = np.zeros((3, 2, 2))
    coefs[0, 0, 1] = 1.0
    coefs[1, 0, 1] = -2.0 * math.cos(omega_star)
    coefs[2, 0, 1] = 1.0
    coefs[0, 1, 1] = own
    coefs[2, 1, 1] = own
    label = _OMEGA_LABELS.get(round(omega_star / math.pi, 12), f"{omega_star:.4g}")
    design = SimDesign(
        f"breitung-w{label}-s{_fmt(sigma_x)}-b{_fmt(own)}", coefs, np.diag([sigma_x, 1.0]),
        bc_lags=3,
        description=f"zero causality at omega*={label}",
    )
    return design.with_(boundary=not is_stationary(design.model))


def builtin_designs() -> list:
    """Catalogue of simulation designs.

    Diagonal no-causality designs, decreasing-causality designs for each
    functional, difference designs, white noise, and the three-lag designs
    with a causality zero at a chosen frequency.
    """
    designs = [_diagonal(a) for a in (0.0, 0.2, 0.5, 0.8, 1.0)]
    for functional in KINDS:
        designs.append(_white_noise(functional))
        designs += [_decreasing(a, functional) for a in (0.5, 1.0)]
    designs += [_masked(a) for a in (0.5, 1.0)]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        for sigma_x in (1.0, 0.2, 5.0):
            for own in (0.0, 0.25, 0.5):
                designs.append(breitung_design(frac * math.pi, sigma_x, own))
    return designs


def design_by_name(name: str, designs=None) -> SimDesign:
    for d in designs or builtin_designs():
        if d.name == name:
            return d
    raise KeyError(name)


def bonferroni_cases() -> dict:
    """Binding of the seven Bonferroni cases to catalogue designs.

    Returns ``{case: {"design": name, "reported_rate": float}}``; the binding
    lives in ``data/bonferroni_cases.json``.
    """
    text = resources.files("freqgc").joinpath("data/bonferroni_cases.json").read_text()
    return {int(k): v for k, v in json.loads(text)["cases"].items()}


def _design_from_dict(entry: dict) -> SimDesign:
    k = int(entry["k"])
    a = np.asarray(entry["A"], dtype=float)
    sigma = np.asarray(entry["Sigma"], dtype=float)
    p = sigma.shape[0]
    coefs = a.reshape(k, p, p)
    fields = {f.name for f in dataclasses.fields(SimDesign)}
    extra = {key: entry[key] for key in entry if key in fields and key not in ("name", "coefs", "sigma")}
    return SimDesign(entry["name"], coefs, sigma, **extra)


def load_designs(path) -> list:
    """Read designs from a JSON file.

    The file holds a list (or ``{"designs": [...]}``) of objects with keys
    ``name``, ``k``, ``A`` (the ``k`` coefficient matrices, row-major, as a
    flat list or nested lists), ``Sigma`` (diagonal entries or a full
    matrix), and optionally ``T``, ``n_mc``, ``functional``, ``burn_in``,
    ``boundary`` and ``bc_lags``.
    """
    payload = json.loads(Path(path).read_text())
    entries = payload["designs"] if isinstance(payload, dict) else payload
    return [_design_from_dict(e) for e in entries]
