"""Stationary bootstrap and the median-based prominence tests.

Each series is resampled independently, which destroys every cross-series
dependence while keeping each series' own serial structure. The median
causality across frequencies computed on those resamples gives the null
distribution against which the observed spectrum is compared.

Replicate ``r`` of column ``j`` draws from the stream
``SeedSequence(seed, spawn_key=(r, j))``, so results do not depend on how
replicates are scheduled across workers.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptySample, FreqGCError, QuantileUnstable, ReplicateFailure
from .spectra import (
    CONDITIONAL,
    DIFFERENCE,
    UNCONDITIONAL,
    FrequencyGrid,
    SpectrumConfig,
    SpectrumResult,
    evaluate_kind,
    fit_role_models,
)
from .var_core import MultiSeries

__all__ = [
    "BootstrapConfig",
    "TestResult",
    "stationary_bootstrap_indices",
    "stationary_bootstrap",
    "empirical_quantile",
    "test_unconditional",
    "test_conditional",
    "test_difference",
    "overall_bonferroni",
    "bootstrap_medians",
]

FIXED_FROM_DATA = "fixed_from_data"
RESELECT = "reselect_per_replicate"
MAX_FAILURE_SHARE = 0.10


@dataclass(frozen=True)
class BootstrapConfig:
    """Settings for the bootstrap prominence tests.

    ``block_length=None`` means ``ceil(T ** (1/3))``. ``k`` pins the lag
    order of every model; otherwise it is chosen by BIC on the observed data
    (``fixed_from_data``) or on every replicate (``reselect_per_replicate``).
    """

    n_boot: int = 1000
    alpha: float = 0.05
    block_length: float | None = None
    seed: int = 0
    lag_policy: str = FIXED_FROM_DATA
    k_max: int = 4
    k: int | None = None
    with_intercept: bool = True
    grid_base: int | None = None
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.n_boot < 100:
            raise ValueError("n_boot must be at least 100")
        if self.block_length is not None and self.block_length < 1:
            raise ValueError("expected block length must be >= 1")
        if self.lag_policy not in (FIXED_FROM_DATA, RESELECT):
            raise ValueError(f"unknown lag policy {self.lag_policy!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def spectrum_config(self, T: int) -> SpectrumConfig:
        return SpectrumConfig(self.k, self.k_max, self.with_intercept, self.grid_base or T)

    def mean_block_length(self, T: int) -> float:
        if self.block_length is not None:
            return float(self.block_length)
        return float(math.ceil(round(T ** (1 / 3), 12)))


@dataclass(frozen=True)
class TestResult:
    """Outcome of one prominence test.

    ``flags[i]`` is true when the observed value at frequency ``i`` exceeds
    ``q_upper`` (or, for differences, falls outside ``[q_lower, q_upper]``).
    The ``bonferroni_*`` fields repeat the comparison at level ``2 alpha / T``.
    """

    __test__ = False

    spectrum: SpectrumResult
    q_upper: float
    q_lower: float | None
    flags: np.ndarray
    boot_medians: np.ndarray
    alpha: float
    n_failed: int = 0
    block_length: float = 1.0
    lags: dict = dataclasses.field(default_factory=dict)
    bonferroni_upper: float | None = None
    bonferroni_lower: float | None = None
    bonferroni_flags: np.ndarray | None = None
    overall_significant: bool | None = None

    @property
    def kind(self) -> str:
        return self.spectrum.kind

    @property
    def null_median(self) -> float:
        """Bootstrap estimate of the median causality under independence."""
        return float(np.median(self.boot_medians))


def stationary_bootstrap_indices(T: int, block_length: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of one stationary-bootstrap resample of a length-``T`` series.

    Blocks start at uniform positions, have geometric lengths with mean
    ``block_length`` and wrap around the end of the series.
    """
    if T < 1:
        raise ValueError("need a nonempty series")
    if block_length < 1:
        raise ValueError("expected block length must be >= 1")
    p = 1.0 / block_length
    new_block = rng.random(T) < p
    new_block[0] = True
    block_id = np.cumsum(new_block) - 1
    starts = rng.integers(0, T, size=block_id[-1] + 1)
    first = np.flatnonzero(new_block)
    offset = np.arange(T) - first[block_id]
    return (starts[block_id] + offset) % T


def stationary_bootstrap(series, block_length: float, rng: np.random.Generator) -> np.ndarray:
    series = np.asarray(series, dtype=float)
    if series.ndim != 1 or series.shape[0] < 2:
        raise ValueError("need a single column with at least two observations")
    return series[stationary_bootstrap_indices(series.shape[0], block_length, rng)]


def empirical_quantile(samples, q: float) -> float:
    """Upper order statistic ``x_(ceil(q n))``, without interpolation."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise EmptySample("cannot take a quantile of an empty sample")
    if not 0 < q < 1:
        raise ValueError("quantile level must lie in (0, 1)")
    rank = math.ceil(q * x.size - 1e-9)
    return float(x[min(max(rank, 1), x.size) - 1])


def _resample(values: np.ndarray, rep: int, seed: int, block_length: float) -> np.ndarray:
    T, p = values.shape
    out = np.empty_like(values)
    for j in range(p):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep, j)))
        out[:, j] = values[stationary_bootstrap_indices(T, block_length, rng), j]
    return out


_ROLE_NAMES = ("x", "y", "w")


def _replicate_medians(task) -> np.ndarray:
    values, reps, kind, ks, config, block_length = task
    sconf = config.spectrum_config(values.shape[0])
    omegas = FrequencyGrid(sconf.grid_base).omegas
    conditioning = "w" if values.shape[1] == 3 else None
    out = np.full(len(reps), np.nan)
    for i, rep in enumerate(reps):
        sample = MultiSeries(_ROLE_NAMES[: values.shape[1]],
                             _resample(values, rep, config.seed, block_length))
        try:
            models = fit_role_models(sample, "x", "y", conditioning, kind, sconf,
                                     ks if config.lag_policy == FIXED_FROM_DATA else None)
            out[i] = np.median(evaluate_kind(models, omegas, kind))
        except (FreqGCError, np.linalg.LinAlgError):
            pass
    return out


def bootstrap_medians(values: np.ndarray, kind: str, ks: dict,
                      config: BootstrapConfig, block_length: float) -> np.ndarray:
    """Median causality across frequencies for each bootstrap replicate.

    Failed replicates are returned as NaN.
    """
    reps = np.arange(config.n_boot)
    if config.workers == 1:
        return _replicate_medians((values, reps, kind, ks, config, block_length))
    chunks = np.array_split(reps, min(config.n_boot, 4 * config.workers))
    tasks = [(values, c, kind, ks, config, block_length) for c in chunks]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        parts = list(pool.map(_replicate_medians, tasks))
    return np.concatenate(parts)


def _column(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"{name} must be a single column")
    return a


def _run(columns: list, kind: str, config: BootstrapConfig) -> TestResult:
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise ValueError("series must have equal lengths")
    data = MultiSeries(_ROLE_NAMES[: len(columns)], np.column_stack(columns))
    T = data.T
    sconf = config.spectrum_config(T)
    conditioning = "w" if len(columns) == 3 else None
    models = fit_role_models(data, "x", "y", conditioning, kind, sconf)
    ks = {key: m.k for key, m in models.items()}
    grid = FrequencyGrid(sconf.grid_base)
    observed = SpectrumResult(grid, evaluate_kind(models, grid.omegas, kind), kind,
                              tuple(ks.values()))

    block_length = config.mean_block_length(T)
    medians = bootstrap_medians(data.values, kind, ks, config, block_length)
    failed = np.isnan(medians)
    n_failed = int(failed.sum())
    if n_failed > MAX_FAILURE_SHARE * config.n_boot:
        raise ReplicateFailure(
            f"{n_failed} of {config.n_boot} bootstrap replicates could not be fitted"
        )
    medians = medians[~failed]

    alpha = config.alpha
    if kind == DIFFERENCE:
        q_lower = empirical_quantile(medians, alpha / 2)
        q_upper = empirical_quantile(medians, 1 - alpha / 2)
        flags = (observed.values < q_lower) | (observed.values > q_upper)
    else:
        q_lower = None
        q_upper = empirical_quantile(medians, 1 - alpha)
        flags = observed.values > q_upper
    result = TestResult(observed, q_upper, q_lower, flags, medians, alpha,
                        n_failed, block_length, ks)
    return overall_bonferroni(result, T, alpha)


def test_unconditional(x, y, config: BootstrapConfig = BootstrapConfig()) -> TestResult:
    """Prominence test of the unconditional causality spectrum from ``y`` to ``x``."""
    return _run([_column(x, "x"), _column(y, "y")], UNCONDITIONAL, config)


def test_conditional(x, y, w, config: BootstrapConfig = BootstrapConfig()) -> TestResult:
    """Prominence test of the causality spectrum from ``y`` to ``x`` given ``w``."""
    return _run([_column(x, "x"), _column(y, "y"), _column(w, "w")], CONDITIONAL, config)


def test_difference(x, y, w, config: BootstrapConfig = BootstrapConfig()) -> TestResult:
    """Two-sided prominence test of unconditional minus conditional causality."""
    return _run([_column(x, "x"), _column(y, "y"), _column(w, "w")], DIFFERENCE, config)


for _f in (test_unconditional, test_conditional, test_difference):
    _f.__test__ = False


def overall_bonferroni(result: TestResult, T: int, alpha: float | None = None) -> TestResult:
    """Repeat the per-frequency comparison at level ``2 alpha / T``.

    ``overall_significant`` is true when any frequency is flagged at that
    level, which bounds the joint level by ``alpha``.
    """
    alpha = result.alpha if alpha is None else alpha
    level = 2 * alpha / T
    n = result.boot_medians.size
    if n < 10 * T / (2 * alpha):
        warnings.warn(
            f"{n} bootstrap medians leave about {n * level:.2g} draws beyond the "
            f"{level:.3g} tail; the Bonferroni threshold is poorly resolved",
            QuantileUnstable,
            stacklevel=2,
        )
    values = result.spectrum.values
    if result.kind == DIFFERENCE:
        lower = empirical_quantile(result.boot_medians, level / 2)
        upper = empirical_quantile(result.boot_medians, 1 - level / 2)
        flags = (values < lower) | (values > upper)
    else:
        lower = None
        upper = empirical_quantile(result.boot_medians, 1 - level)
        flags = values > upper
    return dataclasses.replace(
        result,
        bonferroni_upper=upper,
        bonferroni_lower=lower,
        bonferroni_flags=flags,
        overall_significant=bool(flags.any()),
    )
