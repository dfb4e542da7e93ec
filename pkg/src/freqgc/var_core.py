"""Vector autoregression estimation, BIC lag selection and diagnostics.

Every equation of a VAR shares the same lagged regressors, so the seemingly
unrelated regressions estimator reduces to equation-by-equation least squares
on a common design matrix. That is what :func:`fit_var` computes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    InsufficientData,
    NonStationary,
    NotVar1,
    SingularRegressors,
)

__all__ = [
    "MultiSeries",
    "VarModel",
    "LagSelection",
    "lag_matrix",
    "fit_var",
    "select_lag_bic",
    "companion_matrix",
    "companion_roots",
    "is_stationary",
    "autocovariance_var1",
]

RCOND_SINGULAR = 1e-12
STATIONARY_MARGIN = 1e-8


@dataclass(frozen=True)
class MultiSeries:
    """A ``T x p`` panel of named real-valued series on a common grid."""

    names: tuple
    values: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ValueError("values must be a T x p matrix")
        names = tuple(str(n) for n in self.names)
        if len(names) != values.shape[1]:
            raise ValueError(
                f"{len(names)} names given for {values.shape[1]} columns"
            )
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("need at least one observation and one series")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contain missing or non-finite values")
        if self.labels is not None and len(self.labels) != values.shape[0]:
            raise ValueError("one label per observation is required")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_columns(cls, columns: dict, labels=None) -> "MultiSeries":
        names = list(columns)
        values = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
        return cls(tuple(names), values, None if labels is None else tuple(labels))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def select(self, names: Sequence[str]) -> "MultiSeries":
        idx = [self.names.index(n) for n in names]
        return MultiSeries(tuple(names), self.values[:, idx], self.labels)


@dataclass(frozen=True)
class VarModel:
    """A fitted (or hand-specified) VAR(k) model.

    Attributes
    ----------
    coefs : ndarray, shape (k, p, p)
        ``coefs[j - 1]`` multiplies ``Z_{t-j}``.
    intercept : ndarray, shape (p,), or None
    sigma : ndarray, shape (p, p)
        Innovation covariance.
    residuals : ndarray, shape (T - start, p), or None
    start : int
        Index of the first observation used as a regression target. Equals
        ``k`` unless the fit was aligned to a longer burn-in window.
    """

    coefs: np.ndarray
    sigma: np.ndarray
    intercept: np.ndarray | None = None
    residuals: np.ndarray | None = None
    start: int | None = None
    names: tuple | None = None

    def __post_init__(self):
        coefs = np.asarray(self.coefs, dtype=float)
        if coefs.ndim == 2:
            coefs = coefs[None]
        if coefs.ndim != 3 or coefs.shape[1] != coefs.shape[2] or coefs.shape[0] < 1:
            raise ValueError("coefs must have shape (k, p, p) with k >= 1")
        sigma = np.asarray(self.sigma, dtype=float)
        p = coefs.shape[1]
        if sigma.shape != (p, p):
            raise ValueError(f"sigma must be {p} x {p}")
        if np.max(np.abs(sigma - sigma.T)) > 1e-10:
            raise ValueError("sigma must be symmetric")
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "sigma", sigma)
        if self.intercept is not None:
            object.__setattr__(self, "intercept", np.asarray(self.intercept, dtype=float))
        if self.start is None:
            object.__setattr__(self, "start", coefs.shape[0])

    @property
    def k(self) -> int:
        return self.coefs.shape[0]

    @property
    def p(self) -> int:
        return self.coefs.shape[1]

    @property
    def A(self) -> list:
        return list(self.coefs)

    @property
    def T_effective(self) -> int | None:
        return None if self.residuals is None else self.residuals.shape[0]


@dataclass(frozen=True)
class LagSelection:
    chosen_k: int
    bic_values: dict = field(default_factory=dict)
    k_max: int = 4


def _as_array(data) -> np.ndarray:
    if isinstance(data, MultiSeries):
        return data.values
    arr = np.asarray(data, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def lag_matrix(y: np.ndarray, k: int, start: int | None = None, with_intercept: bool = True):
    """Build the stacked lag regression ``Y = X B + E``.

    Rows are the targets ``y[start:]``; columns of ``X`` are an optional
    leading intercept followed by ``y[t-1], ..., y[t-k]`` (each p wide).
    """
    start = k if start is None else start
    T, p = y.shape
    n = T - start
    blocks = [y[start - j : T - j] for j in range(1, k + 1)]
    if with_intercept:
        blocks.insert(0, np.ones((n, 1)))
    return np.hstack(blocks), y[start:]


def fit_var(data, k: int, with_intercept: bool = True, start: int | None = None) -> VarModel:
    """Least-squares fit of a VAR(k).

    Parameters
    ----------
    data : MultiSeries or array_like, shape (T, p)
    k : int
        Lag order, ``k >= 1``.
    with_intercept : bool
    start : int, optional
        First target row. Defaults to ``k``; pass a larger value to put
        models of different order on the same effective sample.

    Returns
    -------
    VarModel
        ``sigma`` uses the divisor ``T - start``.
    """
    y = _as_array(data)
    T, p = y.shape
    if k < 1:
        raise ValueError("lag order must be >= 1")
    start = k if start is None else int(start)
    if start < k:
        raise ValueError("start must be at least k")
    n = T - start
    if n <= p * k + 1:
        raise InsufficientData(
            f"{n} usable observations for a VAR({k}) in {p} variables"
        )
    X, Y = lag_matrix(y, k, start, with_intercept)
    lagged = X[:, 1:] if with_intercept else X
    if np.any(np.ptp(lagged, axis=0) == 0):
        raise SingularRegressors("a lagged regressor column is constant")
    gram = X.T @ X
    evals, evecs = np.linalg.eigh(gram)
    if evals[-1] <= 0 or evals[0] / evals[-1] < RCOND_SINGULAR:
        raise SingularRegressors(
            "lag regressor Gram matrix is numerically singular"
        )
    beta = evecs @ ((evecs.T @ (X.T @ Y)) / evals[:, None])
    resid = Y - X @ beta
    sigma = resid.T @ resid / n
    sigma = 0.5 * (sigma + sigma.T)
    if with_intercept:
        intercept, slopes = beta[0], beta[1:]
    else:
        intercept, slopes = None, beta
    # slopes rows: lag-major, then source variable; coefs[j][target, source]
    coefs = slopes.reshape(k, p, p).transpose(0, 2, 1)
    names = data.names if isinstance(data, MultiSeries) else None
    return VarModel(coefs, sigma, intercept, resid, start, names)


def _bic(model: VarModel, with_intercept: bool) -> float:
    n = model.residuals.shape[0]
    n_params = model.p ** 2 * model.k + model.p * int(with_intercept)
    _, logdet = np.linalg.slogdet(model.sigma)
    return n * logdet + n_params * np.log(n)


def select_lag_bic(data, k_max: int = 4, with_intercept: bool = True) -> LagSelection:
    """Choose the VAR order minimising BIC over ``1..k_max``.

    All candidates are fitted on the common window of the last
    ``T - k_max`` observations; ties go to the smaller order.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    bic = {}
    for k in range(1, k_max + 1):
        model = fit_var(data, k, with_intercept, start=k_max)
        bic[k] = float(_bic(model, with_intercept))
    best = min(bic, key=lambda k: (bic[k], k))
    return LagSelection(best, bic, k_max)


def companion_matrix(coefs) -> np.ndarray:
    if isinstance(coefs, VarModel):
        coefs = coefs.coefs
    coefs = np.asarray(coefs, dtype=float)
    if coefs.ndim == 2:
        coefs = coefs[None]
    k, p, _ = coefs.shape
    comp = np.zeros((k * p, k * p))
    comp[:p] = np.hstack(list(coefs))
    if k > 1:
        comp[p:, :-p] = np.eye((k - 1) * p)
    return comp


def companion_roots(model) -> np.ndarray:
    """Moduli of the companion-matrix eigenvalues, largest first."""
    eig = np.linalg.eigvals(companion_matrix(model))
    return np.sort(np.abs(eig))[::-1]


def is_stationary(model) -> bool:
    return bool(companion_roots(model)[0] < 1 - STATIONARY_MARGIN)


def autocovariance_var1(model: VarModel) -> tuple[np.ndarray, Callable[[int], np.ndarray]]:
    """Autocovariances of a stationary VAR(1).

    ``vec(R_0) = (I - A (x) A)^{-1} vec(Sigma)`` and ``R_h = A^h R_0`` with
    ``R_h = cov(Z_t, Z_{t-h})``.

    Returns
    -------
    R0 : ndarray
    acov : callable
        ``acov(h)`` gives ``R_h`` for ``h >= 0``.
    """
    if model.k != 1:
        raise NotVar1(f"model has k={model.k}")
    if not is_stationary(model):
        raise NonStationary("largest companion root is on or outside the unit circle")
    A = model.coefs[0]
    p = model.p
    vec_sigma = model.sigma.reshape(-1, order="F")
    vec_r0 = np.linalg.solve(np.eye(p * p) - np.kron(A, A), vec_sigma)
    R0 = vec_r0.reshape(p, p, order="F")
    R0 = 0.5 * (R0 + R0.T)

    def acov(h: int) -> np.ndarray:
        if h < 0:
            raise ValueError("lag must be nonnegative")
        return np.linalg.matrix_power(A, h) @ R0

    return R0, acov
