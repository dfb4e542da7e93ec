"""Transfer functions, model spectra and Granger-causality spectra.

All frequency arguments are angular (radians per sample) and may be scalars
or 1-d arrays; matrix-valued results then carry the frequency axis first.

Orientation conventions: a bivariate model is ordered ``(effect, cause)``;
for the conditional measure the bivariate model is ``(effect, conditioning)``
and the trivariate model is ``(effect, cause, conditioning)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateCovariance,
    MisalignedModels,
    NumericalInconsistency,
    SingularAtFrequency,
)
from .var_core import MultiSeries, VarModel, fit_var, select_lag_bic

__all__ = [
    "FrequencyGrid",
    "SpectrumResult",
    "SpectrumConfig",
    "transfer_function",
    "spectral_matrix",
    "normalized_transfer",
    "unconditional_gc",
    "conditional_gc",
    "fit_role_models",
    "gc_spectrum",
]

RCOND_SINGULAR = 1e-12
CLAMP_TOL = 1e-10
VAR_FLOOR = 1e-14

UNCONDITIONAL = "unconditional"
CONDITIONAL = "conditional"
DIFFERENCE = "difference"
KINDS = (UNCONDITIONAL, CONDITIONAL, DIFFERENCE)


@dataclass(frozen=True)
class FrequencyGrid:
    """Fourier frequencies ``f_i = i / M`` for ``i = 1..floor(M/2)``."""

    M: int

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("grid base must be at least 2")

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(1, self.M // 2 + 1) / self.M

    @property
    def omegas(self) -> np.ndarray:
        return 2 * np.pi * self.frequencies

    def __len__(self) -> int:
        return self.M // 2


@dataclass(frozen=True)
class SpectrumResult:
    grid: FrequencyGrid
    values: np.ndarray
    kind: str = UNCONDITIONAL
    k: tuple = ()

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies

    @property
    def median(self) -> float:
        return float(np.median(self.values))


@dataclass(frozen=True)
class SpectrumConfig:
    """Options shared by :func:`gc_spectrum` and the bootstrap tests.

    ``k=None`` selects each model's order by BIC up to ``k_max``;
    ``grid_base=None`` uses the sample length.
    """

    k: int | None = None
    k_max: int = 4
    with_intercept: bool = True
    grid_base: int | None = None


def _lag_polynomial(model: VarModel, omega) -> np.ndarray:
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    j = np.arange(1, model.k + 1)
    z = np.exp(-1j * np.outer(omega, j))
    return np.eye(model.p) - np.einsum("fj,jab->fab", z, model.coefs)


def _checked_inverse(mats: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Batched inverse; a reciprocal 1-norm condition below 1e-12 is singular."""
    try:
        inv = np.linalg.inv(mats)
    except np.linalg.LinAlgError:
        with np.errstate(divide="ignore"):
            rcond = 1.0 / np.linalg.cond(mats)
    else:
        norm = np.abs(mats).sum(axis=-2).max(axis=-1)
        norm_inv = np.abs(inv).sum(axis=-2).max(axis=-1)
        rcond = 1.0 / (norm * norm_inv)
    bad = ~(rcond >= RCOND_SINGULAR)
    if np.any(bad):
        raise SingularAtFrequency(float(omega[np.argmax(bad)]))
    return inv


def _squeeze(out: np.ndarray, omega):
    return out[0] if np.ndim(omega) == 0 else out


def transfer_function(model: VarModel, omega) -> np.ndarray:
    """``(I - sum_j A_j e^{-i j omega})^{-1}``."""
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    return _squeeze(_checked_inverse(_lag_polynomial(model, om), om), omega)


def _spectrum_from_transfer(P: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    h = P @ sigma @ np.conj(np.swapaxes(P, -1, -2))
    return 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))


def spectral_matrix(model: VarModel, omega) -> np.ndarray:
    """Model spectrum ``P(omega) Sigma P(omega)^*`` (no 2*pi factor)."""
    return _spectrum_from_transfer(transfer_function(model, omega), model.sigma)


def _normalizer(sigma: np.ndarray) -> np.ndarray:
    # S @ innovations has its first component uncorrelated with the rest.
    p = sigma.shape[0]
    S = np.eye(p)
    S[1:, 0] = -sigma[1:, 0] / sigma[0, 0]
    return S


def normalized_transfer(model: VarModel, omega) -> np.ndarray:
    """Transfer function re-expressed on innovations whose first component is
    uncorrelated with the others: ``P S^{-1}``."""
    if model.sigma[0, 0] <= VAR_FLOOR:
        raise DegenerateCovariance("effect innovation variance is zero")
    P = transfer_function(model, omega)
    return P @ np.linalg.inv(_normalizer(model.sigma))


def _log_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    if np.any(~(den > 0)):
        raise DegenerateCovariance("intrinsic spectrum vanishes")
    values = np.log(num / den)
    if np.any(~np.isfinite(values)):
        raise NumericalInconsistency("non-finite causality value")
    if np.any(values < -CLAMP_TOL):
        worst = float(values.min())
        raise NumericalInconsistency(f"causality spectrum is negative ({worst:.3g})")
    return np.maximum(values, 0.0)


def unconditional_gc(model: VarModel, omega, effect: int = 0, cause: int = 1):
    """Unconditional causality spectrum from ``cause`` to ``effect``.

    ``ln(h_XX / (Pn_XX sigma_XX Pn_XX^*))`` where ``Pn`` is the normalized
    transfer function of the bivariate model, so that
    ``Pn_XX = P_XX + P_XY sigma_YX / sigma_XX``.
    """
    if model.p != 2:
        raise ValueError("unconditional causality needs a bivariate model")
    if {effect, cause} != {0, 1}:
        raise ValueError("effect and cause must be 0 and 1")
    if effect != 0:
        model = _permute(model, [effect, cause])
    s = model.sigma
    if s[0, 0] <= VAR_FLOOR or s[1, 1] <= VAR_FLOOR:
        raise DegenerateCovariance("innovation variance is zero")
    if s[0, 0] * s[1, 1] - s[0, 1] ** 2 <= VAR_FLOOR * s[0, 0] * s[1, 1]:
        raise DegenerateCovariance("innovations are perfectly correlated")
    P = transfer_function(model, omega)
    h = _spectrum_from_transfer(P, s)
    Pn = P @ np.linalg.inv(_normalizer(s))
    num = np.real(h[..., 0, 0])
    den = np.abs(Pn[..., 0, 0]) ** 2 * s[0, 0]
    return _log_ratio(num, den)


def _permute(model: VarModel, order) -> VarModel:
    order = list(order)
    coefs = model.coefs[:, order][:, :, order]
    sigma = model.sigma[np.ix_(order, order)]
    intercept = None if model.intercept is None else model.intercept[order]
    resid = None if model.residuals is None else model.residuals[:, order]
    names = None if model.names is None else tuple(model.names[i] for i in order)
    return VarModel(coefs, sigma, intercept, resid, model.start, names)


def _check_aligned(model2: VarModel, model3: VarModel) -> None:
    if model2.residuals is None or model3.residuals is None:
        return
    if model2.start != model3.start or model2.T_effective != model3.T_effective:
        raise MisalignedModels(
            f"bivariate window starts at {model2.start} ({model2.T_effective} rows), "
            f"trivariate at {model3.start} ({model3.T_effective} rows)"
        )


def conditional_gc(model2: VarModel, model3: VarModel, omega):
    """Conditional causality spectrum of the effect from the cause given the
    conditioning series.

    ``model2`` is fitted on ``(X, W)`` and ``model3`` on ``(X, Y, W)``.
    With ``G`` the normalized transfer function of ``model2`` embedded as

        C = [[G_XX, 0, G_XW], [0, 1, 0], [G_WX, 0, G_WW]]

    and ``Q = C^{-1} P3``, the value is
    ``ln(sum_j |Q_Xj|^2 sigma_jj / (|Q_XX|^2 sigma_XX))`` using the diagonal
    of the trivariate innovation covariance.
    """
    if model2.p != 2 or model3.p != 3:
        raise ValueError("need a bivariate (X, W) and a trivariate (X, Y, W) model")
    _check_aligned(model2, model3)
    s2 = model2.sigma
    if s2[0, 0] <= VAR_FLOOR or s2[1, 1] <= VAR_FLOOR:
        raise DegenerateCovariance("bivariate innovation variance is zero")
    s3 = np.diag(model3.sigma)
    if np.any(s3 <= VAR_FLOOR):
        raise DegenerateCovariance("trivariate innovation variance is zero")
    if np.linalg.eigvalsh(model3.sigma)[0] <= VAR_FLOOR * np.trace(model3.sigma):
        raise DegenerateCovariance("trivariate innovation covariance is singular")
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    G = normalized_transfer(model2, om)
    P3 = transfer_function(model3, om)
    C = np.zeros((len(om), 3, 3), dtype=complex)
    C[:, 0, 0] = G[:, 0, 0]
    C[:, 0, 2] = G[:, 0, 1]
    C[:, 2, 0] = G[:, 1, 0]
    C[:, 2, 2] = G[:, 1, 1]
    C[:, 1, 1] = 1.0
    Q = _checked_inverse(C, om) @ P3
    terms = np.abs(Q[:, 0, :]) ** 2 * s3
    values = _log_ratio(terms.sum(axis=1), terms[:, 0])
    return values[0] if np.ndim(omega) == 0 else values


def _choose_k(data, config: SpectrumConfig) -> int:
    if config.k is not None:
        return config.k
    return select_lag_bic(data, config.k_max, config.with_intercept).chosen_k


def fit_role_models(data: MultiSeries, effect: str, cause: str,
                    conditioning: str | None, kind: str,
                    config: SpectrumConfig, ks: dict | None = None) -> dict:
    """Fit the VAR models a causality functional needs.

    Returns a dict with keys among ``"xy"``, ``"xw"``, ``"xyw"``. Lag orders
    come from ``ks`` when given, else from ``config``. The ``xw`` and ``xyw``
    models are fitted on a common window.
    """
    ks = dict(ks or {})
    wanted = {
        UNCONDITIONAL: ("xy",),
        CONDITIONAL: ("xw", "xyw"),
        DIFFERENCE: ("xy", "xw", "xyw"),
    }[kind]
    columns = {"xy": [effect, cause], "xw": [effect, conditioning],
               "xyw": [effect, cause, conditioning]}
    subsets = {key: data.values[:, [data.names.index(n) for n in columns[key]]]
               for key in wanted}
    for key in wanted:
        if key not in ks:
            ks[key] = _choose_k(subsets[key], config)
    models = {}
    if "xy" in wanted:
        models["xy"] = fit_var(subsets["xy"], ks["xy"], config.with_intercept)
    if "xw" in wanted:
        start = max(ks["xw"], ks["xyw"])
        for key in ("xw", "xyw"):
            models[key] = fit_var(subsets[key], ks[key], config.with_intercept, start=start)
    return models


def evaluate_kind(models: dict, omegas: np.ndarray, kind: str) -> np.ndarray:
    if kind == UNCONDITIONAL:
        return unconditional_gc(models["xy"], omegas)
    if kind == CONDITIONAL:
        return conditional_gc(models["xw"], models["xyw"], omegas)
    return unconditional_gc(models["xy"], omegas) - conditional_gc(
        models["xw"], models["xyw"], omegas
    )


def gc_spectrum(data: MultiSeries, effect: str, cause: str,
                conditioning: str | None = None, kind: str | None = None,
                config: SpectrumConfig = SpectrumConfig()) -> SpectrumResult:
    """Estimate a causality spectrum on the Fourier grid.

    ``kind`` defaults to ``"unconditional"`` without a conditioning series
    and ``"conditional"`` with one; ``"difference"`` gives the
    unconditional minus the conditional spectrum.
    """
    if kind is None:
        kind = UNCONDITIONAL if conditioning is None else CONDITIONAL
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind != UNCONDITIONAL and conditioning is None:
        raise ValueError(f"{kind} spectrum needs a conditioning series")
    for name in (effect, cause, conditioning):
        if name is not None and name not in data.names:
            raise KeyError(name)
    if kind == UNCONDITIONAL:
        conditioning = None
    models = fit_role_models(data, effect, cause, conditioning, kind, config)
    grid = FrequencyGrid(config.grid_base or data.T)
    values = evaluate_kind(models, grid.omegas, kind)
    ks = tuple(models[key].k for key in ("xy", "xw", "xyw") if key in models)
    return SpectrumResult(grid, values, kind, ks)
