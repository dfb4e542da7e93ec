"""Frequency-domain Granger causality with bootstrap prominence tests."""

from .bc_test import BcResult, bc_test, bc_test_conditional
from .bootstrap import (
    BootstrapConfig,
    TestResult,
    overall_bonferroni,
    stationary_bootstrap,
    test_conditional,
    test_difference,
    test_unconditional,
)
from .filters import HpDecomposition, hp_filter
from .sim_harness import SimConfig, SimDesign, SimReport, builtin_designs, run_design, simulate_var
from .spectra import (
    FrequencyGrid,
    SpectrumConfig,
    SpectrumResult,
    conditional_gc,
    gc_spectrum,
    spectral_matrix,
    transfer_function,
    unconditional_gc,
)
from .var_core import MultiSeries, VarModel, autocovariance_var1, companion_roots, fit_var, select_lag_bic

__version__ = "0.1.0"

__all__ = [
    "BcResult", "bc_test", "bc_test_conditional",
    "BootstrapConfig", "TestResult", "overall_bonferroni", "stationary_bootstrap",
    "test_conditional", "test_difference", "test_unconditional",
    "HpDecomposition", "hp_filter",
    "SimConfig", "SimDesign", "SimReport", "builtin_designs", "run_design", "simulate_var",
    "FrequencyGrid", "SpectrumConfig", "SpectrumResult", "conditional_gc", "gc_spectrum",
    "spectral_matrix", "transfer_function", "unconditional_gc",
    "MultiSeries", "VarModel", "autocovariance_var1", "companion_roots", "fit_var", "select_lag_bic",
]
