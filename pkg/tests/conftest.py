import re

import numpy as np
import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict = {}


def simulate(coefs, sigma, T, rng, burn=200):
    """Plain Gaussian VAR simulator kept separate from the library's."""
    coefs = np.asarray(coefs, dtype=float)
    if coefs.ndim == 2:
        coefs = coefs[None]
    k, p, _ = coefs.shape
    chol = np.linalg.cholesky(np.asarray(sigma, dtype=float))
    e = rng.standard_normal((T + burn, p)) @ chol.T
    z = np.zeros((T + burn + k, p))
    for t in range(T + burn):
        z[k + t] = e[t] + sum(coefs[j] @ z[k + t - 1 - j] for j in range(k))
    return z[k + burn:]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        ok = report.outcome == "passed"
        _outcomes[n] = _outcomes.get(n, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _outcomes[n] else 'FAIL'}")
