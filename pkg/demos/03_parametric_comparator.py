"""
The parametric F test per frequency
===================================

A three-lag design whose causality from Y to X vanishes exactly at
omega* = pi/2. The F test restricts the cause-lag coefficients so that
their Fourier transform is zero at each frequency in turn.
"""
import numpy as np

from freqgc import FrequencyGrid, bc_test, unconditional_gc
from freqgc.sim_harness import breitung_design, simulate_var

design = breitung_design(np.pi / 2)
print(design.name, "cause-lag coefficients:", design.coefs[:, 0, 1].round(12))

grid = FrequencyGrid(200)
true = unconditional_gc(design.model, grid.omegas)
i = int(np.argmin(true))
print(f"true spectrum is zero at f={grid.frequencies[i]:.3f}: {true[i]:.2e}")

data = simulate_var(design, seed=5)
res = bc_test(data.column("x"), data.column("y"), 3, grid)
print("p-value at omega*:", round(res.p_values[i], 3))
print("p-values at the ends of the grid:", res.p_values[[0, -1]])
print("degrees of freedom interior / at pi:", res.df[i], res.df[-1])

# With two lags the two restrictions pin both coefficients, so the
# statistic is the same at every interior frequency.
k2 = bc_test(data.column("x"), data.column("y"), 2, grid)
print("k=2 p-value spread over interior frequencies:", np.ptp(k2.p_values[:-1]))
