"""
Regenerate the CSV fixtures shipped in ``src/freqgc/data``
==========================================================

Both files are synthetic. ``white_noise.csv`` holds three independent
Gaussian white-noise series (no causality anywhere). ``euro_area_synthetic.csv``
mimics the shape of a quarterly macro panel: 76 quarters of trending log
levels for output and money aggregates plus three rates, with money leading
output by two quarters in the cyclical component.
"""
from pathlib import Path

import numpy as np


out = Path(__file__).resolve().parents[1] / "src" / "freqgc" / "data"

# --- white noise under the null -------------------------------------------
rng = np.random.default_rng(42)
wn = rng.standard_normal((200, 3))
lines = ["t,x,y,w"] + [f"{t + 1},{float(a)!r},{float(b)!r},{float(c)!r}" for t, (a, b, c) in enumerate(wn)]
(out / "white_noise.csv").write_text("\n".join(lines) + "\n")

# --- euro-area-shaped panel -------------------------------------------------
T = 76
# cycles: GDP, M3, M1, HICP, UN, LTN; M1 leads GDP at lag 2, GDP feeds M3
A1 = np.zeros((6, 6))
A2 = np.zeros((6, 6))
np.fill_diagonal(A1, [0.9, 0.8, 0.85, 0.7, 0.9, 0.8])
np.fill_diagonal(A2, [-0.2, -0.1, -0.15, 0.0, -0.1, 0.0])
A2[0, 2] = 0.15
A2[1, 0] = 0.2
A1[4, 0] = -0.2
cycles = np.zeros((T + 100, 6))
eps = np.random.default_rng(2017).standard_normal((T + 100, 6)) * [0.004, 0.006, 0.008, 0.1, 0.1, 0.15]
for t in range(2, T + 100):
    cycles[t] = A1 @ cycles[t - 1] + A2 @ cycles[t - 2] + eps[t]
cycles = cycles[100:]
t = np.arange(T)
levels = np.column_stack([
    np.exp(14.6 + 0.004 * t + cycles[:, 0]),
    np.exp(15.8 + 0.013 * t + cycles[:, 1]),
    np.exp(14.9 + 0.017 * t + cycles[:, 2]),
    2.0 + 0.005 * t + cycles[:, 3],
    9.0 + 1.5 * np.sin(t / 12) + cycles[:, 4],
    5.5 - 0.05 * t + cycles[:, 5],
])
quarters = [f"{1999 + q // 4}Q{q % 4 + 1}" for q in range(T)]
header = "date,GDP,M3,M1,HICP,UN,LTN"
rows = [q + "," + ",".join(repr(float(v)) for v in row) for q, row in zip(quarters, levels)]
(out / "euro_area_synthetic.csv").write_text(header + "\n" + "\n".join(rows) + "\n")
print("wrote", out / "white_noise.csv", "and", out / "euro_area_synthetic.csv")
