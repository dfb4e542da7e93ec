"""
Level and power by simulation
=============================

Run the bootstrap test on repeated draws from a design and aggregate
per-frequency rejection, prominence and degree of prominence. Reduced
sizes keep this quick; the acceptance suite runs the full settings.
"""
from freqgc import SimConfig, run_design
from freqgc.sim_harness import design_by_name, bonferroni_cases

config = SimConfig(n_boot=200, seed=1)

for name in ("white-noise-unconditional", "decreasing-1"):
    report = run_design(design_by_name(name).with_(n_mc=50), config)
    r = report.rejection_rate
    print(f"{name:28s} rejection {r[0]:.2f} (lowest f) .. {r[-1]:.2f} (f=0.5), "
          f"Bonferroni {report.overall_bonferroni_rate:.2f}")
    assert (report.degree_of_prominence >= report.prominence_rate).all()

print("\nBonferroni cases and the designs they are bound to:")
for case, entry in bonferroni_cases().items():
    print(f"  {case}: {entry['design']:22s} reported {entry['reported_rate']}")
