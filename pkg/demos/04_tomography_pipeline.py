"""
Simulated experiment: tomography, reconstruction and error bars
===============================================================

The target state is built the way it is in the lab: GHZ data and the eight
computational basis states are measured separately in all 6^3 = 216
settings, and the relative frequencies are mixed with the family weights.
Counts are Poisson distributed.

The mixed frequencies are reconstructed by maximum likelihood, the
certificates are evaluated on the estimate, and Monte Carlo resampling
gives error bars.  The numbers here test the analysis chain only; they are
not meant to reproduce any hardware imperfections.
"""

import json

from nonloc.cli import dump_report, pipeline_demo

report = pipeline_demo(p=0.25, mu=1.0, mean_counts=1e4, seed=7, samples=50)

rec, mc, theory = report["reconstructed"], report["monte_carlo"], report["theory"]
print(f"fidelity with the target: {rec['fidelity']:.5f}")
for q in "ABC":
    a, sa = rec["alpha"][q], mc[f"alpha_{q}"]["std"]
    b, sb = rec["beta"][q]["value"], mc[f"beta_{q}"]["std"]
    print(f"{q}: alpha = {a:+.4f} +- {sa:.4f} (theory {theory['alpha']:+.4f})   "
          f"beta = {b:+.4f} +- {sb:.4f} (theory {theory['beta'][q]:+.4f})")
print(f"conditional localization on the estimate: p0 = {rec['conditional']['p0']:.4f}, "
      f"delta = {rec['conditional']['delta']:+.4f} (theory {theory['delta']:+.4f})")

# Full report, as written by `nonloc pipeline-demo --report ...`
print(dump_report(report)[:400], "...")
