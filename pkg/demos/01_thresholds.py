"""
Entanglement thresholds of the GHZ-noise family
===============================================

The family mixes a GHZ state (weight p*mu), a uniform mixture of the three
single-excitation states |001>, |010>, |100> (weight p*(1-mu)) and white
noise.  Three values of p matter for each mu:

* p_ppt   above which every 1-vs-2 cut has a negative partial transpose,
* p_col   above which the collective CNOT + Kraus map localizes entanglement
          without postselection,
* p_nloc  up to which no single-qubit measurement localizes anything.

Between p_ppt and p_nloc the state is fully inseparable yet its
entanglement cannot be localized by measuring one qubit.
"""

import numpy as np

from nonloc.cli import thresholds_csv
from nonloc.entanglement import p_col_threshold, p_nloc_threshold, p_ppt_threshold

# The GHZ + white noise endpoint: entangled for p > 1/5, nonlocalizable up to 1/3
print("mu = 1:", p_ppt_threshold(1), p_col_threshold(1), p_nloc_threshold(1))

# Width of the "entangled but nonlocalizable" window along mu
for mu in np.linspace(0, 1, 6):
    lo, hi = p_ppt_threshold(mu), p_nloc_threshold(mu)
    print(f"mu = {mu:.1f}   p in ({lo:.4f}, {hi:.4f}]   width {hi - lo:.4f}")

# The same table as plot-ready CSV (what `nonloc thresholds` writes)
print(thresholds_csv(6))
