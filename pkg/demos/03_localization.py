"""
Localizing entanglement with a collective operation
===================================================

Measuring one qubit cannot localize the entanglement of rho_{1/4,1}, but a
CNOT between B and C followed by reading C can.

Conditional route: keep the outcome C = 0 (probability p0) and look at AB.
Unconditional route: a three-element Kraus map on BC, then discard C.
"""

import numpy as np

from nonloc.entanglement import p_col_threshold, pt_certificate
from nonloc.localization import (
    conditional_localize,
    gamma_closed_form,
    localization_channel,
    unconditional_localize,
)
from nonloc.states import rho_p_mu

rho = rho_p_mu(0.25, 1.0)

pair, p0 = conditional_localize(rho)
print(f"p0 = {p0}, delta = {pt_certificate(pair, 0).min_eigenvalue:+.6f}")  # -1/20

ch = localization_channel()
print("sum O^dag O =\n", ch.completeness())

out = unconditional_localize(rho)
print(f"gamma = {pt_certificate(out, 0).min_eigenvalue:+.6f} (closed form {gamma_closed_form(0.25, 1.0):+.6f})")

# Unconditional localization only works above p_col; scan across it.
pc = p_col_threshold(1.0)
for p in np.linspace(0.2, 0.4, 5):
    g = pt_certificate(unconditional_localize(rho_p_mu(p, 1.0)), 0).min_eigenvalue
    print(f"p = {p:.2f}  gamma = {g:+.5f}  {'entangled' if g < 0 else 'separable'}  (p_col = {pc:.4f})")
