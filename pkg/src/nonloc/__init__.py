"""Nonlocalizable entanglement in GHZ-noise mixtures of three qubits.

Constructs the two-parameter state family, certifies full inseparability
and nonlocalizability with partial-transpose eigenvalues, localizes
entanglement with a collective CNOT, and runs the tomography analysis
(MaxLik reconstruction with Monte Carlo error bars) on simulated counts.
"""

__version__ = "0.1.0"

from .entanglement import (
    PtCertificate,
    alpha_closed_form,
    biseparable_family,
    det_pt_bound,
    full_inseparability_report,
    p_col_threshold,
    p_nloc_threshold,
    p_ppt_threshold,
    pt_certificate,
    two_qubit_separable,
)
from .linalg import (
    det_hermitian,
    eig_hermitian,
    fidelity,
    min_eig,
    partial_trace,
    partial_transpose,
    sqrt_psd,
    tensor,
)
from .localizability import (
    LocalizabilityCertificate,
    beta_closed_form,
    beta_opt_closed_form,
    certify_nonlocalizable,
    conditional_state,
    detection_probability,
    minimize_pt_eig,
    theta_opt_closed_form,
)
from .localization import (
    KrausChannel,
    apply_cnot_bc,
    conditional_localize,
    gamma_closed_form,
    localization_channel,
    unconditional_localize,
)
from .states import (
    bloch_state,
    cnot_unitary,
    ghz,
    prepare_ghz_circuit,
    rho_mu,
    rho_p,
    rho_p_mu,
    toffoli_unitary,
)
from .tomography import (
    CountTable,
    MonteCarloResult,
    apply_local_filter,
    born_probability,
    full_setting_set,
    maxlik_reconstruct,
    mix_frequencies,
    monte_carlo,
    simulate_counts,
)
