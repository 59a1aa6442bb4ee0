"""States, gates and the preparation circuit for the GHZ-mixture family.

The family interpolates between a GHZ state, a classically correlated
mixture of the weight-one basis states, and white noise::

    rho_mu     = mu |GHZ><GHZ| + (1 - mu)/3 (|001><001| + |010><010| + |100><100|)
    rho_{p,mu} = p rho_mu + (1 - p)/8 * I_8
"""

from __future__ import annotations

import numpy as np

from .linalg import dm, tensor

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

QUBIT_NAMES = "ABC"


def _check_unit(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


def basis_ket(label: str) -> np.ndarray:
    """Computational basis vector from a bit string, e.g. ``basis_ket("011")``."""
    dim = 1 << len(label)
    v = np.zeros(dim, dtype=complex)
    v[int(label, 2)] = 1.0
    return v


def ghz() -> np.ndarray:
    return (basis_ket("000") + basis_ket("111")) / np.sqrt(2)


def bell_phi(sign: int = +1) -> np.ndarray:
    """``|Phi+>`` (sign=+1) or ``|Phi->`` (sign=-1)."""
    return (basis_ket("00") + sign * basis_ket("11")) / np.sqrt(2)


def bloch_state(theta: float, phi: float) -> np.ndarray:
    """``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``."""
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def maximally_mixed(n_qubits: int = 3) -> np.ndarray:
    d = 1 << n_qubits
    return np.eye(d, dtype=complex) / d


def rho_p(p: float) -> np.ndarray:
    """GHZ state mixed with white noise at GHZ weight ``p``."""
    _check_unit("p", p)
    return p * dm(ghz()) + (1 - p) / 8 * np.eye(8, dtype=complex)


def rho_mu(mu: float) -> np.ndarray:
    _check_unit("mu", mu)
    weight_one = dm(basis_ket("001")) + dm(basis_ket("010")) + dm(basis_ket("100"))
    return mu * dm(ghz()) + (1 - mu) / 3 * weight_one


def rho_p_mu(p: float, mu: float) -> np.ndarray:
    _check_unit("p", p)
    return p * rho_mu(mu) + (1 - p) / 8 * np.eye(8, dtype=complex)


def family_mixture_weights(p: float, mu: float) -> tuple[float, np.ndarray]:
    """Decompose ``rho_{p,mu}`` as ``w_ghz |GHZ><GHZ| + sum_b w_b |b><b|``.

    Returns the GHZ weight and the eight basis-state weights (index = basis
    label).  This is how the target state is assembled from separately
    measured GHZ and computational-basis data.
    """
    _check_unit("p", p)
    _check_unit("mu", mu)
    w = np.full(8, (1 - p) / 8)
    for b in (0b001, 0b010, 0b100):
        w[b] += p * (1 - mu) / 3
    return p * mu, w


def cnot_unitary(control: int, target: int, n_qubits: int) -> np.ndarray:
    """Permutation matrix flipping ``target`` when ``control`` is 1."""
    if control == target:
        raise ValueError("control and target must differ")
    for q in (control, target):
        if not 0 <= q < n_qubits:
            raise IndexError(f"qubit index {q} out of range for {n_qubits} qubits")
    dim = 1 << n_qubits
    cbit = 1 << (n_qubits - 1 - control)
    tbit = 1 << (n_qubits - 1 - target)
    u = np.zeros((dim, dim))
    for i in range(dim):
        u[i ^ tbit if i & cbit else i, i] = 1.0
    return u


def toffoli_unitary() -> np.ndarray:
    """Three-qubit Toffoli with controls B, C and target A."""
    u = np.zeros((8, 8))
    for i in range(8):
        u[i ^ 0b100 if i & 0b011 == 0b011 else i, i] = 1.0
    return u


def prepare_ghz_circuit(return_intermediate: bool = False):
    """GHZ preparation: |0>_A |+>_B |0>_C, CNOT(B -> C), then Toffoli(B, C -> A).

    With ``return_intermediate=True`` also returns the state after the CNOT,
    which is ``|0>_A |Phi+>_BC``.
    """
    psi = tensor(KET0, KET_PLUS, KET0)
    mid = cnot_unitary(1, 2, 3) @ psi
    out = toffoli_unitary() @ mid
    if return_intermediate:
        return out, mid
    return out
