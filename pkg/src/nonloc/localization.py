"""Extracting two-qubit entanglement with a collective CNOT on qubits B and C.

Two routes are provided: postselecting qubit C on ``|0>`` after the CNOT
(conditional), and replacing that measurement by a trace-preserving map on
B and C followed by discarding C (unconditional).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Sequence

import numpy as np

from .linalg import dm, n_qubits_of, partial_trace, tensor
from .localizability import SUPPORT_TOL, NoSupportError
from .states import KET0, KET1, _check_unit, cnot_unitary

KRAUS_ATOL = 1e-12


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = {k.shape for k in self.operators}
        if len(dims) != 1:
            raise ValueError(f"Kraus operators have mismatched shapes {dims}")
        if not self.is_trace_preserving():
            raise ValueError("Kraus operators do not satisfy sum K^dagger K = I")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.operators)

    def is_trace_preserving(self, atol: float = KRAUS_ATOL) -> bool:
        return bool(np.allclose(self.completeness(), np.eye(self.dim), rtol=0, atol=atol))

    def embed(self, left: int = 0, right: int = 0) -> "KrausChannel":
        """The same channel acting as ``I_left (x) K (x) I_right`` on a larger register."""
        il, ir = np.eye(1 << left), np.eye(1 << right)
        return KrausChannel(tuple(tensor(il, k, ir) for k in self.operators))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.operators)


def _check_three_qubits(rho):
    rho = np.asarray(rho, dtype=complex)
    if n_qubits_of(rho) != 3:
        raise ValueError("expected a 3-qubit state")
    return rho


def apply_cnot_bc(rho: np.ndarray) -> np.ndarray:
    """Conjugate by CNOT with qubit B as control and C as target."""
    rho = _check_three_qubits(rho)
    u = cnot_unitary(1, 2, 3)
    return u @ rho @ u.T


def _postselect_c(rho: np.ndarray, outcome: int) -> np.ndarray:
    proj = tensor(np.eye(4), dm(KET0 if outcome == 0 else KET1))
    return partial_trace(proj @ rho @ proj, 2)


def conditional_localize(rho: np.ndarray, outcome: int = 0) -> tuple[np.ndarray, float]:
    """CNOT(B -> C), measure C in the computational basis, keep ``outcome``.

    Returns the normalized A-B state and the outcome probability.  Only the
    ``outcome=0`` branch localizes entanglement for the GHZ family.
    """
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    sigma = _postselect_c(apply_cnot_bc(rho), outcome)
    prob = float(np.trace(sigma).real)
    if prob < SUPPORT_TOL:
        raise NoSupportError(f"outcome {outcome} on qubit C has no support")
    return sigma / prob, prob


def success_probability(p: float, mu: float) -> float:
    """Probability of outcome 0 in :func:`conditional_localize` for rho_{p,mu}."""
    _check_unit("p", p)
    _check_unit("mu", mu)
    return (p * (4 * mu - 1) + 3) / 6


def localization_channel() -> KrausChannel:
    """Trace-preserving map on (B, C), in order I(x)|0><0|, |0><0|(x)|1><1|, |0><1|(x)|1><1|."""
    p0 = np.array([[1, 0], [0, 0]])
    p1 = np.array([[0, 0], [0, 1]])
    lower = np.array([[0, 1], [0, 0]])
    return KrausChannel((
        np.kron(np.eye(2, dtype=int), p0),
        np.kron(p0, p1),
        np.kron(lower, p1),
    ))


def unconditional_localize(rho: np.ndarray, *, keep_c: bool = False) -> np.ndarray:
    """CNOT(B -> C), the localization channel on (B, C), then discard C."""
    out = localization_channel().embed(left=1)(apply_cnot_bc(rho))
    return out if keep_c else partial_trace(out, 2)


def gamma_closed_form(p: float, mu: float) -> float:
    """Lowest PT eigenvalue of the unconditional output for rho_{p,mu}."""
    _check_unit("p", p)
    _check_unit("mu", mu)
    a = 3 + p - 4 * p * mu
    return (6 - 2 * p - 4 * p * mu - sqrt(a * a + 144 * p * p * mu * mu)) / 24
