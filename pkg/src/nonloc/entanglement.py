"""Partial-transpose certificates and closed-form thresholds of the family."""

from __future__ import annotations

from dataclasses import dataclass
from math import sin, sqrt

import numpy as np

from .linalg import det_hermitian, min_eig, n_qubits_of, partial_transpose
from .states import _check_unit

NEGATIVITY_TOL = 1e-10
DET_TOL = 1e-12


@dataclass(frozen=True)
class PtCertificate:
    qubit: int
    min_eigenvalue: float

    @property
    def is_npt(self) -> bool:
        return self.min_eigenvalue < -NEGATIVITY_TOL


def pt_certificate(rho: np.ndarray, qubit: int) -> PtCertificate:
    """Lowest eigenvalue of the partial transpose on ``qubit``.

    A negative value certifies entanglement between ``qubit`` and the rest.
    """
    n = n_qubits_of(np.asarray(rho))
    if n not in (2, 3):
        raise ValueError(f"expected a 2- or 3-qubit state, got {n} qubits")
    return PtCertificate(qubit, min_eig(partial_transpose(rho, qubit)))


def full_inseparability_report(rho: np.ndarray) -> list[PtCertificate]:
    if n_qubits_of(np.asarray(rho)) != 3:
        raise ValueError("full inseparability needs a 3-qubit state")
    return [pt_certificate(rho, j) for j in range(3)]


def is_fully_inseparable(certs: list[PtCertificate]) -> bool:
    return all(c.is_npt for c in certs)


def alpha_closed_form(p: float, mu: float) -> float:
    """The one possibly negative eigenvalue of the partial transpose of rho_{p,mu}."""
    _check_unit("p", p)
    _check_unit("mu", mu)
    return (3 + p - 4 * p * mu - 4 * p * sqrt(1 + 2 * mu * (5 * mu - 1))) / 24


def p_ppt_threshold(mu: float) -> float:
    """Smallest p at which rho_{p,mu} has a negative partial transpose."""
    _check_unit("mu", mu)
    return 3 / (4 * mu - 1 + 4 * sqrt(1 + 2 * mu * (5 * mu - 1)))


def p_nloc_threshold(mu: float) -> float:
    """Largest p for which no projective measurement localizes entanglement."""
    _check_unit("mu", mu)
    return 3 / (4 * mu - 1 + 2 * sqrt(4 + mu * (13 * mu - 8)))


def p_col_threshold(mu: float) -> float:
    """Smallest p at which the unconditional CNOT-based localization gives NPT output."""
    _check_unit("mu", mu)
    return 9 / (5 + 4 * mu + 4 * sqrt(1 + 2 * mu * (14 * mu - 1)))


def two_qubit_separable(rho: np.ndarray) -> tuple[bool, float]:
    """Two-qubit separability from the sign of ``det(rho^{T_A})``."""
    if n_qubits_of(np.asarray(rho)) != 2:
        raise ValueError("expected a 2-qubit state")
    d = det_hermitian(partial_transpose(rho, 0))
    return d >= -DET_TOL, d


def det_pt_bound(p: float, theta: float) -> float:
    """``det`` of the partial transpose of the conditional pair state of rho_p.

    Independent of the azimuth of the measurement direction.
    """
    _check_unit("p", p)
    s2 = sin(theta) ** 2
    return -(p**4) / 16 * s2 * s2 - p**3 * (1 - p) / 16 * s2 + ((1 - p) / 4) ** 3 * (3 * p + 1) / 4


def det_pt_lower_bound(p: float) -> float:
    """Minimum over theta of :func:`det_pt_bound`, reached at theta = pi/2."""
    return ((1 + p) / 4) ** 3 * (1 - 3 * p) / 4


BISEPARABLE_P_MAX = 3 / 7


def biseparable_family(p: float, mu: float) -> bool:
    """Biseparability of GHZ + white noise (mu = 1 only): true iff p <= 3/7."""
    _check_unit("p", p)
    if mu != 1:
        raise ValueError("the biseparability bound is only known for mu = 1")
    return p <= BISEPARABLE_P_MAX
