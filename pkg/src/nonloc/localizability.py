"""Conditional pair states after a projective measurement on one qubit.

Entanglement of a three-qubit state is *localizable* through qubit ``j``
if some projection of ``j`` onto a pure state leaves the other two qubits
with a negative partial transpose.  :func:`minimize_pt_eig` searches the
whole Bloch sphere for the most negative such eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import atan2, cos, pi, sin, sqrt

import numpy as np
from scipy.optimize import minimize_scalar

from .entanglement import NEGATIVITY_TOL
from .linalg import eigvalsh, n_qubits_of
from .states import _check_unit, bloch_state

SUPPORT_TOL = 1e-12

N_THETA = 91
N_PHI = 72
REFINE_ROUNDS = 50
REFINE_XTOL = 1e-10
TIE_TOL = 1e-13


class NoSupportError(ValueError):
    """The projection annihilates the state."""


@dataclass(frozen=True)
class LocalizabilityCertificate:
    measured_qubit: int
    beta_min: float
    arg_theta: float
    arg_phi: float

    @property
    def nonlocalizable(self) -> bool:
        return self.beta_min >= -NEGATIVITY_TOL


def _check_three_qubits(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if n_qubits_of(rho) != 3:
        raise ValueError("expected a 3-qubit state")
    return rho


def measured_blocks(rho: np.ndarray, qubit: int) -> np.ndarray:
    """Blocks ``<a|rho|c>`` on ``qubit``, shape (2, 2, 4, 4).

    The remaining two qubits keep their relative order.
    """
    rho = _check_three_qubits(rho)
    if not 0 <= qubit < 3:
        raise IndexError(f"qubit index {qubit} out of range for 3 qubits")
    rest = [q for q in range(3) if q != qubit]
    t = rho.reshape([2] * 6).transpose([qubit, 3 + qubit, *rest, *(3 + q for q in rest)])
    return t.reshape(2, 2, 4, 4)


def _unnormalized_conditional(blocks: np.ndarray, psi: np.ndarray) -> np.ndarray:
    # Tr_j[(|psi><psi| (x) I) rho] = sum_ac conj(psi_a) psi_c <a|rho|c>
    return np.einsum("...a,...c,acij->...ij", psi.conj(), psi, blocks)


def conditional_state(rho: np.ndarray, qubit: int, theta: float, phi: float) -> tuple[np.ndarray, float]:
    """Normalized state of the other two qubits after projecting ``qubit``.

    Returns ``(state, probability)``; raises :class:`NoSupportError` when
    the outcome has probability below ``1e-12``.
    """
    sigma = _unnormalized_conditional(measured_blocks(rho, qubit), bloch_state(theta, phi))
    prob = float(np.trace(sigma).real)
    if prob < SUPPORT_TOL:
        raise NoSupportError(f"projection of qubit {qubit} onto ({theta}, {phi}) has no support")
    return sigma / prob, prob


def detection_probability(p: float, mu: float, theta: float) -> float:
    _check_unit("p", p)
    _check_unit("mu", mu)
    return 0.5 * (1 + p * (1 - mu) / 3 * cos(theta))


def beta_closed_form(p: float, mu: float, theta: float) -> float:
    """Possibly negative eigenvalue of the partial transpose of the *unnormalized* conditional state."""
    _check_unit("p", p)
    _check_unit("mu", mu)
    return (3 + p - 4 * p * mu + 2 * p * (2 * (1 - mu) * cos(theta) - 3 * mu * sin(theta))) / 24


def theta_opt_closed_form(mu: float) -> float:
    """Polar angle minimizing :func:`beta_closed_form`; pi at mu=0, pi/2 at mu=1."""
    _check_unit("mu", mu)
    return pi - atan2(1.5 * mu, 1 - mu)


def beta_opt_closed_form(p: float, mu: float) -> float:
    _check_unit("p", p)
    _check_unit("mu", mu)
    return (3 + p - 4 * p * mu - 2 * p * sqrt(4 + mu * (13 * mu - 8))) / 24


def _objective(blocks: np.ndarray, theta, phi, normalized: bool) -> np.ndarray:
    """Lowest PT eigenvalue of the conditional state for arrays of directions."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    psi = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)
    sigma = _unnormalized_conditional(blocks, psi)
    # partial transpose on the first remaining qubit
    sigma_pt = sigma.reshape(*sigma.shape[:-2], 2, 2, 2, 2).swapaxes(-4, -2).reshape(sigma.shape)
    lowest = eigvalsh(sigma_pt)[..., 0]
    if not normalized:
        return lowest
    prob = np.trace(sigma, axis1=-2, axis2=-1).real
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(prob < SUPPORT_TOL, np.inf, lowest / np.where(prob < SUPPORT_TOL, 1.0, prob))


def bloch_grid(n_theta: int = N_THETA, n_phi: int = N_PHI) -> tuple[np.ndarray, np.ndarray]:
    theta = np.linspace(0.0, pi, n_theta)
    phi = np.arange(n_phi) * (2 * pi / n_phi)
    return theta, phi


def minimize_pt_eig(rho: np.ndarray, measured_qubit: int, *, normalized: bool = True) -> LocalizabilityCertificate:
    """Minimize the lowest PT eigenvalue of the conditional pair state over the Bloch sphere.

    A 91 x 72 (theta, phi) grid is searched first; ties go to the smallest
    theta, then the smallest phi.  The best grid point is then refined by
    alternating bounded 1-D minimizations along theta and phi, each within
    one grid step of the current point.  A move is kept only if it lowers
    the objective, so flat directions keep their grid value.

    With ``normalized=False`` the objective is the eigenvalue of the
    unnormalized conditional state, i.e. the normalized one times the
    outcome probability.
    """
    blocks = measured_blocks(rho, measured_qubit)
    thetas, phis = bloch_grid()
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    vals = _objective(blocks, tt, pp, normalized).ravel()
    best = np.min(vals)
    if not np.isfinite(best):
        raise NoSupportError(f"every measurement direction on qubit {measured_qubit} annihilates the state")
    k = int(np.flatnonzero(vals <= best + TIE_TOL)[0])
    theta, phi = float(tt.ravel()[k]), float(pp.ravel()[k])

    def f(th, ph):
        return float(_objective(blocks, th, ph, normalized))

    dth = thetas[1] - thetas[0]
    dph = phis[1] - phis[0]
    for _ in range(REFINE_ROUNDS):
        moved = 0.0
        lo, hi = max(0.0, theta - dth), min(pi, theta + dth)
        r = minimize_scalar(lambda x: f(x, phi), bounds=(lo, hi), method="bounded",
                            options={"xatol": REFINE_XTOL * 1e-2})
        if r.fun < best - 1e-15:
            moved = max(moved, abs(r.x - theta))
            theta, best = float(r.x), float(r.fun)
        r = minimize_scalar(lambda x: f(theta, x), bounds=(phi - dph, phi + dph), method="bounded",
                            options={"xatol": REFINE_XTOL * 1e-2})
        if r.fun < best - 1e-15:
            moved = max(moved, abs(r.x - phi))
            phi, best = float(r.x) % (2 * pi), float(r.fun)
        if moved < REFINE_XTOL:
            break
    # end points are not probed by the bounded search
    for edge in (0.0, pi):
        v = f(edge, phi)
        if v < best - 1e-15:
            theta, best = edge, v
    return LocalizabilityCertificate(measured_qubit, float(best), float(theta), float(phi))


def certify_nonlocalizable(rho: np.ndarray) -> list[LocalizabilityCertificate]:
    rho = _check_three_qubits(rho)
    return [minimize_pt_eig(rho, j) for j in range(3)]


def is_nonlocalizable(certs: list[LocalizabilityCertificate]) -> bool:
    return all(c.nonlocalizable for c in certs)
