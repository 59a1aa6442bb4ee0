"""Small dense complex linear algebra for 1- to 3-qubit states.

All matrices are plain ``numpy.ndarray`` objects.  Qubit 0 (qubit A) is the
most significant bit of the computational basis label, so ``|abc>`` sits at
row ``4*a + 2*b + c`` of a three-qubit density matrix.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-9

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class StateError(ValueError):
    """Raised when a matrix violates a density-matrix invariant."""


def n_qubits_of(m: np.ndarray) -> int:
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if m.ndim != 2 or m.shape[1] != dim or dim != 1 << n or n < 1:
        raise ValueError(f"expected a square 2^n matrix, got shape {m.shape}")
    return n


def check_density_matrix(rho: np.ndarray, *, atol_herm: float = 1e-12) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array.

    Raises :class:`StateError` naming the invariant that failed.
    """
    rho = np.asarray(rho, dtype=complex)
    n_qubits_of(rho)
    if not np.all(np.isfinite(rho)):
        raise StateError("matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > atol_herm:
        raise StateError("matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_ATOL:
        raise StateError(f"trace is {tr.real:.6g}, expected 1")
    lo = np.linalg.eigvalsh(hermitize(rho))[0]
    if lo < -PSD_ATOL:
        raise StateError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3g})")
    return rho


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def dm(psi: np.ndarray) -> np.ndarray:
    """Projector ``|psi><psi|`` of a state vector."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors)."""
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _check_qubit(qubit: int, n: int) -> None:
    if not 0 <= qubit < n:
        raise IndexError(f"qubit index {qubit} out of range for {n} qubits")


def partial_transpose(rho: np.ndarray, qubit: int) -> np.ndarray:
    """Transpose the tensor factor belonging to ``qubit`` only."""
    rho = np.asarray(rho)
    n = n_qubits_of(rho)
    _check_qubit(qubit, n)
    t = rho.reshape([2] * (2 * n))
    return np.swapaxes(t, qubit, n + qubit).reshape(rho.shape)


def partial_trace(rho: np.ndarray, qubit: int) -> np.ndarray:
    """Trace out a single qubit."""
    rho = np.asarray(rho)
    n = n_qubits_of(rho)
    _check_qubit(qubit, n)
    if n < 2:
        raise ValueError("cannot trace out the only qubit")
    t = rho.reshape([2] * (2 * n))
    d = 1 << (n - 1)
    return np.trace(t, axis1=qubit, axis2=n + qubit).reshape(d, d)


def permute_qubits(rho: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Relabel qubits: new qubit ``k`` is old qubit ``order[k]``.

    Implemented as conjugation by an explicit basis permutation matrix.
    """
    n = n_qubits_of(np.asarray(rho))
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order!r} is not a permutation of {n} qubits")
    dim = 1 << n
    perm = np.zeros((dim, dim))
    for old in range(dim):
        bits = [(old >> (n - 1 - q)) & 1 for q in range(n)]
        new = 0
        for k in range(n):
            new = (new << 1) | bits[order[k]]
        perm[new, old] = 1.0
    return perm @ rho @ perm.T


def eig_hermitian(m: np.ndarray, *, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized as ``(M + M^dagger)/2`` first.  Sweeps stop once
    the off-diagonal Frobenius norm falls below ``JACOBI_TOL`` (relative to
    the matrix norm for matrices with norm above one) or after
    ``JACOBI_MAX_SWEEPS`` sweeps.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Orthonormal eigenvectors as columns, ``m @ v = v @ diag(w)``.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if check and np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_ATOL:
        raise ValueError("matrix is not Hermitian within tolerance")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    a = hermitize(m)
    v = np.eye(n, dtype=complex)
    scale = max(1.0, np.linalg.norm(a))
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(JACOBI_MAX_SWEEPS):
        if np.sqrt(np.sum(np.abs(a[offdiag]) ** 2)) < JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # unitary acting on columns p, q: [[c, s*phase], [-s*conj(phase), c]]
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * np.conj(phase) * aq
                a[:, q] = s * phase * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * phase * aq
                a[q, :] = s * np.conj(phase) * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * np.conj(phase) * vq
                v[:, q] = s * phase * vp + c * vq

    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of one Hermitian matrix or a stack of them (LAPACK)."""
    m = np.asarray(m)
    return np.linalg.eigvalsh(0.5 * (m + np.swapaxes(m, -1, -2).conj()))


def min_eig(m: np.ndarray) -> float:
    return float(eig_hermitian(m)[0][0])


def det_hermitian(m: np.ndarray) -> float:
    return float(np.prod(eig_hermitian(m)[0]))


def sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-PSD_ATOL, 0)`` are clamped to zero; anything more
    negative raises ``ValueError``.
    """
    w, v = eig_hermitian(m)
    if w[0] < -PSD_ATOL:
        raise ValueError(f"matrix has a significantly negative eigenvalue {w[0]:.3g}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    s = sqrt_psd(rho)
    inner = hermitize(s @ sigma @ s)
    w = np.clip(eig_hermitian(inner)[0], 0.0, None)
    return float(min(1.0, np.sum(np.sqrt(w)) ** 2))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(eigvalsh(rho - sigma))))


def state_to_json(rho: np.ndarray) -> str:
    """Serialize a density matrix as ``{"n_qubits": n, "entries": [[[re, im], ...], ...]}``."""
    rho = np.asarray(rho, dtype=complex)
    doc = {
        "n_qubits": n_qubits_of(rho),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in rho],
    }
    return json.dumps(doc)


def state_from_json(text: str, *, validate: bool = True) -> np.ndarray:
    doc = json.loads(text)
    try:
        n = int(doc["n_qubits"])
        entries = np.array(doc["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed state document: {exc}") from exc
    dim = 1 << n
    if entries.shape != (dim, dim, 2):
        raise StateError(f"entries have shape {entries.shape}, expected {(dim, dim, 2)}")
    rho = entries[..., 0] + 1j * entries[..., 1]
    return check_density_matrix(rho) if validate else rho


def save_state(path, rho: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(state_to_json(rho))
        fh.write("\n")


def load_state(path, *, validate: bool = True) -> np.ndarray:
    with open(path) as fh:
        return state_from_json(fh.read(), validate=validate)
