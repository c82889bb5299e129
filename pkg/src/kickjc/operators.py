"""Dense complex matrix substrate: Hermitian eigendecomposition and unitary propagators.

All operators in this package are small (dimension of a few tens at most), so
everything is dense and exponentials go through an eigendecomposition rather than
a series expansion. That keeps propagators unitary to eigensolver precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used to validate inputs.

    Defaults sit a few hundred eps above double precision for the matrix sizes used here.
    """

    hermitian: float = 1e-12
    unitary: float = 1e-10
    norm: float = 1e-10


DEFAULT_TOL = Tolerances()


class NonHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


class NonUnitaryError(ValueError):
    """Raised when a matrix expected to be unitary is not."""


class EigDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_square(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    return m


def check_hermitian(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not Hermitian.

    The allowed deviation scales with ``max(1, max|m|)``.
    """
    m = _as_square(m)
    dev = np.abs(m - m.conj().T)
    worst = float(dev.max())
    scale = max(1.0, float(np.abs(m).max()))
    if worst >= tol.hermitian * scale:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise NonHermitianError(
            f"matrix is not Hermitian: |M[{i}][{j}] - conj(M[{j}][{i}])| = {worst:.3e} "
            f"(M[{i}][{j}] = {m[i, j]:.6g}, M[{j}][{i}] = {m[j, i]:.6g})"
        )
    return m


def unitarity_error(u) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def check_unitary(u, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    u = _as_square(u)
    err = unitarity_error(u)
    if err >= tol.unitary:
        raise NonUnitaryError(f"matrix is not unitary: max|U^dag U - I| = {err:.3e}")
    return u


def hermitian_eig(m, tol: Tolerances = DEFAULT_TOL) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned in ascending order, ties kept in solver index order.
    Inside a degenerate cluster the eigenvectors are an arbitrary orthonormal basis.

    Raises:
        NonHermitianError: if ``m`` deviates from Hermitian beyond ``tol.hermitian``;
            the message names the worst entry.
    """
    m = check_hermitian(m, tol)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    order = np.argsort(w, kind="stable")
    return EigDecomposition(w[order], v[:, order])


def unitary_exp(h, scale: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Return ``exp(i * scale * h)`` for Hermitian ``h``."""
    w, v = hermitian_eig(h, tol)
    return (v * np.exp(1j * scale * w)) @ v.conj().T


def unitary_eig(u, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases in (-pi, pi] and orthonormal eigenvectors of a unitary matrix.

    Uses the complex Schur form; for a normal matrix the triangular factor is diagonal
    to rounding, so the Schur vectors are eigenvectors even across near-degeneracies.
    """
    u = check_unitary(u, tol)
    t, z = sla.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    # np.angle can return -pi for values on the negative real axis
    phases = np.where(phases <= -np.pi, phases + 2 * np.pi, phases)
    return phases, z


def apply(u, psi, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if u.ndim != 2 or psi.ndim != 1 or u.shape[1] != psi.shape[0]:
        raise ValueError(f"dimension mismatch: operator {u.shape} vs state {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) >= tol.norm:
        raise ValueError(f"state is not normalized: |psi| = {norm:.15g}")
    return u @ psi
