"""Density matrices and Bloch vectors for n-qubit systems.

A state on N = 2**n levels is written

    rho = (I + c * sum_i r_i lambda_i) / N,    c = sqrt(N (N - 1) / 2)

where the sum runs over the traceless basis elements (index >= 1). With this
normalization pure states have ``|r| = 1``. Component ``r[k]`` of a Bloch
vector belongs to basis index ``k + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .pauli_basis import basis_matrices

#: Eigenvalue tolerance for positivity checks on trace-one matrices.
PSD_TOL = 1e-9


def normalization(n: int) -> float:
    dim = 2 ** n
    return float(np.sqrt(dim * (dim - 1) / 2))


@dataclass(frozen=True)
class BlochVector:
    n: int
    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).reshape(-1)
        if r.size != 4 ** self.n - 1:
            raise InputError(
                f"Bloch vector for n={self.n} needs {4 ** self.n - 1} components, got {r.size}")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def c(self) -> float:
        return normalization(self.n)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.r))


def density_from_bloch(v: BlochVector) -> np.ndarray:
    """Return (I + c r.lambda) / N.

    The result is Hermitian with unit trace; for n >= 2 it need not be
    positive even when ``|r| <= 1``.
    """
    dim = 2 ** v.n
    lam = basis_matrices(v.n)[1:]
    return (np.eye(dim, dtype=complex) + v.c * np.tensordot(v.r, lam, axes=1)) / dim


def bloch_from_density(rho: np.ndarray, n: int, tol: float = 1e-9) -> BlochVector:
    """Invert :func:`density_from_bloch` using ``tr(lambda_i lambda_j) = 2 delta_ij``."""
    rho = np.asarray(rho, dtype=complex)
    dim = 2 ** n
    if rho.shape != (dim, dim):
        raise InputError(f"expected a {dim}x{dim} matrix for n={n}, got shape {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InputError(f"density matrix must have unit trace, got {tr:.3g}")
    lam = basis_matrices(n)[1:]
    # tr(lambda_i rho) = sum_ab lambda_i[a, b] rho[b, a]
    overlaps = np.einsum("iab,ba->i", lam, rho).real
    return BlochVector(n, dim * overlaps / (2 * normalization(n)))


def purity(v: BlochVector) -> float:
    """tr(rho^2) computed from the Bloch vector alone: 1/N + (1 - 1/N)|r|^2."""
    dim = 2 ** v.n
    return 1 / dim + (1 - 1 / dim) * float(v.r @ v.r)


def is_positive_semidefinite(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of the Hermitian matrix ``m`` is >= -tol."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max(initial=0.0) > tol:
        raise InputError("matrix is not Hermitian within tolerance")
    return bool(np.linalg.eigvalsh(m)[0] >= -tol)


def is_density_matrix(rho: np.ndarray, tol: float = PSD_TOL) -> bool:
    """Hermitian, unit trace and positive semidefinite, all within ``tol``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.abs(rho - rho.conj().T).max(initial=0.0) > tol:
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return is_positive_semidefinite(rho, tol)
