"""Complete positivity of Pauli-diagonal superoperators.

A diagonal superoperator Phi_D on n qubits fixes the identity and scales each
traceless basis element: ``Phi_D(lambda_i) = d_i lambda_i``. It can always be
written as

    Phi_D(rho) = sum_j beta_j lambda_j rho lambda_j

with

    beta = sign_table(n) @ (1, d_1, ..., d_{4**n - 1}) / 2**(n + 1)

Since the lambda_j are linearly independent, Phi_D is completely positive
exactly when every beta_j is nonnegative. For one qubit this reproduces the
Algoet-Fujiwara inequalities.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .channels import SignedOperatorSum, bloch_matrix
from .errors import InputError, NotCompletelyPositiveError
from .pauli_basis import basis_matrices, sign_transform

#: Default tolerance on min(beta) for the CP verdict.
BETA_TOL = 1e-9


@dataclass(frozen=True)
class DiagonalSpec:
    """Diagonal of the Bloch matrix of Phi_D, in basis order (index 1 first)."""

    n: int
    d: np.ndarray

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"qubit count must be a positive integer, got {self.n!r}")
        d = np.asarray(self.d, dtype=float).reshape(-1)
        if d.size != 4 ** self.n - 1:
            raise InputError(f"diagonal for n={self.n} needs {4 ** self.n - 1} entries, got {d.size}")
        if not np.all(np.isfinite(d)):
            raise InputError("diagonal entries must be finite")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def eigenvalues(self) -> np.ndarray:
        """(1, d_1, ..., d_m): the action on lambda_0, lambda_1, ..."""
        return np.concatenate(([1.0], self.d))


def betas_batch(d: np.ndarray, n: int) -> np.ndarray:
    """Vectorized beta for an array of diagonals of shape (..., 4**n - 1)."""
    d = np.asarray(d, dtype=float)
    if d.shape[-1] != 4 ** n - 1:
        raise InputError(f"diagonal for n={n} needs {4 ** n - 1} entries, got {d.shape[-1]}")
    ones = np.ones(d.shape[:-1] + (1,))
    return sign_transform(np.concatenate([ones, d], axis=-1), n) / 2 ** (n + 1)


def af_betas(spec: DiagonalSpec) -> np.ndarray:
    """beta vector of length 4**n, index 0 first.

    >>> af_betas(DiagonalSpec(1, [1, -1, 1])).tolist()
    [0.5, 0.5, -0.5, 0.5]
    """
    return betas_batch(spec.d, spec.n)


def eigenvalues_from_betas(beta: np.ndarray, n: int) -> np.ndarray:
    """Inverse of the beta map: returns (1, d) for a CPTP-normalized beta."""
    return sign_transform(beta, n) / 2 ** (n - 1)


def is_cp_diagonal(spec: DiagonalSpec, tol: float = BETA_TOL) -> tuple[bool, np.ndarray]:
    """CP iff min(beta) >= -tol; points on the boundary count as CP."""
    beta = af_betas(spec)
    return bool(beta.min() >= -tol), beta


def one_qubit_af_inequalities(d1: float, d2: float, d3: float) -> bool:
    """1 - d3 >= |d1 - d2| and 1 + d3 >= |d1 + d2|."""
    return bool(1 - d3 >= abs(d1 - d2) and 1 + d3 >= abs(d1 + d2))


def one_qubit_positivity(b0: float, b1: float, b2: float, b3: float) -> bool:
    """Positivity (not complete positivity) of sum_i b_i s_i rho s_i.

    The map sends positive matrices to positive matrices iff every pair of
    coefficients has a nonnegative sum.
    """
    return all(x + y >= 0 for x, y in combinations((b0, b1, b2, b3), 2))


def kraus_from_spec(spec: DiagonalSpec) -> SignedOperatorSum:
    """The ``(beta_j, lambda_j)`` decomposition of Phi_D.

    Negative betas are kept as negative weights; zero betas are dropped.
    """
    return SignedOperatorSum(spec.n, af_betas(spec), basis_matrices(spec.n))


def folded_kraus(spec: DiagonalSpec, tol: float = BETA_TOL) -> list[np.ndarray]:
    """Kraus operators sqrt(beta_j) lambda_j for a completely positive spec.

    Raises :class:`NotCompletelyPositiveError` if some beta_j < -tol. Betas in [-tol, 0] are
    treated as zero.
    """
    beta = af_betas(spec)
    if beta.min() < -tol:
        j = int(beta.argmin())
        raise NotCompletelyPositiveError(f"diagonal map is not completely positive: beta_{j} = {beta[j]:.6g} < 0")
    lam = basis_matrices(spec.n)
    return [np.sqrt(b) * lam[j] for j, b in enumerate(beta) if b > tol]


def diagonal_from_channel(channel: SignedOperatorSum, tol: float = 1e-9) -> Optional[DiagonalSpec]:
    """The diagonal of the channel's Bloch matrix, or None if it is not diagonal."""
    m = bloch_matrix(channel, tol)
    off = m - np.diag(np.diag(m))
    if np.abs(off).max(initial=0.0) > tol:
        return None
    return DiagonalSpec(channel.n, np.diag(m).copy())
