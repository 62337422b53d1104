"""Pauli matrices, the normalized n-qubit tensor basis and its sign tables.

Basis elements are indexed in dictionary order: index ``i`` is read as the
base-4 number ``j_1 j_2 ... j_n`` (most significant digit first) and maps to

    lambda_i = sigma_{j_1} (x) ... (x) sigma_{j_n} / sqrt(2**(n-1))

so that ``tr(lambda_i lambda_j) = 2 delta_ij`` for every pair, including the
scaled identity ``lambda_0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import InputError, ResourceError

#: Largest qubit count for which basis elements and sign tables are built.
MAX_QUBITS = 4

#: Default absolute tolerance for matrix equality checks.
DEFAULT_ATOL = 1e-10

_PAULI = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _m in _PAULI:
    _m.setflags(write=False)

# sigma_i sigma_j sigma_i = c_ij sigma_j
_SIGN_TABLE_1 = np.array(
    [[1, 1, 1, 1],
     [1, 1, -1, -1],
     [1, -1, 1, -1],
     [1, -1, -1, 1]],
    dtype=np.int8,
)
_SIGN_TABLE_1.setflags(write=False)


@dataclass(frozen=True)
class BasisElement:
    """One normalized Pauli tensor product.

    ``digits`` are the base-4 digits of ``index``, most significant first.
    """

    n: int
    index: int
    digits: tuple[int, ...]
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_qubits(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InputError(f"qubit count must be a positive integer, got {n!r}")
    if n > MAX_QUBITS:
        raise ResourceError(f"n={n} exceeds the qubit cap MAX_QUBITS={MAX_QUBITS}")


def pauli(i: int) -> np.ndarray:
    """Return sigma_i for i in {0, 1, 2, 3}, with sigma_0 the identity.

    The returned array is read-only.
    """
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or not 0 <= i <= 3:
        raise InputError(f"Pauli index must be in {{0,1,2,3}}, got {i!r}")
    return _PAULI[int(i)]


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the usual row-major block layout."""
    return np.kron(np.asarray(a), np.asarray(b))


def index_digits(n: int, index: int) -> tuple[int, ...]:
    """Base-4 digits of ``index`` padded to length n, most significant first."""
    digits = []
    for _ in range(n):
        index, r = divmod(index, 4)
        digits.append(r)
    return tuple(reversed(digits))


@lru_cache(maxsize=None)
def _basis_matrix(n: int, index: int) -> np.ndarray:
    factors = [_PAULI[j] for j in index_digits(n, index)]
    m = reduce(np.kron, factors) / np.sqrt(2.0 ** (n - 1))
    m.setflags(write=False)
    return m


def basis_element(n: int, index: int) -> BasisElement:
    """Return lambda_index for an n-qubit system.

    >>> basis_element(2, 5).digits
    (1, 1)
    """
    _check_qubits(n)
    if not isinstance(index, (int, np.integer)) or not 0 <= index < 4 ** n:
        raise InputError(f"basis index must be in [0, {4 ** n - 1}] for n={n}, got {index!r}")
    n, index = int(n), int(index)
    return BasisElement(n=n, index=index, digits=index_digits(n, index),
                        matrix=_basis_matrix(n, index))


@lru_cache(maxsize=None)
def _basis_stack(n: int) -> np.ndarray:
    stack = np.stack([_basis_matrix(n, i) for i in range(4 ** n)])
    stack.setflags(write=False)
    return stack


def basis_matrices(n: int) -> np.ndarray:
    """All 4**n basis matrices stacked along axis 0 (read-only)."""
    _check_qubits(n)
    return _basis_stack(int(n))


@lru_cache(maxsize=None)
def _sign_table(n: int) -> np.ndarray:
    table = reduce(np.kron, [_SIGN_TABLE_1] * n).astype(np.int8)
    table.setflags(write=False)
    return table


def sign_table(n: int) -> np.ndarray:
    """The (4**n, 4**n) table of signs with
    ``lambda_i lambda_j lambda_i = table[i, j] * lambda_j / 2**(n-1)``.

    Built as the n-fold Kronecker power of the one-qubit table.
    """
    _check_qubits(n)
    return _sign_table(int(n))


def sign_transform(v: np.ndarray, n: int) -> np.ndarray:
    """Multiply ``v`` by ``sign_table(n)`` without forming the table.

    Works on the last axis, so a batch of shape (..., 4**n) is accepted. The
    cost is O(n * 4**n) per vector: the index is split into its n base-4
    digits and the 4x4 one-qubit table is applied along each digit axis.
    """
    v = np.asarray(v, dtype=float)
    size = 4 ** n
    if v.shape[-1] != size:
        raise InputError(f"last axis must have length {size}, got {v.shape[-1]}")
    batch = v.shape[:-1]
    out = v.reshape(batch + (4,) * n)
    c = _SIGN_TABLE_1.astype(float)
    nb = len(batch)
    for axis in range(n):
        # table is symmetric so contracting on either index is the same
        out = np.moveaxis(np.tensordot(out, c, axes=([nb + axis], [0])), -1, nb + axis)
    return out.reshape(batch + (size,))
