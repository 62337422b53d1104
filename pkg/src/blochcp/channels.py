"""Superoperators in signed operator-sum form.

A channel is stored as a list of ``(weight, element)`` terms and acts as

    Phi(rho) = sum_j w_j A_j rho A_j^dagger

with real weights. Weights of +/-1 give the usual signed decomposition; any
real weight is allowed so that Pauli-diagonal channels can be kept as
``(beta_j, lambda_j)`` pairs without taking square roots.

Complete positivity is decided by the Choi matrix

    J(Phi) = sum_{jk} E_jk (x) Phi(E_jk)

which is the reference against which every faster test in the package is
checked.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ContractError, InputError, NotCompletelyPositiveError
from .pauli_basis import basis_matrices

#: Minimum Choi eigenvalue accepted as nonnegative.
CP_TOL = 1e-9

#: Relative singular value cutoff for the Gram-matrix rank test.
RANK_TOL = 1e-8

# terms with |w| * max|A|^2 at or below this are dropped on construction
_ZERO_TERM = 1e-14


@dataclass(frozen=True)
class SignedOperatorSum:
    n: int
    weights: np.ndarray
    elements: np.ndarray  # shape (k, 2**n, 2**n)

    def __post_init__(self):
        dim = 2 ** self.n
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        a = np.asarray(self.elements, dtype=complex)
        if a.ndim == 2:
            a = a[None]
        if a.size == 0:
            a = np.zeros((0, dim, dim), dtype=complex)
        if a.shape[1:] != (dim, dim):
            raise InputError(f"elements must be {dim}x{dim} for n={self.n}, got {a.shape[1:]}")
        if len(w) != len(a):
            raise InputError(f"{len(w)} weights for {len(a)} elements")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(a)):
            raise InputError("weights and elements must be finite")
        scale = np.abs(w) * (np.abs(a).max(axis=(1, 2), initial=0.0) ** 2)
        keep = scale > _ZERO_TERM
        w, a = w[keep].copy(), a[keep].copy()
        w.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "elements", a)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, np.ndarray]], n: Optional[int] = None):
        """Build from ``(weight, element)`` pairs; ``n`` is inferred if omitted."""
        terms = list(terms)
        if n is None:
            if not terms:
                raise InputError("cannot infer the qubit count of an empty channel")
            n = qubits_for_dim(np.asarray(terms[0][1]).shape[0])
        weights = [t[0] for t in terms]
        elements = [np.asarray(t[1], dtype=complex) for t in terms]
        if not elements:
            elements = np.zeros((0, 2 ** n, 2 ** n), dtype=complex)
        return cls(n, np.array(weights, dtype=float), np.array(elements))

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def terms(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.weights.tolist(), self.elements))

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class CPReport:
    is_cp: bool
    min_choi_eigenvalue: float
    is_trace_preserving: bool
    is_unital: bool
    sign_verdict: Optional[bool]
    elements_independent: bool


def qubits_for_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise InputError(f"matrix dimension {dim} is not a power of two >= 2")
    return n


def apply(channel: SignedOperatorSum, rho: np.ndarray) -> np.ndarray:
    """Return sum_j w_j A_j rho A_j^dagger."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.dim, channel.dim):
        raise InputError(f"expected a {channel.dim}x{channel.dim} input, got shape {rho.shape}")
    a = channel.elements
    return np.einsum("t,tab,bc,tdc->ad", channel.weights, a, rho, a.conj())


def choi_matrix(channel: SignedOperatorSum) -> np.ndarray:
    """Choi matrix with block (j, k) equal to Phi(E_jk)."""
    dim = channel.dim
    a = channel.elements
    # Phi(E_jk)[x, y] = sum_t w_t A_t[x, j] conj(A_t[y, k])
    j = np.einsum("t,txj,tyk->jxky", channel.weights, a, a.conj())
    return j.reshape(dim * dim, dim * dim)


def choi_eigenvalues(channel: SignedOperatorSum) -> np.ndarray:
    j = choi_matrix(channel)
    return np.linalg.eigvalsh((j + j.conj().T) / 2)


def is_completely_positive(channel: SignedOperatorSum, tol: float = CP_TOL) -> tuple[bool, float]:
    """Choi test: CP iff the smallest Choi eigenvalue is >= -tol.

    Returns the verdict together with that eigenvalue.
    """
    lo = float(choi_eigenvalues(channel)[0])
    return lo >= -tol, lo


def _is_identity(m: np.ndarray, tol: float) -> bool:
    return bool(np.abs(m - np.eye(m.shape[0])).max() <= tol)


def is_trace_preserving(channel: SignedOperatorSum, tol: float = 1e-9) -> bool:
    a = channel.elements
    s = np.einsum("t,tba,tbc->ac", channel.weights, a.conj(), a)
    return _is_identity(s, tol)


def is_unital(channel: SignedOperatorSum, tol: float = 1e-9) -> bool:
    a = channel.elements
    s = np.einsum("t,tab,tcb->ac", channel.weights, a, a.conj())
    return _is_identity(s, tol)


def elements_linearly_independent(channel: SignedOperatorSum, rank_tol: float = RANK_TOL) -> bool:
    """Numerical full rank of the Hilbert-Schmidt Gram matrix of the elements.

    Borderline cases count as dependent.
    """
    k = len(channel)
    if k == 0:
        return True
    if k > channel.dim ** 2:
        return False
    vecs = channel.elements.reshape(k, -1)
    gram = vecs.conj() @ vecs.T
    # singular values of the Gram matrix are the squares of those of vecs
    sv = np.linalg.svd(gram, compute_uv=False)
    return bool(sv[-1] > rank_tol * sv[0])


def sign_verdict(channel: SignedOperatorSum, rank_tol: float = RANK_TOL) -> Optional[bool]:
    """CP verdict read off the weight signs.

    With linearly independent elements the channel is completely positive
    exactly when every weight is nonnegative. With dependent elements the
    signs say nothing (``sqrt(2)I rho sqrt(2)I - I rho I`` is the identity
    map), and ``None`` is returned.
    """
    if not elements_linearly_independent(channel, rank_tol):
        return None
    return bool(np.all(channel.weights >= 0))


def certify(channel: SignedOperatorSum, tol: float = CP_TOL, rank_tol: float = RANK_TOL) -> CPReport:
    """Run every check on ``channel`` and collect the results."""
    is_cp, lo = is_completely_positive(channel, tol)
    independent = elements_linearly_independent(channel, rank_tol)
    verdict = bool(np.all(channel.weights >= 0)) if independent else None
    return CPReport(
        is_cp=is_cp,
        min_choi_eigenvalue=lo,
        is_trace_preserving=is_trace_preserving(channel),
        is_unital=is_unital(channel),
        sign_verdict=verdict,
        elements_independent=independent,
    )


def bloch_matrix(channel: SignedOperatorSum, tol: float = 1e-9) -> np.ndarray:
    """Real (4**n - 1) square matrix M with Phi((I + c r.lambda)/N) = (I + c Mr.lambda)/N.

    Raises :class:`ContractError` unless the channel is unital and trace
    preserving; otherwise the affine part of the map would be lost.
    """
    if not is_unital(channel, tol):
        raise ContractError("Bloch matrix is only defined for unital channels")
    if not is_trace_preserving(channel, tol):
        raise ContractError("Bloch matrix is only defined for trace-preserving channels")
    lam = basis_matrices(channel.n)[1:]
    images = np.stack([apply(channel, m) for m in lam])
    # M[i, j] = tr(lambda_i Phi(lambda_j)) / 2
    m = np.einsum("iab,jba->ij", lam, images) / 2
    return m.real


def kraus_from_choi(channel: SignedOperatorSum, tol: float = CP_TOL) -> list[np.ndarray]:
    """Kraus operators with all-positive weights, from the Choi eigendecomposition.

    Raises :class:`NotCompletelyPositiveError` when the Choi matrix has an
    eigenvalue below -tol.
    """
    dim = channel.dim
    j = choi_matrix(channel)
    vals, vecs = np.linalg.eigh((j + j.conj().T) / 2)
    if vals[0] < -tol:
        raise NotCompletelyPositiveError(
            f"channel is not completely positive: min Choi eigenvalue {vals[0]:.6g}")
    # eigenvector entry (j, x) is A[x, j]
    return [np.sqrt(v) * vecs[:, i].reshape(dim, dim).T
            for i, v in enumerate(vals) if v > tol]


def unitary_channel(u: np.ndarray) -> SignedOperatorSum:
    """rho -> U rho U^dagger."""
    u = np.asarray(u, dtype=complex)
    return SignedOperatorSum(qubits_for_dim(u.shape[0]), [1.0], u[None])


def identity_channel(n: int = 1) -> SignedOperatorSum:
    return unitary_channel(np.eye(2 ** n))


def transpose_channel() -> SignedOperatorSum:
    """One-qubit transpose as I, s1, -s2, s3 each scaled by 1/sqrt(2)."""
    lam = basis_matrices(1)
    return SignedOperatorSum(1, [1, 1, -1, 1], lam / np.sqrt(2))


def transpose_channel_alt() -> SignedOperatorSum:
    """Second decomposition of the transpose: E00, E11, s1/sqrt(2), -s2/sqrt(2)."""
    lam = basis_matrices(1)
    e00 = np.array([[1, 0], [0, 0]], dtype=complex)
    e11 = np.array([[0, 0], [0, 1]], dtype=complex)
    return SignedOperatorSum(1, [1, 1, 1, -1],
                             np.stack([e00, e11, lam[1] / np.sqrt(2), lam[2] / np.sqrt(2)]))


def signed_identity_channel() -> SignedOperatorSum:
    """The identity map written as (sqrt(2) I) rho (sqrt(2) I) - I rho I."""
    eye = np.eye(2, dtype=complex)
    return SignedOperatorSum(1, [1, -1], np.stack([np.sqrt(2) * eye, eye]))


def depolarizing_channel() -> SignedOperatorSum:
    """Completely depolarizing one-qubit channel, rho -> tr(rho) I / 2."""
    return SignedOperatorSum(1, [0.5] * 4, basis_matrices(1) / np.sqrt(2))


def channel_from_elements(elements: Sequence[np.ndarray], weights: Optional[Sequence[float]] = None):
    elements = np.asarray(elements, dtype=complex)
    if weights is None:
        weights = np.ones(len(elements))
    return SignedOperatorSum(qubits_for_dim(elements.shape[-1]), weights, elements)
