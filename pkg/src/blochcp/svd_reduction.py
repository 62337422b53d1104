"""One-qubit unital maps: rotation factorization and reduction to the diagonal case.

Any real 3x3 matrix factors as ``M = B D A`` with B, A proper rotations and
D diagonal. Rotations act on the Bloch ball as unitary conjugations, so the
map induced by M is completely positive iff the map induced by D is, and

    Phi_M(rho) = sum_i beta_i (U_B s_i U_A) rho (U_B s_i U_A)^dagger

where beta are the diagonal-case coefficients of D and U_A, U_B lift A, B.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import SignedOperatorSum
from .diagonal_af import BETA_TOL, DiagonalSpec, is_cp_diagonal
from .errors import InputError
from .pauli_basis import basis_matrices

# smallest singular value treated as zero, relative to the largest
_ZERO_SV = 1e-12
_ROTATION_TOL = 1e-8
_FLIP = np.diag([1.0, 1.0, -1.0])


@dataclass(frozen=True)
class RotationFactorization:
    B: np.ndarray
    D: np.ndarray
    A: np.ndarray
    M: np.ndarray

    @property
    def d(self) -> np.ndarray:
        return np.diag(self.D).copy()

    @property
    def residual(self) -> float:
        return float(np.abs(self.B @ self.D @ self.A - self.M).max())


@dataclass(frozen=True)
class UnitaryLift:
    R: np.ndarray
    U: np.ndarray


def _as_3x3(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise InputError(f"expected a 3x3 real matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix entries must be finite")
    return m


def signed_svd(m) -> RotationFactorization:
    """Factor ``m = B @ D @ A`` with det B = det A = 1.

    For det m >= 0 the diagonal of D holds the singular values in decreasing
    order; for det m < 0 it holds their negatives in increasing order, i.e.
    ``-s_1 <= -s_2 <= -s_3``.
    """
    m = _as_3x3(m)
    u, s, vt = np.linalg.svd(m)
    det_u = np.linalg.det(u)
    det_v = np.linalg.det(vt)
    # orientation of the factors decides the branch; det(m) itself can round
    # to the wrong sign when a singular value is tiny
    if det_u * det_v > 0 or s[2] <= _ZERO_SV * max(1.0, s[0]):
        # make both factors proper; a single flip negates s[2], which is
        # then zero to working precision
        if det_u < 0:
            u = u @ _FLIP
        if det_v < 0:
            vt = _FLIP @ vt
        d = s
    else:
        # det u * det v = -1: absorb a factor -1 into whichever is improper
        d = -s
        if det_u < 0:
            u = -u
        else:
            vt = -vt
    return RotationFactorization(B=u, D=np.diag(d), A=vt, M=m)


def is_rotation(r, tol: float = _ROTATION_TOL) -> bool:
    r = np.asarray(r, dtype=float)
    return (r.shape == (3, 3)
            and np.abs(r.T @ r - np.eye(3)).max() <= tol
            and abs(np.linalg.det(r) - 1) <= tol)


def _quaternion(r: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) of a rotation matrix, w >= 0.

    Picks the largest of the four squared components to divide by, which
    stays accurate near angle 0 and angle pi.
    """
    t = np.trace(r)
    sq = np.array([1 + t,
                   1 + 2 * r[0, 0] - t,
                   1 + 2 * r[1, 1] - t,
                   1 + 2 * r[2, 2] - t]) / 4
    k = int(np.argmax(sq))
    q = np.empty(4)
    q[k] = np.sqrt(sq[k])
    f = 4 * q[k]
    if k == 0:
        q[1] = (r[2, 1] - r[1, 2]) / f
        q[2] = (r[0, 2] - r[2, 0]) / f
        q[3] = (r[1, 0] - r[0, 1]) / f
    elif k == 1:
        q[0] = (r[2, 1] - r[1, 2]) / f
        q[2] = (r[0, 1] + r[1, 0]) / f
        q[3] = (r[0, 2] + r[2, 0]) / f
    elif k == 2:
        q[0] = (r[0, 2] - r[2, 0]) / f
        q[1] = (r[0, 1] + r[1, 0]) / f
        q[3] = (r[1, 2] + r[2, 1]) / f
    else:
        q[0] = (r[1, 0] - r[0, 1]) / f
        q[1] = (r[0, 2] + r[2, 0]) / f
        q[2] = (r[1, 2] + r[2, 1]) / f
    q /= np.linalg.norm(q)
    if q[0] < 0 or (q[0] == 0 and q[k] < 0):
        q = -q
    return q


def rotation_to_unitary(r) -> UnitaryLift:
    """SU(2) matrix U with U (I + v.s) U^dagger / 2 = (I + (Rv).s) / 2.

    U = cos(t/2) I - i sin(t/2) (n.s) for the rotation by angle t about the
    unit axis n. Of the two lifts +-U the one with nonnegative cos(t/2) is
    returned.
    """
    r = _as_3x3(r)
    if not is_rotation(r):
        raise InputError("matrix is not a proper rotation (R^T R = I, det R = 1)")
    w, x, y, z = _quaternion(r)
    s = basis_matrices(1)
    u = w * s[0] - 1j * (x * s[1] + y * s[2] + z * s[3])
    return UnitaryLift(R=r, U=u)


def unitary_to_rotation(u) -> np.ndarray:
    """Bloch matrix of rho -> U rho U^dagger for a 2x2 unitary U."""
    u = np.asarray(u, dtype=complex)
    s = basis_matrices(1)[1:]
    # R[i, j] = tr(s_i U s_j U^dagger) / 2
    img = np.einsum("ab,jbc,dc->jad", u, s, u.conj())
    return np.einsum("iab,jba->ij", s, img).real / 2


def is_unital_quantum_operation(m, tol: float = BETA_TOL) -> tuple[bool, np.ndarray]:
    """Is the unital one-qubit map with Bloch matrix ``m`` completely positive?

    Returns the verdict and the beta coefficients of the diagonal factor.
    """
    f = signed_svd(m)
    return is_cp_diagonal(DiagonalSpec(1, f.d), tol)


def decompose_unital(m) -> SignedOperatorSum:
    """Four-term decomposition with weights beta_i and elements U_B s_i U_A.

    The weights always sum to 1; they are all nonnegative exactly when the
    map is completely positive.
    """
    f = signed_svd(m)
    _, beta = is_cp_diagonal(DiagonalSpec(1, f.d))
    ub = rotation_to_unitary(f.B).U
    ua = rotation_to_unitary(f.A).U
    elements = np.einsum("ab,ibc,cd->iad", ub, basis_matrices(1), ua)
    return SignedOperatorSum(1, beta, elements)
