import numpy as np
import pytest

from blochcp.bloch import BlochVector, density_from_bloch, is_positive_semidefinite
from blochcp.channels import (SignedOperatorSum, apply, bloch_matrix, is_completely_positive,
                              is_trace_preserving, is_unital, transpose_channel, unitary_channel)
from blochcp.diagonal_af import (DiagonalSpec, af_betas, betas_batch, diagonal_from_channel,
                                 eigenvalues_from_betas, folded_kraus, is_cp_diagonal,
                                 kraus_from_spec, one_qubit_af_inequalities, one_qubit_positivity)
from blochcp.errors import InputError, NotCompletelyPositiveError
from blochcp.pauli_basis import basis_matrices, pauli

BAND = 1e-7


def betas_by_solve(d, n):
    """Oracle: solve sum_j beta_j lambda_j lambda_k lambda_j = e_k lambda_k directly."""
    lam = basis_matrices(n)
    size = 4 ** n
    g = np.empty((size, size))
    for k in range(size):
        conj = np.einsum("jab,bc,jcd->jad", lam, lam[k], lam)
        g[k] = np.einsum("ab,jba->j", lam[k], conj).real / 2
    return np.linalg.solve(g, np.concatenate(([1.0], d)))


def test_beta_examples():
    assert np.allclose(af_betas(DiagonalSpec(1, [1, 1, 1])), [1, 0, 0, 0])
    assert np.array_equal(af_betas(DiagonalSpec(1, [1, -1, 1])), [0.5, 0.5, -0.5, 0.5])
    p = 0.3
    assert np.allclose(af_betas(DiagonalSpec(1, [p, p, p])),
                       [(1 + 3 * p) / 4, (1 - p) / 4, (1 - p) / 4, (1 - p) / 4])


@pytest.mark.parametrize("n", [1, 2])
def test_betas_match_linear_solve(n, rng):
    for _ in range(5):
        d = rng.uniform(-1, 1, 4 ** n - 1)
        assert np.abs(af_betas(DiagonalSpec(n, d)) - betas_by_solve(d, n)).max() < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_betas_match_dense_formula(n, rng):
    from blochcp.pauli_basis import sign_table
    d = rng.uniform(-1, 1, (7, 4 ** n - 1))
    v = np.hstack([np.ones((7, 1)), d])
    dense = v @ sign_table(n).T / 2 ** (n + 1)
    assert np.abs(betas_batch(d, n) - dense).max() < 1e-13


def test_identity_betas_two_qubits():
    # lambda_0 = I / sqrt(2), so the identity needs beta_0 = 2
    ok, beta = is_cp_diagonal(DiagonalSpec(2, np.ones(15)))
    assert ok
    assert np.array_equal(beta, 2 * np.eye(16)[0])
    ch = kraus_from_spec(DiagonalSpec(2, np.ones(15)))
    assert len(ch) == 1
    assert np.allclose(ch.weights[0] * ch.elements[0] @ ch.elements[0].conj().T, np.eye(4))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_involution(n, rng):
    d = rng.uniform(-1, 1, 4 ** n - 1)
    back = eigenvalues_from_betas(af_betas(DiagonalSpec(n, d)), n)
    assert np.abs(back - np.concatenate(([1.0], d))).max() <= 1e-12


def test_spec_validation():
    with pytest.raises(InputError):
        DiagonalSpec(1, [1, 1])
    with pytest.raises(InputError):
        DiagonalSpec(2, np.ones(3))
    with pytest.raises(InputError):
        DiagonalSpec(1, [1, np.nan, 1])


def test_is_cp_diagonal_examples():
    ok, beta = is_cp_diagonal(DiagonalSpec(1, [1, -1, 1]))
    assert not ok and beta[2] == -0.5
    for p in np.linspace(-1, 1, 41):
        assert is_cp_diagonal(DiagonalSpec(1, [p, p, p]))[0] == (p >= -1 / 3 - 1e-12)


def test_af_inequalities_examples():
    assert one_qubit_af_inequalities(1, 1, 1)
    assert not one_qubit_af_inequalities(1, 1, -1)
    assert not one_qubit_af_inequalities(1, -1, 1)


def test_positivity_examples():
    assert one_qubit_positivity(0.5, 0.5, -0.5, 0.5)
    assert one_qubit_positivity(1, 0, 0, 0)
    assert not one_qubit_positivity(0.5, 0.5, -0.75, 0.5)


def test_positivity_counterexample_on_axis():
    # beta_1 + beta_2 < 0 means |s_3| > s_0, so the state with r = e_3 fails
    beta = [0.5, 0.5, -0.75, 0.5]
    ch = SignedOperatorSum(1, beta, basis_matrices(1))
    bad = [r for r in np.vstack([np.eye(3), -np.eye(3)])
           if not is_positive_semidefinite(apply(ch, density_from_bloch(BlochVector(1, r))))]
    assert bad


def test_kraus_from_spec_examples():
    ch = kraus_from_spec(DiagonalSpec(1, [1, 1, 1]))
    assert len(ch) == 1 and ch.weights[0] == 1 and np.array_equal(ch.elements[0], pauli(0))
    ch = kraus_from_spec(DiagonalSpec(1, [1, -1, 1]))
    rho = np.array([[1, 2 + 1j], [3, 4]])
    assert np.allclose(apply(ch, rho), apply(transpose_channel(), rho))
    assert np.allclose(ch.weights, [0.5, 0.5, -0.5, 0.5])
    ch = kraus_from_spec(DiagonalSpec(1, [0, 0, 0]))
    assert np.allclose(ch.weights, 0.25) and len(ch) == 4


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kraus_from_spec_is_unital_tp_with_right_bloch_matrix(n, rng):
    d = rng.uniform(-1, 1, 4 ** n - 1)
    ch = kraus_from_spec(DiagonalSpec(n, d))
    assert is_unital(ch) and is_trace_preserving(ch)
    if n < 3:
        assert np.abs(bloch_matrix(ch) - np.diag(d)).max() <= 1e-10


@pytest.mark.parametrize("n", [1, 2])
def test_eigenvector_property(n, rng):
    d = rng.uniform(-1, 1, 4 ** n - 1)
    ch = kraus_from_spec(DiagonalSpec(n, d))
    lam = basis_matrices(n)
    assert np.abs(apply(ch, lam[0]) - lam[0]).max() <= 1e-10
    for i in range(1, 4 ** n):
        assert np.abs(apply(ch, lam[i]) - d[i - 1] * lam[i]).max() <= 1e-10


def test_folded_kraus(rng):
    spec = DiagonalSpec(1, [0.2, -0.1, 0.5])
    ks = folded_kraus(spec)
    assert np.allclose(sum(k.conj().T @ k for k in ks), np.eye(2))
    with pytest.raises(NotCompletelyPositiveError):
        folded_kraus(DiagonalSpec(1, [1, -1, 1]))


def test_diagonal_from_channel():
    assert np.allclose(diagonal_from_channel(unitary_channel(pauli(3))).d, [-1, -1, 1])
    assert np.allclose(diagonal_from_channel(transpose_channel()).d, [1, -1, 1])
    hadamard = (pauli(1) + pauli(3)) / np.sqrt(2)
    assert diagonal_from_channel(unitary_channel(hadamard)) is None


def test_one_qubit_equivalences(rng):
    d = rng.uniform(-1.2, 1.2, (2000, 3))
    checked = 0
    for row in d:
        ok, beta = is_cp_diagonal(DiagonalSpec(1, row))
        if np.abs(beta).min() <= BAND:
            continue
        checked += 1
        assert ok == one_qubit_af_inequalities(*row)
        assert ok == is_completely_positive(kraus_from_spec(DiagonalSpec(1, row)))[0]
    assert checked > 1900


def test_two_qubit_equivalence(rng):
    for row in rng.uniform(-1, 1, (200, 15)):
        ok, beta = is_cp_diagonal(DiagonalSpec(2, row))
        if np.abs(beta).min() <= BAND:
            continue
        assert ok == is_completely_positive(kraus_from_spec(DiagonalSpec(2, row)))[0]


def test_cp_implies_positive(rng):
    for _ in range(1000):
        beta = rng.uniform(-0.3, 1, 4)
        if beta.min() >= 0:
            assert one_qubit_positivity(*beta)


def _pure_states(rng, count):
    r = rng.standard_normal((count, 3))
    return r / np.linalg.norm(r, axis=1, keepdims=True)


def _output_min_eig(beta, r):
    ch = SignedOperatorSum(1, beta, basis_matrices(1))
    out = apply(ch, density_from_bloch(BlochVector(1, r)))
    return np.linalg.eigvalsh(out)[0]


def test_positivity_soundness(rng):
    passing, failing = [], []
    while len(passing) < 200 or len(failing) < 200:
        beta = rng.uniform(-0.5, 1, 4)
        (passing if one_qubit_positivity(*beta) else failing).append(beta)
    states = _pure_states(rng, 100)
    axes = np.vstack([np.eye(3), -np.eye(3)])
    for beta in passing[:200]:
        assert min(_output_min_eig(beta, r) for r in states) >= -1e-12
    for beta in failing[:200]:
        assert min(_output_min_eig(beta, r) for r in axes) < 0


@pytest.mark.parametrize("n", [2, 3])
def test_equivalence_near_cp_region(n, rng):
    # uniform samples are almost never CP for n > 1, so draw from beta space
    size = 4 ** n
    seen = {True: 0, False: 0}
    for _ in range(100 if n == 2 else 30):
        scale = 2 ** (n - 1) / size
        beta = rng.dirichlet(np.ones(size)) * 2 ** (n - 1) + rng.normal(0, 0.1 * scale, size)
        beta[0] += 2 ** (n - 1) - beta.sum()
        d = eigenvalues_from_betas(beta, n)[1:]
        ok, b = is_cp_diagonal(DiagonalSpec(n, d))
        if np.abs(b).min() <= BAND:
            continue
        seen[ok] += 1
        assert ok == is_completely_positive(kraus_from_spec(DiagonalSpec(n, d)))[0]
    assert seen[True] > 0 and seen[False] > 0
