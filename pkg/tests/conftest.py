import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(rng, dim):
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_special_unitary(rng, dim=2):
    u = random_unitary(rng, dim)
    return u / np.linalg.det(u) ** (1 / dim)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_density(rng, dim, rank=None):
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_kraus(rng, dim, k):
    """k Kraus operators of a random CPTP map (a slice of a random isometry)."""
    v = random_unitary(rng, dim * k)[:, :dim]
    return v.reshape(k, dim, dim)


def random_unital_channel(rng, dim, k=3):
    """Mixture of unitary conjugations: unital and trace preserving."""
    from blochcp.channels import SignedOperatorSum
    p = rng.dirichlet(np.ones(k))
    us = np.stack([random_unitary(rng, dim) for _ in range(k)])
    return SignedOperatorSum(int(np.log2(dim)), p, us)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
