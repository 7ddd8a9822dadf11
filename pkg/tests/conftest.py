import numpy as np
import pytest

from qcresonance import TwoAtomState


def random_density(rng, rank=None):
    """Ginibre-distributed density matrix of the given rank (default full)."""
    rank = rank or rng.integers(1, 5)
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = g @ g.conj().T
    return TwoAtomState(m / np.trace(m).real)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_dipole(rng):
    return rng.normal(size=3) + 1j * rng.normal(size=3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
