import numpy as np
import pytest
from scipy.linalg import expm

from gaussbounds.derivatives import ModelJet
from gaussbounds.symplectic import GaussianState, symplectic_form


def symmetrize(a):
    return 0.5 * (a + a.T)


def random_covariance(rng, m, nu_range=(1.05, 4.0)):
    """Random valid covariance with symplectic spectrum inside nu_range."""
    n = 2 * m
    gen = symplectic_form(m) @ (0.3 * symmetrize(rng.normal(size=(n, n))))
    s = expm(gen)
    nus = rng.uniform(*nu_range, size=m)
    return s @ np.diag(np.repeat(nus, 2)) @ s.T


def random_state(rng, m, nu_range=(1.05, 4.0)):
    return GaussianState(rng.normal(size=2 * m), random_covariance(rng, m, nu_range))


def random_jet(rng, m=None, p=None, nu_range=(1.05, 4.0), max_cond=1e6):
    """Random valid jet with a well-conditioned SLD Fisher matrix."""
    from gaussbounds.derivatives import sld_qfim

    m = int(m if m is not None else rng.integers(1, 3))
    p = int(p if p is not None else rng.integers(1, 4))
    n = 2 * m
    for _ in range(50):
        state = random_state(rng, m, nu_range)
        dd = tuple(rng.normal(size=n) for _ in range(p))
        dsigma = tuple(symmetrize(rng.normal(size=(n, n))) for _ in range(p))
        jet = ModelJet(state, dd, dsigma)
        js = sld_qfim(jet)
        vals = np.linalg.eigvalsh(js)
        if vals[0] > 0 and vals[-1] / vals[0] < max_cond:
            return jet
    raise RuntimeError("failed to draw a well-conditioned jet")


def realize_in_fock(obs, quads, dim):
    """Truncated matrix of a standard-basis quadratic observable."""
    out = obs.c0 * np.eye(dim, dtype=complex)
    n = len(quads)
    for j in range(n):
        out = out + obs.c1[j] * quads[j]
    for j in range(n):
        for k in range(n):
            out = out + obs.c2[j, k] * quads[j] @ quads[k]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
