import numpy as np
import pytest

from hypnet.coefficients import EdgeCoefficients
from hypnet.graph import build_graph
from hypnet.system import GlobalBoundary, LocalBoundary, NetworkSystem


def planted_hermitian(rng, n, k_minus, complex_=True, spread=(0.5, 5.0)):
    """Random Hermitian P = U diag(lam) U* with exactly k_minus negative eigenvalues."""
    A = rng.standard_normal((n, n))
    if complex_:
        A = A + 1j * rng.standard_normal((n, n))
    U, _ = np.linalg.qr(A)
    mag = rng.uniform(*spread, size=n)
    lam = np.concatenate([-mag[:k_minus], mag[k_minus:]])
    P = (U * lam) @ U.conj().T
    return 0.5 * (P + P.conj().T), lam


def scalar_edges(specs):
    """[(id, tail, head, speed)] -> graph and coefficient dict with Q = 1."""
    g = build_graph([(eid, t, h, 1.0, 1) for eid, t, h, _ in specs])
    coefs = {eid: EdgeCoefficients(M=np.array([[c]]), N=np.zeros((1, 1)), Q=np.eye(1))
             for eid, _, _, c in specs}
    return g, coefs


def local_system(g, coefs, spaces, **kw):
    return NetworkSystem(g, coefs, LocalBoundary(spaces), **kw)


def global_system(g, coefs, Y, **kw):
    return NetworkSystem(g, coefs, GlobalBoundary(Y), **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
