import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypnet import forms
from hypnet.forms import FormError
from hypnet.models import saint_venant_coefficients, second_sound_matrices

from conftest import planted_hermitian


@pytest.mark.parametrize("d, sig, kappa", [
    ([1, 1], (0, 2), 0),
    ([-1, 1], (1, 1), 1),
    ([-1, -1, 1, 1, 1], (2, 3), 2),
])
def test_signature_and_index(d, sig, kappa):
    P = np.diag(d).astype(float)
    assert forms.signature(P) == sig
    assert forms.isotropy_index(P) == kappa


def test_second_sound_signature():
    M, _, Q = second_sound_matrices()
    QM = Q @ M
    assert forms.signature(QM) == (2, 2)
    lam = np.sort(np.linalg.eigvalsh(QM))
    r5 = np.sqrt(5.0)
    assert np.allclose(lam, np.sort([-(1 + r5) / 2, -(r5 - 1) / 2, (r5 - 1) / 2, (1 + r5) / 2]))
    assert forms.max_nonpositive_dim(QM) == 2


def test_singular_rejected():
    with pytest.raises(FormError, match="singular"):
        forms.signature(np.diag([1.0, 0.0]))


def test_non_hermitian_rejected():
    with pytest.raises(FormError, match="Hermitian"):
        forms.signature(np.array([[1.0, 1.0], [0.0, -1.0]]))


def test_isotropic_basis_small():
    B = forms.max_totally_isotropic_basis(np.diag([-1.0, 1.0]))
    assert B.shape == (2, 1)
    assert abs(B[0, 0]) == pytest.approx(abs(B[1, 0]))
    B = forms.max_totally_isotropic_basis(np.diag([-4.0, 1.0]))
    v = B[:, 0] / B[0, 0]
    assert np.allclose(np.abs(v), [1.0, 2.0])
    assert forms.form_value(np.diag([-4.0, 1.0]), v) == pytest.approx(0.0, abs=1e-14)


def test_isotropic_basis_empty_when_definite():
    assert forms.max_totally_isotropic_basis(np.eye(3)).shape == (3, 0)


def test_isotropic_basis_saint_venant():
    c = saint_venant_coefficients(10.0, 1.0, 1.0, 0.1)
    B = (c.Q @ c.M)(0.0)
    U = forms.max_totally_isotropic_basis(B)
    assert U.shape[1] == 1
    assert abs(U[:, 0].conj() @ B @ U[:, 0]) <= 1e-10


def test_sign_family():
    P = np.diag([-1.0, -2.0, 3.0, 1.0])
    for signs in ([1, 1], [1, -1], [-1, 1j]):
        B = forms.max_totally_isotropic_basis(P, signs=signs)
        assert np.linalg.norm(B.conj().T @ P @ B) <= 1e-12


def test_classify_subspace_examples():
    P = np.diag([-1.0, 1.0])
    assert forms.classify_subspace(P, [[1.0], [1.0]]).kind == forms.NULL
    assert forms.classify_subspace(P, [[1.0], [0.0]]).kind == forms.NONPOSITIVE
    assert forms.classify_subspace(P, [[0.0], [3.0]]).kind == forms.NONNEGATIVE
    assert forms.classify_subspace(P, np.eye(2)).kind == forms.INDEFINITE
    assert forms.classify_subspace(P, np.zeros((2, 0))).kind == forms.NULL


def test_classify_dirac_tail_block():
    # T_v = -Q M at a tail, M = [[0, i], [-i, 0]]: q(xi, eta) = -2 Im(xi conj(eta))
    M = np.array([[0, 1j], [-1j, 0]])
    assert forms.classify_subspace(-M, [[1.0], [1.0]]).kind == forms.NULL


def test_classify_dimension_mismatch():
    with pytest.raises(FormError):
        forms.classify_subspace(np.eye(3), np.ones((2, 1)))


def test_negative_witness():
    P = np.diag([-1.0, -1.0, 1.0])
    W = forms.negative_eigenspace(P)
    assert W.shape == (3, 2)
    assert np.allclose(np.abs(W[2]), 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))),
       st.integers(0, 2 ** 31), st.booleans())
def test_planted_signature_properties(nk, seed, cplx):
    n, km = nk
    P, _ = planted_hermitian(np.random.default_rng(seed), n, km, cplx)
    assert forms.signature(P) == (km, n - km)
    kappa = min(km, n - km)
    B = forms.max_totally_isotropic_basis(P)
    assert B.shape[1] == kappa
    if kappa:
        assert np.linalg.matrix_rank(B) == kappa
        assert np.linalg.norm(B.conj().T @ P @ B, 2) <= 1e-8
        assert forms.classify_subspace(P, B).kind == forms.NULL
    if km:
        assert forms.classify_subspace(P, forms.negative_eigenspace(P)).is_nonpositive


@pytest.mark.parametrize("seed", range(6))
def test_brute_force_isotropic_vectors(seed):
    # on n <= 3, nearly isotropic unit vectors turn up in random search iff kappa >= 1
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    km = rng.integers(0, n + 1)
    P, _ = planted_hermitian(rng, n, km, complex_=False)
    kappa = forms.isotropy_index(P)
    X = rng.standard_normal((200000, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    q = np.einsum("ij,jk,ik->i", X, P, X)
    found = np.min(np.abs(q)) <= 1e-4      # sampling density limits the resolution
    assert found == (kappa >= 1)
