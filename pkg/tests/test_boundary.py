import numpy as np
import pytest

from hypnet import boundary as bd
from hypnet._linalg import subspace_distance
from hypnet.coefficients import EdgeCoefficients
from hypnet.graph import build_graph
from hypnet.models import dirac_star, saint_venant_star, second_sound_matrices

from conftest import global_system, local_system, scalar_edges


def test_scalar_tail_form():
    g, coefs = scalar_edges([("e", "a", "b", 2.5)])
    s = local_system(g, coefs, {"a": np.zeros((1, 0)), "b": np.ones((1, 1))})
    assert np.allclose(bd.vertex_form_matrix(s, "a"), [[-2.5]])
    assert np.allclose(bd.vertex_form_matrix(s, "b"), [[2.5]])


def test_second_sound_global_form():
    M, N, Q = second_sound_matrices()
    g = build_graph([("e1", "v", "v", 1.0, 4)])
    s = global_system(g, {"e1": EdgeCoefficients(M, N, Q)}, np.vstack([np.eye(4), np.eye(4)]))
    T = bd.global_form_matrix(s)
    assert T.shape == (8, 8)
    assert np.allclose(T[:4, :4], -Q @ M) and np.allclose(T[4:, 4:], Q @ M)
    assert np.allclose(T[:4, 4:], 0)


def test_saint_venant_center_form():
    s = saint_venant_star(J=3, V=1.0)
    c = s.coefficients["e1"]
    B = c.QM(0.0)
    T = bd.vertex_form_matrix(s, "v0")
    assert np.allclose(T[:2, :2], B)
    assert np.allclose(T[2:4, 2:4], -B) and np.allclose(T[4:, 4:], -B)


def test_form_matrices_hermitian():
    s = dirac_star()
    for v in s.graph.vertices:
        T = bd.vertex_form_matrix(s, v)
        assert np.linalg.norm(T - T.conj().T) <= 1e-12 * np.linalg.norm(T)


def test_dirichlet_everywhere_fails_count():
    g, coefs = scalar_edges([("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0)])
    s = local_system(g, coefs, {v: np.zeros((g.k_v(v), 0)) for v in g.vertices})
    r = bd.check_local_dimension_condition(s)
    assert not r.holds and r.sum_dim_Y == 0 and r.k == 2


def test_supercritical_dimension_condition():
    s = saint_venant_star(g=1.0, H=1.0, V=4.0, J=3)
    r = bd.check_local_dimension_condition(s)
    assert r.holds
    assert r.dims == {"v0": 2, "v1": 0, "v2": 2, "v3": 2}


def test_transport_path_dimension_condition():
    g, coefs = scalar_edges([("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0)])
    s = local_system(g, coefs, {"a": np.ones((1, 1)), "b": np.ones((2, 1)), "c": np.zeros((1, 0))})
    r = bd.check_local_dimension_condition(s)
    assert r.holds and r.rank_stacked == 2 and r.sum_dim_Y == 2


def test_dependent_pair_reported():
    g, coefs = scalar_edges([("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0)])
    # Y_a^perp and Y_b^perp both constrain u_1 only
    s = local_system(g, coefs, {"a": np.zeros((1, 0)), "b": np.array([[0.0], [1.0]]),
                                "c": np.ones((1, 1))})
    r = bd.check_local_dimension_condition(s)
    assert not r.holds and r.dependent_pair == ("a", "b")


def test_dirac_adjoint_identity():
    s = dirac_star(J=3)
    for v in s.graph.vertices:
        A = bd.adjoint_bc_space(s, v)
        assert subspace_distance(A, s.Y(v), s.graph.k_v(v)) <= 1e-9


def test_adjoint_of_zero_space_is_everything():
    g, coefs = scalar_edges([("e", "a", "b", 1.0)])
    s = local_system(g, coefs, {"a": np.zeros((1, 0)), "b": np.ones((1, 1))})
    assert bd.adjoint_bc_space(s, "a").shape == (1, 1)
    assert bd.adjoint_bc_space(s, "b").shape == (1, 0)


@pytest.mark.parametrize("seed", range(10))
def test_adjoint_dimension_random(seed):
    rng = np.random.default_rng(seed)
    speeds = rng.uniform(0.5, 2.0, 3) * rng.choice([-1, 1], 3)
    g, coefs = scalar_edges([("e1", "v", "a", speeds[0]), ("e2", "b", "v", speeds[1]),
                             ("e3", "v", "c", speeds[2])])
    m = int(rng.integers(0, 4))
    Yv = rng.standard_normal((3, m))
    s = local_system(g, coefs, {"v": Yv, "a": np.ones((1, 1)), "b": np.ones((1, 1)),
                                "c": np.ones((1, 1))})
    cond = bd.vertex_conditions(s)["v"]
    assert cond.dim + cond.perp().shape[1] == 3
    assert bd.adjoint_bc_space(s, "v").shape[1] == 3 - m


def _periodic_transport():
    g, coefs = scalar_edges([("e1", "v", "v", 1.0), ("e2", "v", "v", 1.0)])
    return g, coefs


def test_periodic_transport_global():
    g, coefs = _periodic_transport()
    s = global_system(g, coefs, np.vstack([np.eye(2), np.eye(2)]))
    r = bd.check_global_conditions(s)
    assert not r.basis_global and r.dim_Y_cap_K == 2
    assert r.infty_applicable and r.basis_global_infty


def test_inflow_space_global():
    g, coefs = _periodic_transport()
    s = global_system(g, coefs, np.vstack([np.eye(2), np.zeros((2, 2))]))
    r = bd.check_global_conditions(s)
    assert r.basis_global and r.basis_global_infty


def test_y_equal_k_fails():
    g, coefs = _periodic_transport()
    K = np.vstack([np.eye(2), np.eye(2)])
    s = global_system(g, coefs, np.zeros((4, 0)))
    r = bd.check_global_conditions(s, Y=K)
    assert not r.basis_global


def test_local_to_global_layout():
    g, coefs = scalar_edges([("e1", "a", "b", 1.0)])
    s = local_system(g, coefs, {"a": np.zeros((1, 0)), "b": np.ones((1, 1))})
    Y = bd.local_to_global(s)
    assert np.allclose(Y, [[0.0], [1.0]])     # u(0) block, then u(l) block


def test_m_is_special():
    g, coefs = _periodic_transport()
    s = global_system(g, coefs, np.vstack([np.eye(2), np.eye(2)]))
    assert bd.m_is_special(s)
    assert not bd.m_is_special(dirac_star())


def test_global_y_wrong_length():
    g, coefs = _periodic_transport()
    s = global_system(g, coefs, np.vstack([np.eye(2), np.eye(2)]))
    with pytest.raises(bd.BoundaryError):
        bd.global_condition(s, Y=np.ones((3, 1)))


def test_user_basis_not_mutated():
    g, coefs = scalar_edges([("e1", "a", "b", 1.0)])
    B = np.array([[3.0]])
    s = local_system(g, coefs, {"a": np.zeros((1, 0)), "b": B})
    bd.vertex_conditions(s)
    assert B[0, 0] == 3.0
