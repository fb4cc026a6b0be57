import numpy as np
import pytest

from hypnet.classifier import (FLAGS, NO, UND, YES, AssumptionsNotVerified, check_contractive,
                               check_positive, check_real, check_unitary, classify)
from hypnet.coefficients import EdgeCoefficients
from hypnet.graph import build_graph
from hypnet.models import (PRESETS, dirac_star, dirichlet_everywhere, make_model, saint_venant_star,
                           second_sound, telegrapher, telegrapher_coefficients, wave_star)
from hypnet.system import GlobalBoundary, NetworkSystem

from conftest import local_system, scalar_edges


@pytest.mark.parametrize("name", list(PRESETS))
def test_preset_expected_verdicts(name):
    rep = classify(make_model(name).system)
    rep.check_invariants()
    for flag, want in PRESETS[name].expected.items():
        assert getattr(rep, flag).value == want, (flag, getattr(rep, flag).reason)


def test_dirac_group_path():
    rep = classify(dirac_star())
    assert rep.group.value == YES and rep.group.path == "isotropic+adjoint-isotropic"
    assert rep.unitary_group.value == YES


@pytest.mark.parametrize("alpha, kappa", [(0.0, 1.0), (1.0, 0.5), (2.0, 1.5)])
def test_wave_absorbing_semigroup(alpha, kappa):
    rep = classify(wave_star(alpha=alpha, kappa=kappa))
    assert rep.quasi_contractive_semigroup.value == YES


def test_wave_weak_absorption_not_established():
    rep = classify(wave_star(alpha=2.0, kappa=0.5))
    assert rep.quasi_contractive_semigroup.value != YES


def test_telegrapher_damped_contractive():
    s = telegrapher(G=1.0, K=1.0)
    rep = classify(s)
    assert rep.contractive_semigroup.value == YES
    assert rep.unitary_group.value == NO


def test_telegrapher_gain_not_contractive():
    assert check_contractive(telegrapher(G=-1.0, K=1.0)).value == NO


def test_unitary_examples():
    assert check_unitary(telegrapher()).value == YES
    assert classify(saint_venant_star(V=0.0)).unitary_group.value == YES
    assert classify(saint_venant_star(V=1.0)).unitary_group.value == NO
    assert check_unitary(second_sound()).value == NO


def test_real_examples():
    assert check_real(dirac_star()).value == NO
    assert check_real(wave_star()).value == YES
    g = build_graph([("e1", "v", "v", 1.0, 2)])
    c = telegrapher_coefficients(L=1j, P=-1j, a=1.0, d=1.0)
    s = NetworkSystem(g, {"e1": c}, GlobalBoundary(np.vstack([np.eye(2), np.eye(2)])))
    assert check_real(s).value == NO


def test_positive_examples():
    assert classify(make_model("transport_network").system).positive.value == YES
    assert classify(wave_star()).positive.value == NO
    assert classify(second_sound()).positive.value == NO


def test_dirichlet_everywhere_rejected():
    rep = classify(dirichlet_everywhere(dirac_star()))
    assert rep.group.value == NO and rep.group.path == "dimension-count"
    assert rep.quasi_contractive_semigroup.value == NO
    assert "0 != k = 6" in rep.group.reason


def test_indefinite_is_undetermined():
    g, coefs = scalar_edges([("e1", "a", "v", 1.0), ("e2", "v", "b", 1.0)])
    s = local_system(g, coefs, {"a": np.zeros((1, 0)), "v": np.eye(2), "b": np.zeros((1, 0))})
    rep = classify(s)
    assert rep.group.value == UND and rep.quasi_contractive_semigroup.value == UND


def test_assumptions_enforced():
    g = build_graph([("e", "a", "b", 1.0, 1)])
    c = EdgeCoefficients(M=np.array([[1.0]]), N=None, Q=np.array([[-1.0]]))
    s = NetworkSystem(g, {"e": c}, GlobalBoundary(np.array([[1.0], [0.0]])))
    with pytest.raises(AssumptionsNotVerified, match="Q_uniformly_positive"):
        classify(s)


def test_synthesized_q_noted():
    g = build_graph([("e", "a", "b", 1.0, 1)])
    s = NetworkSystem(g, {"e": EdgeCoefficients(M=np.array([[2.0]]), N=None)},
                      GlobalBoundary(np.array([[0.0], [1.0]])))
    rep = classify(s)
    assert any("synthesized" in n for n in rep.notes)


def test_report_serialization_mirrors_text():
    rep = classify(dirac_star())
    d = rep.to_dict()
    assert list(d["verdicts"]) == list(FLAGS)
    text = rep.render()
    for f in FLAGS:
        assert f"{f}: {d['verdicts'][f]['value']}" in text
    assert "reason:" in rep.render(explain=True)


def test_omega_reported_for_group():
    rep = classify(saint_venant_star())
    assert rep.omega > 0
    assert rep.omega == pytest.approx(rep.omega_parts["dQM"] + rep.omega_parts["N"])


def _random_positive_system(rng):
    ne = int(rng.integers(1, 4))
    edges, coefs = [], {}
    for i in range(ne):
        m = int(rng.integers(1, 3))
        c = rng.uniform(0.5, 2.0, m)
        N = rng.uniform(0.0, 1.0, (m, m))
        N[np.diag_indices(m)] = rng.uniform(-1.0, 1.0, m)
        edges.append((f"e{i}", "v", "v", float(rng.uniform(0.5, 2.0)), m))
        coefs[f"e{i}"] = EdgeCoefficients(M=np.diag(c), N=N, Q=np.diag(1.0 / c))
    g = build_graph(edges)
    W = rng.uniform(0.0, 1.0, (g.k, g.k))
    W /= max(1.0, np.linalg.norm(W, 2))
    return NetworkSystem(g, coefs, GlobalBoundary(np.vstack([np.eye(g.k), W])))


@pytest.mark.parametrize("seed", range(50))
def test_random_positive_systems(seed):
    s = _random_positive_system(np.random.default_rng(seed))
    rep = classify(s)
    assert rep.quasi_contractive_semigroup.value == YES
    assert rep.real.value == YES
    assert check_positive(s, rep.real).value == YES


def test_positive_sampling_witness():
    # Y = span{(1, -1)} at a two-edge vertex is not closed under positive parts
    # T_v = diag(1, -1) makes that space isotropic, so a group is generated
    g, coefs = scalar_edges([("e1", "a", "v", -1.0), ("e2", "v", "b", -1.0)])
    s = local_system(g, coefs, {"a": np.zeros((1, 0)), "v": np.array([[1.0], [-1.0]]),
                                "b": np.ones((1, 1))})
    rep = classify(s)
    assert rep.real.value == YES
    assert rep.positive.value == NO
