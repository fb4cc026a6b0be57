"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
import time

import numpy as np
import pytest

from hypnet import boundary as bd
from hypnet import forms
from hypnet._linalg import opnorm, orth
from hypnet.classifier import NO, YES, classify
from hypnet.coefficients import EdgeCoefficients, check_assumptions
from hypnet.graph import build_graph
from hypnet.models import (SECOND_SOUND_NOTE, dirac_star, dirichlet_everywhere, make_model,
                           second_sound, second_sound_matrices, symmetrizer_constraints,
                           telegrapher_coefficients)
from hypnet.simulator import SimConfig, initial_from_spec, run
from hypnet.system import GlobalBoundary, LocalBoundary, NetworkSystem
from hypnet.tolerances import default_tolerances

from conftest import planted_hermitian

# pinned tolerances
ISO_RESIDUAL = 1e-8
SUITE1_SECONDS = 2.0
IFF_TOL = 1e-9
ADJOINT_RESIDUAL = 1e-9
DRIFT_MAX = 0.02
DRIFT_RATIO = (1.5, 3.0)
MONO_TOL = 1e-10
IMAG_TOL = 1e-12
NEG_TOL = 1e-12
UNDERSHOOT = -1e-3
SIM_SECONDS = 60.0


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


# 1 ---------------------------------------------------------------------------------------

def test_criterion_1_planted_signatures(verdict):
    rng = np.random.default_rng(2024)
    bad = []
    t0 = time.perf_counter()
    for i in range(200):
        n = int(rng.integers(1, 9))
        km = int(rng.integers(0, n + 1))
        P, _ = planted_hermitian(rng, n, km, complex_=bool(i % 2))
        sig = forms.signature(P)
        kappa = forms.isotropy_index(P)
        B = forms.max_totally_isotropic_basis(P)
        res = opnorm(B.conj().T @ P @ B) if B.shape[1] else 0.0
        W = forms.negative_eigenspace(P)
        cone = forms.classify_subspace(P, W)
        ok = (sig == (km, n - km) and kappa == min(km, n - km) and B.shape[1] == kappa
              and (kappa == 0 or np.linalg.matrix_rank(B) == kappa) and res <= ISO_RESIDUAL
              and W.shape[1] == km and forms.max_nonpositive_dim(P) == km
              and (km == 0 or cone.is_nonpositive))
        if not ok:
            bad.append(i)
    dt = time.perf_counter() - t0
    verdict(1, not bad and dt <= SUITE1_SECONDS,
            f"200 planted matrices, {len(bad)} failures, {dt:.2f} s (limit {SUITE1_SECONDS} s)")


# 2 ---------------------------------------------------------------------------------------

def _telegrapher_draw(rng, valid):
    L = complex(rng.uniform(0.3, 3) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
    a, d = rng.uniform(0.3, 3, size=2)
    P = a * np.conj(L) / d
    r = rng.uniform(-0.5, 0.5) * np.sqrt(a * d) / abs(L)
    b = r * L
    c = np.conj(b)
    if not valid:
        eps = rng.uniform(1e-3, 0.5)
        kind = rng.integers(0, 6)
        if kind == 0:
            a = -a
        elif kind == 1:
            b = b + eps * 1j * L / abs(L) * np.sqrt(a * d)
            c = np.conj(b)
        elif kind == 2:
            c = c + eps * np.exp(1j * rng.uniform(0, 2 * np.pi))
        elif kind == 3:
            P = P * (1 + eps)
        elif kind == 4:
            b = np.sqrt(a * d) * (1 + eps) * L / abs(L)
            c = np.conj(b)
        else:
            a = a + 1j * eps
    return L, P, a, b, c, d


def test_criterion_2_telegrapher_iff(verdict):
    rng = np.random.default_rng(77)
    tol = default_tolerances().updated(herm_tol=IFF_TOL, pd_tol=IFF_TOL)
    g = build_graph([("e1", "v", "v", 1.0, 2)])
    Y = GlobalBoundary(np.vstack([np.eye(2), np.eye(2)]))
    disagree, n_valid = [], 0
    for i in range(500):
        valid = bool(i % 2)
        L, P, a, b, c, d = _telegrapher_draw(rng, valid)
        coef = telegrapher_coefficients(L=L, P=P, G=0.1, K=0.2, a=a, b=b, c=c, d=d)
        s = NetworkSystem(g, {"e1": coef}, Y)
        got = check_assumptions(s, tol).ok
        want = symmetrizer_constraints(a, b, c, d, L, P, tol=IFF_TOL)
        n_valid += want
        if got != want or want != valid:
            disagree.append(i)
    verdict(2, not disagree, f"500 draws ({n_valid} valid), {len(disagree)} disagreements")


# 3 ---------------------------------------------------------------------------------------

ZOO = [
    ("transport loop, equal speeds", "transport_loop", {},
     {"group": YES, "unitary_group": YES}, "global-endpoint-fallback"),
    ("Saint-Venant supercritical star", "saint_venant_star", dict(g=1.0, H=1.0, V=2.0),
     {"quasi_contractive_semigroup": YES, "real": YES, "positive": NO}, None),
    ("Saint-Venant subcritical star, V != 0", "saint_venant_star", dict(V=1.0),
     {"group": YES, "unitary_group": NO}, None),
    ("Saint-Venant subcritical star, V = 0", "saint_venant_star", dict(V=0.0),
     {"group": YES, "unitary_group": YES}, None),
    ("Dirac continuity/Kirchhoff star", "dirac_star", {},
     {"group": YES, "unitary_group": YES, "real": NO}, None),
    *[(f"second sound family {f}", "second_sound", dict(family=f),
       {"group": YES, "real": YES, "positive": NO}, None)
      for f in ("i", "ii", "periodic", "network_a", "network_b")],
    ("second sound dissipative global family", "second_sound", dict(family="dissipative"),
     {"contractive_semigroup": YES, "real": YES, "positive": NO}, None),
    *[(f"wave star, absorbing tips alpha={al} kappa={ka}", "wave_star", dict(alpha=al, kappa=ka),
       {"quasi_contractive_semigroup": YES}, None)
      for al, ka in ((0.0, 1.0), (1.0, 0.5), (2.0, 1.5), (0.5, 3.0))],
]


def test_criterion_3_model_zoo(verdict):
    mismatches = []
    for label, name, params, expected, path in ZOO:
        rep = classify(make_model(name, params).system)
        flags = rep.flags()
        for k, v in expected.items():
            if flags[k] != v:
                mismatches.append(f"{label}: {k}={flags[k]}")
        if path and rep.group.path != path:
            mismatches.append(f"{label}: path {rep.group.path}")
    rep = classify(dirichlet_everywhere(make_model("wave_star").system))
    if rep.quasi_contractive_semigroup.value != NO or rep.quasi_contractive_semigroup.path != "dimension-count":
        mismatches.append("Dirichlet everywhere not rejected by the dimension count")
    verdict(3, not mismatches, f"{len(ZOO) + 1} configurations, mismatches: {mismatches or 'none'}")


# 4 ---------------------------------------------------------------------------------------

def test_criterion_4_dirac_adjoint(verdict):
    s = dirac_star(J=3)
    worst = 0.0
    for v in s.graph.vertices:
        kv = s.graph.k_v(v)
        Y = orth(s.Y(v), kv)
        A = bd.adjoint_bc_space(s, v)
        PY, PA = Y @ Y.conj().T, A @ A.conj().T
        r = max(opnorm(A - PY @ A), opnorm(Y - PA @ Y), abs(A.shape[1] - Y.shape[1]))
        worst = max(worst, r)
    verdict(4, worst <= ADJOINT_RESIDUAL,
            f"degree-3 Dirac star, max mutual projection residual {worst:.2e} (limit {ADJOINT_RESIDUAL})")


# 5 ---------------------------------------------------------------------------------------

def _sim(name, params=None, **cfg):
    s = make_model(name, params).system
    init = initial_from_spec(s, s.simulation["initial"])
    base = dict(s.simulation.get("config", {}))
    base.update(cfg)
    return run(s, SimConfig(**base), init)


def test_criterion_5_simulation_consistency(verdict):
    t0 = time.perf_counter()
    problems = []

    d1 = _sim("transport_loop", cells_per_unit=1600, t_final=1.0).relative_drift()
    d2 = _sim("transport_loop", cells_per_unit=3200, t_final=1.0).relative_drift()
    ratio = d1 / d2
    if d1 > DRIFT_MAX or not DRIFT_RATIO[0] <= ratio <= DRIFT_RATIO[1]:
        problems.append(f"(a) drift {d1:.4f}, ratio {ratio:.2f}")

    contractive = [(n, {}) for n in ("transport_loop", "transport_network", "wave_star",
                                     "dirac_star", "second_sound")]
    contractive += [("second_sound", dict(family="dissipative")), ("telegrapher", dict(G=1.0, K=1.0))]
    for name, p in contractive:
        assert classify(make_model(name, p).system).contractive_semigroup.value == YES
        ts = _sim(name, p, cells_per_unit=200, t_final=0.5)
        e = np.asarray(ts.energy)
        if np.max(np.diff(e)) > MONO_TOL * e[0]:
            problems.append(f"(b) {name} {p}: energy rose by {np.max(np.diff(e)):.2e}")

    for name in ("transport_loop", "transport_network", "telegrapher", "saint_venant_star",
                 "wave_star", "hybrid_transport_string", "second_sound"):
        assert classify(make_model(name).system).real.value == YES
        ts = _sim(name, cells_per_unit=100, t_final=0.5)
        if ts.max_imag[0] != 0.0:
            problems.append(f"(c) {name}: initial data not real")
        if max(ts.max_imag) > IMAG_TOL:
            problems.append(f"(c) {name}: max |Im| {max(ts.max_imag):.2e}")

    ts = _sim("transport_network", cells_per_unit=400, t_final=1.0)
    if ts.min_real[0] < 0 or min(ts.min_real) < -NEG_TOL:
        problems.append(f"(d) min {min(ts.min_real):.2e}")

    ts = _sim("wave_star", cells_per_unit=400, t_final=1.0)
    mn = np.asarray(ts.min_real)
    below = np.flatnonzero(mn < UNDERSHOOT)
    if mn[0] < 0 or not below.size or ts.times[below[0]] >= 1.0:
        problems.append(f"(e) wave star min {mn.min():.2e}")

    dt = time.perf_counter() - t0
    if dt > SIM_SECONDS:
        problems.append(f"runtime {dt:.1f} s")
    verdict(5, not problems, f"drift {d1:.2%} at 1600 cells, ratio {ratio:.2f}, "
                             f"{dt:.1f} s; problems: {problems or 'none'}")


# 6 ---------------------------------------------------------------------------------------

def _random_isotropic_system(rng):
    vs = [f"v{i}" for i in range(int(rng.integers(2, 5)))]
    edges, coefs = [], {}
    for i in range(int(rng.integers(2, 6))):
        t, h = rng.choice(vs, 2, replace=bool(rng.random() < 0.2))
        n = 2 if rng.random() < 0.8 else 1
        edges.append((f"e{i}", str(t), str(h), float(rng.uniform(0.5, 2.0)), n))
        M, _ = planted_hermitian(rng, n, 1 if n == 2 else int(rng.integers(0, 2)))
        coefs[f"e{i}"] = EdgeCoefficients(M=M, N=None, Q=np.eye(n))
    g = build_graph(edges, vs)
    empty = NetworkSystem(g, coefs, LocalBoundary({v: np.zeros((g.k_v(v), 0)) for v in vs}))
    spaces = {}
    for v in vs:
        T = bd.vertex_form_matrix(empty, v)
        kappa = forms.isotropy_index(T)
        B = forms.max_totally_isotropic_basis(T, signs=np.exp(2j * np.pi * rng.random(kappa)))
        if kappa and rng.random() < 0.2:
            B = B[:, :kappa - 1]
        spaces[v] = B
    return NetworkSystem(g, coefs, LocalBoundary(spaces))


def test_criterion_6_local_global(verdict):
    rng = np.random.default_rng(6)
    disagree, yes = 0, 0
    for _ in range(50):
        s = _random_isotropic_system(rng)
        local = bd.check_local_dimension_condition(s).holds
        glob = bd.check_global_conditions(s, Y=bd.local_to_global(s)).basis_global
        yes += local
        disagree += local != glob
    verdict(6, disagree == 0 and 0 < yes < 50,
            f"50 random isotropic systems ({yes} satisfy the basis condition), {disagree} disagreements")


# 7 ---------------------------------------------------------------------------------------

def test_criterion_7_second_sound_signature(verdict):
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(100):
        M, _, Q = second_sound_matrices(*rng.uniform(0.1, 10.0, size=6))
        bad += forms.signature(Q @ M) != (2, 2)
    note = SECOND_SOUND_NOTE in classify(second_sound()).notes
    verdict(7, bad == 0 and note, f"100 draws, {bad} with signature != (2, 2); note in report: {note}")
