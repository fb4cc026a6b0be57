"""Built-in model systems.

Each preset returns a complete ``NetworkSystem`` (graph, coefficients,
boundary spaces) plus a default simulation section. ``PRESETS`` records the
default parameters and the verdicts expected from ``classify``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._linalg import complement
from .coefficients import EdgeCoefficients, MatrixPolynomial
from .graph import build_graph, star_graph
from .system import GlobalBoundary, LocalBoundary, NetworkSystem


class ModelError(ValueError):
    pass


@dataclass
class ModelPreset:
    name: str
    params: dict
    system: NetworkSystem


@dataclass(frozen=True)
class PresetInfo:
    name: str
    builder: Callable
    defaults: dict
    description: str
    expected: dict = field(default_factory=dict)


# shared vertex-space builders ----------------------------------------------------

def coupled_space(g, v, m: int, continuity=(), kirchhoff=(), free=()) -> np.ndarray:
    """Y_v for blocks of size m: continuity / Kirchhoff / free per component.

    Components listed in none of the tuples are set to zero. At a degree-one
    vertex continuity leaves the component free and Kirchhoff forces it to 0.
    """
    slots = g.slots(v)
    d = len(slots)
    iota = np.array([s.iota for s in slots], dtype=float)
    cols = []
    for c in continuity:
        y = np.zeros(d * m)
        y[[s.offset + c for s in slots]] = 1.0
        cols.append(y)
    kb = complement(iota[:, None], d) if d > 1 else np.zeros((d, 0))
    for c in kirchhoff:
        for w in kb.T:
            y = np.zeros(d * m)
            y[[s.offset + c for s in slots]] = w
            cols.append(y)
    for c in free:
        for s in slots:
            y = np.zeros(d * m)
            y[s.offset + c] = 1.0
            cols.append(y)
    return np.column_stack(cols) if cols else np.zeros((d * m, 0))


def _block_eig(A):
    """eigh with each eigenvector oriented so its largest entry is positive."""
    lam, U = np.linalg.eigh(A)
    idx = np.argmax(np.abs(U), axis=0)
    U = U * np.sign(U[idx, np.arange(U.shape[1])])
    return lam, U


def _const(A):
    return MatrixPolynomial.constant(np.atleast_2d(np.asarray(A)))


def _sim(t_final=1.0, cells=400, scheme="characteristic_upwind", initial=None, **kw) -> dict:
    d = {"config": {"t_final": t_final, "cells_per_unit": cells, "cfl": 0.45, "stride": 1,
                    "scheme": scheme}, "initial": initial or {}}
    d["config"].update(kw)
    return d


# transport ------------------------------------------------------------------------

def transport_loop(c1=1.0, c2=1.0, length1=1.0, length2=1.0, coupling="swap"):
    """Two scalar transport loops at one vertex, u(l) = V0 u(0) coupling."""
    if c1 <= 0 or c2 <= 0:
        raise ModelError("transport speeds must be positive")
    if coupling == "swap":
        V0 = np.array([[0.0, 1.0], [1.0, 0.0]])
    elif coupling == "periodic":
        V0 = np.eye(2)
    else:
        raise ModelError(f"coupling must be 'swap' or 'periodic', got {coupling!r}")
    g = build_graph([("e1", "v", "v", length1, 1), ("e2", "v", "v", length2, 1)])
    coefs = {"e1": EdgeCoefficients(_const(c1), None, _const(1.0)),
             "e2": EdgeCoefficients(_const(c2), None, _const(1.0))}
    Y = np.vstack([np.eye(2), V0])
    # sin(pi s) along the combined loop s in [0, l1 + l2)
    init = {"e1": {"profile": "sine", "amplitude": [1.0], "freq": 0.5 * length1},
            "e2": {"profile": "sine", "amplitude": [1.0], "freq": 0.5 * length2,
                   "phase": float(np.pi * length1)}}
    return NetworkSystem(g, coefs, GlobalBoundary(Y), name="transport_loop",
                         simulation=_sim(initial=init, cells=1600))


def stochastic_matrix(w: float) -> np.ndarray:
    return np.array([[1.0 - w, w], [w, 1.0 - w]])


def transport_network(c1=1.0, c2=1.0, length1=1.0, length2=1.0, w=0.25):
    """Transport with mass-conserving coupling u(l) = W u(0), W doubly stochastic."""
    if c1 <= 0 or c2 <= 0:
        raise ModelError("transport speeds must be positive")
    if not 0.0 <= w <= 1.0:
        raise ModelError("w must lie in [0, 1] for a stochastic coupling matrix")
    W = stochastic_matrix(w)
    if abs(np.linalg.det(W)) < 1e-12:
        raise ModelError("coupling matrix W must be invertible (w != 1/2)")
    g = build_graph([("e1", "v", "v", length1, 1), ("e2", "v", "v", length2, 1)])
    coefs = {"e1": EdgeCoefficients(_const(c1), None, _const(1.0)),
             "e2": EdgeCoefficients(_const(c2), None, _const(1.0))}
    Y = np.vstack([np.eye(2), W])
    init = {e: {"profile": "cosine", "amplitude": [0.5], "offset": [1.0], "freq": 1.0}
            for e in ("e1", "e2")}
    return NetworkSystem(g, coefs, GlobalBoundary(Y), name="transport_network",
                         simulation=_sim(initial=init))


# telegrapher ------------------------------------------------------------------------

def telegrapher_coefficients(L=1.0, P=1.0, G=0.0, H=0.0, K=0.0, J=0.0, a=None, b=0.0, c=None, d=None):
    """M = -[[0, L], [P, 0]], N = -[[G, H], [J, K]], Q = [[a, b], [c, d]].

    N follows the equations p_t + L q' + G p + H q = 0, q_t + P p' + K q + J p = 0.

    Without explicit entries Q = diag(P, L) (valid for real positive L, P).
    """
    a = P if a is None else a
    d = L if d is None else d
    c = np.conj(b) if c is None else c
    M = -np.array([[0, L], [P, 0]], dtype=complex)
    N = -np.array([[G, H], [J, K]], dtype=complex)
    Q = np.array([[a, b], [c, d]], dtype=complex)
    return EdgeCoefficients(_const(M), _const(N), _const(Q))


def symmetrizer_constraints(a, b, c, d, L, P, tol=1e-9) -> bool:
    """Closed-form condition for Q = [[a, b], [c, d]] to symmetrize M = -[[0, L], [P, 0]]."""
    scale = max(1.0, abs(a), abs(b), abs(c), abs(d), abs(L), abs(P))
    t = tol * scale
    ok = abs(np.imag(a)) <= t and abs(np.imag(d)) <= t
    ok &= abs(b - np.conj(c)) <= t
    ok &= np.real(a) > t
    ok &= np.real(a) * np.real(d) - abs(b) ** 2 > t * scale
    ok &= abs(a * L - d * np.conj(P)) <= t * scale
    ok &= abs(np.imag(b * P)) <= t * scale and abs(np.imag(b * np.conj(L))) <= t * scale
    ok &= abs(L * P) > t * scale
    return bool(ok)


def telegrapher(L=1.0, P=1.0, G=0.0, H=0.0, K=0.0, J=0.0, length=1.0):
    """Telegrapher system on a loop with periodic conditions u(0) = u(l)."""
    if L * P == 0:
        raise ModelError("LP != 0 is required")
    coef = telegrapher_coefficients(L, P, G, H, K, J)
    g = build_graph([("e1", "v", "v", length, 2)])
    Y = np.vstack([np.eye(2), np.eye(2)])
    init = {"e1": {"profile": "sine", "amplitude": [1.0, 0.5], "freq": 1.0}}
    return NetworkSystem(g, {"e1": coef}, GlobalBoundary(Y), name="telegrapher",
                         simulation=_sim(initial=init))


# Saint-Venant ------------------------------------------------------------------------

def saint_venant_coefficients(g, H, V, Cf, length=1.0, degree=0, weight=1.0, slope=0.0):
    """M, N, Q of the linearized Saint-Venant system around (H(x), V(x)).

    ``degree=1`` uses H(x) = H (1 + slope x / l) with V = const; the steady
    relation (HV)' = 0 is not imposed, the coefficients are fitted cubics.
    """
    if degree == 0:
        M = np.array([[-V, -H], [-g, -V]], dtype=float)
        N = np.array([[0.0, 0.0], [Cf * V ** 2 / H ** 2, -2 * Cf * V / H]])
        Q = weight * np.diag([g, H])
        return EdgeCoefficients(_const(M), _const(N), _const(Q))
    if degree != 1:
        raise ModelError("degree must be 0 or 1")

    def Hx(x):
        return H * (1 + slope * x / length)

    dH = H * slope / length
    Mp = MatrixPolynomial(np.array([[[-V, -H], [-g, -V]], [[0.0, -dH], [0.0, 0.0]]]))
    Qp = MatrixPolynomial(weight * np.array([[[g, 0.0], [0.0, H]], [[0.0, 0.0], [0.0, dH]]]))
    Np = MatrixPolynomial.fit(lambda x: np.array([[0.0, -dH],
                                                  [Cf * V ** 2 / Hx(x) ** 2, -2 * Cf * V / Hx(x)]]),
                              length, degree=3)
    return EdgeCoefficients(Mp, Np, Qp)


def saint_venant_star(g=10.0, H=1.0, V=1.0, Cf=0.1, J=3, length=1.0, regime="auto",
                      degree=0, slope=0.0):
    """Star with J edges (e1 into v0, the rest out of v0)."""
    if H <= 0:
        raise ModelError("H > 0 is required")
    crit = g * H - V ** 2
    if crit == 0:
        raise ModelError("gH - V^2 != 0 is required")
    if J < 2:
        raise ModelError("the star needs J >= 2 edges")
    if regime == "auto":
        regime = "subcritical" if crit > 0 else "supercritical"
    if regime == "subcritical" and crit <= 0:
        raise ModelError("subcritical regime needs gH - V^2 > 0")
    if regime == "supercritical" and (crit >= 0 or V <= 0):
        raise ModelError("supercritical regime needs gH - V^2 < 0 and V > 0")
    gr = star_graph(J, length, 2)
    # Per-edge symmetrizer weights: in the supercritical case the outgoing edges
    # share the incoming energy flux so that continuity at v0 is dissipative.
    if regime == "supercritical":
        weights = [1.0] + [1.0 / (J - 1)] * (J - 1)
    else:
        weights = [1.0] * J
    coefs = {e.id: saint_venant_coefficients(g, H, V, Cf, length, degree, w, slope)
             for e, w in zip(gr.edges, weights)}
    notes = []
    if degree == 1:
        notes.append("variable steady state: (HV)' = 0 is not enforced")
    sys0 = NetworkSystem(gr, coefs, LocalBoundary({v: np.zeros((gr.k_v(v), 0)) for v in gr.vertices}),
                         name="saint_venant_star")
    from .boundary import vertex_form_matrix
    spaces = {}
    if regime == "supercritical":
        spaces["v0"] = coupled_space(gr, "v0", 2, continuity=(0, 1))
        spaces["v1"] = np.zeros((2, 0))
        for j in range(2, J + 1):
            spaces[f"v{j}"] = np.eye(2)
    else:
        tips = []
        for j in range(1, J + 1):
            lam, U = _block_eig(vertex_form_matrix(sys0, f"v{j}"))
            tips.append((U[:, 0], np.sqrt(-lam[0] / lam[1]) * U[:, 1]))
        T0 = vertex_form_matrix(sys0, "v0")
        neg, pos = [], []
        for s in gr.slots("v0"):
            blk = T0[s.offset:s.offset + 2, s.offset:s.offset + 2]
            lam, U = _block_eig(blk)
            vneg = np.zeros(2 * J)
            vpos = np.zeros(2 * J)
            vneg[s.offset:s.offset + 2] = U[:, 0]
            vpos[s.offset:s.offset + 2] = U[:, 1]
            neg.append((lam[0], vneg))
            pos.append((lam[1], vpos))
        cols = []
        for j in range(J):
            ln, un = neg[j]
            lp, up = pos[(j + 1) % J]
            cols.append(un + np.sqrt(-ln / lp) * up)
        spaces["v0"] = np.column_stack(cols)
        spaces.update(_tip_signs(gr, coefs, spaces, tips))
    init = {e.id: {"profile": "bump", "amplitude": [0.1, 0.05], "offset": [0.0, 0.0],
                   "centre": 0.5 * length, "width": 0.1 * length} for e in gr.edges}
    scheme = "characteristic_upwind" if degree == 0 else "local_lax_friedrichs"
    return NetworkSystem(gr, coefs, LocalBoundary(spaces), name="saint_venant_star", notes=notes,
                         simulation=_sim(initial=init, t_final=0.2, scheme=scheme,
                                         closure="characteristic"))


def _tip_signs(gr, coefs, spaces, tips) -> dict:
    """Choose the sign of each isotropic tip vector U_- +- a U_+.

    Both signs give a totally isotropic line; the first sign pattern for
    which the padded complements form a basis of C^k is returned (all +1
    if none does).
    """
    from .boundary import check_local_dimension_condition
    J = len(tips)
    first = None
    for signs in itertools.product((1.0, -1.0), repeat=J):
        trial = dict(spaces)
        for j, (s, (un, up)) in enumerate(zip(signs, tips), start=1):
            trial[f"v{j}"] = (un + s * up)[:, None]
        if first is None:
            first = trial
        sysj = NetworkSystem(gr, coefs, LocalBoundary(trial))
        if check_local_dimension_condition(sysj).holds:
            return {k: v for k, v in trial.items() if k != "v0"}
    return {k: v for k, v in first.items() if k != "v0"}


# waves -------------------------------------------------------------------------------

def wave_star(J=3, alpha=0.0, beta=0.0, gamma=0.0, kappa=1.0, tips="absorbing",
              center="kirchhoff", length=1.0):
    """u_tt = u'' + alpha u_t' + beta u_t + gamma u' in first-order form (u', u_t)."""
    if J < 1:
        raise ModelError("J >= 1 required")
    if tips == "absorbing" and not kappa > 0:
        raise ModelError("absorbing tips need kappa > 0")
    if tips not in ("absorbing", "neumann", "dirichlet"):
        raise ModelError("tips must be absorbing, neumann or dirichlet")
    if center not in ("kirchhoff", "dirichlet"):
        raise ModelError("center must be kirchhoff or dirichlet")
    gr = star_graph(J, length, 2)
    M = np.array([[0.0, 1.0], [1.0, alpha]])
    N = np.array([[0.0, 0.0], [gamma, beta]])
    coefs = {e.id: EdgeCoefficients(_const(M), _const(N), _const(np.eye(2))) for e in gr.edges}
    spaces = {}
    if center == "kirchhoff":
        spaces["v0"] = coupled_space(gr, "v0", 2, continuity=(1,), kirchhoff=(0,))
    else:
        spaces["v0"] = np.zeros((gr.k_v("v0"), 0))
    for j in range(1, J + 1):
        v = f"v{j}"
        iota = gr.slots(v)[0].iota
        if center == "dirichlet" and tips == "dirichlet":
            spaces[v] = np.zeros((2, 0))
        elif tips == "absorbing":
            spaces[v] = np.array([[-iota * kappa], [1.0]])
        elif tips == "neumann":
            spaces[v] = np.array([[0.0], [1.0]])
        else:
            spaces[v] = np.array([[1.0], [0.0]])
    init = {e.id: {"profile": "constant", "amplitude": [0.0, 0.0]} for e in gr.edges}
    init["e2" if J >= 2 else "e1"] = {"profile": "bump", "amplitude": [1.0, 0.0],
                                      "centre": 0.5 * length, "width": 0.1 * length}
    name = "wave_star" if center == "kirchhoff" or tips != "dirichlet" else "dirichlet_everywhere"
    return NetworkSystem(gr, coefs, LocalBoundary(spaces), name=name,
                         simulation=_sim(initial=init))


def dirichlet_everywhere(system: NetworkSystem) -> NetworkSystem:
    """Same coefficients with Y_v = {0} at every vertex."""
    g = system.graph
    return NetworkSystem(g, dict(system.coefficients),
                         LocalBoundary({v: np.zeros((g.k_v(v), 0)) for v in g.vertices}),
                         tolerances=system.tolerances, name="dirichlet_everywhere",
                         simulation=system.simulation)


def hybrid_transport_string(alpha=1.0, beta=1.0, length1=1.0, length2=1.0):
    """Wave edge e1 (v0 -> v1, Dirichlet at v1) coupled to transport edge e2 (v0 -> v2)."""
    if 2 * alpha * beta < 1:
        raise ModelError("the coupling needs 2 alpha beta >= 1")
    gr = build_graph([("e1", "v0", "v1", length1, 2), ("e2", "v0", "v2", length2, 1)],
                     ["v0", "v1", "v2"])
    coefs = {"e1": EdgeCoefficients(_const([[0.0, 1.0], [1.0, 0.0]]), None, _const(np.eye(2))),
             "e2": EdgeCoefficients(_const(-1.0), None, _const(1.0))}
    spaces = {"v0": np.array([[alpha], [beta], [1.0]]),
              "v1": np.array([[1.0], [0.0]]),
              "v2": np.eye(1)}
    init = {"e1": {"profile": "bump", "amplitude": [1.0, 0.0], "centre": 0.5 * length1,
                   "width": 0.1 * length1},
            "e2": {"profile": "bump", "amplitude": [1.0], "centre": 0.5 * length2,
                   "width": 0.1 * length2}}
    return NetworkSystem(gr, coefs, LocalBoundary(spaces), name="hybrid_transport_string",
                         simulation=_sim(initial=init))


# Dirac -------------------------------------------------------------------------------

def _check_imaginary_spectrum(B, tol=1e-9):
    lam = np.linalg.eigvals(B)
    if np.any(np.abs(lam.real) > tol * max(1.0, np.abs(lam).max())):
        raise ModelError(f"B must have a purely imaginary spectrum, got eigenvalues {lam}")


def dirac_star(J=3, c=1.0, m=1.0, hbar=1.0, family="continuity", B=None, length=1.0):
    """1D Dirac operator on a star; slots per edge are (psi1, psi2)."""
    gr = star_graph(J, length, 2)
    M = np.array([[0, 1j * c], [-1j * c, 0]])
    w = m * c ** 2 / hbar
    N = np.diag([-1j * w, 1j * w])
    coefs = {e.id: EdgeCoefficients(_const(M), _const(N), _const(np.eye(2))) for e in gr.edges}
    spaces = {}
    for v in gr.vertices:
        d = gr.degree(v)
        if family == "continuity":
            spaces[v] = coupled_space(gr, v, 2, continuity=(0,), kirchhoff=(1,))
        elif family == "swapped":
            spaces[v] = coupled_space(gr, v, 2, continuity=(1,), kirchhoff=(0,))
        elif family == "equal":
            Y = np.zeros((2 * d, d))
            for i, s in enumerate(gr.slots(v)):
                Y[s.offset, i] = Y[s.offset + 1, i] = 1.0
            spaces[v] = Y
        elif family == "dissipative":
            Bv = np.asarray(B, dtype=complex) if (B is not None and d == J) else 1j * np.eye(d)
            if Bv.shape != (d, d):
                raise ModelError(f"B must be {d} x {d} at vertex {v}")
            _check_imaginary_spectrum(Bv)
            iota = np.array([s.iota for s in gr.slots(v)], dtype=float)
            Y = np.zeros((2 * d, d), dtype=complex)
            for i, s in enumerate(gr.slots(v)):
                Y[s.offset, :] = 1j * Bv[i, :]
                Y[s.offset + 1, i] = iota[i]
            spaces[v] = Y
        else:
            raise ModelError("family must be continuity, swapped, equal or dissipative")
    init = {e.id: {"profile": "bump", "amplitude": [1.0, 0.5], "centre": 0.5 * length,
                   "width": 0.1 * length} for e in gr.edges}
    return NetworkSystem(gr, coefs, LocalBoundary(spaces), name="dirac_star",
                         simulation=_sim(initial=init))


# second sound ---------------------------------------------------------------------------

def second_sound_matrices(alpha=1.0, beta=1.0, gamma=1.0, delta=1.0, tau0=1.0, kappa=1.0):
    M = np.array([[0.0, 1.0, 0.0, 0.0],
                  [alpha, 0.0, -beta, 0.0],
                  [0.0, -delta, 0.0, -gamma],
                  [0.0, 0.0, -kappa / tau0, 0.0]])
    Q = np.diag([alpha * delta, delta, beta, beta * gamma * tau0 / kappa])
    N = np.diag([0.0, 0.0, 0.0, -1.0 / tau0])
    return M, N, Q


def second_sound_eigenvalues(alpha=1.0, beta=1.0, gamma=1.0, delta=1.0, variant="sqrtK"):
    """Closed-form spectrum of QM: lambda^2 = (H +- sqrt(K)) / 2.

    ``variant="2sqrtK"`` evaluates lambda^2 = (H +- 2 sqrt(K)) / 2 instead,
    which does not match the numerical spectrum.
    """
    Hs = alpha ** 2 * delta ** 2 + beta ** 2 * delta ** 2 + beta ** 2 * gamma ** 2
    Ks = Hs ** 2 - 4 * alpha ** 2 * beta ** 2 * gamma ** 2 * delta ** 2
    f = 1.0 if variant == "sqrtK" else 2.0
    sq = np.array([(Hs - f * np.sqrt(Ks)) / 2, (Hs + f * np.sqrt(Ks)) / 2], dtype=complex)
    r = np.sqrt(sq)
    return np.sort_complex(np.concatenate([-r, r]))


SECOND_SOUND_NOTE = ("closed-form eigenvalues of QM are +-sqrt((H +- sqrt(K))/2); "
                     "the form +-sqrt((H +- 2 sqrt(K))/2) disagrees with the numerical spectrum")

_FAMILY_SPACES = {"i": (0, 2), "ii": (0, 3), "free": (1, 3)}


def second_sound(alpha=1.0, beta=1.0, gamma=1.0, delta=1.0, tau0=1.0, kappa=1.0,
                 family="i", J=3, length=1.0, Bd=-1.0, Cd=-1.0):
    """Lord-Shulman thermoelasticity, u = (z', z_t, theta, q)."""
    for nm, val in dict(alpha=alpha, beta=beta, gamma=gamma, delta=delta, tau0=tau0, kappa=kappa).items():
        if not val > 0:
            raise ModelError(f"{nm} must be positive")
    if family == "iii":
        raise ModelError("family (iii) is a dynamic boundary condition for q and is not supported "
                         "by the static boundary-space formalism")
    M, N, Q = second_sound_matrices(alpha, beta, gamma, delta, tau0, kappa)
    coef = EdgeCoefficients(_const(M), _const(N), _const(Q))
    notes = [SECOND_SOUND_NOTE]
    init_one = {"profile": "sine", "amplitude": [0.5, 0.2, 0.3, 0.1], "freq": 1.0}
    if family in _FAMILY_SPACES:
        gr = build_graph([("e1", "v0", "v1", length, 4)], ["v0", "v1"])
        Y = np.zeros((4, 2))
        for i, cidx in enumerate(_FAMILY_SPACES[family]):
            Y[cidx, i] = 1.0
        bnd = LocalBoundary({"v0": Y, "v1": Y.copy()})
        coefs = {"e1": coef}
        init = {"e1": init_one}
    elif family in ("periodic", "dissipative"):
        gr = build_graph([("e1", "v", "v", length, 4)])
        coefs = {"e1": coef}
        init = {"e1": init_one}
        if family == "periodic":
            Y = np.vstack([np.eye(4), np.eye(4)])
        else:
            Y = _second_sound_dissipative_space(alpha, beta, gamma, delta, Bd, Cd)
        bnd = GlobalBoundary(Y)
    elif family in ("network_a", "network_b"):
        gr = star_graph(J, length, 4)
        coefs = {e.id: coef for e in gr.edges}
        if family == "network_a":
            kw = dict(continuity=(1, 3), kirchhoff=(0, 2))
        else:
            kw = dict(continuity=(0, 2), kirchhoff=(1, 3))
        bnd = LocalBoundary({v: coupled_space(gr, v, 4, **kw) for v in gr.vertices})
        init = {e.id: init_one for e in gr.edges}
    else:
        raise ModelError("family must be i, ii, free, periodic, dissipative, network_a or network_b")
    return NetworkSystem(gr, coefs, bnd, name="second_sound", notes=notes,
                         simulation=_sim(initial=init, t_final=2.0, cells=200))


def _as_2x2(X):
    X = np.asarray(X, dtype=float)
    return X * np.eye(2) if X.ndim == 0 else X


def _second_sound_dissipative_space(alpha, beta, gamma, delta, Bd, Cd):
    """Y = {Z1 = B Z2, Z2 + Qf = -C Theta} on a loop, free parameters (Z2, Theta).

    Z1 = (-alpha z'(0), alpha z'(l)), Z2 = delta (z_t(0), z_t(l)),
    Theta = (-beta theta(0), beta theta(l)), Qf = gamma (q(0), q(l)).
    """
    B, C = _as_2x2(Bd), _as_2x2(Cd)
    cols = []
    for k in range(4):
        p = np.zeros(4)
        p[k] = 1.0
        Z2, Th = p[:2], p[2:]
        Z1 = B @ Z2
        Qf = -C @ Th - Z2
        zp = np.array([-Z1[0] / alpha, Z1[1] / alpha])
        zt = Z2 / delta
        th = np.array([-Th[0] / beta, Th[1] / beta])
        q = Qf / gamma
        u0 = [zp[0], zt[0], th[0], q[0]]
        ul = [zp[1], zt[1], th[1], q[1]]
        cols.append(np.array(u0 + ul))
    return np.column_stack(cols)


# registry ---------------------------------------------------------------------------------

_G, _S = "group", "quasi_contractive_semigroup"

PRESETS = {
    "transport_loop": PresetInfo(
        "transport_loop", transport_loop,
        dict(c1=1.0, c2=1.0, length1=1.0, length2=1.0, coupling="swap"),
        "two transport loops coupled by u(l) = V0 u(0)",
        {_G: "yes", "unitary_group": "yes", _S: "yes", "real": "yes"}),
    "transport_network": PresetInfo(
        "transport_network", transport_network,
        dict(c1=1.0, c2=1.0, length1=1.0, length2=1.0, w=0.25),
        "transport with doubly stochastic coupling u(l) = W u(0)",
        {_S: "yes", "contractive_semigroup": "yes", "real": "yes", "positive": "yes"}),
    "telegrapher": PresetInfo(
        "telegrapher", telegrapher,
        dict(L=1.0, P=1.0, G=0.0, H=0.0, K=0.0, J=0.0, length=1.0),
        "telegrapher equations on a periodic loop",
        {_G: "yes", "unitary_group": "yes", _S: "yes", "real": "yes"}),
    "saint_venant_star": PresetInfo(
        "saint_venant_star", saint_venant_star,
        dict(g=10.0, H=1.0, V=1.0, Cf=0.1, J=3, length=1.0, regime="auto", degree=0, slope=0.0),
        "linearized shallow water on a star, sub- or supercritical",
        {_G: "yes", "unitary_group": "no", _S: "yes", "real": "yes", "positive": "no"}),
    "wave_star": PresetInfo(
        "wave_star", wave_star,
        dict(J=3, alpha=0.0, beta=0.0, gamma=0.0, kappa=1.0, tips="absorbing", center="kirchhoff",
             length=1.0),
        "damped wave equation on a star with absorbing tips",
        {_S: "yes", "contractive_semigroup": "yes", "real": "yes", "positive": "no"}),
    "hybrid_transport_string": PresetInfo(
        "hybrid_transport_string", hybrid_transport_string,
        dict(alpha=1.0, beta=1.0, length1=1.0, length2=1.0),
        "string coupled to a transport edge at a common endpoint",
        {_S: "yes", "real": "yes", "positive": "no"}),
    "dirac_star": PresetInfo(
        "dirac_star", dirac_star,
        dict(J=3, c=1.0, m=1.0, hbar=1.0, family="continuity", length=1.0),
        "1D Dirac equation on a star",
        {_G: "yes", "unitary_group": "yes", _S: "yes", "real": "no", "positive": "no"}),
    "second_sound": PresetInfo(
        "second_sound", second_sound,
        dict(alpha=1.0, beta=1.0, gamma=1.0, delta=1.0, tau0=1.0, kappa=1.0, family="i", J=3,
             length=1.0, Bd=-1.0, Cd=-1.0),
        "hyperbolic thermoelasticity (second sound)",
        {_G: "yes", _S: "yes", "contractive_semigroup": "yes", "real": "yes", "positive": "no"}),
}


def _coerce(value, default):
    if isinstance(value, str) and not isinstance(default, str):
        try:
            value = json.loads(value)
        except json.JSONDecodeError:
            raise ModelError(f"cannot parse parameter value {value!r}") from None
    if isinstance(default, bool):
        return bool(value)
    if isinstance(default, int) and not isinstance(default, bool) and isinstance(value, (int, float)):
        if float(value) != int(value):
            raise ModelError(f"expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float) and isinstance(value, (int, float)):
        return float(value)
    return value


def make_model(name: str, params: dict | None = None, **kw) -> ModelPreset:
    if name not in PRESETS:
        raise ModelError(f"unknown model {name!r}; available: {', '.join(PRESETS)}")
    info = PRESETS[name]
    given = dict(params or {}, **kw)
    unknown = set(given) - set(info.defaults) - {"B"}
    if unknown:
        raise ModelError(f"{name}: unknown parameters {sorted(unknown)}; "
                         f"accepted: {sorted(info.defaults)}")
    p = dict(info.defaults)
    for k, v in given.items():
        p[k] = _coerce(v, info.defaults.get(k))
    system = info.builder(**p)
    return ModelPreset(name, p, system)


def parse_params(items) -> dict:
    """``["k=v", ...]`` into a dict (values parsed later against defaults)."""
    out = {}
    for it in items or ():
        if "=" not in it:
            raise ModelError(f"parameter {it!r} is not of the form key=value")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out
