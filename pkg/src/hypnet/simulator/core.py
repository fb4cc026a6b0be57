"""Explicit finite-volume evolution of u_t = M u_x + N u on a network.

Each edge carries cell averages plus one ghost cell per end. A stage is
two-phase: the vertex closure writes the ghosts (serial), then every edge
interior is updated independently (optionally on worker threads).
"""
from __future__ import annotations

import csv
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from .._linalg import orth
from ..coefficients import sample_points
from ..system import NetworkSystem
from . import kernels

SCHEMES = ("characteristic_upwind", "local_lax_friedrichs")
CLOSURES = ("projection", "characteristic")


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    cells_per_unit: int = 400
    cfl: float = 0.45
    t_final: float = 1.0
    stride: int = 1
    scheme: str = "characteristic_upwind"
    probes: tuple = ("energy", "positivity", "reality")
    threads: int = 1
    snapshots: bool = False
    closure: str = "projection"

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise SimulationError(f"CFL number must lie in (0, 1], got {self.cfl}")
        if self.scheme not in SCHEMES:
            raise SimulationError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.t_final < 0:
            raise SimulationError("final time must be nonnegative")
        if self.stride < 1:
            raise SimulationError("output stride must be >= 1")
        if self.closure not in CLOSURES:
            raise SimulationError(f"unknown closure {self.closure!r}; choose from {CLOSURES}")
        if self.cells_per_unit <= 0:
            raise SimulationError("cells per unit length must be positive")

    def updated(self, **kw) -> "SimConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass
class EdgeGrid:
    n: int
    dx: float
    x: np.ndarray          # cell centres
    A: np.ndarray          # (n, m, m) coupling to the left neighbour
    B: np.ndarray          # (n, m, m) diagonal block
    C: np.ndarray          # (n, m, m) coupling to the right neighbour
    Q: np.ndarray          # (n, m, m) symmetrizer at the centres
    rho: float


@dataclass
class SimState:
    """Per-edge arrays of shape (n + 2, m); rows 0 and n + 1 are ghosts."""
    u: list
    t: float
    grids: list = field(repr=False)
    projector: np.ndarray = field(repr=False)
    dtype: type = complex
    closure: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.closure is None:
            self.closure = self.projector

    def interior(self, i: int) -> np.ndarray:
        return self.u[i][1:-1]

    def copy(self) -> "SimState":
        return SimState([a.copy() for a in self.u], self.t, self.grids, self.projector, self.dtype,
                        self.closure)


@dataclass
class TimeSeries:
    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    boundary_residual: list = field(default_factory=list)
    min_real: list = field(default_factory=list)
    max_imag: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    dt: float = 0.0
    steps: int = 0
    backend: str = kernels.BACKEND
    final_state: SimState | None = field(default=None, repr=False)

    def append(self, t, e, r, mn, mi):
        self.times.append(t)
        self.energy.append(e)
        self.boundary_residual.append(r)
        self.min_real.append(mn)
        self.max_imag.append(mi)

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.times, self.energy, self.boundary_residual,
                                self.min_real, self.max_imag])

    def relative_drift(self) -> float:
        e = np.asarray(self.energy)
        return float(np.max(np.abs(e - e[0])) / e[0]) if e[0] > 0 else float(np.max(np.abs(e)))

    def max_energy_increase(self) -> float:
        """Largest single-interval energy increase relative to E(0)."""
        e = np.asarray(self.energy)
        if len(e) < 2 or e[0] <= 0:
            return 0.0
        return float(np.max(np.diff(e)) / e[0])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "energy", "boundary_residual", "min_real", "max_imag"])
            for row in self.as_array():
                w.writerow([repr(float(v)) for v in row])


# discretisation ---------------------------------------------------------------

def _spectral_radius(Ms: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(Ms))))


def _upwind_blocks(M: np.ndarray, dx: float, tol: float):
    lam, V = np.linalg.eig(M)
    if np.max(np.abs(lam.imag)) > tol * max(1.0, np.max(np.abs(lam))):
        raise SimulationError("characteristic_upwind needs real characteristic speeds")
    lam = lam.real
    Vinv = np.linalg.inv(V)
    Ap = (V * np.maximum(lam, 0.0)) @ Vinv
    Am = (V * np.minimum(lam, 0.0)) @ Vinv
    if not np.iscomplexobj(M):
        Ap, Am = Ap.real, Am.real
    return -Am / dx, (Am - Ap) / dx, Ap / dx


def _real_if_zero(a: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(a) and not np.any(a.imag):
        return a.real.copy()
    return a


def _global_projector(system: NetworkSystem) -> np.ndarray:
    g = system.graph
    n = 2 * g.k
    if system.is_local:
        P = np.zeros((n, n), dtype=complex)
        for v in g.vertices:
            S = g.vertex_selector(v)
            Y = orth(system.Y(v), g.k_v(v))
            P += S.T @ (Y @ Y.conj().T) @ S
    else:
        Y = orth(system.boundary.basis, n)
        P = Y @ Y.conj().T
    return _real_if_zero(P)


def _outgoing_rows(M: np.ndarray, iota: int) -> np.ndarray:
    """Rows of S with M = S^{-1} D S for the characteristics leaving the edge."""
    lam, V = np.linalg.eig(M)
    S = np.linalg.inv(V)
    return S[iota * lam.real < 0]


def _closure_map(Y: np.ndarray, W: np.ndarray) -> np.ndarray:
    """p = Y c with c minimising |W (Y c - gamma)|: keeps outgoing characteristics."""
    if Y.shape[1] == 0:
        return np.zeros((Y.shape[0], Y.shape[0]))
    return Y @ np.linalg.pinv(W @ Y) @ W


def _characteristic_closure(system: NetworkSystem) -> np.ndarray:
    """Oblique closure: outgoing characteristic values of the trace are kept
    and the incoming ones are chosen so that the trace lies in Y."""
    g = system.graph
    n = 2 * g.k
    rows = []        # (global index array, outgoing rows) per endpoint block
    for i, e in enumerate(g.edges):
        c = system.coefficients[e.id]
        rows.append((g.global_index(i, 0), _outgoing_rows(c.M(0.0), -1)))
        rows.append((g.global_index(i, 1), _outgoing_rows(c.M(e.length), 1)))
    Wg = np.zeros((0, n), dtype=complex)
    for idx, R in rows:
        blk = np.zeros((R.shape[0], n), dtype=complex)
        blk[:, idx] = R
        Wg = np.vstack([Wg, blk])
    if system.is_local:
        G = np.zeros((n, n), dtype=complex)
        for v in g.vertices:
            S = g.vertex_selector(v)
            Y = orth(system.Y(v), g.k_v(v))
            Wv = Wg @ S.T
            Wv = Wv[np.any(np.abs(Wv) > 0, axis=1)]
            G += S.T @ _closure_map(Y, Wv) @ S
    else:
        G = _closure_map(orth(system.boundary.basis, n), Wg)
    G[np.abs(G) < 1e-14 * max(1.0, np.abs(G).max())] = 0.0
    return _real_if_zero(G)


def _initial_values(init, eid: str, x: np.ndarray, m: int) -> np.ndarray:
    if init is None:
        raise SimulationError(f"edge {eid!r}: no initial data")
    vals = init(x) if callable(init) else np.asarray(init)
    vals = np.asarray(vals)
    if vals.ndim == 1 and m == 1:
        vals = vals[:, None]
    if vals.ndim == 2 and vals.shape == (m, len(x)) and m != len(x):
        vals = vals.T
    if vals.shape != (len(x), m):
        raise SimulationError(f"edge {eid!r}: initial data shape {vals.shape}, expected {(len(x), m)}")
    return vals


def discretize(system: NetworkSystem, config: SimConfig,
               initial: Mapping[str, Callable | np.ndarray]) -> SimState:
    g = system.graph
    tol = system.tolerances
    grids, data = [], []
    complex_mode = False
    for e in g.edges:
        c = system.coefficients[e.id]
        n = max(4, int(round(config.cells_per_unit * e.length)))
        dx = e.length / n
        x = (np.arange(n) + 0.5) * dx
        Mx, Nx, Qx = c.M(x), c.N(x), c.Q(x)
        rho = _spectral_radius(c.M(sample_points(e.length, tol.n_samples)))
        m = e.size
        if config.scheme == "characteristic_upwind":
            if not c.M.is_constant:
                raise SimulationError(
                    f"edge {e.id!r}: M varies along the edge; characteristic_upwind needs constant M, "
                    "use scheme=local_lax_friedrichs")
            a, b, cc = _upwind_blocks(c.M.coeffs[0], dx, tol.eig_imag_tol)
            A = np.broadcast_to(a, (n, m, m))
            B = b + Nx
            C = np.broadcast_to(cc, (n, m, m))
        else:
            eye = np.eye(m)
            A = (-0.5 * Mx + 0.5 * rho * eye) / dx
            B = -rho / dx * eye + Nx
            C = (0.5 * Mx + 0.5 * rho * eye) / dx
        A, B, C = (np.ascontiguousarray(_real_if_zero(np.asarray(z))) for z in (A, B, C))
        u0 = _initial_values(initial.get(e.id) if initial else None, e.id, x, m)
        complex_mode |= any(np.iscomplexobj(z) for z in (A, B, C, u0))
        grids.append(EdgeGrid(n, dx, x, A, B, C, _real_if_zero(np.asarray(Qx)), rho))
        data.append(u0)
    P = _global_projector(system)
    G = _characteristic_closure(system) if config.closure == "characteristic" else P
    complex_mode |= np.iscomplexobj(P) or np.iscomplexobj(G)
    dtype = complex if complex_mode else float
    for gr in grids:
        gr.A, gr.B, gr.C = (np.ascontiguousarray(z, dtype=dtype) for z in (gr.A, gr.B, gr.C))
    u = []
    for gr, u0 in zip(grids, data):
        arr = np.zeros((gr.n + 2, u0.shape[1]), dtype=dtype)
        arr[1:-1] = u0
        u.append(arr)
    state = SimState(u, 0.0, grids, P.astype(dtype), dtype, G.astype(dtype))
    project_traces(state, system)
    return state


# boundary closure ----------------------------------------------------------------

def _face_traces(state: SimState) -> np.ndarray:
    """Provisional endpoint values by linear extrapolation, (u(0), u(l)) layout."""
    left = [1.5 * a[1] - 0.5 * a[2] for a in state.u]
    right = [1.5 * a[-2] - 0.5 * a[-3] for a in state.u]
    return np.concatenate(left + right)


def _face_values(state: SimState) -> np.ndarray:
    left = [0.5 * (a[0] + a[1]) for a in state.u]
    right = [0.5 * (a[-1] + a[-2]) for a in state.u]
    return np.concatenate(left + right)


def project_traces(state: SimState, system: NetworkSystem | None = None) -> SimState:
    """Map the trace into Y (orthogonal projection by default) and set ghosts."""
    gamma = _face_traces(state)
    p = state.closure @ gamma
    k = len(p) // 2
    off = 0
    for a in state.u:
        m = a.shape[1]
        a[0] = 2.0 * p[off:off + m] - a[1]
        a[-1] = 2.0 * p[k + off:k + off + m] - a[-2]
        off += m
    return state


def boundary_residual(state: SimState) -> float:
    f = _face_values(state)
    r = f - state.projector @ f
    return float(np.linalg.norm(r))


# time stepping -------------------------------------------------------------------

def _rhs_edge(gr: EdgeGrid, u: np.ndarray, out: np.ndarray) -> None:
    kernels.apply_stencil(gr.A, gr.B, gr.C, u, out)


def _rhs(state: SimState, pool) -> list:
    outs = [np.empty((gr.n, a.shape[1]), dtype=state.dtype) for gr, a in zip(state.grids, state.u)]
    if pool is None:
        for gr, a, o in zip(state.grids, state.u, outs):
            _rhs_edge(gr, a, o)
    else:
        list(pool.map(_rhs_edge, state.grids, state.u, outs))
    return outs


def stable_dt(state: SimState, cfl: float) -> float:
    dts = [gr.dx / gr.rho for gr in state.grids if gr.rho > 0]
    return cfl * min(dts) if dts else math.inf


def step(state: SimState, dt: float, cfl: float = 1.0, pool=None) -> SimState:
    """One Heun step; the closure is applied before each stage."""
    lim = stable_dt(state, cfl)
    if dt > lim * (1 + 1e-12):
        raise SimulationError(f"time step {dt:.3e} violates the CFL limit {lim:.3e}")
    project_traces(state)
    k1 = _rhs(state, pool)
    mid = state.copy()
    for a, k in zip(mid.u, k1):
        a[1:-1] += dt * k
    project_traces(mid)
    k2 = _rhs(mid, pool)
    for a, ka, kb in zip(state.u, k1, k2):
        a[1:-1] += 0.5 * dt * (ka + kb)
    state.t += dt
    project_traces(state)
    return state


# diagnostics ---------------------------------------------------------------------

def energy(state: SimState) -> float:
    E = 0.0
    for gr, a in zip(state.grids, state.u):
        w = a[1:-1]
        Qw = np.einsum("iab,ib->ia", gr.Q, w)
        E += 0.5 * gr.dx * float(np.sum(np.real(np.conj(w) * Qw)))
    return E


def probes(state: SimState) -> tuple[float, float]:
    mn = min(float(np.min(np.real(a[1:-1]))) for a in state.u)
    mi = max(float(np.max(np.abs(np.imag(a[1:-1])))) for a in state.u)
    return mn, mi


def _record(ts: TimeSeries, state: SimState, snapshots: bool) -> None:
    mn, mi = probes(state)
    ts.append(state.t, energy(state), boundary_residual(state), mn, mi)
    if snapshots:
        ts.snapshots.append((state.t, [a[1:-1].copy() for a in state.u]))


def run(system: NetworkSystem, config: SimConfig, initial, report=None,
        state: SimState | None = None) -> TimeSeries:
    if report is None:
        from ..classifier import classify
        report = classify(system)
    if report.quasi_contractive_semigroup.value != "yes":
        warnings.warn(f"semigroup generation is {report.quasi_contractive_semigroup.value}; "
                      "the simulation may not approximate a well-posed problem", stacklevel=2)
    if state is None:
        state = discretize(system, config, initial)
    dt0 = stable_dt(state, config.cfl)
    nsteps = 0 if config.t_final == 0 else max(1, math.ceil(config.t_final / dt0 - 1e-9))
    dt = config.t_final / nsteps if nsteps else 0.0
    ts = TimeSeries(dt=dt, steps=nsteps)
    _record(ts, state, config.snapshots)
    pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        for i in range(1, nsteps + 1):
            step(state, dt, config.cfl, pool)
            if i == nsteps:
                state.t = config.t_final
            if i % config.stride == 0 or i == nsteps:
                _record(ts, state, config.snapshots)
    finally:
        if pool is not None:
            pool.shutdown()
    ts.final_state = state
    return ts


def write_snapshots(ts: TimeSeries, system: NetworkSystem, state: SimState, directory) -> list:
    """One CSV per edge and snapshot: x, re(u_1), im(u_1), ..."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for j, (t, arrays) in enumerate(ts.snapshots):
        for e, gr, w in zip(system.graph.edges, state.grids, arrays):
            path = os.path.join(directory, f"{e.id}_{j:05d}.csv")
            with open(path, "w", newline="") as fh:
                wr = csv.writer(fh)
                head = ["x"]
                for c in range(w.shape[1]):
                    head += [f"re(u_{c + 1})", f"im(u_{c + 1})"]
                wr.writerow([f"# t={t!r}"])
                wr.writerow(head)
                for xi, row in zip(gr.x, w):
                    vals = [repr(float(xi))]
                    for z in row:
                        vals += [repr(float(np.real(z))), repr(float(np.imag(z)))]
                    wr.writerow(vals)
            paths.append(path)
    return paths


# initial-data profiles -------------------------------------------------------------

PROFILES = ("sine", "cosine", "bump", "constant", "samples")


def _entries(data, ndim: int) -> np.ndarray:
    """Numeric array whose entries may be written as [re, im] pairs."""
    a = np.asarray(data)
    if a.dtype.kind not in "fc":
        a = a.astype(float)
    if a.ndim == ndim + 1 and a.shape[-1] == 2 and a.dtype.kind == "f":
        a = a[..., 0] + 1j * a[..., 1]
    return _real_if_zero(a.astype(complex))


def profile_function(spec: Mapping, length: float, m: int) -> Callable:
    """Callable x -> (n, m) from a profile record.

    sine / cosine: offset + amplitude * f(2 pi freq x / l + phase)
    bump: amplitude * exp(-((x - centre) / width)^2) + offset
    constant: amplitude
    samples: values interpolated linearly from (x, values) tables
    """
    kind = spec.get("profile", "constant")
    amp = np.broadcast_to(_entries(spec.get("amplitude", np.ones(m)), 1), (m,))
    off = np.broadcast_to(_entries(spec.get("offset", np.zeros(m)), 1), (m,))
    if kind in ("sine", "cosine"):
        f = np.sin if kind == "sine" else np.cos
        freq = float(spec.get("freq", 1.0))
        ph = float(spec.get("phase", 0.0))
        return lambda x: off + amp * f(2 * np.pi * freq * np.asarray(x)[:, None] / length + ph)
    if kind == "bump":
        c0 = float(spec.get("centre", 0.5 * length))
        w = float(spec.get("width", 0.1 * length))
        return lambda x: off + amp * np.exp(-((np.asarray(x)[:, None] - c0) / w) ** 2)
    if kind == "constant":
        return lambda x: np.broadcast_to(off + amp, (len(np.asarray(x)), m)).copy()
    if kind == "samples":
        xs = np.asarray(spec["x"], dtype=float)
        vals = _entries(spec["values"], 2 if m > 1 else 1)
        if vals.ndim == 1:
            vals = vals[:, None]

        def interp(x):
            cols = [np.interp(x, xs, vals[:, j].real) + 1j * np.interp(x, xs, vals[:, j].imag)
                    if np.iscomplexobj(vals) else np.interp(x, xs, vals[:, j]) for j in range(m)]
            return np.column_stack(cols)
        return interp
    raise SimulationError(f"unknown initial-data profile {kind!r}; choose from {PROFILES}")


def initial_from_spec(system: NetworkSystem, spec: Mapping) -> dict:
    out = {}
    for e in system.graph.edges:
        if e.id not in spec:
            raise SimulationError(f"edge {e.id!r}: missing initial-data profile")
        out[e.id] = profile_function(spec[e.id], e.length, e.size)
    return out
