"""Vertex form matrices, boundary subspaces and the dimension conditions.

Local conditions gamma_v(u) in Y_v and the global form gamma(u) in Y are both
supported. A global condition is the same thing as a local one on the flower
graph (every edge a loop at a single vertex), so the adjoint test below is
available in both settings.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import forms
from ._linalg import as_matrix, complement, intersection_dim, opnorm, orth, rank_info
from .coefficients import sample_points
from .graph import TAIL
from .system import NetworkSystem


class BoundaryError(ValueError):
    pass


def _endpoint(system: NetworkSystem, edge_index: int, end: int) -> float:
    return 0.0 if end == TAIL else system.graph.edges[edge_index].length


def vertex_form_matrix(system: NetworkSystem, v) -> np.ndarray:
    """T_v = diag(iota_ve Q_e M_e) with each block evaluated at its endpoint."""
    g = system.graph
    kv = g.k_v(v)
    T = np.zeros((kv, kv), dtype=complex)
    for s in g.slots(v):
        c = system.coefficients[g.edges[s.edge].id]
        x = _endpoint(system, s.edge, s.end)
        T[s.offset:s.offset + s.size, s.offset:s.offset + s.size] = s.iota * (c.Q(x) @ c.M(x))
    T = 0.5 * (T + T.conj().T)
    return T.real.copy() if not np.any(T.imag) else T


def global_form_matrix(system: NetworkSystem) -> np.ndarray:
    """T = diag(-Q(0)M(0), Q(l)M(l)) in the (u(0), u(l)) layout."""
    g = system.graph
    k = g.k
    T = np.zeros((2 * k, 2 * k), dtype=complex)
    for i, e in enumerate(g.edges):
        c = system.coefficients[e.id]
        sl = g.edge_slice(i)
        T[sl, sl] = -(c.Q(0.0) @ c.M(0.0))
        T[k + sl.start:k + sl.stop, k + sl.start:k + sl.stop] = c.Q(e.length) @ c.M(e.length)
    T = 0.5 * (T + T.conj().T)
    return T.real.copy() if not np.any(T.imag) else T


@dataclass
class VertexCondition:
    vertex: str
    Y: np.ndarray            # orthonormal basis of Y_v
    T: np.ndarray
    user_basis: np.ndarray = field(repr=False)

    @property
    def k_v(self) -> int:
        return self.T.shape[0]

    @property
    def dim(self) -> int:
        return self.Y.shape[1]

    def perp(self) -> np.ndarray:
        return complement(self.Y, self.k_v)

    def adjoint_space(self) -> np.ndarray:
        return orth(np.linalg.solve(self.T, self.perp()), self.k_v)

    def cone(self, tol=None) -> forms.ConeClass:
        return forms.classify_subspace(self.T, self.Y, tol)


@dataclass
class GlobalCondition:
    Y: np.ndarray
    T: np.ndarray
    user_basis: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def dim(self) -> int:
        return self.Y.shape[1]

    def perp(self) -> np.ndarray:
        return complement(self.Y, self.n)

    def adjoint_space(self) -> np.ndarray:
        return orth(np.linalg.solve(self.T, self.perp()), self.n)

    def cone(self, tol=None) -> forms.ConeClass:
        return forms.classify_subspace(self.T, self.Y, tol)


def vertex_conditions(system: NetworkSystem) -> dict[str, VertexCondition]:
    if not system.is_local:
        raise BoundaryError("system has a global boundary condition")
    out = {}
    for v in system.graph.vertices:
        B = system.Y(v)
        out[v] = VertexCondition(v, orth(B, system.graph.k_v(v)), vertex_form_matrix(system, v), B)
    return out


def global_condition(system: NetworkSystem, Y=None) -> GlobalCondition:
    g = system.graph
    if Y is None:
        Y = system.boundary.basis if not system.is_local else local_to_global(system)
    Y = as_matrix(Y, 2 * g.k)
    if Y.shape[0] != 2 * g.k:
        raise BoundaryError(f"global Y must have 2k = {2 * g.k} rows, got {Y.shape[0]}")
    return GlobalCondition(orth(Y, 2 * g.k), global_form_matrix(system), Y)


def local_to_global(system: NetworkSystem) -> np.ndarray:
    """Assemble Y = sum_v P_v^T Y_v in C^{2k} from local bases."""
    g = system.graph
    cols = [g.vertex_selector(v).T @ orth(system.Y(v), g.k_v(v)) for v in g.vertices]
    cols = [c for c in cols if c.shape[1]]
    if not cols:
        return np.zeros((2 * g.k, 0))
    return np.hstack(cols)


def adjoint_bc_space(system: NetworkSystem, v) -> np.ndarray:
    """Orthonormal basis of T_v^{-1} Y_v^perp (dimension k_v - dim Y_v)."""
    g = system.graph
    T = vertex_form_matrix(system, v)
    Yp = complement(orth(system.Y(v), g.k_v(v)), g.k_v(v))
    return orth(np.linalg.solve(T, Yp), g.k_v(v))


@dataclass
class LocalDimensionResult:
    holds: bool
    k: int
    sum_dim_Y: int
    rank_stacked: int
    n_vectors: int
    margin: float
    dims: dict
    dependent_pair: tuple | None = None

    def to_dict(self) -> dict:
        return {"holds": self.holds, "k": self.k, "sum_dim_Y": self.sum_dim_Y,
                "rank_stacked": self.rank_stacked, "n_vectors": self.n_vectors,
                "margin": self.margin, "dims": self.dims,
                "dependent_pair": list(self.dependent_pair) if self.dependent_pair else None}


def check_local_dimension_condition(system: NetworkSystem) -> LocalDimensionResult:
    """Do the zero-padded Y_v^perp bases form a basis of C^k?"""
    g = system.graph
    if not system.is_local:
        raise BoundaryError("local dimension condition needs local boundary spaces")
    blocks, dims = {}, {}
    for v in g.vertices:
        kv = g.k_v(v)
        Y = orth(system.Y(v), kv)
        dims[v] = Y.shape[1]
        blocks[v] = g.vertex_embedding(v) @ complement(Y, kv)
    stacked = np.hstack([blocks[v] for v in g.vertices]) if g.vertices else np.zeros((g.k, 0))
    info = rank_info(stacked)
    s = sum(dims.values())
    holds = (s == g.k) and info.rank == g.k and stacked.shape[1] == g.k
    pair = None
    if not holds:
        pair = _dependent_pair(blocks, g)
    return LocalDimensionResult(holds, g.k, s, info.rank, stacked.shape[1], info.margin, dims, pair)


def _dependent_pair(blocks: dict, g):
    """First vertex pair (or single vertex) whose padded complements are dependent."""
    vs = list(blocks)
    for v in vs:
        B = blocks[v]
        if B.shape[1] and rank_info(B).rank < B.shape[1]:
            return (v, v)
    for i, v in enumerate(vs):
        for w in vs[i + 1:]:
            if blocks[v].shape[1] and blocks[w].shape[1]:
                if intersection_dim(blocks[v], blocks[w], g.k) > 0:
                    return (v, w)
    return None


@dataclass
class GlobalConditionResult:
    basis_global: bool
    dim_Y_perp: int
    k: int
    dim_Y_cap_K: int
    infty_applicable: bool
    basis_global_infty: bool
    dim_Pi_l_Y_perp: int
    margin: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def m_is_special(system: NetworkSystem) -> bool:
    """Every M_e diagonal, or constant Hermitian positive definite."""
    tol = system.tolerances
    for e in system.graph.edges:
        M = system.coefficients[e.id].M
        x = sample_points(e.length, tol.n_samples)
        Ms = M(x)
        off = Ms - np.einsum("nii->ni", Ms)[:, :, None] * np.eye(M.size)
        scale = max(np.abs(Ms).max(), 1e-300)
        diagonal = np.abs(off).max() <= tol.coef_tol * scale
        spd = False
        if M.is_constant:
            A = M.coeffs[0]
            if opnorm(A - A.conj().T) <= tol.herm_tol * opnorm(A):
                spd = np.linalg.eigvalsh(0.5 * (A + A.conj().T)).min() > tol.zero_tol * opnorm(A)
        if not (diagonal or spd):
            return False
    return True


def check_global_conditions(system: NetworkSystem, Y=None) -> GlobalConditionResult:
    g = system.graph
    k = g.k
    gc = global_condition(system, Y)
    Yp = gc.perp()
    K = np.vstack([np.eye(k), np.eye(k)])
    cap = intersection_dim(gc.Y, K, 2 * k)
    dimp = Yp.shape[1]
    pil = rank_info(Yp[k:, :]) if dimp else None
    dim_pil = pil.rank if pil else 0
    # P_K Y^perp has dimension rank(a + b) over (a, b) in Y^perp
    pk = rank_info(Yp[:k, :] + Yp[k:, :]) if dimp else None
    margin = pk.margin if pk else np.inf
    return GlobalConditionResult(
        basis_global=(dimp == k and cap == 0),
        dim_Y_perp=dimp, k=k, dim_Y_cap_K=cap,
        infty_applicable=m_is_special(system),
        basis_global_infty=(dimp == k and dim_pil == k),
        dim_Pi_l_Y_perp=dim_pil, margin=margin,
    )
