"""Small dense linear-algebra helpers shared by the form and boundary code.

Ranks use the singular-value threshold ``dim * eps * sigma_max``; every rank
decision also reports a margin so floating-point verdicts can be audited.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RankInfo:
    rank: int
    threshold: float
    margin: float  # distance of the decisive singular value from the threshold
    singular_values: np.ndarray


def as_matrix(B, n: int | None = None) -> np.ndarray:
    """Coerce a basis to a 2-D array; an empty basis becomes an ``n x 0`` array."""
    A = np.asarray(B)
    if A.size == 0:
        if n is None:
            n = A.shape[0] if A.ndim == 2 else 0
        dtype = A.dtype if A.dtype.kind in "fc" else float
        return np.zeros((n, 0), dtype=dtype)
    if A.ndim == 1:
        A = A[:, None]
    if A.dtype.kind not in "fc":
        A = A.astype(float)
    return A


def _real_if_exact(A: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(A) and not np.any(A.imag):
        return A.real.copy()
    return A


def rank_info(A, scale: float | None = None) -> RankInfo:
    A = as_matrix(A)
    if A.shape[0] == 0 or A.shape[1] == 0:
        return RankInfo(0, 0.0, np.inf, np.zeros(0))
    s = np.linalg.svd(A, compute_uv=False)
    smax = s[0] if scale is None else max(scale, s[0])
    thr = max(A.shape) * EPS * smax
    r = int(np.sum(s > thr))
    kept = s[r - 1] - thr if r > 0 else np.inf
    dropped = thr - s[r] if r < len(s) else np.inf
    return RankInfo(r, thr, float(min(kept, dropped)), s)


def rank(A) -> int:
    return rank_info(A).rank


def orth(B, n: int | None = None) -> np.ndarray:
    """Orthonormal basis of the column space. Real input stays real."""
    A = _real_if_exact(as_matrix(B, n))
    if A.shape[1] == 0:
        return A
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    thr = max(A.shape) * EPS * s[0] if s.size else 0.0
    r = int(np.sum(s > thr))
    return U[:, :r]


def complement(B, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement in C^n (or R^n)."""
    A = _real_if_exact(as_matrix(B, n))
    if A.shape[1] == 0:
        return np.eye(n, dtype=A.dtype)
    U, s, _ = np.linalg.svd(A, full_matrices=True)
    thr = max(A.shape) * EPS * s[0] if s.size else 0.0
    r = int(np.sum(s > thr))
    return U[:, r:]


def projector(B, n: int) -> np.ndarray:
    U = orth(B, n)
    return U @ U.conj().T


def projection_residual(X, B, n: int) -> float:
    """Largest relative distance of the columns of X from span(B)."""
    X = as_matrix(X, n)
    if X.shape[1] == 0:
        return 0.0
    U = orth(B, n)
    R = X - U @ (U.conj().T @ X)
    norms = np.maximum(np.linalg.norm(X, axis=0), 1.0)
    return float(np.max(np.linalg.norm(R, axis=0) / norms))


def subspace_distance(B1, B2, n: int) -> float:
    """Mutual projection residual; zero iff the spans coincide."""
    U1, U2 = orth(B1, n), orth(B2, n)
    if U1.shape[1] != U2.shape[1]:
        return np.inf
    return max(projection_residual(U1, U2, n), projection_residual(U2, U1, n))


def intersection_dim(B1, B2, n: int) -> int:
    """dim(span B1 ∩ span B2) = dim B1 + dim B2 - dim(B1 + B2)."""
    U1, U2 = orth(B1, n), orth(B2, n)
    return U1.shape[1] + U2.shape[1] - rank(np.hstack([U1, U2]))


def hermitian_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def opnorm(A) -> float:
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def real_span_rank(B) -> int:
    """rank([Re B | Im B]); equals dim span B iff the span is conjugation-closed."""
    A = as_matrix(B)
    if A.shape[1] == 0:
        return 0
    return rank(np.hstack([A.real, A.imag]))
