"""Indefinite Hermitian forms q(xi) = P xi . conj(xi).

Signature, isotropy index, a constructive maximal totally isotropic basis and
cone classification of subspaces.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import as_matrix, opnorm, rank
from .tolerances import Tolerances, default_tolerances


class FormError(ValueError):
    pass


NULL, NONPOSITIVE, NONNEGATIVE, INDEFINITE = "null", "nonpositive", "nonnegative", "indefinite"


@dataclass(frozen=True)
class ConeClass:
    kind: str
    R: np.ndarray = field(repr=False)
    lam_min: float
    lam_max: float
    tol: float

    @property
    def is_null(self) -> bool:
        return self.kind == NULL

    @property
    def is_nonpositive(self) -> bool:
        return self.kind in (NULL, NONPOSITIVE)

    @property
    def is_nonnegative(self) -> bool:
        return self.kind in (NULL, NONNEGATIVE)

    def evidence(self) -> dict:
        return {"kind": self.kind, "lambda_min": self.lam_min, "lambda_max": self.lam_max,
                "norm": float(opnorm(self.R)), "tol": self.tol}


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    k_minus: int
    k_plus: int


def _tol(tol):
    return default_tolerances() if tol is None else tol


def check_hermitian(P, tol: Tolerances | None = None) -> np.ndarray:
    tol = _tol(tol)
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise FormError(f"form matrix must be square, got shape {P.shape}")
    nrm = opnorm(P)
    if opnorm(P - P.conj().T) > tol.herm_tol * max(nrm, 1e-300):
        raise FormError("form matrix is not Hermitian within herm_tol")
    return 0.5 * (P + P.conj().T)


def spectrum(P, tol: Tolerances | None = None) -> Spectrum:
    """Ascending eigen-decomposition with the zero band enforced."""
    tol = _tol(tol)
    H = check_hermitian(P, tol)
    n = H.shape[0]
    if n == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0)), 0, 0)
    lam, U = np.linalg.eigh(H)
    band = tol.zero_tol * opnorm(H)
    if np.any(np.abs(lam) <= band):
        raise FormError(f"form matrix is numerically singular (|lambda| <= {band:.3e})")
    km = int(np.sum(lam < -band))
    return Spectrum(lam, U, km, n - km)


def signature(P, tol: Tolerances | None = None) -> tuple[int, int]:
    s = spectrum(P, tol)
    return s.k_minus, s.k_plus


def isotropy_index(P, tol: Tolerances | None = None) -> int:
    km, kp = signature(P, tol)
    return min(km, kp)


def max_totally_isotropic_basis(P, tol: Tolerances | None = None, signs=None) -> np.ndarray:
    """Basis U_i = u_i + a_i u_{k_-+i}, a_i = sqrt(-lam_i / lam_{k_-+i}).

    ``signs`` (length kappa, entries +-1 or unit complex numbers) selects a
    member of the family of maximal isotropic subspaces; default all +1.
    """
    tol = _tol(tol)
    s = spectrum(P, tol)
    kappa = min(s.k_minus, s.k_plus)
    n = len(s.eigenvalues)
    if kappa == 0:
        return np.zeros((n, 0), dtype=s.eigenvectors.dtype)
    lam, U = s.eigenvalues, s.eigenvectors
    km = s.k_minus
    if signs is None:
        signs = np.ones(kappa)
    signs = np.asarray(signs)
    cols = []
    for i in range(kappa):
        a = np.sqrt(-lam[i] / lam[km + i])
        cols.append(U[:, i] + signs[i] * a * U[:, km + i])
    B = np.column_stack(cols)
    H = check_hermitian(P, tol)
    res = opnorm(B.conj().T @ H @ B)
    if res > tol.iso_tol * max(1.0, opnorm(H)) * max(1.0, opnorm(B) ** 2):
        raise FormError(f"isotropic construction failed: residual {res:.3e}")
    return B


def negative_eigenspace(P, tol: Tolerances | None = None) -> np.ndarray:
    s = spectrum(P, tol)
    return s.eigenvectors[:, :s.k_minus]


def positive_eigenspace(P, tol: Tolerances | None = None) -> np.ndarray:
    s = spectrum(P, tol)
    return s.eigenvectors[:, s.k_minus:]


def max_nonpositive_dim(P, tol: Tolerances | None = None) -> int:
    return signature(P, tol)[0]


def classify_subspace(P, B, tol: Tolerances | None = None) -> ConeClass:
    """Sign class of the form restricted to span(B) (B need not be orthonormal).

    The restriction R = B* P B is evaluated on an orthonormalized basis so
    the thresholds do not depend on the scaling of the user's vectors.
    """
    tol = _tol(tol)
    P = np.asarray(P)
    n = P.shape[0]
    B = as_matrix(B, n)
    if B.shape[0] != n:
        raise FormError(f"basis has {B.shape[0]} rows, form is {n} x {n}")
    itol = tol.iso_tol * max(1.0, opnorm(P))
    if B.shape[1] == 0 or rank(B) == 0:
        return ConeClass(NULL, np.zeros((0, 0)), 0.0, 0.0, itol)
    Ub, s, _ = np.linalg.svd(B, full_matrices=False)
    r = rank(B)
    Ub = Ub[:, :r]
    R = Ub.conj().T @ P @ Ub
    R = 0.5 * (R + R.conj().T)
    lam = np.linalg.eigvalsh(R)
    lo, hi = float(lam[0]), float(lam[-1])
    if opnorm(R) <= itol:
        kind = NULL
    elif hi <= itol:
        kind = NONPOSITIVE
    elif lo >= -itol:
        kind = NONNEGATIVE
    else:
        kind = INDEFINITE
    return ConeClass(kind, R, lo, hi, itol)


def form_value(P, xi) -> float:
    xi = np.asarray(xi)
    return float(np.real(np.vdot(xi, np.asarray(P) @ xi)))
