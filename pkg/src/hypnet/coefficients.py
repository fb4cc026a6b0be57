"""Per-edge coefficient fields M, N, Q as matrix polynomials of degree <= 3."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import opnorm
from .tolerances import Tolerances, default_tolerances

MAX_DEGREE = 3


class CoefficientError(ValueError):
    pass


class MatrixPolynomial:
    """A(x) = sum_j A_j x^j with square coefficient matrices A_0..A_d."""

    def __init__(self, coeffs):
        C = np.asarray(coeffs)
        if C.ndim == 0:
            C = C.reshape(1, 1, 1)
        elif C.ndim == 2:
            C = C[None]
        if C.ndim != 3 or C.shape[1] != C.shape[2]:
            raise CoefficientError(f"polynomial coefficients must be square matrices, got shape {C.shape}")
        if C.dtype.kind not in "fc":
            C = C.astype(float)
        # trim trailing zero coefficients, keep at least A_0
        d = C.shape[0]
        while d > 1 and not np.any(C[d - 1]):
            d -= 1
        C = C[:d]
        if np.iscomplexobj(C) and not np.any(C.imag):
            C = C.real
        if C.shape[0] - 1 > MAX_DEGREE:
            raise CoefficientError(f"degree {C.shape[0] - 1} exceeds {MAX_DEGREE}")
        self._c = C.copy()
        self._c.setflags(write=False)

    @classmethod
    def constant(cls, A):
        A = np.atleast_2d(np.asarray(A))
        return cls(A[None])

    @classmethod
    def fit(cls, func, length: float, degree: int = MAX_DEGREE, n: int = 64):
        """Least-squares fit of a matrix-valued function on [0, length]."""
        x = 0.5 * length * (1 - np.cos(np.pi * (np.arange(n) + 0.5) / n))
        vals = np.array([np.atleast_2d(func(xi)) for xi in x])
        V = np.vander(x, degree + 1, increasing=True)
        flat = vals.reshape(n, -1)
        coef, *_ = np.linalg.lstsq(V, flat, rcond=None)
        return cls(coef.reshape((degree + 1,) + vals.shape[1:]))

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.shape[0] - 1

    @property
    def size(self) -> int:
        return self._c.shape[1]

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self._c)

    def __call__(self, x):
        """Evaluate at a scalar (returns n x n) or an array of points (m x n x n)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + self._c.shape[1:], dtype=self._c.dtype)
        for j in range(self.degree, -1, -1):  # Horner
            out = out * x[..., None, None] + self._c[j]
        return out

    def derivative(self) -> "MatrixPolynomial":
        if self.degree == 0:
            return MatrixPolynomial(np.zeros_like(self._c))
        d = np.arange(1, self.degree + 1)[:, None, None]
        return MatrixPolynomial(self._c[1:] * d)

    def __matmul__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        a, b = self._c, other._c
        out = np.zeros((a.shape[0] + b.shape[0] - 1,) + a.shape[1:], dtype=np.result_type(a, b))
        for i in range(a.shape[0]):
            for j in range(b.shape[0]):
                out[i + j] += a[i] @ b[j]
        # products may exceed MAX_DEGREE; keep as raw product
        p = MatrixPolynomial.__new__(MatrixPolynomial)
        d = out.shape[0]
        while d > 1 and not np.any(out[d - 1]):
            d -= 1
        p._c = out[:d]
        p._c.setflags(write=False)
        return p

    def adjoint(self) -> "MatrixPolynomial":
        return MatrixPolynomial(np.conj(np.swapaxes(self._c, 1, 2)))

    def __eq__(self, other):
        return isinstance(other, MatrixPolynomial) and self._c.shape == other._c.shape and np.array_equal(self._c, other._c)

    def __repr__(self):
        return f"MatrixPolynomial(degree={self.degree}, size={self.size})"


def as_poly(A) -> MatrixPolynomial:
    if A is None or isinstance(A, MatrixPolynomial):
        return A
    return MatrixPolynomial(A)


@dataclass(frozen=True)
class EdgeCoefficients:
    M: MatrixPolynomial
    N: MatrixPolynomial
    Q: MatrixPolynomial | None = None

    def __post_init__(self):
        object.__setattr__(self, "M", as_poly(self.M))
        object.__setattr__(self, "N", as_poly(self.N) if self.N is not None
                           else MatrixPolynomial(np.zeros((1, self.M.size, self.M.size))))
        object.__setattr__(self, "Q", as_poly(self.Q))
        n = self.M.size
        for name in ("N", "Q"):
            p = getattr(self, name)
            if p is not None and p.size != n:
                raise CoefficientError(f"{name} has size {p.size}, M has size {n}")

    @property
    def size(self) -> int:
        return self.M.size

    def with_Q(self, Q) -> "EdgeCoefficients":
        return EdgeCoefficients(self.M, self.N, as_poly(Q))

    @property
    def QM(self) -> MatrixPolynomial:
        return self.Q @ self.M

    @property
    def QN(self) -> MatrixPolynomial:
        return self.Q @ self.N

    @property
    def dQM(self) -> MatrixPolynomial:
        """(QM)' by the product rule Q'M + QM'."""
        a = self.Q.derivative() @ self.M
        b = self.Q @ self.M.derivative()
        c = np.zeros((max(a.degree, b.degree) + 1, self.size, self.size), dtype=np.result_type(a.coeffs, b.coeffs))
        c[:a.degree + 1] += a.coeffs
        c[:b.degree + 1] += b.coeffs
        p = MatrixPolynomial.__new__(MatrixPolynomial)
        p._c = c
        return p


def sample_points(length: float, n: int = 64) -> np.ndarray:
    """n Chebyshev points on (0, length) plus both endpoints, ascending."""
    x = 0.5 * length * (1 - np.cos(np.pi * (np.arange(n) + 0.5) / n))
    return np.concatenate([[0.0], x, [float(length)]])


def eval_coeffs(coef: EdgeCoefficients, x: float, length: float | None = None):
    """Return M(x), N(x), Q(x), (QM)'(x) with the derivative taken exactly."""
    if length is not None and not (-1e-14 * length <= x <= length * (1 + 1e-14)):
        raise CoefficientError(f"x = {x} outside [0, {length}]")
    if coef.Q is None:
        raise CoefficientError("edge has no symmetrizer Q")
    return coef.M(x), coef.N(x), coef.Q(x), coef.dQM(x)


@dataclass
class EdgeAssumptions:
    edge: str
    M_invertible: bool
    Q_hermitian: bool
    QM_hermitian: bool
    Q_uniformly_positive: bool
    q: float                       # min eigenvalue of Q over samples
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.M_invertible and self.Q_hermitian and self.QM_hermitian and self.Q_uniformly_positive

    def failures(self) -> list[str]:
        return [n for n in ("M_invertible", "Q_hermitian", "QM_hermitian", "Q_uniformly_positive")
                if not getattr(self, n)]


@dataclass
class AssumptionReport:
    edges: list[EdgeAssumptions]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.edges)

    @property
    def q(self) -> float:
        return min(e.q for e in self.edges) if self.edges else np.inf

    def describe_failures(self) -> list[str]:
        out = []
        for e in self.edges:
            for f in e.failures():
                w = e.witnesses.get(f, {})
                out.append(f"edge {e.edge}: {f} fails at x={w.get('x', float('nan')):.6g} "
                           f"(value {w.get('value', float('nan')):.3e})")
        return out

    def to_dict(self) -> dict:
        return {"ok": self.ok, "q": self.q,
                "edges": [{"edge": e.edge, "ok": e.ok, "M_invertible": e.M_invertible,
                           "Q_hermitian": e.Q_hermitian, "QM_hermitian": e.QM_hermitian,
                           "Q_uniformly_positive": e.Q_uniformly_positive, "q": e.q,
                           "witnesses": e.witnesses} for e in self.edges]}


def _det_roots(M: MatrixPolynomial, length: float) -> np.ndarray:
    """Real zeros of det M(x) in [0, length]; they fall between samples otherwise."""
    D = M.degree * M.size
    if D == 0:
        return np.zeros(0)
    x = sample_points(length, 2 * D + 2)
    d = np.linalg.det(M(x))
    fit = np.polynomial.Chebyshev.fit(x, d, D, domain=[0.0, length])
    r = fit.roots()
    r = r[np.abs(r.imag) <= 1e-6 * max(length, 1.0)].real
    return np.clip(r[(r >= -1e-9 * length) & (r <= length * (1 + 1e-9))], 0.0, length)


def check_edge(edge_id: str, coef: EdgeCoefficients, length: float,
               tol: Tolerances | None = None) -> EdgeAssumptions:
    tol = default_tolerances() if tol is None else tol
    if coef.Q is None:
        raise CoefficientError(f"edge {edge_id}: no symmetrizer Q (supply one or synthesize)")
    x = np.union1d(sample_points(length, tol.n_samples), _det_roots(coef.M, length))
    M, Q = coef.M(x), coef.Q(x)
    QM = Q @ M
    sv = np.linalg.svd(M, compute_uv=False)
    Mnorm = sv[:, 0]
    inv_margin = sv[:, -1] - tol.inv_tol * Mnorm
    qdef = np.linalg.norm(Q - np.conj(np.swapaxes(Q, 1, 2)), ord=2, axis=(1, 2))
    qscale = np.maximum(np.linalg.norm(Q, ord=2, axis=(1, 2)), 1e-300)
    qmdef = np.linalg.norm(QM - np.conj(np.swapaxes(QM, 1, 2)), ord=2, axis=(1, 2))
    qmscale = np.maximum(np.linalg.norm(QM, ord=2, axis=(1, 2)), 1e-300)
    lam = np.linalg.eigvalsh(0.5 * (Q + np.conj(np.swapaxes(Q, 1, 2))))[:, 0]
    w = {}
    i = int(np.argmin(inv_margin))
    w["M_invertible"] = {"x": float(x[i]), "value": float(sv[i, -1])}
    i = int(np.argmax(qdef / qscale))
    w["Q_hermitian"] = {"x": float(x[i]), "value": float(qdef[i])}
    i = int(np.argmax(qmdef / qmscale))
    w["QM_hermitian"] = {"x": float(x[i]), "value": float(qmdef[i])}
    i = int(np.argmin(lam))
    w["Q_uniformly_positive"] = {"x": float(x[i]), "value": float(lam[i])}
    return EdgeAssumptions(
        edge=edge_id,
        M_invertible=bool(np.all(inv_margin > 0)),
        Q_hermitian=bool(np.all(qdef <= tol.herm_tol * qscale)),
        QM_hermitian=bool(np.all(qmdef <= tol.herm_tol * qmscale)),
        Q_uniformly_positive=bool(np.all(lam > tol.pd_tol * qscale)),
        q=float(lam.min()),
        witnesses=w,
    )


def check_assumptions(system, tol: Tolerances | None = None) -> AssumptionReport:
    """Pointwise check of invertibility and symmetrizer conditions on every edge."""
    tol = getattr(system, "tolerances", None) if tol is None else tol
    out = []
    for e in system.graph.edges:
        out.append(check_edge(e.id, system.coefficients[e.id], e.length, tol))
    return AssumptionReport(out)


def synthesize_symmetrizer(M, tol: Tolerances | None = None) -> np.ndarray:
    """Q = S* S for a constant M = S^{-1} D S with real nonzero eigenvalues."""
    tol = default_tolerances() if tol is None else tol
    if isinstance(M, MatrixPolynomial):
        if not M.is_constant:
            raise CoefficientError("symmetrizer synthesis needs a constant M; supply Q for variable M")
        M = M.coeffs[0]
    M = np.atleast_2d(np.asarray(M))
    nrm = opnorm(M)
    lam, V = np.linalg.eig(M)
    if np.any(np.abs(lam.imag) > tol.eig_imag_tol * nrm):
        raise CoefficientError(f"M has non-real eigenvalues {lam[np.abs(lam.imag) > tol.eig_imag_tol * nrm]}; "
                               "the system is not hyperbolic")
    if np.any(np.abs(lam) <= tol.inv_tol * nrm):
        raise CoefficientError("M has a zero eigenvalue")
    if np.linalg.cond(V) > 1.0 / (tol.eig_imag_tol):
        raise CoefficientError("M is defective (eigenvector matrix is numerically singular)")
    S = np.linalg.inv(V)
    Q = S.conj().T @ S
    Q = 0.5 * (Q + Q.conj().T)
    if np.isrealobj(M) and np.allclose(Q.imag if np.iscomplexobj(Q) else 0, 0, atol=1e-14 * opnorm(Q)):
        Q = np.real(Q)
    return Q
