"""Numerical tolerances with named profiles.

The profile used by default comes from the ``HYPNET_TOLERANCE_PROFILE``
environment variable (``default``, ``strict`` or ``loose``).
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace

ENV_VAR = "HYPNET_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-10        # relative Hermitian defect
    zero_tol: float = 1e-9         # eigenvalue zero band, relative to ||P||
    iso_tol: float = 1e-8          # isotropy / cone tests, relative to max(1, ||P||)
    inv_tol: float = 1e-9          # smallest singular value of M, relative
    eig_imag_tol: float = 1e-8     # imaginary eigenvalue parts, relative
    pd_tol: float = 1e-12          # positive definiteness margin of Q, relative
    coef_tol: float = 1e-10        # pointwise identities on N, M, Q
    proj_tol: float = 1e-9         # positive-part projection residual
    n_samples: int = 64            # Chebyshev points per edge
    positive_trials: int = 200     # random combinations in the positive-part test

    def to_dict(self) -> dict:
        return asdict(self)

    def updated(self, **kw) -> "Tolerances":
        known = {f.name for f in fields(self)}
        bad = set(kw) - known
        if bad:
            raise KeyError(f"unknown tolerance keys: {sorted(bad)}")
        return replace(self, **kw)


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(herm_tol=1e-12, zero_tol=1e-11, iso_tol=1e-10,
                         inv_tol=1e-11, eig_imag_tol=1e-10, coef_tol=1e-12,
                         proj_tol=1e-11, n_samples=128),
    "loose": Tolerances(herm_tol=1e-8, zero_tol=1e-7, iso_tol=1e-6,
                        inv_tol=1e-7, eig_imag_tol=1e-6, coef_tol=1e-8,
                        proj_tol=1e-7),
}


def default_tolerances() -> Tolerances:
    name = os.environ.get(ENV_VAR, "default").strip().lower() or "default"
    if name not in PROFILES:
        raise ValueError(f"{ENV_VAR}={name!r} is not one of {sorted(PROFILES)}")
    return PROFILES[name]
