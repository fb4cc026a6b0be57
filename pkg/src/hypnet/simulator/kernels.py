"""Stencil kernel selection: compiled extension if importable, else numpy.

Set ``HYPNET_NO_EXT=1`` to force the numpy path.
"""
from __future__ import annotations

import os

import numpy as np


def apply_stencil_numpy(A, B, C, u, out):
    np.einsum("iab,ib->ia", A, u[:-2], out=out)
    out += np.einsum("iab,ib->ia", B, u[1:-1])
    out += np.einsum("iab,ib->ia", C, u[2:])
    return out


def _load():
    if os.environ.get("HYPNET_NO_EXT"):
        return apply_stencil_numpy, "numpy"
    try:
        from ._stencil import apply_stencil as fn
    except ImportError:
        return apply_stencil_numpy, "numpy"
    return fn, "cython"


apply_stencil, BACKEND = _load()
