"""The complete system description: graph, coefficients, boundary subspaces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._linalg import as_matrix
from .coefficients import CoefficientError, EdgeCoefficients, synthesize_symmetrizer
from .graph import MetricGraph
from .tolerances import Tolerances, default_tolerances


class SystemError_(ValueError):
    pass


@dataclass(frozen=True)
class LocalBoundary:
    """Y_v per vertex, each a k_v x m basis (columns span Y_v)."""
    spaces: Mapping[str, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "spaces", {str(v): np.array(as_matrix(B), copy=True)
                                            for v, B in self.spaces.items()})


@dataclass(frozen=True)
class GlobalBoundary:
    """A single Y in C^{2k}, laid out as (u(0) blocks, u(l) blocks)."""
    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", np.array(as_matrix(self.basis), copy=True))


@dataclass
class NetworkSystem:
    graph: MetricGraph
    coefficients: dict
    boundary: LocalBoundary | GlobalBoundary
    tolerances: Tolerances = field(default_factory=default_tolerances)
    name: str = "system"
    notes: list = field(default_factory=list)
    simulation: dict | None = None
    synthesized_Q: tuple = ()

    def __post_init__(self):
        g = self.graph
        coefs = {}
        for e in g.edges:
            if e.id not in self.coefficients:
                raise SystemError_(f"edge {e.id!r}: no coefficients")
            c = self.coefficients[e.id]
            if not isinstance(c, EdgeCoefficients):
                c = EdgeCoefficients(**c)
            if c.size != e.size:
                raise SystemError_(f"edge {e.id!r}: coefficient size {c.size} != block size {e.size}")
            coefs[e.id] = c
        extra = set(self.coefficients) - {e.id for e in g.edges}
        if extra:
            raise SystemError_(f"coefficients given for unknown edges {sorted(extra)}")
        synth = list(self.synthesized_Q)
        for eid, c in coefs.items():
            if c.Q is None:
                try:
                    coefs[eid] = c.with_Q(synthesize_symmetrizer(c.M, self.tolerances))
                except CoefficientError as exc:
                    raise SystemError_(f"edge {eid!r}: no Q given and synthesis failed: {exc}") from exc
                synth.append(eid)
        self.coefficients = coefs
        self.synthesized_Q = tuple(synth)
        b = self.boundary
        if isinstance(b, LocalBoundary):
            missing = [v for v in g.vertices if v not in b.spaces]
            if missing:
                raise SystemError_(f"missing boundary space Y_v for vertices {missing}")
            extra = set(b.spaces) - set(g.vertices)
            if extra:
                raise SystemError_(f"boundary spaces given for unknown vertices {sorted(extra)}")
            fixed = {}
            for v in g.vertices:
                B = as_matrix(b.spaces[v], g.k_v(v))
                if B.shape[0] != g.k_v(v):
                    raise SystemError_(f"vertex {v!r}: Y_v vectors have length {B.shape[0]}, expected k_v = {g.k_v(v)}")
                fixed[v] = B
            self.boundary = LocalBoundary(fixed)
        elif isinstance(b, GlobalBoundary):
            B = as_matrix(b.basis, 2 * g.k)
            if B.shape[0] != 2 * g.k:
                raise SystemError_(f"global Y vectors have length {B.shape[0]}, expected 2k = {2 * g.k}")
            self.boundary = GlobalBoundary(B)
        else:
            raise SystemError_("boundary must be LocalBoundary or GlobalBoundary")

    @property
    def is_local(self) -> bool:
        return isinstance(self.boundary, LocalBoundary)

    def Y(self, v) -> np.ndarray:
        return self.boundary.spaces[v]
