"""Metric graphs: vertices, oriented edges with lengths and block sizes.

Every vector layout in the package is derived from the edge input order:

* the state vector in C^k stacks edge blocks in edge order;
* the global trace in C^{2k} is (u(0) blocks, then u(l) blocks);
* the vertex trace gamma_v stacks the endpoint blocks of the incident edges in
  edge order, a self-loop contributing its tail block before its head block.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TAIL, HEAD = 0, 1


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: float
    size: int

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Slot:
    """One endpoint block inside a vertex trace."""
    edge: int        # edge index
    end: int         # TAIL (x = 0) or HEAD (x = length)
    iota: int        # -1 at the tail, +1 at the head
    offset: int      # first coordinate inside gamma_v
    size: int


class MetricGraph:
    """Finite directed metric graph; immutable after construction."""

    def __init__(self, vertices: Sequence[str], edges: Sequence[Edge]):
        self._vertices = tuple(vertices)
        self._edges = tuple(edges)
        self._eindex = {e.id: i for i, e in enumerate(self._edges)}
        self._vindex = {v: i for i, v in enumerate(self._vertices)}
        offs = np.cumsum([0] + [e.size for e in self._edges])
        self._offsets = tuple(int(o) for o in offs[:-1])
        self._k = int(offs[-1])
        slots = {v: [] for v in self._vertices}
        for i, e in enumerate(self._edges):
            slots[e.tail].append((i, TAIL))
            slots[e.head].append((i, HEAD))
        layout = {}
        for v, lst in slots.items():
            # sort by edge index; tail before head for loops
            lst.sort()
            out, off = [], 0
            for i, end in lst:
                sz = self._edges[i].size
                out.append(Slot(i, end, -1 if end == TAIL else 1, off, sz))
                off += sz
            layout[v] = tuple(out)
        self._layout = layout

    # basic accessors
    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def k(self) -> int:
        return self._k

    def edge(self, e) -> Edge:
        return self._edges[self.edge_index(e)]

    def edge_index(self, e) -> int:
        if isinstance(e, (int, np.integer)):
            if not 0 <= e < len(self._edges):
                raise GraphError(f"unknown edge index {e}")
            return int(e)
        try:
            return self._eindex[e]
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def _check_vertex(self, v):
        if v not in self._vindex:
            raise GraphError(f"unknown vertex {v!r}")

    def offset(self, e) -> int:
        return self._offsets[self.edge_index(e)]

    def edge_slice(self, e) -> slice:
        i = self.edge_index(e)
        return slice(self._offsets[i], self._offsets[i] + self._edges[i].size)

    def slots(self, v) -> tuple[Slot, ...]:
        self._check_vertex(v)
        return self._layout[v]

    def incident_edges(self, v) -> list[int]:
        return sorted({s.edge for s in self.slots(v)})

    def k_v(self, v) -> int:
        return sum(s.size for s in self.slots(v))

    def degree(self, v) -> int:
        return len(self.slots(v))

    def roles(self, v, e) -> tuple[int, ...]:
        """All incidence values of v on e; (-1, +1) at a self-loop."""
        self._check_vertex(v)
        i = self.edge_index(e)
        return tuple(s.iota for s in self._layout[v] if s.edge == i)

    def incidence(self, v, e, end: int | None = None) -> int:
        """Incidence value iota_ve in {-1, 0, +1}.

        At a self-loop the two endpoint roles differ, so ``end`` (TAIL or
        HEAD) must be given.
        """
        r = self.roles(v, e)
        if not r:
            return 0
        if len(r) == 1:
            if end is not None and r[0] != (-1 if end == TAIL else 1):
                return 0
            return r[0]
        if end is None:
            raise GraphError(f"edge {self.edge(e).id!r} is a self-loop at {v!r}; pass end=TAIL or end=HEAD")
        return -1 if end == TAIL else 1

    def incidence_matrix(self) -> np.ndarray:
        """|V| x |E| matrix with entries iota_ve (self-loops give 0 = -1 + 1)."""
        I = np.zeros((len(self._vertices), len(self._edges)), dtype=int)
        for j, e in enumerate(self._edges):
            I[self._vindex[e.tail], j] -= 1
            I[self._vindex[e.head], j] += 1
        return I

    # index maps
    def global_index(self, e, end: int) -> np.ndarray:
        """Indices of an endpoint block inside the global trace in C^{2k}."""
        s = self.edge_slice(e)
        base = 0 if end == TAIL else self._k
        return np.arange(base + s.start, base + s.stop)

    def vertex_selector(self, v) -> np.ndarray:
        """k_v x 2k 0/1 matrix P_v with gamma_v = P_v gamma."""
        P = np.zeros((self.k_v(v), 2 * self._k))
        for s in self.slots(v):
            idx = self.global_index(s.edge, s.end)
            P[s.offset + np.arange(s.size), idx] = 1.0
        return P

    def vertex_embedding(self, v) -> np.ndarray:
        """k x k_v matrix that zero-pads a vertex vector into C^k.

        At a self-loop both endpoint blocks land on the same edge block and
        add up.
        """
        E = np.zeros((self._k, self.k_v(v)))
        for s in self.slots(v):
            r = self.edge_slice(s.edge)
            E[r, s.offset:s.offset + s.size] += np.eye(s.size)
        return E

    def index_map(self) -> dict:
        return {
            "edges": {e.id: (self._offsets[i], e.size) for i, e in enumerate(self._edges)},
            "vertices": {v: tuple((self._edges[s.edge].id, s.end, s.offset) for s in sl)
                         for v, sl in self._layout.items()},
        }

    def __eq__(self, other):
        return (isinstance(other, MetricGraph) and self._vertices == other._vertices
                and self._edges == other._edges)

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def __repr__(self):
        return f"MetricGraph(|V|={len(self._vertices)}, |E|={len(self._edges)}, k={self._k})"


def build_graph(edges: Iterable, vertices: Sequence[str] | None = None) -> MetricGraph:
    """Validate an edge list and build the graph.

    ``edges`` holds ``Edge`` objects, dicts with keys id/tail/head/length/size,
    or tuples ``(id, tail, head, length, size)``. When ``vertices`` is omitted
    the vertex order is the order of first appearance.
    """
    parsed = []
    for item in edges:
        if isinstance(item, Edge):
            e = item
        elif isinstance(item, dict):
            e = Edge(str(item["id"]), str(item["tail"]), str(item["head"]),
                     float(item["length"]), int(item.get("size", 1)))
        else:
            eid, t, h, ln, sz = item
            e = Edge(str(eid), str(t), str(h), float(ln), int(sz))
        parsed.append(e)
    if not parsed:
        raise GraphError("edge list is empty")
    seen = set()
    for e in parsed:
        if e.id in seen:
            raise GraphError(f"duplicate edge id {e.id!r}")
        seen.add(e.id)
        if not (np.isfinite(e.length) and e.length > 0):
            raise GraphError(f"edge {e.id!r}: length must be positive, got {e.length}")
        if e.size < 1:
            raise GraphError(f"edge {e.id!r}: block size must be >= 1, got {e.size}")
    if vertices is None:
        order = []
        for e in parsed:
            for v in (e.tail, e.head):
                if v not in order:
                    order.append(v)
        vertices = order
    else:
        vertices = [str(v) for v in vertices]
        if len(set(vertices)) != len(vertices):
            raise GraphError("duplicate vertex id")
        vs = set(vertices)
        for e in parsed:
            for v in (e.tail, e.head):
                if v not in vs:
                    raise GraphError(f"edge {e.id!r} references undeclared vertex {v!r}")
    return MetricGraph(vertices, parsed)


def star_graph(J: int, length=1.0, size: int = 2, incoming_first: bool = True) -> MetricGraph:
    """Star with center v0: e1 runs v1 -> v0, e_j runs v0 -> v_j for j >= 2."""
    if J < 1:
        raise GraphError("a star needs at least one edge")
    lengths = np.broadcast_to(np.asarray(length, dtype=float), (J,))
    edges = []
    for j in range(1, J + 1):
        if j == 1 and incoming_first:
            edges.append(Edge("e1", "v1", "v0", float(lengths[0]), size))
        else:
            edges.append(Edge(f"e{j}", "v0", f"v{j}", float(lengths[j - 1]), size))
    return build_graph(edges, ["v0"] + [f"v{j}" for j in range(1, J + 1)])
