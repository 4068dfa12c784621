"""The double graph: black diagonals, white diagonals and their duality.

Cells and their canonical order
-------------------------------
* vertices (0-cells): the surface corners, sorted; key ``v:x:y:z``
* edges (1-cells): ``2F`` of them. Edge ``s`` is the black (primal) diagonal
  ``x -> x'`` of surfel ``s``; edge ``F + s`` is its white (dual) diagonal
  ``y -> y'``. Key ``e:x:y:z>x':y':z'`` (tail then head).
* faces (2-cells): one per vertex ``v``, the cycle of opposite-colour
  diagonals around it; key ``f:x:y:z``.

The duality on edges is a quarter turn: ``(x, x')* = (y, y')`` and
``(y, y')* = (x', x)``. Face cycles run counterclockwise around their
vertex, so ``(v, w)*`` is always traversed positively by the face ``v*``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, InvalidConfiguration
from .surface import SurfelSurface, is_black, vertex_fans

# opposite diagonal seen from position k of a cycle: (edge kind, sign)
# kind 0 = primal (c0 -> c2), 1 = dual (c1 -> c3)
_OPPOSITE = {0: (1, 1), 1: (0, -1), 2: (1, -1), 3: (0, 1)}
# diagonal through position k, oriented away from it: (kind, sign)
_THROUGH = {0: (0, 1), 1: (1, 1), 2: (0, -1), 3: (1, -1)}


def vertex_key(p) -> str:
    return "v:" + ":".join(str(int(c)) for c in p)


def face_key(p) -> str:
    return "f:" + ":".join(str(int(c)) for c in p)


def _pt(p) -> str:
    return ":".join(str(int(c)) for c in p)


@dataclass(frozen=True, eq=False)
class DoubleGraph:
    """Combinatorial double of a bicoloured quad surface.

    ``quads[s]`` lists the vertex indices of surfel ``s`` counterclockwise,
    starting at a black vertex. Geometry is optional: ``surfels[s]`` is the
    originating :class:`~surfel_riemann.surface.Surfel` or ``None`` for
    surfels created by flips.
    """

    vertices: tuple
    quads: np.ndarray
    surfel_labels: tuple
    surfels: tuple
    fans: tuple

    @classmethod
    def from_quads(cls, vertices, quads, surfel_labels, surfels=None) -> "DoubleGraph":
        quads = np.asarray(quads, dtype=np.int64).reshape(-1, 4)
        vertices = tuple(tuple(int(c) for c in v) for v in vertices)
        colour = np.full(len(vertices), -1)
        for q in quads:
            for k in range(4):
                want = k % 2
                if colour[q[k]] not in (-1, want):
                    raise InvalidConfiguration(
                        f"vertex {vertices[q[k]]} used with both colours"
                    )
                colour[q[k]] = want
        if np.any(colour < 0):
            raise InvalidConfiguration("vertex not used by any surfel")
        fans = tuple(vertex_fans(quads, len(vertices), vertices))
        if surfels is None:
            surfels = (None,) * len(quads)
        quads.setflags(write=False)
        return cls(vertices, quads, tuple(surfel_labels), tuple(surfels), fans)

    # -- sizes and keys -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_surfels(self) -> int:
        return len(self.quads)

    @property
    def n_edges(self) -> int:
        return 2 * len(self.quads)

    @property
    def n_faces(self) -> int:
        return len(self.vertices)

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def black(self) -> np.ndarray:
        out = np.zeros(self.n_vertices, dtype=bool)
        out[self.quads[:, 0]] = True
        out[self.quads[:, 2]] = True
        return out

    @cached_property
    def edges(self) -> np.ndarray:
        """``(2F, 2)`` array of (tail, head) vertex indices."""
        q = self.quads
        return np.concatenate([q[:, [0, 2]], q[:, [1, 3]]])

    def is_primal(self, e: int) -> bool:
        return e < self.n_surfels

    def dual_edge(self, e: int) -> int:
        return (e + self.n_surfels) % self.n_edges

    def edge_surfel(self, e: int) -> int:
        return e % self.n_surfels

    def vertex_keys(self) -> list:
        return [vertex_key(v) for v in self.vertices]

    def edge_keys(self) -> list:
        V = self.vertices
        return [f"e:{_pt(V[a])}>{_pt(V[b])}" for a, b in self.edges]

    def face_keys(self) -> list:
        return [face_key(v) for v in self.vertices]

    def cell_keys(self, k: int) -> list:
        if k == 0:
            return self.vertex_keys()
        if k == 1:
            return self.edge_keys()
        if k == 2:
            return self.face_keys()
        raise DimensionError(f"no {k}-cells in the double graph")

    def n_cells(self, k: int) -> int:
        return (self.n_vertices, self.n_edges, self.n_faces)[k]

    # -- faces and incidence --------------------------------------------

    @cached_property
    def face_cycles(self) -> tuple:
        """Per vertex ``v``, the signed edges ``(e, +-1)`` bounding ``v*``."""
        F = self.n_surfels
        out = []
        for fan, _closed in self.fans:
            cyc = []
            for s, k in fan:
                kind, sign = _OPPOSITE[k]
                cyc.append((s + kind * F, sign))
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def face_closed(self) -> np.ndarray:
        """True for faces whose boundary is a closed cycle (interior vertices)."""
        return np.array([closed for _fan, closed in self.fans], dtype=bool)

    @cached_property
    def boundary_vertices(self) -> np.ndarray:
        return np.flatnonzero(~self.face_closed)

    @cached_property
    def interior_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.face_closed)

    def through_edge(self, s: int, k: int) -> tuple:
        """Diagonal of surfel ``s`` through its ``k``-th corner: ``(e, sign)``.

        ``sign`` is +1 when the stored orientation leaves that corner.
        """
        kind, sign = _THROUGH[k]
        return s + kind * self.n_surfels, sign

    @cached_property
    def d0(self) -> sp.csr_matrix:
        """Coboundary on 0-cochains, ``(2F, V)``."""
        E = self.n_edges
        rows = np.repeat(np.arange(E), 2)
        cols = self.edges.ravel()
        vals = np.tile([-1.0, 1.0], E)
        return sp.csr_matrix((vals, (rows, cols)), shape=(E, self.n_vertices))

    @cached_property
    def d1(self) -> sp.csr_matrix:
        """Coboundary on 1-cochains, ``(V, 2F)``: circulation around each face."""
        rows, cols, vals = [], [], []
        for v, cyc in enumerate(self.face_cycles):
            for e, sign in cyc:
                rows.append(v)
                cols.append(e)
                vals.append(float(sign))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_faces, self.n_edges))

    # -- graphs ---------------------------------------------------------

    def primal_edges(self) -> np.ndarray:
        return self.edges[: self.n_surfels]

    def dual_edges(self) -> np.ndarray:
        return self.edges[self.n_surfels:]

    def euler_characteristic(self) -> int:
        # Euler characteristic of the quad complex
        edgels = set()
        for q in self.quads:
            for j in range(4):
                a, b = int(q[j]), int(q[(j + 1) % 4])
                edgels.add((min(a, b), max(a, b)))
        return self.n_vertices - len(edgels) + self.n_surfels

    def dump(self) -> str:
        """Deterministic text listing of the two graphs and the faces."""
        keys = self.vertex_keys()
        lines = []
        for title, colour in (("Gamma", True), ("Gamma*", False)):
            lines.append(f"# {title}")
            adj: dict[str, list[str]] = {}
            for a, b in self.edges:
                if self.black[a] != colour:
                    continue
                adj.setdefault(keys[a], []).append(keys[b])
                adj.setdefault(keys[b], []).append(keys[a])
            for v in sorted(adj):
                lines.append(f"{v}: " + " ".join(sorted(adj[v])))
        lines.append("# Lambda faces")
        ekeys = self.edge_keys()
        fkeys = self.face_keys()
        for v, cyc in enumerate(self.face_cycles):
            tag = "" if self.face_closed[v] else " (open)"
            body = " ".join(("+" if s > 0 else "-") + ekeys[e] for e, s in cyc)
            lines.append(f"{fkeys[v]}{tag}: {body}")
        return "\n".join(lines) + "\n"


def build_double_graph(surface: SurfelSurface, coloring: dict | None = None) -> DoubleGraph:
    """Double graph of a surfel surface.

    ``coloring`` defaults to the parity colouring. Passing the inverted
    colouring swaps the roles of the two graphs.
    """
    cycles = np.asarray(surface.cycles)
    if coloring is not None:
        first = surface.corners[int(cycles[0, 0])]
        swapped = coloring[first] != "black"
        for c in surface.corners:
            if (coloring[c] == "black") != (is_black(c) != swapped):
                raise InvalidConfiguration(f"colouring is not a bicolouring at {c}")
        if swapped:
            cycles = np.roll(cycles, -1, axis=1)
    labels = tuple(s.label for s in surface.surfels)
    return DoubleGraph.from_quads(surface.corners, cycles, labels, surface.surfels)


def boundary(graph: DoubleGraph, chain, k: int) -> np.ndarray:
    """Boundary of a ``k``-chain given by its coefficients on the ``k``-cells.

    The boundary of vertices is the zero map.
    """
    chain = np.asarray(chain)
    if k == 0:
        return np.zeros(0, dtype=chain.dtype)
    if k == 1:
        return graph.d0.T @ chain
    if k == 2:
        return graph.d1.T @ chain
    raise DimensionError(f"boundary undefined on {k}-chains")
