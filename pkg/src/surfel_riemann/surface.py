"""Surfel complexes extracted from voxel sets.

A voxel ``(x, y, z)`` is the unit cube ``[x, x+1] x [y, y+1] x [z, z+1]``, so
every corner of the surface sits on the integer lattice and the two colour
classes of corners are simply the parity classes of ``x + y + z`` (even is
black, odd is white).

Each surfel is oriented counterclockwise when seen from its outward normal
(the side away from the owning voxel), and its corner cycle
``(x, y, x', y')`` starts at the lexicographically smallest black corner.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EmptyInput, NonManifoldEdge, NonManifoldVertex

AXES = "XYZ"


class Surfel(NamedTuple):
    """Face of ``voxel`` orthogonal to ``axis`` (0, 1, 2) on side ``sign`` (+1/-1)."""

    voxel: tuple
    axis: int
    sign: int

    @property
    def face(self) -> str:
        return ("+" if self.sign > 0 else "-") + AXES[self.axis]

    @property
    def label(self) -> str:
        x, y, z = self.voxel
        return f"s:{x}:{y}:{z}:{self.face}"

    @property
    def outward(self) -> np.ndarray:
        n = np.zeros(3)
        n[self.axis] = self.sign
        return n

    @property
    def center(self) -> np.ndarray:
        c = np.asarray(self.voxel, dtype=float) + 0.5
        c[self.axis] += 0.5 * self.sign
        return c

    @classmethod
    def from_face(cls, voxel, face: str) -> "Surfel":
        face = face.strip().replace("−", "-")
        if len(face) != 2 or face[0] not in "+-" or face[1].upper() not in AXES:
            raise ValueError(f"bad face tag {face!r}")
        return cls(tuple(int(c) for c in voxel), AXES.index(face[1].upper()),
                   1 if face[0] == "+" else -1)

    @classmethod
    def from_label(cls, label: str) -> "Surfel":
        tag, x, y, z, face = label.split(":")
        if tag != "s":
            raise ValueError(f"not a surfel label: {label!r}")
        return cls.from_face((int(x), int(y), int(z)), face)


def is_black(corner) -> bool:
    return (corner[0] + corner[1] + corner[2]) % 2 == 0


def surfel_corners(surfel: Surfel) -> list[tuple]:
    """Corners counterclockwise as seen from the outward normal, unrotated."""
    a = surfel.axis
    b, c = (a + 1) % 3, (a + 2) % 3
    offsets = [(0, 0), (1, 0), (1, 1), (0, 1)]
    if surfel.sign < 0:
        offsets = offsets[::-1]
    base = list(surfel.voxel)
    if surfel.sign > 0:
        base[a] += 1
    out = []
    for ob, oc in offsets:
        p = list(base)
        p[b] += ob
        p[c] += oc
        out.append(tuple(p))
    return out


def oriented_cycle(surfel: Surfel) -> tuple:
    """Corner cycle ``(x, y, x', y')`` with ``x`` the smallest black corner."""
    cs = surfel_corners(surfel)
    blacks = [i for i in range(4) if is_black(cs[i])]
    start = min(blacks, key=lambda i: cs[i])
    return tuple(cs[(start + j) % 4] for j in range(4))


class EulerCounts(NamedTuple):
    V: int
    E: int
    F: int
    chi: int
    genus: int | None
    boundary_edgels: int

    @property
    def closed(self) -> bool:
        return self.boundary_edgels == 0


@dataclass(frozen=True, eq=False)
class SurfelSurface:
    """Cellular complex of corners, edgels and surfels.

    ``cycles[s]`` holds corner indices of surfel ``s`` in oriented order and
    ``edgels`` maps a sorted corner-index pair to the surfels containing it.
    Instances are immutable once built; use :func:`extract_surface` or
    :func:`surface_from_surfels` to construct one.
    """

    surfels: tuple
    corners: tuple
    cycles: np.ndarray
    edgels: dict
    dropped_components: int = 0
    _corner_index: dict = field(default_factory=dict, repr=False)

    @property
    def n_corners(self) -> int:
        return len(self.corners)

    @property
    def n_edgels(self) -> int:
        return len(self.edgels)

    @property
    def n_surfels(self) -> int:
        return len(self.surfels)

    @property
    def corner_index(self) -> dict:
        return self._corner_index

    @property
    def boundary_edgels(self) -> list:
        return [e for e, inc in self.edgels.items() if len(inc) == 1]

    @property
    def is_closed(self) -> bool:
        return all(len(inc) == 2 for inc in self.edgels.values())

    def cycle_corners(self, s: int) -> tuple:
        return tuple(self.corners[i] for i in self.cycles[s])

    def to_dict(self) -> dict:
        return {
            "schema": "surfel-riemann/1",
            "surfels": [s.label for s in self.surfels],
            "corners": [list(c) for c in self.corners],
            "cycles": self.cycles.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SurfelSurface":
        return surface_from_surfels(Surfel.from_label(s) for s in data["surfels"])


def extract_surface(voxels: Iterable) -> SurfelSurface:
    """Boundary surface of a voxel set.

    Surfels are the voxel faces whose neighbour across the face is absent.
    When the boundary splits into several edgel-connected pieces, the
    largest is kept and a warning is issued.

    Raises
    ------
    EmptyInput
        No voxels were given.
    NonManifoldEdge
        Some edgel touches more than two surfels.
    NonManifoldVertex
        The surfels around a corner form more than one fan.
    """
    occupied = {tuple(int(c) for c in v) for v in voxels}
    if not occupied:
        raise EmptyInput("EmptyInput: the voxel set is empty")
    surfels = []
    for v in occupied:
        for axis in range(3):
            for sign in (1, -1):
                nb = list(v)
                nb[axis] += sign
                if tuple(nb) not in occupied:
                    surfels.append(Surfel(v, axis, sign))
    return surface_from_surfels(surfels)


def surface_from_surfels(surfels: Iterable[Surfel]) -> SurfelSurface:
    """Build the complex spanned by an explicit surfel set (patches allowed)."""
    surfels = sorted(set(surfels))
    if not surfels:
        raise EmptyInput("EmptyInput: no surfels")

    cycles_xyz = [oriented_cycle(s) for s in surfels]
    edgel_inc: dict[tuple, list[int]] = {}
    for s, cyc in enumerate(cycles_xyz):
        for j in range(4):
            a, b = cyc[j], cyc[(j + 1) % 4]
            edgel_inc.setdefault((min(a, b), max(a, b)), []).append(s)
    for e in sorted(edgel_inc):
        if len(edgel_inc[e]) > 2:
            raise NonManifoldEdge(e, len(edgel_inc[e]))

    # edgel-connectivity between surfels
    rows, cols = [], []
    for inc in edgel_inc.values():
        if len(inc) == 2:
            rows.append(inc[0])
            cols.append(inc[1])
    n = len(surfels)
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    ncomp, labels = connected_components(adj, directed=False)
    dropped = 0
    if ncomp > 1:
        sizes = np.bincount(labels)
        # ties go to the component holding the smallest surfel
        keep = max(range(ncomp), key=lambda c: (sizes[c], -int(np.argmax(labels == c))))
        warnings.warn(
            f"surface has {ncomp} connected components; keeping the largest "
            f"({sizes[keep]} of {n} surfels)",
            stacklevel=2,
        )
        dropped = ncomp - 1
        kept = [s for s, lab in zip(surfels, labels) if lab == keep]
        return _assemble(kept, dropped)
    return _assemble(surfels, dropped)


def _assemble(surfels: list, dropped: int) -> SurfelSurface:
    cycles_xyz = [oriented_cycle(s) for s in surfels]
    corners = sorted({c for cyc in cycles_xyz for c in cyc})
    index = {c: i for i, c in enumerate(corners)}
    cycles = np.array([[index[c] for c in cyc] for cyc in cycles_xyz], dtype=np.int64)
    edgels: dict[tuple, tuple] = {}
    for s, cyc in enumerate(cycles):
        for j in range(4):
            a, b = int(cyc[j]), int(cyc[(j + 1) % 4])
            key = (min(a, b), max(a, b))
            edgels[key] = edgels.get(key, ()) + (s,)
    # fails loudly on pinched vertices
    vertex_fans(cycles, len(corners), corners)
    return SurfelSurface(tuple(surfels), tuple(corners), cycles, edgels, dropped, index)


def vertex_fans(quads: np.ndarray, n_vertices: int, keys=None) -> list:
    """Counterclockwise fan of ``(surfel, position)`` pairs around each vertex.

    Returns one ``(fan, closed)`` pair per vertex. A fan is open when the
    vertex lies on the boundary; it then starts at the surfel with no
    clockwise neighbour.
    """
    around: list[list] = [[] for _ in range(n_vertices)]
    for s, q in enumerate(quads):
        for k in range(4):
            around[int(q[k])].append((s, k))

    fans = []
    for v in range(n_vertices):
        entries = around[v]
        # surfel A is followed (counterclockwise) by B when A's previous
        # corner is B's next corner
        by_next = {}
        for s, k in entries:
            nxt = int(quads[s][(k + 1) % 4])
            if nxt in by_next:
                raise NonManifoldVertex(keys[v] if keys is not None else v)
            by_next[nxt] = (s, k)
        prev_of = {(s, k): int(quads[s][(k - 1) % 4]) for s, k in entries}
        has_pred = {by_next[p] for p in prev_of.values() if p in by_next}
        starts = [e for e in entries if e not in has_pred]
        if len(starts) > 1:
            raise NonManifoldVertex(keys[v] if keys is not None else v)
        closed = not starts
        cur = starts[0] if starts else min(entries)
        fan = []
        seen = set()
        while cur is not None and cur not in seen:
            seen.add(cur)
            fan.append(cur)
            cur = by_next.get(prev_of[cur])
        if len(fan) != len(entries):
            raise NonManifoldVertex(keys[v] if keys is not None else v)
        fans.append((fan, closed))
    return fans


def bicolor(surface: SurfelSurface) -> dict:
    """Map each corner to ``"black"`` (even coordinate sum) or ``"white"``."""
    return {c: ("black" if is_black(c) else "white") for c in surface.corners}


def euler_genus(surface: SurfelSurface) -> EulerCounts:
    V, E, F = surface.n_corners, surface.n_edgels, surface.n_surfels
    chi = V - E + F
    nb = len(surface.boundary_edgels)
    genus = (2 - chi) // 2 if nb == 0 else None
    return EulerCounts(V, E, F, chi, genus, nb)
