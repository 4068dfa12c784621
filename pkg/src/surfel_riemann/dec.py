"""Cochains on the double graph and the exterior calculus acting on them.

A ``k``-cochain is a dense complex vector over the ``k``-cells of the double
graph in their canonical order (see :mod:`surfel_riemann.double_graph`).
The wedge product of two 1-cochains is a 2-form on *surfels*; it is returned
as a plain array indexed like ``graph.quads``.

Products of functions with forms need a convention the continuous theory
does not fix. Here ``f * alpha`` on an edge uses the mean of ``f`` at its
two endpoints, a face ``v*`` carries the value ``f(v)``, and the wedge of
two 1-forms on a face ``v*`` is half the sum of the surfel wedges around
``v`` (each surfel is split between the faces of its two black corners, and
again between those of its two white corners).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .conformal import ConformalStructure
from .double_graph import DoubleGraph
from .errors import DimensionError


@dataclass(frozen=True, eq=False)
class Cochain:
    graph: DoubleGraph
    degree: int
    values: np.ndarray

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise DimensionError(f"no {self.degree}-cochains")
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.shape[0] != self.graph.n_cells(self.degree):
            raise ValueError(
                f"{self.degree}-cochain needs {self.graph.n_cells(self.degree)} values, "
                f"got {vals.shape[0]}"
            )
        object.__setattr__(self, "values", vals)

    def _check(self, other: "Cochain"):
        if other.graph is not self.graph or other.degree != self.degree:
            raise DimensionError("cochains live on different spaces")

    def __add__(self, other):
        self._check(other)
        return Cochain(self.graph, self.degree, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return Cochain(self.graph, self.degree, self.values - other.values)

    def __neg__(self):
        return Cochain(self.graph, self.degree, -self.values)

    def __mul__(self, scalar):
        return Cochain(self.graph, self.degree, scalar * self.values)

    __rmul__ = __mul__

    def conj(self) -> "Cochain":
        return Cochain(self.graph, self.degree, np.conj(self.values))

    def evaluate(self, chain) -> complex:
        """Pairing with a chain given by coefficients on the same cells."""
        return complex(np.asarray(chain) @ self.values)

    def integrate(self, tail, head) -> complex:
        """Value on the diagonal from corner ``tail`` to ``head``."""
        if self.degree != 1:
            raise DimensionError("integrate needs a 1-cochain")
        idx = self.graph.vertex_index
        a, b = idx[tuple(tail)], idx[tuple(head)]
        for e, (u, w) in enumerate(self.graph.edges):
            if (u, w) == (a, b):
                return complex(self.values[e])
            if (u, w) == (b, a):
                return -complex(self.values[e])
        raise KeyError(f"no diagonal {tail} -> {head}")

    def by_key(self) -> dict:
        return dict(zip(self.graph.cell_keys(self.degree), self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def zeros(graph: DoubleGraph, degree: int) -> Cochain:
    return Cochain(graph, degree, np.zeros(graph.n_cells(degree), dtype=complex))


def function(graph: DoubleGraph, fn) -> Cochain:
    """0-cochain ``v -> fn(corner)`` evaluated at every corner."""
    return Cochain(graph, 0, np.array([fn(np.asarray(v, dtype=float)) for v in graph.vertices],
                                      dtype=complex))


def coboundary(c: Cochain) -> Cochain:
    """Exterior derivative, defined by Stokes' formula."""
    g = c.graph
    if c.degree == 0:
        return Cochain(g, 1, g.d0 @ c.values)
    if c.degree == 1:
        return Cochain(g, 2, g.d1 @ c.values)
    raise DimensionError("the coboundary of a 2-cochain is not defined")


d = coboundary


def _split(c: Cochain) -> tuple[np.ndarray, np.ndarray]:
    F = c.graph.n_surfels
    return c.values[:F], c.values[F:]


def wedge(a: Cochain, b: Cochain) -> np.ndarray:
    """Wedge product of two 1-cochains, one value per surfel.

    On ``(x, y, x', y')``:  ``(a_xx' * b_yy' - a_yy' * b_xx') / 2``.
    """
    if a.degree != 1 or b.degree != 1:
        raise DimensionError("wedge is defined on pairs of 1-cochains")
    ap, ad = _split(a)
    bp, bd = _split(b)
    return 0.5 * (ap * bd - ad * bp)


def hodge_star(c: Cochain, structure: ConformalStructure) -> Cochain:
    """Hodge star; maps ``k``-cochains to ``(2 - k)``-cochains.

    Faces are indexed by their dual vertex, so on functions and 2-forms the
    star copies values across. On 1-forms it acts surfel by surfel through
    the real 2x2 matrix built from ``rho`` (see
    :attr:`ConformalStructure.hodge1`).

    Raises
    ------
    SingularStar
        Some ``Re rho`` is below the structure's threshold.
    """
    g = c.graph
    if c.degree == 1:
        return Cochain(g, 1, structure.hodge1 @ c.values)
    return Cochain(g, 2 - c.degree, c.values.copy())


def type_decompose(alpha: Cochain, structure: ConformalStructure) -> tuple[Cochain, Cochain]:
    """Split a 1-form into its ``(1,0)`` (``* = -i``) and ``(0,1)`` (``* = +i``) parts."""
    star = hodge_star(alpha, structure)
    return 0.5 * (alpha + 1j * star), 0.5 * (alpha - 1j * star)


def form_type(alpha: Cochain, structure: ConformalStructure, tol: float = 1e-10) -> str:
    a10, a01 = type_decompose(alpha, structure)
    scale = max(alpha.max_abs(), 1.0)
    if a01.max_abs() <= tol * scale:
        return "(1,0)"
    if a10.max_abs() <= tol * scale:
        return "(0,1)"
    return "mixed"


def is_holomorphic_form(alpha: Cochain, structure: ConformalStructure,
                        tol: float = 1e-10) -> tuple[bool, float]:
    """Whether ``alpha`` is closed and of type ``(1,0)``.

    Closedness is only tested on faces bounded by a closed cycle; faces of
    boundary corners are open fans. Returns ``(flag, residual)`` with the
    residual the larger of the two maxima.
    """
    g = alpha.graph
    closed = g.face_closed
    circ = g.d1 @ alpha.values
    face_res = float(np.max(np.abs(circ[closed]), initial=0.0))
    star = structure.hodge1 @ alpha.values
    edge_res = float(np.max(np.abs(star + 1j * alpha.values), initial=0.0))
    res = max(face_res, edge_res)
    return res <= tol, res


def residue(alpha: Cochain, face, structure: ConformalStructure | None = None,
            tol: float = 1e-8) -> complex:
    """Circulation of ``alpha`` around the face ``face*`` (no ``2 pi i`` factor).

    ``face`` is a vertex index, a corner tuple or a ``f:``/``v:`` key. When a
    structure is supplied, a warning is issued if ``alpha`` is not of type
    ``(1,0)`` within ``tol``.
    """
    g = alpha.graph
    v = _face_index(g, face)
    if structure is not None:
        star = structure.hodge1 @ alpha.values
        if np.max(np.abs(star + 1j * alpha.values), initial=0.0) > tol:
            warnings.warn("residue taken of a form that is not of type (1,0)", stacklevel=2)
    return complex(sum(sign * alpha.values[e] for e, sign in g.face_cycles[v]))


def _face_index(g: DoubleGraph, face) -> int:
    if isinstance(face, (int, np.integer)):
        return int(face)
    if isinstance(face, str):
        tag, *coords = face.split(":")
        return g.vertex_index[tuple(int(c) for c in coords)]
    return g.vertex_index[tuple(int(c) for c in face)]


def times(f: Cochain, alpha: Cochain) -> Cochain:
    """Product of a function and a 1-form (endpoint mean of ``f``)."""
    g = f.graph
    mean = 0.5 * (f.values[g.edges[:, 0]] + f.values[g.edges[:, 1]])
    return Cochain(g, 1, mean * alpha.values)


def wedge_on_faces(a: Cochain, b: Cochain) -> np.ndarray:
    """Wedge of 1-forms spread onto the faces of the double graph."""
    g = a.graph
    per_surfel = wedge(a, b)
    out = np.zeros(g.n_faces, dtype=complex)
    for v, (fan, _closed) in enumerate(g.fans):
        out[v] = 0.5 * sum(per_surfel[s] for s, _k in fan)
    return out


def check_derivation(f: Cochain, g: Cochain, alpha: Cochain) -> float:
    """Largest violation of the two Leibniz rules.

    ``d(fg) = f dg + g df`` on every edge and
    ``d(f alpha) = df ^ alpha + f d(alpha)`` on every closed face, under the
    product conventions of this module. The first rule holds exactly; the
    second is exact for affine data on flat patches and is a diagnostic
    otherwise.
    """
    graph = f.graph
    fg = Cochain(graph, 0, f.values * g.values)
    lhs1 = coboundary(fg).values
    rhs1 = times(f, coboundary(g)).values + times(g, coboundary(f)).values
    dev = float(np.max(np.abs(lhs1 - rhs1), initial=0.0))

    lhs2 = coboundary(times(f, alpha)).values
    rhs2 = wedge_on_faces(coboundary(f), alpha) + f.values * coboundary(alpha).values
    closed = graph.face_closed
    dev2 = float(np.max(np.abs(lhs2 - rhs2)[closed], initial=0.0))
    return max(dev, dev2)


__all__ = [
    "Cochain", "zeros", "function", "coboundary", "d", "wedge", "hodge_star",
    "type_decompose", "form_type", "is_holomorphic_form", "residue", "times",
    "wedge_on_faces", "check_derivation",
]
