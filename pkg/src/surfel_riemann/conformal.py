"""Conformal ratios from surfel normals.

Each surfel is projected orthogonally onto the plane through its centre with
the given normal. In that plane, identified with the complex numbers, the
ratio ``rho`` of a surfel is defined by

    Z(y') - Z(y) = i * rho * (Z(x') - Z(x))

for the oriented cycle ``(x, y, x', y')``. The black diagonal carries
``rho`` and the white one ``1 / rho``. With the counterclockwise orientation
and a normal on the outer side of the surfel, ``Re rho > 0``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .double_graph import DoubleGraph
from .errors import (DegenerateProjection, InvalidConfiguration,
                     NonPositiveRealPart, SingularStar)
from .surface import SurfelSurface

DEFAULT_EPS_RE = 1e-8
DEFAULT_EPS_LEN = 1e-9


def tangent_frame(normal) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal ``(e1, e2)`` spanning the plane, with ``e1 x e2 = n``."""
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = helper - (helper @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


def project_surfel(surfel, cycle, normal, eps_len: float = DEFAULT_EPS_LEN,
                   frame=None) -> np.ndarray:
    """Complex coordinates of the four corners projected along ``normal``.

    Parameters
    ----------
    surfel : Surfel or str
        Only used to label errors.
    cycle : (4, 3) array_like
        Corner positions ``(x, y, x', y')``.
    normal : (3,) array_like
        Normal direction; need not be normalised.
    frame : pair of 3-vectors, optional
        Orthonormal frame of the plane. Defaults to :func:`tangent_frame`.

    Raises
    ------
    DegenerateProjection
        A projected diagonal is shorter than ``eps_len`` or the two
        diagonals are (nearly) parallel.
    """
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    pts = np.asarray(cycle, dtype=float)
    rel = pts - pts.mean(axis=0)
    flat = rel - np.outer(rel @ n, n)
    e1, e2 = tangent_frame(n) if frame is None else frame
    z = flat @ e1 + 1j * (flat @ e2)
    p, d = z[2] - z[0], z[3] - z[1]
    if abs(p) < eps_len or abs(d) < eps_len:
        raise DegenerateProjection(surfel, "(collapsed diagonal)")
    # parallel diagonals: the surfel projects onto a segment
    if abs((np.conj(p) * d).imag) < eps_len * abs(p) * abs(d):
        raise DegenerateProjection(surfel, "(surfel seen edge-on)")
    return z


def ratio_of(z) -> complex:
    """``rho`` of a projected cycle ``(x, y, x', y')``."""
    return complex((z[3] - z[1]) / (1j * (z[2] - z[0])))


@dataclass(frozen=True, eq=False)
class ConformalStructure:
    """Complex ratio on every edge of a double graph.

    ``rho[e]`` for ``e < F`` is the black diagonal of surfel ``e`` and
    ``rho[F + e]`` its white diagonal. Use :meth:`from_primal` to build a
    structure where the white values are exact inverses.
    """

    graph: DoubleGraph
    rho: np.ndarray
    eps_re: float = DEFAULT_EPS_RE
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_primal(cls, graph: DoubleGraph, rho_primal, eps_re: float = DEFAULT_EPS_RE,
                    **meta) -> "ConformalStructure":
        rp = np.asarray(rho_primal, dtype=complex).reshape(-1)
        if rp.shape[0] != graph.n_surfels:
            raise ValueError("need one ratio per surfel")
        rho = np.concatenate([rp, 1.0 / rp])
        rho.setflags(write=False)
        return cls(graph, rho, eps_re, dict(meta))

    @property
    def primal(self) -> np.ndarray:
        return self.rho[: self.graph.n_surfels]

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.rho.imag) <= tol))

    def rho_between(self, u, w) -> complex:
        """Ratio of the diagonal joining corners ``u`` and ``w`` (either order)."""
        idx = self.graph.vertex_index
        a, b = idx[tuple(u)], idx[tuple(w)]
        return complex(self.rho[self._pair_to_edge[(min(a, b), max(a, b))]])

    @cached_property
    def _pair_to_edge(self) -> dict:
        out = {}
        for e, (a, b) in enumerate(self.graph.edges):
            out.setdefault((min(a, b), max(a, b)), e)
        return out

    @cached_property
    def hodge1(self) -> sp.csr_matrix:
        """Real ``(2F, 2F)`` Hodge star on 1-cochains.

        Per surfel, with ``rho = r e^{i theta}`` on the black diagonal::

            [*a]_black = (-Im rho * a_black - a_white) / Re rho
            [*a]_white = (|rho|^2 * a_black + Im rho * a_white) / Re rho
        """
        F = self.graph.n_surfels
        r = self.primal
        if np.any(r.real < self.eps_re):
            bad = int(np.argmin(r.real))
            raise SingularStar(
                f"Re(rho) = {r.real[bad]:.3g} on surfel {self.graph.surfel_labels[bad]}"
            )
        inv = 1.0 / r.real
        idx = np.arange(F)
        rows = np.concatenate([idx, idx, idx + F, idx + F])
        cols = np.concatenate([idx, idx + F, idx, idx + F])
        vals = np.concatenate([-r.imag * inv, -inv, np.abs(r) ** 2 * inv, r.imag * inv])
        return sp.csr_matrix((vals, (rows, cols)), shape=(2 * F, 2 * F))

    @cached_property
    def gram(self) -> sp.csr_matrix:
        """Real symmetric matrix ``G`` with ``(a, b) = a^T G conj(b)``."""
        F = self.graph.n_surfels
        r = self.primal
        half = 0.5 / r.real
        idx = np.arange(F)
        rows = np.concatenate([idx, idx, idx + F, idx + F])
        cols = np.concatenate([idx, idx + F, idx, idx + F])
        vals = np.concatenate([half * np.abs(r) ** 2, half * r.imag, half * r.imag, half])
        return sp.csr_matrix((vals, (rows, cols)), shape=(2 * F, 2 * F))


def compute_rho(graph: DoubleGraph, normals: dict | None = None,
                eps_re: float = DEFAULT_EPS_RE, eps_len: float = DEFAULT_EPS_LEN
                ) -> ConformalStructure:
    """Ratios of a geometric double graph under a normal field.

    ``normals`` maps :class:`Surfel` to a 3-vector; surfels without an entry
    use their outward face normal (a warning lists how many).

    Raises
    ------
    DegenerateProjection, NonPositiveRealPart
        Named after the first offending surfel.
    """
    normals = normals or {}
    missing = 0
    rho = np.empty(graph.n_surfels, dtype=complex)
    for s, surfel in enumerate(graph.surfels):
        if surfel is None:
            raise InvalidConfiguration(
                f"surfel {graph.surfel_labels[s]} has no geometry; ratios must be given"
            )
        n = normals.get(surfel)
        if n is None:
            missing += 1
            n = surfel.outward
        cyc = [graph.vertices[i] for i in graph.quads[s]]
        z = project_surfel(surfel.label, cyc, n, eps_len)
        rho[s] = ratio_of(z)
        if rho[s].real < eps_re:
            raise NonPositiveRealPart(f"surfel {surfel.label}", rho[s])
    if missing and normals:
        warnings.warn(f"{missing} surfels without normal; using face normals", stacklevel=2)
    return ConformalStructure.from_primal(graph, rho, eps_re)


def face_normals(surface: SurfelSurface) -> dict:
    return {s: s.outward for s in surface.surfels}


def estimate_normals(surface: SurfelSurface, radius: int = 0) -> dict:
    """Average of outward face normals over an edgel-adjacency ball.

    Falls back to the face normal (with a warning) wherever the average is
    not admissible, i.e. does not point to the outer side of the surfel.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    F = surface.n_surfels
    outward = np.array([s.outward for s in surface.surfels])
    if radius == 0:
        return {s: outward[i].copy() for i, s in enumerate(surface.surfels)}
    rows, cols = [], []
    for inc in surface.edgels.values():
        if len(inc) == 2:
            rows += [inc[0], inc[1]]
            cols += [inc[1], inc[0]]
    step = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(F, F)) + sp.identity(F, format="csr")
    reach = sp.identity(F, format="csr")
    for _ in range(radius):
        reach = reach @ step
        reach.data[:] = 1.0
    avg = reach @ outward
    norms = np.linalg.norm(avg, axis=1)
    out = {}
    fallback = 0
    for i, s in enumerate(surface.surfels):
        if norms[i] < 1e-12 or avg[i] @ outward[i] <= 1e-6 * norms[i]:
            fallback += 1
            out[s] = outward[i].copy()
        else:
            out[s] = avg[i] / norms[i]
    if fallback:
        warnings.warn(f"{fallback} surfels fell back to their face normal", stacklevel=2)
    return out


@dataclass
class ValidationReport:
    offenses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.offenses

    def kinds(self) -> set:
        return {kind for _key, kind, _val in self.offenses}


def validate_structure(structure: ConformalStructure, eps_re: float | None = None,
                       tol: float = 1e-12) -> ValidationReport:
    """List edges breaking duality inversion, orientation independence or ``Re rho >= eps``."""
    eps_re = structure.eps_re if eps_re is None else eps_re
    g = structure.graph
    keys = g.edge_keys()
    rho = structure.rho
    report = ValidationReport()
    F = g.n_surfels
    for e in range(F):
        prod = rho[e] * rho[e + F]
        if not abs(prod - 1) <= tol:
            report.offenses.append((keys[e], "DualityInversion", complex(prod)))
    seen: dict = {}
    for e, (a, b) in enumerate(g.edges):
        pair = (min(a, b), max(a, b))
        if pair in seen and abs(rho[seen[pair]] - rho[e]) > tol:
            report.offenses.append((keys[e], "OrientationDependence", complex(rho[e])))
        seen.setdefault(pair, e)
    for e in range(2 * F):
        if not rho[e].real >= eps_re:
            report.offenses.append((keys[e], "NonPositiveRealPart", complex(rho[e])))
    return report
