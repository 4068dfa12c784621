"""Sparse solves: harmonic interpolation and conformal parametrization.

Both solves eliminate pinned corners and factor the remaining block with a
sparse LU (SuperLU through :mod:`scipy.sparse.linalg`), so results are
deterministic for a given input.

Discrete holomorphy on a quad surface has a larger kernel than the
similitudes: constants on the black and on the white corners can be chosen
independently, and a surface with boundary has extra freedom along it. Two
pins alone therefore do not fix a minimiser of the conformal energy. The
parametrization adds a small multiple of the *parallelogram energy*
``sum |f(x) + f(x') - f(y) - f(y')|^2``, which vanishes on every affine map
(in particular on any projection of the surface onto a plane) and removes
that kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from .conformal import ConformalStructure
from .dec import Cochain
from .double_graph import DoubleGraph, vertex_key
from .errors import MalformedInput, SingularSystem, Underconstrained
from .operators import EnergyReport, energies, laplacian_closed_complex, laplacian_closed_real

DEFAULT_TOL = 1e-10
DEFAULT_GAUGE_WEIGHT = 1e-2


@dataclass(frozen=True)
class BoundaryCondition:
    """Prescribed complex values at some corners, keyed by corner tuple."""

    values: dict

    def __post_init__(self):
        clean = {tuple(int(c) for c in k): complex(v) for k, v in dict(self.values).items()}
        object.__setattr__(self, "values", clean)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_function(cls, f: Cochain, vertices) -> "BoundaryCondition":
        """Values of ``f`` at the given vertex indices."""
        g = f.graph
        return cls({g.vertices[int(i)]: f.values[int(i)] for i in vertices})

    def resolve(self, graph: DoubleGraph) -> tuple[np.ndarray, np.ndarray]:
        """Sorted vertex indices and their values.

        Raises
        ------
        MalformedInput
            A pinned corner is not on the surface.
        """
        idx = graph.vertex_index
        missing = [k for k in self.values if k not in idx]
        if missing:
            raise MalformedInput(
                "pinned corners not on the surface: " + ", ".join(vertex_key(k) for k in missing)
            )
        pairs = sorted((idx[k], v) for k, v in self.values.items())
        return (np.array([p[0] for p in pairs], dtype=int),
                np.array([p[1] for p in pairs], dtype=complex))


@dataclass(frozen=True)
class SolveReport:
    method: str
    n_unknowns: int
    nnz_factor: int
    residual: float
    energies: EnergyReport
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "method": self.method,
            "n_unknowns": self.n_unknowns,
            "nnz_factor": self.nnz_factor,
            "residual": self.residual,
            "energies": self.energies.as_dict(),
        }
        out.update(self.meta)
        return out


def _factor_solve(a: sp.spmatrix, b: np.ndarray) -> tuple[np.ndarray, int]:
    if a.shape[0] == 0:
        return np.zeros((0,) + b.shape[1:], dtype=b.dtype), 0
    try:
        lu = spla.splu(sp.csc_matrix(a))
    except RuntimeError as exc:
        raise SingularSystem(f"factorization failed: {exc}") from None
    if np.iscomplexobj(b):
        x = lu.solve(np.ascontiguousarray(b.real)) + 1j * lu.solve(np.ascontiguousarray(b.imag))
    else:
        x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SingularSystem("solution is not finite")
    return x, int(lu.L.nnz + lu.U.nnz)


def _check_components(m: sp.spmatrix, pinned: np.ndarray, graph: DoubleGraph):
    n_comp, labels = csgraph.connected_components(abs(m) + abs(m).T, directed=False)
    has_pin = np.zeros(n_comp, dtype=bool)
    has_pin[labels[pinned]] = True
    if not has_pin.all():
        comp = int(np.flatnonzero(~has_pin)[0])
        v = int(np.flatnonzero(labels == comp)[0]) % graph.n_vertices
        raise SingularSystem(
            f"no pinned corner in the component of {vertex_key(graph.vertices[v])}"
        )


def solve_dirichlet(structure: ConformalStructure, bc: BoundaryCondition,
                    laplacian: str = "complex", tol: float = DEFAULT_TOL) -> Cochain:
    """Harmonic extension of ``bc``: ``(L f)(v) = 0`` at every free corner.

    Parameters
    ----------
    laplacian : {"complex", "real"}
        Closed-form Laplacian for complex ratios, or the weighted graph
        Laplacian (real structures only). On a real structure the black and
        white graphs decouple, so each needs its own pins.

    Raises
    ------
    SingularSystem
        Some connected component of the operator has no pinned corner, or
        the residual exceeds ``tol`` (relative to the boundary data).
    NotRealStructure
        ``laplacian="real"`` on a structure with complex ratios.
    """
    g = structure.graph
    if len(bc) == 0:
        raise SingularSystem("Dirichlet problem without pinned corners")
    if laplacian == "real":
        L = laplacian_closed_real(structure).matrix
    elif laplacian == "complex":
        L = laplacian_closed_complex(structure).matrix
    else:
        raise ValueError(f"unknown laplacian {laplacian!r}")
    pinned, vals = bc.resolve(g)
    _check_components(L, pinned, g)
    free = np.setdiff1d(np.arange(g.n_vertices), pinned)
    L = sp.csr_matrix(L)
    rhs = -(L[free][:, pinned] @ vals)
    sol, _nnz = _factor_solve(L[free][:, free], rhs.astype(complex))
    f = np.empty(g.n_vertices, dtype=complex)
    f[pinned] = vals
    f[free] = sol
    scale = max(1.0, float(np.max(np.abs(vals))))
    res = float(np.max(np.abs(L @ f)[free], initial=0.0)) / scale
    if res > tol:
        raise SingularSystem(f"residual {res:.3g} above tolerance {tol:.3g}")
    return Cochain(g, 0, f)


def parallelogram_operator(graph: DoubleGraph) -> sp.csr_matrix:
    """``(M f)_s = f(x) + f(x') - f(y) - f(y')`` per surfel."""
    q = graph.quads
    F = graph.n_surfels
    rows = np.repeat(np.arange(F), 4)
    cols = q.reshape(-1)
    vals = np.tile([1.0, -1.0, 1.0, -1.0], F)
    return sp.csr_matrix((vals, (rows, cols)), shape=(F, graph.n_vertices))


def conformal_energy_matrix(structure: ConformalStructure) -> sp.csr_matrix:
    """Hermitian ``A`` with ``E_C(f) = f^H A f``."""
    g = structure.graph
    H = structure.hodge1
    eye = sp.identity(2 * g.n_surfels, format="csr")
    left = (eye + 1j * H.T) @ structure.gram @ (eye - 1j * H)
    return sp.csr_matrix(0.5 * (g.d0.T @ left @ g.d0))


def _realify(a: sp.spmatrix) -> sp.csr_matrix:
    ar, ai = sp.csr_matrix(a.real), sp.csr_matrix(a.imag)
    return sp.csr_matrix(sp.bmat([[ar, -ai], [ai, ar]]))


def parametrize(structure: ConformalStructure, pins: BoundaryCondition,
                tol: float = DEFAULT_TOL, gauge_weight: float = DEFAULT_GAUGE_WEIGHT
                ) -> tuple[Cochain, SolveReport]:
    """Least conformal energy map to the plane with pinned corners.

    Minimises ``E_C(f) + gauge_weight * P(f)`` with ``P`` the parallelogram
    energy (see the module docstring) over the unpinned corners, as a real
    symmetric positive semidefinite system in ``(Re f, Im f)``. Any map
    with ``E_C = 0`` that is affine on each surfel is an exact minimiser,
    so the weight only matters when no holomorphic map fits the pins.
    Smaller weights get closer to the pure conformal minimiser on noisy
    data but worsen the conditioning (errors grow roughly like
    ``1e-16 / gauge_weight``).

    Raises
    ------
    Underconstrained
        Fewer than two pins.
    SingularSystem
        The reduced system cannot be factored or the relative residual
        exceeds ``tol``.
    """
    if len(pins) < 2:
        raise Underconstrained(f"parametrization needs at least 2 pins, got {len(pins)}")
    g = structure.graph
    n = g.n_vertices
    pinned, vals = pins.resolve(g)
    M = parallelogram_operator(g)
    A = conformal_energy_matrix(structure) + gauge_weight * (M.T @ M)
    R = _realify(A)
    pin_real = np.concatenate([pinned, pinned + n])
    u_pin = np.concatenate([vals.real, vals.imag])
    free = np.setdiff1d(np.arange(2 * n), pin_real)
    _check_components(R, pin_real, g)
    R_ff = R[free][:, free]
    rhs = -(R[free][:, pin_real] @ u_pin)
    sol, nnz = _factor_solve(R_ff, rhs)
    res = float(np.linalg.norm(R_ff @ sol - rhs)) / max(float(np.linalg.norm(rhs)), 1.0)
    if res > tol:
        raise SingularSystem(f"residual {res:.3g} above tolerance {tol:.3g}")
    u = np.empty(2 * n)
    u[pin_real] = u_pin
    u[free] = sol
    f = Cochain(g, 0, u[:n] + 1j * u[n:])
    report = SolveReport(
        method="splu",
        n_unknowns=int(free.size),
        nnz_factor=nnz,
        residual=res,
        energies=energies(f, structure),
        meta={"gauge_weight": gauge_weight,
              "parallelogram_energy": float(np.sum(np.abs(M @ f.values) ** 2))},
    )
    return f, report


def harmonicity_report(f: Cochain, structure: ConformalStructure) -> np.ndarray:
    """``|L f|`` per corner with the closed-form complex Laplacian.

    Indexed like ``structure.graph.vertices``.
    """
    L = laplacian_closed_complex(structure).matrix
    return np.abs(L @ f.values)


def similitude_fit(f: np.ndarray, target: np.ndarray) -> tuple[complex, complex, float]:
    """Least-squares ``a, b`` with ``a f + b ~ target`` and the RMS misfit."""
    f = np.asarray(f, dtype=complex)
    target = np.asarray(target, dtype=complex)
    A = np.column_stack([f, np.ones_like(f)])
    (a, b), *_ = np.linalg.lstsq(A, target, rcond=None)
    rms = float(np.sqrt(np.mean(np.abs(a * f + b - target) ** 2)))
    return complex(a), complex(b), rms
