"""Laplacians, the scalar product on 1-forms and the quadratic energies.

Sign convention
---------------
All Laplacians here are positive semidefinite in the real case:
``(Lf)(x) = sum_k rho(x, x_k) (f(x) - f(x_k))``. The closed form for complex
ratios is written with the opposite overall sign in its usual statement; it
is negated here so that both closed forms and the composition
``-(* d * d)`` agree exactly (global factor ``+1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .conformal import ConformalStructure
from .dec import Cochain, coboundary, hodge_star, wedge
from .double_graph import DoubleGraph
from .errors import NotRealStructure, SingularStar

SIGN_CONVENTION = "L f(x) = sum rho (f(x) - f(x_k)); closed complex form negated"


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Sparse matrix between two cochain spaces, with cell keys for export."""

    matrix: sp.csr_matrix
    row_keys: list
    col_keys: list
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple:
        return self.matrix.shape

    def __matmul__(self, other):
        if isinstance(other, Cochain):
            out_degree = self.meta.get("out_degree", other.degree)
            return Cochain(other.graph, out_degree, self.matrix @ other.values)
        return self.matrix @ other

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def triplets(self) -> list:
        """``(row_key, col_key, value)`` in row-major canonical order, zeros dropped."""
        m = self.matrix.tocsr().copy()
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        out = []
        for r in range(m.shape[0]):
            for j in range(m.indptr[r], m.indptr[r + 1]):
                out.append((self.row_keys[r], self.col_keys[m.indices[j]], complex(m.data[j])))
        return out


def _vertex_operator(graph: DoubleGraph, m, **meta) -> SparseOperator:
    keys = graph.vertex_keys()
    meta.setdefault("out_degree", 0)
    meta.setdefault("sign_convention", SIGN_CONVENTION)
    m = sp.csr_matrix(m)
    m.sum_duplicates()
    m.eliminate_zeros()
    return SparseOperator(m, keys, keys, meta)


def laplacian_closed_real(structure: ConformalStructure, tol: float = 1e-12) -> SparseOperator:
    """Weighted graph Laplacian on the black and white graphs separately.

    Raises
    ------
    NotRealStructure
        Some ratio has ``|Im rho| > tol``.
    """
    if not structure.is_real(tol):
        raise NotRealStructure("the conformal structure has non-real ratios")
    g = structure.graph
    w = structure.rho.real
    a, b = g.edges[:, 0], g.edges[:, 1]
    rows = np.concatenate([a, b, a, b])
    cols = np.concatenate([a, b, b, a])
    vals = np.concatenate([w, w, -w, -w])
    m = sp.coo_matrix((vals, (rows, cols)), shape=(g.n_vertices,) * 2).tocsr()
    return _vertex_operator(g, m, kind="closed-real")


def laplacian_closed_complex(structure: ConformalStructure) -> SparseOperator:
    """Closed-form Laplacian for complex ratios.

    Around a corner ``v`` with diagonal neighbours ``w_k`` and dual edges
    ``(v, w_k)* = (y_k, y_{k+1})``::

        (Lf)(v) = sum_k [ |rho|^2 (f(v) - f(w_k)) - Im rho (f(y_{k+1}) - f(y_k)) ] / Re rho

    with ``rho = rho(v, w_k)``. The coefficients are real.
    """
    g = structure.graph
    F = g.n_surfels
    rows, cols, vals = [], [], []
    for s, q in enumerate(g.quads):
        for k in range(4):
            v, w = q[k], q[(k + 2) % 4]
            e = s + (k % 2) * F
            rho = structure.rho[e]
            if rho.real < structure.eps_re:
                raise SingularStar(f"Re(rho) too small on {g.surfel_labels[s]}")
            a = abs(rho) ** 2 / rho.real
            b = rho.imag / rho.real
            y_next, y_prev = q[(k + 1) % 4], q[(k - 1) % 4]
            rows += [v, v, v, v]
            cols += [v, w, y_prev, y_next]
            vals += [a, -a, -b, b]
    m = sp.coo_matrix((vals, (rows, cols)), shape=(g.n_vertices,) * 2).tocsr()
    return _vertex_operator(g, m, kind="closed-complex")


def laplacian_compositional(structure: ConformalStructure) -> SparseOperator:
    """``-(d * d * + * d * d)`` restricted to functions.

    On 0-cochains the first term vanishes (the derivative of a 2-form is
    zero), and the star on 2-forms is the identity in the face-by-vertex
    indexing, so the operator is ``-d1 @ H1 @ d0``. It equals
    :func:`laplacian_closed_complex` with factor ``+1``.
    """
    g = structure.graph
    m = -(g.d1 @ structure.hodge1 @ g.d0)
    return _vertex_operator(g, m, kind="compositional", scalar_vs_closed=1.0)


def scalar_product(alpha: Cochain, beta: Cochain, structure: ConformalStructure) -> complex:
    """``(alpha, beta)``: sum over surfels of ``alpha ^ *conj(beta)``."""
    return complex(np.sum(wedge(alpha, hodge_star(beta.conj(), structure))))


def scalar_product_weighted(alpha: Cochain, beta: Cochain, structure: ConformalStructure) -> complex:
    """Edge-sum form of the scalar product, mixing each edge with its dual.

    ``1/2 sum_e a_e / Re rho_e * (|rho_e|^2 conj(b_e) + Im rho_e conj(b_{e*}))``.
    For real ratios this is ``1/2 sum_e rho_e a_e conj(b_e)``.
    """
    g = structure.graph
    F = g.n_surfels
    rho = structure.rho
    a = alpha.values
    bc = np.conj(beta.values)
    # (x,x')* = (y,y') and (y,y')* = (x',x)
    dual_vals = np.concatenate([bc[F:], -bc[:F]])
    terms = a / rho.real * (np.abs(rho) ** 2 * bc + rho.imag * dual_vals)
    return complex(0.5 * np.sum(terms))


@dataclass(frozen=True)
class EnergyReport:
    dirichlet: float
    conformal: float
    area: float

    @property
    def identity_residual(self) -> float:
        return abs(self.conformal - (self.dirichlet - 2 * self.area))

    def as_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "conformal": self.conformal,
            "area": self.area,
            "identity_residual": self.identity_residual,
        }


def _norm2(alpha_vals: np.ndarray, structure: ConformalStructure) -> float:
    return float(np.real(alpha_vals @ (structure.gram @ np.conj(alpha_vals))))


def surfel_areas(f: Cochain) -> np.ndarray:
    """Signed area of each image quadrilateral ``(f(x), f(y), f(x'), f(y'))``."""
    q = f.graph.quads
    v = f.values
    p = v[q[:, 2]] - v[q[:, 0]]
    dd = v[q[:, 3]] - v[q[:, 1]]
    return -0.5 * np.imag(p * np.conj(dd))


def conformal_density(f: Cochain, structure: ConformalStructure) -> np.ndarray:
    """Per-surfel contribution to the conformal energy."""
    df = coboundary(f)
    gamma = df.values - 1j * (structure.hodge1 @ df.values)
    F = structure.graph.n_surfels
    gp, gd = gamma[:F], gamma[F:]
    r = structure.primal
    quad = (np.abs(r) ** 2 * np.abs(gp) ** 2 + 2 * r.imag * np.real(gp * np.conj(gd))
            + np.abs(gd) ** 2)
    return 0.25 * quad / r.real


def energies(f: Cochain, structure: ConformalStructure) -> EnergyReport:
    """Dirichlet energy, conformal energy and area of a function.

    The conformal energy is evaluated directly as ``||df - i*df||^2 / 2``,
    not through its relation with the other two.
    """
    df = coboundary(f).values
    star = structure.hodge1 @ df
    e_d = _norm2(df, structure)
    e_c = 0.5 * _norm2(df - 1j * star, structure)
    area = float(np.sum(surfel_areas(f)))
    return EnergyReport(e_d, e_c, area)


def dirichlet_energy_mixed(f: Cochain, structure: ConformalStructure) -> float:
    """Edge-by-edge Dirichlet energy mixing each edge with its dual.

    Per edge ``(|rho|^2 |df_e|^2 + Im rho * df_e conj(df_{e*})) / (2 Re rho)``;
    individual terms are complex, only the total is real.
    """
    df = coboundary(f)
    return float(np.real(scalar_product_weighted(df, df, structure)))


def graph_dirichlet(f: Cochain, structure: ConformalStructure, black: bool) -> float:
    """Ordinary weighted Dirichlet energy of ``f`` on one of the two graphs."""
    g = structure.graph
    F = g.n_surfels
    sl = slice(0, F) if black else slice(F, 2 * F)
    df = (g.d0 @ f.values)[sl]
    return float(np.sum(structure.rho[sl].real * np.abs(df) ** 2))


def dirichlet_split_check(f: Cochain, structure: ConformalStructure, tol: float = 1e-12) -> float:
    """``|E_D(f) - (E_D(f|black) + E_D(f|white)) / 2|`` for a real structure."""
    if not structure.is_real(tol):
        raise NotRealStructure("the split into two graphs needs real ratios")
    e_d = energies(f, structure).dirichlet
    return abs(e_d - 0.5 * (graph_dirichlet(f, structure, True)
                            + graph_dirichlet(f, structure, False)))
