"""Star-triangle moves on conformal structures.

A hexagon is three surfels around a corner ``c`` of degree three. Listing
its rim counterclockwise as ``b0 .. b5`` with ``b0`` adjacent to ``c``, the
surfels are ``(c, b0, b1, b2)``, ``(c, b2, b3, b4)`` and ``(c, b4, b5, b0)``.
Their diagonals through ``c`` form a star on ``b1, b3, b5`` and the other
diagonals a triangle on ``b0, b2, b4``.

The flip replaces them by three surfels around a new corner ``c'`` of the
other colour: ``(c', b1, b2, b3)``, ``(c', b3, b4, b5)``, ``(c', b5, b0, b1)``.
The old triangle becomes a star and the old star a triangle; the new
ratios follow from the old ones by the star-triangle relation. Flips act on
the abstract double graph only; no voxel geometry is recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import ConformalStructure
from .dec import Cochain
from .double_graph import DoubleGraph, vertex_key
from .errors import DegenerateMove, InvalidConfiguration


def star_triangle(r1: complex, r2: complex, r3: complex) -> tuple:
    """Star ratios from triangle ratios: ``r_i * r'_i = r1 r2 + r2 r3 + r3 r1``.

    ``r'_i`` sits on the star branch opposite the triangle edge ``r_i``.
    """
    r = [complex(r1), complex(r2), complex(r3)]
    if any(x == 0 for x in r):
        raise DegenerateMove("zero ratio in triangle")
    sigma = r[0] * r[1] + r[1] * r[2] + r[2] * r[0]
    if sigma == 0:
        raise DegenerateMove("vanishing symmetric sum")
    return tuple(sigma / x for x in r)


def triangle_from_star(p1: complex, p2: complex, p3: complex) -> tuple:
    """Inverse of :func:`star_triangle`."""
    p = [complex(p1), complex(p2), complex(p3)]
    total = p[0] + p[1] + p[2]
    if any(x == 0 for x in p) or total == 0:
        raise DegenerateMove("degenerate star")
    sigma = p[0] * p[1] * p[2] / total
    return tuple(sigma / x for x in p)


def star_triangle_residuals(tri, star) -> tuple[float, float]:
    """Relative violations of both sides of the star-triangle relation."""
    r1, r2, r3 = tri
    sigma = r1 * r2 + r2 * r3 + r3 * r1
    lhs = np.array([t * s for t, s in zip(tri, star)])
    res1 = float(np.max(np.abs(lhs - sigma)) / max(abs(sigma), 1e-300))
    other = star[0] * star[1] * star[2] / (star[0] + star[1] + star[2])
    res2 = float(abs(other - sigma) / max(abs(sigma), 1e-300))
    return res1, res2


@dataclass(frozen=True)
class Hexagon:
    center: int
    rim: tuple          # b0 .. b5 (vertex indices)
    surfels: tuple      # surfel k is (c, b_2k, b_2k+1, b_2k+2)
    star_rho: tuple     # ratio of the diagonal c -- b_2k+1

    @property
    def triangle_rho(self) -> tuple:
        """Ratios of the rim diagonals ``b_2k -- b_2k+2``."""
        return tuple(1.0 / r for r in self.star_rho)


def _diag_rho(structure: ConformalStructure, s: int, k: int) -> complex:
    """Ratio of the diagonal of surfel ``s`` through its ``k``-th corner."""
    F = structure.graph.n_surfels
    return complex(structure.rho[s + (k % 2) * F])


def find_hexagon(structure: ConformalStructure, center) -> Hexagon:
    """Hexagon around an interior corner with exactly three surfels."""
    g = structure.graph
    c = center if isinstance(center, (int, np.integer)) else g.vertex_index[tuple(center)]
    fan, closed = g.fans[c]
    if not closed or len(fan) != 3:
        raise InvalidConfiguration(
            f"corner {g.vertices[c]} is not an interior corner of degree 3"
        )
    rim = []
    star = []
    for s, k in fan:
        q = g.quads[s]
        rim += [int(q[(k + 1) % 4]), int(q[(k + 2) % 4])]
        star.append(_diag_rho(structure, s, k))
    if len(set(rim)) != 6:
        raise InvalidConfiguration(f"rim around {g.vertices[c]} is not a hexagon")
    return Hexagon(int(c), tuple(rim), tuple(s for s, _k in fan), tuple(star))


def flippable_corners(graph: DoubleGraph) -> list:
    return [v for v, (fan, closed) in enumerate(graph.fans)
            if closed and len(fan) == 3 and len({int(graph.quads[s][(k + j) % 4])
                                                 for s, k in fan for j in (1, 2)}) == 6]


def center_estimates(star_rho, rim_values) -> np.ndarray:
    """Centre value implied by each surfel's holomorphy equation."""
    b = np.asarray(rim_values, dtype=complex)
    out = []
    for k in range(3):
        rho = complex(star_rho[k])
        if rho == 0:
            raise DegenerateMove("surfel equation does not involve the centre")
        delta = b[(2 * k + 2) % 6] - b[2 * k]
        out.append(b[2 * k + 1] - delta / (1j * rho))
    return np.array(out)


def flip_extend(hexagon, rim_values) -> tuple[complex, float]:
    """Centre value of a holomorphic function from its six rim values.

    Each surfel ``(c, b_2k, b_2k+1, b_2k+2)`` requires
    ``f(b_2k+2) - f(b_2k) = i rho_k (f(b_2k+1) - f(c))``. The returned centre
    solves the three equations in the least-squares sense; the residual is
    the largest disagreement between the three individual solutions and is
    zero exactly when the rim values are compatible.

    ``hexagon`` is a :class:`Hexagon` or the three star ratios.
    """
    star = hexagon.star_rho if isinstance(hexagon, Hexagon) else tuple(hexagon)
    est = center_estimates(star, rim_values)
    w = np.abs(np.asarray(star, dtype=complex)) ** 2
    center = complex(np.sum(w * est) / np.sum(w))
    resid = max(abs(est[i] - est[j]) for i in range(3) for j in range(i + 1, 3))
    return center, float(resid)


def flipped_star_rho(star_rho) -> tuple:
    """Star ratios after the flip; branch ``k`` joins ``c'`` to ``b_2k+2``."""
    tri = [1.0 / complex(r) for r in star_rho]   # rim edge b_2j -- b_2j+2
    new = star_triangle(*tri)                    # new[j] is opposite that edge: c' -- b_2j+4
    return tuple(new[(k - 1) % 3] for k in range(3))


def apply_flip(structure: ConformalStructure, center) -> tuple[ConformalStructure, Hexagon]:
    """Flip the hexagon around ``center``.

    Returns the new structure (on a new double graph) and the new hexagon,
    whose rim is the old rim shifted by one (``b1 .. b5, b0``). The new
    corner gets the lattice point ``b0 + b2 + b4 - 2c``, which is the opposite
    corner of the cube when the hexagon is a cube corner.
    """
    g = structure.graph
    hexa = find_hexagon(structure, center)
    c = hexa.center
    b = hexa.rim
    V = np.array(g.vertices)
    new_pt = tuple(int(x) for x in V[b[0]] + V[b[2]] + V[b[4]] - 2 * V[c])
    if new_pt in g.vertex_index and g.vertex_index[new_pt] != c:
        raise InvalidConfiguration(f"flip target {new_pt} already on the surface")

    vertices = list(g.vertices)
    vertices[c] = new_pt                        # c' takes the slot of c
    c_black = bool(g.black[c])
    new_star = flipped_star_rho(hexa.star_rho)

    quads = g.quads.copy()
    labels = list(g.surfel_labels)
    surfels = list(g.surfels)
    rho_p = structure.primal.copy()
    for k in range(3):
        s = hexa.surfels[k]
        cyc = [c, b[(2 * k + 1) % 6], b[(2 * k + 2) % 6], b[(2 * k + 3) % 6]]
        if c_black:
            # c' is white: start the cycle at b_2k+1
            cyc = cyc[1:] + cyc[:1]
            rho_p[s] = 1.0 / new_star[k]
        else:
            rho_p[s] = new_star[k]
        if vertices[cyc[2]] < vertices[cyc[0]]:
            # same start rule as extracted surfels: smallest black corner
            cyc = cyc[2:] + cyc[:2]
        quads[s] = cyc
        labels[s] = f"flip:{vertex_key(new_pt)}:{k}"
        surfels[s] = None
    new_graph = DoubleGraph.from_quads(vertices, quads, labels, surfels)
    new_structure = ConformalStructure.from_primal(new_graph, rho_p, structure.eps_re)
    new_hex = find_hexagon(new_structure, c)
    return new_structure, new_hex


def holomorphy_residuals(f: Cochain, structure: ConformalStructure) -> np.ndarray:
    """``|f(y') - f(y) - i rho (f(x') - f(x))|`` per surfel."""
    q = structure.graph.quads
    v = f.values
    return np.abs(v[q[:, 3]] - v[q[:, 1]] - 1j * structure.primal * (v[q[:, 2]] - v[q[:, 0]]))


def flip_function(f: Cochain, structure: ConformalStructure, center) -> tuple:
    """Flip a hexagon and carry a function across it.

    Returns ``(new_structure, new_function, residual)``; the residual is the
    compatibility residual of the rim values on the new hexagon.
    """
    new_structure, new_hex = apply_flip(structure, center)
    values = f.values.copy()
    value, resid = flip_extend(new_hex, values[list(new_hex.rim)])
    values[new_hex.center] = value
    return new_structure, Cochain(new_structure.graph, 0, values), resid


def canonical_form(structure: ConformalStructure, digits: int = 12) -> list:
    """Graph-isomorphism invariant listing of surfels and their ratios."""
    g = structure.graph
    out = []
    for s, q in enumerate(g.quads):
        keys = tuple(g.vertices[i] for i in q)
        out.append((keys, round(structure.primal[s].real, digits),
                    round(structure.primal[s].imag, digits)))
    return sorted(out)
