"""Harmonic interpolation and the energy identity on small surfaces.

On a flat grid every ratio is 1 and the real Laplacian is the ordinary graph
Laplacian of each of the two diagonal graphs. Boundary values of a linear
function are interpolated exactly. On a closed surface with arbitrary
tilted normals the structure becomes complex. The conformal energy of any
function differs from its Dirichlet energy by twice its signed area, and on
a closed surface that area is zero.
"""

import numpy as np

from surfel_riemann import (BoundaryCondition, Cochain, build_double_graph, compute_rho, energies,
                            solve_dirichlet)
from surfel_riemann.dec import function
from surfel_riemann.operators import laplacian_closed_complex
from surfel_riemann.shapes import cube, flat_patch, random_admissible_normals

rng = np.random.default_rng(3)

# Harmonic interpolation of a linear function on a flat 8x8 patch.
graph = build_double_graph(flat_patch(8))
structure = compute_rho(graph)
target = function(graph, lambda p: 2 * p[0] - p[1] + 1)
bc = BoundaryCondition({graph.vertices[v]: target.values[v] for v in graph.boundary_vertices})
f = solve_dirichlet(structure, bc, laplacian="real")
print(f"flat patch: {graph.n_vertices} corners, {len(bc)} pinned,",
      f"max interior error {np.max(np.abs(f.values - target.values)):.1e}")

# A closed surface with tilted normals: complex ratios.
surface = cube()
graph = build_double_graph(surface)
structure = compute_rho(graph, random_admissible_normals(surface, rng))
print("cube ratios:", np.round(structure.primal, 3))

L = laplacian_closed_complex(structure).toarray()
print("Laplacian symmetric:", np.allclose(L, L.T), " smallest eigenvalue:",
      f"{np.linalg.eigvalsh(L).min():.1e}")

g = Cochain(graph, 0, rng.normal(size=8) + 1j * rng.normal(size=8))
e = energies(g, structure)
print(f"E_D = {e.dirichlet:.6f}  E_C = {e.conformal:.6f}  A = {e.area:.6f}",
      f" E_C - (E_D - 2A) = {e.identity_residual:.1e}")
