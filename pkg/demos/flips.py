"""Flip hexagons of the digital plane and carry a holomorphic function along.

A corner of the plane where exactly three surfels meet is the centre of a
hexagon. Pushing the corner through the hexagon (a flip) replaces the three
surfels by three new ones; on the voxels it adds or removes one cube. The
ratios of the new surfels follow from the old ones by the star-triangle
transformation, and a holomorphic function extends uniquely to the new
corner.
"""

import numpy as np

from surfel_riemann import build_double_graph, compute_rho, moves
from surfel_riemann.conformal import ConformalStructure, tangent_frame
from surfel_riemann.dec import function
from surfel_riemann.shapes import digital_plane

normal = np.ones(3) / np.sqrt(3)
surface = digital_plane(6)
graph = build_double_graph(surface)
structure = compute_rho(graph, {s: normal for s in surface.surfels})

e1, e2 = tangent_frame(normal)
z = function(graph, lambda p: p @ e1 + 1j * (p @ e2))

corners = moves.flippable_corners(graph)
print(f"{len(corners)} flippable corners out of {graph.n_vertices}")

c = corners[len(corners) // 2]
hexagon = moves.find_hexagon(structure, c)
print("centre", graph.vertices[c], "star ratios", np.round(hexagon.star_rho, 6))

new_structure, new_z, resid = moves.flip_function(z, structure, c)
print("new centre", new_structure.graph.vertices[c], f"extension residual {resid:.1e}")
print("max holomorphy residual after the flip:",
      f"{np.max(moves.holomorphy_residuals(new_z, new_structure)):.1e}")

# Flipping twice is the identity.
back, _ = moves.apply_flip(new_structure, c)
print("flip twice restores the structure:",
      moves.canonical_form(back) == moves.canonical_form(structure))

# The star-triangle relation for arbitrary complex ratios.
rng = np.random.default_rng(1)
tri = rng.uniform(0.5, 2, 3) + 1j * rng.normal(size=3)
star = moves.star_triangle(*tri)
print("rho_i * rho'_i:", np.round(np.array(tri) * np.array(star), 12))
print("residuals:", moves.star_triangle_residuals(tri, star))

# Perturb the hexagon so the ratios are genuinely complex, then flip.
rho = structure.primal.copy()
for s in hexagon.surfels:
    rho[s] *= 1.2 + 0.3j
noisy = ConformalStructure.from_primal(graph, rho)
_, new_hex = moves.apply_flip(noisy, c)
print("complex star ratios after the flip:", np.round(new_hex.star_rho, 6))
