"""Flatten a patch of the standard digital plane.

Seen along its normal (1, 1, 1), the staircase x + y + z = 0 looks like a
tiling by rhombi with angles of 60 and 120 degrees. With that normal on every
surfel the conformal ratios take two values, tan 30 and tan 60 degrees, and
a conformal map of the patch is the orthogonal projection itself, up to a
similitude. We recover it from two pinned corners.

Run with ``python3 demos/plane_parametrization.py [out.svg]``.
"""

import sys

import numpy as np

from surfel_riemann import BoundaryCondition, build_double_graph, compute_rho, energies, parametrize
from surfel_riemann.conformal import tangent_frame
from surfel_riemann.dec import function
from surfel_riemann.shapes import digital_plane
from surfel_riemann.solver import similitude_fit
from surfel_riemann.svg import image_svg

n = 10
normal = np.ones(3) / np.sqrt(3)

surface = digital_plane(n)
graph = build_double_graph(surface)
structure = compute_rho(graph, {s: normal for s in surface.surfels})
print(f"{surface.n_surfels} surfels, {graph.n_vertices} corners")

# Two ratios only: one per diagonal direction, swapped between primal and dual.
values = np.unique(np.round(structure.rho.real, 12))
print("distinct ratios:", values, "expected", np.tan(np.pi / 6), np.tan(np.pi / 3))

# Pin two far-apart corners and minimise the conformal energy.
pins = BoundaryCondition({graph.vertices[0]: 0.0, graph.vertices[-1]: 1.0})
f, report = parametrize(structure, pins)
e = report.energies
print(f"E_D = {e.dirichlet:.6f}  E_C = {e.conformal:.3e}  area = {e.area:.6f}")

# Compare with the projection onto the plane.
e1, e2 = tangent_frame(normal)
projection = function(graph, lambda p: p @ e1 + 1j * (p @ e2))
a, b, rms = similitude_fit(f.values, projection.values)
print(f"projection = a f + b with |a| = {abs(a):.6f}, rms = {rms:.2e}")

# The projection itself is holomorphic: its conformal energy is zero and
# its Dirichlet energy is twice its area.
ep = energies(projection, structure)
print(f"projection: E_C = {ep.conformal:.2e}, E_D - 2A = {ep.dirichlet - 2 * ep.area:.2e}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(image_svg(f, structure))
    print("wrote", sys.argv[1])
