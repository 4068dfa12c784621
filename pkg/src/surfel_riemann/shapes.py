"""Small surfaces used in tests and demos."""

from __future__ import annotations

import itertools

import numpy as np

from .surface import Surfel, SurfelSurface, extract_surface, surface_from_surfels


def cube() -> SurfelSurface:
    return extract_surface([(0, 0, 0)])


def flat_patch(nx: int, ny: int | None = None) -> SurfelSurface:
    """Top faces of an ``nx x ny`` slab of voxels: a flat square grid."""
    ny = nx if ny is None else ny
    return surface_from_surfels(
        Surfel((i, j, 0), 2, 1) for i in range(nx) for j in range(ny)
    )


def digital_plane_voxels(n: int) -> list:
    """Voxels ``(x, y, z)`` with ``x + y + z = -1`` and ``0 <= x, y < n``."""
    return [(x, y, -1 - x - y) for x in range(n) for y in range(n)]


def digital_plane_slab(n: int, depth: int = 2) -> list:
    """Columns of ``depth + 1`` voxels under the plane ``x + y + z = 0``.

    The bare staircase of :func:`digital_plane_voxels` touches itself along
    edges only and a single extra layer still pinches at corners; with
    ``depth >= 2`` the boundary is a manifold whose upper side is
    :func:`digital_plane`.
    """
    return [(x, y, -1 - x - y - k) for x in range(n) for y in range(n)
            for k in range(depth + 1)]


def digital_plane(n: int) -> SurfelSurface:
    """Patch of the standard digital plane ``x + y + z = 0``.

    It is the part of the boundary of the half space ``x + y + z < 0``
    formed by the ``+X, +Y, +Z`` faces of the voxels of
    :func:`digital_plane_voxels`. Projected along ``(1, 1, 1)`` it shows the
    familiar rhombus tiling.
    """
    return surface_from_surfels(
        Surfel(v, axis, 1) for v in digital_plane_voxels(n) for axis in range(3)
    )


def hollow_block(n: int = 3) -> list:
    """Voxels of an ``n^3`` block with its centre voxel removed."""
    c = n // 2
    return [v for v in itertools.product(range(n), repeat=3) if v != (c, c, c)]


def square_ring() -> list:
    """Eight voxels around an empty centre: a solid torus."""
    return [(x, y, 0) for x in range(3) for y in range(3) if (x, y) != (1, 1)]


def random_admissible_normals(surface: SurfelSurface, rng, spread: float = 0.6,
                              min_dot: float = 0.25) -> dict:
    """Random unit normals tilted away from each outward face normal.

    Every normal keeps ``dot(n, outward) >= min_dot`` so projections stay
    nondegenerate.
    """
    out = {}
    for s in surface.surfels:
        base = s.outward
        while True:
            n = base + spread * rng.normal(size=3)
            n /= np.linalg.norm(n)
            if n @ base >= min_dot:
                break
        out[s] = n
    return out
