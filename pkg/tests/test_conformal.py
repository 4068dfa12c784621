import re

import numpy as np
import pytest

from surfel_riemann.conformal import (ConformalStructure, compute_rho, estimate_normals,
                                      project_surfel, ratio_of, tangent_frame,
                                      validate_structure)
from surfel_riemann.double_graph import build_double_graph
from surfel_riemann.errors import DegenerateProjection, NonPositiveRealPart, SingularStar
from surfel_riemann.shapes import (cube, digital_plane, flat_patch, random_admissible_normals,
                                   square_ring)
from surfel_riemann.surface import Surfel, extract_surface

from conftest import PLANE_NORMAL

SQRT3 = np.sqrt(3.0)


def rho_oracle(cycle, normal):
    """Ratio from lengths and the signed angle of the projected diagonals."""
    n = np.asarray(normal, float) / np.linalg.norm(normal)
    c = np.asarray(cycle, float)
    p, d = c[2] - c[0], c[3] - c[1]
    p, d = p - (p @ n) * n, d - (d @ n) * n
    theta = np.arctan2(n @ np.cross(p, d), p @ d)
    return np.linalg.norm(d) / np.linalg.norm(p) * np.exp(1j * (theta - np.pi / 2))


def test_flat_patch_ratios_are_one():
    g = build_double_graph(flat_patch(5, 3))
    st = compute_rho(g)
    assert np.max(np.abs(st.rho - 1)) <= 1e-12


def test_every_face_direction_gives_one():
    st = compute_rho(build_double_graph(cube()))
    assert np.max(np.abs(st.rho - 1)) <= 1e-12


def test_standard_plane_ratios(plane8):
    _surf, g, st = plane8
    for s in range(g.n_surfels):
        pair = sorted([st.rho[s].real, st.rho[s + g.n_surfels].real])
        assert pair == pytest.approx([1 / SQRT3, SQRT3], abs=1e-12)
    assert np.max(np.abs(st.rho.imag)) <= 1e-12


def test_plane_ratio_depends_on_face_only(plane8):
    _surf, g, st = plane8
    by_face = {}
    for s, surfel in enumerate(g.surfels):
        by_face.setdefault(surfel.face, set()).add(round(st.primal[s].real, 10))
    assert all(len(v) == 1 for v in by_face.values())


def test_ratios_match_independent_oracle(rng):
    surf = extract_surface(square_ring())
    g = build_double_graph(surf)
    normals = random_admissible_normals(surf, rng)
    st = compute_rho(g, normals)
    for s, surfel in enumerate(g.surfels):
        cyc = [g.vertices[i] for i in g.quads[s]]
        assert st.primal[s] == pytest.approx(rho_oracle(cyc, normals[surfel]), abs=1e-12)


def test_ratio_does_not_depend_on_the_frame(rng):
    s = Surfel((0, 0, 0), 2, 1)
    cyc = [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    n = np.array([0.3, -0.2, 1.0])
    e1, e2 = tangent_frame(n)
    base = ratio_of(project_surfel(s, cyc, n))
    for t in rng.uniform(0, 2 * np.pi, 5):
        f1 = np.cos(t) * e1 + np.sin(t) * e2
        f2 = -np.sin(t) * e1 + np.cos(t) * e2
        assert ratio_of(project_surfel(s, cyc, n, frame=(f1, f2))) == pytest.approx(base, abs=1e-14)


def test_dual_ratio_is_the_inverse(rng):
    surf = cube()
    st = compute_rho(build_double_graph(surf), random_admissible_normals(surf, rng))
    F = st.graph.n_surfels
    assert np.max(np.abs(st.rho[:F] * st.rho[F:] - 1)) <= 1e-12
    assert np.all(st.rho.real > 0)
    assert validate_structure(st).ok


def test_normal_in_the_surfel_plane_is_degenerate():
    surf = cube()
    top = Surfel((0, 0, 0), 2, 1)
    with pytest.raises(DegenerateProjection, match=re.escape(top.label)):
        compute_rho(build_double_graph(surf), {top: np.array([1.0, 0.0, 0.0])})


def test_inward_normal_is_rejected():
    surf = cube()
    top = Surfel((0, 0, 0), 2, 1)
    with pytest.raises(NonPositiveRealPart, match=re.escape(top.label)):
        compute_rho(build_double_graph(surf), {top: -top.outward})


def test_missing_normals_fall_back_with_warning():
    surf = cube()
    top = Surfel((0, 0, 0), 2, 1)
    with pytest.warns(UserWarning, match="5 surfels"):
        st = compute_rho(build_double_graph(surf), {top: np.array([0.1, 0.0, 1.0])})
    assert np.count_nonzero(np.abs(st.primal - 1) > 1e-12) == 1


def test_estimated_normals_approach_the_plane_normal():
    surf = digital_plane(16)
    normals = estimate_normals(surf, radius=4)
    inner = [normals[s] for s in surf.surfels if 5 <= s.voxel[0] < 11 and 5 <= s.voxel[1] < 11]
    assert max(np.linalg.norm(v - PLANE_NORMAL) for v in inner) < 0.12
    # radius 0 is the face normal
    assert all(np.array_equal(v, s.outward) for s, v in estimate_normals(surf, 0).items())


def test_validation_reports_offences(cube_graph):
    F = cube_graph.n_surfels
    rho = np.ones(2 * F, dtype=complex)
    rho[F] = 2.0
    rho[1] = -0.5
    rho[F + 1] = -2.0
    report = validate_structure(ConformalStructure(cube_graph, rho))
    assert not report.ok
    assert report.kinds() == {"DualityInversion", "NonPositiveRealPart"}


def test_star_needs_positive_real_part(cube_graph):
    st = ConformalStructure.from_primal(cube_graph, np.full(6, 1j))
    with pytest.raises(SingularStar):
        st.hodge1
