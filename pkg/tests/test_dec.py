import numpy as np
import pytest

from surfel_riemann.conformal import ConformalStructure, compute_rho
from surfel_riemann.dec import (Cochain, check_derivation, coboundary, form_type, function,
                                hodge_star, is_holomorphic_form, residue, times,
                                type_decompose, wedge, zeros)
from surfel_riemann.double_graph import build_double_graph
from surfel_riemann.errors import DimensionError
from surfel_riemann.shapes import cube, flat_patch, random_admissible_normals

from conftest import planar_identity, plane_projection


def random_cochain(g, degree, rng):
    n = g.n_cells(degree)
    return Cochain(g, degree, rng.normal(size=n) + 1j * rng.normal(size=n))


def random_structure(surf, rng):
    return compute_rho(build_double_graph(surf), random_admissible_normals(surf, rng))


def test_star_squared_is_minus_one_on_forms(rng):
    surf = cube()
    for _ in range(10):
        st = random_structure(surf, rng)
        a = random_cochain(st.graph, 1, rng)
        assert (hodge_star(hodge_star(a, st), st) + a).max_abs() <= 1e-12


def test_star_on_functions_and_two_forms(rng, cube_graph):
    st = compute_rho(cube_graph)
    f = random_cochain(cube_graph, 0, rng)
    w = random_cochain(cube_graph, 2, rng)
    assert hodge_star(f, st).degree == 2
    assert np.array_equal(hodge_star(hodge_star(f, st), st).values, f.values)
    assert np.array_equal(hodge_star(w, st).values, w.values)


def test_star_on_a_flat_surfel_rotates_diagonals(cube_graph):
    # with rho = 1: *(x,x') = (y,y') on the dual and *(y,y') = -(x,x')
    st = compute_rho(cube_graph)
    F = cube_graph.n_surfels
    a = zeros(cube_graph, 1)
    vals = a.values.copy()
    vals[0] = 1.0
    star = hodge_star(Cochain(cube_graph, 1, vals), st).values
    assert star[F] == pytest.approx(1.0)
    assert star[0] == pytest.approx(0.0)


def test_type_decomposition(rng):
    st = random_structure(cube(), rng)
    a = random_cochain(st.graph, 1, rng)
    a10, a01 = type_decompose(a, st)
    assert (a10 + a01 - a).max_abs() <= 1e-12
    assert (hodge_star(a10, st) + 1j * a10).max_abs() <= 1e-12
    assert (hodge_star(a01, st) - 1j * a01).max_abs() <= 1e-12
    assert form_type(a10, st) == "(1,0)"
    assert form_type(a01, st) == "(0,1)"
    assert form_type(a, st) == "mixed"


def test_derivative_of_a_holomorphic_function(plane8):
    _surf, g, st = plane8
    z = plane_projection(g)
    ok, res = is_holomorphic_form(coboundary(z), st)
    assert ok and res <= 1e-12
    ok, _ = is_holomorphic_form(coboundary(z.conj()), st)
    assert not ok
    assert form_type(coboundary(z.conj()), st) == "(0,1)"


def test_stokes_on_edges(rng, cube_graph):
    f = random_cochain(cube_graph, 0, rng)
    df = coboundary(f)
    for e, (a, b) in enumerate(cube_graph.edges):
        assert df.values[e] == pytest.approx(f.values[b] - f.values[a])
        va, vb = cube_graph.vertices[a], cube_graph.vertices[b]
        assert df.integrate(vb, va) == pytest.approx(-df.values[e])


def test_exact_forms_are_closed(rng, cube_graph):
    f = random_cochain(cube_graph, 0, rng)
    assert coboundary(coboundary(f)).max_abs() <= 1e-12
    with pytest.raises(DimensionError):
        coboundary(coboundary(coboundary(f)))


def test_residue_locates_a_perturbation(plane8):
    _surf, g, st = plane8
    alpha = coboundary(plane_projection(g))
    interior = g.interior_vertices
    assert max(abs(residue(alpha, int(v))) for v in interior) <= 1e-12
    # perturb a dual diagonal in the middle of the patch
    s = next(s for s, q in enumerate(g.quads) if all(g.face_closed[q]))
    e = s + g.n_surfels
    vals = alpha.values.copy()
    vals[e] += 0.25
    bumped = Cochain(g, 1, vals)
    res = {int(v): residue(bumped, int(v)) for v in interior}
    nonzero = {v: r for v, r in res.items() if abs(r) > 1e-12}
    q = g.quads[s]
    assert set(nonzero) == {int(q[0]), int(q[2])}
    assert sorted(r.real for r in nonzero.values()) == pytest.approx([-0.25, 0.25])
    key = "f:" + ":".join(map(str, g.vertices[q[0]]))
    assert residue(bumped, key) == nonzero[int(q[0])]


def test_residue_warns_for_mixed_forms(rng, plane8):
    _surf, g, st = plane8
    with pytest.warns(UserWarning, match="type"):
        residue(random_cochain(g, 1, rng), 0, st)


def test_wedge_is_antisymmetric(rng, cube_graph):
    a = random_cochain(cube_graph, 1, rng)
    b = random_cochain(cube_graph, 1, rng)
    assert np.allclose(wedge(a, b), -wedge(b, a))
    assert np.allclose(wedge(a, a), 0)


def test_wedge_of_coordinate_differentials_is_the_area():
    g = build_double_graph(flat_patch(3))
    x = coboundary(function(g, lambda p: p[0]))
    y = coboundary(function(g, lambda p: p[1]))
    assert np.allclose(wedge(x, y), 1.0)


def test_leibniz_rules_hold_for_affine_data():
    g = build_double_graph(flat_patch(5))
    f = function(g, lambda p: 2 * p[0] - p[1] + 1)
    h = function(g, lambda p: 0.5 * p[0] + 3j * p[1])
    alpha = coboundary(function(g, lambda p: p[0] + 2 * p[1]))
    assert check_derivation(f, h, alpha) <= 1e-12


def test_product_rule_for_functions_is_exact(rng, cube_graph):
    f = random_cochain(cube_graph, 0, rng)
    h = random_cochain(cube_graph, 0, rng)
    lhs = coboundary(Cochain(cube_graph, 0, f.values * h.values))
    rhs = times(f, coboundary(h)) + times(h, coboundary(f))
    assert (lhs - rhs).max_abs() <= 1e-12


def test_cochain_validation(cube_graph):
    with pytest.raises(ValueError):
        Cochain(cube_graph, 0, np.zeros(3))
    with pytest.raises(DimensionError):
        Cochain(cube_graph, 3, np.zeros(8))
    with pytest.raises(DimensionError):
        zeros(cube_graph, 0) + zeros(cube_graph, 2)
    with pytest.raises(DimensionError):
        wedge(zeros(cube_graph, 0), zeros(cube_graph, 1))


def test_identity_is_holomorphic_on_flat_patch(flat6):
    _surf, g, st = flat6
    ok, res = is_holomorphic_form(coboundary(planar_identity(g)), st)
    assert ok and res == 0.0


def test_keys_and_values(cube_graph):
    f = function(cube_graph, lambda p: p.sum())
    d = f.by_key()
    assert d["v:1:1:1"] == 3
    st = ConformalStructure.from_primal(cube_graph, np.ones(6))
    assert hodge_star(f, st).by_key()["f:1:1:1"] == 3
