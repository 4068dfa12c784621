import numpy as np
import pytest

from surfel_riemann import solver
from surfel_riemann.conformal import ConformalStructure, compute_rho, tangent_frame
from surfel_riemann.dec import Cochain, function
from surfel_riemann.double_graph import build_double_graph
from surfel_riemann.errors import MalformedInput, NotRealStructure, SingularSystem, Underconstrained
from surfel_riemann.operators import energies
from surfel_riemann.shapes import digital_plane, flat_patch, random_admissible_normals
from surfel_riemann.solver import BoundaryCondition, parametrize, solve_dirichlet

from conftest import planar_identity, plane_projection


def boundary_bc(g, values):
    return BoundaryCondition({g.vertices[v]: values[v] for v in g.boundary_vertices})


def test_constant_boundary_gives_constant(flat6):
    _surf, g, st = flat6
    f = solve_dirichlet(st, boundary_bc(g, np.full(g.n_vertices, 2 - 1j)))
    assert np.max(np.abs(f.values - (2 - 1j))) <= 1e-12


@pytest.mark.parametrize("laplacian", ["complex", "real"])
def test_harmonic_interpolation_of_re_z(flat6, laplacian):
    _surf, g, st = flat6
    x = planar_identity(g).values.real
    f = solve_dirichlet(st, boundary_bc(g, x), laplacian=laplacian)
    assert np.max(np.abs(f.values - x)) <= 1e-10
    assert np.max(np.abs(f.values.imag)) <= 1e-12


def test_maximum_principle(rng):
    g = build_double_graph(flat_patch(5))
    for _ in range(20):
        st = ConformalStructure.from_primal(g, rng.uniform(0.1, 5.0, g.n_surfels))
        vals = rng.normal(size=g.n_vertices)
        f = solve_dirichlet(st, boundary_bc(g, vals), laplacian="real")
        b = vals[g.boundary_vertices]
        inner = f.values[g.interior_vertices].real
        assert np.all(inner >= b.min() - 1e-12) and np.all(inner <= b.max() + 1e-12)


def test_dirichlet_on_a_complex_structure(rng):
    surf = digital_plane(6)
    g = build_double_graph(surf)
    st = compute_rho(g, random_admissible_normals(surf, rng, spread=0.3))
    vals = rng.normal(size=g.n_vertices) + 1j * rng.normal(size=g.n_vertices)
    f = solve_dirichlet(st, boundary_bc(g, vals))
    harm = solver.harmonicity_report(f, st)
    assert np.max(harm[g.interior_vertices]) <= 1e-10
    assert np.array_equal(f.values[g.boundary_vertices], vals[g.boundary_vertices])
    with pytest.raises(NotRealStructure):
        solve_dirichlet(st, boundary_bc(g, vals), laplacian="real")


def test_unpinned_colour_is_singular(flat6):
    _surf, g, st = flat6
    blacks = [v for v in g.boundary_vertices if g.black[v]]
    bc = BoundaryCondition({g.vertices[v]: 1.0 for v in blacks})
    with pytest.raises(SingularSystem, match="no pinned corner"):
        solve_dirichlet(st, bc, laplacian="real")
    with pytest.raises(SingularSystem):
        solve_dirichlet(st, BoundaryCondition({}))


def test_unknown_pin_is_reported(flat6):
    with pytest.raises(MalformedInput, match="v:99:0:0"):
        solve_dirichlet(flat6[2], BoundaryCondition({(99, 0, 0): 1.0}))


def test_parametrize_flat_patch(flat6):
    _surf, g, st = flat6
    z = planar_identity(g)
    f, rep = parametrize(st, BoundaryCondition({(0, 0, 1): 0, (6, 6, 1): 6 + 6j}))
    assert np.max(np.abs(f.values - z.values)) <= 1e-10
    assert rep.energies.conformal <= 1e-20
    assert rep.residual <= 1e-10
    assert rep.n_unknowns == 2 * (g.n_vertices - 2)


def test_parametrize_plane_up_to_similitude(plane8):
    _surf, g, st = plane8
    Z = plane_projection(g)
    pins = BoundaryCondition({g.vertices[0]: 0, g.vertices[-1]: 1})
    f, rep = parametrize(st, pins)
    assert rep.energies.conformal <= 1e-16 * rep.energies.dirichlet
    _a, _b, rms = solver.similitude_fit(f.values, Z.values)
    assert rms <= 1e-8


def test_parametrize_needs_two_pins(flat6):
    with pytest.raises(Underconstrained):
        parametrize(flat6[2], BoundaryCondition({(0, 0, 1): 0}))


def test_similitude_covariance(rng, plane8):
    surf, g, _st = plane8
    st = compute_rho(g, random_admissible_normals(surf, rng, spread=0.2))
    i, j = 0, g.n_vertices - 1
    f, rep = parametrize(st, BoundaryCondition({g.vertices[i]: 0, g.vertices[j]: 1}))
    a, b = 2.0 - 1.5j, 0.3 + 4j
    moved = BoundaryCondition({g.vertices[i]: b, g.vertices[j]: a + b})
    h, rep2 = parametrize(st, moved)
    assert np.max(np.abs(h.values - (a * f.values + b))) <= 1e-8 * abs(a)
    assert rep2.energies.conformal == pytest.approx(abs(a) ** 2 * rep.energies.conformal, rel=1e-8)


def test_never_worse_than_the_projection(rng):
    surf = digital_plane(6)
    g = build_double_graph(surf)
    n = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
    e1, e2 = tangent_frame(n)
    Z = function(g, lambda p: p @ e1 + 1j * (p @ e2))
    for _ in range(5):
        st = compute_rho(g, random_admissible_normals(surf, rng, spread=0.3))
        pins = BoundaryCondition.from_function(Z, [0, g.n_vertices - 1])
        f, rep = parametrize(st, pins)
        assert rep.energies.conformal <= energies(Z, st).conformal + 1e-12


def test_harmonicity_report(rng, flat6):
    _surf, g, st = flat6
    const = Cochain(g, 0, np.full(g.n_vertices, 3.0))
    assert np.all(solver.harmonicity_report(const, st) == 0)
    rnd = Cochain(g, 0, rng.normal(size=g.n_vertices))
    assert np.max(solver.harmonicity_report(rnd, st)) > 1e-3


def test_solve_report_dict(flat6):
    _f, rep = parametrize(flat6[2], BoundaryCondition({(0, 0, 1): 0, (6, 6, 1): 6 + 6j}))
    d = rep.as_dict()
    assert d["method"] == "splu"
    assert set(d["energies"]) == {"dirichlet", "conformal", "area", "identity_residual"}
