import numpy as np
import pytest

from surfel_riemann.conformal import compute_rho, tangent_frame
from surfel_riemann.dec import function
from surfel_riemann.double_graph import build_double_graph
from surfel_riemann.shapes import cube, digital_plane, flat_patch

PLANE_NORMAL = np.ones(3) / np.sqrt(3)

# filled by tests/test_acceptance.py, echoed at the end of the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def cube_graph():
    return build_double_graph(cube())


@pytest.fixture(scope="session")
def flat6():
    surf = flat_patch(6)
    g = build_double_graph(surf)
    return surf, g, compute_rho(g)


@pytest.fixture(scope="session")
def plane8():
    surf = digital_plane(8)
    g = build_double_graph(surf)
    st = compute_rho(g, {s: PLANE_NORMAL for s in surf.surfels})
    return surf, g, st


def planar_identity(graph):
    return function(graph, lambda p: p[0] + 1j * p[1])


def plane_projection(graph):
    """Corner positions projected along the plane normal, in the frame used for ratios."""
    e1, e2 = tangent_frame(PLANE_NORMAL)
    return function(graph, lambda p: p @ e1 + 1j * (p @ e2))


def write_cli_inputs(root):
    """Voxel, normal and function files used by the command line tests."""
    from surfel_riemann import fileio
    from surfel_riemann.shapes import digital_plane, digital_plane_slab

    root.mkdir(parents=True, exist_ok=True)
    paths = {k: root / f"{k}.txt" for k in
             ("cube", "empty", "pair", "inplane", "slab", "plane", "plane_normals", "tilted")}
    fileio.write_voxels(paths["cube"], [(0, 0, 0)])
    paths["empty"].write_text("# nothing here\n")
    fileio.write_voxels(paths["pair"], [(0, 0, 0), (1, 1, 0)])
    paths["inplane"].write_text("0 0 0 +Z 1 0 0\n")
    fileio.write_voxels(paths["slab"], [(i, j, 0) for i in range(6) for j in range(6)])
    fileio.write_voxels(paths["plane"], digital_plane_slab(8))
    fileio.write_normals(paths["plane_normals"],
                         {s: PLANE_NORMAL for s in digital_plane(8).surfels})
    paths["tilted"].write_text("0 0 0 +Z 0.2 -0.1 1\n0 0 0 -X -1 0.3 0.2\n")
    func = root / "function.csv"
    rng = np.random.default_rng(7)
    corners = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    lines = ["cell-key,re,im"] + [f"v:{x}:{y}:{z},{rng.normal()!r},{rng.normal()!r}"
                                  for x, y, z in corners]
    func.write_text("\n".join(lines) + "\n")
    paths["function"] = func
    return paths
