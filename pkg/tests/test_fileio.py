import numpy as np
import pytest

from surfel_riemann import fileio
from surfel_riemann.dec import Cochain
from surfel_riemann.errors import MalformedInput
from surfel_riemann.operators import laplacian_closed_complex
from surfel_riemann.conformal import compute_rho
from surfel_riemann.surface import Surfel


def test_voxel_file(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("# header\n0 0 0\n\n1 0 0\n0 0 0\n")
    assert fileio.read_voxels(p) == [(0, 0, 0), (1, 0, 0)]
    p.write_text("0 0\n")
    with pytest.raises(MalformedInput, match=":1:"):
        fileio.read_voxels(p)


def test_normals_round_trip(tmp_path):
    normals = {Surfel((0, 1, 2), 0, -1): np.array([-1.0, 0.25, 1e-3]),
               Surfel((0, 0, 0), 2, 1): np.array([0.1, 0.2, 0.9])}
    p = tmp_path / "n.txt"
    fileio.write_normals(p, normals)
    back = fileio.read_normals(p)
    assert set(back) == set(normals)
    for s in normals:
        assert np.array_equal(back[s], normals[s])


def test_normals_errors(tmp_path):
    p = tmp_path / "n.txt"
    p.write_text("0 0 0 +W 0 0 1\n")
    with pytest.raises(MalformedInput):
        fileio.read_normals(p)
    p.write_text("0 0 0 +Z 0 0 0\n")
    with pytest.raises(MalformedInput, match="nonzero"):
        fileio.read_normals(p)


def test_pins():
    bc = fileio.parse_pins("0,0,1=0,0; 6,6,1=6.5,-2")
    assert bc.values == {(0, 0, 1): 0, (6, 6, 1): 6.5 - 2j}
    with pytest.raises(MalformedInput):
        fileio.parse_pins("0,0=1,1")


def test_function_csv_round_trip(tmp_path, rng, cube_graph):
    f = Cochain(cube_graph, 0, rng.normal(size=8) + 1j * rng.normal(size=8))
    p = tmp_path / "f.csv"
    p.write_text(fileio.cochain_csv(f))
    assert np.array_equal(fileio.read_function(p, cube_graph).values, f.values)
    p.write_text(fileio.solution_csv(f))
    assert np.array_equal(fileio.read_function(p, cube_graph).values, f.values)


def test_function_csv_errors(tmp_path, cube_graph):
    p = tmp_path / "f.csv"
    p.write_text("cell-key,re,im\nv:0:0:0,1,0\n")
    with pytest.raises(MalformedInput, match="v:1:1:1"):
        fileio.read_function(p, cube_graph)
    p.write_text("v:5:5:5,1,0\n")
    with pytest.raises(MalformedInput, match="unknown cell keys: v:5:5:5"):
        fileio.read_function(p, cube_graph)
    p.write_text("v:0:0:0,one,0\n")
    with pytest.raises(MalformedInput, match="bad number"):
        fileio.read_function(p, cube_graph)


def test_operator_csv(cube_graph):
    text = fileio.operator_csv(laplacian_closed_complex(compute_rho(cube_graph)))
    lines = text.splitlines()
    assert lines[0] == "row-key,col-key,re,im"
    assert lines[1] == "v:0:0:0,v:0:0:0,3.0,0.0"
    assert len(lines) == 1 + 32


def test_json_is_canonical():
    a = fileio.dumps_json({"b": 1 + 2j, "a": np.float64(0.5), "c": np.arange(2)})
    assert a == fileio.dumps_json({"c": [0, 1], "a": 0.5, "b": complex(1, 2)})
    assert '"schema": "surfel-riemann/1"' in a
