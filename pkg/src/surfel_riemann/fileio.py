"""Text formats read and written by the command line tool.

Floats are written with :func:`repr`, which round-trips exactly, so two
runs on the same input produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .dec import Cochain
from .double_graph import DoubleGraph, vertex_key
from .errors import MalformedInput
from .operators import SparseOperator
from .solver import BoundaryCondition
from .surface import Surfel

SCHEMA = "surfel-riemann/1"


def _lines(path):
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def read_voxels(path) -> list:
    """``x y z`` integers per line; ``#`` comments and duplicates dropped."""
    seen = set()
    out = []
    for lineno, line in _lines(path):
        parts = line.split()
        try:
            if len(parts) != 3:
                raise ValueError
            v = tuple(int(p) for p in parts)
        except ValueError:
            raise MalformedInput(f"{path}:{lineno}: expected 'x y z', got {line!r}") from None
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def write_voxels(path, voxels) -> None:
    Path(path).write_text("".join(f"{x} {y} {z}\n" for x, y, z in voxels))


def read_normals(path) -> dict:
    """``x y z F nx ny nz`` per line, keyed by :class:`Surfel`."""
    out = {}
    for lineno, line in _lines(path):
        parts = line.split()
        try:
            if len(parts) != 7:
                raise ValueError
            s = Surfel.from_face(tuple(int(p) for p in parts[:3]), parts[3])
            n = np.array([float(p) for p in parts[4:]])
        except ValueError:
            raise MalformedInput(
                f"{path}:{lineno}: expected 'x y z F nx ny nz', got {line!r}"
            ) from None
        if not np.all(np.isfinite(n)) or np.linalg.norm(n) == 0:
            raise MalformedInput(f"{path}:{lineno}: normal must be finite and nonzero")
        out[s] = n
    return out


def write_normals(path, normals: dict) -> None:
    rows = []
    for s in sorted(normals):
        x, y, z = s.voxel
        n = [float(c) for c in normals[s]]
        rows.append(f"{x} {y} {z} {s.face} {n[0]!r} {n[1]!r} {n[2]!r}\n")
    Path(path).write_text("".join(rows))


def normals_for(surfels, normals: dict) -> dict:
    """Restrict ``normals`` to ``surfels``; the rest fall back to face normals later."""
    return {s: normals[s] for s in surfels if s in normals}


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def complex_fields(v) -> tuple[str, str]:
    """Round-trippable text for the real and imaginary parts (no negative zero)."""
    v = complex(v)
    return repr(v.real + 0.0), repr(v.imag + 0.0)


def cochain_csv(c: Cochain) -> str:
    keys = c.graph.cell_keys(c.degree)
    return csv_text(["cell-key", "re", "im"],
                     [(k, *complex_fields(v)) for k, v in zip(keys, c.values)])


def operator_csv(op: SparseOperator) -> str:
    return csv_text(["row-key", "col-key", "re", "im"],
                     [(r, c, *complex_fields(v)) for r, c, v in op.triplets()])


def solution_csv(f: Cochain) -> str:
    rows = []
    for p, v in zip(f.graph.vertices, f.values):
        rows.append((*(str(int(c)) for c in p), *complex_fields(v)))
    return csv_text(["cx", "cy", "cz", "re", "im"], rows)


def _parse_complex(re_s: str, im_s: str, where: str) -> complex:
    try:
        return complex(float(re_s), float(im_s))
    except ValueError:
        raise MalformedInput(f"{where}: bad number {re_s!r}, {im_s!r}") from None


def read_function(path, graph: DoubleGraph) -> Cochain:
    """Function on the corners from ``cell-key,re,im`` or ``cx,cy,cz,re,im`` rows.

    Raises
    ------
    MalformedInput
        Bad rows, unknown corners or corners without a value (all listed).
    """
    idx = graph.vertex_index
    values: dict = {}
    unknown = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            row = [c.strip() for c in row]
            if not row or not row[0] or row[0].startswith("#"):
                continue
            if lineno == 1 and row[0] in ("cell-key", "cx"):
                continue
            where = f"{path}:{lineno}"
            if len(row) == 3:
                parts = row[0].split(":")
                if parts[0] != "v" or len(parts) != 4:
                    raise MalformedInput(f"{where}: expected a vertex key, got {row[0]!r}")
                try:
                    p = tuple(int(c) for c in parts[1:])
                except ValueError:
                    raise MalformedInput(f"{where}: bad vertex key {row[0]!r}") from None
                val = _parse_complex(row[1], row[2], where)
            elif len(row) == 5:
                try:
                    p = tuple(int(c) for c in row[:3])
                except ValueError:
                    raise MalformedInput(f"{where}: bad corner {row[:3]!r}") from None
                val = _parse_complex(row[3], row[4], where)
            else:
                raise MalformedInput(f"{where}: expected 3 or 5 columns, got {len(row)}")
            if p not in idx:
                unknown.append(vertex_key(p))
                continue
            values[p] = val
    if unknown:
        raise MalformedInput("unknown cell keys: " + ", ".join(unknown))
    missing = [vertex_key(p) for p in graph.vertices if p not in values]
    if missing:
        raise MalformedInput("missing values for: " + ", ".join(missing))
    return Cochain(graph, 0, np.array([values[p] for p in graph.vertices]))


def read_boundary_values(path) -> dict:
    """Corner values from ``cx,cy,cz,re,im`` rows (header optional)."""
    out = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            row = [c.strip() for c in row]
            if not row or row[0] in ("", "cx") or row[0].startswith("#"):
                continue
            try:
                if len(row) != 5:
                    raise ValueError
                p = tuple(int(c) for c in row[:3])
                out[p] = complex(float(row[3]), float(row[4]))
            except ValueError:
                raise MalformedInput(f"{path}:{lineno}: expected 'cx,cy,cz,re,im'") from None
    return out


def parse_pins(text: str) -> BoundaryCondition:
    """``"cx,cy,cz=re,im;..."`` to a :class:`BoundaryCondition`."""
    out = {}
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        try:
            lhs, rhs = item.split("=")
            p = tuple(int(c) for c in lhs.split(","))
            re_s, im_s = rhs.split(",")
            if len(p) != 3:
                raise ValueError
            out[p] = complex(float(re_s), float(im_s))
        except ValueError:
            raise MalformedInput(f"bad pin {item!r}; expected 'cx,cy,cz=re,im'") from None
    return BoundaryCondition(out)


def dumps_json(data: dict) -> str:
    payload = {"schema": SCHEMA, **data}
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj
