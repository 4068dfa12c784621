"""Command line front end: ``surfel-riemann <command> --voxels FILE ...``.

Exit codes: 0 on success, 1 on an internal error, 2 on invalid input or a
validation failure (the message names the offending cell).
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

import numpy as np

from . import fileio, moves, solver
from .conformal import DEFAULT_EPS_LEN, DEFAULT_EPS_RE, compute_rho, validate_structure
from .double_graph import build_double_graph
from .errors import MalformedInput, SurfelRiemannError
from .operators import (energies, laplacian_closed_complex, laplacian_closed_real,
                        laplacian_compositional)
from .surface import euler_genus, extract_surface, surface_from_surfels
from .svg import image_svg

EMIT_CHOICES = ("json", "csv", "svg")


class Output:
    """Collects named artefacts and writes them to ``--out`` or stdout."""

    def __init__(self, args):
        self.out = Path(args.out) if args.out else None
        self.emit = args.emit
        self.files: list[tuple[str, str, str]] = []

    def add(self, kind: str, name: str, text: str):
        if kind in self.emit:
            self.files.append((kind, name, text))

    def flush(self):
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)
            for _kind, name, text in self.files:
                (self.out / name).write_text(text)
        else:
            for kind, name, text in self.files:
                if kind != "svg":
                    sys.stdout.write(f"# {name}\n{text}")


def _parse_emit(text: str) -> tuple:
    items = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [t for t in items if t not in EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emit target(s): {', '.join(bad)}")
    return items


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _direction(text: str) -> np.ndarray:
    try:
        d = np.array([float(c) for c in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError("expected nx,ny,nz") from None
    if d.shape != (3,) or not np.linalg.norm(d) > 0:
        raise argparse.ArgumentTypeError("expected a nonzero nx,ny,nz")
    return d


def _surface(args):
    voxels = fileio.read_voxels(args.voxels)
    surface = extract_surface(voxels)
    kept = list(surface.surfels)
    if args.facing is not None:
        kept = [s for s in kept if s.outward @ args.facing > 0]
    if args.patch:
        if not args.normals:
            raise MalformedInput("--patch needs --normals")
        listed = fileio.read_normals(args.normals)
        kept = [s for s in kept if s in listed]
    if len(kept) != surface.n_surfels:
        if not kept:
            raise MalformedInput("surfel selection is empty")
        surface = surface_from_surfels(kept)
    return surface


def _structure(args):
    surface = _surface(args)
    graph = build_double_graph(surface)
    normals = None
    if args.normals:
        normals = fileio.normals_for(surface.surfels, fileio.read_normals(args.normals))
    st = compute_rho(graph, normals, eps_re=args.eps_re, eps_len=args.eps_len)
    return surface, graph, st


def _pins(args, required: bool):
    if args.pins:
        return fileio.parse_pins(args.pins)
    if required:
        return solver.BoundaryCondition({})
    return None


def cmd_extract(args, out: Output) -> int:
    surface = _surface(args)
    graph = build_double_graph(surface)
    ec = euler_genus(surface)
    genus = "-" if ec.genus is None else str(ec.genus)
    line = f"V={ec.V} E={ec.E} F={ec.F} genus={genus}"
    if ec.boundary_edgels:
        line += f" boundary_edgels={ec.boundary_edgels}"
    print(line)
    out.add("json", "surface.json", fileio.dumps_json({
        "counts": ec._asdict(),
        "surface": surface.to_dict(),
    }))
    out.add("csv", "double_graph.txt", graph.dump())
    return 0


def cmd_ratios(args, out: Output) -> int:
    _surface_, graph, st = _structure(args)
    report = validate_structure(st)
    keys = graph.edge_keys()
    rows = [(k, *fileio.complex_fields(r)) for k, r in zip(keys, st.rho)]
    out.add("csv", "rho.csv", fileio.csv_text(["edge-key", "re", "im"], rows))
    out.add("json", "validation.json", fileio.dumps_json({
        "ok": report.ok,
        "offenses": [{"edge": k, "kind": kind, "value": v} for k, kind, v in report.offenses],
    }))
    print(f"edges={graph.n_edges} valid={'yes' if report.ok else 'no'}")
    return 0 if report.ok else 2


def cmd_laplacian(args, out: Output) -> int:
    _surface_, graph, st = _structure(args)
    build = {"complex": laplacian_closed_complex, "real": laplacian_closed_real,
             "compositional": laplacian_compositional}[args.kind]
    op = build(st)
    out.add("csv", f"laplacian_{args.kind}.csv", fileio.operator_csv(op))
    out.add("json", "laplacian.json", fileio.dumps_json({
        "kind": args.kind, "shape": list(op.shape), "nnz": int(op.matrix.nnz),
        "sign_convention": op.meta.get("sign_convention"),
    }))
    print(f"kind={args.kind} shape={op.shape[0]}x{op.shape[1]} nnz={op.matrix.nnz}")
    return 0


def cmd_solve(args, out: Output) -> int:
    _surface_, graph, st = _structure(args)
    bc = _pins(args, required=True)
    if args.bc:
        bc = solver.BoundaryCondition({**bc.values, **fileio.read_boundary_values(args.bc)})
    f = solver.solve_dirichlet(st, bc, laplacian=args.laplacian, tol=args.tol)
    harm = solver.harmonicity_report(f, st)
    pinned, _vals = bc.resolve(graph)
    free = np.setdiff1d(np.arange(graph.n_vertices), pinned)
    out.add("csv", "solution.csv", fileio.solution_csv(f))
    out.add("json", "solve.json", fileio.dumps_json({
        "laplacian": args.laplacian,
        "pins": len(bc),
        "max_free_laplacian": float(np.max(harm[free], initial=0.0)),
        "energies": energies(f, st).as_dict(),
    }))
    out.add("svg", "image.svg", image_svg(f, st))
    print(f"solved {free.size} free corners")
    return 0


def cmd_parametrize(args, out: Output) -> int:
    _surface_, graph, st = _structure(args)
    pins = _pins(args, required=True)
    f, report = solver.parametrize(st, pins, tol=args.tol)
    out.add("csv", "uv.csv", fileio.solution_csv(f))
    out.add("json", "energy.json", fileio.dumps_json(report.as_dict()))
    out.add("svg", "image.svg", image_svg(f, st))
    e = report.energies
    print(f"dirichlet={e.dirichlet:.6g} conformal={e.conformal:.3g} area={e.area:.6g}")
    return 0


def cmd_energy(args, out: Output) -> int:
    _surface_, graph, st = _structure(args)
    if not args.function:
        raise MalformedInput("energy needs --function PATH")
    f = fileio.read_function(args.function, graph)
    rep = energies(f, st)
    out.add("json", "energy.json", fileio.dumps_json(rep.as_dict()))
    print(f"dirichlet={rep.dirichlet:.6g} conformal={rep.conformal:.6g} area={rep.area:.6g}")
    return 0


def cmd_flip_check(args, out: Output) -> int:
    _surface_, graph, st = _structure(args)
    f = None
    if args.pins:
        f, _rep = solver.parametrize(st, fileio.parse_pins(args.pins), tol=args.tol)
    chi = graph.euler_characteristic()
    entries = []
    worst = 0.0
    for c in moves.flippable_corners(graph):
        entry = {"corner": graph.vertex_keys()[c]}
        try:
            hexa = moves.find_hexagon(st, c)
            flipped, new_hex = moves.apply_flip(st, c)
        except SurfelRiemannError as exc:
            entry["skipped"] = f"{type(exc).__name__}: {exc}"
            entries.append(entry)
            continue
        back, _h = moves.apply_flip(flipped, c)
        res = moves.star_triangle_residuals(hexa.triangle_rho, new_hex.star_rho)
        entry.update({
            "star_triangle_residuals": list(res),
            "round_trip": float(np.max(np.abs(back.rho - st.rho))),
            "euler_preserved": flipped.graph.euler_characteristic() == chi,
        })
        worst = max(worst, *res, entry["round_trip"])
        if f is not None:
            _v, resid = moves.flip_extend(new_hex, f.values[list(new_hex.rim)])
            entry["extension_residual"] = resid
        entries.append(entry)
    out.add("json", "flip_check.json", fileio.dumps_json({
        "hexagons": entries, "max_identity_residual": worst,
    }))
    done = sum(1 for e in entries if "skipped" not in e)
    print(f"hexagons={len(entries)} flipped={done} max_residual={worst:.3g}")
    return 0


SUMMARIES = {
    "extract": "boundary surface of the voxels: counts, genus, double graph",
    "ratios": "conformal ratio of every diagonal, with validation",
    "laplacian": "sparse Laplacian as keyed triplets",
    "solve": "Dirichlet problem from --pins and/or --bc",
    "parametrize": "conformal map minimising the conformal energy",
    "energy": "Dirichlet and conformal energy and area of a --function",
    "flip-check": "star-triangle and flip extension checks on every hexagon",
}

COMMANDS = {
    "extract": cmd_extract,
    "ratios": cmd_ratios,
    "laplacian": cmd_laplacian,
    "solve": cmd_solve,
    "parametrize": cmd_parametrize,
    "energy": cmd_energy,
    "flip-check": cmd_flip_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--voxels", required=True, help="voxel file, one 'x y z' per line")
    common.add_argument("--normals", help="normals file, 'x y z F nx ny nz' per line")
    common.add_argument("--facing", type=_direction, metavar="NX,NY,NZ",
                        help="keep only surfels whose outward normal has a positive "
                             "component along this direction")
    common.add_argument("--patch", action="store_true",
                        help="keep only the surfels listed in the normals file")
    common.add_argument("--pins", help="pinned values 'cx,cy,cz=re,im;...'")
    common.add_argument("--tol", type=_positive, default=solver.DEFAULT_TOL,
                        help="residual bound for linear solves (default %(default)g)")
    common.add_argument("--eps-re", type=_positive, default=DEFAULT_EPS_RE,
                        help="smallest accepted Re rho (default %(default)g)")
    common.add_argument("--eps-len", type=_positive, default=DEFAULT_EPS_LEN,
                        help="smallest projected diagonal length (default %(default)g)")
    common.add_argument("--out", help="output directory (default: print to stdout)")
    common.add_argument("--emit", type=_parse_emit, default=("json", "csv"),
                        help="comma-separated subset of json,csv,svg")

    parser = argparse.ArgumentParser(
        prog="surfel-riemann",
        description="Discrete conformal structures on voxel surfaces.",
        epilog="exit codes: 0 success, 1 internal error, 2 invalid input or failed validation",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=SUMMARIES[name],
                           description=SUMMARIES[name])
        if name == "laplacian":
            p.add_argument("--kind", choices=("complex", "real", "compositional"),
                           default="complex")
        if name == "solve":
            p.add_argument("--laplacian", choices=("complex", "real"), default="complex")
            p.add_argument("--bc", help="boundary values as CSV 'cx,cy,cz,re,im'")
        if name == "energy":
            p.add_argument("--function", help="function CSV ('cell-key,re,im' or 'cx,cy,cz,re,im')")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    out = Output(args)
    try:
        code = COMMANDS[args.command](args, out)
    except (SurfelRiemannError, OSError) as exc:
        name = type(exc).__name__
        msg = str(exc)
        if not msg.startswith(name):
            msg = f"{name}: {msg}"
        print(msg, file=sys.stderr)
        return 2
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return 1
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
