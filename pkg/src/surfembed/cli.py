"""Command-line front end.

Every subcommand prints one JSON report on stdout and, unless ``--quiet``,
a short human summary on stderr.  Exit codes: 0 ok, 2 bad arguments,
3 invalid surface or map data, 4 no embedding plan.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .classification import MapDatum, dgf, dhat_bounds, lower_bound, upper_bound
from .errors import (
    DegenerateSpec,
    IndexMismatch,
    InvalidDatum,
    InvalidFamily,
    NoPlan,
    NonIntegralGenus,
    NotCovered,
    OutOfRange,
)
from .geometry import (
    embedding_plan,
    embedding_plans,
    equivariance_residual,
    family_plan,
    min_separation,
    sample_embedding,
    write_obj,
    write_point_cloud,
)
from .surfaces import (
    OrbifoldSignature,
    SurfaceSpec,
    boundary_action,
    fstar_family,
    orbifold_type,
    rh_euler_defect,
    top_type,
)
from .tracer import build_complex, orbit_check, trace

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NOPLAN = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


def _report(command: str, inputs: dict, outputs: dict, provenance) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "provenance": list(provenance),
        "version": __version__,
    }


# --- commands -----------------------------------------------------------------


def _spec(args) -> SurfaceSpec:
    return SurfaceSpec(args.p, args.q, args.variant)


def cmd_surface(args) -> tuple[dict, str]:
    spec = _spec(args)
    tt = top_type(spec)
    ba = boundary_action(spec)
    res = trace(build_complex(spec, mirror=args.mirror))
    oc = orbit_check(build_complex(spec, mirror=args.mirror))
    classes = sorted(c.homology_class for c in res.link_cycles)
    hc = tt.homology_class
    if args.mirror:
        hc = (hc[0], -hc[1])
    match = (
        res.genus == tt.genus
        and res.component_count == tt.boundary_count
        and all(c in (hc, (-hc[0], -hc[1])) for c in classes)
    )
    out = {
        "genus": tt.genus,
        "euler_char": tt.euler_char,
        "link_components": tt.d,
        "core_boundary": tt.has_core_boundary,
        "boundary_count": tt.boundary_count,
        "knot_type": list(tt.knot_type),
        "homology_class": list(tt.homology_class),
        "acting_order": ba.acting_order,
        "orbits": [
            {"length": o.orbit_length, "acting_power": o.acting_power, "rotation": o.rotation}
            for o in ba.orbits
        ],
        "core_rotation": ba.core_rotation,
        "orbifold_type": str(orbifold_type(spec)),
        "tracer": {
            "genus": res.genus,
            "boundary_count": res.component_count,
            "homology_classes": [list(c) for c in classes],
            "orbit_lengths": oc.orbit_lengths,
            "rotations": list(oc.rotations),
        },
        "oracle": "match" if match else "mismatch",
    }
    summary = (
        f"{spec}: genus {tt.genus}, {tt.boundary_count} boundary circle(s), "
        f"torus link of type {tt.knot_type}, quotient {orbifold_type(spec)}, oracle={out['oracle']}"
    )
    return _report("surface", _spec_inputs(args), out, ["closed-form:surface-invariants", "oracle:band-tracer"]), summary


def _spec_inputs(args) -> dict:
    return {"p": args.p, "q": args.q, "variant": args.variant, "mirror": bool(getattr(args, "mirror", False))}


def cmd_trace(args) -> tuple[dict, str]:
    spec = _spec(args)
    cx = build_complex(spec, mirror=args.mirror)
    res = trace(cx)
    oc = orbit_check(cx)
    out = {
        "faces": [{"label": f.label, "euler_char": f.euler_char} for f in cx.faces],
        "band_count": cx.band_count,
        "euler_char": res.euler_char,
        "genus": res.genus,
        "cycles": [
            {"strands": c.strand_count, "homology_class": None if c.is_core else list(c.homology_class)}
            for c in res.boundary_cycles
        ],
        "orbits": [list(o) for o in oc.orbits],
        "rotations": list(oc.rotations),
    }
    summary = f"{spec}: {len(cx.faces)} faces, {cx.band_count} bands, chi={res.euler_char}, genus {res.genus}"
    return _report("trace", _spec_inputs(args), out, ["oracle:band-tracer"]), summary


def cmd_classify(args) -> tuple[dict, str]:
    try:
        sig = OrbifoldSignature.parse(args.signature)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inputs = {"genus": args.g, "order": args.n, "signature": str(sig)}
    defect = rh_euler_defect(args.n, args.g, sig)
    if defect or any(args.n % i for i in sig.indices):
        raise _DataError(
            "InvalidDatum",
            f"({args.g}, {args.n}, {sig}) is not a valid periodic-map datum",
            {"rh_defect": str(defect), "indices_divide_order": not any(args.n % i for i in sig.indices)},
        )
    d = MapDatum(args.g, args.n, sig)
    lo = lower_bound(d)
    out = {
        "rh": {"holds": True, "defect": "0"},
        "lower": {"value": lo.value, "provenance": list(lo.provenance)},
    }
    prov = list(lo.provenance)
    try:
        up = upper_bound(d)
        out["upper"] = {"value": up.value, "provenance": list(up.provenance)}
        prov += [t for t in up.provenance if t not in prov]
    except NotCovered as exc:
        out["upper"] = None
        out["upper_reason"] = str(exc)
    try:
        ex = dgf(d)
        out["dgf"] = ex.value
    except (OutOfRange, NotCovered) as exc:
        out["dgf"] = None
        out["dgf_reason"] = str(exc)
    dh = dhat_bounds(d)
    out["dhat"] = dh.as_list()
    prov += [t for t in dh.provenance if t not in prov]
    dtext = f"D={out['dgf']}" if out["dgf"] is not None else f"D in [{lo.value}, {out['upper'] and out['upper']['value']}]"
    summary = f"{d}: {dtext}, D-hat in {dh.as_list()}"
    return _report("classify", inputs, out, prov), summary


def cmd_family(args) -> tuple[dict, str]:
    rec = fstar_family(args.p, args.k)
    d = MapDatum(rec.genus, rec.order, rec.signature)
    ex = dgf(d)
    fp = family_plan(args.p, args.k, starred=True)
    out = {
        "order": rec.order,
        "genus": rec.genus,
        "signature": str(rec.signature),
        "embed_dim": rec.embed_dim,
        "dgf": ex.value,
        "dhat": dhat_bounds(d).as_list(),
        "join_factors": list(fp.join_factors),
        "rotation_orders": [str(r) for r in fp.rotation_orders],
    }
    summary = f"order {rec.order}, genus {rec.genus}, {rec.signature}: D = D-hat = {ex.value}"
    return _report("family", {"p": args.p, "k": args.k}, out, list(ex.provenance)), summary


def cmd_realize(args) -> tuple[dict, str]:
    spec = _spec(args)
    if args.topological:
        plans = [pl for pl in embedding_plans(spec) if not pl.smooth]
        if not plans:
            raise NoPlan(f"{spec} has more than two boundary circles")
        plan = plans[0]
    else:
        plan = embedding_plan(spec)
    if args.resolution < 1:
        raise UsageError("--resolution must be positive")
    cloud = sample_embedding(plan, args.resolution)
    residual = equivariance_residual(cloud)
    norms = np.linalg.norm(cloud.points, axis=1)
    out = {
        "ambient_dim": plan.ambient_dim,
        "join_factors": list(plan.join_factors),
        "smooth": plan.smooth,
        "caps": [{"boundary_id": c.boundary_id, "cap_kind": c.cap_kind} for c in plan.caps],
        "action": cloud.action_description,
        "patches": len(cloud.patches),
        "samples": int(cloud.points.shape[0]),
        "max_norm_error": float(np.max(np.abs(norms - 1.0))),
        "equivariance_residual": residual,
        "min_separation": min_separation(cloud),
    }
    if args.out:
        root = Path(args.out)
        root.mkdir(parents=True, exist_ok=True)
        pts, obj = root / "points.txt", root / "surface.obj"
        write_point_cloud(cloud, pts)
        faces = write_obj(cloud, obj)
        out["files"] = {"points": str(pts), "mesh": str(obj), "mesh_faces": faces}
    summary = (
        f"{spec} in S^{plan.ambient_dim} ({'smooth' if plan.smooth else 'topological'}): "
        f"{out['samples']} samples, residual {residual:.2e}, min separation {out['min_separation']:.3g}"
    )
    inputs = dict(_spec_inputs(args), resolution=args.resolution, topological=args.topological)
    inputs.pop("mirror")
    return _report("realize", inputs, out, [plan.provenance]), summary


# --- plumbing -----------------------------------------------------------------


class _DataError(Exception):
    def __init__(self, kind: str, message: str, extra: dict | None = None):
        super().__init__(message)
        self.kind = kind
        self.extra = extra or {}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress the stderr summary")

    parser = _Parser(prog="surfembed", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def spec_args(sp):
        sp.add_argument("p", type=int)
        sp.add_argument("q", type=int)
        sp.add_argument("variant", choices=["plain", "plus", "minus"])

    sp = sub.add_parser("surface", parents=[common], help="invariants of a bordered surface")
    spec_args(sp)
    sp.add_argument("--mirror", action="store_true", help="reverse the p disk boundaries in the tracer")
    sp.set_defaults(func=cmd_surface)

    sp = sub.add_parser("trace", parents=[common], help="band-tracing details")
    spec_args(sp)
    sp.add_argument("--mirror", action="store_true")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("classify", parents=[common], help="dimension bounds for a periodic map")
    sp.add_argument("g", type=int)
    sp.add_argument("n", type=int)
    sp.add_argument("signature", help='quotient type, e.g. "(0:6,6,3)"')
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("family", parents=[common], help="the order p^k families")
    sp.add_argument("p", type=int)
    sp.add_argument("k", type=int)
    sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("realize", parents=[common], help="sample an equivariant embedding")
    spec_args(sp)
    sp.add_argument("--resolution", type=int, default=32)
    sp.add_argument("--out", help="directory for points.txt and surface.obj")
    sp.add_argument("--topological", action="store_true", help="use the non-smooth S^4 plan")
    sp.set_defaults(func=cmd_realize)
    return parser


def _fail(code: int, kind: str, message: str, extra: dict | None = None) -> int:
    err = {"error": kind, "message": message}
    err.update(extra or {})
    print(dumps(err), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, summary = args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "UsageError", str(exc))
    except _DataError as exc:
        return _fail(EXIT_DATA, exc.kind, str(exc), exc.extra)
    except (DegenerateSpec, InvalidDatum, InvalidFamily, NonIntegralGenus, IndexMismatch) as exc:
        return _fail(EXIT_DATA, type(exc).__name__, str(exc))
    except NoPlan as exc:
        return _fail(EXIT_NOPLAN, "NoPlan", str(exc))
    print(dumps(report))
    if not args.quiet:
        print(summary, file=sys.stderr)
    return 0
