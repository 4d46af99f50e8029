"""Command-line front end.

Exit codes: 0 success, 2 infeasible result, 3 invalid input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import report
from .errors import DegenerateSpec, InvalidDesign, OffsetOutOfBounds, Unreachable
from .jacobian import assemble, classify_singularity
from .kinematics import inverse_kinematics
from .model import DesignParameters, canonical_design, isotropic_configuration, load_design, validate
from .performance import isotropy_residual, manipulability
from .workspace.export import limits_summary, section_csv, summary, write_ply
from .workspace.feasibility import FeasibilitySpec, Reason, evaluate_points
from .workspace.octree import build_octree, default_bounds
from .workspace.regions import t_connected_regions
from .workspace.sections import cross_section, synthesize_joint_limits

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID = 0, 2, 3
METRICS = ("kappa", "psi-max", "psi-min")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _region(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"region must be six numbers, got {text!r}")
    if len(vals) != 6 or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"region must be six finite numbers x0,y0,z0,x1,y1,z1, got {text!r}")
    return np.array(vals).reshape(2, 3)


def _section_arg(text: str):
    try:
        axis, offset = text.split("=")
        axis = axis.strip().lower()
        if axis not in ("x", "y", "z"):
            raise ValueError
        return axis, float(offset)
    except ValueError:
        raise argparse.ArgumentTypeError(f"section must look like z=0.0, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", type=Path, help="machine definition JSON (canonical L=1 when omitted)")
    common.add_argument("--out", type=Path, help="output file (stdout when omitted, where possible)")
    common.add_argument("--format", choices=("csv", "json", "ply"))
    common.add_argument("--leg-length", type=float, help="override leg_length from the machine file")
    common.add_argument("--psi-min", type=float, default=1.0 / 3.0)
    common.add_argument("--psi-max", type=float, default=3.0)
    common.add_argument("--singular-margin", type=float, default=FeasibilitySpec.singular_margin)
    common.add_argument("--plot", action="store_true", help="also render a PNG next to --out")

    parser = _Parser(prog="orthokin", description="Orthoglide kinematic and workspace analysis")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="kinematic and performance report at one point")
    p.add_argument("--point", type=float, nargs=3, metavar=("X", "Y", "Z"), default=[0.0, 0.0, 0.0])

    p = sub.add_parser("map", parents=[common], help="grid of kappa or psi extremes over a box")
    p.add_argument("--region", type=_region, help="x0,y0,z0,x1,y1,z1 (default: analysis box)")
    p.add_argument("--resolution", type=int, default=11, help="samples per axis")
    p.add_argument("--metric", choices=METRICS, default="kappa")
    p.add_argument("--synthesize-limits", action="store_true", help="apply synthesized joint limits first")

    p = sub.add_parser("workspace", parents=[common], help="octree workspace, PLY mesh and JSON summary")
    p.add_argument("--depth", type=int, default=7)
    p.add_argument("--synthesize-limits", action="store_true")
    p.add_argument("--section", type=_section_arg, help="cross-section to export, e.g. z=0")
    p.add_argument("--resolution", type=int, default=128, help="cross-section samples per side")

    p = sub.add_parser("limits", parents=[common], help="joint limits from the psi bounds")
    p.add_argument("--resolution", type=int, default=21, help="cube samples per axis")

    sub.add_parser("isotropy", parents=[common], help="isotropy residuals at the isotropic configuration")
    return parser


def _load(args) -> DesignParameters:
    params = load_design(args.machine) if args.machine else canonical_design(1.0)
    if args.leg_length is not None:
        params = replace(params, leg_length=args.leg_length)
    problems = validate(params)
    if problems:
        raise InvalidDesign(problems)
    return params


def _spec(args) -> FeasibilitySpec:
    try:
        return FeasibilitySpec(psi_min=args.psi_min, psi_max=args.psi_max, singular_margin=args.singular_margin)
    except ValueError as exc:
        raise UsageError(str(exc))


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _sibling(out: Optional[Path], suffix: str, default: str) -> Path:
    return out.with_suffix(suffix) if out is not None else Path(default)


def _require_format(args, allowed):
    if args.format is not None and args.format not in allowed:
        raise UsageError(f"{args.command} supports --format {'/'.join(allowed)}, not {args.format}")


# --- commands -------------------------------------------------------------------


def point_report(p, params: DesignParameters, spec: FeasibilitySpec) -> dict:
    sol = inverse_kinematics(p, params)
    m = assemble(p, sol, params)
    sing = classify_singularity(m, params)
    iso = isotropy_residual(sol, m, params)
    reason = Reason(int(evaluate_points(np.asarray(p, float)[None, :], params, spec)["reason"][0]))
    out = {
        "point": p,
        "rho": sol.rho,
        "boundary_flags": list(sol.boundary_flags),
        "eta": m.eta,
        "det_A": m.det_A,
        "det_B": m.det_B,
        "normalized_det_A": sing.normalized_det_A,
        "normalized_det_B": sing.normalized_det_B,
        "singularity": {"kind": sing.kind.value, "serial_legs": sing.serial_legs},
        "J": m.J,
        "J_inv": m.J_inv,
        "singular_values": None,
        "kappa": None,
        "condition_ratio": None,
        "psi": None,
        "force_factors": None,
        "ellipsoid_axes": None,
        "ellipsoid_directions": None,
        "within_bounds": None,
        "isotropy_residuals": {
            "norm_ratio": iso.norm_ratio_residuals,
            "orthogonality": iso.orthogonality_residuals,
        },
        "feasibility": reason.label,
    }
    if m.regular:
        perf = manipulability(m, spec.psi_min, spec.psi_max)
        out.update(
            singular_values=perf.singular_values,
            kappa=perf.kappa,
            condition_ratio=perf.condition_ratio,
            psi=perf.psi,
            force_factors=perf.force_factors,
            ellipsoid_axes=perf.ellipsoid_axes,
            ellipsoid_directions=perf.ellipsoid_directions,
            within_bounds=perf.within_bounds,
        )
        out["_perf"] = perf
    return out


def cmd_analyze(args, params, spec) -> int:
    _require_format(args, ("json",))
    p = np.array(args.point, dtype=float)
    try:
        data = point_report(p, params, spec)
    except Unreachable as exc:
        sys.stderr.write(f"orthokin: {exc}\n")
        return EXIT_INFEASIBLE
    perf = data.pop("_perf", None)
    _emit(report.dumps(data), args.out)
    if args.plot and perf is not None:
        from .plotting import ellipsoid_figure

        ellipsoid_figure(perf.psi, perf.ellipsoid_directions, _sibling(args.out, ".png", "analyze.png"))
    return EXIT_OK


def map_grid(region, resolution: int):
    if resolution < 1 or np.any(region[1] < region[0]):
        return np.zeros((0, 3))
    axes = [np.linspace(region[0, i], region[1, i], resolution) for i in range(3)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)


def metric_values(points, params, spec, metric: str) -> np.ndarray:
    if len(points) == 0:
        return np.zeros(0)
    e = evaluate_points(points, params, spec)
    ok = e["reason"] == Reason.FEASIBLE
    with np.errstate(divide="ignore", invalid="ignore"):
        if metric == "kappa":
            vals = np.sqrt(e["psi_max"] / e["psi_min"])
        elif metric == "psi-max":
            vals = e["psi_max"]
        else:
            vals = e["psi_min"]
    return np.where(ok, vals, np.nan)


def map_csv(points, values) -> str:
    lines = ["x,y,z,value"]
    lines += [",".join(report.fmt(c) for c in (*pt, v)) for pt, v in zip(points, values)]
    return "\n".join(lines) + "\n"


def cmd_map(args, params, spec) -> int:
    _require_format(args, ("csv", "json"))
    bounds = default_bounds(params)
    region = bounds if args.region is None else args.region
    nonempty = np.all(region[1] >= region[0])
    if nonempty and (np.any(region[0] < bounds[0]) or np.any(region[1] > bounds[1])):
        raise UsageError(f"region must lie within the analysis box {bounds.tolist()}")
    if args.synthesize_limits:
        params = synthesize_joint_limits(params, spec).apply(params)
    points = map_grid(region, args.resolution)
    values = metric_values(points, params, spec, args.metric)
    if args.format == "json":
        text = report.dumps({"metric": args.metric, "points": points, "values": [report.fmt(v) for v in values]})
    else:
        text = map_csv(points, values)
    _emit(text, args.out)
    if args.plot:
        from .plotting import metric_map_figure

        metric_map_figure(points, values, args.metric, _sibling(args.out, ".png", "map.png"))
    return EXIT_OK


def cmd_workspace(args, params, spec) -> int:
    _require_format(args, ("ply", "json", "csv"))
    if not 3 <= args.depth <= 12:
        raise UsageError("--depth must be in [3, 12]")
    limits = None
    if args.synthesize_limits:
        limits = synthesize_joint_limits(params, spec)
        params = limits.apply(params)
    model = t_connected_regions(build_octree(params, spec, max_depth=args.depth))
    data = summary(model, limits)
    fmt = args.format or "ply"

    section = None
    if args.section is not None or fmt == "csv" or args.plot:
        axis, offset = args.section if args.section is not None else ("z", float(isotropic_configuration(params)[0][2]))
        section = cross_section(model, axis, offset, args.resolution)

    if fmt == "json":
        _emit(report.dumps(data), args.out)
    else:
        out = args.out or Path("workspace." + fmt)
        if fmt == "ply":
            write_ply(model, out)
        else:
            out.write_text(section_csv(section))
        out.with_suffix(".json").write_text(report.dumps(data))
        if fmt == "ply" and args.section is not None:
            out.with_suffix(".csv").write_text(section_csv(section))
    if args.plot:
        from .plotting import workspace_figure

        workspace_figure(model, _sibling(args.out, ".png", "workspace.png"), section)
    return EXIT_OK if model.volume_lower > 0 else EXIT_INFEASIBLE


def cmd_limits(args, params, spec) -> int:
    _require_format(args, ("json",))
    try:
        syn = synthesize_joint_limits(params, spec, resolution=args.resolution)
    except DegenerateSpec as exc:
        sys.stderr.write(f"orthokin: {exc}\n")
        return EXIT_INFEASIBLE
    _emit(report.dumps(limits_summary(syn)), args.out)
    if args.plot:
        from .plotting import section_figure

        model = build_octree(syn.apply(params), spec, max_depth=3)
        section = cross_section(model, "z", float(syn.center[2]), 128)
        section_figure(section, _sibling(args.out, ".png", "limits.png"), cube=(syn.center, syn.half_edge))
    return EXIT_OK if syn.half_edge > 0 else EXIT_INFEASIBLE


def cmd_isotropy(args, params, spec) -> int:
    _require_format(args, ("json",))
    p, rho = isotropic_configuration(params)
    sol = inverse_kinematics(p, params)
    m = assemble(p, sol, params)
    iso = isotropy_residual(sol, m, params)
    tol = params.tolerances.geom_eps
    data = {
        "point": p,
        "rho": rho,
        "norm_ratio_residuals": iso.norm_ratio_residuals,
        "orthogonality_residuals": iso.orthogonality_residuals,
        "max_residual": iso.max,
        "tolerance": tol,
        "isotropic": iso.max < tol,
    }
    _emit(report.dumps(data), args.out)
    return EXIT_OK if iso.max < tol else EXIT_INFEASIBLE


COMMANDS = {
    "analyze": cmd_analyze,
    "map": cmd_map,
    "workspace": cmd_workspace,
    "limits": cmd_limits,
    "isotropy": cmd_isotropy,
}


def _glue_values(argv):
    # "--region -1,0,..." would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--region", "--section"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    try:
        params = _load(args)
        spec = _spec(args)
        return COMMANDS[args.command](args, params, spec)
    except (InvalidDesign, UsageError, OffsetOutOfBounds) as exc:
        sys.stderr.write(f"orthokin: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
