"""Command-line interface.

Exit codes: 0 success; 2 a certificate came back inconclusive; 1 any error,
bad usage included.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import certification, convergence_lab, pl_geometry
from .cli_io import CurveFile, read_curve_file, render_svg, write_report_csv
from .errors import BezierPLError, DomainError
from .subdivision import DEFAULT_POINT_CAP, PLCurve, level_polyline, max_depth_for, subdivide

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path
    depth: int | None = None
    depth_from: int | None = None
    depth_to: int | None = None
    min_depth: int = 0
    metric: str | None = None
    samples: int = 1000
    pi_margin: float = certification.PI_MARGIN
    fm_margin: float = certification.FM_MARGIN
    epsilon: float | None = None
    tol: float = 1e-8
    oracle: bool = False
    mode: str = "polyline"
    projection: str = "xy"
    svg: Path | None = None
    csv: Path | None = None

    def __post_init__(self):
        for name in ("pi_margin", "fm_margin", "tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"--{name.replace('_', '-')} must be positive")
        if self.epsilon is not None and not self.epsilon > 0:
            raise DomainError("--epsilon must be positive")
        for name in ("depth", "depth_from", "depth_to", "min_depth"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise DomainError(f"depth bound {name} must be >= 0")

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        fields = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__ and v is not None}
        return cls(**fields)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bezierpl", description="Bézier subdivision, exterior angles and PL certificates.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    def add(name, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--in", dest="input", type=Path, required=True, help="curve file")
        return sp

    sp = add("subdivide", "subdivide to a depth and summarise the level")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--svg", type=Path, help="write control polygon and level polyline")
    sp.add_argument("--projection", choices=("xy", "xz", "yz"), default="xy")

    sp = add("angles", "exterior angles of the level polyline")
    sp.add_argument("--depth", type=int, required=True)

    sp = add("certify-simple", "certify the level polyline simple")
    sp.add_argument("--max-depth", dest="depth", type=int, required=True)
    sp.add_argument("--min-depth", type=int, default=0)
    sp.add_argument("--oracle", action="store_true", help="cross-check with the brute-force edge test")
    sp.add_argument("--mode", choices=("polyline", "pieces"), default="polyline")
    sp.add_argument("--pi-margin", type=float)
    sp.add_argument("--epsilon", type=float, help="oracle distance tolerance")
    sp.add_argument("--csv", type=Path)

    sp = add("certify-unknot", "certify a closed curve's PL approximant unknotted")
    sp.add_argument("--max-depth", dest="depth", type=int, required=True)
    sp.add_argument("--min-depth", type=int, default=0)
    sp.add_argument("--pi-margin", type=float)
    sp.add_argument("--fm-margin", type=float)
    sp.add_argument("--tol", type=float, help="quadrature tolerance for the smooth total curvature")
    sp.add_argument("--csv", type=Path)

    sp = add("converge", "sweep a convergence metric over depths and fit its log2 slope")
    sp.add_argument("--metric", required=True, choices=sorted(convergence_lab.METRIC_ALIASES))
    sp.add_argument("--from", dest="depth_from", type=int, required=True)
    sp.add_argument("--to", dest="depth_to", type=int, required=True)
    sp.add_argument("--samples", type=int, help="curve samples for the hausdorff metric")
    sp.add_argument("--csv", type=Path, required=True)

    sp = add("hausdorff", "Hausdorff estimate between curve and level polyline")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    return p


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _bezier(cf: CurveFile, command: str):
    if cf.is_polyline:
        raise DomainError(f"{command} needs a bezier curve file, {cf.name} is a polyline")
    return cf.to_curve()


def _check_depth(curve, depth: int) -> None:
    limit = max_depth_for(curve, DEFAULT_POINT_CAP)
    if depth > limit:
        raise DomainError(f"depth {depth} exceeds the memory cap (max {limit} for degree {curve.degree})")


def _cmd_subdivide(cfg: RunConfig, cf: CurveFile, out) -> int:
    curve = _bezier(cf, cfg.command)
    _check_depth(curve, cfg.depth)
    level = subdivide(curve, cfg.depth)
    poly = level_polyline(level)
    print(f"curve {cf.name}: degree {curve.degree}, depth {level.depth}", file=out)
    print(f"pieces {len(level)}, polyline vertices {len(poly)}", file=out)
    if cfg.svg is not None:
        render_svg(
            [("control polygon", PLCurve(curve.control_points)), (f"depth {level.depth}", poly)],
            cfg.projection, cfg.svg, mark_vertices=True,
        )
        print(f"wrote {cfg.svg}", file=out)
    return EXIT_OK


def _cmd_angles(cfg: RunConfig, cf: CurveFile, out) -> int:
    if cf.is_polyline:
        poly = cf.to_polyline()
        print(f"polyline {cf.name}: {len(poly)} vertices, closed={int(poly.closed)}", file=out)
    else:
        curve = cf.to_curve()
        _check_depth(curve, cfg.depth)
        level = subdivide(curve, cfg.depth)
        poly = level_polyline(level, closed=cf.closed)
        piece_max = max(certification.piece_angle_sum(p) for p in level.pieces)
        print(f"curve {cf.name}: depth {level.depth}, {len(poly)} vertices", file=out)
        print(f"max piece angle sum {_fmt(piece_max)}", file=out)
    prof = pl_geometry.exterior_angles(poly)
    print(f"angles {len(prof.angles)}, max {_fmt(prof.max_angle)}, sum {_fmt(prof.sum_angles)}", file=out)
    if prof.degenerate_vertices:
        print(f"degenerate vertices {list(prof.degenerate_vertices)}", file=out)
    return EXIT_OK


def _cmd_certify_simple(cfg: RunConfig, cf: CurveFile, out) -> int:
    curve = _bezier(cf, cfg.command)
    _check_depth(curve, cfg.depth)
    cert = certification.certify_simple(
        curve, cfg.depth, cfg.oracle, min_depth=cfg.min_depth, closed=cf.closed,
        mode=cfg.mode, pi_margin=cfg.pi_margin, oracle_epsilon=cfg.epsilon,
    )
    print(f"{cert.verdict.value} at i={cert.depth_i} ({cf.name})", file=out)
    print(f"max piece sum {_fmt(cert.max_piece_sum)}, max window sum {_fmt(cert.max_window_sum)}", file=out)
    if cert.reason:
        print(f"blocked by: {cert.reason}", file=out)
    if cert.oracle_cross_check is not None:
        print("oracle: no intersection", file=out)
    if cfg.csv is not None:
        write_report_csv(cert, cfg.csv)
    return EXIT_OK if cert.certified else EXIT_INCONCLUSIVE


def _cmd_certify_unknot(cfg: RunConfig, cf: CurveFile, out) -> int:
    if not cf.closed:
        raise DomainError(f"{cf.name} is not closed; unknot certificates need closed=1")
    if cf.is_polyline:
        target = cf.to_polyline()
    else:
        target = cf.to_curve()
        _check_depth(target, cfg.depth)
    cert = certification.certify_unknotted(
        target, True, cfg.depth, cfg.tol, min_depth=cfg.min_depth,
        fm_margin=cfg.fm_margin, pi_margin=cfg.pi_margin,
    )
    print(f"{cert.verdict.value} ({cf.name}), depth {cert.depth_i}", file=out)
    tc = cert.total_curvature_used
    if not math.isnan(tc):
        print(f"PL total curvature {_fmt(tc)} = {_fmt(tc / math.pi)} pi (threshold 4 pi)", file=out)
    print(f"simplicity: {cert.simplicity_evidence.verdict.value}", file=out)
    print(cert.scope_note, file=out)
    if cfg.csv is not None:
        write_report_csv(cert, cfg.csv)
    return EXIT_OK if cert.certified else EXIT_INCONCLUSIVE


def _cmd_converge(cfg: RunConfig, cf: CurveFile, out) -> int:
    curve = _bezier(cf, cfg.command)
    _check_depth(curve, cfg.depth_to)
    kw = {"samples": cfg.samples} if convergence_lab.METRIC_ALIASES[cfg.metric] == "hausdorff_estimate" else {}
    report = convergence_lab.sweep(curve, cfg.metric, cfg.depth_from, cfg.depth_to, **kw)
    write_report_csv(report, cfg.csv)
    print(f"{report.metric} over i in [{cfg.depth_from}, {cfg.depth_to}] ({cf.name})", file=out)
    print(
        f"log2 slope {_fmt(report.log2_slope)} +/- {_fmt(report.slope_ci_halfwidth)}, "
        f"residual {_fmt(report.fit_residual)}", file=out,
    )
    if report.excluded_depths:
        print(f"excluded depths {list(report.excluded_depths)}", file=out)
    return EXIT_OK


def _cmd_hausdorff(cfg: RunConfig, cf: CurveFile, out) -> int:
    curve = _bezier(cf, cfg.command)
    _check_depth(curve, cfg.depth)
    h = convergence_lab.hausdorff_estimate(curve, cfg.depth, cfg.samples)
    print(f"hausdorff estimate {_fmt(h)} at depth {cfg.depth}, {cfg.samples} samples ({cf.name})", file=out)
    return EXIT_OK


_COMMANDS = {
    "subdivide": _cmd_subdivide,
    "angles": _cmd_angles,
    "certify-simple": _cmd_certify_simple,
    "certify-unknot": _cmd_certify_unknot,
    "converge": _cmd_converge,
    "hausdorff": _cmd_hausdorff,
}


def run_cli(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=err)
        return EXIT_ERROR
    except SystemExit as exc:
        # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        cfg = RunConfig.from_args(ns)
        cf = read_curve_file(cfg.input)
        return _COMMANDS[cfg.command](cfg, cf, out)
    except (BezierPLError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
