"""Curve files, CSV reports and SVG rendering.

Curve file format (one curve per file)::

    # comments start with '#', blank lines are ignored
    bezier <name> degree=<n> closed=<0|1>
    x y z          # n + 1 point lines
    ...

A PL curve uses ``polyline <name> vertices=<m> closed=<0|1>`` followed by
``m`` point lines; a closed polyline lists each vertex once.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .certification import SimplicityCertificate, UnknotCertificate
from .convergence_lab import ConvergenceReport
from .curve_core import BezierCurve
from .errors import CurveParseError, DomainError, InvalidCurveError
from .subdivision import PLCurve

_HEADER = re.compile(
    r"^(?P<kind>bezier|polyline)\s+(?P<name>\S+)\s+(?P<key>degree|vertices)=(?P<count>\d+)\s+closed=(?P<closed>[01])$"
)


@dataclass(frozen=True)
class CurveFile:
    name: str
    degree: int
    points: tuple[tuple[float, float, float], ...]
    closed: bool = False
    kind: str = "bezier"

    def __post_init__(self):
        want = self.degree + 1 if self.kind == "bezier" else self.degree
        if len(self.points) != want:
            raise InvalidCurveError(f"{self.kind} {self.name}: expected {want} points, got {len(self.points)}")
        if not all(math.isfinite(c) for p in self.points for c in p):
            raise InvalidCurveError(f"{self.name}: non-finite coordinate")

    @property
    def is_polyline(self) -> bool:
        return self.kind == "polyline"

    def to_curve(self) -> BezierCurve:
        if self.is_polyline:
            raise InvalidCurveError(f"{self.name} is a polyline, not a Bézier curve")
        curve = BezierCurve(np.array(self.points))
        if self.closed and not curve.is_closed_loop:
            raise InvalidCurveError(f"{self.name}: closed=1 but the first and last control points differ")
        return curve

    def to_polyline(self) -> PLCurve:
        return PLCurve(np.array(self.points), closed=self.closed)

    @classmethod
    def from_curve(cls, name: str, curve: BezierCurve, closed: bool | None = None) -> "CurveFile":
        pts = tuple(tuple(float(c) for c in p) for p in curve.control_points)
        return cls(name, curve.degree, pts, curve.is_closed_loop if closed is None else closed)

    @classmethod
    def from_polyline(cls, name: str, poly: PLCurve) -> "CurveFile":
        pts = tuple(tuple(float(c) for c in p) for p in poly.vertices)
        return cls(name, len(pts), pts, poly.closed, kind="polyline")


def parse_curve_file(text: str) -> CurveFile:
    """Parse one curve; errors carry the 1-based line number."""
    header = None
    header_line = 0
    points: list[tuple[float, float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith(("bezier", "polyline")):
            if header is not None:
                raise CurveParseError(f"duplicate header (first header on line {header_line})", lineno)
            header = _HEADER.match(line)
            if header is None:
                raise CurveParseError(f"malformed header {line!r}", lineno)
            header_line = lineno
            continue
        if header is None:
            raise CurveParseError("point line before the header", lineno)
        tokens = line.split()
        if len(tokens) != 3:
            raise CurveParseError(f"expected 3 coordinates, got {len(tokens)}", lineno)
        try:
            xyz = tuple(float(tok) for tok in tokens)
        except ValueError:
            bad = next(t for t in tokens if not _is_number(t))
            raise CurveParseError(f"non-numeric token {bad!r}", lineno) from None
        if not all(math.isfinite(c) for c in xyz):
            raise CurveParseError("non-finite coordinate", lineno)
        points.append(xyz)
    if header is None:
        raise CurveParseError("missing header line")
    kind = header["kind"]
    count = int(header["count"])
    want = count + 1 if kind == "bezier" else count
    if kind == "bezier" and count < 1:
        raise CurveParseError("degree must be >= 1", header_line)
    if len(points) < want:
        raise CurveParseError(
            f"{kind} {header['name']} needs {want} point lines, got {len(points)} "
            f"({want - len(points)} missing)", header_line,
        )
    if len(points) > want:
        raise CurveParseError(
            f"{kind} {header['name']} needs {want} point lines, got {len(points)} "
            f"({len(points) - want} extra)", header_line,
        )
    return CurveFile(header["name"], count, tuple(points), header["closed"] == "1", kind)


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def serialize_curve_file(cf: CurveFile) -> str:
    key = "degree" if cf.kind == "bezier" else "vertices"
    lines = [f"{cf.kind} {cf.name} {key}={cf.degree} closed={int(cf.closed)}"]
    lines += [" ".join(repr(float(c)) for c in p) for p in cf.points]
    return "\n".join(lines) + "\n"


def read_curve_file(path: str | Path) -> CurveFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {p}: {exc.strerror or exc}") from exc
    try:
        return parse_curve_file(text)
    except CurveParseError as exc:
        raise CurveParseError(f"{p}: {exc}") from None


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def _num(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return "" if x is None else str(x)


def convergence_rows(report: ConvergenceReport) -> list[list[str]]:
    excluded = set(report.excluded_depths)
    rows = [["depth", "value", "log2_value", "in_fit"]]
    for d, v, lv in zip(report.depths, report.values, report.log2_values()):
        rows.append([_num(d), _num(v), _num(lv) if v > 0 else "", "0" if d in excluded else "1"])
    return rows


def simplicity_rows(cert: SimplicityCertificate, prefix: str = "") -> list[list[str]]:
    rows = [
        [prefix + "verdict", cert.verdict.value],
        [prefix + "depth_i", _num(cert.depth_i)],
        [prefix + "max_piece_sum", _num(cert.max_piece_sum)],
        [prefix + "max_window_sum", _num(cert.max_window_sum)],
        [prefix + "closed", _num(cert.closed)],
        [prefix + "mode", cert.mode],
        [prefix + "junction_handling_note", cert.junction_handling_note],
        [prefix + "reason", cert.reason],
    ]
    if cert.oracle_cross_check is not None:
        rows.append([prefix + "oracle_intersecting", _num(cert.oracle_cross_check.intersecting)])
        rows.append([prefix + "oracle_epsilon", _num(cert.oracle_cross_check.epsilon_used)])
    rows += [[f"{prefix}piece_angle_sum.{k}", _num(s)] for k, s in enumerate(cert.per_piece_angle_sums)]
    return rows


def unknot_rows(cert: UnknotCertificate) -> list[list[str]]:
    rows = [
        ["verdict", cert.verdict.value],
        ["depth_i", _num(cert.depth_i)],
        ["total_curvature_used", _num(cert.total_curvature_used)],
        ["threshold", _num(cert.threshold)],
        ["smooth_total_curvature", _num(cert.smooth_total_curvature)],
        ["scope_note", cert.scope_note],
    ]
    return rows + simplicity_rows(cert.simplicity_evidence, prefix="simplicity.")


def report_rows(report) -> list[list[str]]:
    if isinstance(report, ConvergenceReport):
        return convergence_rows(report)
    if isinstance(report, UnknotCertificate):
        return [["key", "value"]] + unknot_rows(report)
    if isinstance(report, SimplicityCertificate):
        return [["key", "value"]] + simplicity_rows(report)
    raise TypeError(f"cannot serialise {type(report).__name__}")


def report_csv_text(report) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(report_rows(report))
    return buf.getvalue()


def write_report_csv(report: ConvergenceReport | SimplicityCertificate | UnknotCertificate, path: str | Path) -> None:
    p = Path(path)
    try:
        p.write_text(report_csv_text(report), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {p}: {exc.strerror or exc}") from exc


def read_convergence_csv(path: str | Path) -> tuple[list[int], list[float], list[bool]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return (
        [int(r["depth"]) for r in rows],
        [float(r["value"]) for r in rows],
        [r["in_fit"] == "1" for r in rows],
    )


def read_key_value_csv(path: str | Path) -> dict[str, str]:
    with open(path, newline="", encoding="utf-8") as fh:
        return {r["key"]: r["value"] for r in csv.DictReader(fh)}


# --------------------------------------------------------------------------
# SVG
# --------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
_AXES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}


def render_svg_text(
    polylines: Sequence[tuple[str, PLCurve]],
    projection: str = "xy",
    mark_vertices: bool = False,
    width: int = 800,
) -> str:
    if not polylines:
        raise DomainError("render_svg needs at least one polyline")
    if projection not in _AXES:
        raise DomainError(f"projection must be one of {sorted(_AXES)}, got {projection!r}")
    i, j = _AXES[projection]
    all_pts = np.concatenate([pl.vertices[:, [i, j]] for _, pl in polylines])
    lo, hi = all_pts.min(axis=0), all_pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    lo = lo - 0.05 * span
    span = span * 1.1
    height = max(1, int(round(width * span[1] / span[0]))) if span[0] > 0 else width
    scale = width / span[0]
    stroke = max(span) * scale / 400.0

    def fmt(x: float) -> str:
        return f"{x:.4f}"

    def project(pts):
        # SVG y runs downward
        return [(fmt((p[0] - lo[0]) * scale), fmt((lo[1] + span[1] - p[1]) * scale)) for p in pts]

    colours = {}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    for label, pl in polylines:
        colour = colours.setdefault(label, _PALETTE[len(colours) % len(_PALETTE)])
        pts = project(pl.vertices[:, [i, j]])
        d = "M " + " L ".join(f"{x} {y}" for x, y in pts) + (" Z" if pl.closed else "")
        out.append(
            f'<path class="polyline" data-label="{_escape(label)}" d="{d}" fill="none" '
            f'stroke="{colour}" stroke-width="{fmt(stroke)}"/>'
        )
        if mark_vertices:
            r = fmt(2.0 * stroke)
            out.extend(f'<circle cx="{x}" cy="{y}" r="{r}" fill="{colour}"/>' for x, y in pts)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace('"', "&quot;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg(
    polylines: Sequence[tuple[str, PLCurve]],
    projection: str = "xy",
    path: str | Path = "out.svg",
    mark_vertices: bool = False,
) -> None:
    text = render_svg_text(polylines, projection, mark_vertices)
    p = Path(path)
    try:
        p.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {p}: {exc.strerror or exc}") from exc
