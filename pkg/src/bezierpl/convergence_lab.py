"""Depth sweeps and log2-slope fits for subdivision convergence.

Each sweep subdivides a curve breadth-first and records one metric per
depth.  It then fits ``log2(value) ~ slope * depth + c`` by least squares.
Derivative jumps should show slope near -1.  Exterior angles are bounded
by slope -1/2, but smooth regular curves typically reach -1, and the
cosine defect ``1 - cos(angle)`` runs at twice the angle slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .curve_core import BezierCurve, evaluate_many
from .errors import DegenerateMetricError, DomainError
from .pl_geometry import batch_derivative_jumps, batch_exterior_angles, point_segment_distances
from .subdivision import DEFAULT_POINT_CAP, SubdivisionLevel, iter_levels, level_polyline, subdivide

DEFAULT_DEPTHS = (5, 12)
ANGLE_FLOOR = 1e-10

METRICS = ("max_derivative_jump", "max_exterior_angle", "max_cos_defect", "hausdorff_estimate")


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    ci_halfwidth: float
    residual: float
    used: int
    excluded: int


def fit_log2_slope(depths: Sequence[int], values: Sequence[float]) -> SlopeFit:
    """Ordinary least squares of ``log2(value)`` on ``depth``.

    Non-positive values are dropped and counted in ``excluded``.  The
    confidence half-width is the 95% Student-t interval on the slope;
    ``residual`` is the RMS fit error in log2 units.
    """
    d = np.asarray(depths, dtype=float)
    v = np.asarray(values, dtype=float)
    if d.shape != v.shape:
        raise DomainError("depths and values differ in length")
    keep = np.isfinite(v) & (v > 0)
    d, v = d[keep], v[keep]
    if len(d) < 3:
        raise DegenerateMetricError(f"need at least 3 positive values to fit, got {len(d)}")
    y = np.log2(v)
    res = stats.linregress(d, y)
    resid = y - (res.intercept + res.slope * d)
    tmult = stats.t.ppf(0.975, len(d) - 2)
    return SlopeFit(
        float(res.slope),
        float(tmult * res.stderr),
        float(np.sqrt(np.mean(resid**2))),
        int(len(d)),
        int((~keep).sum()),
    )


@dataclass(frozen=True)
class ConvergenceReport:
    metric: str
    depths: tuple[int, ...]
    values: tuple[float, ...]
    log2_slope: float
    slope_ci_halfwidth: float
    fit_residual: float
    excluded_depths: tuple[int, ...] = ()
    # max junction angle per depth; only filled for angle-based metrics
    junction_values: tuple[float, ...] = field(default=())

    def log2_values(self) -> tuple[float, ...]:
        return tuple(math.log2(x) if x > 0 else -math.inf for x in self.values)


def _check_range(curve: BezierCurve, i_min: int, i_max: int) -> None:
    if not 0 <= i_min < i_max:
        raise DomainError(f"need 0 <= i_min < i_max, got [{i_min}, {i_max}]")
    if curve.degree < 2:
        raise DegenerateMetricError(f"degree {curve.degree} curve has no interior vertices to measure")


def _levels(curve: BezierCurve, i_min: int, i_max: int, cap: int):
    for level in iter_levels(curve, i_max, cap):
        if level.depth >= i_min:
            yield level


def _junction_max(level: SubdivisionLevel) -> float:
    pts = level.points
    if len(pts) < 2:
        return 0.0
    u = pts[:-1, -1] - pts[:-1, -2]
    v = pts[1:, 1] - pts[1:, 0]
    cross = np.linalg.norm(np.cross(u, v), axis=-1)
    return float(np.arctan2(cross, np.einsum("ij,ij->i", u, v)).max())


def _build(metric, depths, values, floor_mask, junctions=()) -> ConvergenceReport:
    depths = list(depths)
    values = list(values)
    fit_d = [d for d, v, m in zip(depths, values, floor_mask) if m and v > 0]
    fit_v = [v for d, v, m in zip(depths, values, floor_mask) if m and v > 0]
    excluded = tuple(d for d, v, m in zip(depths, values, floor_mask) if not (m and v > 0))
    try:
        fit = fit_log2_slope(fit_d, fit_v)
    except DegenerateMetricError as exc:
        raise DegenerateMetricError(
            f"{metric}: {exc}; values per depth {dict(zip(depths, values))}"
        ) from None
    return ConvergenceReport(
        metric, tuple(depths), tuple(float(v) for v in values),
        fit.slope, fit.ci_halfwidth, fit.residual, excluded, tuple(junctions),
    )


def sweep_derivative_jumps(
    curve: BezierCurve, i_min: int = DEFAULT_DEPTHS[0], i_max: int = DEFAULT_DEPTHS[1], cap: int = DEFAULT_POINT_CAP
) -> ConvergenceReport:
    _check_range(curve, i_min, i_max)
    depths, values = [], []
    for level in _levels(curve, i_min, i_max, cap):
        depths.append(level.depth)
        values.append(float(batch_derivative_jumps(level.points, level.depth).max()))
    return _build("max_derivative_jump", depths, values, [True] * len(depths))


def _angle_sweep(curve, i_min, i_max, cap, metric, angle_floor):
    _check_range(curve, i_min, i_max)
    depths, values, mask, junctions = [], [], [], []
    for level in _levels(curve, i_min, i_max, cap):
        ang, _ = batch_exterior_angles(level.points)
        amax = float(ang.max())
        depths.append(level.depth)
        mask.append(amax >= angle_floor)
        if metric == "max_exterior_angle":
            values.append(amax)
        else:
            # 1 - cos(a) without cancellation
            values.append(float((2.0 * np.sin(0.5 * ang) ** 2).max()))
        junctions.append(_junction_max(level))
    return _build(metric, depths, values, mask, junctions)


def sweep_exterior_angles(
    curve: BezierCurve,
    i_min: int = DEFAULT_DEPTHS[0],
    i_max: int = DEFAULT_DEPTHS[1],
    cap: int = DEFAULT_POINT_CAP,
    angle_floor: float = ANGLE_FLOOR,
) -> ConvergenceReport:
    """Largest interior angle over all piece polygons at each depth.

    Junction angles between pieces are kept out of the fit and listed in
    ``junction_values``.
    """
    return _angle_sweep(curve, i_min, i_max, cap, "max_exterior_angle", angle_floor)


def sweep_cos_defect(
    curve: BezierCurve,
    i_min: int = DEFAULT_DEPTHS[0],
    i_max: int = DEFAULT_DEPTHS[1],
    cap: int = DEFAULT_POINT_CAP,
    angle_floor: float = ANGLE_FLOOR,
) -> ConvergenceReport:
    return _angle_sweep(curve, i_min, i_max, cap, "max_cos_defect", angle_floor)


def cos_defect(angle: float) -> float:
    """``|cos(angle) - 1|`` computed as ``2 sin^2(angle / 2)``."""
    return 2.0 * math.sin(0.5 * angle) ** 2


def _min_dist_to_segments(points: np.ndarray, a: np.ndarray, b: np.ndarray, block: int = 4_000_000) -> np.ndarray:
    out = np.empty(len(points))
    rows = max(1, block // len(a))
    for s in range(0, len(points), rows):
        p = points[s : s + rows]
        P = np.repeat(p, len(a), axis=0)
        A = np.tile(a, (len(p), 1))
        B = np.tile(b, (len(p), 1))
        out[s : s + rows] = point_segment_distances(P, A, B).reshape(len(p), len(a)).min(axis=1)
    return out


def hausdorff_estimate(curve: BezierCurve, depth_i: int, samples: int = 1000, cap: int = DEFAULT_POINT_CAP) -> float:
    """Symmetric Hausdorff distance between sampled ``C`` and the level polyline.

    The curve is represented by ``C(t)`` on a uniform grid of ``samples``
    parameters; the reverse direction measures the polyline's vertices and
    edge midpoints against the polyline through those samples.  Sampling
    error is O(1/samples^2) in the chord and O(1/samples) overall.
    """
    if samples < 100:
        raise DomainError(f"samples must be >= 100, got {samples}")
    ts = np.linspace(0.0, 1.0, samples)
    cpts = evaluate_many(curve, ts)
    poly = level_polyline(subdivide(curve, depth_i, cap)).vertices
    forward = _min_dist_to_segments(cpts, poly[:-1], poly[1:]).max()
    probes = np.concatenate([poly, 0.5 * (poly[:-1] + poly[1:])], axis=0)
    backward = _min_dist_to_segments(probes, cpts[:-1], cpts[1:]).max()
    return float(max(forward, backward))


def sweep_hausdorff(
    curve: BezierCurve, i_min: int = 0, i_max: int = 8, samples: int = 1000, cap: int = DEFAULT_POINT_CAP
) -> ConvergenceReport:
    if not 0 <= i_min < i_max:
        raise DomainError(f"need 0 <= i_min < i_max, got [{i_min}, {i_max}]")
    depths = list(range(i_min, i_max + 1))
    values = [hausdorff_estimate(curve, d, samples, cap) for d in depths]
    return _build("hausdorff_estimate", depths, values, [True] * len(depths))


def sweep(curve: BezierCurve, metric: str, i_min: int, i_max: int, **kw) -> ConvergenceReport:
    """Dispatch by metric name (full name or the short aliases ``jump``, ``angle``, ``cos``, ``hausdorff``)."""
    name = METRIC_ALIASES.get(metric, metric)
    if name == "max_derivative_jump":
        return sweep_derivative_jumps(curve, i_min, i_max, **kw)
    if name == "max_exterior_angle":
        return sweep_exterior_angles(curve, i_min, i_max, **kw)
    if name == "max_cos_defect":
        return sweep_cos_defect(curve, i_min, i_max, **kw)
    if name == "hausdorff_estimate":
        return sweep_hausdorff(curve, i_min, i_max, **kw)
    raise DomainError(f"unknown metric {metric!r}; choose from {sorted(METRIC_ALIASES)}")


METRIC_ALIASES = {
    "jump": "max_derivative_jump",
    "angle": "max_exterior_angle",
    "cos": "max_cos_defect",
    "hausdorff": "hausdorff_estimate",
    **{m: m for m in METRICS},
}
