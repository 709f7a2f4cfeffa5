"""Simplicity and unknottedness certificates from subdivision.

An open PL chain whose exterior angles sum to less than pi cannot meet
itself.  Subdivision drives every piece's angle sum to zero, so some depth
certifies each piece.  To certify the union of the pieces, three checks
apply:

* every piece sum is below ``pi``;
* every adjacent pair, counted with its junction angle, is below ``pi``;
* every non-adjacent pair either has separated convex hulls or lies on a
  run of consecutive pieces whose total turning is below ``pi``.

Unknottedness: a simple closed curve of total curvature at most ``4 pi``
is unknotted.  An unknot certificate from this module covers the PL
polyline it was computed on.  It says nothing directly about the smooth
curve.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .curve_core import BezierCurve, bbox_diagonal, total_curvature_arclen
from .errors import DomainError, InvalidCurveError, InvariantBreachError, NearSingularError, QuadratureError
from .pl_geometry import (
    DegenerateMode,
    IntersectionReport,
    batch_exterior_angles,
    brute_force_self_intersection,
    edge_epsilon,
    exterior_angles,
    pl_total_curvature,
    vector_angles,
)
from .subdivision import DEFAULT_POINT_CAP, PLCurve, SubdivisionLevel, SubdivisionPiece, iter_levels, level_polyline, subdivide

__all__ = [
    "Verdict",
    "SimplicityCertificate",
    "UnknotCertificate",
    "LevelEvidence",
    "piece_angle_sum",
    "level_evidence",
    "certify_simple",
    "certify_unknotted",
    "total_curvature_arclen",
    "FARY_MILNOR_THRESHOLD",
]

PI_MARGIN = 1e-9
FM_MARGIN = 1e-9
FARY_MILNOR_THRESHOLD = 4.0 * math.pi

CertifyMode = Literal["polyline", "pieces"]

POLYLINE_NOTE = (
    "whole level polyline: per-piece sums < pi, adjacent pieces with their junction "
    "angle < pi, non-adjacent pieces hull-separated or joined by a run of total turning < pi"
)
PIECES_NOTE = "each piece separately (junctions between pieces not covered)"
PL_INPUT_NOTE = "PL input: simplicity from the exhaustive pairwise edge test"
UNKNOT_SCOPE_NOTE = "covers the certified PL polyline; transfer to the smooth curve is not claimed"


class Verdict(str, enum.Enum):
    CERTIFIED_SIMPLE = "certified_simple"
    CERTIFIED_UNKNOTTED = "certified_unknotted"
    INCONCLUSIVE = "inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SimplicityCertificate:
    verdict: Verdict
    depth_i: int
    per_piece_angle_sums: tuple[float, ...]
    max_piece_sum: float
    junction_handling_note: str
    closed: bool = False
    mode: str = "polyline"
    max_window_sum: float = 0.0
    reason: str = ""
    oracle_cross_check: IntersectionReport | None = None

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_SIMPLE


@dataclass(frozen=True)
class UnknotCertificate:
    verdict: Verdict
    total_curvature_used: float
    simplicity_evidence: SimplicityCertificate
    depth_i: int
    threshold: float = FARY_MILNOR_THRESHOLD
    smooth_total_curvature: float | None = None
    scope_note: str = UNKNOT_SCOPE_NOTE

    def __post_init__(self):
        # Fary-Milnor only implies unknottedness: there is no "knotted" outcome
        if self.verdict not in (Verdict.CERTIFIED_UNKNOTTED, Verdict.INCONCLUSIVE):
            raise InvariantBreachError(f"unknot certificate cannot carry verdict {self.verdict}")

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_UNKNOTTED


def piece_angle_sum(piece: SubdivisionPiece | np.ndarray) -> float:
    """Sum of the exterior angles of a piece's control polygon (0 for degree 1)."""
    pts = piece.control_points if isinstance(piece, SubdivisionPiece) else np.asarray(piece, float)
    if len(pts) < 3:
        return 0.0
    return exterior_angles(PLCurve(pts)).sum_angles


@dataclass(frozen=True, eq=False)
class LevelEvidence:
    """Angle bookkeeping for one level, shared by certificates and sweeps."""

    depth: int
    closed: bool
    piece_angles: np.ndarray  # (K, n-1)
    piece_degenerate: np.ndarray  # (K,) bool
    junction_angles: np.ndarray  # (K-1,) open, (K,) closed: junction after piece k
    junction_degenerate: np.ndarray

    @property
    def piece_sums(self) -> np.ndarray:
        return self.piece_angles.sum(axis=1)

    @property
    def window_sums(self) -> np.ndarray:
        s = self.piece_sums
        nxt = np.roll(s, -1)[: len(self.junction_angles)]
        return s[: len(self.junction_angles)] + self.junction_angles + nxt


def level_evidence(level: SubdivisionLevel, closed: bool = False, degenerate: DegenerateMode = "zero") -> LevelEvidence:
    pts = level.points
    eps = edge_epsilon(pts)
    ang, bad = batch_exterior_angles(pts, degenerate, eps)
    first_edge = pts[:, 1] - pts[:, 0]
    last_edge = pts[:, -1] - pts[:, -2]
    if closed:
        u, v = last_edge, np.roll(first_edge, -1, axis=0)
    else:
        u, v = last_edge[:-1], first_edge[1:]
    j_ang = vector_angles(u, v)
    j_bad = (np.linalg.norm(u, axis=-1) < eps) | (np.linalg.norm(v, axis=-1) < eps)
    if j_bad.any():
        j_ang = np.where(j_bad, 0.0 if degenerate == "zero" else np.pi, j_ang)
    return LevelEvidence(level.depth, closed, ang, bad.any(axis=1), j_ang, j_bad)


def _run_sums(ev: LevelEvidence, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Total turning of the chain of pieces ``a..b`` (``a < b``), shorter way round if closed."""
    s = ev.piece_sums
    j = ev.junction_angles
    ps = np.concatenate([[0.0], np.cumsum(s)])
    pj = np.concatenate([[0.0], np.cumsum(j)])
    forward = (ps[b + 1] - ps[a]) + (pj[b] - pj[a])
    if not ev.closed:
        return forward
    # b, b+1, ..., K-1, 0, ..., a
    backward = (ps[-1] - ps[b] + ps[a + 1]) + (pj[-1] - pj[b] + pj[a])
    return np.minimum(forward, backward)


def _hulls_separated(pts: np.ndarray, a: np.ndarray, b: np.ndarray, gap: float) -> np.ndarray:
    """Separating-axis test on the control point sets, axes x, y, z and centroid difference."""
    pa, pb = pts[a], pts[b]
    sep = np.zeros(len(a), dtype=bool)
    axes = [np.eye(3)[k][None, :].repeat(len(a), 0) for k in range(3)]
    axes.append(pb.mean(axis=1) - pa.mean(axis=1))
    for ax in axes:
        na = np.linalg.norm(ax, axis=1)
        ax = ax / np.where(na > 0, na, 1.0)[:, None]
        qa = np.einsum("kmi,ki->km", pa, ax)
        qb = np.einsum("kmi,ki->km", pb, ax)
        sep |= (qa.max(axis=1) + gap < qb.min(axis=1)) | (qb.max(axis=1) + gap < qa.min(axis=1))
    return sep


def _nonadjacent_ok(ev: LevelEvidence, pts: np.ndarray, limit: float, gap: float, block: int = 2_000_000) -> tuple[bool, str]:
    K = pts.shape[0]
    if K < 3:
        return True, ""
    lo = pts.min(axis=1) - gap
    hi = pts.max(axis=1) + gap
    rows = max(1, block // K)
    for a0 in range(0, K, rows):
        a_idx = np.arange(a0, min(K, a0 + rows))
        aa, bb = np.nonzero(np.arange(K)[None, :] >= a_idx[:, None] + 2)
        aa = a_idx[aa]
        if ev.closed:
            keep = ~((aa == 0) & (bb == K - 1))
            aa, bb = aa[keep], bb[keep]
        if not len(aa):
            continue
        box = np.all((lo[aa] <= hi[bb]) & (lo[bb] <= hi[aa]), axis=1)
        aa, bb = aa[box], bb[box]
        if not len(aa):
            continue
        sep = _hulls_separated(pts, aa, bb, gap)
        aa, bb = aa[~sep], bb[~sep]
        if not len(aa):
            continue
        run = _run_sums(ev, aa, bb)
        fail = run >= limit
        if fail.any():
            j = int(np.flatnonzero(fail)[0])
            return False, (
                f"pieces {aa[j]} and {bb[j]} are not hull-separated and the run between "
                f"them turns {run[j]:.6g} >= pi"
            )
    return True, ""


def _check_level(level: SubdivisionLevel, ev: LevelEvidence, mode: CertifyMode, pi_margin: float, gap: float) -> tuple[bool, str]:
    limit = math.pi - pi_margin
    sums = ev.piece_sums
    if ev.piece_degenerate.any():
        return False, f"degenerate vertex in piece {int(np.argmax(ev.piece_degenerate))}"
    if (sums >= limit).any():
        k = int(np.argmax(sums))
        return False, f"piece {k} angle sum {sums[k]:.6g} >= pi"
    if mode == "pieces":
        return True, ""
    if ev.closed and len(sums) < 3:
        return False, "a closed level needs at least 3 pieces"
    if ev.junction_degenerate.any():
        return False, f"degenerate junction after piece {int(np.argmax(ev.junction_degenerate))}"
    win = ev.window_sums
    if len(win) and (win >= limit).any():
        k = int(np.argmax(win))
        return False, f"window of pieces {k},{(k + 1) % len(sums)} turns {win[k]:.6g} >= pi"
    return _nonadjacent_ok(ev, level.points, limit, gap)


def _oracle(level: SubdivisionLevel, closed: bool, mode: CertifyMode, epsilon: float | None) -> IntersectionReport:
    if mode == "pieces":
        # each piece on its own; report the first offending piece, if any
        report = None
        for piece in level.pieces:
            if piece.degree < 2:
                continue
            report = brute_force_self_intersection(PLCurve(piece.control_points), epsilon)
            if report.intersecting:
                return report
        if report is None:
            report = IntersectionReport(False, None, epsilon or 0.0, 0)
        return report
    return brute_force_self_intersection(level_polyline(level, closed=closed), epsilon)


def certify_level(
    level: SubdivisionLevel,
    closed: bool = False,
    mode: CertifyMode = "polyline",
    pi_margin: float = PI_MARGIN,
    degenerate: DegenerateMode = "zero",
) -> tuple[bool, str, LevelEvidence]:
    """Check one level; returns ``(certified, reason_if_not, evidence)``."""
    ev = level_evidence(level, closed, degenerate)
    gap = 1e-9 * (1.0 + bbox_diagonal(level.points.reshape(-1, 3)))
    ok, reason = _check_level(level, ev, mode, pi_margin, gap)
    return ok, reason, ev


def certify_simple(
    curve: BezierCurve,
    max_depth: int = 10,
    run_oracle: bool = False,
    *,
    min_depth: int = 0,
    closed: bool | None = None,
    mode: CertifyMode = "polyline",
    pi_margin: float = PI_MARGIN,
    degenerate: DegenerateMode = "zero",
    oracle_epsilon: float | None = None,
    cap: int = DEFAULT_POINT_CAP,
) -> SimplicityCertificate:
    """Find the smallest depth in ``[min_depth, max_depth]`` whose level polyline certifies.

    ``closed`` defaults to whether the curve is a loop (first control point
    equal to the last).  With ``run_oracle`` the certified polyline is also
    run through :func:`brute_force_self_intersection`, and any disagreement
    raises :class:`InvariantBreachError`.
    """
    if max_depth < 0 or min_depth < 0 or min_depth > max_depth:
        raise DomainError(f"bad depth range [{min_depth}, {max_depth}]")
    if mode not in ("polyline", "pieces"):
        raise DomainError(f"unknown mode {mode!r}")
    if closed is None:
        closed = curve.is_closed_loop
    elif closed and not curve.is_closed_loop:
        raise InvalidCurveError("closed=True but the first and last control points differ")
    note = POLYLINE_NOTE if mode == "polyline" else PIECES_NOTE

    best = None
    for level in iter_levels(curve, max_depth, cap):
        if level.depth < min_depth:
            continue
        ok, reason, ev = certify_level(level, closed, mode, pi_margin, degenerate)
        sums = ev.piece_sums
        win = ev.window_sums
        cert = SimplicityCertificate(
            verdict=Verdict.CERTIFIED_SIMPLE if ok else Verdict.INCONCLUSIVE,
            depth_i=level.depth,
            per_piece_angle_sums=tuple(float(x) for x in sums),
            max_piece_sum=float(sums.max()),
            junction_handling_note=note,
            closed=closed,
            mode=mode,
            max_window_sum=float(win.max()) if len(win) else float(sums.max()),
            reason=reason,
        )
        if ok:
            if run_oracle:
                report = _oracle(level, closed, mode, oracle_epsilon)
                if report.intersecting:
                    raise InvariantBreachError(
                        f"certified simple at depth {level.depth} but the oracle found {report.witness}"
                    )
                cert = dataclasses.replace(cert, oracle_cross_check=report)
            return cert
        if best is None or cert.max_piece_sum < best.max_piece_sum:
            best = cert
    return best


def certify_unknotted(
    curve: BezierCurve | PLCurve,
    closed: bool = True,
    max_depth: int = 10,
    tol: float = 1e-8,
    *,
    min_depth: int = 0,
    fm_margin: float = FM_MARGIN,
    pi_margin: float = PI_MARGIN,
    run_oracle: bool = True,
    degenerate: DegenerateMode = "zero",
) -> UnknotCertificate:
    """Certify that a closed curve's PL approximant is unknotted.

    A Bézier loop is subdivided until :func:`certify_simple` succeeds (from
    ``min_depth`` on).  The PL total curvature of that polyline, closure
    angles included, is then compared against ``4 pi``.  A :class:`PLCurve`
    is used as given, with simplicity taken from the pairwise edge test.  The
    verdict is ``certified_unknotted`` or ``inconclusive``, never "knotted".
    ``tol`` is the quadrature tolerance for the reported smooth total
    curvature of a Bézier input.
    """
    if not closed:
        raise DomainError("unknot certificates are defined for closed curves only")
    limit = FARY_MILNOR_THRESHOLD - fm_margin

    if isinstance(curve, PLCurve):
        if not curve.closed:
            raise InvalidCurveError("closed=True but the PL curve is open")
        profile = exterior_angles(curve, degenerate)
        report = brute_force_self_intersection(curve)
        simple = not report.intersecting and not profile.degenerate_vertices
        simp = SimplicityCertificate(
            verdict=Verdict.CERTIFIED_SIMPLE if simple else Verdict.INCONCLUSIVE,
            depth_i=0,
            per_piece_angle_sums=(profile.sum_angles,),
            max_piece_sum=profile.sum_angles,
            junction_handling_note=PL_INPUT_NOTE,
            closed=True,
            mode="pl-input",
            max_window_sum=profile.sum_angles,
            reason="" if simple else ("degenerate vertex" if profile.degenerate_vertices else "edges intersect"),
            oracle_cross_check=report,
        )
        total = profile.sum_angles
        ok = simple and total <= limit
        return UnknotCertificate(
            Verdict.CERTIFIED_UNKNOTTED if ok else Verdict.INCONCLUSIVE, total, simp, 0
        )

    if not curve.is_closed_loop:
        raise InvalidCurveError("closed=True but the first and last control points differ")
    simp = certify_simple(
        curve, max_depth, run_oracle, min_depth=min_depth, closed=True,
        pi_margin=pi_margin, degenerate=degenerate,
    )
    try:
        smooth = total_curvature_arclen(curve, tol) if curve.degree >= 2 else 0.0
    except (NearSingularError, QuadratureError):
        smooth = None
    if not simp.certified:
        return UnknotCertificate(Verdict.INCONCLUSIVE, math.nan, simp, simp.depth_i, smooth_total_curvature=smooth)
    poly = level_polyline(subdivide(curve, simp.depth_i), closed=True)
    total = pl_total_curvature(poly, degenerate)
    verdict = Verdict.CERTIFIED_UNKNOTTED if total <= limit else Verdict.INCONCLUSIVE
    return UnknotCertificate(verdict, total, simp, simp.depth_i, smooth_total_curvature=smooth)
