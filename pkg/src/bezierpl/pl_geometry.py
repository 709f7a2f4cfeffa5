"""Quantities on piecewise-linear curves.

Covers the uniform parametrization of a piece, its discrete derivative,
exterior (turning) angles, and PL total curvature.  It also holds a
brute-force segment-intersection oracle, used to cross-check simplicity
certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from .curve_core import bbox_diagonal
from .errors import DomainError, InvalidCurveError
from .subdivision import PLCurve, SubdivisionPiece

EDGE_RELATIVE_EPS = 1e-12
INTERSECTION_RELATIVE_EPS = 1e-9

DegenerateMode = Literal["zero", "pi"]


def edge_epsilon(points: np.ndarray) -> float:
    return EDGE_RELATIVE_EPS * (1.0 + bbox_diagonal(points.reshape(-1, 3)))


def default_intersection_epsilon(points: np.ndarray) -> float:
    # the "+ 1" mirrors edge_epsilon so single-point inputs still get a positive tolerance
    return INTERSECTION_RELATIVE_EPS * (1.0 + bbox_diagonal(points.reshape(-1, 3)))


def vector_angles(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Angle in ``[0, pi]`` between vectors along the last axis."""
    cross = np.linalg.norm(np.cross(u, v), axis=-1)
    dot = np.einsum("...i,...i->...", u, v)
    return np.arctan2(cross, dot)


# --------------------------------------------------------------------------
# Uniform parametrization and discrete derivatives
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UniformParametrization:
    """Piecewise-linear map sending breakpoint ``t_j`` to vertex ``P_j``."""

    points: np.ndarray
    interval_lo: Fraction
    interval_hi: Fraction

    @property
    def breakpoints(self) -> list[Fraction]:
        n = len(self.points) - 1
        step = (self.interval_hi - self.interval_lo) / n
        return [self.interval_lo + j * step for j in range(n + 1)]

    def __call__(self, t: float) -> np.ndarray:
        lo, hi = float(self.interval_lo), float(self.interval_hi)
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside [{self.interval_lo}, {self.interval_hi}]")
        n = len(self.points) - 1
        s = (t - lo) / (hi - lo) * n
        near = round(s)
        # breakpoints such as 7/40 are not floats; snap within rounding distance
        if abs(s - near) <= 8 * np.finfo(float).eps * max(1.0, s):
            return self.points[near].copy()
        j = min(int(np.floor(s)), n - 1)
        u = s - j
        if u == 0.0:
            return self.points[j].copy()
        return (1.0 - u) * self.points[j] + u * self.points[j + 1]


def uniform_parametrization(piece: SubdivisionPiece) -> UniformParametrization:
    if len(piece.control_points) < 2:
        raise InvalidCurveError("uniform parametrization needs at least 2 points")
    return UniformParametrization(piece.control_points, piece.interval_lo, piece.interval_hi)


@dataclass(frozen=True, eq=False)
class DiscreteDerivative:
    """Forward difference quotients ``(P[j+1] - P[j]) / (t[j+1] - t[j])``."""

    values: np.ndarray
    interval_lo: Fraction
    interval_hi: Fraction


def discrete_derivative(piece: SubdivisionPiece) -> DiscreteDerivative:
    pts = piece.control_points
    n = len(pts) - 1
    if n < 1:
        raise InvalidCurveError("discrete derivative needs at least 2 points")
    dt = piece.width / n
    # dt = 1 / (n 2^i), so dividing by it is the exact integer scale n 2^i
    scale = float(1 / dt)
    return DiscreteDerivative(scale * np.diff(pts, axis=0), piece.interval_lo, piece.interval_hi)


def derivative_jump(piece: SubdivisionPiece, m: int) -> float:
    """``|l'(t_m) - l'(t_{m-1})|`` at interior vertex ``m`` (``1 <= m <= n-1``)."""
    n = piece.degree
    if not 1 <= m <= n - 1:
        raise IndexError(f"interior vertex index must be in [1, {n - 1}], got {m}")
    vals = discrete_derivative(piece).values
    return float(np.linalg.norm(vals[m] - vals[m - 1]))


def batch_derivative_jumps(points: np.ndarray, depth: int) -> np.ndarray:
    """Every interior derivative jump of a ``(K, n+1, 3)`` level array, shape ``(K, n-1)``."""
    n = points.shape[1] - 1
    d = (n * 2**depth) * np.diff(points, axis=1)
    return np.linalg.norm(np.diff(d, axis=1), axis=-1)


# --------------------------------------------------------------------------
# Exterior angles
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AngleProfile:
    """Exterior angles of a PL curve.

    For an open curve ``angles[m - 1]`` belongs to interior vertex ``m``.
    For a closed curve ``angles[m]`` belongs to vertex ``m``, closure angles
    included.
    """

    angles: np.ndarray
    closed: bool
    degenerate_vertices: tuple[int, ...] = field(default=())

    @property
    def max_angle(self) -> float:
        return float(self.angles.max()) if len(self.angles) else 0.0

    @property
    def sum_angles(self) -> float:
        return float(self.angles.sum())

    def vertex_index(self, position: int) -> int:
        return position if self.closed else position + 1


def batch_exterior_angles(
    points: np.ndarray, degenerate: DegenerateMode = "zero", eps: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Interior-vertex angles of every open polygon in a ``(K, m, 3)`` batch.

    Returns ``(angles, degenerate_mask)``, both shaped ``(K, m - 2)``.
    """
    if eps is None:
        eps = edge_epsilon(points)
    e = np.diff(points, axis=1)
    short = np.linalg.norm(e, axis=-1) < eps
    ang = vector_angles(e[:, :-1], e[:, 1:])
    bad = short[:, :-1] | short[:, 1:]
    if bad.any():
        ang = np.where(bad, 0.0 if degenerate == "zero" else np.pi, ang)
    return ang, bad


def exterior_angles(curve: PLCurve, degenerate: DegenerateMode = "zero") -> AngleProfile:
    """Turning angles ``atan2(|u x v|, u . v)`` between consecutive edges.

    A vertex next to an edge shorter than the edge epsilon is listed in
    ``degenerate_vertices`` and gets angle 0 (``degenerate="zero"``) or pi
    (``degenerate="pi"``).
    """
    v = curve.vertices
    if len(v) < 3:
        raise InvalidCurveError(f"exterior angles need at least 3 vertices, got {len(v)}")
    if degenerate not in ("zero", "pi"):
        raise DomainError(f"unknown degenerate mode {degenerate!r}")
    if curve.closed:
        # wrap so that vertex m sits between edges m-1 and m
        wrapped = np.concatenate([v[-1:], v, v[:1]], axis=0)
    else:
        wrapped = v
    ang, bad = batch_exterior_angles(wrapped[None], degenerate, edge_epsilon(v))
    ang, bad = ang[0], bad[0]
    offset = 0 if curve.closed else 1
    degen = tuple(int(j) + offset for j in np.flatnonzero(bad))
    ang.setflags(write=False)
    return AngleProfile(ang, curve.closed, degen)


def pl_total_curvature(curve: PLCurve, degenerate: DegenerateMode = "zero") -> float:
    """Sum of exterior angles, closure angles included for closed curves."""
    return exterior_angles(curve, degenerate).sum_angles


# --------------------------------------------------------------------------
# Brute-force self-intersection oracle
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IntersectionWitness:
    edge_a: int
    edge_b: int
    point: tuple[float, float, float]
    adjacent_overlap: bool
    distance: float


@dataclass(frozen=True)
class IntersectionReport:
    intersecting: bool
    witness: IntersectionWitness | None
    epsilon_used: float
    pairs_tested: int


def segment_distances(p1, q1, p2, q2) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closest points between segment batches ``[p1, q1]`` and ``[p2, q2]``.

    Returns ``(distance, closest_on_first, closest_on_second)``.  Zero-length
    and parallel segments are handled by the usual clamping cases.
    """
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    a_zero = a <= 1e-300
    e_zero = e <= 1e-300
    a_safe = np.where(a_zero, 1.0, a)
    e_safe = np.where(e_zero, 1.0, e)
    denom = a * e - b * b
    general = ~a_zero & ~e_zero
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-15 * a * e, np.clip((b * f - c * e) / np.where(denom > 0, denom, 1.0), 0, 1), 0.0)
        t = (b * s + f) / e_safe
        low, high = t < 0.0, t > 1.0
        s = np.where(low, np.clip(-c / a_safe, 0, 1), s)
        s = np.where(high, np.clip((b - c) / a_safe, 0, 1), s)
        t = np.clip(t, 0.0, 1.0)
    # zero-length cases
    s = np.where(general, s, np.where(a_zero, 0.0, np.clip(-c / a_safe, 0, 1)))
    t = np.where(general, t, np.where(e_zero, 0.0, np.clip(f / e_safe, 0, 1)))
    c1 = p1 + s[:, None] * d1
    c2 = p2 + t[:, None] * d2
    return np.linalg.norm(c1 - c2, axis=1), c1, c2


def point_segment_distances(p, a, b) -> np.ndarray:
    ab = b - a
    den = np.einsum("ij,ij->i", ab, ab)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(den > 0, np.einsum("ij,ij->i", p - a, ab) / np.where(den > 0, den, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    return np.linalg.norm(p - (a + s[:, None] * ab), axis=1)


def brute_force_self_intersection(
    curve: PLCurve, epsilon: float | None = None, block_pairs: int = 2_000_000
) -> IntersectionReport:
    """Test every edge pair of ``curve`` for contact closer than ``epsilon``.

    Non-adjacent edges intersect when their minimum distance is below
    ``epsilon``.  Adjacent edges intersect only when they overlap beyond their
    shared vertex, i.e. the far endpoint of one lies within ``epsilon`` of the
    other; a zero-length edge therefore counts as an intersection.  The
    reported witness is the pair ``(a, b)`` with the smallest later index ``b``,
    then the smallest ``a``.
    """
    starts, ends = curve.edges()
    E = len(starts)
    if E < 2:
        raise InvalidCurveError("intersection test needs at least 2 edges")
    if epsilon is None:
        epsilon = default_intersection_epsilon(curve.vertices)
    lo = np.minimum(starts, ends) - epsilon
    hi = np.maximum(starts, ends) + epsilon

    hit_b, hit_a = E, E
    best = None
    tested = 0
    rows = max(1, block_pairs // E)
    # iterate over the later edge b so the first hit block contains the lowest b
    for b0 in range(1, E, rows):
        bs = np.arange(b0, min(E, b0 + rows))
        if bs[0] > hit_b:
            break
        bb, aa = np.nonzero(np.arange(E)[None, :] < bs[:, None])
        bb = bs[bb]
        box = np.all((lo[aa] <= hi[bb]) & (lo[bb] <= hi[aa]), axis=1)
        aa, bb = aa[box], bb[box]
        tested += len(aa)
        if not len(aa):
            continue
        adjacent = (bb == aa + 1)
        if curve.closed:
            adjacent |= (aa == 0) & (bb == E - 1)
        dist, c1, c2 = segment_distances(starts[aa], ends[aa], starts[bb], ends[bb])
        hit = ~adjacent & (dist < epsilon)
        if adjacent.any():
            ia = np.flatnonzero(adjacent)
            a_i, b_i = aa[ia], bb[ia]
            wrap = (a_i == 0) & (b_i == E - 1) & curve.closed
            # order the pair as (first, second) along the curve so they share first's end
            first = np.where(wrap, b_i, a_i)
            second = np.where(wrap, a_i, b_i)
            d_far_second = point_segment_distances(ends[second], starts[first], ends[first])
            d_far_first = point_segment_distances(starts[first], starts[second], ends[second])
            over = np.minimum(d_far_second, d_far_first) < epsilon
            hit[ia] = over
            dist = dist.copy()
            dist[ia] = np.minimum(d_far_second, d_far_first)
            c1[ia] = np.where(
                (d_far_second <= d_far_first)[:, None], ends[second], starts[first]
            )
            c2[ia] = c1[ia]
        if hit.any():
            idx = np.flatnonzero(hit)
            order = np.lexsort((aa[idx], bb[idx]))
            j = idx[order[0]]
            if (bb[j], aa[j]) < (hit_b, hit_a):
                hit_b, hit_a = int(bb[j]), int(aa[j])
                pt = 0.5 * (c1[j] + c2[j])
                best = IntersectionWitness(
                    hit_a, hit_b, tuple(float(x) for x in pt), bool(adjacent[j]), float(dist[j])
                )
    return IntersectionReport(best is not None, best, float(epsilon), tested)
