"""Midpoint de Casteljau subdivision and the dyadic levels it produces.

A level at depth ``i`` holds ``2**i`` pieces.  Piece ``j`` (0-based; the
1-based label is ``k = j + 1``) covers the parameter interval
``[j / 2**i, (j + 1) / 2**i]``.  Intervals are kept as integers, never floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np

from .curve_core import ArrayLike, BezierCurve, as_points, de_casteljau
from .errors import CapExceededError, DomainError, InvalidCurveError

#: default cap on the total number of control points held by one level
DEFAULT_POINT_CAP = 2**22


@dataclass(frozen=True, eq=False)
class PLCurve:
    """Ordered vertex list.  A closed curve has the edge ``P[-1] -> P[0]`` implied."""

    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = as_points(self.vertices, min_count=2)
        if self.closed:
            if len(pts) < 3:
                raise InvalidCurveError("closed PL curve needs at least 3 vertices")
            if np.array_equal(pts[0], pts[-1]):
                raise InvalidCurveError(
                    "closed PL curve must not repeat its first vertex; closure is implicit"
                )
        pts.setflags(write=False)
        object.__setattr__(self, "vertices", pts)
        object.__setattr__(self, "closed", bool(self.closed))

    def __len__(self):
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.vertices) if self.closed else len(self.vertices) - 1

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Start and end points of every edge, closure edge last."""
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    def reversed(self) -> "PLCurve":
        return PLCurve(self.vertices[::-1].copy(), self.closed)

    @classmethod
    def from_closed_loop(cls, points: ArrayLike) -> "PLCurve":
        """Closed curve from a vertex list that may repeat its first vertex at the end."""
        pts = as_points(points)
        if len(pts) > 1 and np.array_equal(pts[0], pts[-1]):
            pts = pts[:-1]
        return cls(pts, closed=True)

    def __repr__(self):
        return f"PLCurve({len(self.vertices)} vertices, closed={self.closed})"


@dataclass(frozen=True, eq=False)
class SubdivisionPiece:
    """One sub-curve of a level: its control points and dyadic interval."""

    control_points: np.ndarray
    index: int
    depth: int

    @property
    def k(self) -> int:
        return self.index + 1

    @property
    def degree(self) -> int:
        return len(self.control_points) - 1

    @property
    def interval_lo(self) -> Fraction:
        return Fraction(self.index, 2**self.depth)

    @property
    def interval_hi(self) -> Fraction:
        return Fraction(self.index + 1, 2**self.depth)

    @property
    def width(self) -> Fraction:
        return Fraction(1, 2**self.depth)

    def as_curve(self) -> BezierCurve:
        return BezierCurve(self.control_points)


@dataclass(frozen=True, eq=False)
class SubdivisionLevel:
    """All ``2**depth`` pieces at one depth, stored as one ``(2**depth, n+1, 3)`` array."""

    depth: int
    points: np.ndarray

    def __post_init__(self):
        if self.points.ndim != 3 or self.points.shape[0] != 2**self.depth:
            raise InvalidCurveError(
                f"level at depth {self.depth} needs {2**self.depth} pieces, got shape {self.points.shape}"
            )
        self.points.setflags(write=False)

    @property
    def degree(self) -> int:
        return self.points.shape[1] - 1

    def __len__(self):
        return self.points.shape[0]

    @cached_property
    def pieces(self) -> tuple[SubdivisionPiece, ...]:
        return tuple(SubdivisionPiece(p, j, self.depth) for j, p in enumerate(self.points))

    def piece(self, index: int) -> SubdivisionPiece:
        return SubdivisionPiece(self.points[index], index, self.depth)


def split_half_batch(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split every polygon in a ``(K, n+1, 3)`` batch at ``t = 1/2``.

    Returns ``(left, right)`` batches of the same shape.  Each midpoint is
    ``0.5 * (a + b)``, which is exact up to one rounding of ``a + b``.
    """
    m = points.shape[1]
    left = np.empty_like(points)
    right = np.empty_like(points)
    row = points.copy()
    left[:, 0] = row[:, 0]
    right[:, m - 1] = row[:, m - 1]
    for r in range(1, m):
        row = 0.5 * (row[:, :-1] + row[:, 1:])
        left[:, r] = row[:, 0]
        right[:, m - 1 - r] = row[:, -1]
    return left, right


def split_half(curve_points: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """Split one Bézier polygon at ``t = 1/2`` into its left and right halves."""
    pts = as_points(curve_points)
    if len(pts) < 2:
        raise InvalidCurveError("split_half needs at least 2 points")
    left, right = split_half_batch(pts[None])
    return left[0], right[0]


def _next_level(points: np.ndarray) -> np.ndarray:
    left, right = split_half_batch(points)
    out = np.empty((2 * points.shape[0],) + points.shape[1:])
    out[0::2] = left
    out[1::2] = right
    return out


def _check_cap(curve: BezierCurve, depth: int, cap: int) -> None:
    if depth < 0:
        raise DomainError(f"depth must be >= 0, got {depth}")
    need = 2**depth * (curve.degree + 1)
    if need > cap:
        raise CapExceededError(depth, need, cap)


def max_depth_for(curve: BezierCurve, cap: int = DEFAULT_POINT_CAP) -> int:
    """Deepest level of ``curve`` that fits under ``cap`` control points."""
    d = 0
    while 2 ** (d + 1) * (curve.degree + 1) <= cap:
        d += 1
    return d


def iter_levels(
    curve: BezierCurve, max_depth: int, cap: int = DEFAULT_POINT_CAP
) -> Iterator[SubdivisionLevel]:
    """Yield the levels at depths ``0, 1, ..., max_depth`` breadth-first."""
    _check_cap(curve, max_depth, cap)
    pts = np.array(curve.control_points)[None]
    for depth in range(max_depth + 1):
        if depth:
            pts = _next_level(pts)
        yield SubdivisionLevel(depth, pts)


def subdivide(curve: BezierCurve, depth_i: int, cap: int = DEFAULT_POINT_CAP) -> SubdivisionLevel:
    """Level at depth ``depth_i``; depth 0 is the curve itself as one piece."""
    level = None
    for level in iter_levels(curve, depth_i, cap):
        pass
    return level


def level_polyline(level: SubdivisionLevel, closed: bool = False) -> PLCurve:
    """Union of the piece polygons with each shared junction vertex kept once.

    The open result has ``2**i * n + 1`` vertices.  With ``closed=True`` the
    level must come from a loop (last vertex equal to the first); the repeated
    vertex is dropped and the closure edge becomes implicit.
    """
    pts = level.points
    verts = np.concatenate([pts[:, :-1].reshape(-1, 3), pts[-1:, -1]], axis=0)
    if closed:
        if not np.array_equal(verts[0], verts[-1]):
            raise InvalidCurveError("closed=True but the level polyline does not return to its start")
        return PLCurve(verts[:-1], closed=True)
    return PLCurve(verts, closed=False)


def reconstruct_check(curve: BezierCurve, level: SubdivisionLevel, t: float) -> float:
    """Distance between ``C(t)`` and the containing piece evaluated locally at ``t``."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"parameter outside [0, 1]: {t!r}")
    scaled = t * 2**level.depth
    j = min(int(np.floor(scaled)), len(level) - 1)
    local = scaled - j
    on_piece = de_casteljau(level.points[j], np.asarray(local))
    on_curve = de_casteljau(curve.control_points, np.asarray(t))
    return float(np.linalg.norm(on_piece - on_curve))
