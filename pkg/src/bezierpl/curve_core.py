"""Bézier curves in R^3: evaluation, hodographs, curvature, total curvature.

Points are plain ``numpy`` arrays of shape ``(3,)``; a list of points is an
array of shape ``(m, 3)``.  Planar input (shape ``(m, 2)``) is embedded with
``z = 0``.  Evaluation uses the de Casteljau pyramid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidCurveError, NearSingularError, QuadratureError

ArrayLike = np.ndarray | Sequence[Sequence[float]]

#: relative part of the scale-aware "derivative never vanishes" cutoff
REGULARITY_RELATIVE_EPS = 1e-9
#: hard cap on quadrature panels
MAX_QUADRATURE_PANELS = 2**20


def as_points(points: ArrayLike, min_count: int = 1) -> np.ndarray:
    """Return ``points`` as a float64 ``(m, 3)`` array, validating finiteness."""
    arr = np.array(points, dtype=float)
    if arr.ndim == 1 and arr.size in (2, 3):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise InvalidCurveError(f"expected points of shape (m, 3), got {arr.shape}")
    if arr.shape[1] == 2:
        arr = np.column_stack([arr, np.zeros(len(arr))])
    if len(arr) < min_count:
        raise InvalidCurveError(f"need at least {min_count} points, got {len(arr)}")
    if not np.all(np.isfinite(arr)):
        raise InvalidCurveError("non-finite coordinate in points")
    return arr


def bbox_diagonal(points: np.ndarray) -> float:
    """Length of the diagonal of the axis-aligned bounding box of ``points``."""
    return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))


@dataclass(frozen=True, eq=False)
class BezierCurve:
    """A polynomial Bézier curve of degree ``len(control_points) - 1``.

    The stored array is a private read-only copy, so curves are safe to share.
    """

    control_points: np.ndarray

    def __post_init__(self):
        pts = as_points(self.control_points, min_count=2)
        pts.setflags(write=False)
        object.__setattr__(self, "control_points", pts)

    @property
    def degree(self) -> int:
        return len(self.control_points) - 1

    @property
    def is_closed_loop(self) -> bool:
        """True when the first and last control points coincide exactly."""
        return bool(np.array_equal(self.control_points[0], self.control_points[-1]))

    def bbox_diagonal(self) -> float:
        return bbox_diagonal(self.control_points)

    def regularity_epsilon(self) -> float:
        return REGULARITY_RELATIVE_EPS * (self.bbox_diagonal() + 1.0)

    def transformed(self, matrix: np.ndarray, offset: np.ndarray | None = None) -> "BezierCurve":
        """Apply the affine map ``x -> matrix @ x + offset`` to the control points."""
        pts = self.control_points @ np.asarray(matrix, dtype=float).T
        if offset is not None:
            pts = pts + np.asarray(offset, dtype=float)
        return BezierCurve(pts)

    def __eq__(self, other):
        if not isinstance(other, BezierCurve):
            return NotImplemented
        return np.array_equal(self.control_points, other.control_points)

    def __hash__(self):
        return hash(self.control_points.tobytes())

    def __repr__(self):
        return f"BezierCurve(degree={self.degree}, control_points={self.control_points.tolist()})"


def _check_t(t) -> np.ndarray:
    ts = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(ts)) or np.any(ts < 0.0) or np.any(ts > 1.0):
        raise DomainError(f"parameter outside [0, 1]: {t!r}")
    return ts


def de_casteljau(points: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Evaluate the Bézier polygon ``points`` at every parameter in ``ts``.

    Returns shape ``ts.shape + (3,)``.  At ``t = 0`` and ``t = 1`` the result
    is the first/last control point bitwise.
    """
    ts = np.asarray(ts, dtype=float)
    flat = ts.reshape(-1, 1, 1)
    b = np.broadcast_to(points, (flat.shape[0],) + points.shape).copy()
    n = points.shape[0] - 1
    s = 1.0 - flat
    for r in range(n):
        b[:, : n - r] = s * b[:, : n - r] + flat * b[:, 1 : n - r + 1]
    out = b[:, 0]
    # the pyramid already copies endpoints at t=0; enforce t=1 without relying on 0*x
    out[ts.reshape(-1) == 1.0] = points[-1]
    return out.reshape(ts.shape + (points.shape[1],))


def evaluate(curve: BezierCurve, t: float) -> np.ndarray:
    """Point ``C(t)`` on ``curve``; ``t`` must lie in ``[0, 1]``."""
    ts = _check_t(t)
    if ts.ndim != 0:
        raise DomainError("evaluate takes a scalar parameter; use evaluate_many")
    return de_casteljau(curve.control_points, ts)


def evaluate_many(curve: BezierCurve, ts) -> np.ndarray:
    """Vectorised :func:`evaluate` returning shape ``(len(ts), 3)``."""
    return de_casteljau(curve.control_points, _check_t(ts))


def derivative_curve(curve: BezierCurve) -> BezierCurve:
    """The hodograph: degree ``n - 1`` with control points ``n (P[m+1] - P[m])``.

    A linear curve yields a degree-0 "curve" represented with two equal control
    points, so that it can be fed back into :func:`evaluate`.
    """
    n = curve.degree
    if n < 1:
        raise InvalidCurveError("degree-zero curve has no hodograph")
    diffs = n * np.diff(curve.control_points, axis=0)
    if len(diffs) == 1:
        diffs = np.vstack([diffs, diffs])
    return BezierCurve(diffs)


def second_derivative_curve(curve: BezierCurve) -> BezierCurve:
    if curve.degree < 2:
        raise InvalidCurveError(f"second derivative needs degree >= 2, got {curve.degree}")
    return derivative_curve(derivative_curve(curve))


def _hodograph_points(points: np.ndarray) -> np.ndarray:
    n = len(points) - 1
    return n * np.diff(points, axis=0)


def derivatives_many(curve: BezierCurve, ts) -> tuple[np.ndarray, np.ndarray]:
    """``(C'(ts), C''(ts))`` for a curve of degree at least 2."""
    if curve.degree < 2:
        raise InvalidCurveError(f"curvature needs degree >= 2, got {curve.degree}")
    ts = _check_t(ts)
    d1 = _hodograph_points(curve.control_points)
    d2 = _hodograph_points(d1)
    return de_casteljau(d1, ts), de_casteljau(d2, ts)


def _curvature_terms(curve: BezierCurve, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Curvature and speed at ``ts``; raises on a vanishing derivative."""
    d1, d2 = derivatives_many(curve, ts)
    speed = np.linalg.norm(d1, axis=-1)
    eps = curve.regularity_epsilon()
    bad = speed <= eps
    if np.any(bad):
        j = int(np.argmax(bad.reshape(-1)))
        raise NearSingularError(float(ts.reshape(-1)[j]), float(speed.reshape(-1)[j]), eps)
    cross = np.linalg.norm(np.cross(d1, d2), axis=-1)
    return cross / speed**3, speed


def curvature_at(curve: BezierCurve, t: float) -> float:
    """``|C' x C''| / |C'|^3`` at ``t``."""
    ts = _check_t(t)
    kappa, _ = _curvature_terms(curve, ts.reshape(1))
    return float(kappa[0])


def curvature_many(curve: BezierCurve, ts) -> np.ndarray:
    ts = _check_t(ts)
    return _curvature_terms(curve, ts)[0]


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def adaptive_integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float,
    max_panels: int = MAX_QUADRATURE_PANELS,
) -> float:
    """Integrate a vectorised ``f`` over ``[a, b]`` to absolute error ``tol``.

    Adaptive bisection with a 15-point Gauss-Kronrod rule per panel.  Every
    round, panels whose error estimate exceeds their width-proportional share
    of ``tol`` are halved; accepted panels are frozen.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    total, total_err = 0.0, 0.0
    width_all = b - a
    n_panels = 1
    while len(lo):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        fx = f(np.clip(x, a, b))
        kron = half * (fx @ _KWEIGHTS)
        gauss = half * (fx @ _GWEIGHTS)
        err = np.abs(kron - gauss)
        share = tol * (hi - lo) / width_all
        ok = err <= share
        total += float(kron[ok].sum())
        total_err += float(err[ok].sum())
        if ok.all():
            break
        lo, hi = lo[~ok], hi[~ok]
        n_panels += len(lo)
        if n_panels > max_panels:
            raise QuadratureError(
                f"quadrature did not reach tol={tol:g} within {max_panels} panels"
            )
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    return total


def total_curvature_smooth(curve: BezierCurve, tol: float = 1e-8) -> float:
    """Integral of ``|kappa(t)| dt`` over ``[0, 1]``, with no speed factor.

    This is the parameter-space integral of curvature.  For the geometric
    total curvature (integrated against arc length), see
    :func:`bezierpl.certification.total_curvature_arclen`.
    """
    return adaptive_integrate(lambda ts: _curvature_terms(curve, ts)[0], 0.0, 1.0, tol)


def total_curvature_arclen(curve: BezierCurve, tol: float = 1e-8) -> float:
    """Integral of ``kappa(t) |C'(t)| dt`` over ``[0, 1]`` (turning of the tangent)."""

    def integrand(ts):
        kappa, speed = _curvature_terms(curve, ts)
        return kappa * speed

    return adaptive_integrate(integrand, 0.0, 1.0, tol)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(f, lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on ``[lo, hi]``; returns ``(argmin, min)``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a <= 1e-16:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


@dataclass(frozen=True)
class RegularityReport:
    min_derivative_norm: float
    argmin_t: float
    sample_count: int
    is_regular_at_samples: bool
    epsilon: float


def regularity_check(curve: BezierCurve, samples: int = 1024) -> RegularityReport:
    """Screen ``|C'(t)|`` for vanishing on ``[0, 1]``.

    Samples a uniform grid, then refines the smallest sample by golden-section
    search over its two neighbouring cells.  This is a numerical
    screen, not a proof of regularity.
    """
    if samples < 2:
        raise DomainError(f"samples must be >= 2, got {samples}")
    d1 = _hodograph_points(curve.control_points)
    ts = np.linspace(0.0, 1.0, samples)
    norms = np.linalg.norm(de_casteljau(d1, ts), axis=-1)
    j = int(np.argmin(norms))
    best_t, best = float(ts[j]), float(norms[j])
    lo, hi = ts[max(j - 1, 0)], ts[min(j + 1, samples - 1)]
    t_ref, v_ref = _golden_section(lambda t: float(np.linalg.norm(de_casteljau(d1, np.asarray(t)))), lo, hi)
    if v_ref < best:
        best_t, best = t_ref, v_ref
    eps = curve.regularity_epsilon()
    return RegularityReport(best, best_t, samples, best > eps, eps)
