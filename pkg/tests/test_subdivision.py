from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bezierpl import curve_core as cc
from bezierpl.curve_core import BezierCurve
from bezierpl.errors import CapExceededError, InvalidCurveError
from bezierpl.subdivision import (
    PLCurve,
    iter_levels,
    level_polyline,
    reconstruct_check,
    split_half,
    subdivide,
)

from conftest import QUAD, random_curve
from oracles import bernstein_eval, in_convex_hull


class TestSplitHalf:
    def test_segment(self):
        left, right = split_half([[0, 0, 0], [1, 0, 0]])
        assert np.array_equal(left, [[0, 0, 0], [0.5, 0, 0]])
        assert np.array_equal(right, [[0.5, 0, 0], [1, 0, 0]])

    def test_quadratic_pyramid(self):
        left, right = split_half(QUAD)
        assert np.array_equal(left, [[0, 0, 0], [1, 1, 0], [2, 1, 0]])
        assert np.array_equal(right, [[2, 1, 0], [3, 1, 0], [4, 0, 0]])

    def test_constant_polygon(self):
        p = [0.1, -7.3, 2.9]
        left, right = split_half([p] * 4)
        assert np.array_equal(left, [p] * 4)
        assert np.array_equal(right, [p] * 4)

    def test_too_few_points(self):
        with pytest.raises(InvalidCurveError):
            split_half([[0, 0, 0]])

    @given(st.integers(0, 2**32 - 1), st.integers(1, 6))
    def test_junction_equals_curve_midpoint(self, seed, n):
        c = random_curve(np.random.default_rng(seed), n)
        left, right = split_half(c.control_points)
        assert np.array_equal(left[-1], right[0])
        assert np.allclose(left[-1], bernstein_eval(c.control_points, 0.5), atol=1e-12)


class TestSubdivide:
    def test_depth_zero_identity(self, quad):
        lv = subdivide(quad, 0)
        assert len(lv) == 1
        piece = lv.pieces[0]
        assert (piece.interval_lo, piece.interval_hi) == (0, 1)
        assert np.array_equal(piece.control_points, quad.control_points)

    def test_depth_one_quadratic(self, quad):
        lv = subdivide(quad, 1)
        a, b = lv.pieces
        assert (a.interval_lo, a.interval_hi, b.interval_lo, b.interval_hi) == (0, Fraction(1, 2), Fraction(1, 2), 1)
        assert np.array_equal(a.control_points, [[0, 0, 0], [1, 1, 0], [2, 1, 0]])
        assert np.array_equal(b.control_points, [[2, 1, 0], [3, 1, 0], [4, 0, 0]])

    def test_cubic_piece_five(self, rng):
        c = random_curve(rng, 3)
        lv = subdivide(c, 3)
        assert len(lv) == 8
        p5 = lv.pieces[4]
        assert p5.k == 5
        assert (p5.interval_lo, p5.interval_hi) == (Fraction(4, 8), Fraction(5, 8))
        assert np.allclose(p5.control_points[0], cc.evaluate(c, 0.5), atol=1e-12)
        assert np.allclose(p5.control_points[-1], cc.evaluate(c, 5 / 8), atol=1e-12)

    def test_cap(self, quad):
        with pytest.raises(CapExceededError) as info:
            subdivide(quad, 21)
        assert info.value.depth == 21
        subdivide(quad, 5, cap=96)
        with pytest.raises(CapExceededError):
            subdivide(quad, 6, cap=96)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 9))
    @settings(max_examples=40)
    def test_junction_continuity_and_tiling(self, seed, n, depth):
        lv = subdivide(random_curve(np.random.default_rng(seed), n), depth)
        pts = lv.points
        assert np.array_equal(pts[:-1, -1], pts[1:, 0])
        pieces = lv.pieces
        assert pieces[0].interval_lo == 0 and pieces[-1].interval_hi == 1
        for a, b in zip(pieces, pieces[1:]):
            assert a.interval_hi == b.interval_lo
        for p in pieces:
            # integer identity: (k - (k - 1)) / 2^i
            assert p.interval_hi - p.interval_lo == Fraction(1, 2**depth)
            assert p.degree == n

    def test_iter_levels_matches_subdivide(self, rng):
        c = random_curve(rng, 4)
        levels = list(iter_levels(c, 5))
        assert [lv.depth for lv in levels] == list(range(6))
        assert np.array_equal(levels[-1].points, subdivide(c, 5).points)


class TestLevelPolyline:
    def test_identity(self, quad):
        poly = level_polyline(subdivide(quad, 0))
        assert np.array_equal(poly.vertices, quad.control_points)
        assert not poly.closed

    def test_depth_one(self, quad):
        poly = level_polyline(subdivide(quad, 1))
        assert np.array_equal(poly.vertices, [[0, 0, 0], [1, 1, 0], [2, 1, 0], [3, 1, 0], [4, 0, 0]])

    def test_vertex_count(self, rng):
        assert len(level_polyline(subdivide(random_curve(rng, 3), 4))) == 49

    def test_closed(self):
        loop = BezierCurve([[0, 0, 0], [2, 0, 0], [0, 3, 0], [-2, 0, 0], [0, 0, 0]])
        poly = level_polyline(subdivide(loop, 2), closed=True)
        assert poly.closed and len(poly) == 16
        with pytest.raises(InvalidCurveError):
            level_polyline(subdivide(BezierCurve(QUAD), 2), closed=True)


class TestPLCurve:
    def test_closed_must_not_repeat(self):
        with pytest.raises(InvalidCurveError):
            PLCurve([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 0]], closed=True)
        pl = PLCurve.from_closed_loop([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 0]])
        assert len(pl) == 3 and pl.edge_count == 3

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidCurveError):
            PLCurve([[0, 0, 0], [np.nan, 0, 0]])


class TestReconstruct:
    def test_depth_zero(self, rng):
        c = random_curve(rng, 5)
        lv = subdivide(c, 0)
        for t in rng.uniform(0, 1, 20):
            assert reconstruct_check(c, lv, t) <= 1e-15

    def test_quadratic(self, quad):
        assert reconstruct_check(quad, subdivide(quad, 1), 0.75) <= 1e-12

    def test_random_cubic_depth6(self, rng):
        c = random_curve(rng, 3)
        lv = subdivide(c, 6)
        assert max(reconstruct_check(c, lv, t) for t in rng.uniform(0, 1, 100)) <= 1e-11

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 10))
    def test_property(self, seed, n, depth):
        r = np.random.default_rng(seed)
        c = random_curve(r, n)
        lv = subdivide(c, depth)
        bound = 1e-11 * (1 + c.bbox_diagonal())
        for t in np.concatenate([r.uniform(0, 1, 10), [0.0, 1.0]]):
            assert reconstruct_check(c, lv, t) <= bound


class TestConvexHull:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 4))
    def test_pieces_inside_parent_hull(self, seed, n, depth):
        c = random_curve(np.random.default_rng(seed), n)
        lv = subdivide(c, depth)
        lo, hi = c.control_points.min(axis=0), c.control_points.max(axis=0)
        tol = 1e-12 * (1 + c.bbox_diagonal())
        pts = lv.points.reshape(-1, 3)
        assert np.all(pts >= lo - tol) and np.all(pts <= hi + tol)
        # exact barycentric containment via LP on a few points
        for x in pts[:: max(1, len(pts) // 6)]:
            assert in_convex_hull(c.control_points, x)
