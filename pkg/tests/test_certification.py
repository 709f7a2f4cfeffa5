import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bezierpl import fixtures
from bezierpl.certification import (
    FARY_MILNOR_THRESHOLD,
    UnknotCertificate,
    Verdict,
    certify_simple,
    certify_unknotted,
    level_evidence,
    piece_angle_sum,
)
from bezierpl.curve_core import BezierCurve, regularity_check, total_curvature_arclen
from bezierpl.errors import DomainError, InvalidCurveError, InvariantBreachError
from bezierpl.pl_geometry import brute_force_self_intersection, pl_total_curvature
from bezierpl.subdivision import PLCurve, level_polyline, subdivide

from conftest import LINE3, QUAD
from oracles import arccos_angles, bernstein_eval_many

# self-looping planar cubic: the curve itself crosses, so no certificate may be issued
LOOP = [[0, 0, 0], [4, 4, 0], [-2, 4, 0], [2, 0, 0]]
SQUARE = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]


class TestPieceAngleSum:
    def test_collinear(self, line3):
        assert piece_angle_sum(subdivide(line3, 2).pieces[1]) == 0.0

    def test_left_quadratic_piece(self, quad):
        assert piece_angle_sum(subdivide(quad, 1).pieces[0]) == pytest.approx(math.pi / 4, abs=1e-15)

    def test_whole_quadratic(self, quad):
        assert piece_angle_sum(subdivide(quad, 0).pieces[0]) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_degree_one(self):
        assert piece_angle_sum(np.array([[0.0, 0, 0], [1, 1, 1]])) == 0.0


class TestCertifySimple:
    def test_line_depth_zero(self, line3):
        cert = certify_simple(line3, 0)
        assert cert.verdict is Verdict.CERTIFIED_SIMPLE
        assert cert.depth_i == 0 and cert.per_piece_angle_sums == (0.0,)

    def test_quadratic_depth_zero(self, quad):
        cert = certify_simple(quad, 4, run_oracle=True)
        assert cert.certified and cert.depth_i == 0
        assert cert.max_piece_sum == pytest.approx(math.pi / 2)
        assert not cert.oracle_cross_check.intersecting

    def test_min_depth(self, quad):
        cert = certify_simple(quad, 4, min_depth=1)
        assert cert.depth_i == 1
        assert cert.per_piece_angle_sums == pytest.approx((math.pi / 4, math.pi / 4))

    def test_s1(self):
        s1 = fixtures.load("s1")
        assert brute_force_self_intersection(PLCurve(s1.control_points)).intersecting
        assert not certify_simple(s1, 0).certified
        cert = certify_simple(s1, 8, run_oracle=True)
        assert cert.certified and 0 < cert.depth_i <= 8
        assert not cert.oracle_cross_check.intersecting

    def test_s1_family_curve_is_simple_by_dense_sampling(self):
        for c in fixtures.s1_family():
            dense = bernstein_eval_many(c.control_points, np.linspace(0, 1, 4001))
            assert not brute_force_self_intersection(PLCurve(dense)).intersecting
            assert certify_simple(c, 10, run_oracle=True).certified

    def test_looped_cubic_never_certified(self):
        loop = BezierCurve(LOOP)
        cert = certify_simple(loop, 12)
        assert cert.verdict is Verdict.INCONCLUSIVE
        assert "hull-separated" in cert.reason
        # the per-piece and two-piece window sums alone would have certified here
        ev = level_evidence(subdivide(loop, 10))
        assert ev.piece_sums.max() < 0.01 and ev.window_sums.max() < 0.02
        assert brute_force_self_intersection(level_polyline(subdivide(loop, 10))).intersecting

    def test_pieces_mode_certifies_each_piece(self):
        cert = certify_simple(BezierCurve(LOOP), 12, run_oracle=True, mode="pieces")
        assert cert.certified and cert.mode == "pieces"
        assert "not covered" in cert.junction_handling_note

    def test_inconclusive_keeps_best_depth(self):
        cert = certify_simple(BezierCurve(LOOP), 6)
        sums = [level_evidence(subdivide(BezierCurve(LOOP), i)).piece_sums.max() for i in range(7)]
        assert cert.depth_i == int(np.argmin(sums))
        assert cert.max_piece_sum == pytest.approx(min(sums))

    def test_closed_loop(self):
        c1 = fixtures.load("c1")
        cert = certify_simple(c1, 10, run_oracle=True)
        assert cert.certified and cert.closed and cert.depth_i >= 2

    def test_closed_flag_mismatch(self, quad):
        with pytest.raises(InvalidCurveError):
            certify_simple(quad, 4, closed=True)

    @pytest.mark.parametrize("kw", [dict(max_depth=-1), dict(max_depth=2, min_depth=3), dict(max_depth=2, mode="x")])
    def test_bad_args(self, quad, kw):
        with pytest.raises(DomainError):
            certify_simple(quad, **kw)

    def test_cusp_is_not_certified(self):
        # control polygon folds back at the cusp, so piece sums stay near pi
        cusp = BezierCurve([[0, 0, 0], [1, 1, 0], [0, 1, 0], [1, 0, 0]])
        assert not certify_simple(cusp, 10).certified

    def test_oracle_disagreement_is_hard_error(self, monkeypatch):
        import bezierpl.certification as cert_mod

        monkeypatch.setattr(cert_mod, "_check_level", lambda *a: (True, ""))
        with pytest.raises(InvariantBreachError):
            certify_simple(BezierCurve(LOOP), 8, run_oracle=True, min_depth=8)


class TestSoundness:
    def test_random_spatial_curves(self, rng):
        done = 0
        while done < 200:
            n = int(rng.integers(3, 7))
            c = BezierCurve(rng.uniform(-10, 10, (n + 1, 3)))
            if not regularity_check(c).is_regular_at_samples:
                continue
            # raises InvariantBreachError on any disagreement
            certify_simple(c, 10, run_oracle=True)
            done += 1

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 6))
    def test_random_planar_curves(self, seed, n):
        # planar curves self-intersect often, which stresses the certificate
        r = np.random.default_rng(seed)
        c = BezierCurve(r.uniform(-10, 10, (n + 1, 2)))
        cert = certify_simple(c, 8, run_oracle=True)
        if cert.certified:
            poly = level_polyline(subdivide(c, cert.depth_i))
            assert not brute_force_self_intersection(poly).intersecting


class TestEvidenceDecay:
    @pytest.mark.parametrize("name", fixtures.NONLINEAR)
    def test_weak_monotonicity(self, name):
        c = fixtures.load(name)
        closed = c.is_closed_loop
        assert level_evidence(subdivide(c, 12), closed).piece_sums.max() < level_evidence(subdivide(c, 4), closed).piece_sums.max()

    @pytest.mark.parametrize("name", fixtures.NONLINEAR)
    def test_decay_rate(self, name):
        c = fixtures.load(name)
        depths = np.arange(5, 13)
        got = [level_evidence(subdivide(c, int(i)), c.is_closed_loop).piece_sums.max() for i in depths]
        # oracle: arccos angles per piece, slope via numpy least squares
        ref = [max(arccos_angles(p.control_points, False).sum() for p in subdivide(c, int(i)).pieces) for i in depths]
        assert np.allclose(got, ref, rtol=1e-6)
        slope = np.polyfit(depths, np.log2(ref), 1)[0]
        # angle decay is only bounded above by 2^(-i/2); faster decay is consistent with that bound
        assert slope <= -0.35
        # second-order smoothness of midpoint subdivision gives first-order angle decay
        assert -1.05 <= slope <= -0.95


class TestCertifyUnknotted:
    def test_c1(self):
        cert = certify_unknotted(fixtures.load("c1"), True, 10, min_depth=10)
        assert cert.verdict is Verdict.CERTIFIED_UNKNOTTED
        assert cert.depth_i == 10
        assert abs(cert.total_curvature_used - 2 * math.pi) <= 1e-2
        assert cert.simplicity_evidence.certified
        assert "polyline" in cert.scope_note

    def test_c2_matches_smooth(self):
        c2 = fixtures.load("c2")
        cert = certify_unknotted(c2, True, 10, min_depth=10)
        assert cert.certified
        assert abs(cert.total_curvature_used - cert.smooth_total_curvature) <= 1e-2

    def test_trefoil(self):
        cert = certify_unknotted(fixtures.load("trefoil6"))
        assert cert.verdict is Verdict.INCONCLUSIVE
        assert cert.total_curvature_used > 4 * math.pi
        assert cert.simplicity_evidence.certified

    def test_square(self):
        cert = certify_unknotted(PLCurve(SQUARE, closed=True))
        assert cert.verdict is Verdict.CERTIFIED_UNKNOTTED
        assert cert.total_curvature_used == pytest.approx(2 * math.pi)
        assert cert.threshold == FARY_MILNOR_THRESHOLD

    def test_self_intersecting_pl_is_inconclusive(self):
        bowtie = PLCurve([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], closed=True)
        cert = certify_unknotted(bowtie)
        assert cert.verdict is Verdict.INCONCLUSIVE and not cert.simplicity_evidence.certified

    def test_never_knotted(self):
        with pytest.raises(InvariantBreachError):
            UnknotCertificate(Verdict.CERTIFIED_SIMPLE, 0.0, None, 0)
        assert {v.value for v in Verdict} == {"certified_simple", "certified_unknotted", "inconclusive"}

    def test_closed_mismatch(self, quad):
        with pytest.raises(InvalidCurveError):
            certify_unknotted(quad)
        with pytest.raises(InvalidCurveError):
            certify_unknotted(PLCurve(SQUARE))
        with pytest.raises(DomainError):
            certify_unknotted(fixtures.load("c1"), closed=False)


class TestArclenTotalCurvature:
    def test_straight_line(self):
        assert total_curvature_arclen(BezierCurve(LINE3), 1e-10) == 0.0

    def test_semicircle_quadratic(self):
        c = BezierCurve([[0, 0, 0], [1, 2, 0], [2, 0, 0]])
        # oracle: tangent-angle sweep from dense atan2 samples of C'
        ts = np.linspace(0, 1, 100_001)
        d = np.column_stack([np.full_like(ts, 2.0), 4 - 8 * ts])
        theta = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
        sweep = abs(theta[-1] - theta[0])
        assert sweep == pytest.approx(2.214297435588181, abs=1e-12)
        assert abs(total_curvature_arclen(c, 1e-10) - sweep) <= 0.05 * sweep

    @pytest.mark.parametrize("name", fixtures.REGULAR_CLOSED)
    def test_pl_matches_smooth(self, name):
        c = fixtures.load(name)
        pl = pl_total_curvature(level_polyline(subdivide(c, 10), closed=True))
        assert abs(pl - total_curvature_arclen(c, 1e-8)) <= 1e-2


def test_quad_fixture_matches_example():
    assert fixtures.load("quad2").control_points.tolist() == [[float(x) for x in p] for p in QUAD]
