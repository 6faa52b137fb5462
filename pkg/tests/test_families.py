"""Polygon family tests: grid validity, monotone stress, anchors, random draws."""

from __future__ import annotations

import math
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vembench.exceptions import InvalidParameter
from vembench.families import (
    PARAMETRIC_FAMILIES,
    STRESSED_METRICS,
    FamilyId,
    PolygonSpec,
    make_polygon,
    make_random_polygon,
    random_vertex_count,
)
from vembench.geometry import Polygon2, diameter, signed_area
from vembench.quality import compute_polygon_metrics

GRID_11 = [k / 10 for k in range(11)]
GRID_101 = [k / 100 for k in range(101)]

ROOT3 = math.sqrt(3.0)


@lru_cache(maxsize=None)
def metrics_at(family: FamilyId, t: float):
    poly = make_polygon(PolygonSpec(family, t))
    return compute_polygon_metrics(poly, ic_tol=1e-6 * diameter(poly))


@pytest.mark.parametrize("family", PARAMETRIC_FAMILIES, ids=lambda f: f.value)
class TestGridValidity:
    def test_simple_ccw_with_area_floor(self, family):
        for t in GRID_101:
            poly = make_polygon(PolygonSpec(family, t))
            # Constructing Polygon2 already rejects self-intersection.
            assert signed_area(poly) >= 1e-5
            for v in poly.vertices:
                assert -1e-12 <= v.x <= 1 + 1e-12
                assert -1e-12 <= v.y <= 1 + 1e-12

    def test_deterministic(self, family):
        a = make_polygon(PolygonSpec(family, 0.37))
        b = make_polygon(PolygonSpec(family, 0.37))
        assert a.vertices == b.vertices

    def test_seed_ignored(self, family):
        a = make_polygon(PolygonSpec(family, 0.37, seed=5))
        b = make_polygon(PolygonSpec(family, 0.37, seed=99))
        assert a.vertices == b.vertices


@pytest.mark.parametrize("family", PARAMETRIC_FAMILIES, ids=lambda f: f.value)
class TestMonotoneStress:
    def test_stressed_metrics_weakly_decrease(self, family):
        records = [metrics_at(family, t) for t in GRID_11]
        for name in sorted(STRESSED_METRICS[family]):
            values = [getattr(m, name) for m in records]
            for k in range(len(values) - 1):
                assert values[k + 1] <= values[k] + 1e-9, (
                    f"{family.value}.{name} rises at t={GRID_11[k]}->"
                    f"{GRID_11[k + 1]}: {values[k]:.8f} -> {values[k + 1]:.8f}"
                )


class TestContinuity:
    DT = 1e-3
    # Largest vertex speed over all families is ~2.3 (zeta's rotating
    # diagonal); 4.0 leaves headroom without hiding a jump.
    SPEED_CAP = 4.0

    @pytest.mark.parametrize(
        "family",
        [f for f in PARAMETRIC_FAMILIES if f is not FamilyId.NSIDED],
        ids=lambda f: f.value,
    )
    def test_small_t_step_moves_vertices_little(self, family):
        for k in range(20):
            t0 = k / 20
            a = make_polygon(PolygonSpec(family, t0)).vertices
            b = make_polygon(PolygonSpec(family, t0 + self.DT)).vertices
            assert len(a) == len(b)
            step = max(math.hypot(q.x - p.x, q.y - p.y) for p, q in zip(a, b))
            assert step <= self.SPEED_CAP * self.DT

    def test_nsided_changes_vertex_count_instead(self):
        counts = {len(make_polygon(PolygonSpec(FamilyId.NSIDED, t))) for t in GRID_11}
        assert len(counts) == 11
        assert min(counts) == 3
        assert max(counts) == 60


class TestBaselines:
    """Every family starts from a healthy shape at t=0; the handful of
    deliberate exceptions are pinned to their measured values."""

    CR_FLOOR = 0.3
    MA_FLOOR = math.radians(30.0)

    @pytest.mark.parametrize(
        "family",
        [f for f in PARAMETRIC_FAMILIES if f not in (FamilyId.MAZE, FamilyId.ZETA)],
        ids=lambda f: f.value,
    )
    def test_roundness_floor(self, family):
        assert metrics_at(family, 0.0).cr >= self.CR_FLOOR

    @pytest.mark.parametrize("family", PARAMETRIC_FAMILIES, ids=lambda f: f.value)
    def test_angle_floor(self, family):
        assert metrics_at(family, 0.0).ma >= self.MA_FLOOR

    @pytest.mark.parametrize(
        "family",
        [FamilyId.CONVEXITY, FamilyId.NSIDED, FamilyId.STAR, FamilyId.ULIKE],
        ids=lambda f: f.value,
    )
    def test_starts_convex(self, family):
        assert metrics_at(family, 0.0).kar == 1.0

    def test_pinned_exceptions(self):
        # comb teeth, the maze corridor and the Z strip have empty kernels
        # from the start; the isotropy slit leaves only a thin wedge; the
        # two corridor shapes also start below the roundness floor.
        assert metrics_at(FamilyId.COMB, 0.0).kar == 0.0
        assert metrics_at(FamilyId.MAZE, 0.0).kar == 0.0
        assert metrics_at(FamilyId.ZETA, 0.0).kar == 0.0
        assert metrics_at(FamilyId.ISOTROPY, 0.0).kar == pytest.approx(0.05302, rel=1e-2)
        assert metrics_at(FamilyId.MAZE, 0.0).cr == pytest.approx(0.15648, rel=1e-2)
        assert metrics_at(FamilyId.ZETA, 0.0).cr == pytest.approx(0.26976, rel=1e-2)


class TestAnchorShapes:
    def test_nsided_t0_is_regular_triangle(self):
        poly = make_polygon(PolygonSpec(FamilyId.NSIDED, 0.0))
        assert len(poly) == 3
        expected = [
            (0.5, 1.0),
            (0.5 - 0.25 * ROOT3, 0.25),
            (0.5 + 0.25 * ROOT3, 0.25),
        ]
        for v, (ex, ey) in zip(poly.vertices, expected):
            assert v.x == pytest.approx(ex, abs=1e-12)
            assert v.y == pytest.approx(ey, abs=1e-12)

    def test_nsided_midpoint_count(self):
        assert len(make_polygon(PolygonSpec(FamilyId.NSIDED, 0.5))) == 32

    def test_isotropy_area_closed_form(self):
        base = signed_area(make_polygon(PolygonSpec(FamilyId.ISOTROPY, 0.0)))
        for t in GRID_11:
            s = max(1.0 - t, 0.05)
            slit = 0.04 * (1.0 - t) ** 2 + 1e-4
            area = signed_area(make_polygon(PolygonSpec(FamilyId.ISOTROPY, t)))
            assert area == pytest.approx(3 * ROOT3 / 8 * s - 0.15 * slit, abs=1e-12)
            # The fixed-depth slit keeps the area ratio within 1% of the
            # pure squash factor s(t).
            assert abs(area / base - s) <= 0.01

    def test_zeta_kernel_empties(self):
        assert metrics_at(FamilyId.ZETA, 0.9).ke == 0.0

    def test_comb_inscribed_circle_closed_form(self):
        # Best circle pokes up into a tooth: touches the floor and the two
        # base corners of a tooth of half-width 0.045 at height 0.42.
        expected = (0.045**2 + 0.42**2) / (2 * 0.42)
        assert metrics_at(FamilyId.COMB, 0.0).ic == pytest.approx(expected, rel=1e-4)

    def test_star_t0_is_regular_30_gon(self):
        m = metrics_at(FamilyId.STAR, 0.0)
        assert m.cc == pytest.approx(0.5, rel=1e-9)
        assert m.cr == pytest.approx(math.cos(math.pi / 30), rel=1e-4)


class TestRandomPolygons:
    def test_deterministic(self):
        a = make_random_polygon(6, 1)
        b = make_random_polygon(6, 1)
        assert a.vertices == b.vertices

    def test_simple_20_gon(self):
        poly = make_random_polygon(20, 7)
        assert len(poly) == 20
        assert signed_area(poly) > 0

    def test_vertex_count_range(self):
        counts = {random_vertex_count(seed) for seed in range(500)}
        assert min(counts) >= 6
        assert max(counts) <= 40

    def test_seed_batch_spans_convex_to_winding(self):
        kars = []
        for seed in range(100):
            poly = make_polygon(PolygonSpec(FamilyId.RANDOM, 0.0, seed))
            m = compute_polygon_metrics(poly, ic_tol=1e-6 * diameter(poly))
            kars.append(m.kar)
        assert any(k == 1.0 for k in kars)
        assert any(k < 0.5 for k in kars)

    @pytest.mark.parametrize("bad_n", [5, 41, 6.0, "6"])
    def test_vertex_count_validated(self, bad_n):
        with pytest.raises(InvalidParameter):
            make_random_polygon(bad_n, 0)


class TestParameterValidation:
    @pytest.mark.parametrize("bad_t", [-0.001, 1.001, float("nan"), "half"])
    def test_t_outside_unit_interval(self, bad_t):
        with pytest.raises(InvalidParameter):
            make_polygon(PolygonSpec(FamilyId.COMB, bad_t))

    def test_endpoints_are_valid(self):
        for family in PARAMETRIC_FAMILIES:
            assert isinstance(make_polygon(PolygonSpec(family, 0.0)), Polygon2)
            assert isinstance(make_polygon(PolygonSpec(family, 1.0)), Polygon2)


class TestOffGridParameters:
    @settings(max_examples=60, deadline=None)
    @given(
        family=st.sampled_from(PARAMETRIC_FAMILIES),
        t=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )
    def test_valid_anywhere_on_the_interval(self, family, t):
        poly = make_polygon(PolygonSpec(family, t))
        assert signed_area(poly) >= 1e-5
        for v in poly.vertices:
            assert -1e-12 <= v.x <= 1 + 1e-12
            assert -1e-12 <= v.y <= 1 + 1e-12
