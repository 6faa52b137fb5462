"""Geometry kernel tests: analytic cases, oracles, and invariance properties."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vembench.exceptions import DegenerateGeometry
from vembench.geometry import (
    QUADRATURE_ORDER4,
    Point2,
    Polygon2,
    diameter,
    format_polygon,
    integrate_over_polygon,
    interior_angles,
    is_simple,
    parse_polygon,
    point_in_polygon,
    signed_area,
    sub_triangulate,
)

UNIT_SQUARE = Polygon2([(0, 0), (1, 0), (1, 1), (0, 1)])

# Fixed star-shaped 20-gon used for the Monte-Carlo area oracle; radii are an
# arbitrary frozen list so the test is deterministic without a generator.
_RADII_20 = [
    0.93, 0.41, 0.77, 0.52, 0.99, 0.35, 0.61, 0.88, 0.47, 0.73,
    0.58, 0.95, 0.39, 0.67, 0.81, 0.44, 0.90, 0.55, 0.70, 0.62,
]


def radial_polygon(radii, phase: float = 0.0) -> Polygon2:
    n = len(radii)
    pts = []
    for k, r in enumerate(radii):
        th = 2.0 * math.pi * k / n + phase
        pts.append((r * math.cos(th), r * math.sin(th)))
    return Polygon2(pts)


def regular_polygon(n: int, radius: float = 1.0) -> Polygon2:
    return radial_polygon([radius] * n)


def _mc_area(poly: Polygon2, n_samples: int = 1_000_000) -> float:
    """Monte-Carlo area oracle: vectorized crossing-number over bbox samples."""
    verts = np.asarray(poly.vertices)
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    rng = np.random.default_rng(123456789)
    q = lo + rng.random((n_samples, 2)) * (hi - lo)
    inside = np.zeros(n_samples, dtype=bool)
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        cond = (y1 > q[:, 1]) != (y2 > q[:, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = x1 + (q[:, 1] - y1) * (x2 - x1) / (y2 - y1)
        inside ^= cond & (q[:, 0] < x_cross)
    box_area = float(np.prod(hi - lo))
    return box_area * float(inside.mean())


radii_lists = st.lists(
    st.floats(min_value=0.2, max_value=1.0, allow_nan=False), min_size=3, max_size=24
)


class TestSignedArea:
    def test_unit_square(self):
        assert signed_area(UNIT_SQUARE) == pytest.approx(1.0, abs=1e-15)

    def test_half_unit_square(self):
        tri = Polygon2([(0, 0), (1, 0), (0, 1)])
        assert signed_area(tri) == pytest.approx(0.5, abs=1e-15)

    def test_cw_input_is_normalized(self):
        p = Polygon2([(0, 0), (0, 1), (1, 1), (1, 0)])
        assert signed_area(p) == pytest.approx(1.0, abs=1e-15)

    def test_matches_monte_carlo_on_random_20_gon(self):
        poly = radial_polygon(_RADII_20)
        exact = signed_area(poly)
        estimate = _mc_area(poly)
        assert abs(estimate - exact) / exact < 0.01


class TestInteriorAngles:
    def test_unit_square(self):
        angles = interior_angles(UNIT_SQUARE)
        assert angles == pytest.approx([math.pi / 2] * 4, abs=1e-12)

    def test_regular_hexagon(self):
        angles = interior_angles(regular_polygon(6))
        assert angles == pytest.approx([2 * math.pi / 3] * 6, abs=1e-12)

    def test_l_shape_reflex_corner(self):
        p = Polygon2([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
        angles = interior_angles(p)
        assert sorted(angles) == pytest.approx(
            [math.pi / 2] * 5 + [3 * math.pi / 2], abs=1e-12
        )

    @settings(max_examples=60, deadline=None)
    @given(radii_lists)
    def test_angle_sum(self, radii):
        p = radial_polygon(radii)
        n = len(p.vertices)
        assert sum(interior_angles(p)) == pytest.approx((n - 2) * math.pi, abs=1e-9)


class TestIsSimple:
    def test_square(self):
        assert is_simple([Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)])

    def test_bowtie(self):
        assert not is_simple([Point2(0, 0), Point2(1, 1), Point2(1, 0), Point2(0, 1)])

    def test_spike_fold_back(self):
        # Last edge folds back over the first one.
        assert not is_simple([Point2(0, 0), Point2(2, 0), Point2(2, 1), Point2(1, 0)])

    def test_collinear_straight_corner_is_fine(self):
        assert is_simple(
            [Point2(0, 0), Point2(0.5, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)]
        )

    def test_non_adjacent_touch_rejected(self):
        # Vertex 3 touches edge 0 in its interior.
        pts = [Point2(0, 0), Point2(2, 0), Point2(2, 2), Point2(1, 0), Point2(0, 2)]
        assert not is_simple(pts)


class TestSubTriangulate:
    def test_convex_pentagon(self):
        p = regular_polygon(5)
        tris = sub_triangulate(p)
        assert len(tris) == 3
        total = sum(
            0.5
            * abs(
                (p.vertices[b].x - p.vertices[a].x)
                * (p.vertices[c].y - p.vertices[a].y)
                - (p.vertices[b].y - p.vertices[a].y)
                * (p.vertices[c].x - p.vertices[a].x)
            )
            for a, b, c in tris
        )
        assert total == pytest.approx(signed_area(p), rel=1e-12)

    def test_unit_square(self):
        tris = sub_triangulate(UNIT_SQUARE)
        assert len(tris) == 2

    def test_straight_vertex_is_skipped_not_fatal(self):
        p = Polygon2([(0, 0), (0.5, 0), (1, 0), (1, 1), (0, 1)])
        tris = sub_triangulate(p)
        assert len(tris) == 3

    @settings(max_examples=60, deadline=None)
    @given(radii_lists)
    def test_areas_sum_to_polygon_area(self, radii):
        p = radial_polygon(radii)
        verts = p.vertices
        total = 0.0
        for a, b, c in sub_triangulate(p):
            va, vb, vc = verts[a], verts[b], verts[c]
            area = 0.5 * ((vb.x - va.x) * (vc.y - va.y) - (vb.y - va.y) * (vc.x - va.x))
            assert area > 0
            total += area
        assert total == pytest.approx(signed_area(p), rel=1e-12)


class TestPointInPolygon:
    def test_inside(self):
        assert point_in_polygon(Point2(0.5, 0.5), UNIT_SQUARE) == "inside"

    def test_outside(self):
        assert point_in_polygon(Point2(1.5, 0.5), UNIT_SQUARE) == "outside"

    def test_boundary(self):
        assert point_in_polygon(Point2(1.0, 0.5), UNIT_SQUARE) == "boundary"

    def test_concave_pocket(self):
        p = Polygon2([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
        assert point_in_polygon(Point2(1.5, 1.5), p) == "outside"
        assert point_in_polygon(Point2(0.5, 1.5), p) == "inside"


class TestDiameter:
    def test_unit_square(self):
        assert diameter(UNIT_SQUARE) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_regular_hexagon(self):
        assert diameter(regular_polygon(6)) == pytest.approx(2.0, rel=1e-12)


class TestInvariances:
    @settings(max_examples=40, deadline=None)
    @given(radii_lists, st.integers(min_value=1, max_value=20))
    def test_vertex_list_rotation(self, radii, shift):
        p = radial_polygon(radii)
        k = shift % len(p.vertices)
        q = Polygon2(p.vertices[k:] + p.vertices[:k])
        assert signed_area(q) == pytest.approx(signed_area(p), rel=1e-12)
        assert diameter(q) == pytest.approx(diameter(p), rel=1e-12)
        rotated = interior_angles(q)
        original = interior_angles(p)
        assert sorted(rotated) == pytest.approx(sorted(original), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(radii_lists, st.floats(min_value=0.1, max_value=50.0))
    def test_uniform_scaling(self, radii, s):
        p = radial_polygon(radii)
        q = Polygon2([(v.x * s, v.y * s) for v in p.vertices])
        assert signed_area(q) == pytest.approx(signed_area(p) * s * s, rel=1e-12)
        assert diameter(q) == pytest.approx(diameter(p) * s, rel=1e-12)


class TestPolygonValidation:
    def test_too_few_vertices(self):
        with pytest.raises(DegenerateGeometry):
            Polygon2([(0, 0), (1, 0)])

    def test_zero_length_edge(self):
        with pytest.raises(DegenerateGeometry):
            Polygon2([(0, 0), (0, 0), (1, 0), (1, 1)])

    def test_self_intersection(self):
        with pytest.raises(DegenerateGeometry):
            Polygon2([(0, 0), (1, 1), (1, 0), (0, 1)])

    def test_zero_area(self):
        with pytest.raises(DegenerateGeometry):
            Polygon2([(0, 0), (1, 0), (2, 0)])

    def test_nan_coordinate(self):
        with pytest.raises(DegenerateGeometry):
            Polygon2([(0, 0), (1, 0), (float("nan"), 1)])


class TestQuadrature:
    def test_weights_sum_to_one(self):
        assert sum(w for _, w in QUADRATURE_ORDER4.points) == pytest.approx(
            1.0, abs=1e-14
        )

    def test_exact_up_to_order_4(self):
        # On the reference triangle, int x^p y^q = p! q! / (p + q + 2)!.
        a, b, c = Point2(0, 0), Point2(1, 0), Point2(0, 1)
        for p in range(5):
            for q in range(5 - p):
                exact = (
                    math.factorial(p)
                    * math.factorial(q)
                    / math.factorial(p + q + 2)
                )
                got = QUADRATURE_ORDER4.integrate(
                    lambda x, y: x**p * y**q, a, b, c
                )
                assert got == pytest.approx(exact, rel=1e-13), (p, q)

    def test_partition_of_unity_on_polygon(self):
        assert integrate_over_polygon(lambda x, y: 1.0, UNIT_SQUARE) == pytest.approx(
            1.0, abs=1e-14
        )


class TestPolygonText:
    def test_round_trip_exact(self):
        p = radial_polygon(_RADII_20, phase=0.321)
        q = parse_polygon(format_polygon(p))
        assert q.vertices == p.vertices

    def test_header_is_vertex_count(self):
        text = format_polygon(UNIT_SQUARE)
        assert text.splitlines()[0] == "4"

    def test_malformed_count_rejected(self):
        with pytest.raises(DegenerateGeometry):
            parse_polygon("3\n0 0\n1 0\n")
