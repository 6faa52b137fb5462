"""Canvas meshing tests: refinement quality, conformity, mirroring, file I/O."""

from __future__ import annotations

import math

import pytest

from vembench.exceptions import DegenerateGeometry, InvalidParameter, RefinementFailed
from vembench.families import (
    PARAMETRIC_FAMILIES,
    FamilyId,
    PolygonSpec,
    make_polygon,
    make_random_polygon,
    random_vertex_count,
)
from vembench.geometry import Point2, Polygon2
from vembench.meshing import (
    CANVAS_SPAN,
    MAX_TRIANGLE_AREA,
    MIN_ANGLE_DEG,
    CellTag,
    PolygonMesh,
    build_canvas_mesh,
    build_hierarchy,
    mesh_size,
    mirror,
    read_mesh,
    reference_triangle_mesh,
    validate_mesh,
    write_mesh,
)
from vembench.quality import compute_polygon_metrics

UNIT_SQUARE = Polygon2([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


# -- local helpers, independent of the module under test


def edge_use_counts(mesh: PolygonMesh) -> dict:
    counts: dict = {}
    for cell in mesh.cells:
        for k in range(len(cell)):
            e = frozenset((cell[k], cell[(k + 1) % len(cell)]))
            counts[e] = counts.get(e, 0) + 1
    return counts


def shoelace(points) -> float:
    area = 0.0
    for k in range(len(points)):
        a, b = points[k], points[(k + 1) % len(points)]
        area += a.x * b.y - b.x * a.y
    return 0.5 * area


def tri_min_angle(points) -> float:
    (a, b, c) = points
    la = math.hypot(c.x - b.x, c.y - b.y)
    lb = math.hypot(a.x - c.x, a.y - c.y)
    lc = math.hypot(b.x - a.x, b.y - a.y)
    angles = []
    for opp, e1, e2 in ((la, lb, lc), (lb, lc, la), (lc, la, lb)):
        cosv = (e1 * e1 + e2 * e2 - opp * opp) / (2.0 * e1 * e2)
        angles.append(math.acos(max(-1.0, min(1.0, cosv))))
    return min(angles)


def on_square_boundary(v: Point2) -> bool:
    return min(abs(v.x), abs(v.x - 1.0), abs(v.y), abs(v.y - 1.0)) <= 1e-12


def check_conforming(mesh: PolygonMesh) -> None:
    assert abs(sum(shoelace([mesh.vertices[i] for i in cell]) for cell in mesh.cells) - 1.0) <= 1e-9
    for cell in mesh.cells:
        assert shoelace([mesh.vertices[i] for i in cell]) > 0.0
    for e, count in edge_use_counts(mesh).items():
        assert count in (1, 2)
        if count == 1:
            a, b = (mesh.vertices[i] for i in e)
            assert on_square_boundary(a) and on_square_boundary(b)
    for i, flag in enumerate(mesh.boundary_vertex_flags):
        assert flag == on_square_boundary(mesh.vertices[i])


class TestCanvasMesh:
    def test_square_polygon_has_one_polygon_cell(self):
        mesh = build_canvas_mesh(UNIT_SQUARE)
        assert sum(1 for t in mesh.cell_tags if t is CellTag.CENTRAL_POLYGON) == 1
        assert mesh.cell_tags[0] is CellTag.CENTRAL_POLYGON

    def test_square_polygon_nonincident_angles(self):
        mesh = build_canvas_mesh(UNIT_SQUARE)
        incident = set(mesh.cells[0])
        floor = math.radians(MIN_ANGLE_DEG) - 1e-9
        for cell, tag in zip(mesh.cells, mesh.cell_tags):
            if tag is CellTag.CENTRAL_POLYGON or any(i in incident for i in cell):
                continue
            assert tri_min_angle([mesh.vertices[i] for i in cell]) >= floor

    def test_triangle_areas_bounded(self):
        mesh = build_canvas_mesh(UNIT_SQUARE)
        for cell, tag in zip(mesh.cells, mesh.cell_tags):
            if tag is CellTag.CANVAS_TRIANGLE:
                assert shoelace([mesh.vertices[i] for i in cell]) <= MAX_TRIANGLE_AREA + 1e-12

    def test_polygon_placement_spans_canvas(self):
        mesh = build_canvas_mesh(UNIT_SQUARE)
        pts = [mesh.vertices[i] for i in mesh.cells[0]]
        xs = [v.x for v in pts]
        ys = [v.y for v in pts]
        lo, hi = 0.5 - CANVAS_SPAN / 2, 0.5 + CANVAS_SPAN / 2
        assert min(xs) == pytest.approx(lo, abs=1e-12)
        assert max(xs) == pytest.approx(hi, abs=1e-12)
        assert min(ys) == pytest.approx(lo, abs=1e-12)
        assert max(ys) == pytest.approx(hi, abs=1e-12)

    def test_many_sided_polygon_cell_count(self):
        mesh = build_canvas_mesh(make_polygon(PolygonSpec(FamilyId.NSIDED, 1.0)))
        assert len(mesh.cells) >= 61

    @pytest.mark.parametrize("family", PARAMETRIC_FAMILIES, ids=lambda f: f.value)
    @pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
    def test_family_meshes_conform(self, family, t):
        mesh = build_canvas_mesh(make_polygon(PolygonSpec(family, t)))
        check_conforming(mesh)
        assert sum(1 for tg in mesh.cell_tags if tg is CellTag.CENTRAL_POLYGON) == 1
        for cell, tag in zip(mesh.cells, mesh.cell_tags):
            if tag is CellTag.CANVAS_TRIANGLE:
                assert shoelace([mesh.vertices[i] for i in cell]) <= MAX_TRIANGLE_AREA + 1e-9

    @pytest.mark.parametrize("seed", [0, 7, 35, 64, 99])
    def test_random_polygon_meshes_conform(self, seed):
        poly = make_random_polygon(random_vertex_count(seed), seed)
        mesh = build_canvas_mesh(poly)
        check_conforming(mesh)

    def test_deterministic_rebuild(self):
        p = make_polygon(PolygonSpec(FamilyId.ZETA, 0.95))
        assert build_canvas_mesh(p) == build_canvas_mesh(p)

    def test_tiny_budget_raises(self):
        with pytest.raises(RefinementFailed):
            build_canvas_mesh(UNIT_SQUARE, max_insertions=3)

    def test_validate_rejects_tampered_mesh(self):
        mesh = build_canvas_mesh(UNIT_SQUARE)
        broken = mesh._replace(cells=mesh.cells[:-1], cell_tags=mesh.cell_tags[:-1])
        with pytest.raises(DegenerateGeometry):
            validate_mesh(broken)


@pytest.fixture(scope="module")
def base():
    return build_canvas_mesh(make_polygon(PolygonSpec(FamilyId.ZETA, 0.95)))


class TestMirror:

    def test_cell_count_quadruples(self, base):
        m1 = mirror(base)
        assert len(m1.cells) == 4 * len(base.cells)
        assert sum(1 for t in m1.cell_tags if t is CellTag.CENTRAL_POLYGON) == 4

    def test_mesh_size_halves(self, base):
        m1 = mirror(base)
        h0, h1 = mesh_size(base), mesh_size(m1)
        assert h1 == pytest.approx(0.5 * h0, rel=1e-12)

    def test_conformity_after_two_mirrors(self, base):
        m2 = mirror(mirror(base))
        check_conforming(m2)

    def test_scale_invariant_metrics_preserved(self, base):
        m1 = mirror(base)
        keys = ("CR", "KAR", "PAR", "MA", "ER", "NPD")

        def polygon_records(mesh):
            out = []
            for cell, tag in zip(mesh.cells, mesh.cell_tags):
                if tag is CellTag.CENTRAL_POLYGON:
                    poly = Polygon2([mesh.vertices[i] for i in cell])
                    rec = compute_polygon_metrics(poly).as_dict()
                    out.append([rec[k] for k in keys])
            return out

        base_rec = polygon_records(base)[0]
        for rec in polygon_records(m1):
            for got, want in zip(rec, base_rec):
                assert got == pytest.approx(want, rel=1e-9, abs=1e-9)

    def test_triangle_shape_multiset_preserved(self, base):
        m1 = mirror(base)

        def angle_multiset(mesh):
            return sorted(
                tri_min_angle([mesh.vertices[i] for i in cell])
                for cell, tag in zip(mesh.cells, mesh.cell_tags)
                if tag is CellTag.CANVAS_TRIANGLE
            )

        base_angles = angle_multiset(base)
        mirrored = angle_multiset(m1)
        assert len(mirrored) == 4 * len(base_angles)
        for i, want in enumerate(base_angles):
            for k in range(4):
                assert mirrored[4 * i + k] == pytest.approx(want, abs=1e-9)


class TestHierarchy:
    def test_reference_mesh(self):
        ref = reference_triangle_mesh()
        assert len(ref.cells) == 8
        assert all(t is CellTag.CANVAS_TRIANGLE for t in ref.cell_tags)
        check_conforming(ref)
        assert mesh_size(ref) == pytest.approx(math.sqrt(0.5), rel=1e-15)

    def test_level_counts_and_sizes(self):
        hier = build_hierarchy(reference_triangle_mesh(), 5)
        assert [len(m.cells) for m in hier.levels] == [8 * 4**i for i in range(5)]
        for i, h in enumerate(hier.level_sizes):
            assert h == pytest.approx(math.sqrt(0.5) / 2**i, rel=1e-12)
        check_conforming(hier.levels[-1])

    def test_family_hierarchy_sizes(self):
        base = build_canvas_mesh(make_polygon(PolygonSpec(FamilyId.ULIKE, 0.5)))
        hier = build_hierarchy(base, 3)
        assert len(hier.levels) == 3
        for coarse, fine in zip(hier.level_sizes, hier.level_sizes[1:]):
            assert fine == pytest.approx(0.5 * coarse, rel=1e-12)

    @pytest.mark.parametrize("levels", [0, -1, 2.0, "3"])
    def test_bad_level_count(self, levels):
        with pytest.raises(InvalidParameter):
            build_hierarchy(reference_triangle_mesh(), levels)


class TestMeshFiles:
    def test_round_trip(self, tmp_path):
        mesh = build_canvas_mesh(make_polygon(PolygonSpec(FamilyId.COMB, 0.5)))
        path = tmp_path / "mesh.off"
        write_mesh(mesh, path)
        assert read_mesh(path) == mesh

    def test_rewrite_is_byte_identical(self, tmp_path):
        mesh = build_canvas_mesh(UNIT_SQUARE)
        first = tmp_path / "a.off"
        second = tmp_path / "b.off"
        write_mesh(mesh, first)
        write_mesh(read_mesh(first), second)
        assert first.read_bytes() == second.read_bytes()
        assert (tmp_path / "a.tags").read_bytes() == (tmp_path / "b.tags").read_bytes()

    def test_file_layout(self, tmp_path):
        mesh = reference_triangle_mesh()
        path = tmp_path / "ref.off"
        write_mesh(mesh, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "OFF"
        assert lines[1] == "9 8 0"
        assert all(line.endswith(" 0.0") for line in lines[2:11])
        tags = (tmp_path / "ref.tags").read_text().split()
        assert tags == ["T"] * 8

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.off"
        path.write_text("NOFF\n3 1 0\n")
        with pytest.raises(DegenerateGeometry):
            read_mesh(path)
