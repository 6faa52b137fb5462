"""Planar geometry kernel: polygons, predicates, triangulation, quadrature.

Everything downstream (quality metrics, meshing, the solver) goes through the
types and functions in this module. All operations are pure; `Polygon2` is
immutable after construction and validated once, so the rest of the package
can assume a simple, counter-clockwise, non-degenerate vertex loop.

Coordinates are plain floats in canvas units. No exact arithmetic: the
benchmark polygons have at most ~100 vertices and are built from explicit
formulas, so brute-force float predicates are both fast enough and robust
enough here.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

from .exceptions import DegenerateGeometry

# Distance below which a point is classified as lying on a boundary.
BOUNDARY_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point2
    radius: float


def _shoelace(vertices: tuple[Point2, ...] | list[Point2]) -> float:
    n = len(vertices)
    acc = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def _orient(a: Point2, b: Point2, c: Point2) -> float:
    """Twice the signed area of triangle abc; sign gives turn direction."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _on_segment(a: Point2, b: Point2, q: Point2) -> bool:
    """Whether q lies on segment ab, assuming a, b, q are collinear."""
    return (
        min(a.x, b.x) <= q.x <= max(a.x, b.x)
        and min(a.y, b.y) <= q.y <= max(a.y, b.y)
    )


def _segments_intersect(p1: Point2, p2: Point2, p3: Point2, p4: Point2) -> bool:
    """Whether closed segments p1p2 and p3p4 share at least one point."""
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment(p3, p4, p1):
        return True
    if d2 == 0 and _on_segment(p3, p4, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, p3):
        return True
    if d4 == 0 and _on_segment(p1, p2, p4):
        return True
    return False


def is_simple(vertices: list[Point2] | tuple[Point2, ...]) -> bool:
    """Brute-force simplicity test over all edge pairs.

    Adjacent edges may touch only at their shared vertex; everything else
    must be disjoint. O(n^2) over edges, which is fine at benchmark sizes.
    """
    n = len(vertices)
    if n < 3:
        return False
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        for j in range(i + 1, n):
            c, d = edges[j]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                # Shared endpoint is expected; reject only a fold-back where
                # one edge re-enters the other beyond the shared vertex.
                shared = b if j == i + 1 else a
                other_c = d if j == i + 1 else c
                far = a if j == i + 1 else d
                if _orient(a, b, other_c) == 0 and _orient(c, d, far) == 0:
                    # Fully collinear pair: simple iff they only touch at the
                    # shared vertex. A straight corner is fine, a fold-back is not.
                    if j == i + 1:
                        if _on_segment(a, b, d) and d != shared and d != a:
                            return False
                        if _on_segment(c, d, a) and a != shared and a != c:
                            return False
                    else:
                        if _on_segment(c, d, b) and b != shared and b != d:
                            return False
                        if _on_segment(a, b, c) and c != shared and c != b:
                            return False
                continue
            if _segments_intersect(a, b, c, d):
                return False
    return True


class Polygon2:
    """Simple counter-clockwise polygon given by its vertex loop.

    Construction validates every invariant the benchmark relies on:
    at least 3 finite vertices, no zero-length edges, simplicity, and a
    strictly positive area. Clockwise input is silently reversed; anything
    else raises DegenerateGeometry.
    """

    __slots__ = ("vertices",)

    vertices: tuple[Point2, ...]

    def __init__(self, vertices) -> None:
        pts = tuple(Point2(float(p[0]), float(p[1])) for p in vertices)
        if len(pts) < 3:
            raise DegenerateGeometry("polygon needs at least 3 vertices")
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise DegenerateGeometry("non-finite vertex coordinate")
        n = len(pts)
        for i in range(n):
            if pts[i] == pts[(i + 1) % n]:
                raise DegenerateGeometry(f"zero-length edge at vertex {i}")
        area2 = _shoelace(pts)
        if area2 < 0:
            pts = pts[::-1]
            area2 = -area2
        if area2 <= 0 or not math.isfinite(area2):
            raise DegenerateGeometry("polygon area is not positive")
        if not is_simple(pts):
            raise DegenerateGeometry("polygon is self-intersecting")
        object.__setattr__(self, "vertices", pts)

    def __setattr__(self, name, value):
        raise AttributeError("Polygon2 is immutable")

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polygon2) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon2({len(self.vertices)} vertices)"


def signed_area(p: Polygon2) -> float:
    """Shoelace area; positive because polygons are normalized to CCW."""
    return _shoelace(p.vertices)


def perimeter(p: Polygon2) -> float:
    verts = p.vertices
    n = len(verts)
    return sum(math.dist(verts[i], verts[(i + 1) % n]) for i in range(n))


def edge_lengths(p: Polygon2) -> list[float]:
    verts = p.vertices
    n = len(verts)
    return [math.dist(verts[i], verts[(i + 1) % n]) for i in range(n)]


def centroid(p: Polygon2) -> Point2:
    """Area centroid (not the vertex average)."""
    verts = p.vertices
    n = len(verts)
    cx = cy = 0.0
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    a = _shoelace(verts)
    return Point2(cx / (6.0 * a), cy / (6.0 * a))


def interior_angles(p: Polygon2) -> list[float]:
    """Interior angle at every vertex, in radians.

    Computed as pi minus the signed turn angle, so convex corners land in
    (0, pi), straight corners at exactly pi, and reflex corners in (pi, 2*pi).
    The values sum to (n - 2)*pi for any simple polygon.
    """
    verts = p.vertices
    n = len(verts)
    out = []
    for i in range(n):
        a = verts[i - 1]
        b = verts[i]
        c = verts[(i + 1) % n]
        d1 = Point2(b.x - a.x, b.y - a.y)
        d2 = Point2(c.x - b.x, c.y - b.y)
        turn = math.atan2(d1.x * d2.y - d1.y * d2.x, d1.x * d2.x + d1.y * d2.y)
        out.append(math.pi - turn)
    return out


def diameter(p: Polygon2) -> float:
    """Maximum pairwise vertex distance (the element size h)."""
    verts = p.vertices
    best = 0.0
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            d = math.dist(verts[i], verts[j])
            if d > best:
                best = d
    return best


def _point_in_triangle(q: Point2, a: Point2, b: Point2, c: Point2) -> bool:
    """Inside-or-on-boundary test for a CCW triangle."""
    return _orient(a, b, q) >= 0 and _orient(b, c, q) >= 0 and _orient(c, a, q) >= 0


def sub_triangulate(p: Polygon2) -> list[tuple[int, int, int]]:
    """Ear-clipping triangulation as vertex-index triples.

    Returns n - 2 triangles with positive area whose areas sum to the
    polygon area. Zero-area corner candidates (straight vertices) are never
    clipped; they become convex after a neighbor is removed. Raises
    DegenerateGeometry if no ear can be found, which for a validated simple
    polygon only happens on float-degenerate inputs.
    """
    verts = p.vertices
    n = len(verts)
    if n == 3:
        return [(0, 1, 2)]
    remaining = list(range(n))
    triangles: list[tuple[int, int, int]] = []
    guard = 0
    while len(remaining) > 3:
        clipped = False
        m = len(remaining)
        for k in range(m):
            i_prev = remaining[(k - 1) % m]
            i_cur = remaining[k]
            i_next = remaining[(k + 1) % m]
            a, b, c = verts[i_prev], verts[i_cur], verts[i_next]
            if _orient(a, b, c) <= 0:
                continue
            blocked = False
            for idx in remaining:
                if idx in (i_prev, i_cur, i_next):
                    continue
                if _point_in_triangle(verts[idx], a, b, c):
                    blocked = True
                    break
            if blocked:
                continue
            triangles.append((i_prev, i_cur, i_next))
            remaining.pop(k)
            clipped = True
            break
        if not clipped:
            raise DegenerateGeometry("ear clipping failed: no ear found")
        guard += 1
        if guard > n * n:
            raise DegenerateGeometry("ear clipping failed: did not terminate")
    triangles.append((remaining[0], remaining[1], remaining[2]))
    return triangles


def _dist_point_segment(q: Point2, a: Point2, b: Point2) -> float:
    vx, vy = b.x - a.x, b.y - a.y
    wx, wy = q.x - a.x, q.y - a.y
    vv = vx * vx + vy * vy
    if vv == 0.0:
        return math.dist(q, a)
    t = (wx * vx + wy * vy) / vv
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(wx - t * vx, wy - t * vy)


def point_in_polygon(q: Point2, p: Polygon2, tol: float = BOUNDARY_TOL) -> str:
    """Classify q against p as 'inside', 'boundary', or 'outside'.

    Boundary means within `tol` of some edge; the interior test is the
    crossing-number rule with the usual half-open vertex convention.
    """
    verts = p.vertices
    n = len(verts)
    for i in range(n):
        if _dist_point_segment(q, verts[i], verts[(i + 1) % n]) <= tol:
            return "boundary"
    inside = False
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        if (a.y > q.y) != (b.y > q.y):
            x_cross = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if q.x < x_cross:
                inside = not inside
    return "inside" if inside else "outside"


def polygon_contains(q: Point2, p: Polygon2, tol: float = BOUNDARY_TOL) -> bool:
    """Inside-or-boundary shorthand used by oracles and the mesher."""
    return point_in_polygon(q, p, tol) != "outside"


class TriangleQuadrature(NamedTuple):
    """Symmetric quadrature rule in barycentric coordinates on a triangle.

    `points` holds ((l1, l2, l3), weight) pairs with weights summing to 1;
    integration against a physical triangle multiplies by its area.
    """

    order: int
    points: tuple[tuple[tuple[float, float, float], float], ...]

    def integrate(
        self,
        f: Callable[[float, float], float],
        a: Point2,
        b: Point2,
        c: Point2,
    ) -> float:
        """Integral of f over triangle abc."""
        area = 0.5 * abs(_orient(a, b, c))
        acc = 0.0
        for (l1, l2, l3), w in self.points:
            x = l1 * a.x + l2 * b.x + l3 * c.x
            y = l1 * a.y + l2 * b.y + l3 * c.y
            acc += w * f(x, y)
        return area * acc


def _dunavant_order4() -> TriangleQuadrature:
    # 6-point rule, exact for total degree <= 4.
    w1, a1 = 0.223381589678011, 0.445948490915965
    w2, a2 = 0.109951743655322, 0.091576213509771
    pts = []
    for w, a in ((w1, a1), (w2, a2)):
        b = 1.0 - 2.0 * a
        pts.append(((b, a, a), w))
        pts.append(((a, b, a), w))
        pts.append(((a, a, b), w))
    return TriangleQuadrature(order=4, points=tuple(pts))


QUADRATURE_ORDER4 = _dunavant_order4()


def integrate_over_polygon(
    f: Callable[[float, float], float],
    p: Polygon2,
    rule: TriangleQuadrature = QUADRATURE_ORDER4,
) -> float:
    """Integral of f over p via ear-clip sub-triangulation."""
    verts = p.vertices
    acc = 0.0
    for i, j, k in sub_triangulate(p):
        acc += rule.integrate(f, verts[i], verts[j], verts[k])
    return acc


# Text format shared by the CLI tools: vertex count, then one "x y" line per
# vertex in CCW order, 17 significant digits so reruns are byte-stable.

def format_polygon(p: Polygon2) -> str:
    lines = [str(len(p.vertices))]
    for v in p.vertices:
        lines.append(f"{v.x:.17g} {v.y:.17g}")
    return "\n".join(lines) + "\n"


def parse_polygon(text: str) -> Polygon2:
    rows = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not rows:
        raise DegenerateGeometry("empty polygon text")
    n = int(rows[0])
    if len(rows) != n + 1:
        raise DegenerateGeometry(f"expected {n} vertex lines, got {len(rows) - 1}")
    pts = []
    for ln in rows[1:]:
        xs, ys = ln.split()
        pts.append(Point2(float(xs), float(ys)))
    return Polygon2(pts)
