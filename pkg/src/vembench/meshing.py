"""Unit-square canvas meshes: a central polygon surrounded by refined triangles.

The central polygon is rescaled into the middle of [0,1]^2 and the
complement is filled with a constrained Delaunay triangulation refined to
a 20 degree minimum angle and 0.01 maximum area.  Polygon edges are never
split, and triangles touching the polygon are exempt from the angle bound,
so arbitrarily bad elements survive exactly where the central shape forces
them.  Mirroring the square twice and rescaling by one half yields the
next refinement level with congruent, halved elements.
"""

from __future__ import annotations

import math
import os
from collections import deque
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

from .exceptions import DegenerateGeometry, InvalidParameter, RefinementFailed
from .geometry import Point2, Polygon2, is_simple

MIN_ANGLE_DEG = 20.0
MAX_TRIANGLE_AREA = 0.01
MAX_STEINER_INSERTIONS = 100_000
CANVAS_SPAN = 0.4
BOUNDARY_COORD_TOL = 1e-12


class CellTag(str, Enum):
    # str mixin: tags compare equal to their file form, so consumers can
    # select cells with plain "P"/"T" literals.
    CENTRAL_POLYGON = "P"
    CANVAS_TRIANGLE = "T"


class PolygonMesh(NamedTuple):
    """Immutable conforming mesh of the unit square."""

    vertices: tuple
    cells: tuple
    cell_tags: tuple
    boundary_vertex_flags: tuple


class MeshHierarchy(NamedTuple):
    levels: tuple
    level_sizes: tuple


# ---------------------------------------------------------------------------
# predicates
#
# Float determinants with a conservative error filter, falling back to exact
# rational arithmetic when the magnitude cannot certify the sign.  The canvas
# is full of cocircular points (square corners, mirrored Steiner points), so
# the exact branch is not optional.


def _orient_sign(ax, ay, bx, by, cx, cy) -> int:
    t1 = (bx - ax) * (cy - ay)
    t2 = (by - ay) * (cx - ax)
    det = t1 - t2
    bound = 4e-16 * (abs(t1) + abs(t2))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    det = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
        Fraction(by) - Fraction(ay)
    ) * (Fraction(cx) - Fraction(ax))
    return (det > 0) - (det < 0)


def _incircle_sign(ax, ay, bx, by, cx, cy, px, py) -> int:
    """Positive iff p lies strictly inside the circumcircle of CCW (a,b,c)."""
    adx, ady = ax - px, ay - py
    bdx, bdy = bx - px, by - py
    cdx, cdy = cx - px, cy - py
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    m1 = adx * (bdy * cd - cdy * bd)
    m2 = ady * (bdx * cd - cdx * bd)
    m3 = ad * (bdx * cdy - cdx * bdy)
    det = m1 - m2 + m3
    bound = 1e-14 * (abs(m1) + abs(m2) + abs(m3))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    fax, fay = Fraction(ax) - Fraction(px), Fraction(ay) - Fraction(py)
    fbx, fby = Fraction(bx) - Fraction(px), Fraction(by) - Fraction(py)
    fcx, fcy = Fraction(cx) - Fraction(px), Fraction(cy) - Fraction(py)
    fad = fax * fax + fay * fay
    fbd = fbx * fbx + fby * fby
    fcd = fcx * fcx + fcy * fcy
    det = (
        fax * (fby * fcd - fcy * fbd)
        - fay * (fbx * fcd - fcx * fbd)
        + fad * (fbx * fcy - fcx * fby)
    )
    return (det > 0) - (det < 0)


def _circumcenter(ax, ay, bx, by, cx, cy):
    d = 2.0 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    if d == 0.0:
        return None
    b2 = (bx - ax) ** 2 + (by - ay) ** 2
    c2 = (cx - ax) ** 2 + (cy - ay) ** 2
    ux = ax + ((cy - ay) * b2 - (by - ay) * c2) / d
    uy = ay + ((bx - ax) * c2 - (cx - ax) * b2) / d
    return ux, uy


# ---------------------------------------------------------------------------
# constrained Delaunay triangulation


_OUTER = 0
_CANVAS = 1
_HOLE = 2


class _Triangulation:
    """Incremental Bowyer-Watson triangulation with constraint walls.

    Triangles are CCW index triples.  Adjacency lives in a directed edge
    map: edge (a,b) belongs to exactly one triangle and its twin (b,a) to
    the neighbor.  Cavity searches never cross edges registered as
    constraints, which is what keeps the polygon hole and the square
    boundary stable under later insertions.
    """

    def __init__(self) -> None:
        self.points: list[tuple[float, float]] = [
            (-10.0, -10.0),
            (20.0, -10.0),
            (0.5, 25.0),
        ]
        self.tris: dict[int, tuple[int, int, int]] = {}
        self.edge_map: dict[tuple[int, int], int] = {}
        self.constraints: set[frozenset] = set()
        self.region: dict[int, int] = {}
        self._next_tid = 0
        self._add_tri(0, 1, 2)
        self._last_tid = 0

    # -- structure maintenance

    def _add_tri(self, a: int, b: int, c: int) -> int:
        tid = self._next_tid
        self._next_tid += 1
        self.tris[tid] = (a, b, c)
        self.edge_map[(a, b)] = tid
        self.edge_map[(b, c)] = tid
        self.edge_map[(c, a)] = tid
        return tid

    def _remove_tri(self, tid: int) -> None:
        a, b, c = self.tris.pop(tid)
        for e in ((a, b), (b, c), (c, a)):
            if self.edge_map.get(e) == tid:
                del self.edge_map[e]
        self.region.pop(tid, None)

    def neighbor(self, a: int, b: int):
        """Triangle on the far side of directed edge (a, b), or None."""
        return self.edge_map.get((b, a))

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edge_map or (v, u) in self.edge_map

    # -- point location

    def _tri_contains(self, tid: int, x: float, y: float) -> bool:
        a, b, c = self.tris[tid]
        pts = self.points
        for u, v in ((a, b), (b, c), (c, a)):
            if _orient_sign(pts[u][0], pts[u][1], pts[v][0], pts[v][1], x, y) < 0:
                return False
        return True

    def locate(self, x: float, y: float, hint: int | None = None) -> int:
        tid = hint if hint in self.tris else self._last_tid
        if tid not in self.tris:
            tid = next(iter(self.tris))
        pts = self.points
        for _ in range(4 * len(self.tris) + 32):
            a, b, c = self.tris[tid]
            moved = False
            for u, v in ((a, b), (b, c), (c, a)):
                if _orient_sign(pts[u][0], pts[u][1], pts[v][0], pts[v][1], x, y) < 0:
                    nxt = self.neighbor(u, v)
                    if nxt is not None:
                        tid = nxt
                        moved = True
                        break
            if not moved:
                self._last_tid = tid
                return tid
        for tid in sorted(self.tris):
            if self._tri_contains(tid, x, y):
                self._last_tid = tid
                return tid
        raise DegenerateGeometry(f"point ({x}, {y}) not located in triangulation")

    # -- insertion

    def insert(self, x: float, y: float, hint: int | None = None, on_segment=None):
        """Insert a point; returns (vertex index, new tids, removed records).

        With on_segment=(u, v) the point lies on that constrained edge and
        the cavity is seeded from both flanking triangles, so the wall can
        stay up while both sides retriangulate.  Returns an existing index
        and no change records if the point coincides with a vertex.
        Removed records keep each dead triangle's vertex coordinates and
        region label so callers can label the replacements.
        """
        pts = self.points
        if on_segment is not None:
            u, v = on_segment
            for vi in (u, v):
                if (pts[vi][0] - x) ** 2 + (pts[vi][1] - y) ** 2 < 1e-26:
                    return vi, [], []
            seeds = [
                t
                for t in (self.edge_map.get((u, v)), self.edge_map.get((v, u)))
                if t is not None
            ]
            if not seeds:
                raise DegenerateGeometry(f"segment {u}-{v} has no triangles")
            cavity = set(seeds)
            stack = list(seeds)
        else:
            tid0 = self.locate(x, y, hint)
            for vi in self.tris[tid0]:
                if (pts[vi][0] - x) ** 2 + (pts[vi][1] - y) ** 2 < 1e-26:
                    return vi, [], []
            cavity = {tid0}
            stack = [tid0]
        while stack:
            tid = stack.pop()
            a, b, c = self.tris[tid]
            for u_, v_ in ((a, b), (b, c), (c, a)):
                if frozenset((u_, v_)) in self.constraints:
                    continue
                nxt = self.neighbor(u_, v_)
                if nxt is None or nxt in cavity:
                    continue
                na, nb, nc = self.tris[nxt]
                if (
                    _incircle_sign(
                        pts[na][0], pts[na][1], pts[nb][0], pts[nb][1],
                        pts[nc][0], pts[nc][1], x, y,
                    )
                    > 0
                ):
                    cavity.add(nxt)
                    stack.append(nxt)
        rim: list[tuple[int, int]] = []
        for tid in sorted(cavity):
            a, b, c = self.tris[tid]
            for u_, v_ in ((a, b), (b, c), (c, a)):
                nxt = self.neighbor(u_, v_)
                if nxt is None or nxt not in cavity:
                    rim.append((u_, v_))
        removed = [
            (tuple(pts[k] for k in self.tris[tid]), self.region.get(tid))
            for tid in sorted(cavity)
        ]
        for tid in sorted(cavity):
            self._remove_tri(tid)
        vi = len(self.points)
        self.points.append((x, y))
        new_tids = [self._add_tri(u_, v_, vi) for u_, v_ in rim]
        self._last_tid = new_tids[0]
        return vi, new_tids, removed

    def assign_regions(self, new_tids: Sequence[int], removed) -> None:
        """Label new triangles by which removed triangle contains them."""
        pts = self.points
        for tid in new_tids:
            a, b, c = self.tris[tid]
            gx = (pts[a][0] + pts[b][0] + pts[c][0]) / 3.0
            gy = (pts[a][1] + pts[b][1] + pts[c][1]) / 3.0
            for coords, label in removed:
                (ax, ay), (bx, by), (cx, cy) = coords
                if (
                    _orient_sign(ax, ay, bx, by, gx, gy) >= 0
                    and _orient_sign(bx, by, cx, cy, gx, gy) >= 0
                    and _orient_sign(cx, cy, ax, ay, gx, gy) >= 0
                ):
                    self.region[tid] = label
                    break
            else:
                raise DegenerateGeometry("new triangle escaped its cavity")

    # -- constraint enforcement

    def enforce_edge(self, u: int, v: int) -> None:
        self.constraints.add(frozenset((u, v)))
        if not self.has_edge(u, v):
            self._cut_in_edge(u, v)

    def _cut_in_edge(self, u: int, v: int) -> None:
        pts = self.points
        ux, uy = pts[u]
        vx, vy = pts[v]
        start = None
        for tid in sorted(self.tris):
            t = self.tris[tid]
            if u not in t:
                continue
            i = t.index(u)
            a, b = t[(i + 1) % 3], t[(i + 2) % 3]
            sa = _orient_sign(ux, uy, vx, vy, pts[a][0], pts[a][1])
            sb = _orient_sign(ux, uy, vx, vy, pts[b][0], pts[b][1])
            # in CCW (u,a,b) the wedge at u holds u->v iff a is right of the
            # segment line and b is left of it
            if sa < 0 and sb > 0:
                start = (tid, b, a)
                break
        if start is None:
            raise DegenerateGeometry(
                f"cannot route constraint edge {u}-{v} (collinear obstruction)"
            )
        tid, left, right = start
        crossed = [tid]
        upper = [left]
        lower = [right]
        while True:
            # the triangle ahead owns directed edge (left, right)
            nxt = self.edge_map.get((left, right))
            if nxt is None:
                raise DegenerateGeometry(f"constraint edge {u}-{v} left the mesh")
            crossed.append(nxt)
            w = next(k for k in self.tris[nxt] if k != left and k != right)
            if w == v:
                break
            sw = _orient_sign(ux, uy, vx, vy, pts[w][0], pts[w][1])
            if sw > 0:
                upper.append(w)
                left = w
            elif sw < 0:
                lower.append(w)
                right = w
            else:
                raise DegenerateGeometry(f"vertex {w} lies on constraint edge {u}-{v}")
        for tid in crossed:
            self._remove_tri(tid)
        # each side is a simple pseudo-polygon; fill it, then restore local
        # Delaunayness so later cavity searches stay star-shaped
        new = self._fill_loop([u, v] + list(reversed(upper)))
        new += self._fill_loop([u] + lower + [v])
        seeds = []
        seen = set()
        for t in new:
            a, b, c = self.tris[t]
            for e in ((a, b), (b, c), (c, a)):
                key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
                if key not in seen:
                    seen.add(key)
                    seeds.append(key)
        self._flip_pass(seeds)

    def _fill_loop(self, loop: list[int]) -> list[int]:
        """Ear-clip a CCW simple loop; returns the new triangle ids."""
        pts = self.points

        def orient(i, j, k):
            return _orient_sign(
                pts[i][0], pts[i][1], pts[j][0], pts[j][1], pts[k][0], pts[k][1]
            )

        idx = list(loop)
        new: list[int] = []
        while len(idx) > 3:
            n = len(idx)
            clipped = False
            for i in range(n):
                p, c, nx = idx[i - 1], idx[i], idx[(i + 1) % n]
                if orient(p, c, nx) <= 0:
                    continue
                ok = True
                for w in idx:
                    if w == p or w == c or w == nx:
                        continue
                    if (
                        orient(p, c, w) >= 0
                        and orient(c, nx, w) >= 0
                        and orient(nx, p, w) >= 0
                    ):
                        ok = False
                        break
                if ok:
                    new.append(self._add_tri(p, c, nx))
                    del idx[i]
                    clipped = True
                    break
            if not clipped:
                raise DegenerateGeometry("ear clipping failed on pseudo-polygon")
        if orient(*idx) <= 0:
            raise DegenerateGeometry("degenerate final ear in pseudo-polygon")
        new.append(self._add_tri(*idx))
        return new

    def _flip_pass(self, seed_edges: Sequence[tuple]) -> None:
        """Lawson flips until the seeded neighborhood is locally Delaunay."""
        pts = self.points
        queue = deque(seed_edges)
        guard = 0
        while queue:
            guard += 1
            if guard > 50_000:
                raise DegenerateGeometry("edge flip pass did not converge")
            a, b = queue.popleft()
            if frozenset((a, b)) in self.constraints:
                continue
            t1 = self.edge_map.get((a, b))
            t2 = self.edge_map.get((b, a))
            if t1 is None or t2 is None:
                continue
            r = next(k for k in self.tris[t1] if k != a and k != b)
            s = next(k for k in self.tris[t2] if k != a and k != b)
            ta, tb, tc = self.tris[t1]
            if (
                _incircle_sign(
                    pts[ta][0], pts[ta][1], pts[tb][0], pts[tb][1],
                    pts[tc][0], pts[tc][1], pts[s][0], pts[s][1],
                )
                <= 0
            ):
                continue
            if (
                _orient_sign(
                    pts[a][0], pts[a][1], pts[s][0], pts[s][1], pts[r][0], pts[r][1]
                )
                <= 0
                or _orient_sign(
                    pts[s][0], pts[s][1], pts[b][0], pts[b][1], pts[r][0], pts[r][1]
                )
                <= 0
            ):
                continue
            label = self.region.get(t1)
            self._remove_tri(t1)
            self._remove_tri(t2)
            n1 = self._add_tri(a, s, r)
            n2 = self._add_tri(s, b, r)
            if label is not None:
                self.region[n1] = label
                self.region[n2] = label
            for e in ((a, s), (s, b), (b, r), (r, a)):
                queue.append((e[0], e[1]) if e[0] < e[1] else (e[1], e[0]))

    # -- region labels

    def flood_regions(self, corner_vertex: int) -> None:
        comp: dict[int, int] = {}
        ncomp = 0
        for seed in sorted(self.tris):
            if seed in comp:
                continue
            cid = ncomp
            ncomp += 1
            comp[seed] = cid
            stack = [seed]
            while stack:
                tid = stack.pop()
                a, b, c = self.tris[tid]
                for u, v in ((a, b), (b, c), (c, a)):
                    if frozenset((u, v)) in self.constraints:
                        continue
                    nxt = self.neighbor(u, v)
                    if nxt is not None and nxt not in comp:
                        comp[nxt] = cid
                        stack.append(nxt)
        outer = {
            comp[tid] for tid, t in self.tris.items() if 0 in t or 1 in t or 2 in t
        }
        canvas = {
            comp[tid]
            for tid, t in self.tris.items()
            if comp[tid] not in outer and corner_vertex in t
        }
        if len(canvas) != 1:
            raise DegenerateGeometry("canvas region is not a single component")
        for tid in self.tris:
            c = comp[tid]
            self.region[tid] = (
                _OUTER if c in outer else _CANVAS if c in canvas else _HOLE
            )


# ---------------------------------------------------------------------------
# canvas construction


def place_in_canvas(p: Polygon2) -> Polygon2:
    """Rescale p so its bounding box is centered and spans 40% of the square."""
    xs = [v.x for v in p.vertices]
    ys = [v.y for v in p.vertices]
    cx = (min(xs) + max(xs)) / 2.0
    cy = (min(ys) + max(ys)) / 2.0
    scale = CANVAS_SPAN / max(max(xs) - min(xs), max(ys) - min(ys))
    return Polygon2(
        [(0.5 + (v.x - cx) * scale, 0.5 + (v.y - cy) * scale) for v in p.vertices]
    )


def _min_angle(ax, ay, bx, by, cx, cy) -> float:
    sides = [
        math.hypot(bx - ax, by - ay),
        math.hypot(cx - bx, cy - by),
        math.hypot(ax - cx, ay - cy),
    ]
    worst = math.pi
    for i in range(3):
        a, b, c = sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]
        cosv = (b * b + c * c - a * a) / (2.0 * b * c)
        worst = min(worst, math.acos(max(-1.0, min(1.0, cosv))))
    return worst


def _tri_area(ax, ay, bx, by, cx, cy) -> float:
    return 0.5 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def _encroaches(px, py, ax, ay, bx, by) -> bool:
    mx, my = (ax + bx) / 2.0, (ay + by) / 2.0
    r2 = (ax - mx) ** 2 + (ay - my) ** 2
    return (px - mx) ** 2 + (py - my) ** 2 < r2 * (1.0 - 1e-12)


def build_canvas_mesh(
    p: Polygon2, max_insertions: int = MAX_STEINER_INSERTIONS
) -> PolygonMesh:
    """Mesh the unit square around a centered, rescaled copy of p.

    The square boundary may be split during refinement; polygon edges may
    not, and triangles sharing a vertex with the polygon are exempt from
    the 20 degree bound.  Raises RefinementFailed when the Steiner budget
    is exhausted.
    """
    placed = place_in_canvas(p)
    m = len(placed)
    tri = _Triangulation()
    for x, y in ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)):
        tri.insert(x, y)
    for v in placed.vertices:
        tri.insert(v.x, v.y)
    # square corners landed at indices 3..6, polygon vertices at 7..7+m-1
    square_edges = [(3, 4), (4, 5), (5, 6), (6, 3)]
    polygon_edges = [(7 + i, 7 + (i + 1) % m) for i in range(m)]
    for u, v in square_edges + polygon_edges:
        tri.enforce_edge(u, v)
    tri.flood_regions(corner_vertex=3)

    polygon_vertex_ids = set(range(7, 7 + m))
    splittable: list[tuple[int, int]] = list(square_edges)
    splittable_set: set[tuple[int, int]] = set(square_edges)
    protected: list[tuple[int, int]] = list(polygon_edges)
    unrefinable: set[tuple] = set()
    insertions = 0
    min_angle_rad = math.radians(MIN_ANGLE_DEG) - 1e-9
    seg_queue: deque = deque(square_edges)
    tri_queue: deque = deque(
        sorted(t for t in tri.tris if tri.region.get(t) == _CANVAS)
    )

    def tri_key(tid: int) -> tuple:
        return tuple(sorted(tri.tris[tid]))

    def is_bad(tid: int) -> bool:
        a, b, c = tri.tris[tid]
        (ax, ay), (bx, by), (cx, cy) = (tri.points[k] for k in (a, b, c))
        if _tri_area(ax, ay, bx, by, cx, cy) > MAX_TRIANGLE_AREA:
            return True
        if a in polygon_vertex_ids or b in polygon_vertex_ids or c in polygon_vertex_ids:
            return False
        return _min_angle(ax, ay, bx, by, cx, cy) < min_angle_rad

    def seg_encroached(u: int, v: int) -> bool:
        # only the canvas-side apex matters; the outer half is scrap
        (ax, ay), (bx, by) = tri.points[u], tri.points[v]
        for t in (tri.edge_map.get((u, v)), tri.edge_map.get((v, u))):
            if t is None or tri.region.get(t) != _CANVAS:
                continue
            w = next(k for k in tri.tris[t] if k != u and k != v)
            if _encroaches(tri.points[w][0], tri.points[w][1], ax, ay, bx, by):
                return True
        return False

    def do_insert(x: float, y: float, hint, on_segment=None) -> bool:
        nonlocal insertions
        vi, new_tids, removed = tri.insert(x, y, hint, on_segment=on_segment)
        if not new_tids:
            return False
        tri.assign_regions(new_tids, removed)
        if on_segment is not None:
            u, v = on_segment
            tri.constraints.discard(frozenset(on_segment))
            tri.constraints.add(frozenset((u, vi)))
            tri.constraints.add(frozenset((vi, v)))
            splittable.remove(on_segment)
            splittable_set.discard(on_segment)
            for sub in ((u, vi), (vi, v)):
                splittable.append(sub)
                splittable_set.add(sub)
                seg_queue.append(sub)
        insertions += 1
        if insertions > max_insertions:
            raise RefinementFailed(
                f"refinement exceeded {max_insertions} point insertions"
            )
        for t in new_tids:
            if tri.region.get(t) != _CANVAS:
                continue
            tri_queue.append(t)
            a, b, c = tri.tris[t]
            for e in ((a, b), (b, c), (c, a)):
                if e in splittable_set:
                    seg_queue.append(e)
                elif (e[1], e[0]) in splittable_set:
                    seg_queue.append((e[1], e[0]))
        return True

    def split_segment(seg: tuple[int, int]) -> None:
        (ax, ay), (bx, by) = tri.points[seg[0]], tri.points[seg[1]]
        if not do_insert((ax + bx) / 2.0, (ay + by) / 2.0, None, on_segment=seg):
            # midpoint collapsed onto an endpoint: give up on this segment
            splittable.remove(seg)
            splittable_set.discard(seg)

    while seg_queue or tri_queue:
        if seg_queue:
            seg = seg_queue.popleft()
            if seg in splittable_set and seg_encroached(*seg):
                split_segment(seg)
            continue
        tid = tri_queue.popleft()
        if tid not in tri.tris or tri.region.get(tid) != _CANVAS:
            continue
        if tri_key(tid) in unrefinable or not is_bad(tid):
            continue
        a, b, c = tri.tris[tid]
        (ax, ay), (bx, by), (cx, cy) = (tri.points[k] for k in (a, b, c))
        area_bad = _tri_area(ax, ay, bx, by, cx, cy) > MAX_TRIANGLE_AREA

        gx, gy = (ax + bx + cx) / 3.0, (ay + by + cy) / 3.0

        def crosses_wall(px: float, py: float) -> bool:
            # does the segment from the triangle centroid to (px, py) cross a
            # constraint? touching counts: a hidden point would be inserted on
            # the far side of the wall without ever removing this triangle
            for wall in protected + splittable:
                (wax, way), (wbx, wby) = tri.points[wall[0]], tri.points[wall[1]]
                s1 = _orient_sign(gx, gy, px, py, wax, way)
                s2 = _orient_sign(gx, gy, px, py, wbx, wby)
                if s1 * s2 > 0:
                    continue
                s3 = _orient_sign(wax, way, wbx, wby, gx, gy)
                s4 = _orient_sign(wax, way, wbx, wby, px, py)
                if s3 * s4 > 0:
                    continue
                return True
            return False

        def blocked(px: float, py: float) -> bool:
            # a point outside the unit square cannot sit in the canvas, nor
            # can one whose containing triangle belongs to another region or
            # whose cavity could not reach this triangle
            if not (0.0 <= px <= 1.0 and 0.0 <= py <= 1.0):
                return True
            if any(
                _encroaches(
                    px, py,
                    tri.points[s[0]][0], tri.points[s[0]][1],
                    tri.points[s[1]][0], tri.points[s[1]][1],
                )
                for s in protected
            ):
                return True
            if tri.region.get(tri.locate(px, py, hint=tid)) != _CANVAS:
                return True
            return crosses_wall(px, py)

        def encroached_splittable(px: float, py: float):
            for s in splittable:
                if _encroaches(
                    px, py,
                    tri.points[s[0]][0], tri.points[s[0]][1],
                    tri.points[s[1]][0], tri.points[s[1]][1],
                ):
                    return s
            return None

        cc = _circumcenter(ax, ay, bx, by, cx, cy)
        if cc is not None:
            seg = encroached_splittable(*cc)
            if seg is not None:
                split_segment(seg)
                tri_queue.append(tid)
                continue
        if cc is None or blocked(*cc):
            # an oversized triangle can still shrink from its centroid even
            # when the circumcenter is walled off; an angle-only violation
            # cannot be cured that way, so it stays as is
            if not area_bad:
                unrefinable.add(tri_key(tid))
                continue
            site = ((ax + bx + cx) / 3.0, (ay + by + cy) / 3.0)
            seg = encroached_splittable(*site)
            if seg is not None:
                split_segment(seg)
                tri_queue.append(tid)
                continue
        else:
            site = cc
        sx, sy = site
        if not do_insert(sx, sy, tri.locate(sx, sy, hint=tid)):
            unrefinable.add(tri_key(tid))
            continue
        if tid in tri.tris:
            tri_queue.append(tid)

    # extraction: drop the three cover vertices, keep polygon + canvas cells
    index_map = {old: old - 3 for old in range(3, len(tri.points))}
    vertices = tuple(Point2(x, y) for x, y in tri.points[3:])
    cells = [tuple(index_map[7 + i] for i in range(m))]
    tags = [CellTag.CENTRAL_POLYGON]
    for tid in sorted(tri.tris):
        if tri.region.get(tid) != _CANVAS:
            continue
        a, b, c = tri.tris[tid]
        cells.append((index_map[a], index_map[b], index_map[c]))
        tags.append(CellTag.CANVAS_TRIANGLE)
    flags = tuple(_on_unit_boundary(v) for v in vertices)
    mesh = PolygonMesh(vertices, tuple(cells), tuple(tags), flags)
    validate_mesh(mesh)
    return mesh


def _on_unit_boundary(v: Point2) -> bool:
    return (
        abs(v.x) <= BOUNDARY_COORD_TOL
        or abs(v.x - 1.0) <= BOUNDARY_COORD_TOL
        or abs(v.y) <= BOUNDARY_COORD_TOL
        or abs(v.y - 1.0) <= BOUNDARY_COORD_TOL
    )


# ---------------------------------------------------------------------------
# mesh-level helpers


def _cell_diameter(points: Sequence[Point2]) -> float:
    best = 0.0
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            d = math.hypot(points[i].x - points[j].x, points[i].y - points[j].y)
            if d > best:
                best = d
    return best


def mesh_size(mesh: PolygonMesh) -> float:
    """Largest point-to-point distance within any single cell."""
    return max(
        _cell_diameter([mesh.vertices[i] for i in cell]) for cell in mesh.cells
    )


def validate_mesh(mesh: PolygonMesh) -> None:
    """Raise DegenerateGeometry unless the mesh invariants hold."""
    nv = len(mesh.vertices)
    if len(mesh.cells) != len(mesh.cell_tags):
        raise DegenerateGeometry("cell/tag count mismatch")
    if len(mesh.boundary_vertex_flags) != nv:
        raise DegenerateGeometry("boundary flag count mismatch")
    total = 0.0
    edge_use: dict[frozenset, int] = {}
    for cell in mesh.cells:
        if len(cell) < 3 or len(set(cell)) != len(cell):
            raise DegenerateGeometry(f"bad cell {cell}")
        if any(not 0 <= i < nv for i in cell):
            raise DegenerateGeometry(f"cell index out of range in {cell}")
        pts = [mesh.vertices[i] for i in cell]
        area = 0.0
        for k in range(len(pts)):
            a, b = pts[k], pts[(k + 1) % len(pts)]
            area += a.x * b.y - b.x * a.y
        if area <= 0.0:
            raise DegenerateGeometry("cell is not CCW")
        total += 0.5 * area
        for k in range(len(cell)):
            e = frozenset((cell[k], cell[(k + 1) % len(cell)]))
            edge_use[e] = edge_use.get(e, 0) + 1
    if abs(total - 1.0) > 1e-9:
        raise DegenerateGeometry(f"cell areas sum to {total}, not 1")
    for e, count in edge_use.items():
        if count > 2:
            raise DegenerateGeometry(f"edge {sorted(e)} used {count} times")
        if count == 1:
            a, b = (mesh.vertices[i] for i in sorted(e))
            same_side = (
                (abs(a.x) <= BOUNDARY_COORD_TOL and abs(b.x) <= BOUNDARY_COORD_TOL)
                or (
                    abs(a.x - 1) <= BOUNDARY_COORD_TOL
                    and abs(b.x - 1) <= BOUNDARY_COORD_TOL
                )
                or (abs(a.y) <= BOUNDARY_COORD_TOL and abs(b.y) <= BOUNDARY_COORD_TOL)
                or (
                    abs(a.y - 1) <= BOUNDARY_COORD_TOL
                    and abs(b.y - 1) <= BOUNDARY_COORD_TOL
                )
            )
            if not same_side:
                raise DegenerateGeometry(
                    f"interior edge {sorted(e)} bounds only one cell"
                )
    for i, flag in enumerate(mesh.boundary_vertex_flags):
        if flag != _on_unit_boundary(mesh.vertices[i]):
            raise DegenerateGeometry(f"boundary flag wrong at vertex {i}")
    for cell, tag in zip(mesh.cells, mesh.cell_tags):
        if tag is CellTag.CENTRAL_POLYGON and len(cell) > 3:
            if not is_simple([mesh.vertices[i] for i in cell]):
                raise DegenerateGeometry("central polygon cell is not simple")


# ---------------------------------------------------------------------------
# mirroring


def _reflect_merge(mesh: PolygonMesh, axis: int) -> PolygonMesh:
    """Glue the mesh to its reflection across x=1 (axis 0) or y=1 (axis 1).

    Seam vertices carry an exact coordinate of 1.0 on the reflected axis
    (2.0 - 1.0 is exact), so duplicates merge on exact float keys.
    """
    verts = list(mesh.vertices)
    key_to_index = {(v.x, v.y): i for i, v in enumerate(verts)}
    mapped: list[int] = []
    for v in mesh.vertices:
        img = (2.0 - v.x, v.y) if axis == 0 else (v.x, 2.0 - v.y)
        idx = key_to_index.get(img)
        if idx is None:
            idx = len(verts)
            verts.append(Point2(*img))
            key_to_index[img] = idx
        mapped.append(idx)
    cells = list(mesh.cells)
    tags = list(mesh.cell_tags)
    for cell in mesh.cells:
        # reflection flips orientation; reverse each loop to stay CCW
        cells.append(tuple(mapped[i] for i in reversed(cell)))
    tags.extend(mesh.cell_tags)
    flags = (False,) * len(verts)
    return PolygonMesh(tuple(verts), tuple(cells), tuple(tags), flags)


def mirror(mesh: PolygonMesh) -> PolygonMesh:
    """Reflect across x=1, then y=1, then scale by one half.

    Every cell of the result is a congruent reflected half-size copy of a
    source cell, so scale-invariant per-cell metrics are preserved and the
    mesh size exactly halves.
    """
    strip = _reflect_merge(mesh, axis=0)
    block = _reflect_merge(strip, axis=1)
    verts = tuple(Point2(0.5 * v.x, 0.5 * v.y) for v in block.vertices)
    flags = tuple(_on_unit_boundary(v) for v in verts)
    out = PolygonMesh(verts, block.cells, block.cell_tags, flags)
    validate_mesh(out)
    return out


def build_hierarchy(mesh: PolygonMesh, levels: int) -> MeshHierarchy:
    if not isinstance(levels, int) or isinstance(levels, bool) or levels < 1:
        raise InvalidParameter(f"levels must be a positive integer, got {levels!r}")
    seq = [mesh]
    while len(seq) < levels:
        seq.append(mirror(seq[-1]))
    return MeshHierarchy(tuple(seq), tuple(mesh_size(m) for m in seq))


def reference_triangle_mesh() -> PolygonMesh:
    """Eight-triangle split of the unit square: 2x2 blocks with alternating
    diagonals, the triangle-only baseline for convergence comparisons."""
    verts = tuple(Point2(i / 2, j / 2) for j in range(3) for i in range(3))
    cells = []
    for j in range(2):
        for i in range(2):
            sw = j * 3 + i
            se, nw, ne = sw + 1, sw + 3, sw + 4
            if (i + j) % 2 == 0:
                cells.append((sw, se, ne))
                cells.append((sw, ne, nw))
            else:
                cells.append((sw, se, nw))
                cells.append((se, ne, nw))
    tags = (CellTag.CANVAS_TRIANGLE,) * len(cells)
    flags = tuple(_on_unit_boundary(v) for v in verts)
    mesh = PolygonMesh(verts, tuple(cells), tags, flags)
    validate_mesh(mesh)
    return mesh


# ---------------------------------------------------------------------------
# file formats


def write_mesh(mesh: PolygonMesh, off_path) -> None:
    """Write OFF plus a sidecar .tags file (P or T, one line per cell)."""
    off_path = os.fspath(off_path)
    lines = ["OFF", f"{len(mesh.vertices)} {len(mesh.cells)} 0"]
    for v in mesh.vertices:
        lines.append(f"{v.x!r} {v.y!r} 0.0")
    for cell in mesh.cells:
        lines.append(str(len(cell)) + " " + " ".join(str(i) for i in cell))
    with open(off_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(_tags_path(off_path), "w", encoding="ascii") as fh:
        fh.write("\n".join(tag.value for tag in mesh.cell_tags) + "\n")


def read_mesh(off_path) -> PolygonMesh:
    off_path = os.fspath(off_path)
    with open(off_path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if lines[0].strip() != "OFF":
        raise DegenerateGeometry(f"{off_path}: missing OFF header")
    nv, nf, _ = (int(t) for t in lines[1].split())
    verts = []
    for line in lines[2 : 2 + nv]:
        x, y, _z = line.split()
        verts.append(Point2(float(x), float(y)))
    cells = []
    for line in lines[2 + nv : 2 + nv + nf]:
        parts = [int(t) for t in line.split()]
        if parts[0] != len(parts) - 1:
            raise DegenerateGeometry(f"{off_path}: malformed face line {line!r}")
        cells.append(tuple(parts[1:]))
    with open(_tags_path(off_path), encoding="ascii") as fh:
        tags = tuple(CellTag(t) for t in fh.read().split())
    flags = tuple(_on_unit_boundary(v) for v in verts)
    return PolygonMesh(tuple(verts), tuple(cells), tags, flags)


def _tags_path(off_path: str) -> str:
    stem = off_path[:-4] if off_path.endswith(".off") else off_path
    return stem + ".tags"
