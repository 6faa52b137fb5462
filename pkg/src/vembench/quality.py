"""Per-polygon quality metrics and per-mesh aggregates.

Twelve scalar metrics per polygon: inscribed and enclosing circle radii and
their ratio, area, kernel area and its ratio, compactness, minimum angle,
shortest edge, edge ratio, and the minimum pairwise vertex distance raw and
normalized. A mesh-level record aggregates each metric as min/avg/max over a
chosen element set.

The inscribed circle uses best-first grid refinement (pole of
inaccessibility): candidate value is the signed distance to the boundary and
a cell is refined only while it could still beat the current best by more
than the tolerance, which makes the result provably tolerance-accurate.
"""

from __future__ import annotations

import heapq
import math
import random
from itertools import combinations
from typing import NamedTuple

from .exceptions import DegenerateGeometry
from .geometry import (
    Circle,
    Point2,
    Polygon2,
    _orient,
    _shoelace,
    centroid,
    diameter,
    edge_lengths,
    interior_angles,
    perimeter,
    signed_area,
)

# CSV column order for the 12 metrics. Lowercase versions are the record
# fields; the trend map records which direction is "good" (every metric is
# treated larger-is-better: ratios and angles by definition, compactness by
# the circle-limit reading, raw sizes because degeneration shrinks them).
METRIC_NAMES = ("IC", "CC", "CR", "AR", "KE", "KAR", "PAR", "MA", "SE", "ER", "MPD", "NPD")

SCALE_INVARIANT = ("CR", "KAR", "PAR", "MA", "ER", "NPD")

_WELZL_SEED = 1729
_EMPTY_AREA = 1e-14


class MetricsRecord(NamedTuple):
    ic: float
    cc: float
    cr: float
    ar: float
    ke: float
    kar: float
    par: float
    ma: float
    se: float
    er: float
    mpd: float
    npd: float

    def as_dict(self) -> dict[str, float]:
        return dict(zip(METRIC_NAMES, self))


# ---------------------------------------------------------------------------
# Inscribed circle

def _signed_distance(x: float, y: float, verts: tuple[Point2, ...]) -> float:
    """Distance to the boundary, negative outside the polygon."""
    n = len(verts)
    best = math.inf
    inside = False
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        vx, vy = bx - ax, by - ay
        wx, wy = x - ax, y - ay
        vv = vx * vx + vy * vy
        t = (wx * vx + wy * vy) / vv
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
        d = math.hypot(wx - t * vx, wy - t * vy)
        if d < best:
            best = d
        if (ay > y) != (by > y):
            if x < ax + (y - ay) * vx / vy:
                inside = not inside
    return best if inside else -best

_MAX_REFINEMENT_POPS = 5_000_000


def _triangle_incircle(verts: tuple[Point2, ...]) -> Circle:
    a = math.dist(verts[1], verts[2])
    b = math.dist(verts[2], verts[0])
    c = math.dist(verts[0], verts[1])
    s = a + b + c
    cx = (a * verts[0].x + b * verts[1].x + c * verts[2].x) / s
    cy = (a * verts[0].y + b * verts[1].y + c * verts[2].y) / s
    r = 2.0 * abs(_shoelace(verts)) / s
    return Circle(Point2(cx, cy), r)


def _canonical_frame(
    verts: tuple[Point2, ...], cx: float, cy: float, d: float
) -> tuple[tuple[Point2, ...], bool]:
    """Similarity-normalized vertex tuple plus the mirror flag used.

    Centroid to the origin, diameter to one, then the lexicographically
    smallest CCW traversal over all rotations of the polygon and of its
    mirror image. Congruent polygons (any translation, scaling, or
    reflection of each other) land on near-identical bits, so the grid
    refinement below makes the same decisions for all of them.
    """
    pts = [Point2((v.x - cx) / d, (v.y - cy) / d) for v in verts]
    n = len(pts)
    best_seq: tuple[Point2, ...] | None = None
    best_mirror = False
    for mirrored in (False, True):
        seq = [Point2(-v.x, v.y) for v in reversed(pts)] if mirrored else pts
        for s in range(n):
            rot = tuple(seq[(s + i) % n] for i in range(n))
            if best_seq is None or rot < best_seq:
                best_seq, best_mirror = rot, mirrored
    return best_seq, best_mirror


def _nearest_features(
    verts: tuple[Point2, ...], px: float, py: float, cap: int
) -> list[tuple]:
    """Boundary features closest to (px, py), nearest first, at most cap.

    A feature is either a supporting edge line ("L", nx, ny, c) with signed
    distance nx*x + ny*y - c oriented positive at the query point, or a
    vertex ("V", vx, vy) reached when the perpendicular foot clamps to an
    edge endpoint.
    """
    n = len(verts)
    lines: list[tuple[float, tuple]] = []
    corners: dict[int, float] = {}
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        vx, vy = bx - ax, by - ay
        vv = vx * vx + vy * vy
        if vv == 0.0:
            continue
        t = ((px - ax) * vx + (py - ay) * vy) / vv
        if t <= 0.0:
            d = math.hypot(px - ax, py - ay)
            corners[i] = min(corners.get(i, math.inf), d)
        elif t >= 1.0:
            j = (i + 1) % n
            d = math.hypot(px - bx, py - by)
            corners[j] = min(corners.get(j, math.inf), d)
        else:
            length = math.sqrt(vv)
            nx, ny = -vy / length, vx / length
            if nx * (px - ax) + ny * (py - ay) < 0.0:
                nx, ny = -nx, -ny
            c = nx * ax + ny * ay
            lines.append((nx * px + ny * py - c, ("L", nx, ny, c)))
    feats = lines + [(d, ("V", verts[i].x, verts[i].y)) for i, d in corners.items()]
    feats.sort(key=lambda item: item[0])
    return [f for _, f in feats[:cap]]


def _line_vertex_roots(
    q0x: float, q0y: float, tx: float, ty: float,
    nx: float, ny: float, c: float, vx: float, vy: float,
) -> list[tuple[float, float]]:
    """Points q0 + s*t with line distance equal to the distance from (vx, vy).

    The locus point q0 and unit direction t parametrize where the first two
    feature distances already agree; equating the remaining line and vertex
    distances is a quadratic in s because |t| = 1.
    """
    alpha = nx * q0x + ny * q0y - c
    beta = nx * tx + ny * ty
    wx, wy = q0x - vx, q0y - vy
    a2 = beta * beta - 1.0
    b1 = 2.0 * (alpha * beta - (tx * wx + ty * wy))
    c0 = alpha * alpha - (wx * wx + wy * wy)
    roots: list[float] = []
    if abs(a2) < 1e-12:
        if abs(b1) > 1e-30:
            roots.append(-c0 / b1)
    else:
        disc = b1 * b1 - 4.0 * a2 * c0
        if disc >= 0.0:
            sq = math.sqrt(disc)
            roots.append((-b1 + sq) / (2.0 * a2))
            roots.append((-b1 - sq) / (2.0 * a2))
    return [
        (q0x + s * tx, q0y + s * ty)
        for s in roots
        if alpha + beta * s > 0.0
    ]


def _equi_candidates(
    f1: tuple, f2: tuple, f3: tuple, px: float, py: float
) -> list[tuple[float, float]]:
    """Centers equidistant from three boundary features, or [] if singular."""
    trio = sorted((f1, f2, f3))  # "L" sorts before "V"
    kinds = "".join(f[0] for f in trio)
    if kinds == "LLL":
        (_, n1x, n1y, c1), (_, n2x, n2y, c2), (_, n3x, n3y, c3) = trio
        a11, a12, b1 = n1x - n2x, n1y - n2y, c1 - c2
        a21, a22, b2 = n1x - n3x, n1y - n3y, c1 - c3
        det = a11 * a22 - a12 * a21
        if abs(det) < 1e-12:
            return []
        qx = (b1 * a22 - b2 * a12) / det
        qy = (a11 * b2 - a21 * b1) / det
        return [(qx, qy)] if n1x * qx + n1y * qy - c1 > 0.0 else []
    if kinds == "LLV":
        (_, n1x, n1y, c1), (_, n2x, n2y, c2), (_, vx, vy) = trio
        mx, my, rhs = n1x - n2x, n1y - n2y, c1 - c2
        mm = mx * mx + my * my
        if mm < 1e-18:
            return []
        shift = (rhs - (mx * px + my * py)) / mm
        q0x, q0y = px + mx * shift, py + my * shift
        norm = math.sqrt(mm)
        return _line_vertex_roots(q0x, q0y, -my / norm, mx / norm, n1x, n1y, c1, vx, vy)
    if kinds == "LVV":
        (_, n1x, n1y, c1), (_, vx, vy), (_, wx, wy) = trio
        mx, my = wx - vx, wy - vy
        mm = mx * mx + my * my
        if mm < 1e-18:
            return []
        rhs = 0.5 * (wx * wx + wy * wy - vx * vx - vy * vy)
        shift = (rhs - (mx * px + my * py)) / mm
        q0x, q0y = px + mx * shift, py + my * shift
        norm = math.sqrt(mm)
        return _line_vertex_roots(q0x, q0y, -my / norm, mx / norm, n1x, n1y, c1, vx, vy)
    (_, ux, uy), (_, vx, vy), (_, wx, wy) = trio
    a11, a12 = 2.0 * (vx - ux), 2.0 * (vy - uy)
    a21, a22 = 2.0 * (wx - ux), 2.0 * (wy - uy)
    b1 = vx * vx + vy * vy - ux * ux - uy * uy
    b2 = wx * wx + wy * wy - ux * ux - uy * uy
    det = a11 * a22 - a12 * a21
    if abs(det) < 1e-18:
        return []
    return [((b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det)]


def inscribed_circle(p: Polygon2, tol: float | None = None) -> Circle:
    """Largest circle contained in p, to within tol on the radius.

    Triangles are handled analytically. The general case refines a cell
    grid best-first on the bound d(center) + cell_radius, so no cell that
    could exceed the returned radius by more than tol is ever discarded.
    The search runs in a canonical similarity frame and finishes with an
    exact touching-condition solve so that congruent polygons report
    bit-reproducible radii.
    """
    if signed_area(p) < _EMPTY_AREA:
        raise DegenerateGeometry("polygon area too small for an inscribed circle")
    if len(p.vertices) == 3:
        return _triangle_incircle(p.vertices)
    scale = diameter(p)
    if tol is None:
        tol = 1e-9 * scale
    frame_x, frame_y = centroid(p)
    verts, mirrored = _canonical_frame(p.vertices, frame_x, frame_y, scale)
    tol = tol / scale
    xs = [v.x for v in verts]
    ys = [v.y for v in verts]
    min_x, max_x, min_y, max_y = min(xs), max(xs), min(ys), max(ys)
    width, height = max_x - min_x, max_y - min_y
    cell = min(width, height)
    half = cell / 2.0

    best_x, best_y = min_x + width / 2.0, min_y + height / 2.0
    best_d = _signed_distance(best_x, best_y, verts)
    counter = 0
    heap: list[tuple[float, int, float, float, float]] = []
    x = min_x
    while x < max_x:
        y = min_y
        while y < max_y:
            cx, cy = x + half, y + half
            d = _signed_distance(cx, cy, verts)
            if d > best_d:
                best_d, best_x, best_y = d, cx, cy
            counter += 1
            heapq.heappush(heap, (-(d + half * math.sqrt(2.0)), counter, cx, cy, half))
            y += cell
        x += cell

    pops = 0
    while heap:
        neg_pot, _, cx, cy, h = heapq.heappop(heap)
        if -neg_pot - best_d <= tol:
            break
        pops += 1
        if pops > _MAX_REFINEMENT_POPS:
            raise DegenerateGeometry("inscribed circle did not converge at this tolerance")
        q = h / 2.0
        for dx in (-q, q):
            for dy in (-q, q):
                nx, ny = cx + dx, cy + dy
                d = _signed_distance(nx, ny, verts)
                if d > best_d:
                    best_d, best_x, best_y = d, nx, ny
                pot = d + q * math.sqrt(2.0)
                if pot - best_d > tol:
                    counter += 1
                    heapq.heappush(heap, (-pot, counter, nx, ny, q))
    # monotone pattern walk: the heap stops anywhere inside the tol band, so
    # similar polygons could report radii tol apart; climbing to the basin
    # peak makes the value reproducible under translation and reflection
    step = half
    floor = 1e-15 * (width + height)
    rounds = 0
    while step > floor and rounds < 400:
        rounds += 1
        moved = False
        for dx in (-step, 0.0, step):
            for dy in (-step, 0.0, step):
                d = _signed_distance(best_x + dx, best_y + dy, verts)
                if d > best_d:
                    best_d, best_x, best_y = d, best_x + dx, best_y + dy
                    moved = True
        if not moved:
            step /= 2.0
    # touching-condition solve: at the basin peak the circle rests on three
    # boundary features, so solving their equidistance system in closed form
    # removes the path dependence the walk cannot (ridges between
    # near-parallel edges stall compass moves at data-dependent points)
    for _ in range(4):
        feats = _nearest_features(verts, best_x, best_y, cap=10)
        improved = False
        for trio in combinations(feats, 3):
            for qx, qy in _equi_candidates(*trio, best_x, best_y):
                if abs(qx - best_x) > 0.5 or abs(qy - best_y) > 0.5:
                    continue
                d = _signed_distance(qx, qy, verts)
                if d > best_d:
                    best_d, best_x, best_y = d, qx, qy
                    improved = True
        if not improved:
            break
    if mirrored:
        best_x = -best_x
    return Circle(
        Point2(frame_x + scale * best_x, frame_y + scale * best_y),
        best_d * scale,
    )


# ---------------------------------------------------------------------------
# Minimum enclosing circle (Welzl over the vertex cloud)

def _circle_two(a: Point2, b: Point2) -> Circle:
    cx, cy = (a.x + b.x) / 2.0, (a.y + b.y) / 2.0
    return Circle(Point2(cx, cy), math.hypot(a.x - cx, a.y - cy))


def _circumcircle(a: Point2, b: Point2, c: Point2) -> Circle | None:
    d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y))
    if d == 0.0:
        return None
    aa = a.x * a.x + a.y * a.y
    bb = b.x * b.x + b.y * b.y
    cc = c.x * c.x + c.y * c.y
    ux = (aa * (b.y - c.y) + bb * (c.y - a.y) + cc * (a.y - b.y)) / d
    uy = (aa * (c.x - b.x) + bb * (a.x - c.x) + cc * (b.x - a.x)) / d
    center = Point2(ux, uy)
    return Circle(center, math.dist(center, a))


def _in_circle(c: Circle | None, p: Point2) -> bool:
    if c is None:
        return False
    return math.dist(c.center, p) <= c.radius + 1e-12


def _trivial_circle(boundary: list[Point2]) -> Circle | None:
    if not boundary:
        return None
    if len(boundary) == 1:
        return Circle(boundary[0], 0.0)
    if len(boundary) == 2:
        return _circle_two(boundary[0], boundary[1])
    a, b, c = boundary
    circ = _circumcircle(a, b, c)
    if circ is not None:
        return circ
    # Collinear support set: fall back to the widest pair.
    best = None
    for u, v in ((a, b), (a, c), (b, c)):
        cand = _circle_two(u, v)
        if all(_in_circle(cand, q) for q in boundary):
            if best is None or cand.radius < best.radius:
                best = cand
    return best


def min_enclosing_circle(p: Polygon2) -> Circle:
    """Smallest circle covering the vertices, by randomized Welzl.

    The shuffle seed is fixed so results are reproducible; minimality does
    not depend on the ordering.
    """
    pts = list(p.vertices)
    random.Random(_WELZL_SEED).shuffle(pts)

    def solve(i: int, boundary: list[Point2]) -> Circle | None:
        if i == len(pts) or len(boundary) == 3:
            return _trivial_circle(boundary)
        c = solve(i + 1, boundary)
        if _in_circle(c, pts[i]):
            return c
        return solve(i + 1, boundary + [pts[i]])

    circle = solve(0, [])
    assert circle is not None
    return circle


# ---------------------------------------------------------------------------
# Polygon kernel

def is_convex(p: Polygon2) -> bool:
    verts = p.vertices
    n = len(verts)
    return all(_orient(verts[i - 1], verts[i], verts[(i + 1) % n]) >= 0.0 for i in range(n))


def _clip_half_plane(points: list[Point2], a: Point2, b: Point2) -> list[Point2]:
    """Keep the part of the loop left of directed line ab (Sutherland-Hodgman)."""
    out: list[Point2] = []
    m = len(points)
    for i in range(m):
        cur = points[i]
        nxt = points[(i + 1) % m]
        dc = _orient(a, b, cur)
        dn = _orient(a, b, nxt)
        if dc >= 0.0:
            out.append(cur)
        if (dc > 0.0 > dn) or (dc < 0.0 < dn):
            t = dc / (dc - dn)
            out.append(Point2(cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)))
    return out


def kernel(p: Polygon2) -> Polygon2 | None:
    """Locus of points that see the whole polygon; None when empty.

    Equals the intersection of the inner half-planes of all edges, so it is
    computed by clipping the polygon against each edge's supporting line.
    Convex polygons short-circuit to themselves, which also keeps KE == AR
    exact for them.
    """
    if is_convex(p):
        return p
    verts = p.vertices
    n = len(verts)
    subject: list[Point2] = list(verts)
    for i in range(n):
        subject = _clip_half_plane(subject, verts[i], verts[(i + 1) % n])
        if len(subject) < 3:
            return None
    cleaned: list[Point2] = []
    for q in subject:
        if not cleaned or math.dist(cleaned[-1], q) > 1e-12:
            cleaned.append(q)
    if len(cleaned) >= 2 and math.dist(cleaned[0], cleaned[-1]) <= 1e-12:
        cleaned.pop()
    if len(cleaned) < 3 or _shoelace(cleaned) < _EMPTY_AREA:
        return None
    try:
        return Polygon2(cleaned)
    except DegenerateGeometry:
        return None


def kernel_area(p: Polygon2) -> float:
    k = kernel(p)
    return signed_area(k) if k is not None else 0.0


# ---------------------------------------------------------------------------
# The full per-polygon record

def compute_polygon_metrics(p: Polygon2, ic_tol: float | None = None) -> MetricsRecord:
    """All 12 metrics for one polygon.

    `ic_tol` overrides the inscribed-circle tolerance; batch callers use a
    coarser value than the interactive default because flat-maximum shapes
    (parallel corridors) make tight tolerances needlessly expensive.
    """
    verts = p.vertices
    ar = signed_area(p)
    ic = inscribed_circle(p, tol=ic_tol).radius
    cc = min_enclosing_circle(p).radius
    ke = kernel_area(p)
    kar = min(ke / ar, 1.0)
    lengths = edge_lengths(p)
    se = min(lengths)
    er = se / max(lengths)
    ma = min(interior_angles(p))
    mpd = math.inf
    n = len(verts)
    for i in range(n):
        for j in range(i + 1, n):
            d = math.dist(verts[i], verts[j])
            if d < mpd:
                mpd = d
    return MetricsRecord(
        ic=ic,
        cc=cc,
        cr=ic / cc,
        ar=ar,
        ke=ke,
        kar=kar,
        par=2.0 * math.pi * ar / perimeter(p) ** 2,
        ma=ma,
        se=se,
        er=er,
        mpd=mpd,
        npd=mpd / (2.0 * cc),
    )


# ---------------------------------------------------------------------------
# Mesh-level aggregation

# Batch tolerance: records need ~1e-6 relative accuracy on IC, and corridors
# with near-flat distance maxima blow up the refinement queue below this.
BATCH_IC_TOL_FACTOR = 1e-5


def cell_polygon(mesh, index: int) -> Polygon2:
    return Polygon2([mesh.vertices[i] for i in mesh.cells[index]])


def _record_for(mesh, index: int, cache: dict[int, MetricsRecord]) -> MetricsRecord:
    rec = cache.get(index)
    if rec is None:
        poly = cell_polygon(mesh, index)
        rec = compute_polygon_metrics(poly, ic_tol=BATCH_IC_TOL_FACTOR * diameter(poly))
        cache[index] = rec
    return rec


def selected_indices(mesh, selector: str) -> list[int]:
    """Element subset for a selector: all | polygon | worst.

    `worst` is the central polygon together with every triangle sharing at
    least one vertex with it.
    """
    if selector == "all":
        return list(range(len(mesh.cells)))
    central = [i for i, tag in enumerate(mesh.cell_tags) if tag == "P"]
    if selector == "polygon":
        return central
    if selector == "worst":
        central_verts = set()
        for i in central:
            central_verts.update(mesh.cells[i])
        out = list(central)
        for i, cell in enumerate(mesh.cells):
            if mesh.cell_tags[i] == "P":
                continue
            if any(v in central_verts for v in cell):
                out.append(i)
        return out
    raise ValueError(f"unknown selector: {selector!r}")


def aggregate_mesh_metrics(
    mesh,
    selector: str = "all",
    cache: dict[int, MetricsRecord] | None = None,
) -> dict[str, tuple[float, float, float]]:
    """Per-metric (min, avg, max) over the selected element set."""
    indices = selected_indices(mesh, selector)
    if not indices:
        raise ValueError("selector matched no elements")
    if cache is None:
        cache = {}
    records = [_record_for(mesh, i, cache) for i in indices]
    out: dict[str, tuple[float, float, float]] = {}
    for k, name in enumerate(METRIC_NAMES):
        values = [rec[k] for rec in records]
        out[name] = (min(values), sum(values) / len(values), max(values))
    return out


def worst_metric_values(
    mesh, cache: dict[int, MetricsRecord] | None = None
) -> dict[str, float]:
    """Single worst value per metric over the polygon-plus-incident set.

    Every metric is larger-is-better under the conventions above, so worst
    means minimum.
    """
    agg = aggregate_mesh_metrics(mesh, selector="worst", cache=cache)
    return {name: agg[name][0] for name in METRIC_NAMES}


def star_shape_ball_ratios(p: Polygon2) -> tuple[float, float]:
    """Diagnostic pair (kernel inscribed radius / h, min vertex gap / h).

    Reports how far an element is from the usual shape-regularity
    assumption; nothing in the pipeline enforces a threshold on it.
    """
    h = diameter(p)
    k = kernel(p)
    if k is None:
        g0 = 0.0
    else:
        try:
            g0 = inscribed_circle(k, tol=1e-6 * h).radius / h
        except DegenerateGeometry:
            # kernel collapsed to a sliver below the incircle floor
            g0 = 0.0
    verts = p.vertices
    mpd = min(
        math.dist(verts[i], verts[j])
        for i in range(len(verts))
        for j in range(i + 1, len(verts))
    )
    return g0, mpd / h
