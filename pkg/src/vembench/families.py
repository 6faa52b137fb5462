"""Parametric polygon families and a random simple-polygon generator.

Eight named families interpolate, over t in [0, 1], from a well-shaped
baseline polygon to a degenerate one.  Each family is built to push a
specific subset of the quality metrics monotonically toward its bad end
(``STRESSED_METRICS``) while the rest are left free.  The random
generator joins uniform points in drawing order and 2-opts away edge
crossings until the polygon is simple.
"""

from __future__ import annotations

import enum
import math
from typing import Callable, NamedTuple, Optional

from .exceptions import DegenerateGeometry, GenerationFailed, InvalidParameter
from .geometry import Point2, Polygon2


class FamilyId(enum.Enum):
    COMB = "comb"
    CONVEXITY = "convexity"
    ISOTROPY = "isotropy"
    MAZE = "maze"
    NSIDED = "nsided"
    STAR = "star"
    ULIKE = "ulike"
    ZETA = "zeta"
    RANDOM = "random"


PARAMETRIC_FAMILIES: tuple[FamilyId, ...] = tuple(
    f for f in FamilyId if f is not FamilyId.RANDOM
)


class PolygonSpec(NamedTuple):
    """What to build: a family, its degeneracy parameter, and (for
    ``FamilyId.RANDOM`` only) the seed of the point stream."""

    family: FamilyId
    t: float
    seed: int = 0


# Metric record fields each family degrades weakly monotonically as t grows.
# Everything not listed is unconstrained for that family.
STRESSED_METRICS: dict[FamilyId, tuple[str, ...]] = {
    FamilyId.COMB: ("ic", "cr", "ar", "par", "ma", "mpd", "npd"),
    FamilyId.CONVEXITY: ("ic", "cr", "ar", "ke", "kar", "ma", "mpd", "npd"),
    FamilyId.ISOTROPY: ("ic", "cr", "ar", "ke", "kar", "se", "er", "mpd", "npd"),
    FamilyId.MAZE: ("ic", "cr", "ar", "par", "ma", "se", "er", "mpd", "npd"),
    FamilyId.NSIDED: ("se", "mpd", "npd"),
    FamilyId.STAR: ("ar", "kar", "ma", "mpd", "npd"),
    FamilyId.ULIKE: ("ic", "cr", "ar", "ke", "kar", "par", "ma", "mpd", "npd"),
    FamilyId.ZETA: ("ic", "cr", "ar", "ke", "kar", "par", "ma", "mpd", "npd"),
}


_ROOT3_OVER_4 = math.sqrt(3.0) / 4.0


def _comb(t: float) -> list[tuple[float, float]]:
    """Four-toothed comb; teeth thin out and shear sideways."""
    base = 0.42 - 0.1 * t
    half_tooth = (0.09 - 0.085 * t) / 2.0
    shear = 0.12 * t
    pts = [(0.0, 0.0), (1.0, 0.0), (1.0, base)]
    for c in (0.8, 0.6, 0.4, 0.2):
        pts.append((c + half_tooth, base))
        pts.append((c + half_tooth + shear, 1.0))
        pts.append((c - half_tooth + shear, 1.0))
        pts.append((c - half_tooth, base))
    pts.append((0.0, base))
    return pts


def _convexity(t: float) -> list[tuple[float, float]]:
    """Square growing a V dent from the top edge.

    At t=0 the dent has zero depth (its three vertices are collinear on
    the edge), so the kernel is the full square and KAR starts at 1
    exactly.  The x-squash keeps the inscribed circle of the half-square
    beside a thinned dent from creeping back up.
    """
    half_mouth = 0.15 * (1.0 - t) ** 3.5 + 2e-4
    depth = 0.95 * t
    squash = 1.0 - 0.3 * t
    pts = [
        (0.0, 0.0),
        (1.0, 0.0),
        (1.0, 1.0),
        (0.5 + half_mouth, 1.0),
        (0.5, 1.0 - depth),
        (0.5 - half_mouth, 1.0),
        (0.0, 1.0),
    ]
    return [(squash * x, y) for x, y in pts]


def _isotropy(t: float) -> list[tuple[float, float]]:
    """Hexagon squashed vertically, with a slit cut to its center.

    The y extent scales by max(1-t, 0.05); the slit mouth half-gap
    shrinks quadratically but never closes, so the polygon stays simple
    and barely star-shaped.
    """
    squash = max(1.0 - t, 0.05)
    rise = _ROOT3_OVER_4 * squash
    slit = 0.04 * (1.0 - t) ** 2 + 1e-4
    return [
        (1.0, 0.5),
        (0.75, 0.5 + rise),
        (0.25, 0.5 + rise),
        (0.0, 0.5 + slit),
        (0.4, 0.5),
        (0.0, 0.5 - slit),
        (0.25, 0.5 - rise),
        (0.75, 0.5 - rise),
    ]


def _maze(t: float) -> list[tuple[float, float]]:
    """Spiral corridor strip, 1.25 windings inside [0.05, 0.95]^2.

    Starts chunky: slot width 0.17 leaves a benign baseline.  The width
    shrinks linearly while the gap between windings closes quadratically,
    pinching the complement without ever touching.  3*width + gap stays
    below 0.71 so the top arm is never the shortest feature.
    """
    lo, hi = 0.05, 0.95
    width = 0.17 - 0.146 * t
    gap = 0.1996 * (1.0 - t) ** 2 + 4e-4
    y1 = lo + width
    y2 = y1 + gap
    y3 = y2 + width
    y4 = hi - width
    x1 = lo + width
    x2 = hi - width - gap
    x3 = hi - width
    return [
        (lo, lo),
        (hi, lo),
        (hi, hi),
        (lo, hi),
        (lo, y2),
        (x2, y2),
        (x2, y3),
        (x1, y3),
        (x1, y4),
        (x3, y4),
        (x3, y1),
        (lo, y1),
    ]


def _nsided(t: float) -> list[tuple[float, float]]:
    """Regular n-gon inscribed in the circle of radius 0.5, n = 3..60."""
    n = 3 + math.floor(57.0 * t + 0.5)
    step = 2.0 * math.pi / n
    start = 0.5 * math.pi
    return [
        (0.5 + 0.5 * math.cos(start + k * step), 0.5 + 0.5 * math.sin(start + k * step))
        for k in range(n)
    ]


def _star(t: float) -> list[tuple[float, float]]:
    """Thirty-vertex star: ten fixed tips, pairs of retreating valleys.

    Tips keep radius 0.5, so the enclosing circle never changes; the
    chord between the two valley vertices of each notch is the pairwise
    distance that shrinks.  At t=0 all radii agree and the polygon is a
    regular 30-gon.
    """
    valley = 0.5 * (1.0 - 0.9 * t)
    step = math.pi / 15.0
    start = 0.5 * math.pi
    pts = []
    for k in range(30):
        r = 0.5 if k % 3 == 0 else valley
        a = start + k * step
        pts.append((0.5 + r * math.cos(a), 0.5 + r * math.sin(a)))
    return pts


def _ulike(t: float) -> list[tuple[float, float]]:
    """Square growing a flat-bottomed funnel slot from the top edge.

    Zero depth at t=0 (all four slot vertices collinear on the edge,
    KAR exactly 1).  The walls lean inward: a rectangular slot would
    never be star-shaped, since its vertical wall half-planes face away
    from each other.  The lean decays faster than the bottom gap so the
    deep slot turns into a near-parallel channel.
    """
    half_bottom = 0.05 * (1.0 - t) ** 2 + 2e-4
    lean = 0.2 * (1.0 - t) ** 3 + 3e-4
    half_mouth = half_bottom + lean
    depth = 0.95 * t
    squash = 1.0 - 0.45 * t
    pts = [
        (0.0, 0.0),
        (1.0, 0.0),
        (1.0, 1.0),
        (0.5 + half_mouth, 1.0),
        (0.5 + half_bottom, 1.0 - depth),
        (0.5 - half_bottom, 1.0 - depth),
        (0.5 - half_mouth, 1.0),
        (0.0, 1.0),
    ]
    return [(squash * x, y) for x, y in pts]


def _zeta(t: float) -> list[tuple[float, float]]:
    """Z of three constant-length strokes whose diagonal flattens.

    Stroke thickness is slaved to the diagonal angle (0.252 * tan(phi))
    so the inner miter where a bar roof meets the diagonal wall stays on
    the bar for every t; the end caps tilt to set the sharpest corner.
    """
    slope_angle = math.radians(50.0) * (1.0 - t) ** 3 + math.radians(0.03)
    c = math.cos(slope_angle)
    s = math.sin(slope_angle)
    # The extra linear decay keeps the inscribed circle falling faster than
    # the enclosing circle while the caps pull the far corners in.
    half = 0.126 * (1.0 - 0.6 * t) * math.tan(slope_angle)
    cap = half * math.tan(math.radians(43.0 + 5.0 * t))
    bar = 0.62
    diag = 0.84
    jtx = 0.5 + 0.5 * diag * c
    jty = 0.5 + 0.5 * diag * s
    jbx = 0.5 - 0.5 * diag * c
    jby = 0.5 - 0.5 * diag * s
    # Exact miter: this x offset lands the crotch vertex on the line of the
    # diagonal's wall, and stays in [0.252, 0.322] < bar - cap for all t.
    crotch = half * (s + (1.0 + c) * c / s)
    return [
        (jbx, jby - half),
        (jbx + bar + cap, jby - half),
        (jbx + bar - cap, jby + half),
        (jbx + crotch, jby + half),
        (jtx + half * s, jty - half * c),
        (jtx, jty),
        (jtx, jty + half),
        (jtx - bar - cap, jty + half),
        (jtx - bar + cap, jty - half),
        (jtx - crotch, jty - half),
        (jbx - half * s, jby + half * c),
        (jbx, jby),
    ]


_BUILDERS: dict[FamilyId, Callable[[float], list[tuple[float, float]]]] = {
    FamilyId.COMB: _comb,
    FamilyId.CONVEXITY: _convexity,
    FamilyId.ISOTROPY: _isotropy,
    FamilyId.MAZE: _maze,
    FamilyId.NSIDED: _nsided,
    FamilyId.STAR: _star,
    FamilyId.ULIKE: _ulike,
    FamilyId.ZETA: _zeta,
}


def make_polygon(spec: PolygonSpec) -> Polygon2:
    """Build the polygon described by ``spec``.

    Deterministic: equal specs give bitwise-equal vertices.  Raises
    InvalidParameter if t is outside [0, 1].
    """
    try:
        t_ok = 0.0 <= spec.t <= 1.0
    except TypeError:
        t_ok = False
    if not t_ok:
        raise InvalidParameter(f"parameter t must lie in [0, 1], got {spec.t!r}")
    if spec.family is FamilyId.RANDOM:
        return make_random_polygon(random_vertex_count(spec.seed), spec.seed)
    builder = _BUILDERS[spec.family]
    return Polygon2([Point2(x, y) for x, y in builder(float(spec.t))])


_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Counter-based 64-bit PRNG; equal seeds give equal streams on
    every platform, which is what pins down the random datasets."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _SPLITMIX_GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # 53 high bits, uniform in [0, 1).
        return (self.next_u64() >> 11) * 2.0 ** -53


def random_vertex_count(seed: int) -> int:
    """Vertex count for the random polygon at this seed.

    Biased toward few vertices (exponent picked against the realized
    stream): small point sets land in convex position often enough that
    a batch of a hundred seeds contains convex polygons as well as
    heavily winding ones.
    """
    r = SplitMix64(seed).next_float()
    return 6 + int(34.0 * r ** 2.5)


_MAX_UNCROSS_SWAPS = 100_000
_MAX_SEED_RETRIES = 10


def _orient(a: Point2, b: Point2, c: Point2) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _properly_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool:
    # Strict crossing test; grazing contacts are left to the final
    # simplicity validation, which bounces us to the next seed.
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    return o1 * o2 < 0.0 and o3 * o4 < 0.0


def _first_crossing(order: list[Point2]) -> Optional[tuple[int, int]]:
    n = len(order)
    for i in range(n):
        a = order[i]
        b = order[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            c = order[j]
            d = order[(j + 1) % n]
            if _properly_cross(a, b, c, d):
                return i, j
    return None


def _uncross(points: list[Point2], budget: int) -> Optional[list[Point2]]:
    """2-opt uncrossing: reverse the chain between two crossing edges.

    Each swap strictly shortens the closed tour, so this terminates on
    every input that stays numerically honest; the budget catches the
    rest.  Returns None when the budget runs out.
    """
    order = list(points)
    for _ in range(budget):
        hit = _first_crossing(order)
        if hit is None:
            return order
        i, j = hit
        order[i + 1 : j + 1] = reversed(order[i + 1 : j + 1])
    return None if _first_crossing(order) is not None else order


def make_random_polygon(n: int, seed: int) -> Polygon2:
    """Simple polygon on ``n`` uniform points in the unit square.

    Deterministic in (n, seed).  Raises InvalidParameter unless n is an
    integer in [6, 40]; raises GenerationFailed if uncrossing exhausts
    its swap budget on this seed and the next ten fallback seeds.
    """
    if not isinstance(n, int) or n < 6 or n > 40:
        raise InvalidParameter(f"vertex count must be an integer in [6, 40], got {n!r}")
    for attempt in range(_MAX_SEED_RETRIES + 1):
        stream = SplitMix64(seed + attempt)
        points = [Point2(stream.next_float(), stream.next_float()) for _ in range(n)]
        order = _uncross(points, _MAX_UNCROSS_SWAPS)
        if order is None:
            continue
        try:
            return Polygon2(order)
        except DegenerateGeometry:
            continue
    raise GenerationFailed(
        f"could not untangle {n} points within {_MAX_UNCROSS_SWAPS} swaps "
        f"(seed {seed} and {_MAX_SEED_RETRIES} fallback seeds)"
    )
