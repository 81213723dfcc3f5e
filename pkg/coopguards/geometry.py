"""
Exact planar geometry for polygons with holes.

Coordinates are ``int`` or :class:`fractions.Fraction`; nothing in this
module rounds. Orientation and intersection predicates are evaluated on
exact cross products, so two calls with the same inputs always agree.

Conventions
-----------
* The outer ring is stored counter-clockwise and every hole clockwise,
  so the polygon interior is always on the LEFT of a directed side.
* Vertices are indexed globally: outer ring first, then each hole in
  input order.
* The polygon is closed: boundary points belong to it.
"""

from __future__ import annotations

import enum
import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from coopguards.errors import InvalidInputError
from coopguards.utils import format_number

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

GRID_MAX = 10 ** 9


# ── Points and predicates ────────────────────────────────────────────


@dataclass(frozen=True, order=True)
class Point:
    x: Number
    y: Number

    def __add__(self, other: 'Point') -> 'Point':
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: 'Point') -> 'Point':
        return Point(self.x - other.x, self.y - other.y)

    def __neg__(self) -> 'Point':
        return Point(-self.x, -self.y)

    def scale(self, k: Number) -> 'Point':
        return Point(self.x * k, self.y * k)

    def __str__(self) -> str:
        return f'{format_number(self.x)} {format_number(self.y)}'


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point


class Turn(enum.IntEnum):
    RIGHT = -1
    COLLINEAR = 0
    LEFT = 1


class Location(enum.Enum):
    INTERIOR = 'interior'
    BOUNDARY = 'boundary'
    EXTERIOR = 'exterior'


def vcross(u: Point, v: Point) -> Number:
    return u.x * v.y - u.y * v.x


def vdot(u: Point, v: Point) -> Number:
    return u.x * v.x + u.y * v.y


def cross(o: Point, a: Point, b: Point) -> Number:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def orientation(p: Point, q: Point, r: Point) -> Turn:
    c = cross(p, q, r)
    if c > 0:
        return Turn.LEFT
    if c < 0:
        return Turn.RIGHT
    return Turn.COLLINEAR


def on_segment(q: Point, a: Point, b: Point) -> bool:
    """True if q lies on the closed segment ab."""
    if cross(a, b, q) != 0:
        return False
    return (min(a.x, b.x) <= q.x <= max(a.x, b.x)
            and min(a.y, b.y) <= q.y <= max(a.y, b.y))


def _check_segment(s: Segment) -> None:
    if s.a == s.b:
        raise InvalidInputError(f'degenerate segment at ({s.a})')


def proper_intersection(s1: Segment, s2: Segment) -> bool:
    """True iff the segments cross at a single point interior to both."""
    _check_segment(s1)
    _check_segment(s2)
    d1 = orientation(s1.a, s1.b, s2.a)
    d2 = orientation(s1.a, s1.b, s2.b)
    d3 = orientation(s2.a, s2.b, s1.a)
    d4 = orientation(s2.a, s2.b, s1.b)
    if Turn.COLLINEAR in (d1, d2, d3, d4):
        return False
    return d1 != d2 and d3 != d4


def segments_touch(s1: Segment, s2: Segment) -> bool:
    """True if the closed segments share at least one point."""
    if proper_intersection(s1, s2):
        return True
    return (on_segment(s1.a, s2.a, s2.b) or on_segment(s1.b, s2.a, s2.b)
            or on_segment(s2.a, s1.a, s1.b) or on_segment(s2.b, s1.a, s1.b))


def segment_intersection(s1: Segment, s2: Segment) -> Point:
    """Crossing point of two segments known to intersect properly."""
    d = s1.b - s1.a
    e = s2.b - s2.a
    t = Fraction(vcross(s2.a - s1.a, e), vcross(d, e))
    return s1.a + d.scale(t)


def signed_area2(ring: Sequence[Point]) -> Number:
    """Twice the signed area; positive for counter-clockwise rings."""
    total = 0
    for k, p in enumerate(ring):
        q = ring[(k + 1) % len(ring)]
        total += p.x * q.y - q.x * p.y
    return total


def ring_location(ring: Sequence[Point], q: Point) -> Location:
    """Locate q against a closed ring by boundary test and winding number."""
    m = len(ring)
    for k in range(m):
        if on_segment(q, ring[k], ring[(k + 1) % m]):
            return Location.BOUNDARY
    winding = 0
    for k in range(m):
        a, b = ring[k], ring[(k + 1) % m]
        if a.y <= q.y:
            if b.y > q.y and cross(a, b, q) > 0:
                winding += 1
        elif b.y <= q.y and cross(a, b, q) < 0:
            winding -= 1
    return Location.INTERIOR if winding != 0 else Location.EXTERIOR


def in_open_sweep(start: Point, end: Point, d: Point) -> bool:
    """True if direction d lies strictly inside the CCW sweep start -> end."""
    c = vcross(start, end)
    if c > 0:
        return vcross(start, d) > 0 and vcross(d, end) > 0
    if c < 0:
        return vcross(start, d) > 0 or vcross(d, end) > 0
    return vcross(start, d) > 0


# ── Triangles ────────────────────────────────────────────────────────


def point_in_triangle(q: Point, a: Point, b: Point, c: Point,
                      strict: bool = True) -> bool:
    """Point-in-triangle test for a CCW or CW triangle."""
    d1, d2, d3 = cross(a, b, q), cross(b, c, q), cross(c, a, q)
    if strict:
        return (d1 > 0 and d2 > 0 and d3 > 0) or (d1 < 0 and d2 < 0 and d3 < 0)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def triangles_overlap(t1: Sequence[Point], t2: Sequence[Point]) -> bool:
    """True iff the interiors of two non-degenerate triangles intersect.

    Separating-axis test: the interiors are disjoint exactly when some
    edge line of either triangle has the whole other triangle on its
    closed outer side.
    """
    for tri, other in ((t1, t2), (t2, t1)):
        sign = 1 if signed_area2(tri) > 0 else -1
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            if all(sign * cross(a, b, q) <= 0 for q in other):
                return False
    return True


# ── Polygon with holes ───────────────────────────────────────────────


@dataclass(frozen=True)
class PolygonWithHoles:
    """Outer ring plus pairwise-disjoint holes, normalized and validated.

    Build instances with :meth:`from_rings`, which orients the rings and
    checks simplicity. The raw constructor trusts its arguments.
    """

    outer: tuple[Point, ...]
    holes: tuple[tuple[Point, ...], ...] = ()

    @classmethod
    def from_rings(cls, outer: Iterable, holes: Iterable[Iterable] = ()) -> 'PolygonWithHoles':
        outer_ring = tuple(_as_point(p) for p in outer)
        hole_rings = tuple(tuple(_as_point(p) for p in ring) for ring in holes)
        for ring in (outer_ring, *hole_rings):
            if len(ring) < 3:
                raise InvalidInputError(f'ring with {len(ring)} vertices, need at least 3')
            if signed_area2(ring) == 0:
                raise InvalidInputError('ring with zero area')
        if signed_area2(outer_ring) < 0:
            outer_ring = _reoriented(outer_ring)
        hole_rings = tuple(
            _reoriented(ring) if signed_area2(ring) > 0 else ring
            for ring in hole_rings
        )
        polygon = cls(outer_ring, hole_rings)
        polygon.validate()
        return polygon

    # ── indexing ──

    @functools.cached_property
    def vertices(self) -> tuple[Point, ...]:
        return self.outer + tuple(p for ring in self.holes for p in ring)

    @functools.cached_property
    def rings(self) -> tuple[tuple[int, ...], ...]:
        out = []
        start = 0
        for ring in (self.outer, *self.holes):
            out.append(tuple(range(start, start + len(ring))))
            start += len(ring)
        return tuple(out)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def h(self) -> int:
        return len(self.holes)

    @functools.cached_property
    def succ(self) -> tuple[int, ...]:
        nxt = [0] * self.n
        for ring in self.rings:
            for k, i in enumerate(ring):
                nxt[i] = ring[(k + 1) % len(ring)]
        return tuple(nxt)

    @functools.cached_property
    def pred(self) -> tuple[int, ...]:
        prv = [0] * self.n
        for i, j in enumerate(self.succ):
            prv[j] = i
        return tuple(prv)

    @functools.cached_property
    def sides(self) -> tuple[tuple[int, int], ...]:
        """Directed sides (i, succ(i)); the interior lies on their left."""
        return tuple((i, self.succ[i]) for i in range(self.n))

    @functools.cached_property
    def side_set(self) -> frozenset:
        return frozenset(frozenset(s) for s in self.sides)

    @functools.cached_property
    def _index(self) -> dict:
        return {p: i for i, p in enumerate(self.vertices)}

    def index_of(self, p: Point) -> int | None:
        return self._index.get(p)

    def is_side(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.side_set

    def bbox(self) -> tuple[Number, Number, Number, Number]:
        xs = [p.x for p in self.outer]
        ys = [p.y for p in self.outer]
        return min(xs), min(ys), max(xs), max(ys)

    def opens_inward(self, i: int, d: Point) -> bool:
        """True if direction d leaves vertex i into the polygon interior."""
        p = self.vertices[i]
        return in_open_sweep(self.vertices[self.succ[i]] - p,
                             self.vertices[self.pred[i]] - p, d)

    # ── validation ──

    def validate(self) -> None:
        """Raise :class:`InvalidInputError` unless the rings form a valid polygon."""
        for p in self.vertices:
            for c in (p.x, p.y):
                if not 0 <= c <= GRID_MAX:
                    raise InvalidInputError(f'coordinate {c} outside [0, {GRID_MAX}]')
        if len(self._index) != self.n:
            raise InvalidInputError('repeated vertex')
        sides = [Segment(self.vertices[i], self.vertices[j]) for i, j in self.sides]
        for i, (a, b) in enumerate(self.sides):
            nb = self.succ[b]
            pa, pb, pc = self.vertices[a], self.vertices[b], self.vertices[nb]
            if cross(pa, pb, pc) == 0 and vdot(pb - pa, pc - pb) < 0:
                raise InvalidInputError(f'ring folds back at vertex ({pb})')
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if j in (self.succ[i], self.pred[i]):
                    continue
                if segments_touch(sides[i], sides[j]):
                    raise InvalidInputError(
                        f'sides ({sides[i].a})-({sides[i].b}) and '
                        f'({sides[j].a})-({sides[j].b}) intersect')
        for k, ring in enumerate(self.holes):
            if any(ring_location(self.outer, p) is not Location.INTERIOR for p in ring):
                raise InvalidInputError(f'hole {k} is not strictly inside the outer ring')
            for m, other in enumerate(self.holes):
                if m != k and ring_location(other, ring[0]) is not Location.EXTERIOR:
                    raise InvalidInputError(f'hole {k} lies inside hole {m}')


def _as_point(p) -> Point:
    if isinstance(p, Point):
        return p
    x, y = p
    return Point(x, y)


def _reoriented(ring: tuple[Point, ...]) -> tuple[Point, ...]:
    """Reverse a ring but keep its first vertex first."""
    return (ring[0],) + tuple(reversed(ring[1:]))


# ── Point location and visibility ────────────────────────────────────


def locate_point(polygon: PolygonWithHoles, q: Point) -> Location:
    """Locate q against the outer ring, then against each hole."""
    outer = ring_location(polygon.outer, q)
    if outer is not Location.INTERIOR:
        return outer
    for ring in polygon.holes:
        loc = ring_location(ring, q)
        if loc is Location.BOUNDARY:
            return Location.BOUNDARY
        if loc is Location.INTERIOR:
            return Location.EXTERIOR
    return Location.INTERIOR


def _require_inside(polygon: PolygonWithHoles, q: Point) -> Location:
    loc = locate_point(polygon, q)
    if loc is Location.EXTERIOR:
        raise InvalidInputError(f'point ({q}) lies outside the polygon')
    return loc


def ray_extent(polygon: PolygonWithHoles, p: Point, d: Point) -> Fraction:
    """Largest t such that the closed segment p .. p + t*d stays in the polygon.

    p must lie in the polygon. The ray is cut at every vertex on it and
    at every proper side crossing; between breakpoints membership is
    constant, so testing one midpoint per gap is exact.
    """
    V = polygon.vertices
    dd = vdot(d, d)
    params = set()
    crossings = set()
    for i, j in polygon.sides:
        a, b = V[i], V[j]
        ca, cb = vcross(d, a - p), vcross(d, b - p)
        for q, c in ((a, ca), (b, cb)):
            if c == 0 and vdot(q - p, d) > 0:
                params.add(Fraction(vdot(q - p, d), dd))
        if (ca > 0 and cb < 0) or (ca < 0 and cb > 0):
            e = b - a
            t = Fraction(vcross(a - p, e), vcross(d, e))
            if t > 0:
                params.add(t)
                crossings.add(t)
    prev = Fraction(0)
    for t in sorted(params):
        mid = (prev + t) / 2
        if locate_point(polygon, p + d.scale(mid)) is Location.EXTERIOR:
            return prev
        if t in crossings:
            return t
        prev = t
    mid = prev + 1
    if locate_point(polygon, p + d.scale(mid)) is not Location.EXTERIOR:
        raise InvalidInputError('unbounded ray inside polygon')
    return prev


def mutually_visible(polygon: PolygonWithHoles, a: Point, b: Point) -> bool:
    """True iff the closed segment ab lies in the polygon (grazing allowed)."""
    _require_inside(polygon, a)
    _require_inside(polygon, b)
    if a == b:
        return True
    return ray_extent(polygon, a, b - a) >= 1


@dataclass(frozen=True)
class VisibilityRegion:
    """Closed region given by a boundary ring, star-shaped from ``apex``.

    The ring may contain zero-width spikes along rays that graze a
    reflex vertex; they add boundary points but no area.
    """

    boundary: tuple[Point, ...]
    apex: Point

    def contains(self, q: Point) -> bool:
        return ring_location(self.boundary, q) is not Location.EXTERIOR


class _AngleKey:
    """Sort key ordering vectors by angle CCW from a reference direction."""

    __slots__ = ('u', 'v', 'half', 'dist')

    def __init__(self, v: Point, reference: Point = Point(1, 0)):
        r = reference
        u = Point(vdot(r, v), vcross(r, v))
        self.u = u
        self.v = v
        if u.x == 0 and u.y == 0:
            self.half = -1
        else:
            self.half = 0 if (u.y > 0 or (u.y == 0 and u.x > 0)) else 1
        self.dist = vdot(v, v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, _AngleKey):
            return NotImplemented
        return (self.half == other.half and vcross(self.u, other.u) == 0
                and self.dist == other.dist)

    __hash__ = None

    def __lt__(self, other: '_AngleKey') -> bool:
        if self.half != other.half:
            return self.half < other.half
        c = vcross(self.u, other.u)
        if c != 0:
            return c > 0
        return self.dist < other.dist


def angle_key(v: Point, reference: Point = Point(1, 0)) -> _AngleKey:
    return _AngleKey(v, reference)


def same_direction(u: Point, v: Point) -> bool:
    return vcross(u, v) == 0 and vdot(u, v) > 0


def visibility_polygon(polygon: PolygonWithHoles, p: Point) -> VisibilityRegion:
    """Region of all points q with segment pq inside the polygon."""
    loc = _require_inside(polygon, p)
    V = polygon.vertices

    # Event directions: one per distinct direction towards a vertex.
    events: list[tuple[Point, list[tuple[Fraction, Point]]]] = []
    for q in sorted((q for q in V if q != p), key=lambda q: angle_key(q - p)):
        d = q - p
        if events and same_direction(events[-1][0], d):
            base = events[-1][0]
            events[-1][1].append((Fraction(vdot(d, base), vdot(base, base)), q))
        else:
            events.append((d, [(Fraction(1), q)]))
    m = len(events)

    p_index = polygon.index_of(p)
    boundary_side = None
    if loc is Location.BOUNDARY and p_index is None:
        boundary_side = next((V[i], V[j]) for i, j in polygon.sides
                             if on_segment(p, V[i], V[j]))

    def inward(r: Point) -> bool:
        if loc is Location.INTERIOR:
            return True
        if p_index is not None:
            return polygon.opens_inward(p_index, r)
        a, b = boundary_side
        return vcross(b - a, r) > 0

    candidate_sides = [(V[i], V[j]) for i, j in polygon.sides
                       if not on_segment(p, V[i], V[j])]

    def nearest_side(r: Point):
        best, best_t = None, None
        for a, b in candidate_sides:
            ca, cb = vcross(r, a - p), vcross(r, b - p)
            if not ((ca > 0 and cb < 0) or (ca < 0 and cb > 0)):
                continue
            e = b - a
            t = Fraction(vcross(a - p, e), vcross(r, e))
            if t > 0 and (best_t is None or t < best_t):
                best, best_t = (a, b), t
        return best

    nearest = []
    for k in range(m):
        u = events[k][0]
        w = events[(k + 1) % m][0]
        if m == 1:
            r = -u
        else:
            c = vcross(u, w)
            if c > 0:
                r = u + w
            elif c < 0:
                r = -(u + w)
            else:
                r = Point(-u.y, u.x)
        nearest.append(nearest_side(r) if inward(r) else None)

    def hit(side, d: Point) -> Fraction:
        if side is None:
            return Fraction(0)
        a, b = side
        e = b - a
        return Fraction(vcross(a - p, e), vcross(d, e))

    ring: list[Point] = []
    for k, (d, on_ray) in enumerate(events):
        before = hit(nearest[k - 1], d)
        after = hit(nearest[k], d)
        far = ray_extent(polygon, p, d)
        stops = [before]
        if far > max(before, after):
            stops.append(far)
        stops.append(after)
        for s, t in zip(stops, stops[1:]):
            ring.append(p + d.scale(s))
            lo, hi = min(s, t), max(s, t)
            inner = [(param, q) for param, q in on_ray if lo < param < hi]
            inner.sort(key=lambda item: item[0], reverse=t < s)
            ring.extend(q for _, q in inner)
        ring.append(p + d.scale(stops[-1]))

    out: list[Point] = []
    for q in ring:
        if not out or out[-1] != q:
            out.append(q)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return VisibilityRegion(tuple(out), p)


def vertex_limited_vp(polygon: PolygonWithHoles, p: Point) -> tuple[int, ...]:
    """Indices of polygon vertices visible from p, in boundary order of VP(p)."""
    seen: dict[int, None] = {}
    for q in visibility_polygon(polygon, p).boundary:
        i = polygon.index_of(q)
        if i is not None and i not in seen:
            seen[i] = None
    return tuple(seen)


def crop(region: VisibilityRegion, s: Segment, p: Point) -> VisibilityRegion:
    """Part of ``region`` on the closed side of line(s) not containing p."""
    _check_segment(s)
    side = orientation(s.a, s.b, p)
    if side is Turn.COLLINEAR:
        raise InvalidInputError(f'point ({p}) lies on the line of the cropping segment')

    def f(q: Point) -> Number:
        return cross(s.a, s.b, q) * int(side)

    ring = region.boundary
    out: list[Point] = []
    for k, cur in enumerate(ring):
        nxt = ring[(k + 1) % len(ring)]
        fc, fn = f(cur), f(nxt)
        if fc <= 0:
            out.append(cur)
        if (fc < 0 < fn) or (fn < 0 < fc):
            out.append(cur + (nxt - cur).scale(Fraction(fc, fc - fn)))
    deduped: list[Point] = []
    for q in out:
        if not deduped or deduped[-1] != q:
            deduped.append(q)
    while len(deduped) > 1 and deduped[0] == deduped[-1]:
        deduped.pop()
    return VisibilityRegion(tuple(deduped), region.apex)
