"""
Exploration under the proximity model.

Agents here see only directions and order, not distances: a look
returns the visible vertices and agents sorted by angle around the
observer. Each newly built triangle is checked by walking its two new
edges and counting the visibility change points met on the way; an
edge is rejected when the walk hits a crossing with an edge already
built. Guards are kept current with the incremental triplet updates
from :mod:`coopguards.guards`.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from coopguards.errors import CoverError, InvalidInputError, ModelViolation
from coopguards.geometry import (
    Point,
    PolygonWithHoles,
    Segment,
    angle_key,
    crop,
    cross,
    mutually_visible,
    on_segment,
    proper_intersection,
    triangles_overlap,
    vcross,
    vdot,
    vertex_limited_vp,
    visibility_polygon,
)
from coopguards.guards import (
    GuardSet,
    TripletCover,
    add_leaf,
    compute_cover,
    place_guards,
)
from coopguards.sim import Prox, Round, SimTrace
from coopguards.triangulation import (
    RootedTree,
    Triangle,
    Triangulation,
    expected_triangle_count,
    fits,
)
from coopguards.utils import polygon_digest

logger = logging.getLogger(__name__)

STEP_ROUNDS = 1
PATROL_ROUNDS = 5


@dataclass(frozen=True)
class View:
    observer: Point
    vertex_seq: tuple[int, ...]
    agent_seq: tuple[int, ...] = ()


@dataclass
class RoundCost:
    validation_steps: int = 0
    validations: int = 0
    wait_rounds: int = 0

    @property
    def total_rounds(self) -> int:
        return self.validation_steps * STEP_ROUNDS + self.wait_rounds


@dataclass(frozen=True)
class ProxEvent:
    round: int
    kind: str
    words: tuple


@dataclass
class ProximityResult:
    triangulation: Triangulation
    guards: GuardSet
    cost: RoundCost
    tree: RootedTree
    cover: TripletCover
    events: list[ProxEvent] = field(default_factory=list)

    def trace(self) -> SimTrace:
        """The exploration log as a trace with one ``PROX`` event per step."""
        polygon = self.triangulation.polygon
        trace = SimTrace(mode='proximity', polygon_digest=polygon_digest(polygon),
                         seed=0, agent_ids=())
        for ev in self.events:
            if not trace.rounds or trace.rounds[-1].index != ev.round:
                trace.rounds.append(Round(ev.round))
            trace.rounds[-1].events.append(Prox(ev.kind, ev.words))
        return trace


# ── Looks ────────────────────────────────────────────────────────────


def look_view(polygon: PolygonWithHoles, observer: Point,
              agents: Mapping[int, Point] | None = None,
              orientation: Point = Point(1, 0)) -> View:
    """Visible vertices and agents ordered by angle from ``orientation``, nearer first on ties."""
    V = polygon.vertices
    vertices = sorted(vertex_limited_vp(polygon, observer),
                      key=lambda i: (angle_key(V[i] - observer, orientation), i))
    seen = []
    for aid, pos in sorted((agents or {}).items()):
        if mutually_visible(polygon, observer, pos):
            seen.append((angle_key(pos - observer, orientation), aid))
    seen.sort()
    return View(observer, tuple(vertices), tuple(aid for _, aid in seen))


# ── Validation ───────────────────────────────────────────────────────


@functools.lru_cache(maxsize=16)
def visible_chords(polygon: PolygonWithHoles) -> tuple[tuple[int, int], ...]:
    """All vertex pairs whose connecting segment lies in the polygon."""
    V = polygon.vertices
    out = []
    for i in range(polygon.n):
        for j in range(i + 1, polygon.n):
            if mutually_visible(polygon, V[i], V[j]):
                out.append((i, j))
    return tuple(out)


def _crossing_param(a: Point, b: Point, c: Point, d: Point) -> Fraction:
    e = d - c
    return Fraction(vcross(c - a, e), vcross(b - a, e))


def validate_diagonal(polygon: PolygonWithHoles, built: Triangulation,
                      u: int, v: int) -> tuple[bool, int]:
    """Walk u -> v over visibility change points; report validity and steps taken.

    The segment is valid when it properly crosses no side of a built
    triangle. Steps count the change points visited before the walk
    stops, either at the first crossing or at v.
    """
    V = polygon.vertices
    a, b = V[u], V[v]
    if not mutually_visible(polygon, a, b):
        raise InvalidInputError(f'vertex {u} cannot see vertex {v}')
    seg = Segment(a, b)
    d = b - a
    dd = vdot(d, d)

    change: set[Fraction] = set()
    for i, j in visible_chords(polygon):
        if {i, j} & {u, v}:
            continue
        if proper_intersection(seg, Segment(V[i], V[j])):
            change.add(_crossing_param(a, b, V[i], V[j]))
    for k, q in enumerate(V):
        if k not in (u, v) and on_segment(q, a, b):
            change.add(Fraction(vdot(q - a, d), dd))

    blocked: set[Fraction] = set()
    for tri in built.triangles:
        for i, j in tri.sides:
            if {i, j} & {u, v}:
                continue
            if proper_intersection(seg, Segment(V[i], V[j])):
                blocked.add(_crossing_param(a, b, V[i], V[j]))

    steps = 0
    valid = True
    for t in sorted(change):
        steps += 1
        if t in blocked:
            valid = False
            break
    if valid == bool(blocked):
        raise ModelViolation(f'walk along ({a})-({b}) disagrees with direct crossing test')
    return valid, steps


# ── Exploration ──────────────────────────────────────────────────────


def _candidates(polygon: PolygonWithHoles, u: int, v: int, w: int) -> list[int]:
    """Vertices beyond side uv (away from w), in boundary order of the cropped view."""
    V = polygon.vertices
    region = crop(visibility_polygon(polygon, V[u]), Segment(V[u], V[v]), V[w])
    out: list[int] = []
    for p in region.boundary:
        q = polygon.index_of(p)
        if q is None or q in (u, v) or q in out or cross(V[u], V[v], p) == 0:
            continue
        out.append(q)
    return out


class _Explorer:
    def __init__(self, polygon: PolygonWithHoles):
        self.P = polygon
        self.triangles: list[Triangle] = []
        self.by_side: dict[frozenset, list[int]] = {}
        self.cost = RoundCost()
        self.events: list[ProxEvent] = []
        self.tree: RootedTree | None = None
        self.cover: TripletCover | None = None

    def partial(self) -> Triangulation:
        return Triangulation(self.P, tuple(self.triangles), ())

    def _add(self, tri: Triangle) -> int:
        node = len(self.triangles)
        self.triangles.append(tri)
        for key in tri.side_keys():
            self.by_side.setdefault(key, []).append(node)
        return node

    def _validate(self, u: int, q: int) -> bool:
        valid, steps = validate_diagonal(self.P, self.partial(), u, q)
        self.cost.validations += 1
        self.cost.validation_steps += steps
        self.cost.wait_rounds += PATROL_ROUNDS
        self.events.append(ProxEvent(self.cost.total_rounds, 'VALIDATE', (u, q, steps, int(valid))))
        return valid

    def run(self) -> ProximityResult:
        P = self.P
        V = P.vertices
        u, v = 0, P.succ[0]
        apex = next(q for q in look_view(P, V[u]).vertex_seq
                    if q not in (u, v) and cross(V[u], V[v], V[q]) > 0 and fits(P, u, v, q))
        root = self._add(Triangle.from_vertices(P, u, v, apex))
        self.tree = RootedTree.single(root)
        self.cover = compute_cover(self.tree, self.partial())
        self.events.append(ProxEvent(0, 'TRIANGLE', (root, -1, *self.triangles[root].vertices)))

        explored: dict[int, set[int]] = {root: set()}
        stack = [root]
        while stack:
            node = stack[-1]
            tri = self.triangles[node]
            side = next((k for k, (i, j) in enumerate(tri.sides)
                         if k not in explored[node] and not P.is_side(i, j)
                         and len(self.by_side[frozenset((i, j))]) < 2), None)
            if side is None:
                stack.pop()
                continue
            explored[node].add(side)
            child = self._extend(node, *tri.sides[side])
            if child is not None:
                explored[child] = set()
                stack.append(child)

        expected = expected_triangle_count(P)
        if len(self.triangles) != expected:
            raise CoverError(f'exploration built {len(self.triangles)} triangles, expected {expected}')
        diagonals = sorted({tuple(sorted(s)) for t in self.triangles for s in t.sides
                            if not P.is_side(*s)})
        triangulation = Triangulation(P, tuple(self.triangles), tuple(diagonals))
        guards = place_guards(self.cover, triangulation)
        logger.info('Proximity exploration: %d triangles, %d validations, %d rounds, %d guards',
                    len(self.triangles), self.cost.validations, self.cost.total_rounds, len(guards))
        return ProximityResult(triangulation, guards, self.cost, self.tree, self.cover, self.events)

    def _extend(self, node: int, u: int, v: int) -> int | None:
        """Try to build the triangle beyond side uv of ``node``; first valid apex wins."""
        P = self.P
        tri = self.triangles[node]
        w = tri.opposite(u, v)
        V = P.vertices
        for q in _candidates(P, u, v, w):
            if not (mutually_visible(P, V[u], V[q]) and mutually_visible(P, V[v], V[q])):
                continue
            if not self._validate(u, q) or not self._validate(v, q):
                continue
            if not fits(P, u, v, q):
                continue
            new = Triangle.from_vertices(P, u, v, q)
            pts = new.points(P)
            if any(triangles_overlap(pts, t.points(P)) for t in self.triangles):
                continue
            child = self._add(new)
            add_leaf(self.tree, self.cover, node, child, new)
            self.events.append(ProxEvent(self.cost.total_rounds, 'TRIANGLE',
                                         (child, node, *new.vertices)))
            return child
        return None


def proximity_explore(polygon: PolygonWithHoles) -> ProximityResult:
    """Build a triangulation by proximity-model exploration and place guards on it."""
    return _Explorer(polygon).run()
