"""
Triplet covers and cooperative guard placement.

A triplet is a set of at most three tree nodes whose triangles share a
vertex and are connected in the dual. Every node of the spanning tree
belongs to some triplet; one guard per triplet, placed at the shared
vertex, yields a cooperative guard set.

The cover is computed bottom-up by :func:`find_triplet` and kept up to
date under leaf insertion and removal by :func:`add_leaf` and
:func:`remove_leaf`, which only revisit the path from the changed leaf
to the root.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from coopguards.errors import CoverError, InvalidInputError
from coopguards.geometry import Point, PolygonWithHoles
from coopguards.triangulation import (
    DualGraph,
    RootedTree,
    Triangle,
    Triangulation,
    build_dual,
    choose_root,
    spanning_tree,
    triangulate,
)
from coopguards.utils import guard_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Triplet:
    nodes: frozenset
    guard_vertex: int | None = None


@dataclass
class TripletCover:
    """``t[v]`` is the triplet computed at node v, or None."""

    t: dict[int, Triplet | None] = field(default_factory=dict)
    triangles: dict[int, Triangle] = field(default_factory=dict)

    def triplets(self) -> list[tuple[int, Triplet]]:
        return [(v, trip) for v, trip in sorted(self.t.items()) if trip is not None]

    @property
    def count(self) -> int:
        return len(self.triplets())

    def covered(self) -> set[int]:
        out: set[int] = set()
        for _, trip in self.triplets():
            out |= trip.nodes
        return out

    def as_sets(self) -> dict[int, frozenset | None]:
        return {v: (trip.nodes if trip else None) for v, trip in self.t.items()}


@dataclass(frozen=True)
class GuardSet:
    points: tuple[Point, ...]
    vertices: tuple[int | None, ...] = ()

    @classmethod
    def from_vertices(cls, polygon: PolygonWithHoles, indices) -> 'GuardSet':
        idx = tuple(sorted(set(indices)))
        return cls(tuple(polygon.vertices[i] for i in idx), idx)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


class UpdateResult(NamedTuple):
    tree: RootedTree
    cover: TripletCover
    find_triplet_calls: int


@dataclass
class GuardSolution:
    """Everything the centralized solver computes along the way."""

    polygon: PolygonWithHoles
    triangulation: Triangulation
    dual: DualGraph
    tree: RootedTree
    cover: TripletCover
    guards: GuardSet

    @property
    def bound(self) -> int:
        return guard_bound(self.polygon.n, self.polygon.h)


# ── Triplets ─────────────────────────────────────────────────────────


def _common_vertex(nodes: frozenset, triangles: dict[int, Triangle]) -> int | None:
    if not all(v in triangles for v in nodes):
        return None
    shared = set.intersection(*(set(triangles[v].vertices) for v in nodes))
    if not shared:
        raise CoverError(f'triplet {sorted(nodes)} has no common vertex')
    return min(shared)


def find_triplet(tree: RootedTree, cover: TripletCover, v: int) -> Triplet | None:
    """Triplet rooted at v given the triplets already computed for its children."""
    uncovered = [c for c in tree.children[v]
                 if cover.t.get(c) is None or v not in cover.t[c].nodes]
    if len(uncovered) == 1:
        nodes = frozenset({uncovered[0], v, tree.parent[v]})
    elif len(uncovered) == 2:
        nodes = frozenset({uncovered[0], uncovered[1], v})
    else:
        return None
    return Triplet(nodes, _common_vertex(nodes, cover.triangles))


def _settle_single_node(tree: RootedTree, cover: TripletCover) -> None:
    if len(tree) == 1:
        nodes = frozenset({tree.root})
        cover.t[tree.root] = Triplet(nodes, _common_vertex(nodes, cover.triangles))


def compute_cover(tree: RootedTree, triangulation: Triangulation | None = None) -> TripletCover:
    """Triplet cover of ``tree`` in one post-order pass."""
    cover = TripletCover()
    if triangulation is not None:
        cover.triangles = {v: triangulation.triangles[v] for v in tree.nodes}
    for v in tree.postorder():
        cover.t[v] = find_triplet(tree, cover, v)
    _settle_single_node(tree, cover)
    return cover


def _refresh_to_root(tree: RootedTree, cover: TripletCover, start: int) -> int:
    calls = 0
    u = start
    while True:
        cover.t[u] = find_triplet(tree, cover, u)
        calls += 1
        if u == tree.root:
            break
        u = tree.parent[u]
    _settle_single_node(tree, cover)
    return calls


def add_leaf(tree: RootedTree, cover: TripletCover, v: int, leaf: int,
             triangle: Triangle | None = None) -> UpdateResult:
    """Attach ``leaf`` under ``v`` and repair the cover in place.

    Only the path v .. root is recomputed, so the number of
    :func:`find_triplet` calls is depth(v) + 1.
    """
    if len(tree.children[v]) >= 2:
        raise InvalidInputError(f'node {v} already has two children')
    tree.attach(v, leaf)
    cover.t[leaf] = None
    if triangle is not None:
        cover.triangles[leaf] = triangle
    calls = _refresh_to_root(tree, cover, v)
    return UpdateResult(tree, cover, calls)


def remove_leaf(tree: RootedTree, cover: TripletCover, v: int, leaf: int) -> UpdateResult:
    """Detach ``leaf`` from ``v`` and repair the cover in place."""
    tree.detach(v, leaf)
    cover.t.pop(leaf, None)
    cover.triangles.pop(leaf, None)
    calls = _refresh_to_root(tree, cover, v)
    return UpdateResult(tree, cover, calls)


# ── Guards ───────────────────────────────────────────────────────────


def place_guards(cover: TripletCover, triangulation: Triangulation) -> GuardSet:
    indices = []
    for v, trip in cover.triplets():
        if trip.guard_vertex is None:
            raise CoverError(f'triplet at node {v} has no guard vertex')
        indices.append(trip.guard_vertex)
    return GuardSet.from_vertices(triangulation.polygon, indices)


def solve(polygon: PolygonWithHoles) -> GuardSolution:
    """Triangulate, build the dual tree, compute the cover and place guards."""
    tri = triangulate(polygon)
    dual = build_dual(tri)
    tree = spanning_tree(dual, choose_root(dual))
    cover = compute_cover(tree, tri)
    guards = place_guards(cover, tri)
    bound = guard_bound(polygon.n, polygon.h)
    if len(guards) > bound:
        raise CoverError(f'{len(guards)} guards exceed the bound {bound}')
    logger.info('Placed %d guards for n=%d h=%d (bound %d, %d triplets)',
                len(guards), polygon.n, polygon.h, bound, cover.count)
    return GuardSolution(polygon, tri, dual, tree, cover, guards)


def cooperative_guards(polygon: PolygonWithHoles) -> GuardSet:
    return solve(polygon).guards
