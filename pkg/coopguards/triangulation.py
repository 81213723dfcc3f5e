"""
Triangulation of a polygon with holes, its dual graph, and rooted
spanning trees of the dual.

The triangulation is built greedily: every vertex pair is tried in
lexicographic order and kept if it is a diagonal that crosses no
diagonal kept before. One pass yields a maximal non-crossing set, and
the faces are then recovered by walking half-edges.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import networkx as nx

from coopguards.errors import CoverError, InvalidInputError
from coopguards.geometry import (
    Point,
    PolygonWithHoles,
    Segment,
    angle_key,
    cross,
    on_segment,
    point_in_triangle,
    proper_intersection,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Triangle:
    """Three vertex indices in counter-clockwise order, lowest index first."""

    a: int
    b: int
    c: int

    @classmethod
    def from_vertices(cls, polygon: PolygonWithHoles, i: int, j: int, k: int) -> 'Triangle':
        V = polygon.vertices
        if cross(V[i], V[j], V[k]) < 0:
            j, k = k, j
        rot = [(i, j, k), (j, k, i), (k, i, j)]
        return cls(*min(rot))

    @property
    def vertices(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def sides(self) -> tuple[tuple[int, int], ...]:
        """Directed CCW sides: 0 = (a, b), 1 = (b, c), 2 = (c, a)."""
        return ((self.a, self.b), (self.b, self.c), (self.c, self.a))

    def side_keys(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(s) for s in self.sides)

    def points(self, polygon: PolygonWithHoles) -> tuple[Point, Point, Point]:
        V = polygon.vertices
        return (V[self.a], V[self.b], V[self.c])

    def opposite(self, i: int, j: int) -> int:
        (k,) = set(self.vertices) - {i, j}
        return k


@dataclass(frozen=True)
class Triangulation:
    polygon: PolygonWithHoles
    triangles: tuple[Triangle, ...]
    diagonals: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.triangles)


# ── Diagonals ────────────────────────────────────────────────────────


def is_diagonal(polygon: PolygonWithHoles, i: int, j: int) -> bool:
    """True if vertices i and j span a diagonal.

    The open segment must run through the interior, touch no other
    vertex, and cross no side.
    """
    if i == j or polygon.is_side(i, j):
        return False
    V = polygon.vertices
    a, b = V[i], V[j]
    if not polygon.opens_inward(i, b - a) or not polygon.opens_inward(j, a - b):
        return False
    for k, q in enumerate(V):
        if k != i and k != j and on_segment(q, a, b):
            return False
    seg = Segment(a, b)
    for x, y in polygon.sides:
        if proper_intersection(seg, Segment(V[x], V[y])):
            return False
    return True


def is_edge(polygon: PolygonWithHoles, i: int, j: int) -> bool:
    return polygon.is_side(i, j) or is_diagonal(polygon, i, j)


def fits(polygon: PolygonWithHoles, i: int, j: int, k: int) -> bool:
    """True if triangle (i, j, k) is a non-degenerate, empty triangle of the polygon."""
    V = polygon.vertices
    if len({i, j, k}) < 3 or cross(V[i], V[j], V[k]) == 0:
        return False
    if not (is_edge(polygon, i, j) and is_edge(polygon, j, k) and is_edge(polygon, k, i)):
        return False
    return not any(
        point_in_triangle(q, V[i], V[j], V[k])
        for m, q in enumerate(V) if m not in (i, j, k)
    )


def expected_triangle_count(polygon: PolygonWithHoles) -> int:
    return polygon.n + 2 * polygon.h - 2


# ── Triangulate ──────────────────────────────────────────────────────


def triangulate(polygon: PolygonWithHoles) -> Triangulation:
    """Deterministic triangulation of ``polygon``.

    Raises:
        InvalidInputError: if the faces cannot all be non-degenerate triangles.
    """
    V = polygon.vertices
    n = polygon.n
    accepted: list[tuple[int, int]] = []
    accepted_segments: list[Segment] = []
    for i in range(n):
        for j in range(i + 1, n):
            if not is_diagonal(polygon, i, j):
                continue
            seg = Segment(V[i], V[j])
            if any(proper_intersection(seg, other) for other in accepted_segments):
                continue
            accepted.append((i, j))
            accepted_segments.append(seg)

    faces = _faces(polygon, accepted)
    triangles = []
    for face in faces:
        if len(face) != 3:
            raise InvalidInputError(f'face with {len(face)} vertices after triangulation')
        i, j, k = face
        if cross(V[i], V[j], V[k]) <= 0:
            raise InvalidInputError('zero-area face after triangulation')
        triangles.append(Triangle.from_vertices(polygon, i, j, k))
    triangles.sort()

    expected = expected_triangle_count(polygon)
    if len(triangles) != expected:
        raise InvalidInputError(
            f'triangulation produced {len(triangles)} triangles, expected {expected}')
    logger.debug('Triangulated n=%d h=%d into %d triangles (%d diagonals)',
                 n, polygon.h, len(triangles), len(accepted))
    return Triangulation(polygon, tuple(triangles), tuple(accepted))


def _faces(polygon: PolygonWithHoles, diagonals: list[tuple[int, int]]) -> list[list[int]]:
    """Walk the interior faces of sides plus diagonals."""
    V = polygon.vertices
    neighbours: dict[int, set[int]] = {i: set() for i in range(polygon.n)}
    for i, j in polygon.sides:
        neighbours[i].add(j)
        neighbours[j].add(i)
    for i, j in diagonals:
        neighbours[i].add(j)
        neighbours[j].add(i)
    order = {
        v: sorted(nbrs, key=lambda w, v=v: angle_key(V[w] - V[v]))
        for v, nbrs in neighbours.items()
    }
    position = {v: {w: k for k, w in enumerate(lst)} for v, lst in order.items()}

    starts = list(polygon.sides)
    for i, j in diagonals:
        starts.extend([(i, j), (j, i)])

    visited: set[tuple[int, int]] = set()
    faces = []
    for start in starts:
        if start in visited:
            continue
        face = []
        a, b = start
        while (a, b) not in visited:
            visited.add((a, b))
            face.append(a)
            lst = order[b]
            c = lst[position[b][a] - 1]
            a, b = b, c
        faces.append(face)
    return faces


# ── Dual graph ───────────────────────────────────────────────────────


@dataclass
class DualGraph:
    """Nodes are triangle indices; edges join triangles sharing a diagonal."""

    graph: nx.Graph

    def degree(self, node: int) -> int:
        return self.graph.degree[node]

    def neighbours(self, node: int) -> list[int]:
        return sorted(self.graph.neighbors(node))

    def number_of_nodes(self) -> int:
        return self.graph.number_of_nodes()

    def number_of_edges(self) -> int:
        return self.graph.number_of_edges()

    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree), default=0)


def build_dual(triangulation: Triangulation) -> DualGraph:
    by_side: dict[frozenset, list[int]] = {}
    for node, tri in enumerate(triangulation.triangles):
        for key in tri.side_keys():
            by_side.setdefault(key, []).append(node)
    pairs = sorted(tuple(sorted(owners)) for owners in by_side.values() if len(owners) == 2)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(triangulation.triangles)))
    graph.add_edges_from(pairs)
    if any(d > 3 for _, d in graph.degree):
        raise CoverError('dual graph node with degree above 3')
    return DualGraph(graph)


def choose_root(dual: DualGraph) -> int:
    """Lowest-index node of degree at most 2."""
    for node in sorted(dual.graph.nodes):
        if dual.degree(node) <= 2:
            return node
    raise CoverError('dual graph has no node of degree <= 2')


# ── Rooted trees ─────────────────────────────────────────────────────


@dataclass
class RootedTree:
    """Rooted tree with at most two children per node.

    ``parent[root] == root``. Instances are mutable: :meth:`attach` and
    :meth:`detach` edit them in place.
    """

    root: int
    parent: dict[int, int] = field(default_factory=dict)
    children: dict[int, list[int]] = field(default_factory=dict)
    depth: dict[int, int] = field(default_factory=dict)

    @classmethod
    def single(cls, root: int) -> 'RootedTree':
        return cls(root, {root: root}, {root: []}, {root: 0})

    def __len__(self) -> int:
        return len(self.parent)

    def __contains__(self, node: int) -> bool:
        return node in self.parent

    @property
    def nodes(self) -> list[int]:
        return sorted(self.parent)

    def is_leaf(self, node: int) -> bool:
        return not self.children[node]

    def attach(self, v: int, leaf: int) -> None:
        if leaf in self.parent:
            raise InvalidInputError(f'node {leaf} already in tree')
        if len(self.children[v]) >= 2:
            raise InvalidInputError(f'node {v} already has two children')
        self.parent[leaf] = v
        self.children[v].append(leaf)
        self.children[leaf] = []
        self.depth[leaf] = self.depth[v] + 1

    def detach(self, v: int, leaf: int) -> None:
        if leaf not in self.children.get(v, []):
            raise InvalidInputError(f'node {leaf} is not a child of {v}')
        if self.children[leaf]:
            raise InvalidInputError(f'node {leaf} is not a leaf')
        self.children[v].remove(leaf)
        del self.parent[leaf], self.children[leaf], self.depth[leaf]

    def postorder(self) -> list[int]:
        out: list[int] = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                out.append(node)
                continue
            stack.append((node, True))
            for child in reversed(self.children[node]):
                stack.append((child, False))
        return out

    def edges(self) -> list[tuple[int, int]]:
        return [(self.parent[v], v) for v in self.nodes if v != self.root]


def spanning_tree(dual: DualGraph, root: int) -> RootedTree:
    """DFS spanning tree of the dual, visiting neighbours in index order."""
    tree = RootedTree.single(root)
    for u, v in nx.dfs_edges(dual.graph, source=root):
        tree.attach(u, v)
    if len(tree) != dual.number_of_nodes():
        raise CoverError('dual graph is not connected')
    return tree
