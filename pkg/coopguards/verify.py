"""
Independent checks for guard sets: coverage, connectivity, bound and
triangle certificates.

Coverage is estimated by sampling points with exact rational
coordinates and testing each against every guard with
:func:`~coopguards.geometry.mutually_visible`. Sampling is seeded, so
the same call always reports the same fraction and witnesses.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from coopguards.geometry import Location, Point, PolygonWithHoles, locate_point, mutually_visible
from coopguards.guards import GuardSet, TripletCover
from coopguards.triangulation import DualGraph, Triangulation
from coopguards.utils import guard_bound

logger = logging.getLogger(__name__)

# Prime denominator keeps samples off the grid lines that carry
# measure-zero visibility artefacts.
SAMPLE_DENOMINATOR = 1009
SAMPLE_BATCH = 256


@dataclass
class CoverageResult:
    fraction: Fraction
    samples: int
    witnesses: list[Point] = field(default_factory=list)


@dataclass
class ConnectivityResult:
    connected: bool
    components: list[tuple[int, ...]] = field(default_factory=list)
    hop_diameter: int | None = None


@dataclass
class VerificationReport:
    coverage: CoverageResult
    connectivity: ConnectivityResult
    guard_count: int
    bound: int
    certificate: bool | None = None

    @property
    def bound_ok(self) -> bool:
        return self.guard_count <= self.bound

    @property
    def ok(self) -> bool:
        return (not self.coverage.witnesses and self.connectivity.connected
                and self.bound_ok and self.certificate is not False)


# ── Sampling ─────────────────────────────────────────────────────────


def sample_points(polygon: PolygonWithHoles, count: int, seed: int = 0) -> list[Point]:
    """``count`` points of the polygon drawn uniformly from its bounding box."""
    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = polygon.bbox()
    D = SAMPLE_DENOMINATOR
    lo = np.array([xmin * D, ymin * D], dtype=np.int64)
    hi = np.array([xmax * D, ymax * D], dtype=np.int64)
    out: list[Point] = []
    while len(out) < count:
        batch = rng.integers(lo, hi, size=(SAMPLE_BATCH, 2), endpoint=True)
        for x, y in batch:
            q = Point(Fraction(int(x), D), Fraction(int(y), D))
            if locate_point(polygon, q) is not Location.EXTERIOR:
                out.append(q)
                if len(out) == count:
                    break
    return out


def verify_point_coverage(polygon: PolygonWithHoles, guards: GuardSet,
                          sample_count: int = 2000, seed: int = 0) -> CoverageResult:
    samples = sample_points(polygon, sample_count, seed)
    guard_points = list(guards)
    witnesses = []
    for q in samples:
        if not any(mutually_visible(polygon, g, q) for g in guard_points):
            witnesses.append(q)
    fraction = Fraction(len(samples) - len(witnesses), len(samples)) if samples else Fraction(1)
    logger.debug('Coverage %.4f over %d samples (%d witnesses)',
                 fraction, len(samples), len(witnesses))
    return CoverageResult(fraction, len(samples), witnesses)


# ── Connectivity ─────────────────────────────────────────────────────


def guard_visibility_graph(polygon: PolygonWithHoles, guards: GuardSet) -> nx.Graph:
    """Nodes are guard positions (by index into ``guards``); edges join mutually visible pairs."""
    points = list(guards)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(points)))
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if mutually_visible(polygon, points[i], points[j]):
                graph.add_edge(i, j)
    return graph


def verify_connectivity(polygon: PolygonWithHoles, guards: GuardSet) -> ConnectivityResult:
    graph = guard_visibility_graph(polygon, guards)
    if graph.number_of_nodes() == 0:
        return ConnectivityResult(True, [], 0)
    components = sorted(tuple(sorted(c)) for c in nx.connected_components(graph))
    connected = len(components) == 1
    return ConnectivityResult(connected, components,
                              nx.diameter(graph) if connected else None)


def hop_diameter(polygon: PolygonWithHoles, guards: GuardSet) -> int | None:
    """Largest hop distance between guards in the visibility graph, None if disconnected."""
    return verify_connectivity(polygon, guards).hop_diameter


# ── Certificates ─────────────────────────────────────────────────────


def verify_cover_certificate(triangulation: Triangulation, dual: DualGraph,
                             cover: TripletCover) -> bool:
    """Exact check that a triplet cover certifies a cooperative guard set.

    Every triangle must belong to some triplet; every triplet must hold
    at most three triangles, be connected in the dual and have its guard
    at a vertex of each of its triangles.
    """
    if cover.covered() != set(range(len(triangulation))):
        return False
    for _, trip in cover.triplets():
        if len(trip.nodes) > 3 or trip.guard_vertex is None:
            return False
        if any(trip.guard_vertex not in triangulation.triangles[v].vertices
               for v in trip.nodes):
            return False
        if not nx.is_connected(dual.graph.subgraph(trip.nodes)):
            return False
    return True


def triangle_certificate(triangulation: Triangulation, guards: GuardSet) -> bool:
    """True if every triangle has a guard at one of its vertices."""
    placed = {i for i in guards.vertices if i is not None}
    return all(placed & set(tri.vertices) for tri in triangulation.triangles)


def verify_guards(polygon: PolygonWithHoles, guards: GuardSet,
                  sample_count: int = 2000, seed: int = 0,
                  triangulation: Triangulation | None = None) -> VerificationReport:
    """Run every check that applies to ``guards`` and bundle the results."""
    coverage = verify_point_coverage(polygon, guards, sample_count, seed)
    connectivity = verify_connectivity(polygon, guards)
    certificate = None
    if triangulation is not None:
        certificate = triangle_certificate(triangulation, guards)
    report = VerificationReport(coverage, connectivity, len(guards),
                                guard_bound(polygon.n, polygon.h), certificate)
    logger.info('Verified %d guards: coverage %.4f, connected %s, bound %s',
                len(guards), coverage.fraction, connectivity.connected,
                'ok' if report.bound_ok else 'exceeded')
    return report
