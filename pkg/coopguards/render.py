"""Render polygons and overlays as SVG.

Overlays
--------
triangulation   one ``polygon.triangle`` per triangle
dual            ``circle.dual-node`` at each centroid, ``line.dual-edge`` per dual edge
guards          ``circle.guard`` per guard
trace           ``line.move`` per agent move of a simulation trace

Output is byte-identical for identical inputs: coordinates are printed
with fixed precision and elements are emitted in index order.
"""

import logging
import xml.etree.ElementTree as ET
from fractions import Fraction

from coopguards.errors import InvalidInputError
from coopguards.geometry import Point, PolygonWithHoles
from coopguards.guards import GuardSet, GuardSolution, solve
from coopguards.sim import SimTrace

logger = logging.getLogger(__name__)

SUPPORTED_OVERLAYS: tuple[str, ...] = ('triangulation', 'dual', 'guards', 'trace')
CANVAS = 800
MARGIN = 20


class _Frame:
    """Maps polygon coordinates to canvas pixels, y pointing up."""

    def __init__(self, polygon: PolygonWithHoles):
        xmin, ymin, xmax, ymax = polygon.bbox()
        span = max(xmax - xmin, ymax - ymin) or 1
        self.xmin, self.ymax = xmin, ymax
        self.scale = (CANVAS - 2 * MARGIN) / float(span)

    def x(self, p: Point) -> str:
        return f'{MARGIN + float(p.x - self.xmin) * self.scale:.2f}'

    def y(self, p: Point) -> str:
        return f'{MARGIN + float(self.ymax - p.y) * self.scale:.2f}'

    def pair(self, p: Point) -> str:
        return f'{self.x(p)},{self.y(p)}'


def _ring_path(frame: _Frame, ring) -> str:
    head, *rest = ring
    return f'M {frame.pair(head)} ' + ' '.join(f'L {frame.pair(p)}' for p in rest) + ' Z'


def render_svg(polygon: PolygonWithHoles, overlays=(), solution: GuardSolution | None = None,
               guards: GuardSet | None = None, trace: SimTrace | None = None) -> str:
    """Return the SVG document for ``polygon`` with the requested overlays."""
    for name in overlays:
        if name not in SUPPORTED_OVERLAYS:
            raise InvalidInputError(
                f"Overlay '{name}' is not supported. Supported: {', '.join(SUPPORTED_OVERLAYS)}"
            )
    if 'trace' in overlays and trace is None:
        raise InvalidInputError("overlay 'trace' needs a trace file")
    if solution is None and {'triangulation', 'dual'} & set(overlays) \
            or ('guards' in overlays and guards is None and solution is None):
        solution = solve(polygon)
    if guards is None and solution is not None:
        guards = solution.guards

    frame = _Frame(polygon)
    svg = ET.Element('svg', {
        'xmlns': 'http://www.w3.org/2000/svg',
        'width': str(CANVAS), 'height': str(CANVAS),
        'viewBox': f'0 0 {CANVAS} {CANVAS}',
    })
    d = ' '.join(_ring_path(frame, ring) for ring in (polygon.outer, *polygon.holes))
    ET.SubElement(svg, 'path', {'id': 'polygon', 'd': d, 'fill': '#f4f1e8',
                                'fill-rule': 'evenodd', 'stroke': '#333', 'stroke-width': '2'})

    if 'triangulation' in overlays:
        group = ET.SubElement(svg, 'g', {'id': 'triangulation', 'fill': 'none',
                                         'stroke': '#7a9cc6', 'stroke-width': '1'})
        for tri in solution.triangulation.triangles:
            points = ' '.join(frame.pair(p) for p in tri.points(polygon))
            ET.SubElement(group, 'polygon', {'class': 'triangle', 'points': points})

    if 'dual' in overlays:
        group = ET.SubElement(svg, 'g', {'id': 'dual', 'stroke': '#c67a7a', 'fill': '#c67a7a'})
        centroids = []
        for tri in solution.triangulation.triangles:
            a, b, c = tri.points(polygon)
            centroids.append(Point(Fraction(a.x + b.x + c.x, 3), Fraction(a.y + b.y + c.y, 3)))
        for u, v in sorted(solution.dual.graph.edges):
            ET.SubElement(group, 'line', {
                'class': 'dual-edge', 'x1': frame.x(centroids[u]), 'y1': frame.y(centroids[u]),
                'x2': frame.x(centroids[v]), 'y2': frame.y(centroids[v]),
            })
        for p in centroids:
            ET.SubElement(group, 'circle', {'class': 'dual-node', 'cx': frame.x(p),
                                            'cy': frame.y(p), 'r': '3'})

    if 'guards' in overlays:
        group = ET.SubElement(svg, 'g', {'id': 'guards', 'fill': '#2a7a2a'})
        for p in guards:
            ET.SubElement(group, 'circle', {'class': 'guard', 'cx': frame.x(p),
                                            'cy': frame.y(p), 'r': '6'})

    if 'trace' in overlays:
        group = ET.SubElement(svg, 'g', {'id': 'trace', 'stroke': '#aa6600', 'stroke-width': '1'})
        for rnd in trace.rounds:
            for move in rnd.moves:
                ET.SubElement(group, 'line', {
                    'class': 'move', 'x1': frame.x(move.origin), 'y1': frame.y(move.origin),
                    'x2': frame.x(move.target), 'y2': frame.y(move.target),
                })

    logger.debug('Rendered SVG with overlays: %s', ', '.join(overlays) or 'none')
    return ET.tostring(svg, encoding='unicode') + '\n'


def write_svg(svg: str, output_path: str) -> None:
    with open(output_path, 'w', encoding='utf-8') as f:
        f.write(svg)
    logger.info('Wrote SVG → %s', output_path)
