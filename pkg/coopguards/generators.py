"""
Deterministic polygon families used by the CLI, the scaling report and
the tests.

    comb            zig-zag corridor whose guards must spread over many hops
    ring            square room with small square holes on a circle
    random          star-shaped outer ring with square holes, seeded
"""

from __future__ import annotations

import logging
import math

import numpy as np

from coopguards.errors import InvalidInputError
from coopguards.geometry import Point, PolygonWithHoles

logger = logging.getLogger(__name__)

RANDOM_RADIUS = 1000
HOLE_SIDE = 20
MAX_ATTEMPTS = 100


def gen_comb_polygon(k: int) -> PolygonWithHoles:
    """Zig-zag corridor with k + 2 junctions and 2(k + 2) vertices.

    Junction i sits at x = 2i, alternately at the bottom and the top of
    the strip, so each junction's vertices see only the neighbouring
    junctions and the vertex visibility graph has diameter growing with k.
    """
    if k < 1:
        raise InvalidInputError(f'comb size must be at least 1, got {k}')
    bottom = [Point(2 * i, 10 * (i % 2)) for i in range(k + 2)]
    top = [Point(p.x, p.y + 2) for p in bottom]
    return PolygonWithHoles.from_rings(bottom + top[::-1])


def gen_ring_polygon(holes: int, hole_side: int = 4) -> PolygonWithHoles:
    """100 x 100 room with ``holes`` small squares spaced on a circle."""
    if not 0 <= holes <= 16:
        raise InvalidInputError(f'ring polygon supports 0..16 holes, got {holes}')
    outer = [(0, 0), (100, 0), (100, 100), (0, 100)]
    rings = []
    for j in range(holes):
        angle = 2 * math.pi * j / max(holes, 1)
        cx = 50 + round(30 * math.cos(angle))
        cy = 50 + round(30 * math.sin(angle))
        rings.append(_square(cx, cy, hole_side))
    return PolygonWithHoles.from_rings(outer, rings)


def gen_random_polygon(n: int, holes: int = 0, seed: int = 0) -> PolygonWithHoles:
    """Star-shaped random polygon with n vertices in total, ``holes`` of them squares.

    The outer ring gets n - 4*holes vertices at jittered angles and
    radii around a common centre; the holes sit on a grid inside a disc
    every outer vertex can see past. Draws that produce a degenerate
    ring are retried with the same generator, so the output depends on
    the seed only.
    """
    m = n - 4 * holes
    if m < 3 or holes < 0:
        raise InvalidInputError(f'cannot build {holes} holes with only {n} vertices')
    if holes and m < 8:
        raise InvalidInputError('random polygons with holes need at least 8 outer vertices')
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_ATTEMPTS):
        outer = _star_ring(rng, m)
        rings = _hole_grid(rng, holes)
        try:
            polygon = PolygonWithHoles.from_rings(outer, rings)
        except InvalidInputError as exc:
            logger.debug('Random polygon attempt %d rejected: %s', attempt + 1, exc)
            continue
        return polygon
    raise InvalidInputError(f'no valid random polygon after {MAX_ATTEMPTS} attempts')


def _square(cx: int, cy: int, side: int) -> list[tuple[int, int]]:
    half = side // 2
    return [(cx - half, cy - half), (cx + half, cy - half),
            (cx + half, cy + half), (cx - half, cy + half)]


def _star_ring(rng: np.random.Generator, m: int) -> list[tuple[int, int]]:
    jitter = rng.uniform(-0.3, 0.3, size=m)
    radii = rng.uniform(0.75, 1.0, size=m) * RANDOM_RADIUS
    angles = 2 * np.pi * (np.arange(m) + jitter) / m
    xs = np.rint(RANDOM_RADIUS + radii * np.cos(angles)).astype(int)
    ys = np.rint(RANDOM_RADIUS + radii * np.sin(angles)).astype(int)
    return [(int(x), int(y)) for x, y in zip(xs, ys)]


def _hole_grid(rng: np.random.Generator, holes: int) -> list[list[tuple[int, int]]]:
    if not holes:
        return []
    cells = math.ceil(math.sqrt(holes)) + 1
    span = int(0.8 * RANDOM_RADIUS)
    step = span // cells
    picks = rng.choice(cells * cells, size=holes, replace=False)
    rings = []
    for cell in sorted(int(c) for c in picks):
        row, col = divmod(cell, cells)
        cx = RANDOM_RADIUS - span // 2 + col * step + step // 2
        cy = RANDOM_RADIUS - span // 2 + row * step + step // 2
        rings.append(_square(cx, cy, HOLE_SIDE))
    return rings
