"""Fixture polygons shared by the test modules."""

from coopguards.geometry import PolygonWithHoles

SQ_RING = [(0, 0), (10, 0), (10, 10), (0, 10)]

SQH_OUTER = [(0, 0), (12, 0), (12, 12), (0, 12)]
SQH_HOLE = [(4, 4), (8, 4), (8, 8), (4, 8)]

HEX_RING = [(20, 0), (60, 0), (80, 20), (60, 40), (20, 40), (0, 20)]

FIG_OUTER = [(20, 0), (60, 0), (80, 20), (60, 40), (20, 40), (0, 20)]
FIG_HOLES = [
    [(20, 15), (30, 15), (30, 25), (20, 25)],
    [(50, 15), (60, 15), (60, 25), (50, 25)],
]

SQH_TEXT = (
    "POLY 1\n"
    "outer 4\n"
    "0 0\n12 0\n12 12\n0 12\n"
    "hole 4\n"
    "4 4\n8 4\n8 8\n4 8\n"
)


def square() -> PolygonWithHoles:
    """n=4, h=0."""
    return PolygonWithHoles.from_rings(SQ_RING)


def square_with_hole() -> PolygonWithHoles:
    """n=8, h=1."""
    return PolygonWithHoles.from_rings(SQH_OUTER, [SQH_HOLE])


def hexagon() -> PolygonWithHoles:
    return PolygonWithHoles.from_rings(HEX_RING)


def figure_polygon() -> PolygonWithHoles:
    """n=14, h=2: hexagonal room with two square pillars."""
    return PolygonWithHoles.from_rings(FIG_OUTER, FIG_HOLES)
