"""Tests for the polygon generators."""

import pytest

from coopguards.errors import InvalidInputError
from coopguards.generators import gen_comb_polygon, gen_random_polygon, gen_ring_polygon
from coopguards.geometry import Point


def test_comb_shape():
    poly = gen_comb_polygon(2)
    assert poly.n == 8
    assert poly.h == 0
    assert poly.outer[0] == Point(0, 0)
    assert Point(2, 12) in poly.outer


@pytest.mark.parametrize("k", [1, 4, 16])
def test_comb_vertex_count(k):
    assert gen_comb_polygon(k).n == 2 * (k + 2)


def test_comb_rejects_zero_teeth():
    with pytest.raises(InvalidInputError, match="at least 1"):
        gen_comb_polygon(0)


def test_ring_of_holes():
    poly = gen_ring_polygon(2)
    assert poly.h == 2
    assert poly.n == 12
    assert poly.n >= 3 * poly.h + 3


def test_ring_of_holes_range():
    with pytest.raises(InvalidInputError, match="0..16"):
        gen_ring_polygon(17)


def test_random_polygon_is_seeded():
    assert gen_random_polygon(40, seed=7) == gen_random_polygon(40, seed=7)
    assert gen_random_polygon(40, seed=7) != gen_random_polygon(40, seed=8)


def test_random_polygon_counts():
    poly = gen_random_polygon(40, holes=3, seed=2)
    assert poly.n == 40
    assert poly.h == 3


def test_random_polygon_needs_room_for_holes():
    with pytest.raises(InvalidInputError, match="at least 8 outer vertices"):
        gen_random_polygon(20, holes=4)
