"""Tests for proximity-model views, diagonal validation and exploration."""

import math

import numpy as np
import pytest

import coopguards.proximity as proximity
from coopguards.emitter import format_trace
from coopguards.errors import InvalidInputError
from coopguards.generators import gen_comb_polygon, gen_random_polygon
from coopguards.geometry import Point, mutually_visible
from coopguards.parser import parse_trace_text
from coopguards.sim import Prox, model_check
from coopguards.proximity import (
    PATROL_ROUNDS,
    look_view,
    proximity_explore,
    validate_diagonal,
)
from coopguards.triangulation import Triangle, Triangulation, fits
from coopguards.utils import guard_bound
from coopguards.verify import sample_points, triangle_certificate, verify_connectivity
from tests.polygons import figure_polygon, hexagon, square, square_with_hole


# ─── Views ───────────────────────────────────────────────────────────────────

def test_look_view_orders_by_angle():
    view = look_view(square(), Point(5, 5))
    assert view.vertex_seq == (2, 3, 0, 1)


def test_look_view_rotates_with_orientation():
    view = look_view(square(), Point(5, 5), orientation=Point(0, 1))
    assert view.vertex_seq == (3, 0, 1, 2)


def test_look_view_lists_visible_agents():
    agents = {7: Point(8, 5), 3: Point(5, 8)}
    view = look_view(square(), Point(5, 5), agents)
    assert view.agent_seq == (7, 3)


def test_look_view_hides_agents_behind_hole():
    poly = square_with_hole()
    view = look_view(poly, Point(2, 2), {1: Point(10, 10), 2: Point(10, 2)})
    assert view.agent_seq == (2,)


def _angle(observer: Point, target: Point) -> float:
    return math.atan2(float(target.y - observer.y), float(target.x - observer.x)) % (2 * math.pi)


def _oracle_view(poly, q, agents):
    """Visible vertices and agents by brute-force segment tests, sorted by angle."""
    V = poly.vertices

    def order(target):
        d = target - q
        return _angle(q, target), float(d.x * d.x + d.y * d.y)

    vertices = sorted((i for i in range(poly.n) if mutually_visible(poly, q, V[i])),
                      key=lambda i: (*order(V[i]), i))
    seen = sorted((aid for aid, pos in agents.items() if mutually_visible(poly, q, pos)),
                  key=lambda aid: (*order(agents[aid]), aid))
    return tuple(vertices), tuple(seen)


def _check_views(poly, count, seed):
    points = sample_points(poly, count + 3, seed=seed)
    agents = dict(enumerate(points[count:]))
    for q in points[:count]:
        view = look_view(poly, q, agents)
        assert (view.vertex_seq, view.agent_seq) == _oracle_view(poly, q, agents)


def test_look_view_matches_visibility_oracle():
    _check_views(square_with_hole(), 50, seed=11)


@pytest.mark.slow
@pytest.mark.parametrize("make, seed", [
    (square_with_hole, 1),
    (figure_polygon, 2),
    (lambda: gen_comb_polygon(6), 3),
    (lambda: gen_random_polygon(24, 2, seed=1), 4),
])
def test_look_view_matches_visibility_oracle_many_placements(make, seed):
    _check_views(make(), 250, seed=seed)


# ─── Validation ──────────────────────────────────────────────────────────────

def test_validate_diagonal_free_segment():
    poly = square()
    empty = Triangulation(poly, (), ())
    assert validate_diagonal(poly, empty, 0, 2) == (True, 1)


def test_validate_diagonal_blocked_by_built_triangle():
    poly = square()
    built = Triangulation(poly, (Triangle(0, 1, 2),), ())
    assert validate_diagonal(poly, built, 1, 3) == (False, 1)


# ─── Exploration ─────────────────────────────────────────────────────────────

def test_explore_square():
    result = proximity_explore(square())
    assert len(result.triangulation) == 2
    assert len(result.guards) == 1
    assert result.cost.validations >= 2
    assert result.cost.wait_rounds == PATROL_ROUNDS * result.cost.validations
    assert result.cost.total_rounds == result.cost.validation_steps + result.cost.wait_rounds


def test_explore_hexagon_builds_valid_triangles():
    poly = hexagon()
    result = proximity_explore(poly)
    assert len(result.triangulation) == 4
    assert all(fits(poly, *t.vertices) for t in result.triangulation.triangles)


def test_explore_square_with_hole():
    poly = square_with_hole()
    result = proximity_explore(poly)
    assert len(result.triangulation) == 8
    assert len(result.guards) <= guard_bound(poly.n, poly.h)
    assert triangle_certificate(result.triangulation, result.guards)
    assert verify_connectivity(poly, result.guards).connected


def test_explore_events_are_logged_in_round_order():
    result = proximity_explore(square_with_hole())
    rounds = np.array([ev.round for ev in result.events])
    assert np.all(np.diff(rounds) >= 0)
    assert sum(ev.kind == "TRIANGLE" for ev in result.events) == 8


def test_explore_trace_has_one_prox_event_per_step():
    result = proximity_explore(square_with_hole())
    trace = result.trace()
    assert trace.mode == "proximity"
    assert trace.agent_ids == ()
    events = [ev for rnd in trace.rounds for ev in rnd.events]
    assert all(isinstance(ev, Prox) for ev in events)
    assert [(ev.kind, ev.words) for ev in events] == [(ev.kind, ev.words) for ev in result.events]
    assert trace.total_rounds == result.cost.total_rounds


def test_explore_trace_survives_text_round_trip():
    poly = square_with_hole()
    trace = proximity_explore(poly).trace()
    text = format_trace(trace)
    assert " PROX VALIDATE " in text
    parsed = parse_trace_text(text)
    assert format_trace(parsed) == text
    assert model_check(parsed, poly)


# ─── Visibility preconditions ────────────────────────────────────────────────

def test_validate_diagonal_rejects_pair_blocked_by_hole():
    poly = square_with_hole()
    with pytest.raises(InvalidInputError, match="cannot see"):
        validate_diagonal(poly, Triangulation(poly, (), ()), 0, 2)


def test_explore_only_validates_mutually_visible_pairs(monkeypatch):
    poly = square_with_hole()
    V = poly.vertices
    pairs = []
    original = proximity.validate_diagonal

    def recording(polygon, built, u, v):
        pairs.append((u, v))
        return original(polygon, built, u, v)

    monkeypatch.setattr(proximity, "validate_diagonal", recording)
    result = proximity_explore(poly)
    assert len(result.triangulation) == 8
    assert pairs
    assert all(mutually_visible(poly, V[u], V[v]) for u, v in pairs)
