"""Tests for triplet covers and guard placement."""

import numpy as np
import pytest

from coopguards.errors import InvalidInputError
from coopguards.guards import (
    Triplet,
    add_leaf,
    compute_cover,
    cooperative_guards,
    find_triplet,
    remove_leaf,
    solve,
)
from coopguards.triangulation import RootedTree, build_dual, choose_root, spanning_tree, triangulate
from coopguards.utils import guard_bound
from coopguards.verify import triangle_certificate, verify_connectivity, verify_cover_certificate
from tests.polygons import figure_polygon, hexagon, square, square_with_hole


def _path(length: int) -> RootedTree:
    tree = RootedTree.single(0)
    for v in range(1, length):
        tree.attach(v - 1, v)
    return tree


# ─── find_triplet / compute_cover ────────────────────────────────────────────

def test_find_triplet_single_uncovered_child():
    tree = _path(4)
    cover = compute_cover(tree)
    assert find_triplet(tree, cover, 2) == Triplet(frozenset({3, 2, 1}))


def test_find_triplet_child_already_covering():
    tree = _path(4)
    cover = compute_cover(tree)
    assert find_triplet(tree, cover, 1) is None


def test_find_triplet_root_collapses_parent():
    tree = _path(4)
    cover = compute_cover(tree)
    assert cover.t[0] == Triplet(frozenset({0, 1}))


def test_find_triplet_two_children():
    tree = RootedTree.single(0)
    tree.attach(0, 1)
    tree.attach(1, 2)
    tree.attach(1, 3)
    cover = compute_cover(tree)
    assert cover.t[1] == Triplet(frozenset({1, 2, 3}))


def test_compute_cover_hexagon_fan():
    poly = hexagon()
    tri = triangulate(poly)
    tree = spanning_tree(build_dual(tri), 0)
    cover = compute_cover(tree, tri)
    assert cover.count == 2
    assert cover.as_sets() == {3: None, 2: frozenset({1, 2, 3}), 1: None, 0: frozenset({0, 1})}
    assert all(trip.guard_vertex == 0 for _, trip in cover.triplets())


def test_compute_cover_single_node():
    cover = compute_cover(RootedTree.single(0))
    assert cover.t[0] == Triplet(frozenset({0}))


# ─── Incremental updates ─────────────────────────────────────────────────────

def test_add_leaf_example():
    tree = _path(3)
    cover = compute_cover(tree)
    assert cover.as_sets() == {2: None, 1: frozenset({0, 1, 2}), 0: None}

    result = add_leaf(tree, cover, 2, 3)
    assert result.cover.as_sets() == {
        0: frozenset({0, 1}), 1: None, 2: frozenset({1, 2, 3}), 3: None,
    }
    assert result.find_triplet_calls == tree.depth[2] + 1


def test_add_leaf_to_root_only_tree():
    tree = RootedTree.single(0)
    cover = compute_cover(tree)
    add_leaf(tree, cover, 0, 1)
    assert cover.t[0] == Triplet(frozenset({0, 1}))


def test_remove_leaf_restores_previous_cover():
    tree = _path(3)
    cover = compute_cover(tree)
    before = cover.as_sets()
    add_leaf(tree, cover, 2, 3)
    remove_leaf(tree, cover, 2, 3)
    assert cover.as_sets() == before


def test_remove_last_leaf_leaves_singleton():
    tree = _path(2)
    cover = compute_cover(tree)
    remove_leaf(tree, cover, 0, 1)
    assert cover.t == {0: Triplet(frozenset({0}))}


def test_add_leaf_to_full_node_rejected():
    tree = _path(1)
    cover = compute_cover(tree)
    add_leaf(tree, cover, 0, 1)
    add_leaf(tree, cover, 0, 2)
    with pytest.raises(InvalidInputError, match="two children"):
        add_leaf(tree, cover, 0, 3)


def test_remove_non_leaf_rejected():
    tree = _path(3)
    cover = compute_cover(tree)
    with pytest.raises(InvalidInputError, match="not a leaf"):
        remove_leaf(tree, cover, 0, 1)


def _random_updates(seed: int, steps: int) -> None:
    rng = np.random.default_rng(seed)
    tree = RootedTree.single(0)
    cover = compute_cover(tree)
    next_node = 1
    for _ in range(steps):
        leaves = [v for v in tree.nodes if v != tree.root and tree.is_leaf(v)]
        open_nodes = [v for v in tree.nodes if len(tree.children[v]) < 2]
        if leaves and (len(tree) >= 64 or rng.random() < 0.35):
            leaf = leaves[int(rng.integers(len(leaves)))]
            v = tree.parent[leaf]
            result = remove_leaf(tree, cover, v, leaf)
        else:
            v = open_nodes[int(rng.integers(len(open_nodes)))]
            result = add_leaf(tree, cover, v, next_node)
            next_node += 1
        assert result.find_triplet_calls <= tree.depth[v] + 1
        assert cover.t == compute_cover(tree).t


@pytest.mark.parametrize("seed", range(20))
def test_random_updates_match_scratch(seed):
    _random_updates(seed, 100)


@pytest.mark.slow
def test_thousand_update_sequences_match_scratch():
    for seed in range(1000):
        _random_updates(seed, 80)


# ─── Guards ──────────────────────────────────────────────────────────────────

def test_square_needs_one_guard():
    guards = cooperative_guards(square())
    assert len(guards) == 1
    assert guards.vertices == (0,)


def test_square_with_hole_within_bound():
    solution = solve(square_with_hole())
    assert solution.bound == 4
    assert len(solution.guards) <= 4
    assert verify_connectivity(solution.polygon, solution.guards).connected


def test_figure_polygon_within_bound():
    poly = figure_polygon()
    solution = solve(poly)
    assert guard_bound(poly.n, poly.h) == 8
    assert len(solution.guards) <= 8
    assert verify_cover_certificate(solution.triangulation, solution.dual, solution.cover)
    assert triangle_certificate(solution.triangulation, solution.guards)
    assert verify_connectivity(poly, solution.guards).connected


def test_solution_uses_lowest_low_degree_root():
    solution = solve(square_with_hole())
    assert solution.tree.root == choose_root(solution.dual)
