"""Fictive matchings: construction, consistency, substitution."""

import pytest

from bipham.errors import InconsistentInput
from bipham.fictive import (
    build_fictive,
    consistent_cycle_search,
    is_consistent,
    substitute,
)
from bipham.graphs import Graph, LabelledPartition, PathSystem
from bipham.validate import check_cycle, cycle_edges


def test_single_cross_path():
    part = LabelledPartition(3, [0], [1], [], [2])
    j = PathSystem(3, [(0, 1), (0, 2)])
    fict = build_fictive(j, part)
    assert fict.s == 0
    assert fict.pairs() == [(1, 2)]


def test_two_sided_pairing():
    # one path with both endpoints in A, one with both in B:
    # the endpoints are re-paired crosswise
    part = LabelledPartition(8, [6], [0, 1, 2], [7], [3, 4, 5])
    j = PathSystem(8, [(0, 6), (6, 1), (3, 7), (7, 4)])
    fict = build_fictive(j, part)
    assert fict.s == 1
    assert fict.pairs() == [(0, 3), (1, 4)]


def test_fictive_size_never_exceeds_system(rng):
    for _ in range(200):
        n = 10
        part = LabelledPartition(n, [8], [0, 1, 2, 3], [9], [4, 5, 6, 7])
        # random valid system: exceptional vertices internal on distinct ends
        a_ends = rng.sample([0, 1, 2, 3], 2)
        b_ends = rng.sample([4, 5, 6, 7], 2)
        style = rng.random()
        if style < 0.4:
            edges = [(8, a_ends[0]), (8, b_ends[0]), (9, a_ends[1]), (9, b_ends[1])]
        elif style < 0.7:
            edges = [(8, a_ends[0]), (8, a_ends[1]), (9, b_ends[0]), (9, b_ends[1])]
        else:
            edges = [(8, b_ends[0]), (8, b_ends[1]), (9, a_ends[0]), (9, a_ends[1])]
        j = PathSystem(n, edges)
        fict = build_fictive(j, part)
        assert fict.s_prime <= j.num_edges()
        assert all(x in set(part.A) and y in set(part.B) for x, y in fict.pairs())


def test_consistency_checks():
    part = LabelledPartition(8, [6], [0, 1, 2], [7], [3, 4, 5])
    j = PathSystem(8, [(0, 6), (6, 1), (3, 7), (7, 4)])
    fict = build_fictive(j, part)  # pairs (0,3), (1,4)
    assert is_consistent([0, 3, 1, 4], fict)
    assert is_consistent(list(reversed([0, 3, 1, 4])), fict)
    # a 4-cycle with both pairs adjacent is consistent in one of its two
    # orientations no matter how it is written down
    assert is_consistent([0, 4, 1, 3], fict)
    assert is_consistent([0, 3, 2, 5, 1, 4], fict)
    # both fictive adjacencies present but the visit order is wrong in both
    # orientations
    assert not is_consistent([0, 3, 2, 4, 1, 5], fict)
    # missing a fictive adjacency
    assert not is_consistent([0, 5, 1, 4, 2, 3], fict)
    # empty matchings are always consistent
    empty = build_fictive(PathSystem(8, []), part.swapped().swapped())
    assert empty.s_prime == 0


def test_substitute_round_trip():
    part = LabelledPartition(8, [6], [0, 1, 2], [7], [3, 4, 5])
    j = PathSystem(8, [(0, 6), (6, 1), (3, 7), (7, 4)])
    fict = build_fictive(j, part)
    cyc = [0, 3, 2, 5, 1, 4]  # consistent; visits all inner vertices
    full = substitute(cyc, j, fict, part)
    assert sorted(full) == list(range(8))
    assert not check_cycle(8, full)
    # fictive pairs replaced by the system's paths
    es = cycle_edges(full)
    assert set(j.edges) <= es
    assert (0, 3) not in es and (1, 4) not in es
    with pytest.raises(InconsistentInput):
        substitute([0, 3, 2, 4, 1, 5], j, fict, part)


def test_consistent_search_yields_consistent_cycles():
    part = LabelledPartition(10, [8], [0, 1, 2, 3], [9], [4, 5, 6, 7])
    j = PathSystem(10, [(8, 0), (8, 1), (9, 4), (9, 5)])
    fict = build_fictive(j, part)
    pool = Graph(10, [(a, b) for a in range(4) for b in range(4, 8)])
    found = 0
    for cyc in consistent_cycle_search(pool, part, j, fict):
        assert is_consistent(cyc, fict)
        full = substitute(cyc, j, fict, part)
        assert not check_cycle(10, full)
        found += 1
        if found >= 5:
            break
    assert found == 5
