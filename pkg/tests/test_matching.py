import random

import numpy as np
import pytest

from bergedec import kernels
from bergedec.matching import BipartiteGraph, MatchingResult, hopcroft_karp, right_to_left, verify_matching
from oracles import brute_max_matching


def random_graph(rng: random.Random, max_left=12, max_right=12, p=None):
    nl = rng.randint(0, max_left)
    nr = rng.randint(1, max_right)
    p = rng.uniform(0.05, 0.9) if p is None else p
    adj = [[r for r in range(nr) if rng.random() < p] for _ in range(nl)]
    return BipartiteGraph.from_adjacency(adj, nr), adj


def test_identity_graph_perfect():
    g = BipartiteGraph.from_adjacency([[i] for i in range(5)], 5)
    res = hopcroft_karp(g)
    assert res.size == 5 and res.perfect
    assert list(res.pairs) == [0, 1, 2, 3, 4]
    assert verify_matching(g, res)


def test_two_lefts_one_right_violator():
    g = BipartiteGraph.from_adjacency([[0], [0]], 1)
    res = hopcroft_karp(g)
    assert res.size == 1
    assert res.violator is not None and set(res.violator) == {0, 1}
    assert verify_matching(g, res)


def test_empty_graph():
    g = BipartiteGraph.from_adjacency([], 3)
    res = hopcroft_karp(g)
    assert res.size == 0 and res.perfect


def test_isolated_left_vertex():
    g = BipartiteGraph.from_adjacency([[0, 1], []], 2)
    res = hopcroft_karp(g)
    assert res.size == 1
    assert res.violator is not None
    assert verify_matching(g, res)


def test_agrees_with_bruteforce_oracle():
    rng = random.Random(20260808)
    for _ in range(400):
        g, adj = random_graph(rng)
        res = hopcroft_karp(g)
        oracle = brute_max_matching({i: row for i, row in enumerate(adj)}, g.left_count)
        assert res.size == oracle
        assert verify_matching(g, res), verify_matching(g, res).violation


def test_deterministic_bit_identical():
    rng = random.Random(42)
    for _ in range(40):
        g, _ = random_graph(rng)
        a = hopcroft_karp(g)
        b = hopcroft_karp(g)
        assert np.array_equal(a.pairs, b.pairs)


def test_numba_and_numpy_backends_agree():
    if not kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    rng = random.Random(7)
    for _ in range(60):
        g, _ = random_graph(rng, max_left=30, max_right=30)
        a = hopcroft_karp(g, force="numba")
        b = hopcroft_karp(g, force="numpy")
        assert a.size == b.size
        assert np.array_equal(a.pairs, b.pairs)
        if a.violator is not None:
            assert np.array_equal(a.violator, b.violator)


def test_verify_matching_rejects_planted_defects():
    g = BipartiteGraph.from_adjacency([[0, 1], [0]], 2)
    ok = hopcroft_karp(g)
    assert ok.perfect

    not_edge = MatchingResult(np.array([1, 1], dtype=np.int64), 2, None)
    assert not verify_matching(g, not_edge)

    fake_pair = MatchingResult(np.array([1, 2], dtype=np.int64), 2, None)
    assert not verify_matching(g, fake_pair)

    # violator claim on a perfectly matchable graph
    fake_viol = MatchingResult(
        np.array([1, -1], dtype=np.int64), 1, np.array([0, 1], dtype=np.int64)
    )
    assert not verify_matching(g, fake_viol)


def test_violator_is_genuine_on_thinned_graphs():
    rng = random.Random(99)
    seen_infeasible = 0
    for _ in range(300):
        g, adj = random_graph(rng, max_left=12, max_right=8, p=0.15)
        res = hopcroft_karp(g)
        if res.violator is not None:
            seen_infeasible += 1
            neigh = set()
            for l in res.violator:
                neigh.update(int(x) for x in g.row(int(l)))
            assert len(neigh) < len(res.violator)
    assert seen_infeasible > 20


def test_right_to_left_inverse():
    g = BipartiteGraph.from_adjacency([[1], [0], [2]], 3)
    res = hopcroft_karp(g)
    inv = right_to_left(g, res)
    for l, r in enumerate(res.pairs):
        assert inv[r] == l


def test_graph_validate():
    g = BipartiteGraph.from_adjacency([[0, 1], [1]], 2)
    assert g.validate()
    bad = BipartiteGraph(2, 2, g.indptr, np.array([1, 0, 1], dtype=np.int32))
    assert not bad.validate()
