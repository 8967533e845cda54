"""Bipartite matching, cover recovery, and the incremental rank gate."""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from lowrankdag.matching import (
    IncrementalMatching,
    max_bipartite_matching,
    minimum_cover,
)


def random_adj(rng, d, p):
    adj = [[] for _ in range(d)]
    for t in range(d):
        for h in range(d):
            if t != h and rng.random() < p:
                adj[t].append(h)
    return adj


def scipy_matching_size(d, adj):
    rows, cols = [], []
    for t, heads in enumerate(adj):
        for h in heads:
            rows.append(t)
            cols.append(h)
    if not rows:
        return 0
    m = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(d, d))
    return int((maximum_bipartite_matching(m, perm_type="column") >= 0).sum())


def test_hand_cases():
    assert max_bipartite_matching(3, [[], [], []])[0] == 0
    # perfect matching on a 3-cycle's edge set
    size, pt, ph = max_bipartite_matching(3, [[1], [2], [0]])
    assert size == 3
    assert sorted((t, h) for t, h in enumerate(pt) if h >= 0) == [(0, 1), (1, 2), (2, 0)]
    # one tail fanning out can match only once
    assert max_bipartite_matching(4, [[1, 2, 3], [], [], []])[0] == 1


def test_matching_size_matches_scipy():
    rng = np.random.default_rng(17)
    for trial in range(200):
        d = int(rng.integers(2, 25))
        adj = random_adj(rng, d, float(rng.uniform(0.05, 0.6)))
        size, pt, ph = max_bipartite_matching(d, adj)
        assert size == scipy_matching_size(d, adj)
        # the pairing arrays must describe a consistent matching over edges
        matched = 0
        for t, h in enumerate(pt):
            if h >= 0:
                assert ph[h] == t
                assert h in adj[t]
                matched += 1
        assert matched == size


def test_minimum_cover_is_valid_and_tight():
    rng = np.random.default_rng(29)
    for trial in range(200):
        d = int(rng.integers(2, 20))
        adj = random_adj(rng, d, float(rng.uniform(0.05, 0.5)))
        size, pt, ph = max_bipartite_matching(d, adj)
        tails, heads = minimum_cover(d, adj, pt, ph)
        assert len(tails) + len(heads) == size  # Koenig equality
        tset, hset = set(tails), set(heads)
        for t, hs in enumerate(adj):
            for h in hs:
                assert t in tset or h in hset


def test_incremental_gate_preserves_matching_size():
    rng = np.random.default_rng(31)
    for trial in range(60):
        d = int(rng.integers(4, 14))
        r = int(rng.integers(1, d // 2 + 1))
        inc = IncrementalMatching(d)
        seeds = []
        tails = rng.permutation(d)[:r]
        heads = rng.permutation(d)[:r]
        ok = True
        for t, h in zip(tails, heads):
            if t == h:
                ok = False
                break
            seeds.append((int(t), int(h)))
        if not ok:
            continue
        accepted = list(seeds)
        for t, h in seeds:
            inc.add_matched_edge(t, h)
        for _ in range(3 * d):
            t, h = rng.integers(0, d, size=2)
            t, h = int(t), int(h)
            if t == h or (t, h) in accepted:
                continue
            adj_now = [[] for _ in range(d)]
            for a, b in accepted:
                adj_now[a].append(b)
            if inc.try_add_edge(t, h):
                accepted.append((t, h))
                adj_now[t].append(h)
                assert max_bipartite_matching(d, adj_now)[0] == r
            else:
                adj_now[t].append(h)
                assert max_bipartite_matching(d, adj_now)[0] == r + 1
