"""Shared fixtures and small graph builders used across the test modules."""

import numpy as np
import pytest

from lowrankdag import Dag

# 12-node, 12-edge layered graph with two hub vertices (7 and 8).  Level
# groups are {0,1,2,3} / {4,5,6} / {7,8} / {9,10,11}; its minimum head-tail
# cover has size 6 while the level lower bounds are 4 and 3.
LAYERED_HUB_EDGES = [
    (4, 1), (5, 1), (6, 3),
    (7, 4), (7, 2),
    (8, 4), (8, 5), (8, 0),
    (9, 7), (9, 8),
    (10, 7),
    (11, 7),
]


@pytest.fixture(scope="session")
def layered_hub_dag() -> Dag:
    return Dag(12, LAYERED_HUB_EDGES)


def random_dag(rng: np.random.Generator, d: int, p: float) -> Dag:
    """Random DAG: edges point forward along a random vertex order."""
    order = rng.permutation(d)
    edges = [
        (int(order[i]), int(order[j]))
        for i in range(d)
        for j in range(i + 1, d)
        if rng.random() < p
    ]
    return Dag(d, edges)


def has_cycle(d: int, edges) -> bool:
    """Independent DFS cycle check (white/grey/black colouring)."""
    out = {v: [] for v in range(d)}
    for t, h in edges:
        out[t].append(h)
    state = [0] * d  # 0 unvisited, 1 on stack, 2 done
    for start in range(d):
        if state[start]:
            continue
        stack = [(start, iter(out[start]))]
        state[start] = 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for nxt in it:
                if state[nxt] == 1:
                    return True
                if state[nxt] == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(out[nxt])))
                    advanced = True
                    break
            if not advanced:
                state[v] = 2
                stack.pop()
    return False
