"""Bipartite matching on the tail/head double cover of a directed edge set.

Every directed graph induces a bipartite graph with one "tail" copy and one
"head" copy of each vertex, and an edge ``tail(i) - head(j)`` per directed
edge ``i -> j``.  The maximum matching size of this bipartite graph equals
the largest rank over all weightings of the directed graph, and its minimum
vertex cover (which Koenig's theorem makes recoverable from a maximum
matching) is a minimum head-tail cover.
"""

from collections import deque

_INF = -2  # BFS distance sentinel (valid distances are >= 0)
_FREE = -1


def _bfs_layers(d: int, adj: list[list[int]], pair_tail: list[int],
                pair_head: list[int], dist: list[int]) -> bool:
    """Layered BFS from unmatched tails; True iff some free head is reachable."""
    queue: deque[int] = deque()
    for u in range(d):
        if pair_tail[u] == _FREE and adj[u]:
            dist[u] = 0
            queue.append(u)
        else:
            dist[u] = _INF
    found = False
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            w = pair_head[v]
            if w == _FREE:
                found = True
            elif dist[w] == _INF:
                dist[w] = dist[u] + 1
                queue.append(w)
    return found


def _dfs_augment(root: int, adj: list[list[int]], pair_tail: list[int],
                 pair_head: list[int], dist: list[int]) -> bool:
    """Iterative layered DFS; applies the augmenting path when one is found."""
    frames: list[list[int]] = [[root, 0]]
    path_heads: list[int] = []
    while frames:
        frame = frames[-1]
        u, k = frame
        advanced = False
        while k < len(adj[u]):
            v = adj[u][k]
            k += 1
            w = pair_head[v]
            if w == _FREE:
                frame[1] = k
                path_heads.append(v)
                for (tu, _), tv in zip(frames, path_heads):
                    pair_tail[tu] = tv
                    pair_head[tv] = tu
                return True
            if dist[w] == dist[u] + 1:
                frame[1] = k
                path_heads.append(v)
                frames.append([w, 0])
                advanced = True
                break
        if not advanced:
            dist[u] = _INF  # dead end; never revisit this phase
            frames.pop()
            if frames:
                path_heads.pop()
    return False


def max_bipartite_matching(d: int, adj: list[list[int]]) -> tuple[int, list[int], list[int]]:
    """Hopcroft-Karp maximum matching.

    Args:
        d: vertex count; ``adj[i]`` lists heads ``j`` of edges ``i -> j``.

    Returns:
        ``(size, pair_tail, pair_head)`` with ``pair_tail[i]`` the head
        matched to tail ``i`` (or -1) and ``pair_head[j]`` the converse.
    """
    pair_tail = [_FREE] * d
    pair_head = [_FREE] * d
    dist = [_INF] * d
    size = 0
    while _bfs_layers(d, adj, pair_tail, pair_head, dist):
        for u in range(d):
            if pair_tail[u] == _FREE and adj[u] and dist[u] == 0:
                if _dfs_augment(u, adj, pair_tail, pair_head, dist):
                    size += 1
    return size, pair_tail, pair_head


def minimum_cover(d: int, adj: list[list[int]], pair_tail: list[int],
                  pair_head: list[int]) -> tuple[list[int], list[int]]:
    """Koenig recovery: minimum vertex cover from a maximum matching.

    Alternating BFS from unmatched tails marks the reachable set Z; the cover
    is (tails not in Z) plus (heads in Z).  Returns ``(tails, heads)`` sorted.
    """
    seen_tail = [False] * d
    seen_head = [False] * d
    queue = deque()
    for u in range(d):
        if pair_tail[u] == _FREE:
            seen_tail[u] = True
            queue.append(u)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v == pair_tail[u] or seen_head[v]:
                continue
            seen_head[v] = True
            w = pair_head[v]
            if w != _FREE and not seen_tail[w]:
                seen_tail[w] = True
                queue.append(w)
    tails = [u for u in range(d) if not seen_tail[u]]
    heads = [v for v in range(d) if seen_head[v]]
    return tails, heads


class IncrementalMatching:
    """Maximum matching maintained while edges are added one at a time.

    Seed the matching with edges that pairwise share no tail and no head
    (:meth:`add_matched_edge`), then offer candidate edges.  A candidate is
    accepted only when it does not create an augmenting path, i.e. when the
    maximum matching size (equivalently the minimum head-tail cover size)
    stays put.  The matching itself therefore never changes after seeding.
    """

    def __init__(self, d: int):
        self.d = d
        self.adj: list[list[int]] = [[] for _ in range(d)]
        self.pair_tail = [_FREE] * d
        self.pair_head = [_FREE] * d
        self.size = 0

    def add_matched_edge(self, i: int, j: int) -> None:
        if self.pair_tail[i] != _FREE or self.pair_head[j] != _FREE:
            raise ValueError(f"seed edge ({i},{j}) shares a matched endpoint")
        self.adj[i].append(j)
        self.pair_tail[i] = j
        self.pair_head[j] = i
        self.size += 1

    def _has_augmenting_path(self) -> bool:
        seen_tail = [False] * self.d
        seen_head = [False] * self.d
        queue = deque()
        for u in range(self.d):
            if self.pair_tail[u] == _FREE and self.adj[u]:
                seen_tail[u] = True
                queue.append(u)
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if seen_head[v]:
                    continue
                seen_head[v] = True
                w = self.pair_head[v]
                if w == _FREE:
                    return True
                if not seen_tail[w]:
                    seen_tail[w] = True
                    queue.append(w)
        return False

    def try_add_edge(self, i: int, j: int) -> bool:
        """Add ``i -> j`` if it keeps the maximum matching size; report success."""
        self.adj[i].append(j)
        if self._has_augmenting_path():
            self.adj[i].pop()
            return False
        return True
