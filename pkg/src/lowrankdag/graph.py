"""Directed-graph model, level decomposition, graphical rank bounds, edge-list I/O.

Vertices are the integers ``0..d-1``.  A :class:`Dag` is a simple directed
graph without self-loops; acyclicity is validated where an operation needs
it rather than at construction time, because the matching-based rank bounds
are well defined for arbitrary directed graphs.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import matching

#: Refuse to materialize dense d x d matrices beyond this vertex count.
DENSE_CAP = 5000


class CyclicGraphError(ValueError):
    """Raised when an operation that requires acyclicity meets a cycle."""

    def __init__(self, cycle: list[int]):
        super().__init__(f"not a DAG: cycle {'->'.join(map(str, cycle + cycle[:1]))}")
        self.cycle = list(cycle)


def _check_edges(d: int, edges: Iterable[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    out = set()
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if not (0 <= i < d and 0 <= j < d):
            raise ValueError(f"edge ({i},{j}) out of range for d={d}")
        if i == j:
            raise ValueError(f"self-loop ({i},{i}) not allowed")
        out.add((i, j))
    return frozenset(out)


@dataclass(frozen=True)
class Dag:
    """Simple directed graph on ``0..d-1`` (no self-loops, no parallel edges).

    Attributes:
        d: number of vertices.
        edges: set of ``(tail, head)`` pairs, meaning ``tail -> head``.
    """

    d: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, d: int, edges: Iterable[tuple[int, int]] = ()):
        if int(d) < 1:
            raise ValueError("d must be >= 1")
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "edges", _check_edges(self.d, edges))

    @classmethod
    def acyclic(cls, d: int, edges: Iterable[tuple[int, int]] = ()) -> "Dag":
        """Construct and verify acyclicity (raises :class:`CyclicGraphError`)."""
        g = cls(d, edges)
        topological_order(g)
        return g

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.d)]
        for i, j in sorted(self.edges):
            adj[i].append(j)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def _parents(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.d)]
        for i, j in sorted(self.edges):
            adj[j].append(i)
        return tuple(tuple(a) for a in adj)

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def parents(self, v: int) -> tuple[int, ...]:
        return self._parents[v]

    def adjacency_matrix(self, dtype=np.float64, cap: int = DENSE_CAP) -> np.ndarray:
        """Dense binary adjacency; guarded by ``cap`` to avoid surprise blowups."""
        if self.d > cap:
            raise ValueError(f"refusing dense {self.d}x{self.d} matrix (cap={cap})")
        a = np.zeros((self.d, self.d), dtype=dtype)
        for i, j in self.edges:
            a[i, j] = 1
        return a

    def relabel(self, perm: Iterable[int]) -> "Dag":
        """Relabel vertex ``v`` as ``perm[v]`` (``perm`` must be a permutation)."""
        p = list(perm)
        if sorted(p) != list(range(self.d)):
            raise ValueError("perm is not a permutation of 0..d-1")
        return Dag(self.d, {(p[i], p[j]) for i, j in self.edges})


@dataclass(frozen=True)
class WeightedDag:
    """A :class:`Dag` plus one nonzero finite weight per edge."""

    graph: Dag
    weights: Mapping[tuple[int, int], float]

    def __init__(self, graph: Dag, weights: Mapping[tuple[int, int], float]):
        w = {(int(i), int(j)): float(v) for (i, j), v in weights.items()}
        if set(w) != set(graph.edges):
            raise ValueError("weights must cover exactly the edge set")
        for e, v in w.items():
            if not np.isfinite(v) or v == 0.0:
                raise ValueError(f"weight for edge {e} must be nonzero finite, got {v}")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.graph.d

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self.graph.edges

    def matrix(self, cap: int = DENSE_CAP) -> np.ndarray:
        """Dense weight matrix W with W[i, j] nonzero exactly on edges i -> j."""
        if self.d > cap:
            raise ValueError(f"refusing dense {self.d}x{self.d} matrix (cap={cap})")
        w = np.zeros((self.d, self.d))
        for (i, j), v in self.weights.items():
            w[i, j] = v
        return w

    @classmethod
    def from_matrix(cls, w: np.ndarray) -> "WeightedDag":
        w = np.asarray(w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weight matrix must be square")
        idx = np.argwhere(w != 0.0)
        weights = {(int(i), int(j)): float(w[i, j]) for i, j in idx}
        return cls(Dag(w.shape[0], weights.keys()), weights)


@dataclass(frozen=True)
class AcyclicityCheck:
    """Outcome of an acyclicity check: exactly one field is set.

    ``order`` lists vertices parents-before-children (every edge goes from an
    earlier to a later position); for an edgeless graph it is ``0..d-1``
    ascending.  ``cycle`` is one directed cycle ``v0 -> v1 -> ... -> v0``
    given as the vertex list ``[v0, v1, ...]``.
    """

    order: tuple[int, ...] | None
    cycle: tuple[int, ...] | None

    @property
    def is_acyclic(self) -> bool:
        return self.order is not None


def validate_acyclic(g: Dag) -> AcyclicityCheck:
    """Kahn's algorithm; returns a topological order or a concrete cycle."""
    indeg = [0] * g.d
    for _, j in g.edges:
        indeg[j] += 1
    queue = deque(v for v in range(g.d) if indeg[v] == 0)
    order: list[int] = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for c in g.children(v):
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if len(order) == g.d:
        return AcyclicityCheck(order=tuple(order), cycle=None)
    # every leftover vertex keeps a leftover predecessor; walk until a repeat
    leftover = {v for v in range(g.d) if indeg[v] > 0}
    v = min(leftover)
    seen: dict[int, int] = {}
    walk: list[int] = []
    while v not in seen:
        seen[v] = len(walk)
        walk.append(v)
        v = min(p for p in g.parents(v) if p in leftover)
    cycle = walk[seen[v]:][::-1]  # walked backwards over parents; reverse to edge order
    return AcyclicityCheck(order=None, cycle=tuple(cycle))


def topological_order(g: Dag) -> tuple[int, ...]:
    chk = validate_acyclic(g)
    if chk.order is None:
        raise CyclicGraphError(list(chk.cycle))
    return chk.order


@dataclass(frozen=True)
class LevelDecomposition:
    """Partition of vertices by level = length of the longest outgoing path.

    Attributes:
        level: per-vertex level, ``level[v] == 0`` iff ``v`` has no children.
        groups: ``groups[s]`` lists the vertices of level ``s``, ascending.
        graph_level: the largest level (length of the longest path).
    """

    level: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    graph_level: int


def levels(g: Dag) -> LevelDecomposition:
    """Level of every vertex via dynamic programming over reverse topological order."""
    order = topological_order(g)
    lvl = [0] * g.d
    for v in reversed(order):
        ch = g.children(v)
        if ch:
            lvl[v] = 1 + max(lvl[c] for c in ch)
    top = max(lvl) if g.d else 0
    groups: list[list[int]] = [[] for _ in range(top + 1)]
    for v in range(g.d):
        groups[lvl[v]].append(v)
    return LevelDecomposition(tuple(lvl), tuple(tuple(grp) for grp in groups), top)


def _nonsingleton_components(vertices: list[int], edges: list[tuple[int, int]]) -> int:
    """Connected components (edge directions ignored) that contain >= 2 vertices."""
    parent = {v: v for v in vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        parent[find(i)] = find(j)
    touched = {v for e in edges for v in e}
    return len({find(v) for v in touched})


def rank_lower_bounds(g: Dag) -> tuple[int, int]:
    """Lower bounds on the rank of every weighting of ``g``.

    Returns ``(lower_components, lower_level)`` where ``lower_level`` is the
    graph level and ``lower_components`` sums, over consecutive level pairs
    ``(s, s-1)``, the number of non-singleton connected components of the
    induced subgraph.  For a DAG, ``lower_components >= lower_level``.
    """
    dec = levels(g)
    total = 0
    for s in range(1, dec.graph_level + 1):
        verts = list(dec.groups[s]) + list(dec.groups[s - 1])
        vs = set(verts)
        sub = [(i, j) for i, j in g.edges if i in vs and j in vs]
        total += _nonsingleton_components(verts, sub)
    return total, dec.graph_level


@dataclass(frozen=True)
class HeadTailCover:
    """Vertex sets (H, T) such that every edge has its head in H or its tail in T."""

    heads: frozenset[int]
    tails: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.heads) + len(self.tails)


def is_head_tail_cover(g: Dag, cover: HeadTailCover) -> bool:
    for v in cover.heads | cover.tails:
        if not 0 <= v < g.d:
            raise ValueError(f"cover vertex {v} out of range for d={g.d}")
    return all(j in cover.heads or i in cover.tails for i, j in g.edges)


def max_rank(g: Dag) -> int:
    """Largest rank attained over all weightings of ``g``.

    Equals the maximum bipartite matching size of the tail/head double cover
    of the edge set (and, by Koenig's theorem, the minimum head-tail cover
    size).  Acyclicity is not required.
    """
    return matching.max_bipartite_matching(g.d, _sorted_adj(g))[0]


def min_head_tail_cover(g: Dag) -> HeadTailCover:
    """A minimum head-tail cover, recovered from a maximum matching."""
    adj = _sorted_adj(g)
    _, pair_tail, pair_head = matching.max_bipartite_matching(g.d, adj)
    tails, heads = matching.minimum_cover(g.d, adj, pair_tail, pair_head)
    return HeadTailCover(heads=frozenset(heads), tails=frozenset(tails))


def _sorted_adj(g: Dag) -> list[list[int]]:
    return [list(g.children(v)) for v in range(g.d)]


@dataclass(frozen=True)
class LevelUpperBounds:
    """Upper bounds on ``max_rank`` computable from the level decomposition.

    ``child_sum``  sums min(|V_s|, |children(V_s)|) over levels s >= 1.
    ``parent_sum`` sums min(|V_s|, |parents(V_s)|) over levels s < graph level.
    ``level_complement`` is d minus the largest level group.
    ``nonleaf``/``nonroot`` count vertices with at least one child/parent;
    they bound ``child_sum``/``parent_sum`` from above.
    """

    child_sum: int
    parent_sum: int
    level_complement: int
    nonleaf: int
    nonroot: int


def level_upper_bounds(g: Dag) -> LevelUpperBounds:
    dec = levels(g)
    child_sum = 0
    for s in range(1, dec.graph_level + 1):
        grp = dec.groups[s]
        ch = {c for v in grp for c in g.children(v)}
        child_sum += min(len(grp), len(ch))
    parent_sum = 0
    for s in range(dec.graph_level):
        grp = dec.groups[s]
        pa = {p for v in grp for p in g.parents(v)}
        parent_sum += min(len(grp), len(pa))
    return LevelUpperBounds(
        child_sum=child_sum,
        parent_sum=parent_sum,
        level_complement=g.d - max(len(grp) for grp in dec.groups),
        nonleaf=sum(1 for v in range(g.d) if g.children(v)),
        nonroot=sum(1 for v in range(g.d) if g.parents(v)),
    )


@dataclass(frozen=True)
class RankBounds:
    """All graphical rank bounds for one DAG; see the individual operations."""

    lower_level: int
    lower_components: int
    upper_matching: int
    upper_child_sum: int
    upper_parent_sum: int
    upper_level_complement: int
    upper_nonleaf: int
    upper_nonroot: int

    def as_dict(self) -> dict[str, int]:
        return {k: int(v) for k, v in self.__dict__.items()}


def rank_bounds(g: Dag) -> RankBounds:
    """Assemble lower and upper rank bounds (requires acyclicity for levels)."""
    lo_comp, lo_level = rank_lower_bounds(g)
    up = level_upper_bounds(g)
    return RankBounds(
        lower_level=lo_level,
        lower_components=lo_comp,
        upper_matching=max_rank(g),
        upper_child_sum=up.child_sum,
        upper_parent_sum=up.parent_sum,
        upper_level_complement=up.level_complement,
        upper_nonleaf=up.nonleaf,
        upper_nonroot=up.nonroot,
    )


def numeric_rank(w, tol: float = 1e-8) -> int:
    """Number of singular values above ``tol * sigma_max``.

    Accepts a :class:`WeightedDag` or a 2-D array.  A zero matrix has rank 0
    (singular values are compared against an absolute floor of 1e-9 when
    ``sigma_max == 0``).  Non-finite entries raise ``ValueError``.
    """
    m = w.matrix() if isinstance(w, WeightedDag) else np.asarray(w, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0:
        return 0
    smax = float(sv[0])
    cut = tol * smax if smax > 0.0 else 1e-9
    return int(np.count_nonzero(sv > cut))


# ---------------------------------------------------------------------------
# edge-list file format: header "d=<int>", then "tail,head[,weight]" rows
# ---------------------------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits: round-trips every double and is byte-stable."""
    return format(float(x), ".17g")


def write_edge_list(path, g: Dag | WeightedDag) -> None:
    """Write ``g`` in edge-list format, edges sorted for byte-stable output."""
    weighted = isinstance(g, WeightedDag)
    lines = [f"d={g.d}"]
    for i, j in sorted(g.edges):
        if weighted:
            lines.append(f"{i},{j},{format_float(g.weights[(i, j)])}")
        else:
            lines.append(f"{i},{j}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> Dag | WeightedDag:
    """Parse the edge-list format; returns a WeightedDag iff rows carry weights."""
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("d="):
        raise ValueError(f"{path}: first line must be 'd=<int>'")
    try:
        d = int(lines[0][2:])
    except ValueError:
        raise ValueError(f"{path}: malformed header {lines[0]!r}") from None
    edges: list[tuple[int, int]] = []
    weights: dict[tuple[int, int], float] = {}
    arity: int | None = None
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) not in (2, 3):
            raise ValueError(f"{path}: malformed edge row {ln!r}")
        if arity is None:
            arity = len(parts)
        elif len(parts) != arity:
            raise ValueError(f"{path}: mixed weighted and unweighted rows")
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else None
        except ValueError:
            raise ValueError(f"{path}: malformed edge row {ln!r}") from None
        edges.append((i, j))
        if w is not None:
            weights[(i, j)] = w
    if len(set(edges)) != len(edges):
        raise ValueError(f"{path}: duplicate edges")
    g = Dag(d, edges)
    if arity == 3:
        return WeightedDag(g, weights)
    return g


def read_dense_matrix(path) -> np.ndarray:
    """Parse a square dense-matrix CSV (d rows of d comma-separated reals)."""
    m = np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2))
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got {m.shape}")
    return m
