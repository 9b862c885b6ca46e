"""Immutable undirected graphs, k-cores and domination checks.

Graphs are stored in CSR form: ``indptr`` (length n + 1) and ``indices``
(length 2m), with each neighbor slice sorted ascending. Both arrays are
read-only, so a Graph can be shared freely between threads and processes.
Algorithms that "delete" nodes keep their own overlay state instead.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable

import numpy as np

from domlab.errors import BudgetExceededError, GraphError

__all__ = [
    "Graph",
    "build_graph",
    "empty_graph",
    "induced_subgraph",
    "is_dominating_set",
    "undominated_nodes",
    "k_core",
    "core_numbers",
    "exact_domination_number",
    "min_degree",
    "max_degree",
]

DEFAULT_EXACT_BUDGET = 30


class Graph:
    """Undirected simple graph on node ids ``0 .. n-1``."""

    __slots__ = ("_n", "_indptr", "_indices")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        # Trusted constructor; use build_graph() for unchecked input.
        self._n = int(n)
        self._indptr = np.asarray(indptr, dtype=np.int64)
        self._indices = np.asarray(indices, dtype=np.int32)
        self._indptr.flags.writeable = False
        self._indices.flags.writeable = False

    @classmethod
    def from_pairs(cls, n: int, u: np.ndarray, v: np.ndarray) -> "Graph":
        """Build from endpoint arrays already known to be in range and loop-free.

        Duplicates (in either orientation) are collapsed.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.size == 0:
            return empty_graph(n)
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        keys = np.unique(src * n + dst)
        src, dst = np.divmod(keys, n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst)

    @property
    def n(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return int(self._indices.size // 2)

    @property
    def indptr(self) -> np.ndarray:
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self._indices[self._indptr[v] : self._indptr[v + 1]]

    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self._n)]

    def edges(self) -> np.ndarray:
        """Edge array of shape (m, 2) with ``u < v``, sorted lexicographically."""
        src = np.repeat(np.arange(self._n, dtype=np.int64), self.degrees)
        dst = self._indices.astype(np.int64)
        keep = src < dst
        return np.stack([src[keep], dst[keep]], axis=1)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._indptr, other._indptr)
            and np.array_equal(self._indices, other._indices)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self._n}, m={self.num_edges})"


def empty_graph(n: int) -> Graph:
    if n < 0:
        raise GraphError(f"node count must be non-negative, got {n}")
    return Graph(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32))


def build_graph(n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
    """Validate an edge list and return the canonical Graph.

    Duplicate edges are collapsed silently; self-loops and ids outside
    ``[0, n)`` raise GraphError.
    """
    if n < 0:
        raise GraphError(f"node count must be non-negative, got {n}")
    arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
    if arr.size == 0:
        return empty_graph(n)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GraphError("edges must be a sequence of (u, v) pairs")
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        row = int(np.argmax(bad.any(axis=1)))
        raise GraphError(f"edge {tuple(arr[row].tolist())} has an id outside [0, {n})")
    loops = arr[:, 0] == arr[:, 1]
    if loops.any():
        row = int(np.argmax(loops))
        raise GraphError(f"self-loop on node {int(arr[row, 0])} is not allowed")
    return Graph.from_pairs(n, arr[:, 0], arr[:, 1])


def _as_members(G: Graph, S) -> np.ndarray:
    if isinstance(S, np.ndarray):
        members = np.unique(S.astype(np.int64, copy=False))
    else:
        members = np.unique(np.fromiter((int(s) for s in S), dtype=np.int64))
    if members.size and (members[0] < 0 or members[-1] >= G.n):
        raise GraphError(f"node set has members outside [0, {G.n})")
    return members


def _member_mask(G: Graph, S) -> np.ndarray:
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (G.n,):
            raise GraphError("boolean membership mask must have length n")
        return S
    mask = np.zeros(G.n, dtype=bool)
    mask[_as_members(G, S)] = True
    return mask


def undominated_nodes(G: Graph, S) -> np.ndarray:
    """Nodes that are neither in S nor adjacent to a member of S."""
    mask = _member_mask(G, S)
    covered = mask.copy()
    src = np.repeat(mask, G.degrees)
    covered[G.indices[src]] = True
    return np.flatnonzero(~covered)


def is_dominating_set(G: Graph, S) -> bool:
    """True iff every node outside S has at least one neighbor in S."""
    return undominated_nodes(G, S).size == 0


def induced_subgraph(G: Graph, nodes) -> tuple[Graph, np.ndarray]:
    """Subgraph induced by ``nodes``; returns it with the new-id -> old-id map."""
    keep = _as_members(G, nodes)
    relabel = np.full(G.n, -1, dtype=np.int64)
    relabel[keep] = np.arange(keep.size)
    src = np.repeat(np.arange(G.n), G.degrees)
    dst = G.indices.astype(np.int64)
    sel = (relabel[src] >= 0) & (relabel[dst] >= 0) & (src < dst)
    sub = Graph.from_pairs(int(keep.size), relabel[src[sel]], relabel[dst[sel]])
    return sub, keep


def k_core(G: Graph, k: int) -> tuple[Graph, np.ndarray]:
    """Largest induced subgraph with minimum degree at least k.

    Nodes whose degree drops below k are queued once and peeled; each
    adjacency slice is touched once, so the work is O(n + m). Returns the
    core with surviving ids relabeled to ``0 .. n'-1`` plus the map back to
    the original ids (ascending).
    """
    if k < 0:
        raise GraphError(f"k must be non-negative, got {k}")
    deg = G.degrees.copy()
    removed = deg < k
    stack = np.flatnonzero(removed).tolist()
    indptr, indices = G.indptr, G.indices
    while stack:
        v = stack.pop()
        nbrs = indices[indptr[v] : indptr[v + 1]]
        live = nbrs[~removed[nbrs]]
        if live.size == 0:
            continue
        deg[live] -= 1
        dropped = live[deg[live] < k]
        if dropped.size:
            removed[dropped] = True
            stack.extend(dropped.tolist())
    return induced_subgraph(G, np.flatnonzero(~removed))


def core_numbers(G: Graph) -> np.ndarray:
    """Core number of every node (bucket-sort peeling, Batagelj-Zaversnik)."""
    n = G.n
    deg = G.degrees.tolist()
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    max_deg = max(deg)
    bin_start = [0] * (max_deg + 1)
    for d in deg:
        bin_start[d] += 1
    start = 0
    for d in range(max_deg + 1):
        count = bin_start[d]
        bin_start[d] = start
        start += count
    pos = [0] * n
    order = [0] * n
    for v in range(n):
        pos[v] = bin_start[deg[v]]
        order[pos[v]] = v
        bin_start[deg[v]] += 1
    for d in range(max_deg, 0, -1):
        bin_start[d] = bin_start[d - 1]
    bin_start[0] = 0
    adj = G.adjacency()
    for i in range(n):
        v = order[i]
        for u in adj[v]:
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_start[du]
                w = order[pw]
                if u != w:
                    pos[u], pos[w] = pw, pu
                    order[pu], order[pw] = w, u
                bin_start[du] += 1
                deg[u] -= 1
    return np.asarray(deg, dtype=np.int64)


def min_degree(G: Graph) -> int:
    if G.n == 0:
        raise GraphError("minimum degree of the empty graph is undefined")
    return int(G.degrees.min())


def max_degree(G: Graph) -> int:
    if G.n == 0:
        raise GraphError("maximum degree of the empty graph is undefined")
    return int(G.degrees.max())


def exact_domination_number(G: Graph, budget: int = DEFAULT_EXACT_BUDGET) -> int:
    """Domination number by branch and bound over closed neighborhoods.

    Some member of N[v] must be chosen for every uncovered v, so we branch
    on the uncovered node with the fewest dominators and try its candidates
    in order of decreasing coverage gain. A branch is cut when
    ``size + ceil(uncovered / (max_degree + 1))`` cannot beat the incumbent.
    """
    n = G.n
    if n > budget:
        raise BudgetExceededError(f"exact search refused: n={n} exceeds budget {budget}")
    if n == 0:
        return 0
    closed = [(1 << v) | sum(1 << int(u) for u in G.neighbors(v)) for v in range(n)]
    reach = int(G.degrees.max()) + 1
    full = (1 << n) - 1
    dominators = [[w for w in range(n) if closed[w] >> v & 1] for v in range(n)]
    best = _greedy_mask_bound(closed, full)

    def search(covered: int, size: int) -> None:
        nonlocal best
        if covered == full:
            best = min(best, size)
            return
        uncovered = full & ~covered
        if size + -(-uncovered.bit_count() // reach) >= best:
            return
        pivot = min(
            (v for v in range(n) if uncovered >> v & 1),
            key=lambda v: len(dominators[v]),
        )
        cands = sorted(dominators[pivot], key=lambda w: (-(closed[w] & uncovered).bit_count(), w))
        for w in cands:
            search(covered | closed[w], size + 1)

    search(0, 0)
    return best


def _greedy_mask_bound(closed: list[int], full: int) -> int:
    # Incumbent for the branch and bound; one more than any greedy cover size
    # would also work but a tight start prunes far more.
    covered, size = 0, 0
    heap = [(-c.bit_count(), w) for w, c in enumerate(closed)]
    heapq.heapify(heap)
    while covered != full:
        neg, w = heapq.heappop(heap)
        gain = (closed[w] & ~covered).bit_count()
        if gain == -neg:
            covered |= closed[w]
            size += 1
        elif gain:
            heapq.heappush(heap, (-gain, w))
    return size

