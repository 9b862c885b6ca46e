"""Dominating-set heuristics and constructive upper bounds.

Every algorithm returns a DominationResult whose ``verified`` flag is
computed independently with is_dominating_set, never assumed.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from domlab.errors import ParameterError
from domlab.graph import Graph, is_dominating_set, undominated_nodes
from domlab.mgeop import MgeopInstance
from domlab.rgg import RggInstance

__all__ = [
    "DominationResult",
    "ALGORITHMS",
    "ds_dc",
    "greedy",
    "random_baseline",
    "oldest_prefix",
    "oldest_prefix_size",
    "cell_tessellation_set",
    "minimalize",
    "is_minimal",
    "run_algorithm",
]


@dataclass(frozen=True, eq=False)
class DominationResult:
    members: np.ndarray = field(repr=False)
    algorithm: str
    verified: bool
    elapsed: float
    seed: int | None = None

    @property
    def size(self) -> int:
        return int(self.members.size)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "size": self.size,
            "verified": self.verified,
            "elapsed_ms": self.elapsed * 1000.0,
            "seed": self.seed,
        }


def _result(G: Graph, mask: np.ndarray, algorithm: str, started: float, seed=None) -> DominationResult:
    elapsed = time.perf_counter() - started
    members = np.flatnonzero(mask)
    members.flags.writeable = False
    return DominationResult(members, algorithm, is_dominating_set(G, mask), elapsed, seed)


def _tie_ranks(n: int, seed: int) -> np.ndarray:
    """Position of each node in a seeded shuffle; used as the tie-break key."""
    ranks = np.empty(n, dtype=np.int64)
    ranks[np.random.default_rng(seed).permutation(n)] = np.arange(n)
    return ranks


def _ascending_degree_order(G: Graph, seed: int) -> np.ndarray:
    ids = np.arange(G.n)
    return np.lexsort((ids, _tie_ranks(G.n, seed), G.degrees))


def minimalize(G: Graph, in_set: np.ndarray, order) -> np.ndarray:
    """Single removal pass over ``order`` keeping the set dominating.

    ``cover[w]`` counts members of the closed neighborhood N[w]. A member u
    can leave iff every w in N[u] keeps at least one other dominator, i.e.
    ``cover[w] >= 2`` throughout N[u]. ``in_set`` is modified in place.
    """
    indptr, indices = G.indptr, G.indices
    cover = in_set.astype(np.int64)
    src = np.repeat(in_set, G.degrees)
    np.add.at(cover, indices[src], 1)
    for u in order:
        if not in_set[u]:
            continue
        nbrs = indices[indptr[u] : indptr[u + 1]]
        if cover[u] >= 2 and (nbrs.size == 0 or cover[nbrs].min() >= 2):
            in_set[u] = False
            cover[u] -= 1
            cover[nbrs] -= 1
    return in_set


def _dynamic_minimalize(G: Graph, in_set: np.ndarray, tie: np.ndarray) -> np.ndarray:
    # Visit each member once, always choosing the unvisited member with the
    # fewest neighbors still in the set.
    indptr, indices = G.indptr, G.indices
    cover = in_set.astype(np.int64)
    np.add.at(cover, indices[np.repeat(in_set, G.degrees)], 1)
    inner = cover - 1  # neighbors in the set, valid for members
    heap = [(int(inner[u]), int(tie[u]), int(u)) for u in np.flatnonzero(in_set)]
    heapq.heapify(heap)
    visited = np.zeros(G.n, dtype=bool)
    while heap:
        d, _, u = heapq.heappop(heap)
        if visited[u]:
            continue
        if d != inner[u]:
            heapq.heappush(heap, (int(inner[u]), int(tie[u]), u))
            continue
        visited[u] = True
        nbrs = indices[indptr[u] : indptr[u + 1]]
        if cover[u] >= 2 and (nbrs.size == 0 or cover[nbrs].min() >= 2):
            in_set[u] = False
            cover[u] -= 1
            cover[nbrs] -= 1
            inner[nbrs] -= 1
    return in_set


def ds_dc(G: Graph, tie_seed: int = 0, dynamic_order: bool = False) -> DominationResult:
    """Start from all nodes; drop nodes in ascending degree order while the set stays dominating.

    Degrees are those of the input graph and each node is visited once.
    Ties are broken by a shuffle seeded with ``tie_seed``, then by id. With
    ``dynamic_order=True`` the next node is instead the unvisited member with
    the fewest neighbors remaining in the set. Either way the output is a
    minimal dominating set.
    """
    started = time.perf_counter()
    in_set = np.ones(G.n, dtype=bool)
    if dynamic_order:
        _dynamic_minimalize(G, in_set, _tie_ranks(G.n, tie_seed))
        label = "ds_dc_dynamic"
    else:
        minimalize(G, in_set, _ascending_degree_order(G, tie_seed))
        label = "ds_dc"
    return _result(G, in_set, label, started, tie_seed)


def greedy(G: Graph, tie_seed: int = 0) -> DominationResult:
    """Repeatedly take the node whose closed neighborhood covers the most uncovered nodes.

    Gains only shrink, so a lazy max-heap keyed by (gain, shuffle position)
    is exact.
    """
    started = time.perf_counter()
    n = G.n
    indptr, indices = G.indptr, G.indices
    tie = _tie_ranks(n, tie_seed)
    covered = np.zeros(n, dtype=bool)
    in_set = np.zeros(n, dtype=bool)
    heap = [(-(int(d) + 1), int(tie[v]), v) for v, d in enumerate(G.degrees)]
    heapq.heapify(heap)
    remaining = n
    while remaining:
        neg, t, v = heapq.heappop(heap)
        nbrs = indices[indptr[v] : indptr[v + 1]]
        gain = int(not covered[v]) + int(np.count_nonzero(~covered[nbrs]))
        if gain != -neg:
            if gain:
                heapq.heappush(heap, (-gain, t, v))
            continue
        in_set[v] = True
        covered[v] = True
        covered[nbrs] = True
        remaining -= gain
    return _result(G, in_set, "greedy", started, tie_seed)


def random_baseline(G: Graph, seed: int = 0) -> DominationResult:
    """Add nodes in a seeded random order until dominating, then one minimalization pass."""
    started = time.perf_counter()
    n = G.n
    indptr, indices = G.indptr, G.indices
    perm = np.random.default_rng(seed).permutation(n)
    covered = np.zeros(n, dtype=bool)
    in_set = np.zeros(n, dtype=bool)
    remaining = n
    for v in perm:
        if not remaining:
            break
        in_set[v] = True
        nbrs = indices[indptr[v] : indptr[v + 1]]
        fresh = int(not covered[v]) + int(np.count_nonzero(~covered[nbrs]))
        covered[v] = True
        covered[nbrs] = True
        remaining -= fresh
    minimalize(G, in_set, _ascending_degree_order(G, seed))
    return _result(G, in_set, "random", started, seed)


def oldest_prefix_size(n: int, alpha: float, beta: float, K: float) -> int:
    """``floor(K n^(alpha+beta) ln n)``."""
    return math.floor(K * n ** (alpha + beta) * math.log(n))


def oldest_prefix(instance: MgeopInstance, K: float, repair: bool = False) -> DominationResult:
    """The first ``floor(K n^(alpha+beta) ln n)`` arrivals as a candidate dominating set.

    Domination is only likely once ``K > (1 - alpha) / p``; the result
    reports whether it dominates and never fixes it up unless ``repair`` is
    set, in which case every undominated node is appended.
    """
    if not K > 0:
        raise ParameterError(f"K must be positive (got {K})")
    started = time.perf_counter()
    prm = instance.params
    G = instance.graph
    t = oldest_prefix_size(prm.n, prm.alpha, prm.beta, K)
    if t > prm.n:
        raise ParameterError(f"prefix size t={t} exceeds n={prm.n}; K={K} is too large")
    in_set = np.zeros(G.n, dtype=bool)
    in_set[:t] = True
    label = "oldest_prefix"
    if repair:
        in_set[undominated_nodes(G, in_set)] = True
        label = "oldest_prefix_repaired"
    return _result(G, in_set, label, started)


def cell_tessellation_set(instance: RggInstance) -> DominationResult:
    """Lowest-id node from each nonempty square cell of side ``r / sqrt(2)``.

    Any two points in one cell are within distance r, so the chosen nodes
    dominate. Cells in the last row and column are truncated by the square.
    """
    r = instance.r
    if not r > 0:
        raise ParameterError("cell tessellation needs r > 0")
    started = time.perf_counter()
    side = r / math.sqrt(2)
    cells_per_axis = math.ceil(1 / side)
    cell = np.minimum((instance.positions / side).astype(np.int64), cells_per_axis - 1)
    key = cell[:, 0] * cells_per_axis + cell[:, 1]
    # np.unique returns the first occurrence, i.e. the lowest id, per cell
    _, first = np.unique(key, return_index=True)
    in_set = np.zeros(instance.graph.n, dtype=bool)
    in_set[first] = True
    return _result(instance.graph, in_set, "cell", started)


def is_minimal(G: Graph, members) -> bool:
    """Naive check: no single member can be dropped without losing domination."""
    members = [int(v) for v in members]
    if not is_dominating_set(G, members):
        return False
    mask = np.zeros(G.n, dtype=bool)
    mask[members] = True
    for u in members:
        mask[u] = False
        if is_dominating_set(G, mask):
            return False
        mask[u] = True
    return True


ALGORITHMS = ("ds_dc", "ds_dc_dynamic", "greedy", "random")


def run_algorithm(name: str, G: Graph, seed: int = 0) -> DominationResult:
    """Dispatch by label for the graph-only algorithms."""
    if name == "ds_dc":
        return ds_dc(G, seed)
    if name == "ds_dc_dynamic":
        return ds_dc(G, seed, dynamic_order=True)
    if name == "greedy":
        return greedy(G, seed)
    if name == "random":
        return random_baseline(G, seed)
    raise ParameterError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
