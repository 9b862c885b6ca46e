"""MGEO-P graph generation and the closed-form domination bounds for it.

Nodes arrive one at a time (node id == arrival step). Each gets a uniform
position on the m-dimensional unit torus and a rank from a uniform random
permutation of ``1..n``. An arriving node i may attach to every older node u
whose influence ball contains it, i.e. ``torus_distance(q_i, q_u) <= I(r_u)``,
each such pair independently with probability p.

Randomness is split so that generation is schedule-independent:

* positions and ranks come from two children of ``SeedSequence(seed)``;
* the coin for pair (i, u) is a counter-based hash of ``(seed, i, u)``.

The brute-force and the tree-accelerated candidate scans therefore produce
identical edge sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from domlab.errors import ParameterError
from domlab.graph import Graph

__all__ = [
    "MgeopParams",
    "MgeopInstance",
    "torus_distance",
    "torus_distances",
    "influence_radius",
    "influence_radii",
    "sample_positions",
    "sample_ranks",
    "pair_uniforms",
    "generate",
    "theorem1_upper",
    "theorem1_lower",
    "degree_bound",
    "rank_sum_check",
    "lemma1_sum_check",
    "lemma1_min_t",
]

_U64_MAX = 2**64 - 1
_BRUTE_FORCE_MAX_N = 2000
_TREE_MAX_DIM = 4


@dataclass(frozen=True)
class MgeopParams:
    n: int
    m: int
    alpha: float
    beta: float
    p: float
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ParameterError(f"n must be an integer >= 1 (got n={self.n})")
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ParameterError(f"m must be an integer >= 1 (got m={self.m})")
        if not 0 < self.alpha < 1:
            raise ParameterError(f"alpha must satisfy 0 < alpha < 1 (got alpha={self.alpha})")
        if not 0 < self.beta < 1 - self.alpha:
            raise ParameterError(
                f"beta must satisfy 0 < beta < 1 - alpha "
                f"(got beta={self.beta}, 1 - alpha={1 - self.alpha:g})"
            )
        if not 0 < self.p <= 1:
            raise ParameterError(f"p must satisfy 0 < p <= 1 (got p={self.p})")
        if not 0 <= self.seed <= _U64_MAX:
            raise ParameterError(f"seed must fit in 64 unsigned bits (got {self.seed})")

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "m": int(self.m),
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "p": float(self.p),
            "seed": int(self.seed),
        }


@dataclass(frozen=True, eq=False)
class MgeopInstance:
    """A generated graph together with the positions and ranks behind it."""

    params: MgeopParams
    graph: Graph
    positions: np.ndarray = field(repr=False)
    ranks: np.ndarray = field(repr=False)

    @property
    def arrival(self) -> np.ndarray:
        # ids are arrival order by construction
        return np.arange(self.params.n)

    @property
    def radii(self) -> np.ndarray:
        return influence_radii(self.ranks, self.params)


def torus_distance(q1, q2) -> float:
    """Infinity-norm distance on the unit torus ``[0, 1)^m``.

    Equal to ``min ||q1 - q2 - z||_inf`` over ``z in {-1, 0, 1}^m``; computed
    per coordinate as ``min(|d|, 1 - |d|)``.
    """
    a = np.atleast_1d(np.asarray(q1, dtype=float))
    b = np.atleast_1d(np.asarray(q2, dtype=float))
    if a.shape != b.shape:
        raise ParameterError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(torus_distances(a, b[None, :])[0])


def torus_distances(q: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Torus distance from point ``q`` to every row of ``points``."""
    d = np.abs(points - q)
    return np.minimum(d, 1.0 - d).max(axis=-1)


def influence_radius(rank: int, params: MgeopParams) -> float:
    """``0.5 * (rank^-alpha * n^-beta)^(1/m)``: half the side of the influence ball."""
    if not 1 <= rank <= params.n:
        raise ParameterError(f"rank must lie in [1, {params.n}] (got {rank})")
    return 0.5 * (rank ** -params.alpha * params.n ** -params.beta) ** (1.0 / params.m)


def influence_radii(ranks: np.ndarray, params: MgeopParams) -> np.ndarray:
    ranks = np.asarray(ranks, dtype=float)
    return 0.5 * (ranks ** -params.alpha * float(params.n) ** -params.beta) ** (1.0 / params.m)


def _streams(params: MgeopParams) -> tuple[np.random.Generator, np.random.Generator]:
    pos_seq, rank_seq = np.random.SeedSequence(params.seed).spawn(2)
    return np.random.default_rng(pos_seq), np.random.default_rng(rank_seq)


def sample_positions(params: MgeopParams) -> np.ndarray:
    return _streams(params)[0].random((params.n, params.m))


def sample_ranks(params: MgeopParams) -> np.ndarray:
    """Ranks exactly as generate() assigns them (a permutation of 1..n)."""
    return _streams(params)[1].permutation(params.n).astype(np.int64) + 1


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SALT = np.uint64(0xD1B54A32D192ED03)


def _splitmix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def pair_uniforms(seed: int, i, u) -> np.ndarray:
    """Uniform [0, 1) draws keyed by ``(seed, i, u)``; pure function of its inputs."""
    with np.errstate(over="ignore"):
        i = np.atleast_1d(np.asarray(i)).astype(np.uint64)
        u = np.atleast_1d(np.asarray(u)).astype(np.uint64)
        h = _splitmix(np.full(i.shape, seed, dtype=np.uint64) ^ _SALT)
        h = _splitmix(h + (i + np.uint64(1)) * _GOLDEN)
        h = _splitmix(h + (u + np.uint64(1)) * _GOLDEN)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)


def _candidates_brute(positions: np.ndarray, radii: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    young, old = [], []
    for i in range(1, positions.shape[0]):
        d = torus_distances(positions[i], positions[:i])
        hit = np.flatnonzero(d <= radii[:i])
        if hit.size:
            young.append(np.full(hit.size, i, dtype=np.int64))
            old.append(hit)
    if not young:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(young), np.concatenate(old)


def _candidates_tree(positions: np.ndarray, radii: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Inflated query radius, then the exact filter shared with the brute path.
    tree = cKDTree(positions, boxsize=1.0)
    hits = tree.query_ball_point(positions, r=radii * (1 + 1e-9) + 1e-15, p=np.inf)
    counts = np.fromiter((len(h) for h in hits), dtype=np.int64, count=len(hits))
    if counts.sum() == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    old = np.repeat(np.arange(len(hits), dtype=np.int64), counts)
    young = np.fromiter((j for h in hits for j in h), dtype=np.int64, count=int(counts.sum()))
    keep = young > old
    old, young = old[keep], young[keep]
    d = np.abs(positions[young] - positions[old])
    d = np.minimum(d, 1.0 - d).max(axis=1)
    keep = d <= radii[old]
    order = np.lexsort((old[keep], young[keep]))
    return young[keep][order], old[keep][order]


def generate(params: MgeopParams, method: str = "auto") -> MgeopInstance:
    """Sample one MGEO-P graph.

    ``method`` selects the candidate scan: ``"brute"`` checks every older
    node, ``"tree"`` uses a periodic k-d tree in the infinity norm, and
    ``"auto"`` picks the tree for ``m <= 4`` and larger n. All choices yield
    the same graph for the same params.
    """
    if method not in ("auto", "brute", "tree"):
        raise ParameterError(f"unknown candidate scan method {method!r}")
    positions = sample_positions(params)
    ranks = sample_ranks(params)
    radii = influence_radii(ranks, params)
    if method == "auto":
        method = "tree" if params.m <= _TREE_MAX_DIM and params.n > _BRUTE_FORCE_MAX_N else "brute"
    scan = _candidates_tree if method == "tree" else _candidates_brute
    young, old = scan(positions, radii)
    if params.p < 1:
        keep = pair_uniforms(params.seed, young, old) < params.p
        young, old = young[keep], old[keep]
    graph = Graph.from_pairs(params.n, young, old)
    positions.flags.writeable = False
    ranks.flags.writeable = False
    return MgeopInstance(params=params, graph=graph, positions=positions, ranks=ranks)


def theorem1_upper(n: float, alpha: float, beta: float) -> float:
    """Upper-bound curve ``n^(alpha+beta) * ln n`` with unit constant."""
    if n < 2:
        raise ParameterError(f"n must be >= 2 for the log curve (got {n})")
    return float(n) ** (alpha + beta) * math.log(n)


def theorem1_lower(n: float, m: int, alpha: float, beta: float, C: float) -> float:
    """Lower-bound curve ``C^(-m/(1-alpha)) * n^(alpha+beta)``; needs ``C > 6``."""
    if not C > 6:
        raise ParameterError(f"C must be greater than 6 (got C={C})")
    return C ** (-m / (1 - alpha)) * float(n) ** (alpha + beta)


def degree_bound(n: float, delta: float) -> float:
    """``n (1 + ln(delta + 1)) / (delta + 1)``, valid for any graph of min degree delta."""
    if delta < 0:
        raise ParameterError(f"minimum degree must be non-negative (got {delta})")
    return n * (1 + math.log(delta + 1)) / (delta + 1)


def lemma1_min_t(n: int, alpha: float) -> float:
    """Smallest t accepted by the rank-sum check: ``n^alpha * ln n``."""
    return n ** alpha * math.log(max(n, 2))


@dataclass(frozen=True)
class RankSumCheck:
    empirical: float
    predicted: float
    deviation: float


def rank_sum_check(ranks: np.ndarray, t: int, alpha: float) -> RankSumCheck:
    """Compare ``sum of rank^-alpha`` over the first t arrivals to ``t n^-alpha / (1-alpha)``."""
    ranks = np.asarray(ranks)
    n = ranks.size
    if not lemma1_min_t(n, alpha) <= t <= n:
        raise ParameterError(
            f"t must lie in [n^alpha ln n, n] = [{lemma1_min_t(n, alpha):.1f}, {n}] (got t={t})"
        )
    empirical = float(np.sum(ranks[:t].astype(float) ** -alpha))
    predicted = t * n ** -alpha / (1 - alpha)
    return RankSumCheck(empirical, predicted, abs(empirical / predicted - 1))


def lemma1_sum_check(instance: MgeopInstance, t: int) -> RankSumCheck:
    return rank_sum_check(instance.ranks, t, instance.params.alpha)
