"""Random geometric graphs on the unit square and the disc-covering geometry
used to predict their domination number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from domlab.errors import GraphError, ParameterError
from domlab.graph import Graph, max_degree

__all__ = [
    "RggParams",
    "RggInstance",
    "HexLattice",
    "RegimeThresholds",
    "Theorem2Prediction",
    "generate_rgg",
    "rgg_from_positions",
    "sample_rgg_positions",
    "classify_regime",
    "hex_lattice",
    "best_hex_lattice",
    "covering_number_upper",
    "covers_unit_square",
    "kershner_constant",
    "theorem2_prediction",
    "max_degree_lower_bound",
]

_U64_MAX = 2**64 - 1
_BRUTE_FORCE_MAX_N = 1500
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class RggParams:
    n: int
    r: float
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ParameterError(f"n must be an integer >= 1 (got n={self.n})")
        if not self.r >= 0:
            raise ParameterError(f"r must be non-negative (got r={self.r})")
        if not 0 <= self.seed <= _U64_MAX:
            raise ParameterError(f"seed must fit in 64 unsigned bits (got {self.seed})")

    def to_dict(self) -> dict:
        return {"n": int(self.n), "r": float(self.r), "seed": int(self.seed)}


@dataclass(frozen=True, eq=False)
class RggInstance:
    params: RggParams
    graph: Graph
    positions: np.ndarray = field(repr=False)

    @property
    def r(self) -> float:
        return self.params.r


def _within(positions: np.ndarray, a: np.ndarray, b: np.ndarray, r: float) -> np.ndarray:
    d = positions[a] - positions[b]
    return np.einsum("ij,ij->i", d, d) <= r * r


def _pairs_brute(positions: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.triu_indices(positions.shape[0], k=1)
    keep = _within(positions, a, b, r)
    return a[keep], b[keep]


def _pairs_tree(positions: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    tree = cKDTree(positions)
    pairs = tree.query_pairs(r * (1 + 1e-9) + 1e-15, output_type="ndarray")
    if pairs.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    keep = _within(positions, pairs[:, 0], pairs[:, 1], r)
    return pairs[keep, 0], pairs[keep, 1]


def sample_rgg_positions(params: RggParams) -> np.ndarray:
    """Node positions exactly as generate_rgg() draws them."""
    return np.random.default_rng(np.random.SeedSequence(params.seed)).random((params.n, 2))


def generate_rgg(params: RggParams, method: str = "auto") -> RggInstance:
    """Sample G(n, r): n uniform points in the unit square, edges at distance <= r.

    The edge rule depends only on positions, so the brute-force and the
    k-d tree scans give the same graph.
    """
    if method not in ("auto", "brute", "tree"):
        raise ParameterError(f"unknown pair scan method {method!r}")
    positions = sample_rgg_positions(params)
    positions.flags.writeable = False
    return RggInstance(params, rgg_from_positions(positions, params.r, method), positions)


def rgg_from_positions(positions: np.ndarray, r: float, method: str = "auto") -> Graph:
    positions = np.asarray(positions, dtype=float)
    n = positions.shape[0]
    if method == "auto":
        method = "brute" if n <= _BRUTE_FORCE_MAX_N else "tree"
    if r == 0 or n < 2:
        a = b = np.zeros(0, np.int64)
    elif method == "brute":
        a, b = _pairs_brute(positions, r)
    else:
        a, b = _pairs_tree(positions, r)
    return Graph.from_pairs(n, a, b)


def kershner_constant() -> float:
    """``2 pi sqrt(3) / 9``: limiting density of the thinnest disc covering."""
    return 2 * math.pi * math.sqrt(3) / 9


@dataclass(frozen=True, eq=False)
class HexLattice:
    eps: float
    offset: tuple[float, float]
    points: np.ndarray = field(repr=False)

    def __len__(self):
        return self.points.shape[0]


def hex_lattice(eps: float, offset: tuple[float, float] = (0.0, 0.0)) -> HexLattice:
    """Points of ``{i eps (sqrt3, 0) + j eps (sqrt3/2, 3/2)} + offset`` whose
    radius-eps discs meet the interior of the unit square.

    The Voronoi cells of this lattice are regular hexagons of circumradius
    eps, so the returned discs cover ``[0, 1]^2``.
    """
    if not eps > 0:
        raise ParameterError(f"eps must be positive (got {eps})")
    ox, oy = offset
    s3 = math.sqrt(3.0)
    j_lo = math.floor((-eps - oy) / (1.5 * eps)) - 1
    j_hi = math.ceil((1 + eps - oy) / (1.5 * eps)) + 1
    js = np.arange(j_lo, j_hi + 1)
    # x = s3 eps (i + j/2) + ox must reach [-eps, 1 + eps]
    i_lo = math.floor((-eps - ox) / (s3 * eps) - js.max() / 2) - 1
    i_hi = math.ceil((1 + eps - ox) / (s3 * eps) - js.min() / 2) + 1
    I, J = np.meshgrid(np.arange(i_lo, i_hi + 1), js, indexing="ij")
    x = s3 * eps * (I + J / 2) + ox
    y = 1.5 * eps * J + oy
    dx = np.maximum(np.maximum(-x, x - 1), 0)
    dy = np.maximum(np.maximum(-y, y - 1), 0)
    # Discs that only touch the square (up to rounding) cover nothing of it.
    keep = dx * dx + dy * dy < eps * eps * (1 - 1e-9)
    pts = np.stack([x[keep], y[keep]], axis=1)
    pts = pts[np.lexsort((pts[:, 0], pts[:, 1]))]
    pts.flags.writeable = False
    return HexLattice(float(eps), (float(ox), float(oy)), pts)


def _cell_offsets(eps: float) -> list[tuple[float, float]]:
    a = np.array([math.sqrt(3) * eps, 0.0])
    b = np.array([math.sqrt(3) / 2 * eps, 1.5 * eps])
    return [tuple((s / 3) * a + (t / 3) * b) for s in range(3) for t in range(3)]


def best_hex_lattice(eps: float) -> HexLattice:
    """The smallest of 9 translated hexagonal lattices whose discs cover the unit square.

    Translations run over a 3x3 sub-grid of one fundamental cell. Once
    ``eps >= 1/sqrt(2)`` a single disc at (1/2, 1/2) is returned instead.
    """
    if not eps > 0:
        raise ParameterError(f"eps must be positive (got {eps})")
    if eps >= 1 / SQRT2:
        pts = np.array([[0.5, 0.5]])
        pts.flags.writeable = False
        return HexLattice(float(eps), (0.5, 0.5), pts)
    return min((hex_lattice(eps, off) for off in _cell_offsets(eps)), key=len)


def covering_number_upper(eps: float) -> int:
    """Constructive upper bound on the number of radius-eps discs covering the unit square.

    Size of best_hex_lattice(eps): the fewest lattice discs meeting the
    square over 9 translations, or 1 once ``eps >= 1/sqrt(2)``.
    """
    return len(best_hex_lattice(eps))


def covers_unit_square(centers: np.ndarray, eps: float, spacing: float, chunk: int = 1 << 20) -> bool:
    """Grid-sampled check that radius-eps discs at ``centers`` cover ``[0, 1]^2``.

    Every point of a grid with the given spacing (both edges included) must
    lie within eps of some center, up to a 1e-9 relative slack for the
    hexagon vertices that sit exactly at distance eps.
    """
    ticks = np.linspace(0.0, 1.0, int(math.ceil(1 / spacing)) + 1)
    tree = cKDTree(np.asarray(centers, dtype=float))
    limit = eps * (1 + 1e-9)
    rows_per_chunk = max(1, chunk // ticks.size)
    for start in range(0, ticks.size, rows_per_chunk):
        ys = ticks[start : start + rows_per_chunk]
        X, Y = np.meshgrid(ticks, ys)
        dist, _ = tree.query(np.column_stack([X.ravel(), Y.ravel()]), k=1)
        if dist.max() > limit:
            return False
    return True


@dataclass(frozen=True)
class RegimeThresholds:
    """Finite-n stand-ins for the asymptotic regime boundaries.

    ``omega(n) = ln ln max(n, 27)`` plays the role of the slowly growing
    function; ``upper_r`` separates the r = o(1) and r = Theta(1) regimes.
    ``c_low``/``c_high`` are the constants used for the Theta(r^-2) regime
    and ``d_low`` is the lower fraction of n used for the Theta(n) regime.
    """

    upper_r: float = 0.1
    c_low: float = 0.25
    c_high: float = 2.0
    d_low: float = 0.25

    @staticmethod
    def omega(n: int) -> float:
        return math.log(math.log(max(n, 27)))


@dataclass(frozen=True)
class Theorem2Prediction:
    regime: str
    low: float
    high: float
    point: float | None = None

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


def classify_regime(n: int, r: float, thresholds: RegimeThresholds = RegimeThresholds()) -> str:
    if n < 1 or r < 0:
        raise ParameterError(f"need n >= 1 and r >= 0 (got n={n}, r={r})")
    if r < 1 / math.sqrt(n):
        return "d"
    if r < math.sqrt(math.log(n) / n) * thresholds.omega(n):
        return "c"
    if r <= thresholds.upper_r:
        return "b"
    return "a"


def theorem2_prediction(
    n: int, r: float, thresholds: RegimeThresholds = RegimeThresholds()
) -> Theorem2Prediction:
    """Regime label and predicted domination number (point or interval) for G(n, r)."""
    regime = classify_regime(n, r, thresholds)
    if regime == "d":
        return Theorem2Prediction("d", thresholds.d_low * n, float(n))
    if regime == "c":
        return Theorem2Prediction("c", thresholds.c_low / r**2, thresholds.c_high / r**2)
    if regime == "b":
        point = kershner_constant() / math.pi / r**2
        return Theorem2Prediction("b", point, point, point)
    omega = thresholds.omega(n)
    low = covering_number_upper(r + math.sqrt(omega * math.log(n) / n))
    shrunk = r - omega / math.sqrt(n)
    high = covering_number_upper(shrunk) if shrunk > 0 else n
    return Theorem2Prediction("a", float(low), float(high))


def max_degree_lower_bound(G: Graph) -> float:
    """``n / (1 + max degree)``: no node dominates more than its closed neighborhood."""
    if G.n == 0:
        raise GraphError("lower bound undefined for the empty graph")
    return G.n / (1 + max_degree(G))
