import itertools

import numpy as np
import pytest

from domlab.graph import Graph, build_graph
from domlab.mgeop import MgeopParams, generate
from domlab.rgg import RggParams, generate_rgg

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def star_graph(leaves: int) -> Graph:
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def er_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return build_graph(n, pairs)


def brute_force_gamma(G: Graph) -> int:
    """Smallest k such that some k-subset dominates, by plain enumeration."""
    closed = [{v, *G.neighbors(v).tolist()} for v in range(G.n)]
    everything = set(range(G.n))
    for k in range(G.n + 1):
        for subset in itertools.combinations(range(G.n), k):
            covered = set().union(*(closed[v] for v in subset)) if subset else set()
            if covered == everything:
                return k
    raise AssertionError("unreachable")


def small_corpus(count_per_family: int = 100, seed: int = 2024, max_n: int = 14):
    """(label, graph) pairs: ER, RGG and MGEO-P graphs with n <= max_n."""
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count_per_family):
        n = int(rng.integers(1, max_n + 1))
        p = (0.1, 0.3, 0.5)[i % 3]
        corpus.append((f"er(n={n},p={p})", er_graph(n, p, rng)))
    for i in range(count_per_family):
        n = int(rng.integers(1, max_n + 1))
        r = (0.2, 0.4)[i % 2]
        inst = generate_rgg(RggParams(n, r, int(rng.integers(2**63))))
        corpus.append((f"rgg(n={n},r={r})", inst.graph))
    for i in range(count_per_family):
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, 3))
        prm = MgeopParams(n, m, 0.5, 0.25, 0.8, int(rng.integers(2**63)))
        corpus.append((f"mgeop(n={n},m={m})", generate(prm).graph))
    return corpus


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()


@pytest.fixture(scope="session")
def rgg_regime_b_runs():
    """ds_dc and cell-tessellation results on G(5e4, 0.05) for seeds 0..19.

    Only summaries are kept; each graph has about 9.4 million edges.
    """
    from domlab.domination import cell_tessellation_set, ds_dc
    from domlab.graph import is_dominating_set

    runs = []
    for seed in range(20):
        inst = generate_rgg(RggParams(50_000, 0.05, seed))
        d = ds_dc(inst.graph, seed)
        c = cell_tessellation_set(inst)
        deg = inst.graph.degrees
        runs.append({
            "seed": seed,
            "ds_dc": d.size,
            "ds_dc_verified": d.verified and is_dominating_set(inst.graph, d.members),
            "cell": c.size,
            "cell_verified": c.verified,
            "n": inst.graph.n,
            "min_degree": int(deg.min()),
            "mean_degree": float(deg.mean()),
        })
        del inst
    return runs

