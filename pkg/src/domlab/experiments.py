"""Scaling experiments: config grids, k-core runs, CSV/JSON output and the
``y = n^x ln n`` fit.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from domlab.domination import ALGORITHMS, run_algorithm
from domlab.errors import DomlabError, ParameterError, ParseError
from domlab.graph import Graph, build_graph, k_core
from domlab.mgeop import MgeopParams, generate
from domlab.rgg import RggParams, generate_rgg

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "FitResult",
    "CellError",
    "TABLE1_REFERENCE",
    "CSV_HEADER",
    "load_config",
    "run_experiment",
    "fit_nx_logn",
    "fit_records",
    "ingest_edge_list",
    "load_edge_list",
    "write_edge_list",
    "format_edge_list",
    "emit_csv",
    "read_csv",
    "emit_fit_report",
]

CSV_HEADER = (
    "model,n,m,alpha,beta,p,r,seed,k,core_n,core_min_deg,"
    "algorithm,gamma_upper,lower_bound,elapsed_ms"
).split(",")

# Domination of FB100 k-cores fitted to y = n^x log n, k -> (x, R^2).
TABLE1_REFERENCE = {
    1: (0.509, 0.8472),
    2: (0.492, 0.8292),
    3: (0.4818, 0.8179),
    4: (0.4741, 0.8093),
    5: (0.4677, 0.803),
}

MODELS = ("mgeop", "rgg", "ingest")


# -- edge lists -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EdgeListData:
    graph: Graph
    original_ids: np.ndarray
    self_loops: int


def _parse_edge_text(text: str, path, n: int | None) -> EdgeListData:
    ids: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    loops = 0
    saw_data = False

    def node(token: str, lineno: int) -> int:
        try:
            raw = int(token)
        except ValueError:
            raise ParseError(f"expected an integer node id, got {token!r}", path, lineno) from None
        if raw < 0:
            raise ParseError(f"node ids must be non-negative, got {raw}", path, lineno)
        if n is not None:
            if raw >= n:
                raise ParseError(f"node id {raw} is outside [0, {n})", path, lineno)
            return raw
        return ids.setdefault(raw, len(ids))

    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        saw_data = True
        tokens = line.split()
        if len(tokens) == 1:
            node(tokens[0], lineno)
            continue
        if len(tokens) != 2:
            raise ParseError(f"expected 'u v', got {line!r}", path, lineno)
        u, v = node(tokens[0], lineno), node(tokens[1], lineno)
        if u == v:
            loops += 1
            continue
        pairs.append((u, v))

    if not saw_data and n is None:
        raise ParseError("edge list is empty", path)
    if loops:
        log.warning("%s: dropped %d self-loop(s)", path or "<edge list>", loops)
    if n is None:
        n = len(ids)
        original = np.fromiter(ids.keys(), dtype=np.int64, count=n)
    else:
        original = np.arange(n, dtype=np.int64)
    return EdgeListData(build_graph(n, pairs), original, loops)


def load_edge_list(path, n: int | None = None) -> EdgeListData:
    """Parse a whitespace-separated edge list.

    Blank lines and ``#`` comments are skipped; a line with a single id
    declares an isolated node. Without ``n`` the ids may be arbitrary
    non-negative integers and are compacted to ``0..n-1`` in first-seen
    order. With ``n`` the ids are kept as given (and an empty file is a valid
    edgeless graph). Self-loops are dropped and counted, not fatal.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read edge list ({exc.strerror})", path) from exc
    return _parse_edge_text(text, path, n)


def ingest_edge_list(path, n: int | None = None) -> Graph:
    return load_edge_list(path, n).graph


def format_edge_list(G: Graph) -> str:
    out = io.StringIO()
    out.write(f"# nodes {G.n} edges {G.num_edges}\n")
    for u, v in G.edges():
        out.write(f"{u} {v}\n")
    for v in np.flatnonzero(G.degrees == 0):
        out.write(f"{v}\n")
    return out.getvalue()


def write_edge_list(G: Graph, path) -> None:
    """Write ``u v`` lines (u < v) followed by one line per isolated node."""
    write_text(path, format_edge_list(G))


def write_text(path, text: str) -> None:
    """Write text, turning OS failures into DomlabError."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DomlabError(f"cannot write {path}: {exc.strerror}") from exc


# -- config -----------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """A grid of runs. Model parameters may be scalars or lists; the grid is
    their Cartesian product with ``n`` and ``seeds``.
    """

    model: str
    n: list = field(default_factory=list)
    m: list = field(default_factory=lambda: [3])
    alpha: list = field(default_factory=lambda: [0.5])
    beta: list = field(default_factory=lambda: [0.25])
    p: list = field(default_factory=lambda: [0.8])
    r: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    algorithms: list = field(default_factory=lambda: ["ds_dc"])
    k_core_levels: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    seeds: list = field(default_factory=lambda: [0])
    output: str | None = None
    fit_report: str | None = None
    fit_against: str = "core_n"
    with_constant: bool = False

    def __post_init__(self):
        for name in ("n", "m", "alpha", "beta", "p", "r", "inputs", "algorithms", "k_core_levels", "seeds"):
            value = getattr(self, name)
            if not isinstance(value, list):
                setattr(self, name, [value])
        if self.model not in MODELS:
            raise ParameterError(f"model must be one of {MODELS} (got {self.model!r})")
        if self.model == "ingest":
            if not self.inputs:
                raise ParameterError("ingest experiments need a nonempty 'inputs' list")
        elif not self.n:
            raise ParameterError("parameter grid is empty: 'n' has no values")
        if self.model == "rgg" and not self.r:
            raise ParameterError("rgg experiments need at least one 'r'")
        if not self.seeds:
            raise ParameterError("at least one seed is required")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown or not self.algorithms:
            raise ParameterError(f"unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHMS)}")
        if not self.k_core_levels or any(
            not isinstance(k, int) or not 0 <= k <= 100 for k in self.k_core_levels
        ):
            raise ParameterError("k_core_levels must be a nonempty list of integers in [0, 100]")
        if self.fit_against not in ("core_n", "original_n"):
            raise ParameterError("fit_against must be 'core_n' or 'original_n'")
        # Validate every model parameter combination up front.
        for cell in self.cells():
            _cell_params(self.model, cell)

    def cells(self) -> list[dict]:
        if self.model == "mgeop":
            keys = ("n", "m", "alpha", "beta", "p", "seed")
            grid = itertools.product(self.n, self.m, self.alpha, self.beta, self.p, self.seeds)
        elif self.model == "rgg":
            keys = ("n", "r", "seed")
            grid = itertools.product(self.n, self.r, self.seeds)
        else:
            keys = ("input", "seed")
            grid = itertools.product(self.inputs, self.seeds)
        return [dict(zip(keys, values)) for values in grid]


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read config ({exc.strerror})", path) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from exc
    if not isinstance(raw, dict):
        raise ParameterError("config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ParameterError(f"unknown config key(s): {', '.join(unknown)}")
    if "model" not in raw:
        raise ParameterError("config is missing 'model'")
    return ExperimentConfig(**raw)


# -- running ----------------------------------------------------------------


@dataclass(frozen=True)
class RunRecord:
    model: str
    n: int
    seed: int
    k: int
    core_n: int
    algorithm: str
    gamma_upper: int
    lower_bound: float | None
    core_min_deg: int | None
    elapsed_ms: float
    m: int | None = None
    alpha: float | None = None
    beta: float | None = None
    p: float | None = None
    r: float | None = None
    source: str | None = None
    verified: bool = True
    empty_core: bool = False

    def sort_key(self):
        opt = lambda x: (x is not None, x if x is not None else 0)  # noqa: E731
        return (
            self.model, self.n, self.k, self.algorithm, self.seed,
            opt(self.m), opt(self.alpha), opt(self.beta), opt(self.p), opt(self.r),
            self.source or "",
        )


@dataclass(frozen=True)
class CellError:
    cell: dict
    message: str


def _cell_params(model: str, cell: dict):
    if model == "mgeop":
        return MgeopParams(cell["n"], cell["m"], cell["alpha"], cell["beta"], cell["p"], cell["seed"])
    if model == "rgg":
        return RggParams(cell["n"], cell["r"], cell["seed"])
    return None


def _run_cell(model: str, cell: dict, k_levels: list, algorithms: list) -> list[RunRecord]:
    params = _cell_params(model, cell)
    common: dict = {"model": model, "seed": int(cell["seed"])}
    if model == "mgeop":
        graph = generate(params).graph
        common.update(m=params.m, alpha=params.alpha, beta=params.beta, p=params.p)
    elif model == "rgg":
        graph = generate_rgg(params).graph
        common.update(r=params.r)
    else:
        graph = ingest_edge_list(cell["input"])
        common.update(source=str(cell["input"]))
    records = []
    for k in k_levels:
        core, _ = k_core(graph, k)
        for name in algorithms:
            if core.n == 0:
                records.append(RunRecord(
                    n=graph.n, k=k, core_n=0, algorithm=name, gamma_upper=0,
                    lower_bound=None, core_min_deg=None, elapsed_ms=0.0,
                    empty_core=True, **common,
                ))
                continue
            res = run_algorithm(name, core, common["seed"])
            deg = core.degrees
            records.append(RunRecord(
                n=graph.n, k=k, core_n=core.n, algorithm=name, gamma_upper=res.size,
                lower_bound=core.n / (1 + int(deg.max())), core_min_deg=int(deg.min()),
                elapsed_ms=res.elapsed * 1000.0, verified=res.verified, **common,
            ))
    return records


def _run_cell_safe(args):
    model, cell, k_levels, algorithms = args
    try:
        return _run_cell(model, cell, k_levels, algorithms), None
    except DomlabError as exc:
        return [], CellError(cell, str(exc))


def run_experiment(
    config: ExperimentConfig, jobs: int = 1, errors: list | None = None
) -> list[RunRecord]:
    """Run every grid cell and return records in canonical order.

    Cells run in a process pool when ``jobs > 1``; the output does not
    depend on ``jobs``. A cell that fails with a data error (e.g. an
    unreadable ingest file) is logged, appended to ``errors`` if given, and
    skipped.
    """
    tasks = [(config.model, cell, list(config.k_core_levels), list(config.algorithms)) for cell in config.cells()]
    jobs = max(1, min(jobs, len(tasks) or 1))
    if jobs == 1:
        outcomes = [_run_cell_safe(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_cell_safe, tasks))
    records = []
    for cell_records, err in outcomes:
        if err is not None:
            log.error("cell %s failed: %s", err.cell, err.message)
            if errors is not None:
                errors.append(err)
        for rec in cell_records:
            if rec.empty_core:
                log.warning("empty %d-core for cell seed=%s n=%s", rec.k, rec.seed, rec.n)
        records.extend(cell_records)
    records.sort(key=RunRecord.sort_key)
    return records


# -- output -----------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def emit_csv(records, path=None, include_timing: bool = False) -> str:
    """Write records under the fixed header; returns the CSV text.

    ``elapsed_ms`` is left empty unless ``include_timing`` is set, since
    wall time would make otherwise identical runs differ byte-wise.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in sorted(records, key=RunRecord.sort_key):
        row = asdict(rec)
        if not include_timing:
            row["elapsed_ms"] = None
        writer.writerow([_fmt(row[col]) for col in CSV_HEADER])
    text = out.getvalue()
    if path is not None:
        write_text(path, text)
    return text


def read_csv(path) -> list[RunRecord]:
    """Parse a CSV written by emit_csv back into records."""
    ints = {"n", "seed", "k", "core_n", "gamma_upper", "m", "core_min_deg"}
    floats = {"alpha", "beta", "p", "r", "lower_bound", "elapsed_ms"}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ParseError("unexpected CSV header", path, 1)
        records = []
        for lineno, row in enumerate(reader, 2):
            kw: dict = {}
            try:
                for col, val in row.items():
                    if col in ints:
                        kw[col] = int(val) if val != "" else None
                    elif col in floats:
                        kw[col] = float(val) if val != "" else None
                    else:
                        kw[col] = val
            except ValueError as exc:
                raise ParseError(str(exc), path, lineno) from None
            kw["elapsed_ms"] = kw["elapsed_ms"] or 0.0
            kw["empty_core"] = kw["core_n"] == 0
            records.append(RunRecord(**kw))
    return records


# -- fitting ----------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    """Fit of ``y = n^x ln n`` (or ``e^c n^x ln n`` when ``constant`` is set).

    ``r_squared`` is ``1 - SS_res / SS_tot`` on ln y with SS_tot taken about
    the mean of ln y. Without a fitted constant it can be negative.
    """

    x: float
    r_squared: float
    points: int
    constant: float | None = None

    @property
    def model_variant(self) -> str:
        return "n^x*ln(n)" if self.constant is None else "e^c*n^x*ln(n)"


def fit_nx_logn(points, with_constant: bool = False) -> FitResult:
    """Least squares in log space for ``ln y = x ln n + ln ln n (+ c)``."""
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 3:
        raise ParameterError(f"need at least 3 points to fit (got {len(pts)})")
    n = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if (n < 3).any():
        raise ParameterError("every n must be at least 3")
    if (y <= 0).any():
        raise ParameterError("every y must be positive")
    ln_n = np.log(n)
    ln_y = np.log(y)
    target = ln_y - np.log(ln_n)
    if with_constant:
        A = np.column_stack([ln_n, np.ones_like(ln_n)])
        (x, c), *_ = np.linalg.lstsq(A, target, rcond=None)
        fitted = x * ln_n + c
    else:
        x = float(np.dot(target, ln_n) / np.dot(ln_n, ln_n))
        c = None
        fitted = x * ln_n
    ss_res = float(np.sum((target - fitted) ** 2))
    ss_tot = float(np.sum((ln_y - ln_y.mean()) ** 2))
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else -math.inf
    else:
        r2 = 1.0 - ss_res / ss_tot
    return FitResult(float(x), r2, len(pts), None if c is None else float(c))


def fit_records(
    records, fit_against: str = "core_n", with_constant: bool = False
) -> list[dict]:
    """One fit per (k, algorithm) over the records' domination sizes.

    Rows with an empty core or fewer than 3 nodes on the chosen axis are
    skipped; groups left with fewer than 3 points are omitted.
    """
    groups: dict[tuple, list] = {}
    for rec in records:
        n = rec.core_n if fit_against == "core_n" else rec.n
        if rec.gamma_upper <= 0 or n < 3:
            continue
        groups.setdefault((rec.k, rec.algorithm, rec.model), []).append((n, rec.gamma_upper))
    report = []
    for (k, algorithm, model), pts in sorted(groups.items()):
        if len(pts) < 3:
            continue
        fit = fit_nx_logn(pts, with_constant)
        entry = {
            "k": k,
            "algorithm": algorithm,
            "x": fit.x,
            "r_squared": fit.r_squared,
            "points": fit.points,
            "model_variant": fit.model_variant,
            "fit_against": fit_against,
        }
        if fit.constant is not None:
            entry["constant"] = fit.constant
        if model == "ingest" and k in TABLE1_REFERENCE:
            ref_x, ref_r2 = TABLE1_REFERENCE[k]
            entry["reference"] = {"x": ref_x, "r_squared": ref_r2, "source": "FB100 k-cores"}
        report.append(entry)
    return report


def emit_fit_report(fits: list[dict], path=None) -> str:
    text = json.dumps(fits, indent=2, sort_keys=True) + "\n"
    if path is not None:
        write_text(path, text)
    return text
