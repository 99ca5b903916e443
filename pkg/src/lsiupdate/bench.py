"""Benchmark driver: replay a document stream and compare updating policies.

The protocol fixes the first t columns of a term-document matrix as the
initial collection, computes its rank-k model, then appends the remaining
columns in groups of p. After every group each configured policy performs its
own update on its own model lineage, all queries are scored, and per-step
mean average precision plus cumulative update time land in a CSV and in
gnuplot-ready data files.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evaluation import PrecisionReport, precision_report
from .gkl import gkl_partial_svd
from .ingest import read_matrix_market, read_qrels, write_matrix_market
from .lsi import ScoringParams, rank, score
from .model import LatentModel, model_from_dense
from .operators import SparseOperator
from .sparse import SparseMatrix
from .update import AddDocuments, parse_policy, update

# Below this size the initial model comes from a dense SVD; above it, from
# the package's own iterative solver with a tight value-sum tolerance.
DENSE_INIT_CUTOFF = 400


@dataclass
class ExperimentConfig:
    matrix: Path
    queries: Path
    qrels: Path
    k: int
    t: int
    p: int
    policies: list[str]
    alpha: float = 0.0
    normalize: bool = True
    n_points: int = 11
    seed: int = 0
    out: Path = Path("bench-out")
    max_docs: int | None = None

    def __post_init__(self):
        self.matrix = Path(self.matrix)
        self.queries = Path(self.queries)
        self.qrels = Path(self.qrels)
        self.out = Path(self.out)


@dataclass(frozen=True)
class StepRecord:
    step: int
    n_docs: int
    policy: str
    l_effective: int
    map: float
    cum_time_s: float
    h_rows: int
    h_cols: int


@dataclass
class ExperimentResult:
    records: list[StepRecord] = field(default_factory=list)
    reports: list[PrecisionReport] = field(default_factory=list)
    csv_path: Path | None = None


CSV_COLUMNS = ("step", "n_docs", "policy", "l_effective", "map",
               "cum_time_s", "h_rows", "h_cols")


def _g17(x: float) -> str:
    return f"{x:.17g}"


def _csv_row(rec: StepRecord) -> str:
    return ",".join([
        str(rec.step), str(rec.n_docs), rec.policy, str(rec.l_effective),
        _g17(rec.map), _g17(rec.cum_time_s), str(rec.h_rows), str(rec.h_cols),
    ])


def emit_csv(records, path) -> Path:
    """Write all records to one CSV; floats carry 17 significant digits."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            fh.write(_csv_row(rec) + "\n")
    return path


def emit_plot_data(records, out_dir) -> list[Path]:
    """Write precision.dat and time.dat, one gnuplot data block per policy."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    policies = []
    for rec in records:
        if rec.policy not in policies:
            policies.append(rec.policy)
    paths = []
    for name, column in (("precision.dat", "map"), ("time.dat", "cum_time_s")):
        path = out_dir / name
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for b, policy in enumerate(policies):
                if b:
                    fh.write("\n\n")
                fh.write(f"# policy: {policy}\n")
                for rec in records:
                    if rec.policy == policy:
                        fh.write(f"{rec.n_docs} {_g17(getattr(rec, column))}\n")
        paths.append(path)
    return paths


def initial_model(a: SparseMatrix, k: int,
                  dense_cutoff: int = DENSE_INIT_CUTOFF) -> LatentModel:
    """Rank-k model of the initial collection."""
    if not 1 <= k <= min(a.shape):
        raise ValueError(f"k must be in [1, min{a.shape}]")
    if min(a.shape) <= dense_cutoff:
        return model_from_dense(a.to_dense(), k)
    psvd = gkl_partial_svd(SparseOperator(a), k, tol=1e-8, max_iter=min(a.shape))
    if len(psvd.values) < k:
        raise ValueError(f"initial matrix supplied only {len(psvd.values)} "
                         f"triplets, need k={k}")
    return LatentModel(sigma=psvd.values, U=psvd.left, V=psvd.right)


def _validate(config: ExperimentConfig, m: int, n_total: int, n_queries: int) -> None:
    if not config.policies:
        raise ValueError("at least one policy must be configured")
    if config.p < 1:
        raise ValueError("p must be >= 1")
    if config.t < 1:
        raise ValueError("t must be >= 1")
    if config.t + config.p > n_total:
        raise ValueError(f"t + p = {config.t + config.p} exceeds "
                         f"available documents {n_total}")
    if not 1 <= config.k <= min(m, config.t):
        raise ValueError(f"k must be in [1, min(m, t)] = [1, {min(m, config.t)}]")
    if config.n_points < 2:
        raise ValueError("n_points must be >= 2")
    if n_queries < 1:
        raise ValueError("query matrix has no columns")


def _score_all(model: LatentModel, queries: SparseMatrix,
               params: ScoringParams) -> dict[int, list[int]]:
    """Full rankings per query; ids are 1-based to match qrels numbering."""
    rankings = {}
    for j in range(queries.cols):
        r = score(model, queries.column(j), params)
        rankings[j + 1] = [int(i) + 1 for i in rank(r)]
    return rankings


def run_experiment(config: ExperimentConfig,
                   clock=time.perf_counter) -> ExperimentResult:
    """Run the update-and-evaluate protocol, writing CSV rows as steps finish.

    The clock parameter is forwarded to the update dispatcher; timing covers
    only update calls, never I/O or scoring. Injecting a deterministic clock
    makes the entire CSV byte-reproducible.
    """
    a = read_matrix_market(config.matrix)
    queries = read_matrix_market(config.queries)
    qrels = read_qrels(config.qrels)
    if queries.rows != a.rows:
        raise ValueError(f"queries have {queries.rows} terms, matrix has {a.rows}")
    for qid, relevant in qrels.items():
        bad = [doc for doc in relevant if not 1 <= doc <= a.cols]
        if bad:
            raise ValueError(f"qrels for query {qid} reference documents {bad} "
                             f"outside the collection (1..{a.cols})")
    n_total = a.cols if config.max_docs is None else min(a.cols, config.max_docs)
    _validate(config, a.rows, n_total, queries.cols)
    params = ScoringParams(alpha=config.alpha, normalize=config.normalize)
    policies = [(label, parse_policy(label)) for label in config.policies]

    base = initial_model(a.slice_cols(0, config.t), config.k)
    lineages = {label: base for label, _ in policies}
    cum_time = {label: 0.0 for label, _ in policies}

    config.out.mkdir(parents=True, exist_ok=True)
    csv_path = config.out / "results.csv"
    result = ExperimentResult(csv_path=csv_path)
    with csv_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        step = 0
        for start in range(config.t, n_total, config.p):
            stop = min(start + config.p, n_total)
            batch = AddDocuments(a.slice_cols(start, stop))
            step += 1
            for label, policy in policies:
                new_model, stats = update(lineages[label], batch, policy, clock=clock)
                lineages[label] = new_model
                cum_time[label] += stats.wall_time_s
                report = precision_report(
                    _score_all(new_model, queries, params), qrels,
                    n_points=config.n_points)
                rec = StepRecord(
                    step=step,
                    n_docs=stop,
                    policy=label,
                    l_effective=stats.l_effective,
                    map=report.mean,
                    cum_time_s=cum_time[label],
                    h_rows=stats.h_rows,
                    h_cols=stats.h_cols,
                )
                result.records.append(rec)
                result.reports.append(report)
                fh.write(_csv_row(rec) + "\n")
                fh.flush()
    emit_plot_data(result.records, config.out)
    return result


def make_synthetic_dataset(out_dir, seed: int = 0, terms: int = 20,
                           documents: int = 30, n_queries: int = 5) -> dict[str, Path]:
    """Write a small synthetic matrix, query set, and qrels for smoke runs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    dense = np.where(rng.random((terms, documents)) < 0.4,
                     np.round(rng.random((terms, documents)) * 5.0 + 1.0), 0.0)
    # guard against empty documents: give each column one guaranteed entry
    for j in range(documents):
        if not dense[:, j].any():
            dense[rng.integers(terms), j] = 1.0
    matrix = SparseMatrix.from_dense(dense)
    qdense = np.where(rng.random((terms, n_queries)) < 0.3,
                      np.round(rng.random((terms, n_queries)) * 3.0 + 1.0), 0.0)
    for j in range(n_queries):
        if not qdense[:, j].any():
            qdense[rng.integers(terms), j] = 1.0
    queries = SparseMatrix.from_dense(qdense)
    paths = {
        "matrix": out_dir / "matrix.mtx",
        "queries": out_dir / "queries.mtx",
        "qrels": out_dir / "qrels.txt",
    }
    write_matrix_market(matrix, paths["matrix"])
    write_matrix_market(queries, paths["queries"])
    with paths["qrels"].open("w", encoding="utf-8", newline="\n") as fh:
        for q in range(1, n_queries + 1):
            docs = rng.choice(documents, size=6, replace=False)
            for doc in sorted(int(d) + 1 for d in docs):
                fh.write(f"{q} 0 {doc} 1\n")
    return paths


def synthetic_config(data_dir, out_dir, seed: int = 0) -> ExperimentConfig:
    """The 20-by-30 smoke preset: t=10, p=5, k=4, every policy flavor."""
    paths = make_synthetic_dataset(data_dir, seed=seed)
    return ExperimentConfig(
        matrix=paths["matrix"],
        queries=paths["queries"],
        qrels=paths["qrels"],
        k=4,
        t=10,
        p=5,
        policies=["zs", "sv:l=2", "gkl:l=3", "ob"],
        seed=seed,
        out=Path(out_dir),
    )
