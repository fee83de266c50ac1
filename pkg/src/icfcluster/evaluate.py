"""Scoring, diagnostics, and the benchmark harness.

accuracy matches predicted to true labels with an optimal one-to-one
assignment, so it is invariant to label permutations.  trace_objective scores
a partition as (1/n) tr(V^T K V) with V the normalized indicator matrix; on a
factor P it is computed as ||V^T P||_F^2 / n without forming P P^T.
bound_gap compares the objective degradation caused by factoring against its
a-priori limit 2 sqrt(k) tr(K - P P^T) / n.  fit_decay checks how close a
residual-trace history is to exponential.

run_benchmark times every (dataset, algorithm, subset_size, seed) cell with
separate factorization and clustering stages and renders rows as CSV.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .baselines import (_approx_blocks, _approx_solve, chol_embedding,
                        nystrom_embedding, rff_embedding)
from .cluster import lloyd, oracle_embedding, psd_embedding
from .data import Dataset
from .icf import IcfFactor, icf_factorize, residual_trace
from .kernel import DEFAULT_GUARD, KernelSpec, full_gram

ALGORITHMS = ("icf", "kernel", "chol", "nystrom", "rff", "approx")

# these need the full n x n Gram matrix and are skipped beyond the guard
_FULL_MATRIX = frozenset({"kernel", "chol"})

CSV_HEADER = "dataset,algorithm,subset_size,seed,accuracy,objective,achieved_rank,factorize_ms,cluster_ms,total_ms"


def accuracy(pred: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of points whose cluster id maps to their true label under the
    best one-to-one relabeling (assignment problem on the contingency table)."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("empty label arrays")
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    size = max(pi.max(), ti.max()) + 1
    table = np.zeros((size, size), dtype=np.int64)
    np.add.at(table, (pi, ti), 1)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / pred.size


def trace_objective(gram_or_factor, assignments: np.ndarray, k: int) -> float:
    """(1/n) tr(V^T K V) for the normalized cluster indicator V.

    Accepts either a dense Gram matrix or an IcfFactor; the factor path never
    materializes the approximation.  Larger is better; tr(K)/n minus this is
    the k-means objective of the partition.
    """
    assignments = np.asarray(assignments)
    V = _indicator(assignments, k)
    if isinstance(gram_or_factor, IcfFactor):
        M = V.T @ gram_or_factor.P
        return float(np.einsum("ij,ij->", M, M)) / assignments.size
    K = np.asarray(gram_or_factor, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] != assignments.size:
        raise ValueError(f"gram matrix shape {K.shape} does not match n={assignments.size}")
    return float(np.einsum("ij,ij->", K @ V, V)) / assignments.size


def bound_gap(dataset: Dataset, spec: KernelSpec, k: int, subset_size: int, seed: int,
              epsilon: float = 1e-3, max_iter: int = 1000,
              guard: int = DEFAULT_GUARD) -> tuple[float, float]:
    """Observed vs guaranteed objective degradation from factoring.

    Clusters both the exact embedding and the incomplete Cholesky factor with
    the same seed, then returns

        gap   = (1/n) tr((V - V')^T K (V - V'))
        bound = 2 sqrt(k) tr(K - P P^T) / n

    for the two indicator matrices.  Both clusterings are Lloyd local optima,
    so the gap can slightly exceed what globally optimal partitions would
    give, but it should still fall under the bound almost always.
    """
    n = dataset.n
    K = full_gram(spec, dataset, guard=guard)
    exact = lloyd(psd_embedding(K), k, seed, max_iter=max_iter)
    factor = icf_factorize(dataset, spec, max_rank=subset_size, epsilon=epsilon)
    approx = lloyd(factor.P, k, seed, max_iter=max_iter)
    D = _indicator(exact.assignments, k) - _indicator(approx.assignments, k)
    gap = float(np.einsum("ij,ij->", K @ D, D)) / n
    bound = 2.0 * math.sqrt(k) * residual_trace(factor) / n
    return gap, bound


def fit_decay(trace_history: np.ndarray) -> tuple[float, float, float]:
    """Least-squares fit of trace_history[i] ~= C exp(-b i) in log space.

    Trailing entries below 1e-12 times the initial trace are dropped before
    taking logs.  Returns (C, b, r_squared); b > 0 means decay.
    """
    hist = np.asarray(trace_history, dtype=np.float64)
    if hist.ndim != 1:
        raise ValueError("trace_history must be 1-d")
    floor = 1e-12 * hist[0] if hist.size else 0.0
    above = hist > floor
    keep = hist.size if above.all() else int(np.argmax(~above))
    hist = hist[:keep]
    if hist.size < 3 or np.any(hist <= 0):
        raise ValueError("need at least 3 positive history entries to fit")
    x = np.arange(hist.size, dtype=np.float64)
    y = np.log(hist)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_sq = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(np.exp(intercept)), float(-slope), min(max(r_sq, 0.0), 1.0)


@dataclass(frozen=True)
class BenchmarkConfig:
    """What to run: the cross product of datasets, algorithms, sizes, seeds.

    sigma and clusters may be single values or per-dataset-name mappings.
    """

    datasets: Sequence[Dataset]
    algorithms: Sequence[str]
    subset_sizes: Sequence[int]
    sigma: float | Mapping[str, float]
    clusters: int | Mapping[str, int]
    num_seeds: int = 10
    epsilon: float = 1e-3
    max_iter: int = 1000
    guard: int = DEFAULT_GUARD
    warmup: bool = True


@dataclass
class BenchmarkRow:
    dataset: str
    algorithm: str
    subset_size: int
    seed: int
    accuracy: float | None = None
    objective: float | None = None
    achieved_rank: int | None = None
    factorize_ms: float | None = None
    cluster_ms: float | None = None
    total_ms: float | None = None
    skipped: bool = False


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(",".join([
                r.dataset,
                r.algorithm,
                str(r.subset_size),
                str(r.seed),
                _fmt(r.accuracy),
                _fmt(r.objective),
                "" if r.achieved_rank is None else str(r.achieved_rank),
                _fmt_ms(r.factorize_ms),
                _fmt_ms(r.cluster_ms),
                _fmt_ms(r.total_ms),
            ]))
        return "\n".join(lines) + "\n"


def run_benchmark(config: BenchmarkConfig) -> BenchmarkReport:
    """Run every cell of the configured sweep and collect timed rows.

    Full-matrix algorithms on datasets beyond the guard produce rows marked
    skipped (empty metrics) instead of failing the sweep.  All randomness is
    derived from the per-row seed, so metric columns are reproducible; only
    the timing columns vary between runs.
    """
    for algorithm in config.algorithms:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
    report = BenchmarkReport()
    for dataset in config.datasets:
        spec = KernelSpec("gaussian", _per_dataset(config.sigma, dataset.name))
        k = _per_dataset(config.clusters, dataset.name)
        if config.warmup:
            _warmup(dataset, spec)
        for algorithm in config.algorithms:
            for subset_size in config.subset_sizes:
                for seed in range(config.num_seeds):
                    row = BenchmarkRow(dataset.name, algorithm, subset_size, seed)
                    if algorithm in _FULL_MATRIX and dataset.n > config.guard:
                        row.skipped = True
                    else:
                        _run_cell(row, dataset, spec, algorithm, subset_size, k, config)
                    report.rows.append(row)
    return report


def _run_cell(row: BenchmarkRow, dataset: Dataset, spec: KernelSpec, algorithm: str,
              subset_size: int, k: int, config: BenchmarkConfig) -> None:
    seed = row.seed
    t0 = time.perf_counter()
    if algorithm == "icf":
        factor = icf_factorize(dataset, spec, max_rank=subset_size, epsilon=config.epsilon)
        rank = factor.s
        t1 = time.perf_counter()
        model = lloyd(factor.P, k, seed, max_iter=config.max_iter)
    elif algorithm == "kernel":
        embed = oracle_embedding(dataset, spec, guard=config.guard)
        rank = embed.shape[1]
        t1 = time.perf_counter()
        model = lloyd(embed, k, seed, max_iter=config.max_iter)
    elif algorithm == "chol":
        embed = chol_embedding(dataset, spec, guard=config.guard)
        rank = embed.shape[1]
        t1 = time.perf_counter()
        model = lloyd(embed, k, seed, max_iter=config.max_iter)
    elif algorithm == "nystrom":
        embed = nystrom_embedding(dataset, spec, subset_size, seed)
        rank = embed.shape[1]
        t1 = time.perf_counter()
        model = lloyd(embed, k, seed, max_iter=config.max_iter)
    elif algorithm == "rff":
        # the feature count plays the role of the subset size; it must be even
        num_features = subset_size + subset_size % 2
        embed = rff_embedding(dataset, spec, num_features, seed)
        rank = num_features
        t1 = time.perf_counter()
        model = lloyd(embed, k, seed, max_iter=config.max_iter)
    else:
        _, K_MB, K_BB = _approx_blocks(dataset, spec, subset_size, seed)
        rank = subset_size
        t1 = time.perf_counter()
        model = _approx_solve(dataset, spec, K_MB, K_BB, k, seed, config.max_iter, 1e-6)
    t2 = time.perf_counter()
    row.objective = model.objective
    row.achieved_rank = rank
    if dataset.labels is not None:
        row.accuracy = accuracy(model.assignments, dataset.labels)
    row.factorize_ms = (t1 - t0) * 1e3
    row.cluster_ms = (t2 - t1) * 1e3
    row.total_ms = (t2 - t0) * 1e3


def _warmup(dataset: Dataset, spec: KernelSpec) -> None:
    """One small untimed factorization so first-use costs stay out of rows."""
    head = Dataset(dataset.points[: min(dataset.n, 64)], name="warmup")
    icf_factorize(head, spec, max_rank=min(2, head.n), epsilon=1e-30)


def _per_dataset(value, name: str):
    if isinstance(value, Mapping):
        return value[name]
    return value


def _indicator(assignments: np.ndarray, k: int) -> np.ndarray:
    assignments = np.asarray(assignments)
    if assignments.min() < 0 or assignments.max() >= k:
        raise ValueError(f"assignments must lie in [0, {k})")
    counts = np.bincount(assignments, minlength=k)
    if np.any(counts == 0):
        raise ValueError("every cluster id in [0, k) must be used")
    V = np.zeros((assignments.size, k))
    V[np.arange(assignments.size), assignments] = 1.0 / np.sqrt(counts[assignments])
    return V


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _fmt_ms(value: float | None) -> str:
    return "" if value is None else f"{value:.3f}"
