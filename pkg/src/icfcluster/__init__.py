"""Kernel k-means clustering on incomplete Cholesky factors of the Gram matrix."""

from .baselines import (approx_kkmeans, chol_embedding, kernel_chol_kmeans,
                        nystrom_embedding, nystrom_kmeans, rff_embedding,
                        rff_kmeans)
from .cluster import (ClusterModel, icf_kkmeans, kernel_kmeans_oracle,
                      kmeans_pp_init, lloyd, oracle_embedding, psd_embedding)
from .data import Dataset, ParseError, gen_synthetic, parse_libsvm, standardize, to_libsvm
from .evaluate import (ALGORITHMS, CSV_HEADER, BenchmarkConfig,
                       BenchmarkReport, BenchmarkRow, accuracy, bound_gap,
                       fit_decay, run_benchmark, trace_objective)
from .icf import (BreakdownError, IcfFactor, dump_factor, icf_factorize,
                  icf_step, parse_factor_dump, reconstruct, residual_trace)
from .kernel import (DEFAULT_GUARD, KernelSpec, full_gram, kernel_column,
                     kernel_diag, kernel_eval, point_sq_norms)

__all__ = [
    "ALGORITHMS",
    "BenchmarkConfig",
    "BenchmarkReport",
    "BenchmarkRow",
    "BreakdownError",
    "CSV_HEADER",
    "ClusterModel",
    "Dataset",
    "DEFAULT_GUARD",
    "IcfFactor",
    "KernelSpec",
    "ParseError",
    "accuracy",
    "approx_kkmeans",
    "bound_gap",
    "chol_embedding",
    "dump_factor",
    "fit_decay",
    "full_gram",
    "gen_synthetic",
    "icf_factorize",
    "icf_kkmeans",
    "icf_step",
    "kernel_chol_kmeans",
    "kernel_column",
    "kernel_diag",
    "kernel_eval",
    "kernel_kmeans_oracle",
    "kmeans_pp_init",
    "lloyd",
    "nystrom_embedding",
    "nystrom_kmeans",
    "oracle_embedding",
    "parse_factor_dump",
    "parse_libsvm",
    "point_sq_norms",
    "psd_embedding",
    "reconstruct",
    "residual_trace",
    "rff_embedding",
    "rff_kmeans",
    "run_benchmark",
    "standardize",
    "to_libsvm",
    "trace_objective",
]
