"""Incomplete Cholesky factorization of a kernel Gram matrix.

Builds a tall factor P (n x s, s << n) with P P^T ~= K by greedily pivoting
on the largest residual diagonal entry, which maximally reduces the residual
trace tr(K - P P^T) at every step.  Only one Gram column per step plus the
diagonal are ever evaluated, so the cost is O(n s^2 + n s d) time and O(n s)
memory; the full matrix is never formed.

Each step with pivot t appends the column

    p = (K[:, t] - P u) / nu,   u = P[t, :],   nu = sqrt(K[t, t] - u.u)

and downdates the residual diagonal e[j] -= p[j]^2.  The residual trace is
re-summed from e rather than updated by subtraction so it cannot drift.
Selected pivot entries are pinned at exactly zero, as are factor entries in
previously selected rows (their exact value is zero; pinning stops rounding
noise from being amplified by a small nu).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .kernel import DEFAULT_GUARD, KernelSpec, kernel_column, kernel_diag, point_sq_norms

# residual diagonal entries may round slightly negative; anything below this
# indicates a genuinely indefinite update, not rounding
NEGATIVE_TOL = 1e-10

# a pivot whose fresh nu^2 = K[t,t] - u.u falls to this fraction of K[t,t] is
# rounding noise left over after rank exhaustion, not a real column; matches
# the relative eigenvalue clamp used by the dense embedding paths
RANK_TOL = 1e-12


class BreakdownError(RuntimeError):
    """Numerical breakdown: a residual quantity turned negative beyond tolerance."""

    def __init__(self, iteration: int, value: float):
        super().__init__(f"breakdown at iteration {iteration}: residual value {value:.3e}")
        self.iteration = iteration
        self.value = value


@dataclass(eq=False)
class IcfFactor:
    """Result of an incomplete Cholesky run.

    Attributes:
        P: n x s factor, columns in selection order.
        pivots: the s selected indices, in order, no repeats.
        residual_diag: diagonal of K - P P^T; selected entries are exactly 0.
        trace_history: residual trace before each step and after the last,
            length s + 1; trace_history[0] is tr(K).
        kernel_evals: number of kernel evaluations spent (diagonal + columns).
    """

    P: np.ndarray
    pivots: np.ndarray
    residual_diag: np.ndarray
    trace_history: np.ndarray
    kernel_evals: int

    def __post_init__(self):
        P = np.array(self.P, dtype=np.float64)
        pivots = np.array(self.pivots, dtype=np.int64)
        diag = np.array(self.residual_diag, dtype=np.float64)
        hist = np.array(self.trace_history, dtype=np.float64)
        n, s = P.shape
        if pivots.shape != (s,) or len(np.unique(pivots)) != s:
            raise ValueError("pivots must be s distinct indices")
        if diag.shape != (n,):
            raise ValueError("residual_diag must have length n")
        if hist.shape != (s + 1,):
            raise ValueError("trace_history must have length s + 1")
        for name, arr in (("P", P), ("pivots", pivots), ("residual_diag", diag), ("trace_history", hist)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def s(self) -> int:
        return self.P.shape[1]


def icf_factorize(dataset: Dataset, spec: KernelSpec, max_rank: int, epsilon: float = 1e-3) -> IcfFactor:
    """Run the pivoted incomplete Cholesky loop.

    Stops as soon as the residual trace drops to epsilon or below, when
    max_rank columns have been built, or when the best remaining pivot is
    numerically rank-exhausted (nu^2 <= RANK_TOL * K[t, t]).

    Args:
        dataset: points defining the Gram matrix.
        spec: kernel to apply.
        max_rank: cap on the number of columns, 1 <= max_rank <= n.
        epsilon: residual-trace stopping threshold, > 0.
    """
    n = dataset.n
    if not 1 <= max_rank <= n:
        raise ValueError(f"max_rank must be in [1, {n}], got {max_rank}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    diag = kernel_diag(spec, dataset).astype(np.float64, copy=True)
    e = diag.copy()
    evals = n
    selected = np.zeros(n, dtype=bool)
    sq_norms = point_sq_norms(dataset)
    # the factor is built transposed (columns as contiguous rows) so the
    # per-step matvec and downdate stream memory instead of striding
    PT = np.empty((max_rank, n))
    pivots: list[int] = []
    history = [float(np.sum(e))]
    s = 0
    while s < max_rank and history[-1] > epsilon:
        t = _pick_pivot(e)
        if t < 0:
            break
        # check rank exhaustion from the diagonal alone, before spending a
        # column of kernel evaluations on a pivot that cannot be appended
        nu_sq = float(diag[t] - PT[:s, t] @ PT[:s, t])
        if not nu_sq > RANK_TOL * diag[t]:
            break
        col = kernel_column(spec, dataset, t, sq_norms)
        evals += n
        _append_row(PT, s, t, col, float(np.sqrt(nu_sq)), selected)
        _downdate(e, PT[s], t, selected, s, scratch=col)
        pivots.append(t)
        history.append(float(np.sum(e)))
        s += 1
    return IcfFactor(PT[:s].T.copy(), np.array(pivots, dtype=np.int64), e, np.array(history), evals)


def icf_step(factor: IcfFactor, dataset: Dataset, spec: KernelSpec) -> IcfFactor:
    """Extend a factor by one pivot column, returning a new factor."""
    n, s = factor.n, factor.s
    if dataset.n != n:
        raise ValueError("dataset does not match factor size")
    if s >= n:
        raise ValueError("factor already has n columns")
    e = factor.residual_diag.copy()
    selected = np.zeros(n, dtype=bool)
    selected[factor.pivots] = True
    t = _pick_pivot(e)
    if t < 0:
        raise ValueError("no unselected index with positive residual remains")
    PT = np.empty((s + 1, n))
    PT[:s] = factor.P.T
    diag_t = float(kernel_diag(spec, dataset)[t])
    nu_sq = diag_t - float(PT[:s, t] @ PT[:s, t])
    if not nu_sq > RANK_TOL * diag_t:
        raise BreakdownError(s, nu_sq)
    col = kernel_column(spec, dataset, t, point_sq_norms(dataset))
    _append_row(PT, s, t, col, float(np.sqrt(nu_sq)), selected)
    _downdate(e, PT[s], t, selected, s, scratch=col)
    history = np.append(factor.trace_history, float(np.sum(e)))
    pivots = np.append(factor.pivots, t)
    return IcfFactor(PT.T.copy(), pivots, e, history, factor.kernel_evals + n)


def reconstruct(factor: IcfFactor, guard: int = DEFAULT_GUARD) -> np.ndarray:
    """Materialize the rank-s approximation P P^T (guarded, O(n^2) memory)."""
    if factor.n > guard:
        raise ValueError(f"reconstruction refused: n={factor.n} exceeds guard={guard}")
    return factor.P @ factor.P.T


def residual_trace(factor: IcfFactor) -> float:
    """Current tr(K - P P^T), the last entry of the trace history."""
    return float(factor.trace_history[-1])


def dump_factor(factor: IcfFactor) -> str:
    """Serialize a factor to text: header, pivots, P rows, trace history."""
    lines = [f"ICF {factor.n} {factor.s}"]
    lines.append(" ".join(str(int(t)) for t in factor.pivots))
    for row in factor.P:
        lines.append(" ".join(f"{v:.17e}" for v in row))
    lines.append(" ".join(f"{v:.17e}" for v in factor.trace_history))
    return "\n".join(lines) + "\n"


def parse_factor_dump(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of dump_factor; returns (pivots, P, trace_history)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("ICF "):
        raise ValueError("not a factor dump: missing ICF header")
    try:
        _, n_s, s_s = lines[0].split()
        n, s = int(n_s), int(s_s)
    except ValueError:
        raise ValueError(f"malformed header {lines[0]!r}") from None
    if len(lines) < n + 3:
        raise ValueError(f"truncated dump: expected {n + 3} lines, got {len(lines)}")
    pivots = np.array([int(t) for t in lines[1].split()], dtype=np.int64)
    P = np.array([[float(v) for v in lines[2 + i].split()] for i in range(n)])
    P = P.reshape(n, s)
    history = np.array([float(v) for v in lines[2 + n].split()])
    if pivots.shape != (s,) or history.shape != (s + 1,):
        raise ValueError("dump sections do not match header sizes")
    return pivots, P, history


def _pick_pivot(e: np.ndarray) -> int:
    """Largest residual entry; ties go to the smallest index.

    Relies on selected entries being pinned to exactly 0 (and the rest kept
    non-negative) by _downdate, so a positive argmax is always unselected.
    Returns -1 when no positive entry remains.
    """
    t = int(np.argmax(e))
    if not e[t] > 0.0:
        return -1
    return t


def _append_row(PT: np.ndarray, s: int, t: int, col: np.ndarray, nu: float, selected: np.ndarray) -> None:
    """Fill PT[s] (factor column s) from Gram column col at pivot t.

    PT holds the factor transposed, one column per contiguous row; nu is the
    caller-verified positive pivot root (K[t, t] - u.u)^(1/2).  The row is
    computed in place as (col - u P) / nu without temporaries.
    """
    u = PT[:s, t]
    if s:
        np.matmul(u, PT[:s], out=PT[s])
        np.subtract(col, PT[s], out=PT[s])
        PT[s] /= nu
    else:
        np.divide(col, nu, out=PT[s])
    PT[s, selected] = 0.0
    PT[s, t] = nu


def _downdate(
    e: np.ndarray,
    p: np.ndarray,
    t: int,
    selected: np.ndarray,
    iteration: int,
    scratch: np.ndarray | None = None,
) -> None:
    """Subtract p^2 from the residual diagonal and mark t selected.

    Entries that round into [-NEGATIVE_TOL, 0) are clamped to zero; anything
    lower means the update lost positive semidefiniteness.  scratch, if given,
    is an n-sized buffer reused for the squared column.
    """
    e -= np.multiply(p, p, out=scratch)
    e[t] = 0.0
    worst = float(np.min(e))
    if worst < -NEGATIVE_TOL:
        raise BreakdownError(iteration, worst)
    np.clip(e, 0.0, None, out=e)
    selected[t] = True
