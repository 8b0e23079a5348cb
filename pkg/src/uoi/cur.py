"""
Column subset selection: leverage-score sampling, greedy selection and
the union-of-intersections variant.

Leverage scores of rank ``k`` are ``l_i = ||V_k[i, :]||^2 / k`` where
``V_k`` holds the top ``k`` right singular vectors, so they sum to one and
serve directly as a sampling distribution over columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import InvalidArgumentError
from .parallel import parallel_map
from .resampling import SeedSpec, bootstrap_indices

_ROWS_STREAM = 0
_SAMPLING_STREAM = 1


@dataclass(frozen=True)
class TargetMatrix:
    """A data matrix whose columns are to be selected.

    ``encoded`` marks {-1, 0, 1} SNP-style encodings, for which the
    mismatch-count error is also reported.
    """

    entries: np.ndarray
    encoded: bool = False

    def __post_init__(self):
        A = np.asarray(self.entries, dtype=np.float64)
        if A.ndim != 2:
            raise InvalidArgumentError("target matrix must be 2-D")
        if not np.all(np.isfinite(A)):
            raise InvalidArgumentError("target matrix has NaN or Inf entries")
        if self.encoded and not np.all(np.isin(A, (-1.0, 0.0, 1.0))):
            raise InvalidArgumentError("encoded matrix entries must lie in {-1, 0, 1}")
        object.__setattr__(self, "entries", A)

    @classmethod
    def from_array(cls, A) -> "TargetMatrix":
        A = np.asarray(A, dtype=np.float64)
        return cls(A, encoded=bool(np.all(np.isin(A, (-1.0, 0.0, 1.0)))))

    @property
    def shape(self):
        return self.entries.shape


def _entries(A) -> np.ndarray:
    if isinstance(A, TargetMatrix):
        return A.entries
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise InvalidArgumentError("target matrix must be 2-D")
    return A


def _is_encoded(A) -> bool:
    if isinstance(A, TargetMatrix):
        return A.encoded
    return bool(np.all(np.isin(np.asarray(A), (-1.0, 0.0, 1.0))))


@dataclass(frozen=True)
class LeverageProfile:
    scores: np.ndarray
    rank: int


@dataclass
class ColumnSubset:
    """Selected column indices (sorted) and the budget they were drawn for."""

    indices: tuple[int, ...]
    target_count: int
    degenerate: bool = False
    per_rank: dict = field(default_factory=dict)

    def __post_init__(self):
        self.indices = tuple(sorted({int(i) for i in self.indices}))

    def __len__(self):
        return len(self.indices)

    def to_dict(self) -> dict:
        out = {
            "indices": list(self.indices),
            "target_count": int(self.target_count),
            "degenerate": bool(self.degenerate),
        }
        if self.per_rank:
            out["per_rank"] = {str(k): list(v) for k, v in sorted(self.per_rank.items())}
        return out


class ReconstructionError(NamedTuple):
    frobenius: float
    nnz_ratio: Optional[float]


def _right_singular_vectors(A: np.ndarray) -> np.ndarray:
    return np.linalg.svd(A, full_matrices=False)[2]


def _scores_from_vt(vt: np.ndarray, k: int) -> np.ndarray:
    Vk = vt[:k]
    return np.sum(Vk * Vk, axis=0) / k


def _check_rank(A: np.ndarray, k: int) -> int:
    k = int(k)
    if not 1 <= k <= min(A.shape):
        raise InvalidArgumentError(f"rank k={k} must lie in [1, {min(A.shape)}]")
    return k


def leverage_scores(A, k: int) -> LeverageProfile:
    """Rank-``k`` column leverage scores of ``A`` (they sum to one)."""
    A = _entries(A)
    k = _check_rank(A, k)
    return LeverageProfile(_scores_from_vt(_right_singular_vectors(A), k), k)


def weighted_sample_without_replacement(weights: np.ndarray, c: int, rng: np.random.Generator) -> list[int]:
    """Draw ``c`` distinct indices sequentially with probability proportional to ``weights``.

    Once the remaining weight is exhausted, the rest are drawn uniformly.
    Returns indices in draw order.
    """
    w = np.array(weights, dtype=np.float64)
    w[w < 0] = 0.0
    n = w.size
    taken = np.zeros(n, dtype=bool)
    order = []
    for _ in range(int(c)):
        total = float(w.sum())
        if total > 0.0:
            cdf = np.cumsum(w)
            j = int(np.searchsorted(cdf, rng.uniform() * cdf[-1], side="right"))
            j = min(j, n - 1)
            while w[j] <= 0.0:
                j -= 1
        else:
            free = np.flatnonzero(~taken)
            j = int(free[rng.integers(free.size)])
        order.append(j)
        taken[j] = True
        w[j] = 0.0
    return order


def _check_budget(n: int, c: int) -> int:
    c = int(c)
    if not 1 <= c <= n:
        raise InvalidArgumentError(f"column budget c={c} must lie in [1, {n}]")
    return c


def sample_columns_basic(A, k: int, c: int, seed) -> ColumnSubset:
    """``c`` distinct columns sampled in proportion to rank-``k`` leverage scores."""
    M = _entries(A)
    c = _check_budget(M.shape[1], c)
    profile = leverage_scores(M, k)
    order = weighted_sample_without_replacement(profile.scores, c, SeedSpec.coerce(seed).rng())
    return ColumnSubset(tuple(order), c)


def _orthonormal_range(C: np.ndarray) -> np.ndarray:
    if C.shape[1] == 0:
        return np.zeros((C.shape[0], 0))
    U, s, _ = np.linalg.svd(C, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((C.shape[0], 0))
    keep = s > max(C.shape) * np.finfo(float).eps * s[0]
    return U[:, keep]


def project_onto_columns(A, indices: Sequence[int]) -> np.ndarray:
    """``C C^+ A`` for ``C = A[:, indices]``."""
    M = _entries(A)
    Q = _orthonormal_range(M[:, list(indices)])
    return Q @ (Q.T @ M)


def round_to_encoding(M: np.ndarray) -> np.ndarray:
    """Nearest value in {-1, 0, 1}; exact halves go to 0."""
    return np.where(np.abs(M) > 0.5, np.sign(M), 0.0)


def reconstruction_error(A, subset, encoded: Optional[bool] = None) -> ReconstructionError:
    """
    Errors of approximating ``A`` by its projection onto the selected columns.

    Returns the Frobenius norm ``||A - C C^+ A||_F`` and, for encoded
    matrices, ``nnz(round(C C^+ A) - A) / nnz(A)`` (``None`` otherwise).
    """
    M = _entries(A)
    indices = subset.indices if isinstance(subset, ColumnSubset) else tuple(subset)
    if len(indices) == 0:
        raise InvalidArgumentError("reconstruction error needs a non-empty column subset")
    if min(indices) < 0 or max(indices) >= M.shape[1]:
        raise InvalidArgumentError("column index out of range")
    approx = project_onto_columns(M, indices)
    frob = float(np.linalg.norm(M - approx))
    enc = _is_encoded(A) if encoded is None else encoded
    nnz = None
    if enc:
        total = np.count_nonzero(M)
        mismatch = np.count_nonzero(round_to_encoding(approx) - M)
        nnz = float(mismatch / total) if total else float(mismatch > 0)
    return ReconstructionError(frob, nnz)


def greedy_cur(A, c: int) -> ColumnSubset:
    """
    Pick ``c`` columns one at a time, each minimizing the Frobenius error
    of projecting ``A`` onto the chosen set. Ties go to the lowest index.
    """
    M = _entries(A)
    n = M.shape[1]
    c = _check_budget(n, c)
    R = M.copy()
    total = float(np.sum(M * M))
    tie = 1e-10 * max(total, np.finfo(float).tiny)
    chosen: list[int] = []
    taken = np.zeros(n, dtype=bool)
    for _ in range(c):
        gram = R.T @ R
        diag = np.diag(gram).copy()
        gain = np.zeros(n)
        ok = (diag > 1e-14 * max(total, np.finfo(float).tiny)) & ~taken
        gain[ok] = np.sum(gram[ok] ** 2, axis=1) / diag[ok]
        err = np.sum(diag) - gain
        err[taken] = np.inf
        best = float(np.min(err))
        j = int(np.flatnonzero(err <= best + tie)[0])
        chosen.append(j)
        taken[j] = True
        if diag[j] > 0.0 and ok[j]:
            q = R[:, j] / np.sqrt(diag[j])
            R -= np.outer(q, q @ R)
    return ColumnSubset(tuple(chosen), c)


def uoi_cur_select(A, ranks: Sequence[int], c_per_rank: int, b1: int, seed=0, workers: Optional[int] = 1) -> ColumnSubset:
    """
    Union over ranks of the intersection over row bootstraps of
    leverage-sampled column sets.

    For bootstrap ``b`` the rows are ``bootstrap_indices(m, seed.spawn(0).spawn(b))``
    and the rank-``ranks[r]`` draw uses ``seed.spawn(1).spawn(b).spawn(r)``.
    An empty union is returned with ``degenerate=True``.
    """
    M = _entries(A)
    m, n = M.shape
    ranks = [int(k) for k in ranks]
    if not ranks:
        raise InvalidArgumentError("at least one rank is required")
    for k in ranks:
        _check_rank(M, k)
    c = _check_budget(n, c_per_rank)
    if int(b1) < 1:
        raise InvalidArgumentError("b1 must be at least 1")
    seed = SeedSpec.coerce(seed)

    def one(b):
        rows = bootstrap_indices(m, seed.spawn(_ROWS_STREAM).spawn(b)).indices
        vt = _right_singular_vectors(M[rows])
        draws = []
        for r, k in enumerate(ranks):
            if k > vt.shape[0]:
                raise InvalidArgumentError(f"rank {k} exceeds the bootstrap matrix size")
            scores = _scores_from_vt(vt, k)
            rng = seed.spawn(_SAMPLING_STREAM).spawn(b).spawn(r).rng()
            draws.append(set(weighted_sample_without_replacement(scores, c, rng)))
        return draws

    results = parallel_map(one, range(int(b1)), workers)
    per_rank = {}
    union: set[int] = set()
    for r, k in enumerate(ranks):
        common = set.intersection(*(res[r] for res in results))
        per_rank[k] = sorted(set(per_rank.get(k, ())) | common)
        union |= common
    return ColumnSubset(tuple(union), c, degenerate=not union, per_rank=per_rank)


def compare_methods(A, ranks: Sequence[int], c_per_rank: int, b1: int, seed=0, workers: Optional[int] = 1) -> dict:
    """UoI, leverage-sampling and greedy selections at a shared column budget.

    The budget is the size of the UoI selection; the basic sampler uses the
    largest requested rank.
    """
    M = _entries(A)
    seed = SeedSpec.coerce(seed)
    uoi = uoi_cur_select(M, ranks, c_per_rank, b1, seed, workers)
    out = {"uoi": uoi}
    if uoi.degenerate:
        return out
    budget = len(uoi)
    out["basic"] = sample_columns_basic(M, max(ranks), budget, seed.spawn(2))
    out["greedy"] = greedy_cur(M, budget)
    return out
