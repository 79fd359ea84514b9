"""Dynamic time warping over MFCC envelopes.

Steps are restricted to (1,0), (0,1), (1,1) with unit weights and no band;
paths run from (1,1) to (m,n).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMatrix
from .mfcc import N_COEFFS, MfccMatrix


@dataclass(frozen=True)
class DtwResult:
    distance: float
    path: tuple[tuple[int, int], ...] | None = None  # 1-based (p, q)


def _coeffs(a) -> np.ndarray:
    arr = a.coeffs if isinstance(a, MfccMatrix) else np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] == 0 or arr.shape[0] == 0:
        raise EmptyMatrix(f"need a (d, T>=1) matrix, got shape {arr.shape}")
    return arr


def accumulate(cost: np.ndarray) -> list[list[float]]:
    """Cumulative-cost table D with D[i][j] = cost[i][j] + min(predecessors)."""
    m, n = cost.shape
    c = cost.tolist()
    D = [[0.0] * n for _ in range(m)]
    row = D[0]
    acc = 0.0
    for j, v in enumerate(c[0]):
        acc += v
        row[j] = acc
    for i in range(1, m):
        prev, row, ci = D[i - 1], D[i], c[i]
        left = prev[0] + ci[0]
        row[0] = left
        for j in range(1, n):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if left < best:
                best = left
            left = ci[j] + best
            row[j] = left
    return D


def backtrace(D: list[list[float]]) -> tuple[tuple[int, int], ...]:
    """Optimal path; ties prefer the diagonal, then a (0,1) step, then (1,0)."""
    i, j = len(D) - 1, len(D[0]) - 1
    path = [(i + 1, j + 1)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag, left, up = D[i - 1][j - 1], D[i][j - 1], D[i - 1][j]
            if diag <= left and diag <= up:
                i, j = i - 1, j - 1
            elif left <= up:
                j -= 1
            else:
                i -= 1
        path.append((i + 1, j + 1))
    return tuple(reversed(path))


def dtw_cost(cost: np.ndarray, with_path: bool = False) -> DtwResult:
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or 0 in cost.shape:
        raise EmptyMatrix(f"empty cost matrix {cost.shape}")
    D = accumulate(cost)
    return DtwResult(D[-1][-1], backtrace(D) if with_path else None)


def pairwise_euclidean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cost between columns of (d, m) and (d, n) matrices, shape (m, n)."""
    diff = a.T[:, None, :] - b.T[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def dtw_joint(a, b, with_path: bool = False) -> DtwResult:
    """DTW over 13-dim frames with Euclidean frame cost."""
    A, B = _coeffs(a), _coeffs(b)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"coefficient counts differ: {A.shape[0]} vs {B.shape[0]}")
    return dtw_cost(pairwise_euclidean(A, B), with_path)


def dtw_scalar(x: np.ndarray, y: np.ndarray, with_path: bool = False) -> DtwResult:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return dtw_cost(np.abs(x[:, None] - y[None, :]), with_path)


def resample_frames(coeffs: np.ndarray, length: int) -> np.ndarray:
    """Linear interpolation of a (d, T) matrix along time to ``length`` frames."""
    d, T = coeffs.shape
    if T == length:
        return coeffs.copy()
    if T == 1:
        return np.repeat(coeffs, length, axis=1)
    src = np.arange(T, dtype=np.float64)
    dst = np.linspace(0.0, T - 1.0, length)
    return np.stack([np.interp(dst, src, row) for row in coeffs])


def dtw_per_coefficient(a, b) -> tuple[np.ndarray, int]:
    """Per-coefficient scalar DTW after resampling both inputs to T_hat = max(T_a, T_b).

    Returns the 13 distances and T_hat.
    """
    A, B = _coeffs(a), _coeffs(b)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"coefficient counts differ: {A.shape[0]} vs {B.shape[0]}")
    t_hat = max(A.shape[1], B.shape[1])
    At, Bt = resample_frames(A, t_hat), resample_frames(B, t_hat)
    dists = np.array([dtw_scalar(At[d], Bt[d]).distance for d in range(A.shape[0])])
    return dists, t_hat


def framewise_per_coefficient(a, b) -> tuple[np.ndarray, int]:
    """Lock-step variant: after resampling, sum |a_t - b_t| per coefficient without warping."""
    A, B = _coeffs(a), _coeffs(b)
    t_hat = max(A.shape[1], B.shape[1])
    At, Bt = resample_frames(A, t_hat), resample_frames(B, t_hat)
    return np.abs(At - Bt).sum(axis=1), t_hat


__all__ = [
    "N_COEFFS",
    "DtwResult",
    "dtw_joint",
    "dtw_scalar",
    "dtw_per_coefficient",
    "framewise_per_coefficient",
    "resample_frames",
]
