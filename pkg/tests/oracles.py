"""Independent reference computations used as test oracles.

Nothing here imports the code paths under test.
"""
import math
from functools import lru_cache

import numpy as np


def enumerate_paths(m, n):
    """All admissible warping paths from (0,0) to (m-1,n-1) with steps (1,0),(0,1),(1,1)."""
    out = []

    def walk(p, q, acc):
        if (p, q) == (m - 1, n - 1):
            out.append(tuple(acc))
            return
        for dp, dq in ((1, 0), (0, 1), (1, 1)):
            a, b = p + dp, q + dq
            if a < m and b < n:
                acc.append((a, b))
                walk(a, b, acc)
                acc.pop()

    walk(0, 0, [(0, 0)])
    return out


@lru_cache(maxsize=None)
def _paths(m, n):
    return enumerate_paths(m, n)


def brute_force_dtw(cost):
    cost = np.asarray(cost, dtype=float)
    m, n = cost.shape
    return min(sum(cost[p, q] for p, q in path) for path in _paths(m, n))


def euclid_cost(a, b):
    """a: (d, m), b: (d, n) -> (m, n), by explicit loops."""
    m, n = a.shape[1], b.shape[1]
    c = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            c[i, j] = math.sqrt(sum((a[k, i] - b[k, j]) ** 2 for k in range(a.shape[0])))
    return c


def linear_resample_series(x, length):
    x = list(x)
    T = len(x)
    if T == 1:
        return [x[0]] * length
    out = []
    for k in range(length):
        pos = k * (T - 1) / (length - 1) if length > 1 else 0.0
        i = min(int(math.floor(pos)), T - 2)
        frac = pos - i
        out.append(x[i] * (1 - frac) + x[i + 1] * frac)
    return out


def reference_mfcc(x, sr, frame_len=0.025, hop=0.010, n_filt=26, nfft=512, preemph=0.97, floor=1e-10):
    """Straight-from-definitions MFCC (c0..c12): explicit DFT, filterbank and DCT sums."""
    x = np.asarray(x, dtype=float)
    F = int(round(frame_len * sr))
    H = int(round(hop * sr))
    y = np.empty_like(x)
    y[0] = x[0]
    for i in range(1, len(x)):
        y[i] = x[i] - preemph * x[i - 1]
    n_frames = 1 + (len(y) - F) // H
    win = np.array([0.54 - 0.46 * math.cos(2 * math.pi * k / (F - 1)) for k in range(F)])
    kk = np.arange(nfft // 2 + 1)[:, None]
    nn = np.arange(F)[None, :]
    dft = np.exp(-2j * math.pi * kk * nn / nfft)

    def mel(f):
        return 2595 * math.log10(1 + f / 700)

    def imel(m):
        return 700 * (10 ** (m / 2595) - 1)

    top = mel(sr / 2)
    edges = [imel(top * i / (n_filt + 1)) for i in range(n_filt + 2)]
    fb = np.zeros((n_filt, nfft // 2 + 1))
    for j in range(n_filt):
        lo, mid, hi = edges[j], edges[j + 1], edges[j + 2]
        for b in range(nfft // 2 + 1):
            f = b * sr / nfft
            if lo < f < hi:
                fb[j, b] = (f - lo) / (mid - lo) if f <= mid else (hi - f) / (hi - mid)
    M = n_filt
    out = np.zeros((13, n_frames))
    for t in range(n_frames):
        seg = y[t * H:t * H + F] * win
        power = np.abs(dft @ seg) ** 2
        e = np.log(np.maximum(fb @ power, floor))
        for k in range(13):
            s = sum(e[m] * math.cos(math.pi * k * (2 * m + 1) / (2 * M)) for m in range(M))
            out[k, t] = s * (math.sqrt(1 / M) if k == 0 else math.sqrt(2 / M))
    return out
