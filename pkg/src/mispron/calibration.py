"""Distance pools, thresholds, empirical CDFs and Gaussian KDEs.

Quantiles use the lower (inverse-CDF) convention throughout: the smallest
pool value whose empirical CDF reaches the requested level. No interpolation.
"""
from __future__ import annotations

import bisect
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .distance import NormalizationStrategy, WordDistance
from .errors import DegeneratePool, EmptyPool, ModelFormatError
from .mfcc import MfccConfig, default_config

log = logging.getLogger(__name__)

MODEL_VERSION = "1.0"
CORRECT, INCORRECT = "correct", "incorrect"


@dataclass(frozen=True)
class DistancePool:
    label: str
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(sorted(float(v) for v in self.values))
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ValueError(f"{self.label} pool holds negative or non-finite values")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


def _require(pool: DistancePool) -> None:
    if len(pool) == 0:
        raise EmptyPool(f"{pool.label} pool is empty")


def order_statistic_threshold(pool: DistancePool, alpha: float) -> float:
    """q-th smallest value with q = ceil((N+1)(1-alpha)) clamped to [1, N]."""
    _require(pool)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = len(pool)
    # round away float noise before ceil: (N+1)(1-alpha) is often an integer in exact arithmetic
    q = math.ceil(round((n + 1) * (1 - alpha), 9))
    q = min(max(q, 1), n)
    return pool.values[q - 1]


def empirical_cdf(pool: DistancePool, x: float) -> float:
    _require(pool)
    return bisect.bisect_right(pool.values, x) / len(pool)


def lower_quantile(sorted_values: Sequence[float], p: float) -> float:
    """Smallest x among ``sorted_values`` with F(x) >= p/100."""
    if not 0 < p <= 100:
        raise ValueError(f"percentile must lie in (0, 100], got {p}")
    n = len(sorted_values)
    k = math.ceil(round(n * p / 100.0, 9))
    return sorted_values[min(max(k, 1), n) - 1]


def percentile_threshold(pool: DistancePool, p: float) -> float:
    """inf{x in pool : F(x) >= p/100}."""
    _require(pool)
    return lower_quantile(pool.values, p)


def silverman_bandwidth(values: Sequence[float]) -> float:
    x = np.asarray(values, dtype=np.float64)
    if len(x) < 2:
        raise DegeneratePool(f"KDE needs at least 2 values, got {len(x)}")
    sigma = float(np.std(x, ddof=1))
    if sigma == 0 or x.min() == x.max():
        raise DegeneratePool("KDE pool has zero variance")
    q75, q25 = np.percentile(x, [75, 25])
    iqr = float(q75 - q25)
    spread = min(sigma, iqr / 1.34) if iqr > 0 else sigma
    return 0.9 * spread * len(x) ** (-0.2)


def kde_fit(pool: DistancePool) -> float:
    return silverman_bandwidth(pool.values)


def kde_density(pool: DistancePool, bandwidth: float, x) -> np.ndarray | float:
    """Gaussian KDE (N h)^-1 sum phi((x - d_k) / h)."""
    _require(pool)
    d = np.asarray(pool.values)
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    z = (xs[:, None] - d[None, :]) / bandwidth
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (len(d) * bandwidth * math.sqrt(2 * math.pi))
    return float(dens[0]) if np.ndim(x) == 0 else dens


def kde_log_density(pool: DistancePool, bandwidth: float, x: float) -> float:
    """log K(x), stable far from the pool where the plain density underflows to 0."""
    _require(pool)
    z = (float(x) - np.asarray(pool.values)) / bandwidth
    return float(logsumexp(-0.5 * z * z)) - math.log(len(pool.values) * bandwidth * math.sqrt(2 * math.pi))


@dataclass(frozen=True)
class CalibrationModel:
    alpha: float
    percentile: float
    strategy: NormalizationStrategy
    mfcc_config: MfccConfig
    tau_global: float
    pool_correct: DistancePool
    pool_incorrect: DistancePool
    tau_correct: float | None = None
    tau_incorrect: float | None = None
    kde_bandwidth_correct: float | None = None
    kde_bandwidth_incorrect: float | None = None
    calibration_ids: tuple[str, ...] = ()
    frame_resampling: str = "linear"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def has_class_pools(self) -> bool:
        return len(self.pool_correct) > 0 and len(self.pool_incorrect) > 0

    @property
    def has_kde(self) -> bool:
        return self.kde_bandwidth_correct is not None and self.kde_bandwidth_incorrect is not None

    # --- serialization ---

    def to_dict(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "alpha": self.alpha,
            "percentile": self.percentile,
            "strategy": self.strategy.value,
            "frame_resampling": self.frame_resampling,
            "mfcc_config": self.mfcc_config.to_dict(),
            "tau_global": self.tau_global,
            "tau_correct": self.tau_correct,
            "tau_incorrect": self.tau_incorrect,
            "pool_correct": list(self.pool_correct.values),
            "pool_incorrect": list(self.pool_incorrect.values),
            "kde_bandwidths": {
                "correct": self.kde_bandwidth_correct,
                "incorrect": self.kde_bandwidth_incorrect,
            },
            "calibration_ids": list(self.calibration_ids),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationModel":
        version = str(d.get("version", ""))
        if not version:
            raise ModelFormatError("model file has no version field")
        if version.split(".")[0] != MODEL_VERSION.split(".")[0]:
            raise ModelFormatError(f"unsupported model version {version}")
        try:
            bw = d.get("kde_bandwidths") or {}
            return cls(
                alpha=d["alpha"],
                percentile=d["percentile"],
                strategy=NormalizationStrategy(d["strategy"]),
                mfcc_config=MfccConfig.from_dict(d["mfcc_config"]),
                tau_global=d["tau_global"],
                pool_correct=DistancePool(CORRECT, tuple(d["pool_correct"])),
                pool_incorrect=DistancePool(INCORRECT, tuple(d["pool_incorrect"])),
                tau_correct=d.get("tau_correct"),
                tau_incorrect=d.get("tau_incorrect"),
                kde_bandwidth_correct=bw.get("correct"),
                kde_bandwidth_incorrect=bw.get("incorrect"),
                calibration_ids=tuple(d.get("calibration_ids", ())),
                frame_resampling=d.get("frame_resampling", "linear"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"bad model file: {exc}") from None

    @classmethod
    def loads(cls, text: str) -> "CalibrationModel":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model is not JSON: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> "CalibrationModel":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def calibrate(
    labeled: Iterable[tuple[WordDistance | float, str]],
    alpha: float = 0.1,
    percentile: float = 90.0,
    strategy: NormalizationStrategy | None = None,
    mfcc_config: MfccConfig | None = None,
    calibration_ids: Iterable[str] = (),
) -> CalibrationModel:
    """Split labeled distances into class pools and derive all thresholds.

    A missing class leaves the class thresholds and KDEs unset (only the
    global strategy is usable); a degenerate pool leaves its KDE unset.
    """
    pools: dict[str, list[float]] = {CORRECT: [], INCORRECT: []}
    seen_strategy = None
    for item, label in labeled:
        if label not in pools:
            raise ValueError(f"label must be 'correct' or 'incorrect', got {label!r}")
        if isinstance(item, WordDistance):
            seen_strategy = seen_strategy or item.strategy
            item = item.d_bar
        pools[label].append(float(item))
    strategy = NormalizationStrategy(strategy or seen_strategy or NormalizationStrategy.PEAK_AMPLITUDE)
    pc = DistancePool(CORRECT, tuple(pools[CORRECT]))
    pi = DistancePool(INCORRECT, tuple(pools[INCORRECT]))
    everything = DistancePool("all", pc.values + pi.values)
    tau = order_statistic_threshold(everything, alpha)

    warnings = []
    taus: dict[str, float | None] = {}
    bws: dict[str, float | None] = {}
    for pool in (pc, pi):
        if len(pool) == 0:
            msg = f"{pool.label} pool is empty; class strategies disabled"
            log.warning(msg)
            warnings.append(msg)
            taus[pool.label] = bws[pool.label] = None
            continue
        taus[pool.label] = percentile_threshold(pool, percentile)
        try:
            bws[pool.label] = kde_fit(pool)
        except DegeneratePool as exc:
            msg = f"{pool.label} KDE not fitted ({exc}); kde strategy falls back to cdf-median"
            log.warning(msg)
            warnings.append(msg)
            bws[pool.label] = None
    return CalibrationModel(
        alpha=alpha,
        percentile=percentile,
        strategy=strategy,
        mfcc_config=mfcc_config or default_config(),
        tau_global=tau,
        pool_correct=pc,
        pool_incorrect=pi,
        tau_correct=taus[CORRECT],
        tau_incorrect=taus[INCORRECT],
        kde_bandwidth_correct=bws[CORRECT],
        kde_bandwidth_incorrect=bws[INCORRECT],
        calibration_ids=tuple(sorted(calibration_ids)),
        warnings=tuple(warnings),
    )
