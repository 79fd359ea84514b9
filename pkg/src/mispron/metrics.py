"""Binary classification metrics, distance summaries and STFT magnitude export."""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .audio import AudioBuffer
from .calibration import lower_quantile
from .errors import BufferTooShort, EmptyGroup, EmptyInput

CLASS_NAMES = ("correct", "incorrect")  # class 0, class 1 (mispronounced)


def as_class(label) -> int:
    if isinstance(label, (int, np.integer)) and label in (0, 1):
        return int(label)
    s = str(getattr(label, "value", label)).lower()
    if s in ("0", "correct"):
        return 0
    if s in ("1", "incorrect"):
        return 1
    raise ValueError(f"not a binary label: {label!r}")


def binarize(label, ambiguous_as: str = "incorrect") -> int | None:
    """Map a verdict label to 0/1; AMBIGUOUS follows ``ambiguous_as`` (None means drop)."""
    s = str(getattr(label, "value", label)).upper()
    if s == "AMBIGUOUS":
        if ambiguous_as == "drop":
            return None
        return as_class(ambiguous_as)
    return as_class(s)


@dataclass(frozen=True)
class ClassMetrics:
    label: int
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassReport:
    classes: tuple[ClassMetrics, ClassMetrics]
    accuracy: float
    confusion: tuple[tuple[int, int], tuple[int, int]]  # rows = true, cols = predicted
    undefined: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "classes": [asdict(c) for c in self.classes],
            "accuracy": self.accuracy,
            "confusion": [list(r) for r in self.confusion],
            "undefined": list(self.undefined),
        }


def report_from_confusion(confusion) -> ClassReport:
    cm = [[int(v) for v in row] for row in confusion]
    total = sum(map(sum, cm))
    if total == 0:
        raise EmptyInput("confusion matrix is empty")
    classes, undefined = [], []
    for k in (0, 1):
        tp = cm[k][k]
        fp = cm[1 - k][k]
        fn = cm[k][1 - k]
        if tp + fp == 0:
            undefined.append(f"precision[{k}]")
        if tp + fn == 0:
            undefined.append(f"recall[{k}]")
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        classes.append(ClassMetrics(k, p, r, f1, tp + fn))
    acc = (cm[0][0] + cm[1][1]) / total
    return ClassReport(tuple(classes), acc, (tuple(cm[0]), tuple(cm[1])), tuple(undefined))


def confusion_matrix(pairs: Iterable[tuple[object, object]]) -> list[list[int]]:
    cm = [[0, 0], [0, 0]]
    for pred, true in pairs:
        cm[as_class(true)][as_class(pred)] += 1
    return cm


def classification_report(pairs: Sequence[tuple[object, object]]) -> ClassReport:
    """Per-class precision/recall/F1/support and accuracy from (predicted, true) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyInput("no predictions to score")
    return report_from_confusion(confusion_matrix(pairs))


@dataclass(frozen=True)
class DistanceSummary:
    outcome: str
    count: int
    mean: float
    median: float
    std: float
    q25: float
    q75: float


def summarize(values: Sequence[float], outcome: str = "") -> DistanceSummary:
    xs = sorted(float(v) for v in values)
    if not xs:
        raise EmptyGroup(f"no values for outcome {outcome!r}")
    arr = np.asarray(xs)
    return DistanceSummary(
        outcome, len(xs), float(arr.mean()), lower_quantile(xs, 50), float(arr.std()),
        lower_quantile(xs, 25), lower_quantile(xs, 75),
    )


def distance_summary(
    distances: Iterable[tuple[float, str]], outcomes: Sequence[str] = ("correct", "incorrect")
) -> tuple[list[DistanceSummary], list[str]]:
    """Summaries per outcome group, in ``outcomes`` order; empty groups are omitted with a warning."""
    groups: dict[str, list[float]] = {o: [] for o in outcomes}
    for d, outcome in distances:
        groups.setdefault(outcome, []).append(d)
    out, warnings = [], []
    for name, vals in groups.items():
        if vals:
            out.append(summarize(vals, name))
        else:
            warnings.append(f"no distances for outcome {name!r}; group omitted")
    return out, warnings


def format_classification_table(report: ClassReport, dataset: str = "") -> str:
    lines = [f"{'Dataset':<10}{'Class':>6}{'Precision':>11}{'Recall':>9}{'F1-score':>10}{'Support':>9}{'Accuracy':>10}"]
    for c in report.classes:
        acc = f"{report.accuracy:.3f}" if c.label == 0 else ""
        name = dataset if c.label == 0 else ""
        lines.append(f"{name:<10}{c.label:>6}{c.precision:>11.3f}{c.recall:>9.3f}{c.f1:>10.3f}{c.support:>9}{acc:>10}")
    return "\n".join(lines)


def format_summary_table(summaries: Sequence[DistanceSummary], dataset: str = "") -> str:
    cols = ("Mean", "Median", "Std", "25%", "75%")
    lines = [f"{'Dataset':<10}{'Outcome':<10}" + "".join(f" {c:>10}" for c in cols)]
    for i, s in enumerate(summaries):
        name = dataset if i == 0 else ""
        vals = (s.mean, s.median, s.std, s.q25, s.q75)
        lines.append(f"{name:<10}{s.outcome.capitalize():<10}" + "".join(f" {v:>10.4f}" for v in vals))
    return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class Stft:
    db: np.ndarray        # (frames, bins), clamped to [-80, 0] dB relative to the global max
    mean_mag: np.ndarray  # (frames,), mean linear magnitude per frame
    freqs: np.ndarray     # (bins,)


def stft_magnitude(a: AudioBuffer, frame: float = 0.025, hop: float = 0.010, floor_db: float = -80.0) -> Stft:
    n = int(round(frame * a.sample_rate))
    h = int(round(hop * a.sample_rate))
    if n <= 0 or h <= 0:
        raise ValueError("frame and hop must cover at least one sample")
    if len(a) < n:
        raise BufferTooShort(f"{len(a)} samples < one frame of {n}")
    frames = np.lib.stride_tricks.sliding_window_view(a.samples, n)[::h] * np.hanning(n)
    mag = np.abs(np.fft.rfft(frames, n))
    peak = mag.max()
    if peak > 0:
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(mag / peak)
        db = np.clip(db, floor_db, 0.0)
    else:
        db = np.full_like(mag, floor_db)
    return Stft(db, mag.mean(axis=1), np.fft.rfftfreq(n, 1.0 / a.sample_rate))


def write_stft_csv(s: Stft, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"{f:g}Hz" for f in s.freqs] + ["mean_mag"])
        for row, m in zip(s.db, s.mean_mag):
            w.writerow([f"{v:.4f}" for v in row] + [repr(float(m))])
