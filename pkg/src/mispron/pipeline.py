"""Manifest-level calibration and evaluation."""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from typing import Callable

from .calibration import CalibrationModel, calibrate
from .clone_provider import CloneRequest, CloneResult
from .corpus import Manifest, load_pair
from .detector import DecisionStrategy, WordVerdict, decide_words, effective_strategy
from .distance import NormalizationStrategy, WordDistance, alignment_distances
from .errors import EmptyPool
from .mfcc import default_config
from .metrics import CLASS_NAMES, binarize, classification_report, distance_summary

log = logging.getLogger(__name__)

REPORT_VERSION = "1.0"


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def manifest_distances(
    manifest: Manifest,
    cfg,
    strategy: NormalizationStrategy,
    jobs: int = 1,
    remote: Callable[[CloneRequest], CloneResult] | None = None,
) -> list[tuple[str, list[WordDistance], dict[int, str] | None, list[str]]]:
    """Per utterance: (id, word distances, ground-truth labels, warnings), in manifest order."""

    def one(entry):
        pair = load_pair(entry, manifest, remote)
        alignments, warnings = pair.alignments()
        dists, skipped = alignment_distances(pair.real_audio, pair.clone_audio, alignments, cfg, strategy)
        return entry.utterance_id, dists, pair.labels, warnings + skipped

    return _map(one, manifest.entries, jobs)


def calibrate_manifest(
    manifest: Manifest,
    alpha: float = 0.1,
    percentile: float = 90.0,
    strategy: NormalizationStrategy = NormalizationStrategy.PEAK_AMPLITUDE,
    cfg=None,
    jobs: int = 1,
    remote=None,
) -> tuple[CalibrationModel, list[str]]:
    cfg = cfg or default_config()
    labeled, warnings, ids = [], [], []
    for uid, dists, labels, warns in manifest_distances(manifest, cfg, strategy, jobs, remote):
        warnings += warns
        if not labels:
            continue
        ids.append(uid)
        labeled += [(wd, labels[wd.index]) for wd in dists if wd.index in labels]
    if not labeled:
        raise EmptyPool("empty calibration pools: manifest has no labeled words")
    model = calibrate(labeled, alpha, percentile, strategy, cfg, ids)
    return model, warnings + list(model.warnings)


def evaluate_manifest(
    model: CalibrationModel,
    manifest: Manifest,
    decision: DecisionStrategy = DecisionStrategy.GLOBAL,
    ambiguous_as: str = "incorrect",
    group_by: str = "outcome",
    jobs: int = 1,
    remote=None,
) -> dict:
    """Detect every labeled word of the manifest and build the report dictionary."""
    warnings = []
    overlap = sorted(set(model.calibration_ids) & set(manifest.ids))
    if overlap:
        warnings.append(f"train/test overlap: {len(overlap)} utterance(s) were used for calibration")
    resolved, fallback = effective_strategy(model, decision)
    warnings += fallback
    rows: list[tuple[WordVerdict, str]] = []
    for uid, dists, labels, warns in manifest_distances(manifest, model.mfcc_config, model.strategy, jobs, remote):
        warnings += warns
        verdicts, _ = decide_words(dists, model, resolved)
        if labels:
            rows += [(v, labels[v.index]) for v in verdicts if v.index in labels]
    return build_report(manifest.speaker, resolved, model, rows, ambiguous_as, group_by, warnings)


def build_report(
    speaker: str,
    strategy: DecisionStrategy,
    model: CalibrationModel,
    rows: list[tuple[WordVerdict, str]],
    ambiguous_as: str = "incorrect",
    group_by: str = "outcome",
    warnings: list[str] | None = None,
) -> dict:
    counts = {"correct": 0, "incorrect": 0, "ambiguous": 0}
    scored, grouped = [], []
    for v, truth in rows:
        counts[v.label.value.lower()] += 1
        pred = binarize(v.label, ambiguous_as)
        if pred is None:
            continue
        truth_cls = CLASS_NAMES.index(truth)
        scored.append((pred, truth_cls))
        if group_by == "truth":
            grouped.append((v.d_bar, truth))
        else:
            grouped.append((v.d_bar, "correct" if pred == truth_cls else "incorrect"))
    warnings = list(warnings or [])
    report: dict = {
        "version": REPORT_VERSION,
        "speaker": speaker,
        "strategy": DecisionStrategy(strategy).value,
        "normalization": model.strategy.value,
        "ambiguous_as": ambiguous_as,
        "counts": counts,
        "metadata": {"std": "population", "quantiles": "lower", "group_by": group_by},
    }
    if scored:
        cr = classification_report(scored)
        report["classes"] = [
            {"label": c.label, "name": CLASS_NAMES[c.label], "precision": c.precision,
             "recall": c.recall, "f1": c.f1, "support": c.support}
            for c in cr.classes
        ]
        report["accuracy"] = cr.accuracy
        report["confusion"] = [list(r) for r in cr.confusion]
        warnings += [f"undefined {u} (zero denominator, reported as 0)" for u in cr.undefined]
    else:
        report["classes"], report["accuracy"], report["confusion"] = [], None, None
        warnings.append("no scored words")
    summaries, sw = distance_summary(grouped)
    report["distance_summaries"] = [asdict(s) for s in summaries]
    report["warnings"] = warnings + sw
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
