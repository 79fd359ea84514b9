"""Normalized per-word distances between a real utterance and its clone."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from . import audio
from .audio import AudioBuffer
from .dtw import dtw_joint, dtw_per_coefficient
from .errors import BufferTooShort, ZeroPeak
from .mfcc import N_COEFFS, MfccConfig, default_config, extract_mfcc
from .textgrid import WordAlignment

log = logging.getLogger(__name__)


class NormalizationStrategy(str, Enum):
    PEAK_AMPLITUDE = "peak-amplitude"
    PER_COEFFICIENT_MEAN = "per-coefficient-mean"


@dataclass(frozen=True)
class WordDistance:
    word: str
    index: int
    d_dtw: float
    d_bar: float
    strategy: NormalizationStrategy


def word_distance(
    real_span_audio: AudioBuffer,
    clone_span_audio: AudioBuffer,
    utterance_peak: float,
    cfg: MfccConfig | None = None,
    strategy: NormalizationStrategy = NormalizationStrategy.PEAK_AMPLITUDE,
    word: str = "",
    index: int = 0,
) -> WordDistance:
    """Distance between two word spans.

    PEAK_AMPLITUDE divides the joint DTW distance by the peak of the whole
    real utterance. PER_COEFFICIENT_MEAN averages the 13 per-coefficient DTW
    distances over coefficients and resampled frames; ``d_dtw`` then holds
    their sum.
    """
    cfg = cfg or default_config()
    strategy = NormalizationStrategy(strategy)
    real_m = extract_mfcc(real_span_audio, cfg)
    clone_m = extract_mfcc(clone_span_audio, cfg)
    if strategy is NormalizationStrategy.PEAK_AMPLITUDE:
        if not utterance_peak > 0:
            raise ZeroPeak("real utterance is all-silent; cannot normalize by peak amplitude")
        d = dtw_joint(real_m, clone_m).distance
        return WordDistance(word, index, d, d / utterance_peak, strategy)
    dists, t_hat = dtw_per_coefficient(real_m, clone_m)
    total = float(dists.sum())
    return WordDistance(word, index, total, total / (N_COEFFS * t_hat), strategy)


def alignment_distances(
    real: AudioBuffer,
    clone: AudioBuffer,
    alignments: list[WordAlignment],
    cfg: MfccConfig | None = None,
    strategy: NormalizationStrategy = NormalizationStrategy.PEAK_AMPLITUDE,
) -> tuple[list[WordDistance], list[str]]:
    """Distances for every aligned word; too-short spans are skipped with a warning."""
    peak = audio.peak_amplitude(real)
    if strategy == NormalizationStrategy.PEAK_AMPLITUDE and peak <= 0:
        raise ZeroPeak("real utterance is all-silent; cannot normalize by peak amplitude")
    out, warnings = [], []
    for wa in alignments:
        rs = audio.slice(real, *_clamp(wa.real_span, real.duration))
        cs = audio.slice(clone, *_clamp(wa.clone_span, clone.duration))
        try:
            out.append(word_distance(rs, cs, peak, cfg, strategy, wa.word, wa.index))
        except BufferTooShort as exc:
            msg = f"skipped word {wa.index} {wa.word!r}: {exc}"
            log.warning(msg)
            warnings.append(msg)
    return out, warnings


def _clamp(span: tuple[float, float], duration: float) -> tuple[float, float]:
    # grids are often written with a few ms of rounding past the audio end
    s, e = span
    return max(0.0, s), min(e, duration)
