"""Deterministic synthetic corpus: tone-complex "words" with real/clone pairs.

Each vocabulary word is a harmonic complex whose spectral envelope has two
formant-like peaks. A mispronounced word keeps its pitch but moves the formants
(a vowel-quality change); the clone always renders the canonical formants.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioBuffer, write_wav
from .corpus import Manifest, ManifestEntry
from .textgrid import Interval, IntervalTier, TextGrid, write_textgrid

VOCAB = (
    "robbery", "bribery", "fraud", "author", "danger", "thirty", "caught", "cottage",
    "harbor", "silver", "window", "mother", "river", "garden", "pocket", "yellow",
    "people", "market", "summer", "letter",
)


@dataclass(frozen=True)
class WordRecipe:
    word: str
    f1: float
    f2: float
    duration: float


def recipe(word: str) -> WordRecipe:
    # stable per-word parameters, independent of the corpus seed
    rng = np.random.default_rng(zlib.crc32(word.encode()))
    return WordRecipe(word, float(rng.uniform(350, 800)), float(rng.uniform(1100, 2300)), float(rng.uniform(0.28, 0.45)))


def synth_word(
    rec: WordRecipe,
    rng: np.random.Generator,
    f0: float,
    sr: int,
    stretch: float = 1.0,
    formant_shift: tuple[float, float] = (1.0, 1.0),
    jitter: float = 0.02,
    noise_db: float = -35.0,
) -> np.ndarray:
    n = int(round(rec.duration * stretch * sr))
    t = np.arange(n) / sr
    f1 = rec.f1 * formant_shift[0] * (1 + rng.uniform(-jitter, jitter))
    f2 = rec.f2 * formant_shift[1] * (1 + rng.uniform(-jitter, jitter))
    # slow pitch glide makes the frames differ over time, like a real syllable
    glide = 1.0 + 0.06 * np.sin(np.pi * t / t[-1])
    phase = 2 * np.pi * np.cumsum(f0 * glide) / sr
    x = np.zeros(n)
    for h in range(1, int(3800 // f0)):
        fh = h * f0
        amp = np.exp(-(((fh - f1) / 120.0) ** 2)) + 0.7 * np.exp(-(((fh - f2) / 160.0) ** 2)) + 0.02
        x += amp * np.sin(h * phase + rng.uniform(0, 2 * np.pi))
    ramp = min(int(0.02 * sr), n // 2)
    env = np.ones(n)
    env[:ramp] = np.linspace(0, 1, ramp)
    env[n - ramp:] = np.linspace(1, 0, ramp)
    x *= env / np.max(np.abs(x))
    return x + rng.normal(0, 10 ** (noise_db / 20), n)


@dataclass(frozen=True, eq=False)
class SyntheticUtterance:
    audio: AudioBuffer
    grid: TextGrid


def assemble(segments: list[tuple[str, np.ndarray]], rng: np.random.Generator, sr: int, peak: float) -> SyntheticUtterance:
    """Concatenate word signals with short silences and build the words tier."""
    lead = int(0.15 * sr)
    parts = [rng.normal(0, 1e-3, lead)]
    intervals = [Interval(0.0, lead / sr, "sil")]
    pos = lead
    for k, (word, sig) in enumerate(segments):
        if k:
            gap = int(rng.uniform(0.06, 0.12) * sr)
            parts.append(rng.normal(0, 1e-3, gap))
            intervals.append(Interval(pos / sr, (pos + gap) / sr, ""))
            pos += gap
        parts.append(sig)
        intervals.append(Interval(pos / sr, (pos + len(sig)) / sr, word))
        pos += len(sig)
    tail = int(0.15 * sr)
    parts.append(rng.normal(0, 1e-3, tail))
    intervals.append(Interval(pos / sr, (pos + tail) / sr, "sil"))
    x = np.concatenate(parts)
    x *= peak / np.max(np.abs(x))
    xmax = len(x) / sr
    grid = TextGrid(0.0, xmax, (IntervalTier("words", tuple(intervals), 0.0, xmax),))
    return SyntheticUtterance(AudioBuffer(x, sr), grid)


def make_pair(
    words: list[str],
    mispronounced: list[bool],
    rng: np.random.Generator,
    sr: int = 16000,
    formant_shift: tuple[float, float] = (1.25, 1.45),
) -> tuple[SyntheticUtterance, SyntheticUtterance]:
    """One real utterance and its clone; flagged words get shifted formants in the real take only."""
    f0 = float(rng.uniform(105, 180))
    peak = float(rng.uniform(0.5, 0.9))
    real, clone = [], []
    for w, bad in zip(words, mispronounced):
        rec = recipe(w)
        shift = formant_shift if bad else (1.0, 1.0)
        real.append((w, synth_word(rec, rng, f0, sr, formant_shift=shift)))
        stretch = float(rng.uniform(0.9, 1.1))
        clone.append((w, synth_word(rec, rng, f0 * (1 + rng.uniform(-0.03, 0.03)), sr, stretch=stretch)))
    real_utt = assemble(real, rng, sr, peak)
    clone_utt = assemble(clone, rng, sr, peak * float(rng.uniform(0.95, 1.05)))
    return real_utt, clone_utt


def generate_corpus(
    out_dir: str | Path,
    seed: int = 42,
    n_utterances: int = 10,
    words_per_utt: int = 5,
    misp_rate: float = 0.4,
    holdout: int = 0,
    speaker: str = "SYN",
    sr: int = 16000,
) -> Manifest:
    """Write WAV/TextGrid pairs plus manifest.json (and calibrate/evaluate splits when holdout > 0)."""
    if not 0 <= misp_rate <= 1:
        raise ValueError("misp_rate must lie in [0, 1]")
    if words_per_utt > len(VOCAB):
        raise ValueError(f"at most {len(VOCAB)} words per utterance")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    total = n_utterances * words_per_utt
    n_bad = int(round(misp_rate * total))
    bad = np.zeros(total, dtype=bool)
    bad[rng.choice(total, size=n_bad, replace=False)] = True

    entries = []
    for u in range(n_utterances):
        uid = f"{speaker.lower()}_a{u + 1:04d}"
        idx = rng.choice(len(VOCAB), size=words_per_utt, replace=False)
        words = [VOCAB[i] for i in idx]
        flags = bad[u * words_per_utt:(u + 1) * words_per_utt].tolist()
        real, clone = make_pair(words, flags, rng, sr)
        write_wav(real.audio, out / f"{uid}.wav")
        write_textgrid(real.grid, out / f"{uid}.TextGrid")
        write_wav(clone.audio, out / f"{uid}_clone.wav")
        write_textgrid(clone.grid, out / f"{uid}_clone.TextGrid")
        entries.append(ManifestEntry(
            utterance_id=uid,
            real_wav=f"{uid}.wav",
            real_textgrid=f"{uid}.TextGrid",
            clone_wav=f"{uid}_clone.wav",
            clone_textgrid=f"{uid}_clone.TextGrid",
            transcript=" ".join(words),
            word_labels=tuple((k, "incorrect" if f else "correct") for k, f in enumerate(flags)),
        ))
    manifest = Manifest(speaker, tuple(entries), out)
    manifest.save(out / "manifest.json")
    if holdout:
        cut = n_utterances - holdout
        Manifest(speaker, tuple(entries[:cut]), out).save(out / "manifest_calibrate.json")
        Manifest(speaker, tuple(entries[cut:]), out).save(out / "manifest_evaluate.json")
    return manifest
