"""Manifest files and loaded real/clone utterance pairs."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .audio import AudioBuffer, read_wav
from .clone_provider import CloneRequest, CloneResult
from .errors import CloneNotFound, ManifestError
from .textgrid import (
    TextGrid,
    WordAlignment,
    extract_word_alignments,
    proportional_alignments,
    read_textgrid,
    word_intervals,
)

MANIFEST_VERSION = "1.0"


@dataclass(frozen=True)
class ManifestEntry:
    utterance_id: str
    real_wav: str
    real_textgrid: str
    clone_wav: str | None = None
    clone_textgrid: str | None = None
    transcript: str | None = None
    word_labels: tuple[tuple[int, str], ...] | None = None

    def to_dict(self) -> dict:
        d = {"utterance_id": self.utterance_id, "real_wav": self.real_wav, "real_textgrid": self.real_textgrid}
        for key in ("clone_wav", "clone_textgrid", "transcript"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        if self.word_labels is not None:
            d["word_labels"] = [{"index": i, "label": lab} for i, lab in self.word_labels]
        return d


@dataclass(frozen=True)
class Manifest:
    speaker: str
    entries: tuple[ManifestEntry, ...]
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        ids = [e.utterance_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ManifestError("duplicate utterance_id in manifest")

    def to_dict(self) -> dict:
        return {
            "version": MANIFEST_VERSION,
            "speaker": self.speaker,
            "entries": [e.to_dict() for e in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def resolve(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def ids(self) -> list[str]:
        return [e.utterance_id for e in self.entries]


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from None
    if str(d.get("version", "1")).split(".")[0] != MANIFEST_VERSION.split(".")[0]:
        raise ManifestError(f"unsupported manifest version {d.get('version')}")
    entries = []
    try:
        for e in d["entries"]:
            labels = e.get("word_labels")
            if labels is not None:
                labels = tuple((int(x["index"]), str(x["label"])) for x in labels)
                bad = [lab for _, lab in labels if lab not in ("correct", "incorrect")]
                if bad:
                    raise ManifestError(f"{e['utterance_id']}: bad word labels {bad}")
            entries.append(ManifestEntry(
                utterance_id=str(e["utterance_id"]),
                real_wav=e["real_wav"],
                real_textgrid=e["real_textgrid"],
                clone_wav=e.get("clone_wav"),
                clone_textgrid=e.get("clone_textgrid"),
                transcript=e.get("transcript"),
                word_labels=labels,
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"malformed manifest entry: {exc}") from None
    return Manifest(str(d.get("speaker", "")), tuple(entries), path.parent)


@dataclass(frozen=True, eq=False)
class UtterancePair:
    utterance_id: str
    real_audio: AudioBuffer
    real_grid: TextGrid
    clone_audio: AudioBuffer
    clone_grid: TextGrid | None = None
    labels: dict[int, str] | None = None
    tier_name: str = "words"

    def alignments(self) -> tuple[list[WordAlignment], list[str]]:
        if self.clone_grid is not None:
            return extract_word_alignments(self.real_grid, self.clone_grid, self.tier_name), []
        warn = f"{self.utterance_id}: LOW-FIDELITY clone spans (no clone TextGrid, proportional mapping)"
        return proportional_alignments(self.real_grid, self.clone_audio.duration, self.tier_name), [warn]

    def transcript(self) -> str:
        return " ".join(iv.label.strip() for iv in word_intervals(self.real_grid.tier(self.tier_name)))


def load_pair(
    entry: ManifestEntry,
    manifest: Manifest,
    remote: Callable[[CloneRequest], CloneResult] | None = None,
    tier_name: str = "words",
) -> UtterancePair:
    """Load real audio/grid and the clone, falling back to ``remote`` when no clone file is listed."""
    real_audio = read_wav(manifest.resolve(entry.real_wav))
    real_grid = read_textgrid(manifest.resolve(entry.real_textgrid))
    if entry.clone_wav is not None:
        clone_audio = read_wav(manifest.resolve(entry.clone_wav))
        clone_grid = read_textgrid(manifest.resolve(entry.clone_textgrid)) if entry.clone_textgrid else None
    elif remote is not None:
        transcript = entry.transcript or " ".join(
            iv.label.strip() for iv in word_intervals(real_grid.tier(tier_name))
        )
        res = remote(CloneRequest(entry.utterance_id, transcript, manifest.speaker, real_audio))
        clone_audio, clone_grid = res.audio, res.alignment
    else:
        raise CloneNotFound(f"{entry.utterance_id}: no clone_wav and no remote endpoint")
    labels = None
    if entry.word_labels is not None:
        n_words = len(word_intervals(real_grid.tier(tier_name)))
        labels = dict(entry.word_labels)
        out_of_range = [i for i in labels if not 0 <= i < n_words]
        if out_of_range:
            raise ManifestError(f"{entry.utterance_id}: label indices {out_of_range} outside {n_words} words")
    return UtterancePair(entry.utterance_id, real_audio, real_grid, clone_audio, clone_grid, labels, tier_name)
