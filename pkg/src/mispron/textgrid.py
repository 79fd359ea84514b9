"""Praat TextGrid (long text format) reading/writing and word-span pairing."""
from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedTextGrid, TierNotFound, WordSequenceMismatch

SILENCE_LABELS = frozenset({"", "sp", "sil", "spn", "<unk>"})

_TOKEN_RE = re.compile(r'"(?:[^"]|"")*"|[^\s"]+')


@dataclass(frozen=True)
class Interval:
    start: float
    end: float
    label: str


@dataclass(frozen=True)
class IntervalTier:
    name: str
    intervals: tuple[Interval, ...]
    xmin: float = 0.0
    xmax: float = 0.0


@dataclass(frozen=True)
class TextGrid:
    xmin: float
    xmax: float
    tiers: tuple[IntervalTier, ...] = field(default_factory=tuple)

    def tier(self, name: str) -> IntervalTier:
        want = name.lower()
        for t in self.tiers:
            if t.name.lower() == want:
                return t
        raise TierNotFound(f"no tier named {name!r} (have {[t.name for t in self.tiers]})")


@dataclass(frozen=True)
class WordAlignment:
    word: str
    real_span: tuple[float, float]
    clone_span: tuple[float, float]
    index: int


def is_silence(label: str) -> bool:
    return label.strip().lower() in SILENCE_LABELS


def normalize_word(label: str) -> str:
    return label.strip().strip(string.punctuation).lower()


# --- parsing -----------------------------------------------------------------

class _Tokens:
    def __init__(self, content: str):
        self.toks = _TOKEN_RE.findall(content)
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        if self.pos >= len(self.toks):
            raise MalformedTextGrid("unexpected end of file")
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, literal: str) -> None:
        tok = self.next()
        if tok != literal:
            raise MalformedTextGrid(f"expected {literal!r}, got {tok!r} at token {self.pos}")

    def keyed(self, key: str) -> str:
        self.expect(key)
        self.expect("=")
        return self.next()

    def number(self, key: str) -> float:
        raw = self.keyed(key)
        try:
            return float(raw)
        except ValueError:
            raise MalformedTextGrid(f"non-numeric value for {key}: {raw!r}") from None

    def count(self, key: str) -> int:
        value = self.number(key)
        if value != int(value) or value < 0:
            raise MalformedTextGrid(f"bad count for {key}: {value}")
        return int(value)

    def string(self, key: str) -> str:
        raw = self.keyed(key)
        if len(raw) < 2 or raw[0] != '"' or raw[-1] != '"':
            raise MalformedTextGrid(f"expected quoted string for {key}, got {raw!r}")
        return raw[1:-1].replace('""', '"')

    def block(self, name: str, index: int | None) -> None:
        """Consume ``name [i]:`` (or ``name[i]:``, ``name []:``)."""
        want = "[]:" if index is None else f"[{index}]:"
        tok = self.next()
        if tok == name + want:
            return
        if tok != name:
            raise MalformedTextGrid(f"expected block {name}{want}, got {tok!r}")
        tok = self.next()
        if tok != want:
            raise MalformedTextGrid(f"unbalanced item blocks: expected {name} {want}, got {tok!r}")


def decode_textgrid_bytes(data: bytes) -> str:
    if data.startswith(b"\xff\xfe") or data.startswith(b"\xfe\xff"):
        return data.decode("utf-16")
    if data.startswith(b"\xef\xbb\xbf"):
        return data[3:].decode("utf-8")
    return data.decode("utf-8")


def parse_textgrid(content: str) -> TextGrid:
    """Parse a TextGrid in Praat's long text format.

    Point tiers (``TextTier``) are read and dropped. Short and binary formats
    raise :class:`MalformedTextGrid`.
    """
    content = content.lstrip("﻿")
    toks = _Tokens(content)
    try:
        toks.expect("File")
        if toks.string("type") != "ooTextFile":
            raise MalformedTextGrid("not an ooTextFile")
        toks.expect("Object")
        if toks.string("class") != "TextGrid":
            raise MalformedTextGrid("object class is not TextGrid")
    except MalformedTextGrid as exc:
        raise MalformedTextGrid(f"missing header: {exc}") from None
    if toks.peek() != "xmin":
        raise MalformedTextGrid("only the long text format is supported")
    xmin = toks.number("xmin")
    xmax = toks.number("xmax")
    if xmax < xmin:
        raise MalformedTextGrid(f"xmax {xmax} < xmin {xmin}")
    flag = toks.next()
    if flag != "tiers?":
        raise MalformedTextGrid(f"expected 'tiers?', got {flag!r}")
    exists = toks.next()
    if exists == "<absent>":
        return TextGrid(xmin, xmax, ())
    if exists != "<exists>":
        raise MalformedTextGrid(f"bad tiers flag {exists!r}")
    size = toks.count("size")
    if size == 0:
        if toks.peek() == "item":
            toks.block("item", None)
        return TextGrid(xmin, xmax, ())
    toks.block("item", None)

    tiers = []
    for i in range(1, size + 1):
        toks.block("item", i)
        cls = toks.string("class")
        name = toks.string("name")
        txmin = toks.number("xmin")
        txmax = toks.number("xmax")
        if cls == "IntervalTier":
            toks.expect("intervals:")
            n = toks.count("size")
            intervals = []
            for k in range(1, n + 1):
                toks.block("intervals", k)
                s = toks.number("xmin")
                e = toks.number("xmax")
                label = toks.string("text")
                intervals.append(Interval(s, e, label))
            tier = IntervalTier(name, tuple(intervals), txmin, txmax)
            _check_tier(tier, xmin, xmax)
            tiers.append(tier)
        elif cls == "TextTier":
            toks.expect("points:")
            n = toks.count("size")
            for k in range(1, n + 1):
                toks.block("points", k)
                toks.number("number")
                toks.string("mark")
        else:
            raise MalformedTextGrid(f"unknown tier class {cls!r}")
    if toks.peek() is not None:
        raise MalformedTextGrid(f"unbalanced item blocks: trailing token {toks.peek()!r}")
    return TextGrid(xmin, xmax, tuple(tiers))


def _check_tier(tier: IntervalTier, xmin: float, xmax: float) -> None:
    prev_end = xmin
    for iv in tier.intervals:
        if iv.end < iv.start or (iv.end == iv.start and not is_silence(iv.label)):
            raise MalformedTextGrid(f"tier {tier.name!r}: bad interval {iv}")
        if iv.start < prev_end - 1e-9:
            raise MalformedTextGrid(f"tier {tier.name!r}: overlapping/unsorted intervals at {iv.start}")
        prev_end = iv.end
    if tier.intervals and (tier.intervals[0].start < xmin - 1e-9 or prev_end > xmax + 1e-9):
        raise MalformedTextGrid(f"tier {tier.name!r} extends outside [{xmin}, {xmax}]")


def read_textgrid(path: str | Path) -> TextGrid:
    return parse_textgrid(decode_textgrid_bytes(Path(path).read_bytes()))


# --- writing -----------------------------------------------------------------

def _num(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def serialize_textgrid(grid: TextGrid) -> str:
    out = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        f"xmin = {_num(grid.xmin)} ",
        f"xmax = {_num(grid.xmax)} ",
    ]
    if not grid.tiers:
        out += ["tiers? <exists> ", "size = 0 "]
        return "\n".join(out) + "\n"
    out += ["tiers? <exists> ", f"size = {len(grid.tiers)} ", "item []: "]
    for i, tier in enumerate(grid.tiers, 1):
        out += [
            f"    item [{i}]:",
            '        class = "IntervalTier" ',
            f"        name = {_quote(tier.name)} ",
            f"        xmin = {_num(tier.xmin)} ",
            f"        xmax = {_num(tier.xmax)} ",
            f"        intervals: size = {len(tier.intervals)} ",
        ]
        for k, iv in enumerate(tier.intervals, 1):
            out += [
                f"        intervals [{k}]:",
                f"            xmin = {_num(iv.start)} ",
                f"            xmax = {_num(iv.end)} ",
                f"            text = {_quote(iv.label)} ",
            ]
    return "\n".join(out) + "\n"


def write_textgrid(grid: TextGrid, path: str | Path) -> None:
    Path(path).write_text(serialize_textgrid(grid), encoding="utf-8")


def words_tier(words: list[tuple[float, float, str]], xmax: float, name: str = "words") -> IntervalTier:
    """Build a tier from word spans, filling gaps with empty intervals."""
    intervals = []
    t = 0.0
    for s, e, w in sorted(words):
        if s > t:
            intervals.append(Interval(t, s, ""))
        intervals.append(Interval(s, e, w))
        t = e
    if t < xmax:
        intervals.append(Interval(t, xmax, ""))
    return IntervalTier(name, tuple(intervals), 0.0, xmax)


# --- alignment ---------------------------------------------------------------

def word_intervals(tier: IntervalTier) -> list[Interval]:
    return [iv for iv in tier.intervals if not is_silence(iv.label)]


def extract_word_alignments(real: TextGrid, clone: TextGrid, tier_name: str = "words") -> list[WordAlignment]:
    """Pair the k-th non-silence word of the real grid with the k-th of the clone grid."""
    rw = word_intervals(real.tier(tier_name))
    cw = word_intervals(clone.tier(tier_name))
    if len(rw) != len(cw):
        raise WordSequenceMismatch(f"real has {len(rw)} words, clone has {len(cw)}")
    out = []
    for k, (r, c) in enumerate(zip(rw, cw)):
        if normalize_word(r.label) != normalize_word(c.label):
            raise WordSequenceMismatch(f"word {k}: real {r.label!r} != clone {c.label!r}")
        out.append(WordAlignment(r.label.strip(), (r.start, r.end), (c.start, c.end), k))
    return out


def proportional_alignments(real: TextGrid, clone_duration: float, tier_name: str = "words") -> list[WordAlignment]:
    """Low-fidelity fallback when the clone has no TextGrid.

    Each clone span is the real span rescaled by clone_duration / real_duration.
    """
    rw = word_intervals(real.tier(tier_name))
    real_dur = real.xmax - real.xmin
    scale = clone_duration / real_dur if real_dur > 0 else 0.0
    return [
        WordAlignment(
            iv.label.strip(),
            (iv.start, iv.end),
            ((iv.start - real.xmin) * scale, (iv.end - real.xmin) * scale),
            k,
        )
        for k, iv in enumerate(rw)
    ]


def word_labels_from_errors(
    alignments: list[WordAlignment],
    flagged: set[int] | None = None,
    error_tier: IntervalTier | None = None,
) -> list[str]:
    """Ground-truth labels per word.

    A word is "incorrect" if its index is in ``flagged`` or if some labeled
    interval of ``error_tier`` overlaps the word's real span by more than half
    of that error interval's own duration.
    """
    flagged = flagged or set()
    errors = [iv for iv in error_tier.intervals if iv.label.strip()] if error_tier else []
    labels = []
    for wa in alignments:
        bad = wa.index in flagged
        s, e = wa.real_span
        for iv in errors:
            dur = iv.end - iv.start
            overlap = min(e, iv.end) - max(s, iv.start)
            if dur > 0 and overlap > 0.5 * dur:
                bad = True
                break
        labels.append("incorrect" if bad else "correct")
    return labels
