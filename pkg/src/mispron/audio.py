"""WAV decoding, peak amplitude, span slicing and resampling."""
from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import firwin, resample_poly

from .errors import CorruptContainer, EmptyBuffer, SpanOutOfRange, UnsupportedFormat

CANONICAL_RATE = 16000


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)


def decode_wav(data: bytes) -> AudioBuffer:
    """Decode PCM16 or float32 WAV bytes to a mono buffer in [-1, 1]."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptContainer("not a RIFF/WAVE container")
    try:
        rate, raw = wavfile.read(io.BytesIO(data))
    except ValueError as exc:
        msg = str(exc)
        if "Unknown wave file format" in msg or "Unsupported" in msg or "not understood" in msg:
            raise UnsupportedFormat(msg) from None
        raise CorruptContainer(msg) from None
    except (EOFError, OSError, IndexError, struct.error) as exc:
        raise CorruptContainer(str(exc)) from None
    if raw.dtype == np.int16:
        x = raw.astype(np.float64) / 32768.0
    elif raw.dtype == np.float32:
        x = np.clip(raw.astype(np.float64), -1.0, 1.0)
    else:
        raise UnsupportedFormat(f"sample type {raw.dtype} (need PCM16 or float32)")
    if x.ndim == 2:
        x = x.mean(axis=1)
    return AudioBuffer(x, int(rate))


def encode_wav(a: AudioBuffer) -> bytes:
    """PCM16 encoding, round-to-nearest with clipping."""
    pcm = np.clip(np.round(a.samples * 32768.0), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    wavfile.write(buf, a.sample_rate, pcm)
    return buf.getvalue()


def read_wav(path: str | Path, target_rate: int | None = CANONICAL_RATE) -> AudioBuffer:
    a = decode_wav(Path(path).read_bytes())
    return resample(a, target_rate) if target_rate else a


def write_wav(a: AudioBuffer, path: str | Path) -> None:
    Path(path).write_bytes(encode_wav(a))


def peak_amplitude(a: AudioBuffer) -> float:
    if len(a) == 0:
        raise EmptyBuffer("peak of empty buffer")
    return float(np.max(np.abs(a.samples)))


def slice(a: AudioBuffer, start: float, end: float) -> AudioBuffer:  # noqa: A001
    if not (0 <= start < end <= a.duration + 1e-9):
        raise SpanOutOfRange(f"span [{start}, {end}) outside [0, {a.duration}]")
    i0 = math.floor(start * a.sample_rate)
    i1 = min(math.floor(end * a.sample_rate), len(a))
    return AudioBuffer(a.samples[i0:i1], a.sample_rate)


def _dc_exact_filter(up: int, down: int) -> np.ndarray:
    # each polyphase branch is normalized to unit DC gain after resample_poly's ``h *= up``
    max_rate = max(up, down)
    half_len = 10 * max_rate
    h = firwin(2 * half_len + 1, 1.0 / max_rate, window=("kaiser", 5.0))
    for k in range(up):
        branch = h[k::up]
        total = branch.sum()
        if total != 0:
            h[k::up] = branch / (total * up)
    return h


def resample(a: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Polyphase resampling with a linear-phase Kaiser-windowed sinc."""
    if target_rate <= 0:
        raise ValueError(f"target rate must be positive, got {target_rate}")
    if target_rate == a.sample_rate:
        return a
    ratio = Fraction(target_rate, a.sample_rate)
    up, down = ratio.numerator, ratio.denominator
    y = resample_poly(a.samples, up, down, window=_dc_exact_filter(up, down), padtype="line")
    return AudioBuffer(np.clip(y, -1.0, 1.0), target_rate)
