"""13-dimensional MFCC envelopes for word spans."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct

from .audio import AudioBuffer
from .errors import BufferTooShort

N_COEFFS = 13
LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class MfccConfig:
    frame_length: float = 0.025
    hop_length: float = 0.010
    mel_filter_count: int = 26
    fft_size: int = 512
    pre_emphasis: float = 0.97
    include_c0: bool = True
    lifter: int = 0

    def __post_init__(self):
        if not (self.frame_length >= self.hop_length > 0):
            raise ValueError("need frame_length >= hop_length > 0")
        if self.mel_filter_count < N_COEFFS + (0 if self.include_c0 else 1):
            raise ValueError("too few mel filters for 13 coefficients")
        if not (0 <= self.pre_emphasis < 1):
            raise ValueError("pre_emphasis must be in [0, 1)")

    def frame_samples(self, sample_rate: int) -> int:
        return int(round(self.frame_length * sample_rate))

    def hop_samples(self, sample_rate: int) -> int:
        return int(round(self.hop_length * sample_rate))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MfccConfig":
        return cls(**d)


def default_config() -> MfccConfig:
    return MfccConfig()


@dataclass(frozen=True, eq=False)
class MfccMatrix:
    coeffs: np.ndarray       # (13, T)
    frame_times: np.ndarray  # (T,) frame centres, seconds

    @property
    def n_frames(self) -> int:
        return self.coeffs.shape[1]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=16)
def mel_filterbank(n_filters: int, fft_size: int, sample_rate: int) -> np.ndarray:
    """Triangular HTK-mel filters evaluated at FFT bin frequencies, shape (n_filters, fft_size//2+1)."""
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_filters + 2))
    freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    up = (freqs - lo) / (mid - lo)
    down = (hi - freqs) / (hi - mid)
    fb = np.maximum(0.0, np.minimum(up, down))
    fb.setflags(write=False)
    return fb


def frame_signal(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    n_frames = 1 + (len(x) - frame) // hop
    return np.lib.stride_tricks.sliding_window_view(x, frame)[::hop][:n_frames]


def extract_mfcc(a: AudioBuffer, cfg: MfccConfig | None = None) -> MfccMatrix:
    """MFCC matrix of a buffer: pre-emphasis, Hamming, |FFT|^2, mel, log, DCT-II (ortho)."""
    cfg = cfg or default_config()
    sr = a.sample_rate
    frame, hop = cfg.frame_samples(sr), cfg.hop_samples(sr)
    if cfg.fft_size < frame:
        raise ValueError(f"fft_size {cfg.fft_size} shorter than frame ({frame} samples)")
    x = a.samples
    if len(x) < frame:
        raise BufferTooShort(f"{len(x)} samples < one frame of {frame}")
    if cfg.pre_emphasis:
        x = np.concatenate(([x[0]], x[1:] - cfg.pre_emphasis * x[:-1]))
    frames = frame_signal(x, frame, hop) * np.hamming(frame)
    power = np.abs(np.fft.rfft(frames, cfg.fft_size)) ** 2
    mel = power @ mel_filterbank(cfg.mel_filter_count, cfg.fft_size, sr).T
    logmel = np.log(np.maximum(mel, LOG_FLOOR))
    cep = dct(logmel, type=2, axis=1, norm="ortho")
    cep = cep[:, :N_COEFFS] if cfg.include_c0 else cep[:, 1:N_COEFFS + 1]
    if cfg.lifter > 0:
        n = np.arange(N_COEFFS) + (0 if cfg.include_c0 else 1)
        cep = cep * (1.0 + (cfg.lifter / 2.0) * np.sin(np.pi * n / cfg.lifter))
    times = (np.arange(cep.shape[0]) * hop + frame / 2.0) / sr
    return MfccMatrix(np.ascontiguousarray(cep.T), times)
