import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.io import wavfile

from mispron import audio
from mispron.audio import AudioBuffer, decode_wav, encode_wav, peak_amplitude, resample
from mispron.errors import CorruptContainer, EmptyBuffer, SpanOutOfRange, UnsupportedFormat


def wav_bytes(data, rate=16000):
    buf = io.BytesIO()
    wavfile.write(buf, rate, data)
    return buf.getvalue()


def test_zeros_pcm16():
    a = decode_wav(wav_bytes(np.zeros(16000, dtype=np.int16)))
    assert len(a) == 16000 and a.sample_rate == 16000
    assert np.all(a.samples == 0.0)
    assert a.duration == pytest.approx(1.0)


def test_pcm16_scaling():
    a = decode_wav(wav_bytes(np.array([32767], dtype=np.int16)))
    assert a.samples[0] == pytest.approx(32767 / 32768)
    assert a.samples[0] == pytest.approx(0.99997, abs=1e-5)


def test_stereo_downmix():
    st_ = np.tile(np.array([[0.5, -0.5]], dtype=np.float32), (100, 1))
    a = decode_wav(wav_bytes(st_))
    assert a.samples.shape == (100,)
    assert np.all(a.samples == 0.0)


def test_float32_mono():
    x = np.linspace(-1, 1, 50, dtype=np.float32)
    a = decode_wav(wav_bytes(x))
    np.testing.assert_allclose(a.samples, x, atol=1e-7)


def test_compressed_rejected():
    # minimal RIFF with a mu-law (format tag 7) fmt chunk
    fmt = struct.pack("<HHIIHH", 7, 1, 8000, 8000, 1, 8)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", 4) + b"\0\0\0\0"
    with pytest.raises(UnsupportedFormat):
        decode_wav(b"RIFF" + struct.pack("<I", len(body)) + body)


def test_pcm8_rejected():
    with pytest.raises(UnsupportedFormat):
        decode_wav(wav_bytes(np.zeros(10, dtype=np.uint8)))


@pytest.mark.parametrize("data", [b"", b"not a wav at all", wav_bytes(np.zeros(10, dtype=np.int16))[:30]])
def test_corrupt(data):
    with pytest.raises(CorruptContainer):
        decode_wav(data)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=200))
def test_pcm16_roundtrip(xs):
    a = AudioBuffer(np.array(xs), 16000)
    b = decode_wav(encode_wav(a))
    assert np.max(np.abs(a.samples - b.samples)) <= 1 / 32768


def test_peak():
    assert peak_amplitude(AudioBuffer([0.1, -0.7, 0.3], 16000)) == pytest.approx(0.7)
    assert peak_amplitude(AudioBuffer(np.zeros(10), 16000)) == 0.0
    with pytest.raises(EmptyBuffer):
        peak_amplitude(AudioBuffer([], 16000))


def test_peak_of_sine():
    t = np.arange(16000) / 16000
    assert peak_amplitude(AudioBuffer(0.5 * np.sin(2 * np.pi * 440 * t), 16000)) == pytest.approx(0.5, abs=1e-3)


def test_slice():
    a = AudioBuffer(np.random.default_rng(0).uniform(-1, 1, 16000), 16000)
    same = audio.slice(a, 0.0, 1.0)
    assert np.array_equal(same.samples, a.samples)
    assert len(audio.slice(a, 0.25, 0.5)) == 4000
    assert audio.slice(a, 0.25, 0.5).sample_rate == 16000
    with pytest.raises(SpanOutOfRange):
        audio.slice(a, 0.5, 0.25)
    with pytest.raises(SpanOutOfRange):
        audio.slice(a, 0.5, 1.5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.98), st.floats(0.01, 1.0))
def test_slice_peak_bounded(s, width):
    a = AudioBuffer(np.random.default_rng(1).uniform(-1, 1, 1000), 1000)
    e = min(1.0, s + width)
    if e - s >= 0.002:
        assert peak_amplitude(audio.slice(a, s, e)) <= peak_amplitude(a)


def test_resample_identity():
    a = AudioBuffer(np.random.default_rng(0).normal(0, 0.1, 500), 16000)
    assert resample(a, 16000).samples.tobytes() == a.samples.tobytes()


@pytest.mark.parametrize("src", [32000, 44100, 22050, 8000])
def test_resample_dc(src):
    y = resample(AudioBuffer(np.full(src, 0.3), src), 16000)
    assert abs(len(y) - 16000) <= 1
    interior = y.samples[50:-50]
    assert np.max(np.abs(interior - 0.3)) < 1e-6


def test_resample_sine_peak():
    src = 44100
    t = np.arange(src) / src
    y = resample(AudioBuffer(0.5 * np.sin(2 * np.pi * 1000 * t), src), 16000)
    assert y.duration == pytest.approx(1.0, abs=1 / 16000)
    # FFT-peak oracle with zero padding for sub-Hz bin spacing
    n = 16 * len(y)
    spec = np.abs(np.fft.rfft(y.samples * np.hanning(len(y)), n))
    peak_hz = np.argmax(spec) * 16000 / n
    assert abs(peak_hz - 1000) < 1.0


def test_resample_bad_rate():
    with pytest.raises(ValueError):
        resample(AudioBuffer([0.0], 16000), 0)
