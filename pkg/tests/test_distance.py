import numpy as np
import pytest

from mispron import distance
from mispron.audio import AudioBuffer
from mispron.distance import NormalizationStrategy as NS, alignment_distances, word_distance
from mispron.errors import ZeroPeak
from mispron.textgrid import WordAlignment

SR = 16000


def noise(seed, n=4000, amp=0.3):
    return AudioBuffer(np.random.default_rng(seed).normal(0, amp, n), SR)


def vowel(f1, f2, n=4000, amp=0.5, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(n) / SR
    x = np.sin(2 * np.pi * f1 * t) + 0.6 * np.sin(2 * np.pi * f2 * t) + rng.normal(0, 0.01, n)
    return AudioBuffer(amp * x / np.max(np.abs(x)), SR)


def test_identity_zero():
    a = noise(1)
    wd = word_distance(a, a, 0.8)
    assert wd.d_dtw == 0.0 and wd.d_bar == 0.0
    wd = word_distance(a, a, 0.8, strategy=NS.PER_COEFFICIENT_MEAN)
    assert wd.d_dtw == 0.0 and wd.d_bar == 0.0


def test_peak_division(monkeypatch):
    from mispron.dtw import DtwResult

    monkeypatch.setattr(distance, "dtw_joint", lambda a, b: DtwResult(2.0))
    wd = word_distance(noise(1), noise(2), 0.5)
    assert wd.d_dtw == 2.0 and wd.d_bar == 4.0


def test_per_coefficient_normalization(monkeypatch):
    dists = np.full(13, 2.0)  # sums to 26
    monkeypatch.setattr(distance, "dtw_per_coefficient", lambda a, b: (dists, 10))
    wd = word_distance(noise(1), noise(2), 0.5, strategy=NS.PER_COEFFICIENT_MEAN)
    assert wd.d_dtw == 26.0
    assert wd.d_bar == pytest.approx(0.2)


def test_zero_peak():
    with pytest.raises(ZeroPeak):
        word_distance(noise(1), noise(2), 0.0)
    # the per-coefficient form does not use the peak
    word_distance(noise(1), noise(2), 0.0, strategy=NS.PER_COEFFICIENT_MEAN)


def test_per_coefficient_swap_invariant():
    a, b = noise(3, 4000), noise(4, 5600)
    ab = word_distance(a, b, 1.0, strategy=NS.PER_COEFFICIENT_MEAN).d_bar
    ba = word_distance(b, a, 1.0, strategy=NS.PER_COEFFICIENT_MEAN).d_bar
    assert ab == pytest.approx(ba, rel=1e-12)


def test_peak_scaling_halves_distance():
    # real and clone spans carry the same loudness change, so c0 shifts cancel
    real, clone = vowel(500, 1500, seed=1), vowel(560, 1900, n=4400, seed=2)
    peak = 0.5
    base = word_distance(real, clone, peak)
    loud = word_distance(AudioBuffer(2 * real.samples, SR), AudioBuffer(2 * clone.samples, SR), 2 * peak)
    assert loud.d_bar == pytest.approx(base.d_bar / 2, rel=0.02)


def test_deterministic():
    a, b = noise(5), noise(6)
    assert word_distance(a, b, 0.9).d_bar == word_distance(a, b, 0.9).d_bar


def test_short_span_skipped_with_warning():
    real = noise(7, 16000)
    clone = noise(8, 16000)
    al = [WordAlignment("ok", (0.1, 0.4), (0.1, 0.4), 0), WordAlignment("tiny", (0.5, 0.51), (0.5, 0.51), 1)]
    out, warnings = alignment_distances(real, clone, al)
    assert [w.word for w in out] == ["ok"]
    assert len(warnings) == 1 and "tiny" in warnings[0]


def test_alignment_distances_zero_peak():
    silent = AudioBuffer(np.zeros(16000), SR)
    with pytest.raises(ZeroPeak):
        alignment_distances(silent, silent, [WordAlignment("a", (0.1, 0.4), (0.1, 0.4), 0)])
