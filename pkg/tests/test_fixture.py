import numpy as np

from mispron.corpus import load_manifest
from mispron.fixture import VOCAB, generate_corpus, make_pair, recipe


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_counts(tmp_path):
    m = generate_corpus(tmp_path, seed=42, n_utterances=10, words_per_utt=5, misp_rate=0.4)
    labels = [lab for e in m.entries for _, lab in e.word_labels]
    assert len(m.entries) == 10 and len(labels) == 50
    assert labels.count("incorrect") == 20
    assert load_manifest(tmp_path / "manifest.json").ids == m.ids


def test_byte_identical(tmp_path):
    generate_corpus(tmp_path / "a", seed=7, n_utterances=3)
    generate_corpus(tmp_path / "b", seed=7, n_utterances=3)
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_zero_rate_all_correct(tmp_path):
    m = generate_corpus(tmp_path, seed=1, n_utterances=4, misp_rate=0.0)
    assert {lab for e in m.entries for _, lab in e.word_labels} == {"correct"}


def test_holdout_split(tmp_path):
    generate_corpus(tmp_path, seed=3, n_utterances=5, holdout=2)
    cal = load_manifest(tmp_path / "manifest_calibrate.json")
    ev = load_manifest(tmp_path / "manifest_evaluate.json")
    assert len(cal.entries) == 3 and len(ev.entries) == 2
    assert not set(cal.ids) & set(ev.ids)


def test_recipe_stable():
    assert recipe("fraud") == recipe("fraud")
    assert len({recipe(w) for w in VOCAB}) == len(VOCAB)


def test_pair_grids_match_words():
    real, clone = make_pair(["robbery", "fraud"], [False, True], np.random.default_rng(0))
    for utt in (real, clone):
        labels = [iv.label for iv in utt.grid.tier("words").intervals if iv.label not in ("", "sil")]
        assert labels == ["robbery", "fraud"]
        assert utt.grid.xmax == utt.audio.duration
