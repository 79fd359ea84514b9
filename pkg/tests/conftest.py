import pytest

from mispron.corpus import load_manifest
from mispron.fixture import generate_corpus
from mispron.pipeline import calibrate_manifest

CORPUS = dict(seed=42, n_utterances=50, words_per_utt=5, misp_rate=0.4, holdout=10)
# alpha matches the corpus mispronunciation rate so the pooled order statistic lands between the classes
CORPUS_ALPHA = 0.4


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    generate_corpus(d, **CORPUS)
    return d


@pytest.fixture(scope="session")
def corpus_model(corpus_dir):
    model, _ = calibrate_manifest(load_manifest(corpus_dir / "manifest_calibrate.json"), alpha=CORPUS_ALPHA)
    return model
