import numpy as np
import pytest

from voicechess import audio, features, fixture, grammar, profiles


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """3 synthetic speakers x 29 words x 4 takes."""
    root = tmp_path_factory.mktemp("corpus_small")
    fixture.generate_corpus(root, num_speakers=3, takes_per_word=4, seed=7)
    return profiles.CorpusLayout(root)


@pytest.fixture(scope="session")
def small_gtcc(small_corpus):
    ds, report = profiles.load_corpus(small_corpus, features.BankKind.GAMMATONE)
    assert not report.skipped
    return ds


def tone_clip(freq=440.0, duration=1.0, rate=16000, amp=0.5):
    t = np.arange(int(duration * rate)) / rate
    return audio.AudioClip(amp * np.sin(2 * np.pi * freq * t), rate)


def word_clip(word_id, speaker_index=0, num_speakers=3, seed=0):
    """A synthetic clip recognizable as the given vocabulary word."""
    rng = np.random.default_rng(seed)
    return fixture.synth_take(grammar.WORD_IDS.index(word_id), speaker_index, num_speakers, rng)
