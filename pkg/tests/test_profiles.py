import numpy as np
import pytest

from voicechess import audio, features, fixture, grammar, profiles
from voicechess.knn import predict
from voicechess.profiles import (
    CorpusLayout,
    EnrollmentSession,
    SessionCompleteError,
    build_speaker_model,
    build_word_model,
    identify_speaker,
    load_corpus,
    load_profiles,
    submit_take,
)

from conftest import word_clip


def _valid_clip(seed=0):
    rng = np.random.default_rng(seed)
    return fixture.synth_take(0, 0, 1, rng)


class TestEnrollment:
    def test_blank_clip_rejected_cursor_unchanged(self, tmp_path):
        session = EnrollmentSession("alice", CorpusLayout(tmp_path), takes_per_word=3)
        blank = audio.AudioClip(np.zeros(16000), 16000)
        after, verdict = submit_take(session, blank)
        assert not verdict.accepted
        assert verdict.reason is audio.RejectReason.TOO_QUIET
        assert after.completed_takes == 0

    def test_cursor_advances(self, tmp_path):
        session = EnrollmentSession("alice", CorpusLayout(tmp_path), takes_per_word=3)
        after, verdict = submit_take(session, _valid_clip())
        assert verdict.accepted
        assert after.completed_takes == 1
        assert after.current_word == session.current_word  # still take 2 of word 1
        assert (tmp_path / "alice" / grammar.WORD_IDS[0] / "1.wav").exists()

    def test_full_enrollment_take_count(self, tmp_path):
        session = EnrollmentSession("bob", CorpusLayout(tmp_path), takes_per_word=3)
        n = 0
        while not session.complete:
            session, verdict = submit_take(session, _valid_clip(n))
            assert verdict.accepted
            n += 1
        assert n == 29 * 3
        profs = load_profiles(CorpusLayout(tmp_path))
        assert profs["bob"].take_count == 87
        # only accepted takes ever reach disk
        assert sum(1 for _ in tmp_path.glob("bob/*/*.wav")) == 87
        with pytest.raises(SessionCompleteError):
            submit_take(session, _valid_clip())

    def test_min_takes_enforced(self, tmp_path):
        with pytest.raises(ValueError):
            EnrollmentSession("x", CorpusLayout(tmp_path), takes_per_word=2)

    def test_progress_arithmetic(self, tmp_path):
        session = EnrollmentSession("p", CorpusLayout(tmp_path), takes_per_word=10)
        assert session.progress == 0.0
        for i in range(10):
            session, _ = submit_take(session, _valid_clip(i))
        assert session.completed_takes == 10
        assert session.progress == pytest.approx(10 / 290)
        assert session.current_word == grammar.WORD_IDS[1]


class TestLoadCorpus:
    def test_empty_root(self, tmp_path):
        ds, report = load_corpus(CorpusLayout(tmp_path / "nope"), features.BankKind.MEL)
        assert len(ds) == 0 and report.skipped == []

    def test_fixture_counts(self, small_corpus, small_gtcc):
        assert len(small_gtcc) == 3 * 29 * 4
        assert set(small_gtcc.words) == set(grammar.WORD_IDS)

    def test_deterministic_order(self, small_corpus):
        a, _ = load_corpus(small_corpus, features.BankKind.GAMMATONE)
        b, _ = load_corpus(small_corpus, features.BankKind.GAMMATONE)
        assert a.ids == b.ids
        assert np.array_equal(a.embeddings, b.embeddings)

    def test_corrupt_file_skipped(self, tmp_path):
        fixture.generate_corpus(tmp_path, num_speakers=1, takes_per_word=3, seed=0)
        bad = tmp_path / "spk00" / "at" / "2.wav"
        bad.write_bytes(b"not a wav at all")
        ds, report = load_corpus(CorpusLayout(tmp_path), features.BankKind.MEL, use_cache=False)
        assert len(ds) == 29 * 3 - 1
        assert len(report.skipped) == 1
        assert "at/2.wav" in report.skipped[0][0].replace("\\", "/")

    def test_cache_round_trip(self, tmp_path):
        fixture.generate_corpus(tmp_path, num_speakers=1, takes_per_word=3, seed=1)
        cold, _ = load_corpus(CorpusLayout(tmp_path), features.BankKind.GAMMATONE)
        warm, _ = load_corpus(CorpusLayout(tmp_path), features.BankKind.GAMMATONE)
        assert np.allclose(cold.embeddings, warm.embeddings)
        assert (tmp_path / ".cache" / "embeddings_gammatone.json").exists()


class TestModels:
    def test_person_scope_filters(self, small_gtcc):
        model = build_word_model(small_gtcc, "PERSON", "spk01", k=1)
        assert set(model.training.speakers) == {"spk01"}
        assert len(model.training) == 29 * 4

    def test_general_scope_pools(self, small_gtcc):
        model = build_word_model(small_gtcc, "GENERAL", k=1)
        assert len(model.training) == len(small_gtcc)

    def test_unknown_speaker(self, small_gtcc):
        with pytest.raises(KeyError):
            build_word_model(small_gtcc, "PERSON", "ghost", k=1)

    def test_person_neighbors_stay_in_scope(self, small_gtcc):
        model = build_word_model(small_gtcc, "PERSON", "spk00", k=3)
        clip = word_clip("vezir", speaker_index=0, seed=99)
        emb = profiles.embed_wav_bytes(audio.encode_wav(clip), features.BankKind.GAMMATONE)
        pred = predict(model, emb)
        assert all(model.training.speakers[i] == "spk00" for i in pred.neighbor_ids)

    def test_person_model_recognizes_held_out(self, small_gtcc):
        model = build_word_model(small_gtcc, "PERSON", "spk00", k=1)
        for word in ("at", "kale", "yeni_oyun", "8"):
            clip = word_clip(word, speaker_index=0, seed=hash(word) % 2**30)
            emb = profiles.embed_wav_bytes(audio.encode_wav(clip), features.BankKind.GAMMATONE)
            assert predict(model, emb).label == word


class TestSpeakerIdentification:
    def test_own_take_distance_zero(self, small_corpus, small_gtcc):
        model = build_speaker_model(small_gtcc, k=1)
        path = small_corpus.take_path("spk01", "at", 1)
        clip = audio.decode_wav(path.read_bytes())
        pred = identify_speaker(model, clip, features.BankKind.GAMMATONE)
        assert pred.label == "spk01"
        assert pred.mean_distance == pytest.approx(0.0, abs=1e-9)

    def test_single_speaker_model(self, small_gtcc):
        only = small_gtcc.subset([i for i in range(len(small_gtcc)) if small_gtcc.speakers[i] == "spk02"])
        model = build_speaker_model(only, k=1)
        clip = word_clip("mat", speaker_index=1, seed=5)
        assert identify_speaker(model, clip, features.BankKind.GAMMATONE).label == "spk02"

    def test_disjoint_speakers_identified(self, small_gtcc):
        model = build_speaker_model(small_gtcc, k=1)
        hits = 0
        for s in range(3):
            for seed in range(5):
                clip = word_clip("fil", speaker_index=s, seed=1000 + seed)
                pred = identify_speaker(model, clip, features.BankKind.GAMMATONE)
                hits += pred.label == f"spk{s:02d}"
        assert hits >= 13  # detune separation is small but dominant
