import numpy as np
import pytest

from voicechess import features
from voicechess.features import (
    BankKind,
    ClipTooShortError,
    FrameConfig,
    WindowKind,
    build_gammatone_filterbank,
    build_mel_filterbank,
    cepstra,
    clip_embedding,
    embed_clip,
    erb_bandwidth,
    frame_signal,
    gammatone_response,
    hz_to_mel,
    inverse_cepstra,
    power_spectrum,
)

CFG = FrameConfig()


class TestFraming:
    def test_single_frame(self):
        frames = frame_signal(np.ones(400), 16000, CFG)
        assert frames.shape == (1, 400)

    def test_one_second_frame_count(self):
        frames = frame_signal(np.ones(16000), 16000, CFG)
        assert frames.shape[0] == 99  # 98 full + 1 zero-padded tail

    def test_too_short(self):
        with pytest.raises(ClipTooShortError):
            frame_signal(np.ones(399), 16000, CFG)

    def test_tail_zero_padded(self):
        x = np.ones(480)
        frames = frame_signal(x, 16000, CFG)
        assert frames.shape[0] == 2
        assert frames[1, :320].tolist() == [1.0] * 320
        assert frames[1, 320:].tolist() == [0.0] * 80


class TestPowerSpectrum:
    def test_zero_frame(self):
        assert power_spectrum(np.zeros(400), 512).tolist() == [0.0] * 257

    def test_bin_aligned_cosine(self):
        n, k = 512, 20
        frame = np.cos(2 * np.pi * k * np.arange(n) / n)
        spec = power_spectrum(frame, n)
        assert spec[k] == pytest.approx(n**2 / 4)
        others = np.delete(spec, k)
        assert others.max() < 1e-12 * spec[k]

    def test_parseval(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=400)
        spec = power_spectrum(x, 512)
        total = spec[0] + spec[-1] + 2 * spec[1:-1].sum()
        assert total == pytest.approx(512 * (np.abs(np.fft.fft(x, 512)) ** 2).sum() / 512, rel=1e-9)
        assert total == pytest.approx(512 * (x**2).sum(), rel=1e-6)


class TestMelBank:
    def test_scale_closed_form(self):
        assert hz_to_mel(700.0) == pytest.approx(2595 * np.log10(2))

    def test_centers(self):
        bank = build_mel_filterbank(16000, 512, 26, 0.0, 8000.0)
        c = bank.center_freqs
        assert len(c) == 26
        assert np.all(np.diff(c) > 0)
        assert c[0] > 0 and c[-1] < 8000
        # independent closed-form center check
        mels = np.linspace(hz_to_mel(0.0), hz_to_mel(8000.0), 28)[1:-1]
        expect = 700.0 * (10 ** (mels / 2595.0) - 1)
        assert c == pytest.approx(expect)

    def test_single_filter(self):
        bank = build_mel_filterbank(16000, 512, 1, 100.0, 4000.0)
        mid = 700.0 * (10 ** ((hz_to_mel(100.0) + hz_to_mel(4000.0)) / 2 / 2595.0) - 1)
        assert bank.center_freqs[0] == pytest.approx(mid)
        assert bank.weights.min() >= 0
        assert bank.weights.max() == pytest.approx(1.0)

    def test_rows_nonnegative_with_peak(self):
        bank = build_mel_filterbank(16000)
        assert bank.weights.min() >= 0
        assert np.all(bank.weights.max(axis=1) > 0)


class TestGammatoneBank:
    def test_erb_closed_form(self):
        assert erb_bandwidth(1000.0) == pytest.approx(132.639, abs=1e-6)

    def test_peak_and_shoulders(self):
        for fc in (200.0, 1000.0, 4000.0):
            assert gammatone_response(fc, fc) == 1.0
            b = 1.019 * erb_bandwidth(fc)
            assert gammatone_response(fc + b, fc) == pytest.approx(0.0625, abs=1e-9)
            assert gammatone_response(fc - b, fc) == pytest.approx(0.0625, abs=1e-9)

    def test_bank_structure(self):
        bank = build_gammatone_filterbank(16000)
        assert bank.num_filters == 32
        assert np.all(np.diff(bank.center_freqs) > 0)
        assert 0 < bank.center_freqs[0] and bank.center_freqs[-1] < 8000
        assert bank.weights.min() >= 0


def _band_energy_argmax(bank):
    failures = []
    for i, fc in enumerate(bank.center_freqs):
        k = int(round(fc * bank.fft_size / bank.sample_rate))
        tone = np.cos(2 * np.pi * k * np.arange(bank.fft_size) / bank.fft_size)
        energies = bank.weights @ power_spectrum(tone, bank.fft_size)
        if int(np.argmax(energies)) != i:
            failures.append(i)
    return failures


class TestFilterResponse:
    def test_mel_tone_argmax(self):
        assert _band_energy_argmax(build_mel_filterbank(16000)) == []

    def test_gammatone_tone_argmax(self):
        assert _band_energy_argmax(build_gammatone_filterbank(16000)) == []


class TestCepstra:
    def test_silent_clip_constant_log(self):
        bank = build_mel_filterbank(16000)
        fm = cepstra(np.zeros(16000), 16000, bank)
        expect_c0 = np.sqrt(26) * np.log(features.LOG_FLOOR)
        assert fm.values[:, 0] == pytest.approx(expect_c0)
        assert np.abs(fm.values[:, 1:]).max() < 1e-9

    @pytest.mark.parametrize("builder", [build_mel_filterbank, build_gammatone_filterbank])
    def test_gain_lands_in_dc_term(self, builder):
        bank = builder(16000)
        rng = np.random.default_rng(1)
        x = 0.3 * rng.normal(size=8000)
        a = cepstra(x, 16000, bank).values
        b = cepstra(2.0 * x, 16000, bank).values
        assert np.abs(a[:, 1:] - b[:, 1:]).max() < 1e-6
        assert np.abs(a[:, 0] - b[:, 0]).max() > 0.1

    def test_distinct_tones_distinct_embeddings(self):
        bank = build_gammatone_filterbank(16000)
        t = np.arange(16000) / 16000
        e1 = clip_embedding(0.5 * np.sin(2 * np.pi * 440 * t), 16000, bank)
        e2 = clip_embedding(0.5 * np.sin(2 * np.pi * 2000 * t), 16000, bank)
        assert np.linalg.norm(e1.values - e2.values) > 0

    def test_deterministic(self):
        bank = build_gammatone_filterbank(16000)
        x = np.random.default_rng(9).normal(size=8000) * 0.2
        assert np.array_equal(cepstra(x, 16000, bank).values, cepstra(x, 16000, bank).values)

    def test_dct_orthonormal(self):
        bank = build_mel_filterbank(16000)
        x = np.random.default_rng(2).normal(size=8000) * 0.2
        full = cepstra(x, 16000, bank, num_coeffs=26).values
        frames = frame_signal(x, 16000, CFG)
        win = np.hamming(frames.shape[1])
        spec = np.abs(np.fft.rfft(frames * win, 512)) ** 2
        logs = np.log(spec @ bank.weights.T + features.LOG_FLOOR)
        assert np.abs(inverse_cepstra(full) - logs).max() < 1e-9


class TestEmbedding:
    def test_single_frame(self):
        fm = features.FeatureMatrix(np.arange(14.0).reshape(1, 14), BankKind.MEL)
        emb = embed_clip(fm)
        assert emb.values[:14].tolist() == list(np.arange(14.0))
        assert emb.values[14:].tolist() == [0.0] * 14

    def test_symmetric_frames(self):
        v = np.linspace(-1, 1, 14)
        fm = features.FeatureMatrix(np.stack([v, -v]), BankKind.MEL)
        emb = embed_clip(fm)
        assert emb.values[:14] == pytest.approx(np.zeros(14))
        assert emb.values[14:] == pytest.approx(np.abs(v))

    def test_against_naive_pass(self):
        rng = np.random.default_rng(8)
        vals = rng.normal(size=(99, 14))
        emb = embed_clip(features.FeatureMatrix(vals, BankKind.GAMMATONE))
        # independent mean/std computed with explicit loops
        for j in range(14):
            col = [vals[i][j] for i in range(99)]
            mean = sum(col) / 99
            var = sum((v - mean) ** 2 for v in col) / 99
            assert emb.values[j] == pytest.approx(mean)
            assert emb.values[14 + j] == pytest.approx(var**0.5)

    def test_json_round_trip(self):
        vals = np.random.default_rng(4).normal(size=(5, 14))
        fm = features.FeatureMatrix(vals, BankKind.MEL)
        back = features.FeatureMatrix.from_json(fm.to_json())
        assert np.allclose(back.values, vals)
        assert back.kind is BankKind.MEL
