"""Cepstral feature extraction: framing, windowing, power spectrum,
mel or gammatone filterbank, log compression, DCT-II.

MFCC and GTCC share a single code path (``cepstra``); the only difference
is the filterbank handed in. Default analysis: 25 ms Hamming frames with a
10 ms hop, FFT size 512, 14 coefficients including the DC term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.fftpack import dct, idct

LOG_FLOOR = 1e-10
DEFAULT_NUM_COEFFS = 14
DEFAULT_FFT_SIZE = 512
DEFAULT_MEL_FILTERS = 26
DEFAULT_GAMMATONE_FILTERS = 32
DEFAULT_F_MIN = 50.0


class ClipTooShortError(ValueError):
    pass


class DegenerateBankError(ValueError):
    """Two adjacent filter centers collapsed onto one FFT bin."""


class WindowKind(Enum):
    HAMMING = "hamming"
    HANN = "hann"
    RECTANGULAR = "rectangular"


class BankKind(Enum):
    MEL = "MEL"
    GAMMATONE = "GAMMATONE"


@dataclass(frozen=True)
class FrameConfig:
    frame_len_ms: float = 25.0
    hop_ms: float = 10.0
    window: WindowKind = WindowKind.HAMMING

    def __post_init__(self):
        if not 0 < self.hop_ms <= self.frame_len_ms:
            raise ValueError("require 0 < hop_ms <= frame_len_ms")


@dataclass(frozen=True)
class FilterBank:
    kind: BankKind
    sample_rate: int
    fft_size: int
    weights: np.ndarray  # [num_filters, fft_size//2 + 1], nonnegative
    center_freqs: np.ndarray  # Hz, strictly increasing

    @property
    def num_filters(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray  # [num_frames, num_coeffs]
    kind: BankKind

    @property
    def num_coeffs(self) -> int:
        return self.values.shape[1]

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "num_coeffs": int(self.num_coeffs),
            "rows": [[float(v) for v in row] for row in self.values],
        }

    @staticmethod
    def from_json(obj: dict) -> "FeatureMatrix":
        return FeatureMatrix(np.array(obj["rows"], dtype=np.float64), BankKind(obj["kind"]))


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def erb_rate(f):
    """ERB-rate scale position of frequency f (Hz)."""
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(f, dtype=np.float64))


def erb_rate_to_hz(e):
    return (10.0 ** (np.asarray(e, dtype=np.float64) / 21.4) - 1.0) / 0.00437


def erb_bandwidth(fc):
    """Equivalent rectangular bandwidth at center frequency fc (Hz)."""
    return 24.7 * (4.37 * np.asarray(fc, dtype=np.float64) / 1000.0 + 1.0)


def gammatone_response(f, fc):
    """Squared-magnitude 4th-order gammatone response, peak 1 at fc.

    Bandwidth parameter is 1.019 * ERB(fc).
    """
    b = 1.019 * erb_bandwidth(fc)
    return (1.0 + ((np.asarray(f, dtype=np.float64) - fc) / b) ** 2) ** -4


def _window_vector(kind: WindowKind, n: int) -> np.ndarray:
    if kind is WindowKind.HAMMING:
        return np.hamming(n)
    if kind is WindowKind.HANN:
        return np.hanning(n)
    return np.ones(n)


def frame_signal(samples: np.ndarray, sample_rate: int, cfg: FrameConfig) -> np.ndarray:
    """Slice a signal into overlapping frames; a nonempty tail is zero-padded."""
    x = np.asarray(samples, dtype=np.float64)
    frame_len = int(round(cfg.frame_len_ms * sample_rate / 1000.0))
    hop = int(round(cfg.hop_ms * sample_rate / 1000.0))
    if len(x) < frame_len:
        raise ClipTooShortError(f"{len(x)} samples < one {frame_len}-sample frame")
    n_full = 1 + (len(x) - frame_len) // hop
    rows = [x[i * hop : i * hop + frame_len] for i in range(n_full)]
    tail_start = n_full * hop
    if (n_full - 1) * hop + frame_len < len(x):
        tail = np.zeros(frame_len)
        tail[: len(x) - tail_start] = x[tail_start:]
        rows.append(tail)
    return np.stack(rows)


def power_spectrum(frame: np.ndarray, fft_size: int) -> np.ndarray:
    """Squared-magnitude DFT bins 0..fft_size/2 of a (windowed) frame."""
    if fft_size < len(frame) or fft_size & (fft_size - 1):
        raise ValueError("fft_size must be a power of two >= frame length")
    spec = np.fft.rfft(frame, fft_size)
    return np.abs(spec) ** 2


def _sample_rows(center_rows, sample_rate: int, fft_size: int, centers: np.ndarray):
    """Check for degeneracy, then normalize sampled rows to unit maximum."""
    bin_of = np.round(centers * fft_size / sample_rate).astype(int)
    if len(set(bin_of.tolist())) != len(centers):
        raise DegenerateBankError("adjacent filter centers share an FFT bin")
    rows = np.stack(center_rows)
    peaks = rows.max(axis=1)
    if np.any(peaks <= 0):
        raise DegenerateBankError("filter row with no positive weight")
    return rows / peaks[:, None]


def build_mel_filterbank(
    sample_rate: int,
    fft_size: int = DEFAULT_FFT_SIZE,
    num_filters: int = DEFAULT_MEL_FILTERS,
    f_min: float = DEFAULT_F_MIN,
    f_max: Optional[float] = None,
) -> FilterBank:
    """Triangular filters with peaks equally spaced on the mel scale."""
    if f_max is None:
        f_max = sample_rate / 2.0
    if not 0 <= f_min < f_max <= sample_rate / 2.0:
        raise ValueError("require 0 <= f_min < f_max <= Nyquist")
    points = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), num_filters + 2))
    bin_freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    rows = []
    for j in range(num_filters):
        lo, mid, hi = points[j], points[j + 1], points[j + 2]
        up = (bin_freqs - lo) / (mid - lo)
        down = (hi - bin_freqs) / (hi - mid)
        rows.append(np.maximum(0.0, np.minimum(up, down)))
    weights = _sample_rows(rows, sample_rate, fft_size, points[1:-1])
    return FilterBank(BankKind.MEL, sample_rate, fft_size, weights, points[1:-1].copy())


def build_gammatone_filterbank(
    sample_rate: int,
    fft_size: int = DEFAULT_FFT_SIZE,
    num_filters: int = DEFAULT_GAMMATONE_FILTERS,
    f_min: float = DEFAULT_F_MIN,
    f_max: Optional[float] = None,
) -> FilterBank:
    """4th-order gammatone magnitude responses, centers on the ERB-rate scale."""
    if f_max is None:
        f_max = sample_rate / 2.0
    if not 0 <= f_min < f_max <= sample_rate / 2.0:
        raise ValueError("require 0 <= f_min < f_max <= Nyquist")
    centers = erb_rate_to_hz(
        np.linspace(erb_rate(f_min), erb_rate(f_max), num_filters + 2)[1:-1]
    )
    bin_freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    rows = [gammatone_response(bin_freqs, fc) for fc in centers]
    weights = _sample_rows(rows, sample_rate, fft_size, centers)
    return FilterBank(BankKind.GAMMATONE, sample_rate, fft_size, weights, centers.copy())


def cepstra(
    samples: np.ndarray,
    sample_rate: int,
    bank: FilterBank,
    cfg: FrameConfig = FrameConfig(),
    num_coeffs: int = DEFAULT_NUM_COEFFS,
) -> FeatureMatrix:
    """Per-frame cepstral coefficients through the given filterbank.

    Stages: window, power spectrum, band energies, log with floor,
    orthonormal DCT-II, truncation to num_coeffs.
    """
    if num_coeffs > bank.num_filters:
        raise ValueError("num_coeffs exceeds filter count")
    frames = frame_signal(samples, sample_rate, cfg)
    win = _window_vector(cfg.window, frames.shape[1])
    spec = np.abs(np.fft.rfft(frames * win, bank.fft_size)) ** 2
    energies = spec @ bank.weights.T
    logs = np.log(energies + LOG_FLOOR)
    coeffs = dct(logs, type=2, axis=1, norm="ortho")[:, :num_coeffs]
    return FeatureMatrix(coeffs, bank.kind)


def inverse_cepstra(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of the orthonormal DCT-II used by ``cepstra``."""
    return idct(np.asarray(coeffs, dtype=np.float64), type=2, axis=-1, norm="ortho")


@dataclass(frozen=True)
class ClipEmbedding:
    """Fixed-length summary: per-coefficient mean then population std."""

    values: np.ndarray

    def to_json(self) -> list:
        return [float(v) for v in self.values]


def embed_clip(features: FeatureMatrix) -> ClipEmbedding:
    if features.values.shape[0] < 1:
        raise ValueError("empty feature matrix")
    means = features.values.mean(axis=0)
    stds = features.values.std(axis=0)
    return ClipEmbedding(np.concatenate([means, stds]))


def clip_embedding(
    samples: np.ndarray,
    sample_rate: int,
    bank: FilterBank,
    cfg: FrameConfig = FrameConfig(),
    num_coeffs: int = DEFAULT_NUM_COEFFS,
) -> ClipEmbedding:
    """Signal straight to its fixed-length embedding."""
    return embed_clip(cepstra(samples, sample_rate, bank, cfg, num_coeffs))
