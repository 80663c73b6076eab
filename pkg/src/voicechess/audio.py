"""WAV decoding, resampling, silence trimming, and take validation.

Canonical format downstream of this module: 16 kHz mono float samples in
[-1, 1]. Files are written as 16 kHz mono 16-bit PCM with the plain
44-byte RIFF header.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

CANONICAL_RATE = 16000
SILENCE_THRESHOLD_DBFS = -40.0
SILENCE_PAD_MS = 100.0
VALIDATION_FLOOR_DBFS = -45.0
MIN_TAKE_SECONDS = 0.2
MAX_TAKE_SECONDS = 2.0
CLIP_FRACTION = 0.01


class MalformedWavError(ValueError):
    """Bad RIFF header or truncated sample data."""


class UnsupportedEncodingError(ValueError):
    """WAV container holds a codec other than PCM / IEEE float."""


@dataclass(frozen=True)
class AudioClip:
    """Mono signal with amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    source_id: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


class RejectReason(Enum):
    OK = "OK"
    TOO_QUIET = "TOO_QUIET"
    TOO_SHORT = "TOO_SHORT"
    TOO_LONG = "TOO_LONG"
    CLIPPED = "CLIPPED"


@dataclass(frozen=True)
class TakeValidation:
    accepted: bool
    reason: RejectReason

    def __post_init__(self):
        assert self.accepted == (self.reason is RejectReason.OK)


def _parse_chunks(data: bytes):
    """Yield (chunk_id, payload) pairs from a RIFF body."""
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        payload = data[pos + 8 : pos + 8 + size]
        yield cid, payload
        pos += 8 + size + (size & 1)


def decode_wav(data: bytes) -> AudioClip:
    """Decode a RIFF/WAVE byte string into a mono AudioClip.

    Accepts PCM 8/16/24-bit and 32-bit float, 1 or 2 channels. Stereo is
    averaged to mono; integer samples are scaled by the full-scale
    negative magnitude (e.g. 16-bit by 1/32768).
    """
    if len(data) < 44 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWavError("not a RIFF/WAVE container")

    fmt = None
    pcm = None
    for cid, payload in _parse_chunks(data):
        if cid == b"fmt ":
            if len(payload) < 16:
                raise MalformedWavError("fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", payload, 0)
        elif cid == b"data":
            pcm = payload
    if fmt is None or pcm is None:
        raise MalformedWavError("missing fmt or data chunk")

    audio_format, channels, sample_rate, _, block_align, bits = fmt
    if audio_format not in (1, 3):
        raise UnsupportedEncodingError(f"audio format tag {audio_format}")
    if channels not in (1, 2):
        raise UnsupportedEncodingError(f"{channels} channels")
    if sample_rate <= 0:
        raise MalformedWavError("non-positive sample rate")

    if audio_format == 3:
        if bits != 32:
            raise UnsupportedEncodingError(f"{bits}-bit float")
        usable = len(pcm) - len(pcm) % (4 * channels)
        x = np.frombuffer(pcm[:usable], dtype="<f4").astype(np.float64)
    elif bits == 16:
        usable = len(pcm) - len(pcm) % (2 * channels)
        x = np.frombuffer(pcm[:usable], dtype="<i2").astype(np.float64) / 32768.0
    elif bits == 8:
        usable = len(pcm) - len(pcm) % channels
        x = (np.frombuffer(pcm[:usable], dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif bits == 24:
        frame = 3 * channels
        usable = len(pcm) - len(pcm) % frame
        raw = np.frombuffer(pcm[:usable], dtype=np.uint8).reshape(-1, 3)
        vals = (
            raw[:, 0].astype(np.int32)
            | (raw[:, 1].astype(np.int32) << 8)
            | (raw[:, 2].astype(np.int32) << 16)
        )
        vals = np.where(vals >= 1 << 23, vals - (1 << 24), vals)
        x = vals.astype(np.float64) / float(1 << 23)
    else:
        raise UnsupportedEncodingError(f"{bits}-bit PCM")

    if channels == 2:
        x = x.reshape(-1, 2).mean(axis=1)
    x = np.clip(x, -1.0, 1.0)
    return AudioClip(samples=x, sample_rate=int(sample_rate))


def encode_wav(clip: AudioClip) -> bytes:
    """Serialize to mono 16-bit PCM with the canonical 44-byte header."""
    ints = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        1,
        1,
        clip.sample_rate,
        clip.sample_rate * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    return header + payload


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Linear-interpolation resample. Identity when rates match."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == clip.sample_rate:
        return clip
    n_out = int(round(len(clip.samples) * target_rate / clip.sample_rate))
    if n_out == 0 or len(clip.samples) == 0:
        return AudioClip(np.zeros(0), target_rate, clip.source_id)
    src_t = np.arange(len(clip.samples)) / clip.sample_rate
    dst_t = np.arange(n_out) / target_rate
    out = np.interp(dst_t, src_t, clip.samples)
    return AudioClip(out, target_rate, clip.source_id)


def _window_rms_dbfs(samples: np.ndarray, win: int) -> np.ndarray:
    """RMS level in dBFS of consecutive non-overlapping windows."""
    n = len(samples) // win
    if n == 0:
        return np.zeros(0)
    frames = samples[: n * win].reshape(n, win)
    rms = np.sqrt((frames**2).mean(axis=1))
    return 20.0 * np.log10(np.maximum(rms, 1e-12))


def trim_silence(
    clip: AudioClip,
    threshold_dbfs: float = SILENCE_THRESHOLD_DBFS,
    pad_ms: float = SILENCE_PAD_MS,
) -> AudioClip:
    """Cut leading/trailing stretches below threshold, keeping pad_ms margins.

    If no 10 ms window exceeds the threshold the clip is returned unchanged.
    """
    if len(clip.samples) == 0:
        raise ValueError("empty clip")
    win = max(1, int(round(clip.sample_rate * 0.010)))
    levels = _window_rms_dbfs(clip.samples, win)
    above = np.nonzero(levels > threshold_dbfs)[0]
    if len(above) == 0:
        return clip
    pad = int(round(pad_ms * clip.sample_rate / 1000.0))
    start = max(0, above[0] * win - pad)
    end = min(len(clip.samples), (above[-1] + 1) * win + pad)
    return AudioClip(clip.samples[start:end], clip.sample_rate, clip.source_id)


def validate_take(clip: AudioClip) -> TakeValidation:
    """Accept or reject a recorded take; first failing rule wins."""
    if len(clip.samples) == 0:
        return TakeValidation(False, RejectReason.TOO_QUIET)
    rms = float(np.sqrt((clip.samples**2).mean()))
    if 20.0 * np.log10(max(rms, 1e-12)) < VALIDATION_FLOOR_DBFS:
        return TakeValidation(False, RejectReason.TOO_QUIET)
    trimmed = trim_silence(clip, SILENCE_THRESHOLD_DBFS, pad_ms=0.0)
    if trimmed.duration_seconds < MIN_TAKE_SECONDS:
        return TakeValidation(False, RejectReason.TOO_SHORT)
    if trimmed.duration_seconds > MAX_TAKE_SECONDS:
        return TakeValidation(False, RejectReason.TOO_LONG)
    if (np.abs(clip.samples) >= 0.999).mean() > CLIP_FRACTION:
        return TakeValidation(False, RejectReason.CLIPPED)
    return TakeValidation(True, RejectReason.OK)
