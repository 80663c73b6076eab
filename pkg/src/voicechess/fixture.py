"""Synthetic evaluation corpus: every vocabulary word gets a distinct
harmonic signature, every synthetic speaker a small pitch offset, every
take fresh seeded noise. Lets the whole recognition experiment run
without any real recordings.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import audio, grammar
from .profiles import CorpusLayout

BASE_FREQ = 400.0
WORD_SPACING = 110.0
SPEAKER_DETUNE = 0.004  # fractional pitch shift per speaker step
NOISE_RMS = 0.01
TONE_AMP = 0.25


def word_frequency(word_index: int) -> float:
    return BASE_FREQ + WORD_SPACING * word_index


def synth_take(
    word_index: int,
    speaker_index: int,
    num_speakers: int,
    rng: np.random.Generator,
    duration: float = 1.0,
    sample_rate: int = audio.CANONICAL_RATE,
) -> audio.AudioClip:
    """One synthetic take: two-harmonic tone, speaker detune, noise."""
    detune = 1.0 + SPEAKER_DETUNE * (speaker_index - num_speakers / 2.0)
    f0 = word_frequency(word_index) * detune
    t = np.arange(int(duration * sample_rate)) / sample_rate
    phase = rng.uniform(0, 2 * np.pi, size=2)
    x = TONE_AMP * np.sin(2 * np.pi * f0 * t + phase[0])
    x += 0.5 * TONE_AMP * np.sin(2 * np.pi * 2 * f0 * t + phase[1])
    x += rng.normal(0.0, NOISE_RMS, size=len(t))
    return audio.AudioClip(np.clip(x, -1.0, 1.0), sample_rate)


def generate_corpus(
    root: Path,
    num_speakers: int = 10,
    takes_per_word: int = 10,
    seed: int = 42,
    words: Optional[Sequence[str]] = None,
) -> CorpusLayout:
    """Write a full root/<speaker>/<word>/<take>.wav tree."""
    words = list(words) if words is not None else list(grammar.WORD_IDS)
    layout = CorpusLayout(Path(root))
    rng = np.random.default_rng(seed)
    for s in range(num_speakers):
        speaker_id = f"spk{s:02d}"
        for w, word in enumerate(words):
            word_dir = Path(root) / speaker_id / word
            word_dir.mkdir(parents=True, exist_ok=True)
            for take in range(1, takes_per_word + 1):
                clip = synth_take(w, s, num_speakers, rng)
                (word_dir / f"{take}.wav").write_bytes(audio.encode_wav(clip))
    return layout
