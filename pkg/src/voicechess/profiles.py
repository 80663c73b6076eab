"""Speaker profiles on disk, the enrollment flow, and corpus loading.

Layout: ``root/<speaker_id>/<word_id>/<take_index>.wav`` with take indices
starting at 1, plus a ``profiles.json`` index at the root. Loading a corpus
runs every take through trim -> cepstra -> embedding; per-file decode
failures land in a skip report instead of aborting the load. Embeddings
are cached under ``root/.cache`` keyed by file content hash.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import audio, features, grammar
from .knn import EmptyModelError, KnnModel, LabeledDataset, UnknownSpeakerError

MIN_TAKES_PER_WORD = 3
DEFAULT_TAKES_PER_WORD = 10


class SessionCompleteError(RuntimeError):
    pass


@dataclass
class SpeakerProfile:
    speaker_id: str
    display_name: str
    note: str = ""  # free text, e.g. recording-day health remarks
    takes: Dict[str, List[str]] = field(default_factory=dict)  # word_id -> wav paths

    @property
    def take_count(self) -> int:
        return sum(len(v) for v in self.takes.values())


@dataclass(frozen=True)
class CorpusLayout:
    root: Path

    def speaker_dir(self, speaker_id: str) -> Path:
        return Path(self.root) / speaker_id

    def take_path(self, speaker_id: str, word_id: str, take_index: int) -> Path:
        return self.speaker_dir(speaker_id) / word_id / f"{take_index}.wav"


def _index_path(layout: CorpusLayout) -> Path:
    return Path(layout.root) / "profiles.json"


def load_profiles(layout: CorpusLayout) -> Dict[str, SpeakerProfile]:
    path = _index_path(layout)
    profiles: Dict[str, SpeakerProfile] = {}
    if path.exists():
        for obj in json.loads(path.read_text()):
            profiles[obj["speaker_id"]] = SpeakerProfile(
                obj["speaker_id"], obj.get("display_name", obj["speaker_id"]), obj.get("note", "")
            )
    root = Path(layout.root)
    if root.exists():
        for spk_dir in sorted(p for p in root.iterdir() if p.is_dir() and p.name != ".cache"):
            prof = profiles.setdefault(spk_dir.name, SpeakerProfile(spk_dir.name, spk_dir.name))
            for word_dir in sorted(p for p in spk_dir.iterdir() if p.is_dir()):
                wavs = sorted(word_dir.glob("*.wav"), key=lambda p: int(p.stem))
                if wavs:
                    prof.takes[word_dir.name] = [str(p) for p in wavs]
    return profiles


def save_profile_index(layout: CorpusLayout, profiles: Dict[str, SpeakerProfile]) -> None:
    Path(layout.root).mkdir(parents=True, exist_ok=True)
    data = [
        {"speaker_id": p.speaker_id, "display_name": p.display_name, "note": p.note}
        for p in profiles.values()
    ]
    _index_path(layout).write_text(json.dumps(data, indent=2))


@dataclass
class EnrollmentSession:
    """Walks a speaker through every vocabulary word, N takes each."""

    speaker_id: str
    layout: CorpusLayout
    takes_per_word: int = DEFAULT_TAKES_PER_WORD
    word_order: Tuple[str, ...] = tuple(grammar.WORD_IDS)
    word_index: int = 0
    take_index: int = 0  # takes completed for the current word

    def __post_init__(self):
        if self.takes_per_word < MIN_TAKES_PER_WORD:
            raise ValueError(f"takes_per_word must be >= {MIN_TAKES_PER_WORD}")

    @property
    def complete(self) -> bool:
        return self.word_index >= len(self.word_order)

    @property
    def current_word(self) -> Optional[str]:
        return None if self.complete else self.word_order[self.word_index]

    @property
    def completed_takes(self) -> int:
        return self.word_index * self.takes_per_word + self.take_index

    @property
    def progress(self) -> float:
        return self.completed_takes / (len(self.word_order) * self.takes_per_word)


def submit_take(
    session: EnrollmentSession, clip: audio.AudioClip
) -> Tuple[EnrollmentSession, audio.TakeValidation]:
    """Validate and store one take; rejected takes leave the cursor alone."""
    if session.complete:
        raise SessionCompleteError(session.speaker_id)
    verdict = audio.validate_take(clip)
    if not verdict.accepted:
        return session, verdict
    canonical = audio.resample(clip, audio.CANONICAL_RATE)
    path = session.layout.take_path(
        session.speaker_id, session.current_word, session.take_index + 1
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(audio.encode_wav(canonical))
    take_index = session.take_index + 1
    word_index = session.word_index
    if take_index >= session.takes_per_word:
        take_index = 0
        word_index += 1
    advanced = EnrollmentSession(
        session.speaker_id,
        session.layout,
        session.takes_per_word,
        session.word_order,
        word_index,
        take_index,
    )
    return advanced, verdict


@dataclass
class SkipReport:
    skipped: List[Tuple[str, str]] = field(default_factory=list)  # (path, reason)

    def add(self, path: str, reason: str) -> None:
        self.skipped.append((path, reason))


@lru_cache(maxsize=None)
def _bank_for(kind: features.BankKind) -> features.FilterBank:
    if kind is features.BankKind.MEL:
        return features.build_mel_filterbank(audio.CANONICAL_RATE)
    return features.build_gammatone_filterbank(audio.CANONICAL_RATE)


class _EmbeddingCache:
    def __init__(self, root: Path, kind: features.BankKind):
        self.path = Path(root) / ".cache" / f"embeddings_{kind.value.lower()}.json"
        self.data: Dict[str, List[float]] = {}
        self.dirty = False
        if self.path.exists():
            try:
                self.data = json.loads(self.path.read_text())
            except (ValueError, OSError):
                self.data = {}

    def get(self, key: str) -> Optional[np.ndarray]:
        vals = self.data.get(key)
        return None if vals is None else np.array(vals, dtype=np.float64)

    def put(self, key: str, emb: np.ndarray) -> None:
        self.data[key] = [float(v) for v in emb]
        self.dirty = True

    def save(self) -> None:
        if self.dirty:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(json.dumps(self.data))


def embed_wav_bytes(data: bytes, kind: features.BankKind) -> np.ndarray:
    """Full clip pipeline: decode, resample, trim, cepstra, embed."""
    clip = audio.decode_wav(data)
    clip = audio.resample(clip, audio.CANONICAL_RATE)
    clip = audio.trim_silence(clip)
    emb = features.clip_embedding(clip.samples, clip.sample_rate, _bank_for(kind))
    return emb.values


def load_corpus(
    layout: CorpusLayout,
    kind: features.BankKind,
    use_cache: bool = True,
) -> Tuple[LabeledDataset, SkipReport]:
    """Embed every take under the corpus root, ordered by path."""
    report = SkipReport()
    root = Path(layout.root)
    embeddings: List[np.ndarray] = []
    speakers: List[str] = []
    words: List[str] = []
    ids: List[str] = []
    cache = _EmbeddingCache(root, kind) if use_cache else None
    if root.exists():
        files = sorted(root.glob("*/*/*.wav"))
        for path in files:
            data = path.read_bytes()
            key = hashlib.sha1(data).hexdigest()
            emb = cache.get(key) if cache else None
            if emb is None:
                try:
                    emb = embed_wav_bytes(data, kind)
                except (ValueError, features.ClipTooShortError) as exc:
                    report.add(str(path), f"{type(exc).__name__}: {exc}")
                    continue
                if cache:
                    cache.put(key, emb)
            embeddings.append(emb)
            speakers.append(path.parent.parent.name)
            words.append(path.parent.name)
            ids.append(str(path.relative_to(root)))
    if cache:
        cache.save()
    X = np.stack(embeddings) if embeddings else np.zeros((0, 0))
    ds = LabeledDataset(X, list(words), speakers, words, ids)
    return ds, report


def build_word_model(ds: LabeledDataset, scope: str = "GENERAL", speaker_id: str = "", k: int = 1) -> KnnModel:
    """Word classifier; scope PERSON restricts training to one speaker."""
    if scope == "PERSON":
        idx = [i for i in range(len(ds)) if ds.speakers[i] == speaker_id]
        if not idx:
            raise UnknownSpeakerError(speaker_id)
        subset = ds.subset(idx)
        return KnnModel(k, subset.relabeled(subset.words))
    if len(ds) == 0:
        raise EmptyModelError("empty corpus")
    return KnnModel(k, ds.relabeled(ds.words))


def build_speaker_model(ds: LabeledDataset, k: int = 1) -> KnnModel:
    if len(ds) == 0:
        raise EmptyModelError("empty corpus")
    return KnnModel(k, ds.relabeled(ds.speakers))


def identify_speaker(model: KnnModel, clip: audio.AudioClip, kind: features.BankKind):
    """Predict who is speaking; vote counts double as confidence."""
    from .knn import predict

    trimmed = audio.trim_silence(audio.resample(clip, audio.CANONICAL_RATE))
    emb = features.clip_embedding(trimmed.samples, trimmed.sample_rate, _bank_for(kind))
    return predict(model, emb.values)
