"""k-nearest-neighbor classification over clip embeddings, plus the
per-class evaluation metrics (sensitivity / selectivity / specificity)
and the two split protocols: person-based and general.

Tie rules, in order: plurality vote; smaller mean distance of the tied
label's voting neighbors; lexicographically smaller label. Equidistant
points at the k-boundary are taken in training insertion order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


class DimensionMismatchError(ValueError):
    pass


class EmptyModelError(ValueError):
    pass


class UnknownSpeakerError(KeyError):
    pass


class InsufficientTakesError(ValueError):
    pass


@dataclass
class LabeledDataset:
    """Embeddings with word and speaker annotations; ``labels`` is whichever
    of the two a model is trained to predict."""

    embeddings: np.ndarray  # [n, d]
    labels: List[str]
    speakers: List[str]
    words: List[str]
    ids: Optional[List[str]] = None  # stable per-point identity (e.g. file path)

    def __post_init__(self):
        self.embeddings = np.asarray(self.embeddings, dtype=np.float64)
        if self.embeddings.ndim == 1:
            self.embeddings = self.embeddings.reshape(0, 0)
        n = self.embeddings.shape[0]
        assert len(self.labels) == len(self.speakers) == len(self.words) == n
        if self.ids is None:
            self.ids = [str(i) for i in range(n)]
        assert len(self.ids) == n

    def __len__(self) -> int:
        return self.embeddings.shape[0]

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        idx = list(indices)
        return LabeledDataset(
            self.embeddings[idx],
            [self.labels[i] for i in idx],
            [self.speakers[i] for i in idx],
            [self.words[i] for i in idx],
            [self.ids[i] for i in idx],
        )

    def relabeled(self, labels: Sequence[str]) -> "LabeledDataset":
        return LabeledDataset(self.embeddings, list(labels), self.speakers, self.words, self.ids)


@dataclass(frozen=True)
class KnnModel:
    k: int
    training: LabeledDataset

    def __post_init__(self):
        if len(self.training) == 0:
            raise EmptyModelError("no training points")
        if not 1 <= self.k <= len(self.training):
            raise ValueError("require 1 <= k <= |training|")


@dataclass(frozen=True)
class Prediction:
    label: str
    votes: Dict[str, int]
    mean_distance: float
    neighbor_ids: List[int]


def predict(model: KnnModel, query: np.ndarray) -> Prediction:
    q = np.asarray(query, dtype=np.float64).ravel()
    X = model.training.embeddings
    if q.shape[0] != X.shape[1]:
        raise DimensionMismatchError(f"query dim {q.shape[0]} != training dim {X.shape[1]}")
    dists = np.sqrt(((X - q) ** 2).sum(axis=1))
    order = np.argsort(dists, kind="stable")[: model.k]
    votes: Dict[str, int] = {}
    label_dists: Dict[str, List[float]] = {}
    for i in order:
        lab = model.training.labels[i]
        votes[lab] = votes.get(lab, 0) + 1
        label_dists.setdefault(lab, []).append(float(dists[i]))
    best = max(votes.values())
    tied = [lab for lab, v in votes.items() if v == best]
    tied.sort(key=lambda lab: (sum(label_dists[lab]) / len(label_dists[lab]), lab))
    return Prediction(
        label=tied[0],
        votes=votes,
        mean_distance=float(dists[order].mean()),
        neighbor_ids=[int(i) for i in order],
    )


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: Tuple[str, ...]
    counts: np.ndarray  # [true, predicted]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "counts": self.counts.tolist()}


def evaluate(model: KnnModel, test: LabeledDataset) -> ConfusionMatrix:
    labels = tuple(sorted(set(model.training.labels) | set(test.labels)))
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for i in range(len(test)):
        pred = predict(model, test.embeddings[i])
        counts[index[test.labels[i]], index[pred.label]] += 1
    return ConfusionMatrix(labels, counts)


@dataclass(frozen=True)
class ClassMetrics:
    sen: Optional[float]  # % , None when the class has no test points
    sel: Optional[float]  # % , None when the class was never predicted
    spe: float  # %


@dataclass(frozen=True)
class MetricsReport:
    per_class: Dict[str, ClassMetrics]
    macro_sen: float
    macro_sel: float
    macro_spe: float
    overall: float  # 100 * trace / total

    def to_json(self) -> dict:
        return {
            "per_class": {
                lab: {"SEN": m.sen, "SEL": m.sel, "SPE": m.spe}
                for lab, m in self.per_class.items()
            },
            "macro": {"SEN": self.macro_sen, "SEL": self.macro_sel, "SPE": self.macro_spe},
            "overall": self.overall,
        }


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """One-vs-rest SEN/SEL/SPE per class plus macro averages and overall
    accuracy (trace/total)."""
    total = cm.total
    if total == 0:
        raise ValueError("empty confusion matrix")
    per: Dict[str, ClassMetrics] = {}
    sens, sels, spes = [], [], []
    for i, lab in enumerate(cm.labels):
        tp = int(cm.counts[i, i])
        fn = int(cm.counts[i].sum()) - tp
        fp = int(cm.counts[:, i].sum()) - tp
        tn = total - tp - fn - fp
        sen = 100.0 * tp / (tp + fn) if tp + fn else None
        sel = 100.0 * tp / (tp + fp) if tp + fp else None
        spe = 100.0 * tn / (tn + fp) if tn + fp else 100.0
        per[lab] = ClassMetrics(sen, sel, spe)
        if sen is not None:
            sens.append(sen)
        if sel is not None:
            sels.append(sel)
        spes.append(spe)
    return MetricsReport(
        per_class=per,
        macro_sen=sum(sens) / len(sens) if sens else 0.0,
        macro_sel=sum(sels) / len(sels) if sels else 0.0,
        macro_spe=sum(spes) / len(spes),
        overall=100.0 * float(np.trace(cm.counts)) / total,
    )


def _stratified_split(
    ds: LabeledDataset, indices: List[int], train_frac: float, seed: int
) -> Tuple[LabeledDataset, LabeledDataset]:
    if not 0 < train_frac < 1:
        raise ValueError("train_frac must lie in (0, 1)")
    by_label: Dict[str, List[int]] = {}
    for i in indices:
        by_label.setdefault(ds.labels[i], []).append(i)
    rng = random.Random(seed)
    train_idx: List[int] = []
    test_idx: List[int] = []
    for lab in sorted(by_label):
        group = list(by_label[lab])
        if len(group) < 2:
            raise InsufficientTakesError(f"label {lab!r} has fewer than 2 takes")
        rng.shuffle(group)
        n_train = min(max(int(round(len(group) * train_frac)), 1), len(group) - 1)
        train_idx.extend(group[:n_train])
        test_idx.extend(group[n_train:])
    return ds.subset(sorted(train_idx)), ds.subset(sorted(test_idx))


def split_person_based(
    ds: LabeledDataset, speaker: str, train_frac: float = 0.7, seed: int = 0
) -> Tuple[LabeledDataset, LabeledDataset]:
    """Stratified per-word split within a single speaker's takes."""
    mine = [i for i in range(len(ds)) if ds.speakers[i] == speaker]
    if not mine:
        raise UnknownSpeakerError(speaker)
    scoped = ds.relabeled(ds.words)
    return _stratified_split(scoped, mine, train_frac, seed)


def split_general(
    ds: LabeledDataset, train_frac: float = 0.7, seed: int = 0
) -> Tuple[LabeledDataset, LabeledDataset]:
    """Stratified per-word split pooled over all speakers."""
    scoped = ds.relabeled(ds.words)
    return _stratified_split(scoped, list(range(len(ds))), train_frac, seed)
