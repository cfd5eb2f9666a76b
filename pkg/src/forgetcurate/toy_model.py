"""Deterministic softmax-linear classifier over hashed SMILES character n-grams.

It stands in for a sequence model: the target is an index into the closed
vocabulary of training products, and after every epoch each training example
is scored top-1 correct or not, which yields the correctness matrix.

Features: every character unigram and adjacent bigram of the source side is
hashed with CRC-32 (``zlib.crc32`` of ``"u\\x00" + tok`` or
``"b\\x00" + tok1 + tok2``, UTF-8) modulo ``feature_dim`` and counted.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DataError, DegenerateTask, EmptyInput, KTooLarge
from .events import CorrectnessMatrix, DEFAULT_EPOCHS, MatrixKind
from .likelihood import ConfidenceRecord
from .reaction_data import ReactionRecord, tokenize_smiles


@dataclass(frozen=True)
class ToyModelConfig:
    feature_dim: int = 2**16
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = 0.1
    batch_size: int = 64
    seed: int = 0
    l2: float = 1e-5

    def __post_init__(self):
        if self.feature_dim < 1 or self.epochs < 1 or self.batch_size < 1:
            raise DataError("feature_dim, epochs and batch_size must be positive")
        if self.learning_rate <= 0 or self.l2 < 0:
            raise DataError("learning_rate must be positive and l2 non-negative")


@lru_cache(maxsize=1 << 16)
def _bucket(key: str, dim: int) -> int:
    return zlib.crc32(key.encode("utf-8")) % dim


def featurize(tokens: Sequence[str], feature_dim: int = 2**16) -> dict[int, float]:
    """Hashed unigram + bigram counts as ``{bucket: count}``."""
    if not tokens:
        raise EmptyInput("cannot featurize an empty token list")
    vec: dict[int, float] = {}
    for t in tokens:
        b = _bucket("u\x00" + t, feature_dim)
        vec[b] = vec.get(b, 0.0) + 1.0
    for a, c in zip(tokens, tokens[1:]):
        b = _bucket("b\x00" + a + c, feature_dim)
        vec[b] = vec.get(b, 0.0) + 1.0
    return vec


def feature_matrix(token_lists: Sequence[Sequence[str]], feature_dim: int) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for tokens in token_lists:
        vec = featurize(tokens, feature_dim)
        keys = sorted(vec)
        indices.extend(keys)
        data.extend(vec[k] for k in keys)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(token_lists), feature_dim),
    )


@dataclass(frozen=True)
class ToyTask:
    """Source token sequences with labels indexing ``vocabulary``.

    A label of -1 marks a target outside the vocabulary; such examples can
    never be predicted correctly.
    """

    tokens: tuple[tuple[str, ...], ...]
    labels: np.ndarray
    vocabulary: tuple[str, ...]
    example_ids: tuple[int, ...]
    superclasses: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.tokens) == len(self.labels) == len(self.example_ids) == len(self.superclasses)):
            raise DataError("task fields have different lengths")
        if len(self.labels) and self.labels.max() >= len(self.vocabulary):
            raise DataError("label outside the vocabulary")

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_records(
        cls, records: Sequence[ReactionRecord], vocabulary: Sequence[str] | None = None
    ) -> "ToyTask":
        """Build a task; without ``vocabulary`` it is the sorted set of these records' products."""
        if vocabulary is None:
            vocabulary = sorted({r.product for r in records})
        index = {p: k for k, p in enumerate(vocabulary)}
        return cls(
            tokens=tuple(tuple(tokenize_smiles(r.source).source_tokens) for r in records),
            labels=np.array([index.get(r.product, -1) for r in records], dtype=np.int64),
            vocabulary=tuple(vocabulary),
            example_ids=tuple(r.id for r in records),
            superclasses=tuple(r.superclass for r in records),
        )


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    np.exp(z, out=z)
    z /= z.sum(axis=1, keepdims=True)
    return z


def loss_and_grad(W: np.ndarray, b: np.ndarray, X, y: np.ndarray, l2: float):
    """Mean cross-entropy plus ``l2/2 * ||W||^2`` and its gradients w.r.t. ``W`` and ``b``."""
    n = X.shape[0]
    probs = softmax(np.asarray(X @ W) + b)
    loss = -np.log(probs[np.arange(n), y]).mean() + 0.5 * l2 * float((W * W).sum())
    probs[np.arange(n), y] -= 1.0
    probs /= n
    grad_W = np.asarray(X.T @ probs) + l2 * W
    return loss, grad_W, probs.sum(axis=0)


class ToyModel:
    """Softmax-linear model. ``W`` is stored as ``scale * V`` so weight decay is O(1) per step."""

    def __init__(self, config: ToyModelConfig, vocabulary: Sequence[str]):
        self.config = config
        self.vocabulary = tuple(vocabulary)
        n_classes = len(self.vocabulary)
        self._V = np.zeros((config.feature_dim, n_classes))
        self._scale = 1.0
        self.bias = np.zeros(n_classes)

    @property
    def weights(self) -> np.ndarray:
        return self._scale * self._V

    def _logits(self, X: sp.csr_matrix) -> np.ndarray:
        return self._scale * np.asarray(X @ self._V) + self.bias

    def predict_proba(self, X: sp.csr_matrix) -> np.ndarray:
        return softmax(self._logits(X))

    def loss(self, X: sp.csr_matrix, y: np.ndarray) -> float:
        probs = self.predict_proba(X)
        l2 = self.config.l2
        return float(
            -np.log(probs[np.arange(len(y)), y]).mean()
            + 0.5 * l2 * self._scale**2 * float((self._V * self._V).sum())
        )

    def sgd_step(self, X: sp.csr_matrix, y: np.ndarray) -> None:
        """One minibatch step, touching only the weight rows of active features."""
        cfg = self.config
        cols, inverse = np.unique(X.indices, return_inverse=True)
        Xc = sp.csr_matrix((X.data, inverse.ravel(), X.indptr), shape=(X.shape[0], len(cols)))
        probs = softmax(self._scale * np.asarray(Xc @ self._V[cols]) + self.bias)
        probs[np.arange(len(y)), y] -= 1.0
        probs /= len(y)
        grad_rows = np.asarray(Xc.T @ probs)
        # W <- (1 - lr*l2) W - lr * X^T G, applied through the scale factor
        self._scale *= 1.0 - cfg.learning_rate * cfg.l2
        self._V[cols] -= (cfg.learning_rate / self._scale) * grad_rows
        self.bias -= cfg.learning_rate * probs.sum(axis=0)
        if self._scale < 1e-3:
            self._V *= self._scale
            self._scale = 1.0


class TrackedRun(NamedTuple):
    matrix: CorrectnessMatrix
    confidences: list[ConfidenceRecord]
    model: ToyModel
    losses: list[float]


def _predict_labels(probs: np.ndarray) -> np.ndarray:
    # argmax returns the first maximum, i.e. the lowest label on ties
    return probs.argmax(axis=1)


def train_and_track(
    task: ToyTask,
    config: ToyModelConfig = ToyModelConfig(),
    eval_task: ToyTask | None = None,
    track_loss: bool = False,
) -> TrackedRun:
    """Train with seeded minibatch SGD, scoring every training example after each epoch.

    Confidences (top-1 softmax probability) are reported after the last epoch
    for ``eval_task``, or for the training examples when it is omitted.
    """
    if len(task.vocabulary) < 2 or len(set(task.labels.tolist()) - {-1}) < 2:
        raise DegenerateTask("training needs at least two distinct labels")
    if (task.labels < 0).any():
        raise DataError("training labels must be inside the vocabulary")
    rng = np.random.default_rng(config.seed)
    X = feature_matrix(task.tokens, config.feature_dim)
    y = task.labels
    model = ToyModel(config, task.vocabulary)
    columns = np.empty((len(task), config.epochs), dtype=np.uint8)
    losses: list[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(task))
        for start in range(0, len(order), config.batch_size):
            batch = np.sort(order[start:start + config.batch_size])
            model.sgd_step(X[batch], y[batch])
        probs = model.predict_proba(X)
        columns[:, epoch] = _predict_labels(probs) == y
        if track_loss:
            losses.append(model.loss(X, y))
    matrix = CorrectnessMatrix(task.example_ids, columns, MatrixKind.FORWARD)
    target = task if eval_task is None else eval_task
    return TrackedRun(matrix, confidence_records(model, target), model, losses)


def confidence_records(model: ToyModel, task: ToyTask) -> list[ConfidenceRecord]:
    if task.vocabulary != model.vocabulary:
        task = remap_task(task, model.vocabulary)
    probs = model.predict_proba(feature_matrix(task.tokens, model.config.feature_dim))
    pred = _predict_labels(probs)
    conf = probs[np.arange(len(pred)), pred]
    return [
        ConfidenceRecord(eid, sc, float(min(max(c, 0.0), 1.0)), bool(p == t))
        for eid, sc, c, p, t in zip(task.example_ids, task.superclasses, conf, pred, task.labels)
    ]


def remap_task(task: ToyTask, vocabulary: Sequence[str]) -> ToyTask:
    index = {p: k for k, p in enumerate(vocabulary)}
    labels = np.array(
        [index.get(task.vocabulary[l], -1) if l >= 0 else -1 for l in task.labels], dtype=np.int64
    )
    return ToyTask(task.tokens, labels, tuple(vocabulary), task.example_ids, task.superclasses)


def top1_accuracy(model: ToyModel, task: ToyTask) -> float:
    return float(np.mean([c.correct for c in confidence_records(model, task)]))


def predict_topk(model: ToyModel, tokens: Sequence[str], k: int) -> list[tuple[int, float]]:
    """``k`` best labels by softmax probability; ties go to the lower label id."""
    n = len(model.vocabulary)
    if k > n:
        raise KTooLarge(f"k={k} exceeds the vocabulary size {n}")
    probs = model.predict_proba(feature_matrix([tokens], model.config.feature_dim))[0]
    order = np.lexsort((np.arange(n), -probs))[:k]
    return [(int(i), float(probs[i])) for i in order]
