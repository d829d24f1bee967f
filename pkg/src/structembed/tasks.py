"""Downstream evaluation over embeddings: classification, clustering,
anomaly ranking, and nearest-neighbor queries.

Everything is deterministic given a seed; repeated runs derive one RNG
stream per repeat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .skipgram import EmbeddingMatrix


class LabelFileError(ValueError):
    pass


def load_label_file(path) -> dict[str, str]:
    """Read "node_label class_id" pairs; '#' starts a comment.

    A leading header row (second token not an integer) is tolerated, as some
    benchmark label files carry one.
    """
    out: dict[str, str] = {}
    first_data_line = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise LabelFileError(f"{path}: line {lineno}: expected 2 tokens")
            node, cls = parts
            if first_data_line:
                first_data_line = False
                try:
                    int(cls)
                except ValueError:
                    continue  # header row
            out[node] = cls
    return out


@dataclass
class LabeledDataset:
    """Embedding plus one dense class id (1..class_count) per node."""

    embedding: EmbeddingMatrix
    labels: np.ndarray
    class_count: int
    class_names: tuple[str, ...] = ()


def make_dataset(emb: EmbeddingMatrix, raw_labels: dict[str, str]) -> LabeledDataset:
    """Join an embedding with a label map; every embedded node needs a label."""
    classes = sorted(set(raw_labels.values()), key=lambda c: (len(c), c))
    class_id = {c: i + 1 for i, c in enumerate(classes)}
    labels = np.zeros(emb.node_count, dtype=np.int64)
    for i, name in enumerate(emb.names):
        if name not in raw_labels:
            raise LabelFileError(f"node {name!r} has no label")
        labels[i] = class_id[raw_labels[name]]
    return LabeledDataset(emb, labels, len(classes), tuple(classes))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _train_one_vs_rest(X: np.ndarray, y: np.ndarray, class_count: int,
                       l2: float = 1e-3, lr: float = 0.5, steps: int = 300
                       ) -> np.ndarray:
    """Full-batch gradient descent on C independent logistic losses."""
    n, d = X.shape
    targets = np.zeros((n, class_count))
    targets[np.arange(n), y - 1] = 1.0
    W = np.zeros((class_count, d))
    for _ in range(steps):
        P = _sigmoid(X @ W.T)
        grad = (P - targets).T @ X / n + l2 * W
        W -= lr * grad
    return W


def _with_bias(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def stratified_split(labels: np.ndarray, train_frac: float,
                     rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Per-class shuffle and split; every class keeps at least one training row."""
    train_idx: list[int] = []
    test_idx: list[int] = []
    for c in np.unique(labels):
        ids = np.flatnonzero(labels == c)
        ids = ids[rng.permutation(len(ids))]
        n_train = int(round(train_frac * len(ids)))
        n_train = max(1, min(len(ids) - 1, n_train)) if len(ids) > 1 else 1
        train_idx.extend(ids[:n_train])
        test_idx.extend(ids[n_train:])
    return np.sort(np.array(train_idx)), np.sort(np.array(test_idx))


def classify_eval(ds: LabeledDataset, train_frac: float = 0.8, repeats: int = 10,
                  seed: int = 0) -> tuple[float, list[float]]:
    """Repeated stratified splits scored by a one-vs-rest logistic classifier.

    Each repeat standardizes features on its training rows, fits by gradient
    descent with L2 regularization, and reports held-out accuracy. Returns
    the mean and the per-run list.
    """
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train_frac must be in (0, 1)")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    X_all = ds.embedding.vectors
    accs: list[float] = []
    for rep in range(repeats):
        rng = np.random.default_rng([seed, rep])
        train, test = stratified_split(ds.labels, train_frac, rng)
        if len(np.unique(ds.labels[train])) < ds.class_count:
            train, test = stratified_split(ds.labels, train_frac, rng)
            if len(np.unique(ds.labels[train])) < ds.class_count:
                raise ValueError("a class is absent from the training split")
        mean = X_all[train].mean(axis=0)
        std = X_all[train].std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        Xtr = _with_bias((X_all[train] - mean) / std)
        Xte = _with_bias((X_all[test] - mean) / std)
        W = _train_one_vs_rest(Xtr, ds.labels[train], ds.class_count)
        pred = np.argmax(Xte @ W.T, axis=1) + 1
        if len(test) == 0:
            accs.append(1.0)
        else:
            accs.append(float(np.mean(pred == ds.labels[test])))
    return float(np.mean(accs)), accs


def cross_val_accuracy(X: np.ndarray, y: np.ndarray, class_count: int,
                       folds: int = 5, seed: int = 0) -> float:
    """Stratified k-fold accuracy; the optimizer's leakage-free objective."""
    rng = np.random.default_rng([seed, 0xCF])
    fold_of = np.zeros(len(y), dtype=np.int64)
    for c in np.unique(y):
        ids = np.flatnonzero(y == c)
        ids = ids[rng.permutation(len(ids))]
        fold_of[ids] = np.arange(len(ids)) % folds
    accs = []
    for f in range(folds):
        test = fold_of == f
        train = ~test
        if not np.any(test) or len(np.unique(y[train])) < class_count:
            continue
        mean = X[train].mean(axis=0)
        std = np.where(X[train].std(axis=0) == 0.0, 1.0, X[train].std(axis=0))
        Xtr = _with_bias((X[train] - mean) / std)
        Xte = _with_bias((X[test] - mean) / std)
        W = _train_one_vs_rest(Xtr, y[train], class_count)
        pred = np.argmax(Xte @ W.T, axis=1) + 1
        accs.append(float(np.mean(pred == y[test])))
    if not accs:
        raise ValueError("no valid folds; too few labeled nodes")
    return float(np.mean(accs))


def kmeans(emb, k: int, restarts: int = 4, seed: int = 0,
           max_iter: int = 300, return_details: bool = False):
    """Lloyd's algorithm with k-means++ seeding, best inertia over restarts.

    Accepts an EmbeddingMatrix or a raw (n, d) array. With return_details,
    also returns the winning inertia and its per-iteration history.
    """
    X = emb.vectors if isinstance(emb, EmbeddingMatrix) else np.asarray(emb, dtype=np.float64)
    n = X.shape[0]
    if k < 1 or restarts < 1:
        raise ValueError("k and restarts must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds {n} points")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        centers = _kmeanspp(X, k, rng)
        labels = np.zeros(n, dtype=np.int64)
        history: list[float] = []
        for _ in range(max_iter):
            d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = np.argmin(d2, axis=1)
            inertia = float(d2[np.arange(n), new_labels].sum())
            history.append(inertia)
            for c in range(k):
                members = new_labels == c
                if np.any(members):
                    centers[c] = X[members].mean(axis=0)
                else:
                    far = int(np.argmax(d2[np.arange(n), new_labels]))
                    centers[c] = X[far]
                    new_labels[far] = c
            if np.array_equal(new_labels, labels) and len(history) > 1:
                labels = new_labels
                break
            labels = new_labels
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        inertia = float(d2[np.arange(n), labels].sum())
        if best is None or inertia < best[0]:
            best = (inertia, labels, history)
    inertia, labels, history = best
    if return_details:
        return labels, inertia, history
    return labels


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total == 0.0:
            centers[c] = X[rng.integers(n)]
            continue
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(closest), r))
        idx = min(idx, n - 1)
        centers[c] = X[idx]
        closest = np.minimum(closest, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def default_anomaly_k(node_count: int) -> int:
    """ceil(log2 n), floored at 1: large enough that a small cluster of
    structural twins cannot mask its own isolation from the rest."""
    return max(1, math.ceil(math.log2(max(node_count, 2))))


def anomaly_scores(emb, k_neighbors: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Mean distance to the k nearest embeddings, min-max scaled to [0, 1].

    k_neighbors defaults to ceil(log2 n). Returns (scores, ranking); the
    ranking is by descending score with ties broken by node id. Identical
    points all score 0.
    """
    X = emb.vectors if isinstance(emb, EmbeddingMatrix) else np.asarray(emb, dtype=np.float64)
    n = X.shape[0]
    if k_neighbors is None:
        k_neighbors = min(default_anomaly_k(n), n - 1)
    if not 1 <= k_neighbors < n:
        raise ValueError("k_neighbors must be in [1, node_count)")
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    dist = np.sqrt(np.sort(d2, axis=1)[:, :k_neighbors])
    raw = dist.mean(axis=1)
    lo, hi = raw.min(), raw.max()
    scores = np.zeros(n) if hi == lo else (raw - lo) / (hi - lo)
    ranking = np.lexsort((np.arange(n), -scores))
    return scores, ranking


def nearest_neighbors(emb: EmbeddingMatrix, node, m: int) -> list[int]:
    """The m nearest node ids by Euclidean distance, ties broken by id."""
    if isinstance(node, str):
        if node not in emb.name_to_id:
            raise KeyError(f"unknown node {node!r}")
        node = emb.name_to_id[node]
    n = emb.node_count
    if not 0 <= node < n:
        raise KeyError(f"unknown node id {node}")
    if m >= n:
        raise ValueError("m must be smaller than the node count")
    diff = emb.vectors - emb.vectors[node]
    dist = np.sqrt((diff * diff).sum(axis=1))
    order = np.lexsort((np.arange(n), dist))
    order = order[order != node]
    return [int(v) for v in order[:m]]
