"""Skip-gram training over walk corpora, with hierarchical-softmax and
negative-sampling objectives, plus the word2vec-text save/load format.

Training is sequential SGD in a jitted kernel: for every center position the
context window contributes (center, context) pairs, the learning rate decays
linearly to lr/100 over all scheduled updates, and a fixed seed yields an
identical embedding matrix. The published vectors are the center (input)
matrix.
"""

from __future__ import annotations

import heapq
import math
from typing import Sequence

import numpy as np
from numba import njit

from .walks import WalkCorpus

U64 = np.uint64

HIERARCHICAL_SOFTMAX = "hierarchical_softmax"
NEGATIVE_SAMPLING = "negative_sampling"


class EmbeddingMatrix:
    """One d-dimensional vector per node plus training metadata."""

    def __init__(self, vectors: np.ndarray, names: Sequence[str] | None = None,
                 meta: dict | None = None):
        if not np.all(np.isfinite(vectors)):
            raise ValueError("embedding vectors must be finite")
        self.vectors = vectors
        self.names = list(names) if names is not None else [str(i) for i in range(len(vectors))]
        self.meta = meta or {}
        self.name_to_id = {name: i for i, name in enumerate(self.names)}

    @property
    def node_count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


def build_huffman(frequencies: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Frequency-based Huffman coding over nodes.

    Returns (codes, points, lengths): for leaf v, codes[v,:len] are the
    branch bits from the root and points[v,:len] the internal-node ids along
    that path. Internal ids index the output-side weight matrix. Ties break
    on creation order, so the tree is deterministic.
    """
    n = len(frequencies)
    if n < 2:
        raise ValueError("huffman tree needs at least 2 symbols")
    heap: list[tuple[int, int]] = [(int(f), v) for v, f in enumerate(frequencies)]
    heapq.heapify(heap)
    parent = np.full(2 * n - 1, -1, dtype=np.int64)
    bit = np.zeros(2 * n - 1, dtype=np.int8)
    nxt = n
    while len(heap) > 1:
        f1, a = heapq.heappop(heap)
        f2, b = heapq.heappop(heap)
        parent[a] = nxt
        parent[b] = nxt
        bit[b] = 1
        heapq.heappush(heap, (f1 + f2, nxt))
        nxt += 1
    max_len = 0
    paths = []
    for v in range(n):
        code = []
        points = []
        node = v
        while parent[node] != -1:
            code.append(int(bit[node]))
            points.append(int(parent[node]) - n)  # internal ids -> 0..n-2
            node = parent[node]
        code.reverse()
        points.reverse()
        paths.append((code, points))
        max_len = max(max_len, len(code))
    codes = np.zeros((n, max_len), dtype=np.int8)
    point_arr = np.zeros((n, max_len), dtype=np.int64)
    lengths = np.zeros(n, dtype=np.int64)
    for v, (code, points) in enumerate(paths):
        lengths[v] = len(code)
        codes[v, :len(code)] = code
        point_arr[v, :len(points)] = points
    return codes, point_arr, lengths


def context_pair_count(walk_len: int, window: int) -> int:
    """Number of (center, context) pairs one sequence contributes."""
    total = 0
    for i in range(walk_len):
        total += min(i + window, walk_len - 1) - max(i - window, 0)
    return total


# --- reference per-pair objectives (the math the kernels implement) ---

def hs_pair_loss(center: np.ndarray, path_vectors: np.ndarray,
                 bits: np.ndarray) -> float:
    """-log P(context | center) along the context's Huffman path."""
    z = path_vectors @ center
    signs = 1.0 - 2.0 * bits
    return float(-np.sum(np.log(1.0 / (1.0 + np.exp(-signs * z)))))


def hs_pair_gradients(center: np.ndarray, path_vectors: np.ndarray,
                      bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of hs_pair_loss w.r.t. the center vector and each
    path vector (same orientation: gradients of the loss, not the ascent)."""
    z = path_vectors @ center
    sig = 1.0 / (1.0 + np.exp(-z))
    coef = sig - (1.0 - bits)  # d loss / d z
    grad_center = path_vectors.T @ coef
    grad_path = np.outer(coef, center)
    return grad_center, grad_path


def ns_pair_loss(center: np.ndarray, pos: np.ndarray,
                 negatives: np.ndarray) -> float:
    """-log sigma(center.pos) - sum -log sigma(-center.neg)."""
    zp = float(center @ pos)
    loss = -math.log(1.0 / (1.0 + math.exp(-zp)))
    for neg in negatives:
        zn = float(center @ neg)
        loss -= math.log(1.0 / (1.0 + math.exp(zn)))
    return loss


def ns_pair_gradients(center: np.ndarray, pos: np.ndarray, negatives: np.ndarray
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    zp = center @ pos
    sig_p = 1.0 / (1.0 + np.exp(-zp))
    grad_center = (sig_p - 1.0) * pos
    grad_pos = (sig_p - 1.0) * center
    grad_negs = np.zeros_like(negatives)
    for j, neg in enumerate(negatives):
        sig_n = 1.0 / (1.0 + np.exp(-(center @ neg)))
        grad_center = grad_center + sig_n * neg
        grad_negs[j] = sig_n * center
    return grad_center, grad_pos, grad_negs


@njit(cache=True)
def _hs_corpus_loss(walks, syn0, syn1, codes, points, lengths, window):
    rows, length = walks.shape
    d = syn0.shape[1]
    total = 0.0
    pairs = 0
    for row in range(rows):
        for i in range(length):
            center = walks[row, i]
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window
            if hi > length - 1:
                hi = length - 1
            for j in range(lo, hi + 1):
                if j == i:
                    continue
                context = walks[row, j]
                pairs += 1
                for b in range(lengths[context]):
                    pt = points[context, b]
                    z = 0.0
                    for q in range(d):
                        z += syn0[center, q] * syn1[pt, q]
                    sz = (1.0 - 2.0 * codes[context, b]) * z
                    total += np.log(1.0 + np.exp(-sz))
    return total / pairs


@njit(cache=True)
def _ns_corpus_loss(walks, syn0, syn1n, noise_cum, window, neg_count, seed):
    rows, length = walks.shape
    d = syn0.shape[1]
    gamma = U64(0x9E3779B97F4A7C15)
    mix_a = U64(0xBF58476D1CE4E5B9)
    mix_b = U64(0x94D049BB133111EB)
    inv53 = 1.0 / 9007199254740992.0
    state = U64(seed) * U64(0xFF51AFD7ED558CCD) + U64(0x9E3779B97F4A7C15)
    noise_total = noise_cum[noise_cum.shape[0] - 1]
    total = 0.0
    pairs = 0
    for row in range(rows):
        for i in range(length):
            center = walks[row, i]
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window
            if hi > length - 1:
                hi = length - 1
            for j in range(lo, hi + 1):
                if j == i:
                    continue
                context = walks[row, j]
                pairs += 1
                z = 0.0
                for q in range(d):
                    z += syn0[center, q] * syn1n[context, q]
                total += np.log(1.0 + np.exp(-z))
                for s in range(neg_count):
                    state = state + gamma
                    z64 = state
                    z64 = (z64 ^ (z64 >> U64(30))) * mix_a
                    z64 = (z64 ^ (z64 >> U64(27))) * mix_b
                    z64 = z64 ^ (z64 >> U64(31))
                    u = (z64 >> U64(11)) * inv53
                    tv = u * noise_total
                    a = 0
                    b = noise_cum.shape[0] - 1
                    while a < b:
                        mid = (a + b) >> 1
                        if noise_cum[mid] < tv:
                            a = mid + 1
                        else:
                            b = mid
                    if a == context:
                        continue
                    z = 0.0
                    for q in range(d):
                        z += syn0[center, q] * syn1n[a, q]
                    total += np.log(1.0 + np.exp(z))
    return total / pairs


@njit(cache=True)
def _train_hs_kernel(walks, syn0, syn1, codes, points, lengths, window,
                     epochs, lr_start, lr_end, epoch_loss):
    rows, length = walks.shape
    d = syn0.shape[1]
    pairs_per_epoch = 0
    for i in range(length):
        hi = i + window
        if hi > length - 1:
            hi = length - 1
        lo = i - window
        if lo < 0:
            lo = 0
        pairs_per_epoch += hi - lo
    pairs_per_epoch *= rows
    total = pairs_per_epoch * epochs
    t = 0
    neu = np.zeros(d)
    for epoch in range(epochs):
        for row in range(rows):
            for i in range(length):
                center = walks[row, i]
                lo = i - window
                if lo < 0:
                    lo = 0
                hi = i + window
                if hi > length - 1:
                    hi = length - 1
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    context = walks[row, j]
                    lr = lr_start + (lr_end - lr_start) * (t / total)
                    t += 1
                    for q in range(d):
                        neu[q] = 0.0
                    clen = lengths[context]
                    for b in range(clen):
                        pt = points[context, b]
                        z = 0.0
                        for q in range(d):
                            z += syn0[center, q] * syn1[pt, q]
                        sig = 1.0 / (1.0 + np.exp(-z))
                        g = (1.0 - codes[context, b]) - sig
                        for q in range(d):
                            neu[q] += g * syn1[pt, q]
                            syn1[pt, q] += lr * g * syn0[center, q]
                    for q in range(d):
                        syn0[center, q] += lr * neu[q]
        # corpus loss at the post-epoch parameters
        epoch_loss[epoch] = _hs_corpus_loss(walks, syn0, syn1, codes, points,
                                            lengths, window)


@njit(cache=True)
def _train_ns_kernel(walks, syn0, syn1n, noise_cum, window, neg_count,
                     epochs, lr_start, lr_end, seed, loss_seed, epoch_loss):
    rows, length = walks.shape
    d = syn0.shape[1]
    gamma = U64(0x9E3779B97F4A7C15)
    mix_a = U64(0xBF58476D1CE4E5B9)
    mix_b = U64(0x94D049BB133111EB)
    inv53 = 1.0 / 9007199254740992.0
    state = U64(seed) * U64(0xFF51AFD7ED558CCD) + U64(0xD1342543DE82EF95)
    state = (state ^ (state >> U64(30))) * mix_a
    state = (state ^ (state >> U64(27))) * mix_b
    state = state ^ (state >> U64(31))
    pairs_per_epoch = 0
    for i in range(length):
        hi = i + window
        if hi > length - 1:
            hi = length - 1
        lo = i - window
        if lo < 0:
            lo = 0
        pairs_per_epoch += hi - lo
    pairs_per_epoch *= rows
    total = pairs_per_epoch * epochs
    noise_total = noise_cum[noise_cum.shape[0] - 1]
    t = 0
    neu = np.zeros(d)
    for epoch in range(epochs):
        for row in range(rows):
            for i in range(length):
                center = walks[row, i]
                lo = i - window
                if lo < 0:
                    lo = 0
                hi = i + window
                if hi > length - 1:
                    hi = length - 1
                for j in range(lo, hi + 1):
                    if j == i:
                        continue
                    context = walks[row, j]
                    lr = lr_start + (lr_end - lr_start) * (t / total)
                    t += 1
                    for q in range(d):
                        neu[q] = 0.0
                    for s in range(neg_count + 1):
                        if s == 0:
                            target = context
                            label = 1.0
                        else:
                            state = state + gamma
                            z64 = state
                            z64 = (z64 ^ (z64 >> U64(30))) * mix_a
                            z64 = (z64 ^ (z64 >> U64(27))) * mix_b
                            z64 = z64 ^ (z64 >> U64(31))
                            u = (z64 >> U64(11)) * inv53
                            tv = u * noise_total
                            a = 0
                            b = noise_cum.shape[0] - 1
                            while a < b:
                                mid = (a + b) >> 1
                                if noise_cum[mid] < tv:
                                    a = mid + 1
                                else:
                                    b = mid
                            target = a
                            if target == context:
                                continue
                            label = 0.0
                        z = 0.0
                        for q in range(d):
                            z += syn0[center, q] * syn1n[target, q]
                        sig = 1.0 / (1.0 + np.exp(-z))
                        g = label - sig
                        for q in range(d):
                            neu[q] += g * syn1n[target, q]
                            syn1n[target, q] += lr * g * syn0[center, q]
                    for q in range(d):
                        syn0[center, q] += lr * neu[q]
        # corpus loss at the post-epoch parameters, fixed evaluation negatives
        epoch_loss[epoch] = _ns_corpus_loss(walks, syn0, syn1n, noise_cum,
                                            window, neg_count, loss_seed)


def skipgram_train(corpus: WalkCorpus, d: int, window: int = 10, epochs: int = 5,
                   objective: str = HIERARCHICAL_SOFTMAX, neg_count: int = 5,
                   lr: float = 0.025, seed: int = 0,
                   names: Sequence[str] | None = None) -> EmbeddingMatrix:
    """Train node vectors so nodes sharing walk contexts end up close.

    Hierarchical softmax (default) routes context probabilities through a
    corpus-frequency Huffman tree; negative sampling draws `neg_count`
    negatives from the unigram distribution raised to 3/4.
    """
    if corpus.walks.size == 0:
        raise ValueError("empty walk corpus")
    if d < 1 or window < 1 or epochs < 1:
        raise ValueError("d, window and epochs must all be >= 1")
    n = corpus.node_count
    rng = np.random.default_rng([seed, 0x5B])
    syn0 = (rng.random((n, d)) - 0.5) / d
    epoch_loss = np.zeros(epochs)
    walks = corpus.walks
    if objective == HIERARCHICAL_SOFTMAX:
        freq = corpus.frequencies()
        codes, points, lengths = build_huffman(freq)
        syn1 = np.zeros((max(n - 1, 1), d))
        _train_hs_kernel(walks, syn0, syn1, codes, points, lengths, window,
                         epochs, lr, lr / 100.0, epoch_loss)
    elif objective == NEGATIVE_SAMPLING:
        freq = corpus.frequencies().astype(np.float64)
        noise_cum = np.cumsum(freq ** 0.75)
        syn1n = np.zeros((n, d))
        _train_ns_kernel(walks, syn0, syn1n, noise_cum, window, neg_count,
                         epochs, lr, lr / 100.0,
                         np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                         np.uint64((seed ^ 0xA5A5A5A5) & 0xFFFFFFFFFFFFFFFF),
                         epoch_loss)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    meta = {"objective": objective, "window": window, "epochs": epochs,
            "lr": lr, "seed": seed, "epoch_loss": epoch_loss.tolist()}
    if objective == NEGATIVE_SAMPLING:
        meta["neg_count"] = neg_count
    return EmbeddingMatrix(syn0, names, meta)


def save_embeddings(emb: EmbeddingMatrix, path) -> None:
    """word2vec text format: "n d" header, then label plus d values per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{emb.node_count} {emb.dimension}\n")
        for name, vec in zip(emb.names, emb.vectors):
            fh.write(name + " " + " ".join(f"{x:.9g}" for x in vec) + "\n")


def load_embeddings(path) -> EmbeddingMatrix:
    """Inverse of save_embeddings; malformed rows raise naming the line."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: line 1: malformed header")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"{path}: line 1: malformed header") from None
        names = []
        vectors = np.zeros((count, dim))
        for i in range(count):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: line {i + 2}: expected {count} rows, "
                                 f"file ends after {i}")
            parts = line.split()
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: line {i + 2}: expected {dim} values, "
                                 f"got {len(parts) - 1}")
            names.append(parts[0])
            vectors[i] = [float(x) for x in parts[1:]]
    return EmbeddingMatrix(vectors, names)
