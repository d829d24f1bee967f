"""The auxiliary similarity graph: structural distances turned into edge weights.

The graph shares the original node set; an edge weight decreases strictly
with structural distance, so random walks favor structurally similar nodes.
Dense mode scores every pair; pruned mode scores only candidates that sit
close in per-(indicator, hop) sorted orderings, touching O(log n) partners
per node and list. Both modes evaluate pairs via the same routine, so a pair
retained by both carries bit-identical weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .similarity import NeighborhoodProfile, WeightConfig, pair_distances

LINEAR_EPSILON = 1e-6
_WEIGHT_FLOOR = 1e-300  # keep underflowed exponential weights strictly positive

DENSE_NODE_CAP = 5000


def weight_transform_linear(dist) -> np.ndarray | float:
    """1 / (dist + epsilon); epsilon keeps zero-distance edges finite."""
    return 1.0 / (np.asarray(dist, dtype=np.float64) + LINEAR_EPSILON)


def weight_transform_exponential(dist, wt: float):
    """wt ** (-dist) for wt > 1; wt = e makes weights softmax-proportional."""
    if wt <= 1.0:
        raise ValueError("exponential transform requires wt > 1")
    return np.maximum(np.asarray(wt, dtype=np.float64) **
                      (-np.asarray(dist, dtype=np.float64)), _WEIGHT_FLOOR)


@dataclass(frozen=True)
class TransformSpec:
    """Edge-weight transform choice: 'linear' or 'exponential' with base wt."""

    kind: str = "exponential"
    wt: float = math.e

    def validate(self) -> None:
        if self.kind not in ("linear", "exponential"):
            raise ValueError(f"unknown transform {self.kind!r}")
        if self.kind == "exponential" and self.wt <= 1.0:
            raise ValueError("exponential transform requires wt > 1")

    def apply(self, dist: np.ndarray) -> np.ndarray:
        self.validate()
        if self.kind == "linear":
            return weight_transform_linear(dist)
        return weight_transform_exponential(dist, self.wt)


class SimilarityGraph:
    """Symmetric weighted graph in CSR form over the original node set.

    `eval_count` records how many node pairs had their structural distance
    computed during construction (the complexity instrumentation hook).
    """

    def __init__(self, node_count: int, indptr: np.ndarray, indices: np.ndarray,
                 weights: np.ndarray, build_mode: str, eval_count: int,
                 transform: TransformSpec):
        self.node_count = node_count
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.build_mode = build_mode
        self.eval_count = eval_count
        self.transform = transform
        self._cumw: np.ndarray | None = None

    def neighbor_slice(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def degree(self, x: int) -> int:
        return int(self.indptr[x + 1] - self.indptr[x])

    def cumulative_weights(self) -> np.ndarray:
        """Per-row cumulative edge weights, aligned with `indices` (for sampling)."""
        if self._cumw is None:
            cumw = np.cumsum(self.weights)
            prev = np.concatenate(([0.0], cumw))[self.indptr[:-1]]
            self._cumw = cumw - np.repeat(prev, np.diff(self.indptr))
        return self._cumw


def transition_row(sg: SimilarityGraph, x: int) -> np.ndarray:
    """Transition probabilities from x: each edge weight over the row sum."""
    _, w = sg.neighbor_slice(x)
    if len(w) == 0:
        raise ValueError(f"node {x} has no similarity edges")
    return w / w.sum()


def _pairs_to_csr(n: int, xs: np.ndarray, ys: np.ndarray,
                  w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src = np.concatenate([xs, ys])
    dst = np.concatenate([ys, xs])
    ww = np.concatenate([w, w])
    order = np.lexsort((dst, src))
    src, dst, ww = src[order], dst[order], ww[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int64), ww


def build_dense(g: Graph, profile: NeighborhoodProfile, weights: WeightConfig,
                transform: TransformSpec = TransformSpec(),
                node_cap: int = DENSE_NODE_CAP, allow_large: bool = False
                ) -> SimilarityGraph:
    """Score every node pair; weight = transform(structural distance).

    Refuses graphs beyond `node_cap` nodes unless `allow_large` is set, since
    the pair evaluation is quadratic.
    """
    n = g.node_count
    if n > node_cap and not allow_large:
        raise ValueError(f"dense similarity graph over {n} nodes exceeds the "
                         f"cap of {node_cap}; pass allow_large to override")
    transform.validate()
    xs_parts, ys_parts, w_parts = [], [], []
    for x in range(n - 1):
        ys = np.arange(x + 1, n, dtype=np.int64)
        xs = np.full(len(ys), x, dtype=np.int64)
        d = pair_distances(profile, weights, xs, ys)
        xs_parts.append(xs)
        ys_parts.append(ys)
        w_parts.append(transform.apply(d))
    if xs_parts:
        xs = np.concatenate(xs_parts)
        ys = np.concatenate(ys_parts)
        w = np.concatenate(w_parts)
    else:
        xs = ys = np.empty(0, dtype=np.int64)
        w = np.empty(0)
    indptr, indices, ww = _pairs_to_csr(n, xs, ys, w)
    return SimilarityGraph(n, indptr, indices, ww, "dense", n * (n - 1) // 2, transform)


def candidate_window(n: int, c: float) -> int:
    """Per-direction window inside each sorted list: ceil(c * log2 n)."""
    if n < 2:
        return 0
    return int(math.ceil(c * math.log2(n)))


def build_pruned(g: Graph, profile: NeighborhoodProfile, weights: WeightConfig,
                 transform: TransformSpec = TransformSpec(),
                 c: float = 2.0) -> SimilarityGraph:
    """Score only list-neighbor candidates instead of all pairs.

    For every (indicator, hop) cell with positive weight, nodes are sorted by
    that cell's scalar ordering key; each node is paired with the
    ceil(c*log2 n) list neighbors on either side. The union of those pairs
    (an edge survives if either endpoint selected it) is evaluated once each.
    """
    if c <= 0:
        raise ValueError("candidate budget c must be > 0")
    transform.validate()
    n = g.node_count
    window = candidate_window(n, c)
    pair_keys: list[np.ndarray] = []
    for i in range(len(profile.indicators)):
        for k in range(weights.max_hop + 1):
            if weights.cell(i, k) == 0.0:
                continue
            order = np.argsort(profile.sort_key(i, k), kind="stable").astype(np.int64)
            for delta in range(1, min(window, n - 1) + 1):
                a = order[:-delta]
                b = order[delta:]
                lo = np.minimum(a, b)
                hi = np.maximum(a, b)
                pair_keys.append(lo * n + hi)
    if pair_keys:
        uniq = np.unique(np.concatenate(pair_keys))
        xs = (uniq // n).astype(np.int64)
        ys = (uniq % n).astype(np.int64)
        d = pair_distances(profile, weights, xs, ys)
        w = transform.apply(d)
    else:
        xs = ys = np.empty(0, dtype=np.int64)
        w = np.empty(0)
    indptr, indices, ww = _pairs_to_csr(n, xs, ys, w)
    return SimilarityGraph(n, indptr, indices, ww, "pruned", len(xs), transform)


def dump_similarity_graph(sg: SimilarityGraph, g: Graph, path) -> None:
    """Write the weighted edge list as text: label label weight."""
    with open(path, "w", encoding="utf-8") as fh:
        for x in range(sg.node_count):
            nbrs, w = sg.neighbor_slice(x)
            for j, y in enumerate(nbrs):
                if x < y:
                    fh.write(f"{g.names[x]} {g.names[int(y)]} {w[j]:.12g}\n")
