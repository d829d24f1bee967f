"""Random-walk corpora: weight-biased walks on the similarity graph and a
uniform-walk baseline on the original graph.

Walk sampling runs in a jitted kernel with a splitmix64 stream per
(start node, walk index), so corpora are byte-identical for a fixed seed no
matter how the work is scheduled.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .graph import Graph
from .simgraph import SimilarityGraph

U64 = np.uint64


@njit(cache=True)
def _walk_kernel(indptr, indices, cumw, p, length, seed, out):
    n = indptr.shape[0] - 1
    gamma = U64(0x9E3779B97F4A7C15)
    mix_a = U64(0xBF58476D1CE4E5B9)
    mix_b = U64(0x94D049BB133111EB)
    inv53 = 1.0 / 9007199254740992.0
    for s in range(n):
        for r in range(p):
            row = s * p + r
            state = U64(seed) * U64(0xFF51AFD7ED558CCD) + U64(row + 1) * U64(0xD1342543DE82EF95)
            state = (state ^ (state >> U64(30))) * mix_a
            state = (state ^ (state >> U64(27))) * mix_b
            state = state ^ (state >> U64(31))
            cur = s
            out[row, 0] = s
            for t in range(1, length):
                state = state + gamma
                z = state
                z = (z ^ (z >> U64(30))) * mix_a
                z = (z ^ (z >> U64(27))) * mix_b
                z = z ^ (z >> U64(31))
                u = (z >> U64(11)) * inv53
                lo = indptr[cur]
                hi = indptr[cur + 1]
                target = u * cumw[hi - 1]
                a = lo
                b = hi - 1
                while a < b:
                    mid = (a + b) >> 1
                    if cumw[mid] < target:
                        a = mid + 1
                    else:
                        b = mid
                cur = indices[a]
                out[row, t] = cur
    return out


class WalkCorpus:
    """p walks of fixed length from every node, stored row-major.

    Row s*p + r holds the r-th walk started at node s; every consecutive
    pair is an edge of the walked graph.
    """

    def __init__(self, walks: np.ndarray, node_count: int, walks_per_node: int,
                 walk_len: int, seed: int):
        self.walks = walks
        self.node_count = node_count
        self.walks_per_node = walks_per_node
        self.walk_len = walk_len
        self.seed = seed

    def sequences(self) -> np.ndarray:
        return self.walks

    def frequencies(self) -> np.ndarray:
        """Occurrence count of each node over the whole corpus."""
        return np.bincount(self.walks.ravel(), minlength=self.node_count)


def _run_walks(indptr: np.ndarray, indices: np.ndarray, cumw: np.ndarray,
               node_count: int, p: int, length: int, seed: int) -> np.ndarray:
    out = np.empty((node_count * p, length), dtype=np.int64)
    _walk_kernel(indptr.astype(np.int64), indices.astype(np.int64),
                 cumw.astype(np.float64), p, length,
                 np.uint64(seed & 0xFFFFFFFFFFFFFFFF), out)
    return out


def biased_walks(sg: SimilarityGraph, walks_per_node: int, walk_len: int,
                 seed: int) -> WalkCorpus:
    """Walks on the similarity graph; each step samples a neighbor with
    probability proportional to its edge weight."""
    if walks_per_node < 1:
        raise ValueError("walks_per_node must be >= 1")
    if walk_len < 2:
        raise ValueError("walk_len must be >= 2")
    degrees = np.diff(sg.indptr)
    if np.any(degrees == 0):
        bad = int(np.argmax(degrees == 0))
        raise ValueError(f"node {bad} has no similarity edges to walk on")
    walks = _run_walks(sg.indptr, sg.indices, sg.cumulative_weights(),
                       sg.node_count, walks_per_node, walk_len, seed)
    return WalkCorpus(walks, sg.node_count, walks_per_node, walk_len, seed)


def uniform_walks(g: Graph, walks_per_node: int, walk_len: int,
                  seed: int) -> WalkCorpus:
    """Proximity-style baseline: uniform neighbor sampling on the input graph."""
    if walks_per_node < 1:
        raise ValueError("walks_per_node must be >= 1")
    if walk_len < 2:
        raise ValueError("walk_len must be >= 2")
    if np.any(g.degrees == 0):
        bad = int(np.argmax(g.degrees == 0))
        raise ValueError(f"node {bad} ({g.names[bad]}) is isolated; walks undefined")
    indptr, indices = g.csr()
    cumw = np.concatenate([np.arange(1, d + 1, dtype=np.float64) for d in g.degrees])
    walks = _run_walks(indptr, indices, cumw, g.node_count,
                       walks_per_node, walk_len, seed)
    return WalkCorpus(walks, g.node_count, walks_per_node, walk_len, seed)


def dump_corpus(corpus: WalkCorpus, names: list[str], path) -> None:
    """One walk per line, space-separated node labels."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in corpus.walks:
            fh.write(" ".join(names[int(v)] for v in row) + "\n")
