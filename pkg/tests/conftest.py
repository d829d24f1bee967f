from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from structembed.config import PipelineConfig
from structembed.graph import Graph, build_graph, generate_mirrored_karate
from structembed.pipeline import embed_graph


def random_graph(n: int, m: int, seed: int) -> Graph:
    """Simple G(n, m)-style random graph; connectivity not guaranteed."""
    rng = np.random.default_rng(seed)
    edges = set()
    guard = 0
    while len(edges) < m and guard < 50 * m:
        u, v = int(rng.integers(n)), int(rng.integers(n))
        guard += 1
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return build_graph(n, sorted(edges))


def connected_random_graph(n: int, extra_edges: int, seed: int) -> Graph:
    """Random spanning tree plus extra random edges: always connected."""
    rng = np.random.default_rng(seed)
    edges = set()
    order = rng.permutation(n)
    for i in range(1, n):
        j = int(rng.integers(i))
        a, b = int(order[i]), int(order[j])
        edges.add((min(a, b), max(a, b)))
    guard = 0
    while len(edges) < n - 1 + extra_edges and guard < 50 * (extra_edges + 1):
        u, v = int(rng.integers(n)), int(rng.integers(n))
        guard += 1
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return build_graph(n, sorted(edges))


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture(scope="session")
def mirrored_karate() -> Graph:
    return generate_mirrored_karate()


def warm_up_kernels():
    """Trigger the jitted walk/trainer compilation on a toy run."""
    import time

    g = path_graph(6)
    cfg = PipelineConfig(max_hop=1, walks_per_node=1, walk_len=4, dim=2,
                         epochs=1, window=1).normalized()
    t0 = time.perf_counter()
    embed_graph(g, cfg)
    return time.perf_counter() - t0


@pytest.fixture(scope="session")
def karate_embeddings(mirrored_karate):
    """Default-config embeddings of the mirrored karate graph, seeds 0..9.

    Shared by the acceptance criteria and the task-level checks so the
    10-seed pipeline runs happen once per session. Returns the embedding
    list; the steady-state wall time of the 10 runs is stashed on the list
    as `.build_seconds` for the runtime gates.
    """
    import time

    warm_up_kernels()
    base = PipelineConfig().normalized()
    out = []
    t0 = time.perf_counter()
    for seed in range(10):
        cfg = replace(base, seed=seed)
        out.append(embed_graph(mirrored_karate, cfg).embedding)
    elapsed = time.perf_counter() - t0

    class TimedList(list):
        pass

    timed = TimedList(out)
    timed.build_seconds = elapsed
    return timed
