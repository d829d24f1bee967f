"""Per-node structural indicators: centralities, cores, graphlet orbits, walk stats.

Every function maps a Graph to an IndicatorTable holding one scalar (or one
fixed-length vector) per node. Deterministic indicators are exactly
permutation-equivariant; the Monte-Carlo walk indicators derive one RNG
stream per node id, so fixed seed + fixed graph gives identical output
regardless of evaluation order or thread count (their realizations are
equivariant in distribution, not bitwise, under relabeling).
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .graph import Graph

SCALAR = "scalar"
VECTOR = "vector"

GDV_ORBITS = 15


class IndicatorTable:
    """Values of one indicator for every node.

    values has shape (n,) for scalar tables and (n, width) for vector
    tables. `meta` carries computation details such as convergence flags.
    """

    def __init__(self, name: str, values: np.ndarray, kind: str = SCALAR,
                 meta: dict | None = None):
        self.name = name
        self.values = values
        self.kind = kind
        self.meta = meta or {}

    @property
    def width(self) -> int:
        return 1 if self.kind == SCALAR else self.values.shape[1]

    def standardized(self) -> "IndicatorTable":
        """Zero-mean unit-variance copy (per column); constant columns map to 0."""
        vals = self.values.astype(np.float64)
        mean = vals.mean(axis=0)
        std = vals.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        out = (vals - mean) / std
        return IndicatorTable(self.name, out, self.kind, dict(self.meta, standardized=True))


def degree(g: Graph) -> IndicatorTable:
    """Number of edges attached to each node."""
    return IndicatorTable("degree", g.degrees.astype(np.float64))


def clustering_coefficient(g: Graph) -> IndicatorTable:
    """Fraction of realized edges among each node's neighbors; 0 below degree 2."""
    nbr_sets = [set(map(int, a)) for a in g.adjacency]
    out = np.zeros(g.node_count, dtype=np.float64)
    for v in range(g.node_count):
        d = len(g.adjacency[v])
        if d < 2:
            continue
        links = 0
        nbrs = g.adjacency[v]
        for i in range(d):
            si = nbr_sets[int(nbrs[i])]
            for j in range(i + 1, d):
                if int(nbrs[j]) in si:
                    links += 1
        out[v] = 2.0 * links / (d * (d - 1))
    return IndicatorTable("clustering", out)


def closeness_centrality(g: Graph) -> IndicatorTable:
    """Per-component closeness: (reachable - 1) / sum of BFS distances.

    Isolated nodes score 0.
    """
    n = g.node_count
    out = np.zeros(n, dtype=np.float64)
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        total = 0
        reachable = 0
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    total += dist[v]
                    reachable += 1
                    queue.append(int(v))
        if reachable > 0:
            out[s] = reachable / total
    return IndicatorTable("closeness", out)


def betweenness_centrality(g: Graph) -> IndicatorTable:
    """Unnormalized shortest-path betweenness, endpoints excluded.

    Brandes' dependency accumulation; each unordered pair contributes once.
    """
    n = g.node_count
    bc = np.zeros(n, dtype=np.float64)
    for s in range(n):
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n, dtype=np.float64)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            stack.append(u)
            for v in g.adjacency[u]:
                v = int(v)
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = np.zeros(n, dtype=np.float64)
        while stack:
            w = stack.pop()
            for u in preds[w]:
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return IndicatorTable("betweenness", bc / 2.0)


def eigenvector_centrality(g: Graph, iterations: int = 100,
                           tolerance: float = 1e-8) -> IndicatorTable:
    """Power iteration on the adjacency operator, L2-normalized each step.

    Returns the last iterate with meta['converged'] indicating whether the
    max-norm step change fell below `tolerance` within the iteration cap.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    n = g.node_count
    if n == 0:
        return IndicatorTable("eigenvector", np.zeros(0), meta={"converged": True})
    src = np.concatenate([np.full(len(a), u, dtype=np.int64)
                          for u, a in enumerate(g.adjacency)])
    dst = np.concatenate(g.adjacency).astype(np.int64)
    x = np.full(n, 1.0 / np.sqrt(n))
    converged = False
    steps = 0
    for steps in range(1, iterations + 1):
        y = np.zeros(n)
        np.add.at(y, src, x[dst])
        norm = np.linalg.norm(y)
        if norm == 0.0:
            x = np.zeros(n)
            converged = True
            break
        y /= norm
        if np.max(np.abs(y - x)) < tolerance:
            x = y
            converged = True
            break
        x = y
    return IndicatorTable("eigenvector", x, meta={"converged": converged, "iterations": steps})


def core_number(g: Graph) -> IndicatorTable:
    """Largest k such that the node survives in the k-core (min-degree peeling)."""
    import heapq

    n = g.node_count
    deg = g.degrees.copy()
    core = np.zeros(n, dtype=np.int64)
    removed = np.zeros(n, dtype=bool)
    heap = [(int(deg[v]), v) for v in range(n)]
    heapq.heapify(heap)
    current = 0
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        current = max(current, d)
        core[v] = current
        for u in g.adjacency[v]:
            u = int(u)
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (int(deg[u]), u))
    return IndicatorTable("core", core.astype(np.float64))


def _classify_triple(nbr: list[set[int]], a: int, b: int, c: int,
                     orbits: np.ndarray) -> None:
    ab = b in nbr[a]
    ac = c in nbr[a]
    bc = c in nbr[b]
    m = ab + ac + bc
    if m == 3:
        orbits[a, 3] += 1
        orbits[b, 3] += 1
        orbits[c, 3] += 1
    else:  # exactly 2 edges: a path; the shared endpoint is the middle
        if ab and ac:
            mid, ends = a, (b, c)
        elif ab and bc:
            mid, ends = b, (a, c)
        else:
            mid, ends = c, (a, b)
        orbits[mid, 2] += 1
        orbits[ends[0], 1] += 1
        orbits[ends[1], 1] += 1


def _classify_quad(nbr: list[set[int]], quad: tuple[int, int, int, int],
                   orbits: np.ndarray) -> None:
    deg = [0, 0, 0, 0]
    m = 0
    for i in range(4):
        for j in range(i + 1, 4):
            if quad[j] in nbr[quad[i]]:
                deg[i] += 1
                deg[j] += 1
                m += 1
    if m == 3:
        if max(deg) == 3:  # star
            for i, v in enumerate(quad):
                orbits[v, 7 if deg[i] == 3 else 6] += 1
        else:  # path
            for i, v in enumerate(quad):
                orbits[v, 5 if deg[i] == 2 else 4] += 1
    elif m == 4:
        if max(deg) == 3:  # triangle with a pendant edge
            for i, v in enumerate(quad):
                orbits[v, (0, 9, 10, 11)[deg[i]]] += 1
        else:  # 4-cycle
            for v in quad:
                orbits[v, 8] += 1
    elif m == 5:  # complete minus one edge
        for i, v in enumerate(quad):
            orbits[v, 13 if deg[i] == 3 else 12] += 1
    else:  # m == 6, complete
        for v in quad:
            orbits[v, 14] += 1


def gdv(g: Graph) -> IndicatorTable:
    """Graphlet degree vector over the 15 orbits of the 2..4-node graphlets.

    Counts, for every node, how often it occupies each orbit across all
    connected induced subgraphs of at most 4 nodes, enumerated once each
    (Wernicke-style expansion). Orbit 0 equals the degree.
    """
    n = g.node_count
    nbr = [set(map(int, a)) for a in g.adjacency]
    orbits = np.zeros((n, GDV_ORBITS), dtype=np.int64)
    orbits[:, 0] = g.degrees

    def extend(sub: list[int], ext: set[int], closed: set[int], root: int, size: int) -> None:
        if len(sub) == size:
            if size == 3:
                _classify_triple(nbr, sub[0], sub[1], sub[2], orbits)
            else:
                _classify_quad(nbr, (sub[0], sub[1], sub[2], sub[3]), orbits)
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            new_ext = set(ext)
            fresh = [u for u in nbr[w] if u > root and u not in closed]
            new_ext.update(fresh)
            sub.append(w)
            extend(sub, new_ext, closed | set(fresh) | {w}, root, size)
            sub.pop()

    for size in (3, 4):
        for v in range(n):
            ext0 = {u for u in nbr[v] if u > v}
            extend([v], ext0, {v} | set(nbr[v]), v, size)
    return IndicatorTable("gdv", orbits.astype(np.float64), kind=VECTOR)


def _node_rng(seed: int, node: int) -> np.random.Generator:
    return np.random.default_rng([seed, node])


def _uniform_walk(g: Graph, start: int, walk_len: int,
                  rng: np.random.Generator) -> list[int]:
    walk = [start]
    cur = start
    for _ in range(walk_len - 1):
        nbrs = g.adjacency[cur]
        if len(nbrs) == 0:
            break
        cur = int(nbrs[rng.integers(len(nbrs))])
        walk.append(cur)
    return walk


def anonymize_walk(walk: list[int], convention: str = "min_position") -> list[int]:
    """Replace node identities by integers.

    "min_position" assigns each node the 1-based position of its first
    occurrence; "first_rank" assigns consecutive ranks 1, 2, ... in order of
    first occurrence (the common convention in the anonymous-walk literature).
    """
    first: dict[int, int] = {}
    out = []
    for i, v in enumerate(walk):
        if v not in first:
            first[v] = (i + 1) if convention == "min_position" else (len(first) + 1)
        out.append(first[v])
    return out


def anonymous_walk_stats(g: Graph, walk_len: int = 10, walks_per_node: int = 10,
                         seed: int = 0, convention: str = "min_position"
                         ) -> tuple[IndicatorTable, IndicatorTable]:
    """Two walk-based tables: mean distinct-integer count and mean count of
    the start node's integer, over `walks_per_node` uniform walks per node."""
    if walk_len < 2:
        raise ValueError("walk_len must be >= 2")
    if walks_per_node < 1:
        raise ValueError("walks_per_node must be >= 1")
    n = g.node_count
    distinct = np.zeros(n, dtype=np.float64)
    start_occ = np.zeros(n, dtype=np.float64)
    for v in range(n):
        rng = _node_rng(seed, v)
        for _ in range(walks_per_node):
            seq = anonymize_walk(_uniform_walk(g, v, walk_len, rng), convention)
            distinct[v] += len(set(seq))
            start_occ[v] += seq.count(seq[0])
    distinct /= walks_per_node
    start_occ /= walks_per_node
    return (IndicatorTable("anon_distinct", distinct),
            IndicatorTable("anon_start_count", start_occ))


def random_walk_occurrences(g: Graph, walk_len: int = 10, walks_per_node: int = 10,
                            seed: int = 0) -> IndicatorTable:
    """Share of all walk positions occupied by each node, from uniform walks
    started `walks_per_node` times at every node."""
    if walk_len < 1:
        raise ValueError("walk_len must be >= 1")
    if walks_per_node < 1:
        raise ValueError("walks_per_node must be >= 1")
    n = g.node_count
    counts = np.zeros(n, dtype=np.float64)
    total = 0
    for v in range(n):
        rng = _node_rng(seed, v)
        for _ in range(walks_per_node):
            walk = _uniform_walk(g, v, walk_len, rng)
            total += len(walk)
            for u in walk:
                counts[u] += 1
    return IndicatorTable("rw_occurrence", counts / total)


def dump_indicator_tables(tables: list[IndicatorTable], g: Graph, path) -> None:
    """Write tables as tab-separated text: node label, then one column per value."""
    headers = ["node"]
    for t in tables:
        if t.kind == SCALAR:
            headers.append(t.name)
        else:
            headers.extend(f"{t.name}[{i}]" for i in range(t.width))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + "\t".join(headers) + "\n")
        for v in range(g.node_count):
            row = [g.names[v]]
            for t in tables:
                if t.kind == SCALAR:
                    row.append(f"{t.values[v]:.9g}")
                else:
                    row.extend(f"{x:.9g}" for x in t.values[v])
            fh.write("\t".join(row) + "\n")
