"""Structural distance between nodes from weighted indicator comparisons.

A node pair is compared layer by layer: for hop k, the multiset of indicator
values over N_k(x) is compared against the one over N_k(y) by a symmetric
comparison function, weighted per (indicator, hop), and summed. The result
is a dissimilarity: 0 means structurally indistinguishable under the chosen
indicators. Optional proximity summands (community histograms, shortest-path
lengths) add non-structural terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, KHopIndex, all_pairs_shortest_paths, UNREACHABLE
from .indicators import IndicatorTable, SCALAR, VECTOR

MODES = ("sorted_dtw", "aggregate_scalar", "aggregate_vector", "pairwise_node_score")
ELEMENTWISE = ("absolute_diff", "ratio")
COMBINERS = ("difference", "quotient")
VECTOR_METRICS = ("euclidean", "manhattan", "cosine", "pearson", "spearman",
                  "jaccard", "hamming")
AGGREGATOR_NAMES = ("mean", "median", "sum", "min", "max", "variance", "std", "iqr")


def ratio_distance(a: float, b: float) -> float:
    """max(a,b)/min(a,b) - 1; defined for strictly positive inputs only.

    Integer-valued indicators that may contain zeros should be shifted by +1
    before using this distance (see ComparisonSpec.value_shift).
    """
    if a <= 0 or b <= 0:
        raise ValueError("ratio distance needs positive inputs; shift integer "
                         "indicators by +1 (value_shift) before comparing")
    return max(a, b) / min(a, b) - 1.0


def _aggregate(values: np.ndarray, name: str) -> float:
    if name == "mean":
        return float(np.mean(values))
    if name == "median":
        return float(np.median(values))
    if name == "sum":
        return float(np.sum(values))
    if name == "min":
        return float(np.min(values))
    if name == "max":
        return float(np.max(values))
    if name == "variance":
        return float(np.var(values))
    if name == "std":
        return float(np.std(values))
    if name == "iqr":
        return float(np.percentile(values, 75) - np.percentile(values, 25))
    raise ValueError(f"unknown aggregator {name!r}")


@dataclass
class ComparisonSpec:
    """How one indicator's value multisets are turned into a dissimilarity.

    mode selects the comparison family; only the fields relevant to that mode
    are consulted. Every configuration is symmetric and maps identical
    nonempty inputs to 0. `empty_value` is the dissimilarity reported when
    exactly one side is empty and no zero-substitute applies (both-empty
    always yields 0); `value_shift` is added to raw values first, which is
    how integer indicators are made safe for the ratio distance.
    """

    mode: str = "aggregate_scalar"
    elementwise: str = "absolute_diff"
    aggregators: tuple[tuple[str, float], ...] = (("mean", 1.0),)
    combiner: str = "difference"
    vector_metric: str = "euclidean"
    empty_value: float = 0.0
    value_shift: float = 0.0

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown comparison mode {self.mode!r}")
        if self.elementwise not in ELEMENTWISE:
            raise ValueError(f"unknown elementwise distance {self.elementwise!r}")
        if self.combiner not in COMBINERS:
            raise ValueError(f"unknown combiner {self.combiner!r}")
        if self.vector_metric not in VECTOR_METRICS:
            raise ValueError(f"unknown vector metric {self.vector_metric!r}")
        if not self.aggregators:
            raise ValueError("at least one aggregator required")
        for name, _ in self.aggregators:
            if name not in AGGREGATOR_NAMES:
                raise ValueError(f"unknown aggregator {name!r}")

    def combined_aggregate(self, values: np.ndarray) -> float:
        return float(sum(w * _aggregate(values, name) for name, w in self.aggregators))


def dtw_distance(x: np.ndarray, y: np.ndarray, elementwise: str = "absolute_diff") -> float:
    """Dynamic-time-warping distance with full window over two sequences."""
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        raise ValueError("dtw needs nonempty sequences")
    if elementwise == "ratio":
        def d(a, b):
            return ratio_distance(a, b)
    else:
        def d(a, b):
            return abs(a - b)
    table = np.full((n + 1, m + 1), np.inf)
    table[0, 0] = 0.0
    for i in range(1, n + 1):
        xi = x[i - 1]
        for j in range(1, m + 1):
            cost = d(xi, y[j - 1])
            table[i, j] = cost + min(table[i - 1, j], table[i, j - 1], table[i - 1, j - 1])
    return float(table[n, m])


def _vector_metric(a: np.ndarray, b: np.ndarray, metric: str) -> float:
    if metric == "euclidean":
        return float(np.linalg.norm(a - b))
    if metric == "manhattan":
        return float(np.abs(a - b).sum())
    if metric == "cosine":
        if np.array_equal(a, b):
            return 0.0
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0.0 or nb == 0.0:
            return 2.0  # maximal cosine dissimilarity
        return float(1.0 - np.dot(a, b) / (na * nb))
    if metric in ("pearson", "spearman"):
        if np.array_equal(a, b):
            return 0.0
        if metric == "spearman":
            a, b = _average_ranks(a), _average_ranks(b)
        sa, sb = a.std(), b.std()
        if sa == 0.0 or sb == 0.0:
            return 2.0  # correlation undefined against a constant vector
        corr = float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))
        return 1.0 - corr
    raise ValueError(f"unknown vector metric {metric!r}")


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    sx = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _multiset_counts(rows: np.ndarray) -> dict:
    from collections import Counter
    if rows.ndim == 1:
        return Counter(rows.tolist())
    return Counter(map(tuple, rows.tolist()))


def _jaccard_dissim(a: np.ndarray, b: np.ndarray) -> float:
    ca, cb = _multiset_counts(a), _multiset_counts(b)
    inter = sum(min(ca[k], cb.get(k, 0)) for k in ca)
    union = sum(ca.values()) + sum(cb.values()) - inter
    if union == 0:
        return 0.0
    return 1.0 - inter / union


def _hamming_dissim(a: np.ndarray, b: np.ndarray) -> float:
    sa = np.sort(a, axis=0)
    sb = np.sort(b, axis=0)
    la, lb = len(sa), len(sb)
    if max(la, lb) == 0:
        return 0.0
    common = min(la, lb)
    if a.ndim == 1:
        mismatch = int(np.sum(sa[:common] != sb[:common]))
    else:
        mismatch = int(np.sum(np.any(sa[:common] != sb[:common], axis=1)))
    return (mismatch + (max(la, lb) - common)) / max(la, lb)


def compare_sets(a, b, spec: ComparisonSpec) -> float:
    """Symmetric dissimilarity between two indicator-value multisets.

    Inputs are 1-D arrays of scalars, or 2-D arrays whose rows are vector
    values. Identical nonempty inputs yield 0; NaNs are rejected.
    """
    spec.validate()
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if np.isnan(a).any() or np.isnan(b).any():
        raise ValueError("NaN in comparison inputs")
    if spec.value_shift != 0.0:
        a = a + spec.value_shift
        b = b + spec.value_shift
    ea, eb = a.size == 0, b.size == 0
    if ea and eb:
        return 0.0

    if spec.mode == "sorted_dtw":
        if ea or eb:
            return spec.empty_value
        return dtw_distance(np.sort(a), np.sort(b), spec.elementwise)

    if spec.mode == "aggregate_scalar":
        if a.ndim != 1 or b.ndim != 1:
            raise ValueError("aggregate_scalar expects scalar value multisets")
        if ea or eb:
            if spec.combiner == "difference":
                return abs(spec.combined_aggregate(b if ea else a))  # empty side counts as 0
            return spec.empty_value
        va = spec.combined_aggregate(a)
        vb = spec.combined_aggregate(b)
        if spec.combiner == "difference":
            return abs(va - vb)
        return ratio_distance(va, vb)

    if spec.mode == "aggregate_vector":
        if spec.vector_metric == "jaccard":
            return _jaccard_dissim(a, b)
        if spec.vector_metric == "hamming":
            return _hamming_dissim(a, b)
        if a.ndim == 1:
            a = a[:, None]
        if b.ndim == 1:
            b = b[:, None]
        ra = _aggregate_rows(a, spec) if not ea else np.zeros(b.shape[1])
        rb = _aggregate_rows(b, spec) if not eb else np.zeros(a.shape[1])
        return _vector_metric(ra, rb, spec.vector_metric)

    raise ValueError("pairwise_node_score comparisons are provided by the "
                     "shortest-path summand, not compare_sets")


def _aggregate_rows(rows: np.ndarray, spec: ComparisonSpec) -> np.ndarray:
    out = np.zeros(rows.shape[1])
    for name, w in spec.aggregators:
        if name == "mean":
            out += w * rows.mean(axis=0)
        elif name == "median":
            out += w * np.median(rows, axis=0)
        elif name == "sum":
            out += w * rows.sum(axis=0)
        elif name == "min":
            out += w * rows.min(axis=0)
        elif name == "max":
            out += w * rows.max(axis=0)
        elif name == "variance":
            out += w * rows.var(axis=0)
        elif name == "std":
            out += w * rows.std(axis=0)
        elif name == "iqr":
            out += w * (np.percentile(rows, 75, axis=0) - np.percentile(rows, 25, axis=0))
    return out


@dataclass
class CommunityConfig:
    """Community-assignment summand: per-node community ids plus per-hop weights."""

    assignment: np.ndarray
    weights: np.ndarray
    variant: str = "histogram_euclidean"  # | "distinct_count_diff"


@dataclass
class ShortestPathConfig:
    """Shortest-path summand: hop-0 compares the nodes' own distance, deeper
    hops aggregate all cross-pair distances between the two layers."""

    weights: np.ndarray
    aggregator: str = "mean"
    unreachable_default: float = 0.0


@dataclass
class WeightConfig:
    """Weights over (indicator, hop) cells, in full-matrix or factored form.

    `full` has shape (n_indicators, max_hop+1); the factored form stores one
    weight per hop and one per indicator, the cell weight being their
    product. All weights must be >= 0 and at least one strictly positive
    (negative weights would break the edge-weight transforms downstream).
    """

    max_hop: int
    indicator_names: tuple[str, ...]
    full: np.ndarray | None = None
    hop: np.ndarray | None = None
    ind: np.ndarray | None = None
    community: CommunityConfig | None = None
    shortest_path: ShortestPathConfig | None = None

    def __post_init__(self):
        if self.full is not None:
            self.full = np.asarray(self.full, dtype=np.float64)
        if self.hop is not None:
            self.hop = np.asarray(self.hop, dtype=np.float64)
        if self.ind is not None:
            self.ind = np.asarray(self.ind, dtype=np.float64)
        self.validate()

    @property
    def factored(self) -> bool:
        return self.full is None

    def validate(self) -> None:
        l, h = len(self.indicator_names), self.max_hop + 1
        if self.full is not None:
            if self.hop is not None or self.ind is not None:
                raise ValueError("full and factored weight forms are mutually exclusive")
            if self.full.shape != (l, h):
                raise ValueError(f"full weights must have shape ({l}, {h})")
            mats = [self.full]
            positive = bool(np.any(self.full > 0))
        else:
            if self.hop is None or self.ind is None:
                raise ValueError("factored form needs both hop and indicator weights")
            if self.hop.shape != (h,) or self.ind.shape != (l,):
                raise ValueError("factored weight shapes do not match max_hop/indicators")
            mats = [self.hop, self.ind]
            positive = bool(np.any(self.hop > 0) and np.any(self.ind > 0))
        for m in mats:
            if np.any(m < 0) or not np.all(np.isfinite(m)):
                raise ValueError("weights must be finite and >= 0")
        if not positive:
            raise ValueError("at least one weight must be positive")

    def cell(self, i: int, k: int) -> float:
        if self.full is not None:
            return float(self.full[i, k])
        return float(self.hop[k] * self.ind[i])

    @staticmethod
    def uniform(indicator_names, max_hop: int) -> "WeightConfig":
        names = tuple(indicator_names)
        return WeightConfig(max_hop, names,
                            full=np.ones((len(names), max_hop + 1)))


def community_summand(x: int, y: int, k: int, khop: KHopIndex,
                      assignment: np.ndarray,
                      variant: str = "histogram_euclidean") -> float:
    """Dissimilarity of the community composition of N_k(x) vs N_k(y)."""
    if np.any(assignment < 0):
        raise ValueError("every node needs a community assignment")
    la, lb = khop.layer(x, k), khop.layer(y, k)
    n_comm = int(assignment.max()) + 1 if len(assignment) else 0
    if variant == "histogram_euclidean":
        ha = np.bincount(assignment[la], minlength=n_comm)
        hb = np.bincount(assignment[lb], minlength=n_comm)
        return float(np.linalg.norm((ha - hb).astype(np.float64)))
    if variant == "distinct_count_diff":
        return float(abs(len(np.unique(assignment[la])) - len(np.unique(assignment[lb]))))
    raise ValueError(f"unknown community variant {variant!r}")


def shortest_path_summand(x: int, y: int, k: int, g: Graph, khop: KHopIndex,
                          aggregator: str = "mean",
                          unreachable_default: float = 0.0,
                          dist_matrix: np.ndarray | None = None) -> float:
    """Hop-0: BFS distance between x and y (default when disconnected).
    Hop k>=1: aggregate of all pairwise distances between the two layers."""
    if unreachable_default < 0:
        raise ValueError("unreachable_default must be >= 0")
    if dist_matrix is None:
        dist_matrix = all_pairs_shortest_paths(g)
    if k == 0:
        d = dist_matrix[x, y]
        return float(d) if d != UNREACHABLE else unreachable_default
    la, lb = khop.layer(x, k), khop.layer(y, k)
    if len(la) == 0 and len(lb) == 0:
        return 0.0
    if len(la) == 0 or len(lb) == 0:
        return unreachable_default
    block = dist_matrix[np.ix_(la, lb)].astype(np.float64)
    block[block == UNREACHABLE] = unreachable_default
    return _aggregate(block.ravel(), aggregator)


class NeighborhoodProfile:
    """Materialized indicator values over every node's hop layers.

    Precomputes, per indicator, whatever its comparison mode needs: combined
    scalar aggregates per (node, hop) for the aggregate fast path (empty
    layers substitute 0 and are tracked in `empty`), sorted value arrays for
    DTW, and aggregated representative vectors for vector metrics. Also
    carries the sort keys used by the pruned similarity-graph construction.
    """

    def __init__(self, g: Graph, khop: KHopIndex, indicators: list[IndicatorTable],
                 specs: list[ComparisonSpec],
                 community: CommunityConfig | None = None,
                 shortest_path: ShortestPathConfig | None = None):
        if len(indicators) != len(specs):
            raise ValueError("one ComparisonSpec per indicator required")
        for spec in specs:
            spec.validate()
        for t in indicators:
            if not np.all(np.isfinite(t.values)):
                raise ValueError(f"indicator {t.name!r} contains non-finite values")
        self.graph = g
        self.khop = khop
        self.indicators = indicators
        self.specs = specs
        self.names = tuple(t.name for t in indicators)
        self.max_hop = khop.max_hop
        n = g.node_count
        hops = self.max_hop + 1

        self.layer_sizes = np.zeros((n, hops), dtype=np.int64)
        for v in range(n):
            for k in range(hops):
                self.layer_sizes[v, k] = len(khop.layer(v, k))
        self.empty = self.layer_sizes == 0

        # per indicator: fast-path scalar aggregates, DTW slices, vector reps
        self.agg_scalar: list[np.ndarray | None] = []
        self.sorted_values: list[list[list[np.ndarray]] | None] = []
        self.agg_vector: list[np.ndarray | None] = []
        for t, spec in zip(indicators, specs):
            shifted = t.values + spec.value_shift
            if t.kind == SCALAR and spec.mode in ("aggregate_scalar", "sorted_dtw"):
                agg = np.zeros((n, hops))
                for v in range(n):
                    for k in range(hops):
                        layer = khop.layer(v, k)
                        if len(layer):
                            agg[v, k] = spec.combined_aggregate(shifted[layer])
                self.agg_scalar.append(agg)
            else:
                self.agg_scalar.append(None)
            if spec.mode == "sorted_dtw":
                self.sorted_values.append(
                    [[np.sort(shifted[khop.layer(v, k)]) for k in range(hops)]
                     for v in range(n)])
            else:
                self.sorted_values.append(None)
            if t.kind == VECTOR and spec.mode == "aggregate_vector" \
                    and spec.vector_metric not in ("jaccard", "hamming"):
                rep = np.zeros((n, hops, t.width))
                for v in range(n):
                    for k in range(hops):
                        layer = khop.layer(v, k)
                        if len(layer):
                            rep[v, k] = _aggregate_rows(shifted[layer], spec)
                self.agg_vector.append(rep)
            else:
                self.agg_vector.append(None)

        self.community = community
        self.shortest_path = shortest_path
        self._dist_matrix: np.ndarray | None = None
        self._comm_hist: list[np.ndarray] | None = None
        self._comm_distinct: np.ndarray | None = None
        if community is not None:
            n_comm = int(community.assignment.max()) + 1
            self._comm_hist = []
            self._comm_distinct = np.zeros((n, hops))
            for k in range(hops):
                hist = np.zeros((n, n_comm))
                for v in range(n):
                    layer = khop.layer(v, k)
                    hist[v] = np.bincount(community.assignment[layer], minlength=n_comm)
                    self._comm_distinct[v, k] = len(np.unique(community.assignment[layer])) \
                        if len(layer) else 0
                self._comm_hist.append(hist)
        if shortest_path is not None:
            self._dist_matrix = all_pairs_shortest_paths(g)

    def raw_values(self, i: int, v: int, k: int) -> np.ndarray:
        t, spec = self.indicators[i], self.specs[i]
        return t.values[self.khop.layer(v, k)] + spec.value_shift

    def indicator_term(self, i: int, x: int, y: int, k: int) -> float:
        """f_i applied to the (already shifted) hop-k value multisets of x and y."""
        spec = self.specs[i]
        ex, ey = self.empty[x, k], self.empty[y, k]
        if ex and ey:
            return 0.0
        if spec.mode == "aggregate_scalar":
            agg = self.agg_scalar[i]
            if spec.combiner == "difference":
                return abs(agg[x, k] - agg[y, k])
            if ex or ey:
                return spec.empty_value
            return ratio_distance(agg[x, k], agg[y, k])
        if spec.mode == "sorted_dtw":
            if ex or ey:
                return spec.empty_value
            sv = self.sorted_values[i]
            return dtw_distance(sv[x][k], sv[y][k], spec.elementwise)
        if spec.mode == "aggregate_vector":
            if spec.vector_metric in ("jaccard", "hamming"):
                a = self.indicators[i].values[self.khop.layer(x, k)]
                b = self.indicators[i].values[self.khop.layer(y, k)]
                return (_jaccard_dissim(a, b) if spec.vector_metric == "jaccard"
                        else _hamming_dissim(a, b))
            rep = self.agg_vector[i]
            if rep is not None:
                return _vector_metric(rep[x, k], rep[y, k], spec.vector_metric)
            a = self.raw_values(i, x, k)
            b = self.raw_values(i, y, k)
            return compare_sets(a, b, spec)
        raise ValueError(f"mode {spec.mode!r} is not an indicator comparison")

    def proximity_term(self, x: int, y: int, k: int, which: str) -> float:
        if which == "community":
            cfg = self.community
            if cfg.variant == "histogram_euclidean":
                return float(np.linalg.norm(self._comm_hist[k][x] - self._comm_hist[k][y]))
            return float(abs(self._comm_distinct[x, k] - self._comm_distinct[y, k]))
        cfg = self.shortest_path
        return shortest_path_summand(x, y, k, self.graph, self.khop,
                                     cfg.aggregator, cfg.unreachable_default,
                                     self._dist_matrix)

    def sort_key(self, i: int, k: int) -> np.ndarray:
        """Scalar ordering key per node for the pruned candidate lists."""
        t, spec = self.indicators[i], self.specs[i]
        if self.agg_scalar[i] is not None:
            return self.agg_scalar[i][:, k].copy()
        if self.agg_vector[i] is not None:
            return np.abs(self.agg_vector[i][:, k, :]).sum(axis=1)
        n = self.graph.node_count
        key = np.zeros(n)
        shifted = t.values + spec.value_shift
        for v in range(n):
            layer = self.khop.layer(v, k)
            if len(layer):
                vals = shifted[layer]
                key[v] = float(np.mean(vals)) if t.kind == SCALAR \
                    else float(np.abs(vals.mean(axis=0)).sum())
        return key


def _check_weights(profile: NeighborhoodProfile, weights: WeightConfig) -> None:
    if weights.indicator_names != profile.names:
        raise KeyError(f"weight config covers {weights.indicator_names}, "
                       f"profile holds {profile.names}")
    if weights.max_hop > profile.max_hop:
        raise ValueError("weights reference hops beyond the profile depth")


def hop_distance(x: int, y: int, k: int, profile: NeighborhoodProfile,
                 weights: WeightConfig) -> float:
    """Weighted indicator dissimilarity of the hop-k layers of x and y."""
    _check_weights(profile, weights)
    if k > weights.max_hop:
        raise ValueError(f"k={k} exceeds max_hop={weights.max_hop}")
    acc = 0.0
    for i in range(len(profile.indicators)):
        w = weights.cell(i, k)
        if w != 0.0:
            acc += w * profile.indicator_term(i, x, y, k)
    return acc


def structural_distance(x: int, y: int, profile: NeighborhoodProfile,
                        weights: WeightConfig) -> float:
    """Total structural dissimilarity: hop terms summed over k = 0..max_hop,
    plus any configured proximity summands. 0 means indistinguishable."""
    _check_weights(profile, weights)
    acc = 0.0
    for k in range(weights.max_hop + 1):
        acc += hop_distance(x, y, k, profile, weights)
    for which, cfg in (("community", weights.community),
                       ("shortest_path", weights.shortest_path)):
        if cfg is not None:
            for k in range(weights.max_hop + 1):
                w = float(cfg.weights[k])
                if w != 0.0:
                    acc += w * profile.proximity_term(x, y, k, which)
    return acc


def structural_distance_factored(x: int, y: int, profile: NeighborhoodProfile,
                                 weights: WeightConfig) -> float:
    """Factored-weight variant: sum_k hop_w[k] * sum_i ind_w[i] * f_i(...)."""
    if not weights.factored:
        raise ValueError("factored distance requires factored weights")
    _check_weights(profile, weights)
    acc = 0.0
    for k in range(weights.max_hop + 1):
        inner = 0.0
        for i in range(len(profile.indicators)):
            wi = float(weights.ind[i])
            if wi != 0.0:
                inner += wi * profile.indicator_term(i, x, y, k)
        acc += float(weights.hop[k]) * inner
    return acc


def pair_distances(profile: NeighborhoodProfile, weights: WeightConfig,
                   xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized structural distance for an array of node pairs.

    Dense and pruned similarity-graph builders both evaluate pairs through
    this one routine, so an edge retained by both carries bit-identical
    weight. The aggregate-difference path runs as array arithmetic; other
    modes fall back to the per-pair terms.
    """
    _check_weights(profile, weights)
    out = np.zeros(len(xs), dtype=np.float64)
    for k in range(weights.max_hop + 1):
        for i, spec in enumerate(profile.specs):
            w = weights.cell(i, k)
            if w == 0.0:
                continue
            agg = profile.agg_scalar[i]
            if spec.mode == "aggregate_scalar" and spec.combiner == "difference" \
                    and agg is not None:
                out += w * np.abs(agg[xs, k] - agg[ys, k])
            elif spec.mode == "aggregate_scalar" and agg is not None:
                ex = profile.empty[xs, k]
                ey = profile.empty[ys, k]
                va, vb = agg[xs, k], agg[ys, k]
                hi = np.maximum(va, vb)
                lo = np.minimum(va, vb)
                term = np.full(len(xs), spec.empty_value)
                ok = ~(ex | ey)
                if np.any(ok & (lo <= 0)):
                    raise ValueError("ratio/quotient comparison needs positive "
                                     "aggregates; set value_shift")
                term[ok] = hi[ok] / lo[ok] - 1.0
                term[ex & ey] = 0.0
                out += w * term
            else:
                term = np.array([profile.indicator_term(i, int(a), int(b), k)
                                 for a, b in zip(xs, ys)])
                out += w * term
    for which, cfg in (("community", weights.community),
                       ("shortest_path", weights.shortest_path)):
        if cfg is not None:
            for k in range(weights.max_hop + 1):
                w = float(cfg.weights[k])
                if w == 0.0:
                    continue
                if which == "community" and cfg.variant == "histogram_euclidean":
                    hist = profile._comm_hist[k]
                    diff = hist[xs] - hist[ys]
                    out += w * np.sqrt((diff * diff).sum(axis=1))
                elif which == "community":
                    dc = profile._comm_distinct[:, k]
                    out += w * np.abs(dc[xs] - dc[ys])
                else:
                    term = np.array([profile.proximity_term(int(a), int(b), k, which)
                                     for a, b in zip(xs, ys)])
                    out += w * term
    return out
