"""End-to-end embedding runs: indicators -> profiles -> similarity graph ->
walks -> skip-gram, with per-stage wall times and pair-evaluation counts."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import indicators as ind
from .config import PipelineConfig
from .graph import Graph, khop_neighborhoods
from .similarity import (CommunityConfig, NeighborhoodProfile, ShortestPathConfig,
                         WeightConfig)
from .simgraph import SimilarityGraph, TransformSpec, build_dense, build_pruned
from .skipgram import EmbeddingMatrix, skipgram_train
from .tasks import LabelFileError, load_label_file
from .walks import WalkCorpus, biased_walks, uniform_walks


@dataclass
class EmbedResult:
    embedding: EmbeddingMatrix
    simgraph: SimilarityGraph | None
    corpus: WalkCorpus
    profile: NeighborhoodProfile | None
    tables: list
    timings: list[tuple[str, float]] = field(default_factory=list)

    @property
    def sim_evaluations(self) -> int:
        return self.simgraph.eval_count if self.simgraph is not None else 0


def compute_indicators(g: Graph, cfg: PipelineConfig) -> list[ind.IndicatorTable]:
    """Compute the configured indicator tables, standardized where requested."""
    cfg = cfg.normalized()
    tables: list[ind.IndicatorTable] = []
    anon_cache: dict[str, ind.IndicatorTable] = {}
    for name in cfg.indicators:
        if name == "degree":
            t = ind.degree(g)
        elif name == "clustering":
            t = ind.clustering_coefficient(g)
        elif name == "closeness":
            t = ind.closeness_centrality(g)
        elif name == "betweenness":
            t = ind.betweenness_centrality(g)
        elif name == "eigenvector":
            t = ind.eigenvector_centrality(g)
        elif name == "core":
            t = ind.core_number(g)
        elif name == "gdv":
            t = ind.gdv(g)
        elif name in ("anon_distinct", "anon_start_count"):
            if not anon_cache:
                distinct, start = ind.anonymous_walk_stats(
                    g, cfg.ind_walk_len, cfg.ind_walks_per_node, cfg.seed,
                    cfg.anon_convention)
                anon_cache["anon_distinct"] = distinct
                anon_cache["anon_start_count"] = start
            t = anon_cache[name]
        elif name == "rw_occurrence":
            t = ind.random_walk_occurrences(g, cfg.ind_walk_len,
                                            cfg.ind_walks_per_node, cfg.seed)
        else:
            raise ValueError(f"unknown indicator {name!r}")
        if cfg.indicator_cfg[name].standardize:
            t = t.standardized()
        tables.append(t)
    return tables


def load_community_assignment(path, g: Graph) -> np.ndarray:
    raw = load_label_file(path)
    comm_names = sorted(set(raw.values()), key=lambda c: (len(c), c))
    comm_id = {c: i for i, c in enumerate(comm_names)}
    out = np.zeros(g.node_count, dtype=np.int64)
    for i, name in enumerate(g.names):
        if name not in raw:
            raise LabelFileError(f"node {name!r} has no community assignment")
        out[i] = comm_id[raw[name]]
    return out


def build_weights(g: Graph, cfg: PipelineConfig) -> WeightConfig:
    cfg = cfg.normalized()
    community = None
    if cfg.community_weights:
        assignment = load_community_assignment(cfg.community_file, g)
        community = CommunityConfig(assignment,
                                    np.asarray(cfg.community_weights, dtype=np.float64),
                                    cfg.community_variant)
    shortest_path = None
    if cfg.sp_weights:
        shortest_path = ShortestPathConfig(np.asarray(cfg.sp_weights, dtype=np.float64),
                                           cfg.sp_aggregator, cfg.sp_unreachable)
    names = tuple(cfg.indicators)
    if cfg.weights_mode == "full":
        full = np.array([cfg.full_weights[n] for n in names], dtype=np.float64)
        return WeightConfig(cfg.max_hop, names, full=full,
                            community=community, shortest_path=shortest_path)
    return WeightConfig(cfg.max_hop, names,
                        hop=np.asarray(cfg.hop_weights, dtype=np.float64),
                        ind=np.array([cfg.ind_weights[n] for n in names]),
                        community=community, shortest_path=shortest_path)


def build_profile(g: Graph, cfg: PipelineConfig,
                  tables: list[ind.IndicatorTable],
                  weights: WeightConfig) -> NeighborhoodProfile:
    cfg = cfg.normalized()
    khop = khop_neighborhoods(g, cfg.max_hop)
    specs = [cfg.indicator_cfg[name].to_spec() for name in cfg.indicators]
    return NeighborhoodProfile(g, khop, tables, specs,
                               community=weights.community,
                               shortest_path=weights.shortest_path)


def embed_graph(g: Graph, cfg: PipelineConfig, walk_source: str = "biased") -> EmbedResult:
    """Run the full pipeline on `g`. walk_source "uniform" swaps the biased
    walks on the similarity graph for uniform walks on the input graph (the
    proximity baseline); the similarity stages are skipped in that case."""
    cfg = cfg.normalized()
    cfg.validate()
    timings: list[tuple[str, float]] = []

    def timed(name: str, fn):
        t0 = time.perf_counter()
        out = fn()
        timings.append((name, time.perf_counter() - t0))
        return out

    if walk_source == "uniform":
        corpus = timed("walks", lambda: uniform_walks(
            g, cfg.walks_per_node, cfg.walk_len, cfg.seed))
        emb = timed("skipgram", lambda: skipgram_train(
            corpus, cfg.dim, cfg.window, cfg.epochs, cfg.objective,
            cfg.negatives, cfg.lr, cfg.seed, g.names))
        return EmbedResult(emb, None, corpus, None, [], timings)

    tables = timed("indicators", lambda: compute_indicators(g, cfg))
    weights = build_weights(g, cfg)
    profile = timed("profile", lambda: build_profile(g, cfg, tables, weights))
    transform = TransformSpec(cfg.transform_kind, cfg.transform_wt)
    if cfg.simgraph_mode == "dense":
        sg = timed("simgraph", lambda: build_dense(
            g, profile, weights, transform, cfg.dense_cap, cfg.allow_large))
    else:
        sg = timed("simgraph", lambda: build_pruned(
            g, profile, weights, transform, cfg.prune_c))
    corpus = timed("walks", lambda: biased_walks(
        sg, cfg.walks_per_node, cfg.walk_len, cfg.seed))
    emb = timed("skipgram", lambda: skipgram_train(
        corpus, cfg.dim, cfg.window, cfg.epochs, cfg.objective,
        cfg.negatives, cfg.lr, cfg.seed, g.names))
    return EmbedResult(emb, sg, corpus, profile, tables, timings)
