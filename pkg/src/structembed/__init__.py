"""Structural node embeddings from weighted indicator similarities.

The pipeline: per-node graph indicators are compared across k-hop
neighborhood layers to give a structural distance between node pairs, the
distances become edge weights of an auxiliary similarity graph (dense or
pruned), biased walks on that graph feed a Skip-gram model, and the trained
vectors support classification, clustering, anomaly ranking, and
nearest-neighbor queries. Weights over (indicator, hop) cells can be tuned
against a labeled task with the bundled sequential optimizer.
"""

from .config import ConfigError, IndicatorConfig, PipelineConfig, load_config, save_config
from .graph import (Graph, KHopIndex, UNREACHABLE, generate_barbell,
                    generate_mirrored_karate, karate_club, khop_neighborhoods,
                    load_edge_list, shortest_path_lengths)
from .indicators import (IndicatorTable, anonymous_walk_stats, anonymize_walk,
                         betweenness_centrality, closeness_centrality,
                         clustering_coefficient, core_number, degree,
                         eigenvector_centrality, gdv, random_walk_occurrences)
from .optimize import (ParamSpec, SearchSpace, TrialRecord, random_search,
                       tpe_optimize, weight_report)
from .pipeline import EmbedResult, compute_indicators, embed_graph
from .similarity import (ComparisonSpec, NeighborhoodProfile, WeightConfig,
                         community_summand, compare_sets, dtw_distance,
                         hop_distance, ratio_distance, shortest_path_summand,
                         structural_distance, structural_distance_factored)
from .simgraph import (SimilarityGraph, TransformSpec, build_dense, build_pruned,
                       transition_row, weight_transform_exponential,
                       weight_transform_linear)
from .skipgram import (EmbeddingMatrix, load_embeddings, save_embeddings,
                       skipgram_train)
from .tasks import (LabeledDataset, anomaly_scores, classify_eval, kmeans,
                    load_label_file, make_dataset, nearest_neighbors)
from .walks import WalkCorpus, biased_walks, uniform_walks

__version__ = "0.1.0"

__all__ = [
    "ComparisonSpec", "ConfigError", "EmbedResult", "EmbeddingMatrix", "Graph",
    "IndicatorConfig", "IndicatorTable", "KHopIndex", "LabeledDataset",
    "NeighborhoodProfile", "ParamSpec", "PipelineConfig", "SearchSpace",
    "SimilarityGraph", "TransformSpec", "TrialRecord", "UNREACHABLE",
    "WalkCorpus", "WeightConfig", "anomaly_scores", "anonymize_walk",
    "anonymous_walk_stats", "betweenness_centrality", "biased_walks",
    "build_dense", "build_pruned", "classify_eval", "closeness_centrality",
    "clustering_coefficient", "community_summand", "compare_sets",
    "compute_indicators", "core_number", "degree", "dtw_distance",
    "eigenvector_centrality", "embed_graph", "gdv", "generate_barbell",
    "generate_mirrored_karate", "hop_distance", "karate_club", "kmeans",
    "khop_neighborhoods", "load_config", "load_edge_list", "load_embeddings",
    "load_label_file", "make_dataset", "nearest_neighbors", "random_search",
    "random_walk_occurrences", "ratio_distance", "save_config",
    "save_embeddings", "shortest_path_lengths", "shortest_path_summand",
    "skipgram_train", "structural_distance", "structural_distance_factored",
    "tpe_optimize", "transition_row", "uniform_walks", "weight_report",
    "weight_transform_exponential", "weight_transform_linear",
]
