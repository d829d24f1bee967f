"""Command-line surface: generate benchmark graphs, embed, optimize weights,
evaluate embeddings.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
Output files depend only on inputs and --seed; timing chatter goes to
stderr so repeated runs stay byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, PipelineConfig, load_config, save_config
from .graph import (EdgeListFormatError, Graph, generate_barbell,
                    generate_mirrored_karate, load_edge_list)
from .indicators import dump_indicator_tables
from .optimize import (CONTINUOUS, ParamSpec, SearchSpace, append_trial_log,
                       read_trial_log, tpe_optimize, weight_report)
from .pipeline import embed_graph
from .simgraph import dump_similarity_graph
from .skipgram import load_embeddings, save_embeddings
from .tasks import (LabelFileError, anomaly_scores, classify_eval,
                    cross_val_accuracy, kmeans, load_label_file, make_dataset,
                    stratified_split)
from .walks import dump_corpus


def save_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            fh.write(f"{g.names[u]} {g.names[v]}\n")


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_generate(args) -> int:
    if args.kind == "karate-mirrored":
        g = generate_mirrored_karate()
    else:
        g = generate_barbell(args.clique, args.path)
    save_edge_list(g, args.out)
    _info(f"wrote {g.node_count} nodes / {g.edge_count} edges to {args.out}")
    return 0


def _load_pipeline_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig().normalized()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "simgraph", None):
        overrides["simgraph_mode"] = args.simgraph
    if getattr(args, "c", None) is not None:
        overrides["prune_c"] = args.c
    if getattr(args, "allow_large", False):
        overrides["allow_large"] = True
    if overrides:
        cfg = replace(cfg, **overrides).normalized()
    cfg.validate()
    return cfg


def cmd_embed(args) -> int:
    cfg = _load_pipeline_config(args)
    g = load_edge_list(args.edges)
    if g.dropped_edges:
        _info(f"dropped {g.dropped_edges} duplicate/self-loop input edges")
    result = embed_graph(g, cfg, walk_source=args.walks)
    save_embeddings(result.embedding, args.out)
    _info("stage timings:")
    for name, secs in result.timings:
        _info(f"  {name:<12s} {secs:8.3f} s")
    dense_pairs = g.node_count * (g.node_count - 1) // 2
    if result.simgraph is not None:
        _info(f"similarity evaluations: {result.sim_evaluations} "
              f"(dense pair count {dense_pairs})")
    _info(f"wrote {result.embedding.node_count} x {result.embedding.dimension} "
          f"embeddings to {args.out}")
    if args.dump_indicators:
        dump_indicator_tables(result.tables, g, args.dump_indicators)
    if args.dump_simgraph:
        if result.simgraph is None:
            raise ValueError("no similarity graph to dump for uniform walks")
        dump_similarity_graph(result.simgraph, g, args.dump_simgraph)
    if args.dump_corpus:
        dump_corpus(result.corpus, g.names, args.dump_corpus)
    return 0


def weight_search_space(cfg: PipelineConfig) -> SearchSpace:
    """One [0,1] weight per (indicator, hop) cell."""
    return SearchSpace([ParamSpec(f"w.{name}.{k}", CONTINUOUS, 0.0, 1.0)
                        for name in cfg.indicators
                        for k in range(cfg.max_hop + 1)])


def config_with_weights(cfg: PipelineConfig, params: dict) -> PipelineConfig:
    full = {name: tuple(float(params[f"w.{name}.{k}"])
                        for k in range(cfg.max_hop + 1))
            for name in cfg.indicators}
    return replace(cfg, weights_mode="full", full_weights=full,
                   hop_weights=(), ind_weights={}).normalized()


def cmd_optimize(args) -> int:
    cfg = _load_pipeline_config(args)
    g = load_edge_list(args.edges)
    raw_labels = load_label_file(args.labels)
    for name in g.names:
        if name not in raw_labels:
            raise LabelFileError(f"node {name!r} has no label")

    if args.subgraph:
        rng = np.random.default_rng([cfg.seed, 0x5AB])
        picked = np.sort(rng.choice(g.node_count, size=min(args.subgraph, g.node_count),
                                    replace=False))
        opt_graph = g.induced_subgraph([int(v) for v in picked])
    else:
        opt_graph = g
    classes = sorted(set(raw_labels.values()), key=lambda c: (len(c), c))
    class_id = {c: i + 1 for i, c in enumerate(classes)}
    labels = np.array([class_id[raw_labels[name]] for name in opt_graph.names])
    split_rng = np.random.default_rng([cfg.seed, 0x0E7])
    train_idx, _ = stratified_split(labels, args.train_frac, split_rng)

    def objective(params: dict) -> float:
        trial_cfg = config_with_weights(cfg, params)
        emb = embed_graph(opt_graph, trial_cfg).embedding
        return cross_val_accuracy(emb.vectors[train_idx], labels[train_idx],
                                  len(classes), folds=args.folds, seed=cfg.seed)

    prior = None
    if args.log:
        space = weight_search_space(cfg)
        try:
            prior = read_trial_log(args.log, space)
        except FileNotFoundError:
            prior = None
    space = weight_search_space(cfg)
    on_trial = (lambda rec: append_trial_log(args.log, rec)) if args.log else None
    best, history = tpe_optimize(space, objective, trials=args.trials,
                                 gamma=args.gamma, startup_trials=args.startup,
                                 seed=cfg.seed, prior=prior, on_trial=on_trial)
    best_cfg = config_with_weights(cfg, best.params)
    save_config(best_cfg, args.out_config)
    report = weight_report(history, best)
    print(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report + "\n")
    _info(f"best objective {best.objective:.6f} at trial {best.index}; "
          f"config written to {args.out_config}")
    return 0


def cmd_eval(args) -> int:
    emb = load_embeddings(args.embeddings)
    raw_labels = load_label_file(args.labels)
    ds = make_dataset(emb, raw_labels)
    mean_acc, runs = classify_eval(ds, args.train_frac, args.repeats, args.seed)
    print(f"classification over {args.repeats} stratified splits "
          f"(train fraction {args.train_frac:g})")
    print("  run   accuracy")
    for i, acc in enumerate(runs, start=1):
        print(f"  {i:>3d}   {acc:.6f}")
    print(f"  mean  {mean_acc:.6f}")
    print(f"acc_mean={mean_acc:.6f}")
    print("acc_runs=" + ",".join(f"{a:.6f}" for a in runs))
    if args.kmeans:
        labels = kmeans(emb, args.kmeans, seed=args.seed)
        print(f"kmeans clusters (k={args.kmeans})")
        print("  node  cluster")
        for name, c in zip(emb.names, labels):
            print(f"  {name:>6s}  {int(c)}")
        print("clusters=" + ",".join(f"{n}:{int(c)}" for n, c in zip(emb.names, labels)))
    if args.anomaly_top:
        from .tasks import default_anomaly_k
        k = args.anomaly_k if args.anomaly_k is not None \
            else min(default_anomaly_k(emb.node_count), emb.node_count - 1)
        scores, ranking = anomaly_scores(emb, k_neighbors=k)
        top = ranking[:args.anomaly_top]
        print(f"anomaly ranking (top {args.anomaly_top}, k={k})")
        print("  rank    node   score")
        for r, v in enumerate(top, start=1):
            print(f"  {r:>4d}  {emb.names[int(v)]:>6s}   {scores[int(v)]:.6f}")
        print("anomaly_top=" + ",".join(emb.names[int(v)] for v in top))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="structembed",
        description="Structural node embeddings via indicator-similarity walks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a benchmark edge-list file")
    p_gen.add_argument("kind", choices=["karate-mirrored", "barbell"])
    p_gen.add_argument("--clique", type=int, default=10)
    p_gen.add_argument("--path", type=int, default=10)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_embed = sub.add_parser("embed", help="run the embedding pipeline")
    p_embed.add_argument("edges")
    p_embed.add_argument("--config")
    p_embed.add_argument("--out", required=True)
    p_embed.add_argument("--seed", type=int)
    p_embed.add_argument("--threads", type=int, default=1,
                         help="cap on internal parallelism (execution is "
                              "currently single-threaded regardless)")
    p_embed.add_argument("--simgraph", choices=["dense", "pruned"])
    p_embed.add_argument("--c", type=float, help="pruned-mode candidate budget")
    p_embed.add_argument("--allow-large", action="store_true")
    p_embed.add_argument("--walks", choices=["biased", "uniform"], default="biased",
                         help="uniform = proximity baseline on the input graph")
    p_embed.add_argument("--dump-indicators")
    p_embed.add_argument("--dump-simgraph")
    p_embed.add_argument("--dump-corpus")
    p_embed.set_defaults(func=cmd_embed)

    p_opt = sub.add_parser("optimize", help="tune indicator/hop weights against labels")
    p_opt.add_argument("edges")
    p_opt.add_argument("labels")
    p_opt.add_argument("--config")
    p_opt.add_argument("--trials", type=int, default=200)
    p_opt.add_argument("--gamma", type=float, default=0.25)
    p_opt.add_argument("--startup", type=int, default=10)
    p_opt.add_argument("--folds", type=int, default=5)
    p_opt.add_argument("--train-frac", type=float, default=0.8)
    p_opt.add_argument("--seed", type=int)
    p_opt.add_argument("--subgraph", type=int,
                       help="optimize on a uniform node-induced subgraph of this size")
    p_opt.add_argument("--out-config", required=True)
    p_opt.add_argument("--log", help="append-only trial log; resumes if present")
    p_opt.add_argument("--report", help="also write the weight report here")
    p_opt.set_defaults(func=cmd_optimize)

    p_eval = sub.add_parser("eval", help="score an embedding against labels")
    p_eval.add_argument("embeddings")
    p_eval.add_argument("labels")
    p_eval.add_argument("--repeats", type=int, default=10)
    p_eval.add_argument("--train-frac", type=float, default=0.8)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--kmeans", type=int)
    p_eval.add_argument("--anomaly-top", type=int)
    p_eval.add_argument("--anomaly-k", type=int, default=None,
                        help="kNN size for anomaly scores (default ceil(log2 n))")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (EdgeListFormatError, LabelFileError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
