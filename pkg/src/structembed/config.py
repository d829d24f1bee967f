"""Pipeline configuration: a flat, diff-friendly "key = value" text format.

Dotted keys group options (indicator.degree.standardize = true). Parsing
fills defaults, serialization emits every key in a canonical order, and
parse -> serialize -> parse is the identity. Validation collects every
violated key instead of stopping at the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .similarity import (AGGREGATOR_NAMES, COMBINERS, ELEMENTWISE, MODES,
                         VECTOR_METRICS, ComparisonSpec)

KNOWN_INDICATORS = ("degree", "clustering", "closeness", "betweenness",
                    "eigenvector", "core", "gdv", "anon_distinct",
                    "anon_start_count", "rw_occurrence")
VECTOR_INDICATORS = ("gdv",)
OBJECTIVES = ("hierarchical_softmax", "negative_sampling")


class ConfigError(ValueError):
    """Carries one message per violated key."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in problems))


@dataclass
class IndicatorConfig:
    standardize: bool = False
    mode: str = "aggregate_scalar"
    elementwise: str = "absolute_diff"
    aggregators: tuple[tuple[str, float], ...] = (("mean", 1.0),)
    combiner: str = "difference"
    vector_metric: str = "euclidean"
    empty_value: float = 0.0
    shift: float = 0.0

    def to_spec(self) -> ComparisonSpec:
        return ComparisonSpec(mode=self.mode, elementwise=self.elementwise,
                              aggregators=self.aggregators, combiner=self.combiner,
                              vector_metric=self.vector_metric,
                              empty_value=self.empty_value, value_shift=self.shift)


def default_indicator_config(name: str) -> IndicatorConfig:
    if name in VECTOR_INDICATORS:
        return IndicatorConfig(mode="aggregate_vector", vector_metric="euclidean")
    return IndicatorConfig()


@dataclass
class PipelineConfig:
    seed: int = 0
    max_hop: int = 2
    indicators: tuple[str, ...] = ("degree", "clustering")
    indicator_cfg: dict[str, IndicatorConfig] = field(default_factory=dict)
    weights_mode: str = "full"  # or "factored"
    full_weights: dict[str, tuple[float, ...]] = field(default_factory=dict)
    hop_weights: tuple[float, ...] = ()
    ind_weights: dict[str, float] = field(default_factory=dict)
    simgraph_mode: str = "dense"
    prune_c: float = 2.0
    dense_cap: int = 5000
    allow_large: bool = False
    transform_kind: str = "exponential"
    transform_wt: float = math.e
    walks_per_node: int = 10
    walk_len: int = 80
    dim: int = 16
    window: int = 10
    epochs: int = 5
    objective: str = "hierarchical_softmax"
    negatives: int = 5
    lr: float = 0.025
    community_file: str = ""
    community_variant: str = "histogram_euclidean"
    community_weights: tuple[float, ...] = ()
    sp_weights: tuple[float, ...] = ()
    sp_aggregator: str = "mean"
    sp_unreachable: float = 0.0
    ind_walk_len: int = 10
    ind_walks_per_node: int = 10
    anon_convention: str = "min_position"

    def normalized(self) -> "PipelineConfig":
        """Fill per-indicator defaults so equality and serialization are stable."""
        cfg = replace(self)
        cfg.indicator_cfg = {name: self.indicator_cfg.get(name, default_indicator_config(name))
                             for name in cfg.indicators}
        hops = cfg.max_hop + 1
        if cfg.weights_mode == "full":
            cfg.full_weights = {name: tuple(self.full_weights.get(name, (1.0,) * hops))
                                for name in cfg.indicators}
            cfg.hop_weights = ()
            cfg.ind_weights = {}
        else:
            cfg.full_weights = {}
            cfg.hop_weights = tuple(self.hop_weights) if self.hop_weights else (1.0,) * hops
            cfg.ind_weights = {name: float(self.ind_weights.get(name, 1.0))
                               for name in cfg.indicators}
        return cfg

    def validate(self) -> None:
        problems: list[str] = []

        def check(ok: bool, msg: str) -> None:
            if not ok:
                problems.append(msg)

        check(self.seed >= 0, "seed: must be >= 0")
        check(self.max_hop >= 0, "max_hop: must be >= 0")
        check(len(self.indicators) > 0, "indicators: at least one required")
        for name in self.indicators:
            check(name in KNOWN_INDICATORS,
                  f"indicators: unknown indicator {name!r}")
        for name, ic in self.indicator_cfg.items():
            prefix = f"indicator.{name}"
            check(ic.mode in MODES and ic.mode != "pairwise_node_score",
                  f"{prefix}.mode: invalid {ic.mode!r}")
            check(ic.elementwise in ELEMENTWISE, f"{prefix}.elementwise: invalid")
            check(ic.combiner in COMBINERS, f"{prefix}.combiner: invalid")
            check(ic.vector_metric in VECTOR_METRICS, f"{prefix}.vector_metric: invalid")
            for agg, _ in ic.aggregators:
                check(agg in AGGREGATOR_NAMES, f"{prefix}.aggregators: unknown {agg!r}")
        hops = self.max_hop + 1
        if self.weights_mode == "full":
            for name, ws in self.full_weights.items():
                check(len(ws) == hops, f"weights.{name}: needs {hops} values")
                check(all(w >= 0 for w in ws), f"weights.{name}: weights must be >= 0")
        elif self.weights_mode == "factored":
            if self.hop_weights:
                check(len(self.hop_weights) == hops, f"weights.hop: needs {hops} values")
                check(all(w >= 0 for w in self.hop_weights), "weights.hop: must be >= 0")
            check(all(w >= 0 for w in self.ind_weights.values()),
                  "weights.indicator: must be >= 0")
        else:
            check(False, f"weights.mode: invalid {self.weights_mode!r}")
        check(self.simgraph_mode in ("dense", "pruned"),
              f"simgraph.mode: invalid {self.simgraph_mode!r}")
        check(self.prune_c > 0, "simgraph.c: must be > 0")
        check(self.dense_cap >= 2, "simgraph.cap: must be >= 2")
        check(self.transform_kind in ("linear", "exponential"),
              f"transform.kind: invalid {self.transform_kind!r}")
        if self.transform_kind == "exponential":
            check(self.transform_wt > 1.0, "transform.wt: must be > 1")
        check(self.walks_per_node >= 1, "walks.per_node: must be >= 1")
        check(self.walk_len >= 2, "walks.length: must be >= 2")
        check(self.dim >= 1, "skipgram.dim: must be >= 1")
        check(self.window >= 1, "skipgram.window: must be >= 1")
        check(self.epochs >= 1, "skipgram.epochs: must be >= 1")
        check(self.objective in OBJECTIVES,
              f"skipgram.objective: invalid {self.objective!r}")
        check(self.negatives >= 1, "skipgram.negatives: must be >= 1")
        check(self.lr > 0, "skipgram.lr: must be > 0")
        if self.community_weights:
            check(len(self.community_weights) == hops,
                  f"community.weights: needs {hops} values")
            check(bool(self.community_file), "community.file: required when weighted")
            check(self.community_variant in ("histogram_euclidean", "distinct_count_diff"),
                  "community.variant: invalid")
        if self.sp_weights:
            check(len(self.sp_weights) == hops,
                  f"shortest_path.weights: needs {hops} values")
            check(self.sp_aggregator in AGGREGATOR_NAMES, "shortest_path.aggregator: invalid")
            check(self.sp_unreachable >= 0, "shortest_path.unreachable: must be >= 0")
        check(self.ind_walk_len >= 2, "indicator_walks.length: must be >= 2")
        check(self.ind_walks_per_node >= 1, "indicator_walks.per_node: must be >= 1")
        check(self.anon_convention in ("min_position", "first_rank"),
              "anonymous.convention: invalid")
        if problems:
            raise ConfigError(problems)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _fmt_floats(vals) -> str:
    return ", ".join(format(float(v), ".17g") for v in vals)


def serialize_config(cfg: PipelineConfig) -> str:
    cfg = cfg.normalized()
    lines = [
        f"seed = {cfg.seed}",
        f"max_hop = {cfg.max_hop}",
        "indicators = " + ", ".join(cfg.indicators),
    ]
    for name in cfg.indicators:
        ic = cfg.indicator_cfg[name]
        p = f"indicator.{name}"
        lines += [
            f"{p}.standardize = {_fmt(ic.standardize)}",
            f"{p}.mode = {ic.mode}",
            f"{p}.elementwise = {ic.elementwise}",
            f"{p}.aggregators = " + ", ".join(f"{a}:{_fmt(w)}" for a, w in ic.aggregators),
            f"{p}.combiner = {ic.combiner}",
            f"{p}.vector_metric = {ic.vector_metric}",
            f"{p}.empty_value = {_fmt(ic.empty_value)}",
            f"{p}.shift = {_fmt(ic.shift)}",
        ]
    lines.append(f"weights.mode = {cfg.weights_mode}")
    if cfg.weights_mode == "full":
        for name in cfg.indicators:
            lines.append(f"weights.{name} = " + _fmt_floats(cfg.full_weights[name]))
    else:
        lines.append("weights.hop = " + _fmt_floats(cfg.hop_weights))
        lines.append("weights.indicator = " +
                     ", ".join(f"{n}:{_fmt(cfg.ind_weights[n])}" for n in cfg.indicators))
    lines += [
        f"simgraph.mode = {cfg.simgraph_mode}",
        f"simgraph.c = {_fmt(cfg.prune_c)}",
        f"simgraph.cap = {cfg.dense_cap}",
        f"simgraph.allow_large = {_fmt(cfg.allow_large)}",
        f"transform.kind = {cfg.transform_kind}",
        f"transform.wt = {_fmt(cfg.transform_wt)}",
        f"walks.per_node = {cfg.walks_per_node}",
        f"walks.length = {cfg.walk_len}",
        f"skipgram.dim = {cfg.dim}",
        f"skipgram.window = {cfg.window}",
        f"skipgram.epochs = {cfg.epochs}",
        f"skipgram.objective = {cfg.objective}",
        f"skipgram.negatives = {cfg.negatives}",
        f"skipgram.lr = {_fmt(cfg.lr)}",
        f"community.file = {cfg.community_file}",
        f"community.variant = {cfg.community_variant}",
        "community.weights = " + _fmt_floats(cfg.community_weights),
        "shortest_path.weights = " + _fmt_floats(cfg.sp_weights),
        f"shortest_path.aggregator = {cfg.sp_aggregator}",
        f"shortest_path.unreachable = {_fmt(cfg.sp_unreachable)}",
        f"indicator_walks.length = {cfg.ind_walk_len}",
        f"indicator_walks.per_node = {cfg.ind_walks_per_node}",
        f"anonymous.convention = {cfg.anon_convention}",
    ]
    return "\n".join(lines) + "\n"


def _parse_bool(v: str, key: str, problems: list[str]) -> bool:
    if v.lower() in ("true", "1", "yes"):
        return True
    if v.lower() in ("false", "0", "no"):
        return False
    problems.append(f"{key}: expected true/false, got {v!r}")
    return False


def _parse_float_list(v: str) -> tuple[float, ...]:
    v = v.strip()
    if not v:
        return ()
    return tuple(float(x.strip()) for x in v.split(","))


def _parse_weighted_names(v: str) -> tuple[tuple[str, float], ...]:
    out = []
    for item in v.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            name, w = item.split(":", 1)
            out.append((name.strip(), float(w)))
        else:
            out.append((item, 1.0))
    return tuple(out)


def parse_config(text: str) -> PipelineConfig:
    """Parse the flat key=value format into a validated PipelineConfig."""
    cfg = PipelineConfig()
    problems: list[str] = []
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()

    def pop_int(key: str, default: int) -> int:
        if key not in entries:
            return default
        try:
            return int(entries.pop(key))
        except ValueError:
            problems.append(f"{key}: expected an integer")
            return default

    def pop_float(key: str, default: float) -> float:
        if key not in entries:
            return default
        try:
            return float(entries.pop(key))
        except ValueError:
            problems.append(f"{key}: expected a number")
            return default

    def pop_str(key: str, default: str) -> str:
        return entries.pop(key, default)

    cfg.seed = pop_int("seed", cfg.seed)
    cfg.max_hop = pop_int("max_hop", cfg.max_hop)
    if "indicators" in entries:
        cfg.indicators = tuple(x.strip() for x in entries.pop("indicators").split(",")
                               if x.strip())
    indicator_cfg: dict[str, IndicatorConfig] = {}
    for name in cfg.indicators:
        ic = default_indicator_config(name)
        p = f"indicator.{name}"
        if f"{p}.standardize" in entries:
            ic.standardize = _parse_bool(entries.pop(f"{p}.standardize"),
                                         f"{p}.standardize", problems)
        ic.mode = pop_str(f"{p}.mode", ic.mode)
        ic.elementwise = pop_str(f"{p}.elementwise", ic.elementwise)
        if f"{p}.aggregators" in entries:
            try:
                ic.aggregators = _parse_weighted_names(entries.pop(f"{p}.aggregators"))
            except ValueError:
                problems.append(f"{p}.aggregators: expected name:weight list")
        ic.combiner = pop_str(f"{p}.combiner", ic.combiner)
        ic.vector_metric = pop_str(f"{p}.vector_metric", ic.vector_metric)
        ic.empty_value = pop_float(f"{p}.empty_value", ic.empty_value)
        ic.shift = pop_float(f"{p}.shift", ic.shift)
        indicator_cfg[name] = ic
    cfg.indicator_cfg = indicator_cfg
    cfg.weights_mode = pop_str("weights.mode", cfg.weights_mode)
    full_weights: dict[str, tuple[float, ...]] = {}
    for name in cfg.indicators:
        key = f"weights.{name}"
        if key in entries:
            try:
                full_weights[name] = _parse_float_list(entries.pop(key))
            except ValueError:
                problems.append(f"{key}: expected a comma-separated number list")
    cfg.full_weights = full_weights
    if "weights.hop" in entries:
        try:
            cfg.hop_weights = _parse_float_list(entries.pop("weights.hop"))
        except ValueError:
            problems.append("weights.hop: expected a comma-separated number list")
    if "weights.indicator" in entries:
        try:
            cfg.ind_weights = dict(_parse_weighted_names(entries.pop("weights.indicator")))
        except ValueError:
            problems.append("weights.indicator: expected name:weight list")
    cfg.simgraph_mode = pop_str("simgraph.mode", cfg.simgraph_mode)
    cfg.prune_c = pop_float("simgraph.c", cfg.prune_c)
    cfg.dense_cap = pop_int("simgraph.cap", cfg.dense_cap)
    if "simgraph.allow_large" in entries:
        cfg.allow_large = _parse_bool(entries.pop("simgraph.allow_large"),
                                      "simgraph.allow_large", problems)
    cfg.transform_kind = pop_str("transform.kind", cfg.transform_kind)
    cfg.transform_wt = pop_float("transform.wt", cfg.transform_wt)
    cfg.walks_per_node = pop_int("walks.per_node", cfg.walks_per_node)
    cfg.walk_len = pop_int("walks.length", cfg.walk_len)
    cfg.dim = pop_int("skipgram.dim", cfg.dim)
    cfg.window = pop_int("skipgram.window", cfg.window)
    cfg.epochs = pop_int("skipgram.epochs", cfg.epochs)
    cfg.objective = pop_str("skipgram.objective", cfg.objective)
    cfg.negatives = pop_int("skipgram.negatives", cfg.negatives)
    cfg.lr = pop_float("skipgram.lr", cfg.lr)
    cfg.community_file = pop_str("community.file", cfg.community_file)
    cfg.community_variant = pop_str("community.variant", cfg.community_variant)
    if "community.weights" in entries:
        try:
            cfg.community_weights = _parse_float_list(entries.pop("community.weights"))
        except ValueError:
            problems.append("community.weights: expected a number list")
    if "shortest_path.weights" in entries:
        try:
            cfg.sp_weights = _parse_float_list(entries.pop("shortest_path.weights"))
        except ValueError:
            problems.append("shortest_path.weights: expected a number list")
    cfg.sp_aggregator = pop_str("shortest_path.aggregator", cfg.sp_aggregator)
    cfg.sp_unreachable = pop_float("shortest_path.unreachable", cfg.sp_unreachable)
    cfg.ind_walk_len = pop_int("indicator_walks.length", cfg.ind_walk_len)
    cfg.ind_walks_per_node = pop_int("indicator_walks.per_node", cfg.ind_walks_per_node)
    cfg.anon_convention = pop_str("anonymous.convention", cfg.anon_convention)
    for key in entries:
        problems.append(f"{key}: unknown key")
    if problems:
        raise ConfigError(problems)
    cfg = cfg.normalized()
    cfg.validate()
    return cfg


def load_config(path) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(cfg: PipelineConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_config(cfg))
