"""Black-box search over pipeline parameters against a downstream objective.

The sequential estimator splits past observations at a quantile of the
objective, fits one-dimensional Gaussian kernel densities per parameter for
the good and bad halves, draws candidates from the good model and keeps the
one with the highest good/bad density ratio. Categorical parameters use
Laplace-smoothed category frequencies. Objectives are maximized; trials that
raise are recorded as failed and skipped by the models.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

CONTINUOUS = "continuous"
INTEGER = "integer"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class ParamSpec:
    """One search dimension: continuous/integer with bounds, or categorical."""

    name: str
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    options: tuple = ()
    transform: str = "linear"  # or "log" for positive ranges

    def validate(self) -> None:
        if self.kind not in (CONTINUOUS, INTEGER, CATEGORICAL):
            raise ValueError(f"{self.name}: unknown kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.options:
                raise ValueError(f"{self.name}: categorical options must be non-empty")
        else:
            if not self.lo < self.hi:
                raise ValueError(f"{self.name}: lo must be < hi")
            if self.transform == "log" and self.lo <= 0:
                raise ValueError(f"{self.name}: log transform needs lo > 0")
        if self.transform not in ("linear", "log"):
            raise ValueError(f"{self.name}: unknown transform {self.transform!r}")

    def to_internal(self, x):
        return math.log(x) if self.transform == "log" else float(x)

    def from_internal(self, z: float):
        x = math.exp(z) if self.transform == "log" else z
        x = min(max(x, self.lo), self.hi)
        if self.kind == INTEGER:
            return int(round(x))
        return float(x)

    def sample_uniform(self, rng: np.random.Generator):
        if self.kind == CATEGORICAL:
            return self.options[rng.integers(len(self.options))]
        if self.kind == INTEGER:
            return int(rng.integers(int(self.lo), int(self.hi) + 1))
        if self.transform == "log":
            return float(math.exp(rng.uniform(math.log(self.lo), math.log(self.hi))))
        return float(rng.uniform(self.lo, self.hi))


class SearchSpace:
    def __init__(self, params: list[ParamSpec]):
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names in search space")
        for p in params:
            p.validate()
        self.params = list(params)

    def __iter__(self):
        return iter(self.params)

    def contains(self, assignment: dict) -> bool:
        for p in self.params:
            v = assignment[p.name]
            if p.kind == CATEGORICAL:
                if v not in p.options:
                    return False
            elif not (p.lo <= v <= p.hi):
                return False
        return True


@dataclass
class TrialRecord:
    index: int
    params: dict
    objective: float | None
    failed: bool
    seed: int
    wall_time: float = 0.0


def _kde_logpdf(x: float, centers: np.ndarray, bws: np.ndarray) -> float:
    z = (x - centers) / bws
    dens = (np.exp(-0.5 * z * z) / (bws * math.sqrt(2 * math.pi))).sum() / len(centers)
    return math.log(dens + 1e-300)


def _bandwidth(values: np.ndarray, span: float) -> float:
    """Scott's-rule bandwidth floor-clamped at 5% of the range.

    The floor keeps repeated observations from shrinking the kernels until
    the sampler can only re-propose the incumbent.
    """
    floor = max(5e-2 * span, 1e-12)
    if len(values) < 2:
        return max(span * 0.25, floor)
    scott = float(np.std(values)) * len(values) ** (-0.2)
    return max(scott, floor)


def _model(values: np.ndarray, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Kernel centers and per-kernel bandwidths for one density model.

    A wide prior kernel at the range midpoint is always included so the
    model never collapses onto repeated observations and candidate draws
    keep exploring the whole range.
    """
    span = hi - lo
    bw = _bandwidth(values, span)
    centers = np.concatenate([values, [0.5 * (lo + hi)]])
    bws = np.concatenate([np.full(len(values), bw), [max(span, 1e-12)]])
    return centers, bws


def _suggest(space: SearchSpace, history: list[TrialRecord], gamma: float,
             n_candidates: int, rng: np.random.Generator) -> dict:
    done = [t for t in history if not t.failed]
    n_good = max(1, math.ceil(gamma * len(done)))
    ranked = sorted(done, key=lambda t: (-t.objective, t.index))
    good = ranked[:n_good]
    bad = ranked[n_good:]
    if not bad:
        bad = good
    candidates = []
    scores = np.zeros(n_candidates)
    for _ in range(n_candidates):
        candidates.append({})
    for p in space:
        if p.kind == CATEGORICAL:
            opts = list(p.options)
            cg = np.array([sum(1 for t in good if t.params[p.name] == o) + 1.0
                           for o in opts])
            cb = np.array([sum(1 for t in bad if t.params[p.name] == o) + 1.0
                           for o in opts])
            pg, pb = cg / cg.sum(), cb / cb.sum()
            draws = rng.choice(len(opts), size=n_candidates, p=pg)
            for c in range(n_candidates):
                candidates[c][p.name] = opts[draws[c]]
                scores[c] += math.log(pg[draws[c]]) - math.log(pb[draws[c]])
        else:
            gvals = np.array([p.to_internal(t.params[p.name]) for t in good])
            bvals = np.array([p.to_internal(t.params[p.name]) for t in bad])
            lo_i, hi_i = p.to_internal(p.lo), p.to_internal(p.hi)
            g_centers, g_bws = _model(gvals, lo_i, hi_i)
            b_centers, b_bws = _model(bvals, lo_i, hi_i)
            comp = rng.integers(len(g_centers), size=n_candidates)
            draws = np.clip(g_centers[comp] + rng.standard_normal(n_candidates)
                            * g_bws[comp], lo_i, hi_i)
            for c in range(n_candidates):
                x = float(draws[c])
                candidates[c][p.name] = p.from_internal(x)
                scores[c] += _kde_logpdf(x, g_centers, g_bws) - \
                    _kde_logpdf(x, b_centers, b_bws)
    return candidates[int(np.argmax(scores))]


def _run_trials(space: SearchSpace, objective, trials: int, seed: int,
                sampler, prior: list[TrialRecord] | None,
                on_trial=None) -> tuple[TrialRecord, list[TrialRecord]]:
    history: list[TrialRecord] = list(prior) if prior else []
    start = len(history)
    if start >= trials:
        raise ValueError(f"trial log already holds {start} >= {trials} trials")
    for idx in range(start, trials):
        rng = np.random.default_rng([seed, idx])
        params = sampler(idx, history, rng)
        t0 = time.perf_counter()
        try:
            value = float(objective(params))
            record = TrialRecord(idx, params, value, False, seed,
                                 time.perf_counter() - t0)
        except Exception:
            record = TrialRecord(idx, params, None, True, seed,
                                 time.perf_counter() - t0)
        history.append(record)
        if on_trial is not None:
            on_trial(record)
    done = [t for t in history if not t.failed]
    if not done:
        raise RuntimeError("every trial failed; nothing to report")
    best = max(done, key=lambda t: (t.objective, -t.index))
    return best, history


def tpe_optimize(space: SearchSpace, objective, trials: int, gamma: float = 0.25,
                 startup_trials: int = 10, seed: int = 0, n_candidates: int = 24,
                 prior: list[TrialRecord] | None = None,
                 on_trial=None) -> tuple[TrialRecord, list[TrialRecord]]:
    """Sequential model-based maximization of `objective` over `space`.

    The first `startup_trials` are uniform; afterwards candidates come from
    the good/bad density models. `prior` resumes from earlier records; every
    trial index draws its RNG from (seed, index), so resumed runs reproduce
    the uninterrupted sequence. Returns (best record, full history).
    """
    if not trials >= startup_trials >= 1:
        raise ValueError("need trials >= startup_trials >= 1")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must be in (0, 1)")

    def sampler(idx: int, history: list[TrialRecord], rng: np.random.Generator) -> dict:
        done = [t for t in history if not t.failed]
        if idx < startup_trials or len(done) < 2:
            return {p.name: p.sample_uniform(rng) for p in space}
        return _suggest(space, history, gamma, n_candidates, rng)

    return _run_trials(space, objective, trials, seed, sampler, prior, on_trial)


def random_search(space: SearchSpace, objective, trials: int, seed: int = 0,
                  prior: list[TrialRecord] | None = None,
                  on_trial=None) -> tuple[TrialRecord, list[TrialRecord]]:
    """Uniform baseline sampler with the same bookkeeping as tpe_optimize."""
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def sampler(idx, history, rng):
        return {p.name: p.sample_uniform(rng) for p in space}

    return _run_trials(space, objective, trials, seed, sampler, prior, on_trial)


WEIGHT_PREFIX = "w."
HOP_PREFIX = "hop."
IND_PREFIX = "ind."


def weight_report(history: list[TrialRecord], best: TrialRecord,
                  top: int = 5) -> str:
    """Readable summary of the winning weight assignment.

    Full-form weight parameters ("w.<indicator>.<hop>") are normalized to
    unit total magnitude and listed by size; factored parameters are
    normalized and listed per group. Ends with the best objective.
    """
    lines: list[str] = []
    full = {k: v for k, v in best.params.items() if k.startswith(WEIGHT_PREFIX)}
    hop = {k: v for k, v in best.params.items() if k.startswith(HOP_PREFIX)}
    ind = {k: v for k, v in best.params.items() if k.startswith(IND_PREFIX)}
    if full:
        total = sum(abs(v) for v in full.values())
        total = total if total > 0 else 1.0
        ranked = sorted(full.items(), key=lambda kv: (-abs(kv[1]), kv[0]))
        lines.append("normalized weights per (indicator, hop):")
        for key, v in ranked:
            _, name, k = key.split(".", 2)
            lines.append(f"  {name:<16s} hop {k}: {abs(v) / total:.4f}")
        lines.append(f"top {min(top, len(ranked))}:")
        for key, v in ranked[:top]:
            _, name, k = key.split(".", 2)
            lines.append(f"  {name} at hop {k} ({abs(v) / total:.1%} of total weight)")
    for label, group in (("hop weights", hop), ("indicator weights", ind)):
        if group:
            total = sum(abs(v) for v in group.values()) or 1.0
            lines.append(f"normalized {label}:")
            for key, v in sorted(group.items(), key=lambda kv: (-abs(kv[1]), kv[0])):
                lines.append(f"  {key.split('.', 1)[1]}: {abs(v) / total:.4f}")
    if not (full or hop or ind):
        lines.append("no weight parameters in the search space")
    lines.append(f"best objective: {best.objective:.6f} (trial {best.index})")
    return "\n".join(lines)


def normalized_weight_magnitudes(params: dict) -> dict[str, float]:
    """Unit-sum absolute magnitudes of the full-form weight parameters."""
    full = {k: abs(v) for k, v in params.items() if k.startswith(WEIGHT_PREFIX)}
    total = sum(full.values())
    if total == 0:
        return {k: 0.0 for k in full}
    return {k: v / total for k, v in full.items()}


def _format_value(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def append_trial_log(path, record: TrialRecord) -> None:
    """Append one key-value line per trial; wall time is deliberately not
    persisted so logs stay byte-reproducible."""
    parts = [f"trial={record.index}",
             f"status={'failed' if record.failed else 'ok'}",
             f"objective={'nan' if record.objective is None else format(record.objective, '.17g')}",
             f"seed={record.seed}"]
    parts += [f"p:{k}={_format_value(v)}" for k, v in sorted(record.params.items())]
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(" ".join(parts) + "\n")


def read_trial_log(path, space: SearchSpace) -> list[TrialRecord]:
    """Parse records written by append_trial_log, typed against the space."""
    kinds = {p.name: p for p in space}
    out: list[TrialRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = dict(item.split("=", 1) for item in line.split())
            params = {}
            for key, val in fields.items():
                if key.startswith("p:"):
                    name = key[2:]
                    spec = kinds.get(name)
                    if spec is None:
                        params[name] = val
                    elif spec.kind == INTEGER:
                        params[name] = int(val)
                    elif spec.kind == CONTINUOUS:
                        params[name] = float(val)
                    else:
                        params[name] = val
            failed = fields["status"] == "failed"
            obj = None if failed else float(fields["objective"])
            out.append(TrialRecord(int(fields["trial"]), params, obj, failed,
                                   int(fields["seed"])))
    return out
