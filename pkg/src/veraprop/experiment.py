"""Few-shot experiment orchestration: balanced split sampling, repeated
seeded runs, accuracy aggregation, and ablation variants.

Per run, the pipeline is: sample a balanced split, obtain base
predictions, overwrite labeled rows with ground truth, harden confident
rows (unless ablated), propagate over the readership graph (unless
ablated, in which case labels are the argmax of the injected matrix), and
score accuracy over the unlabeled articles only. Base-prediction accuracy
is recorded alongside for paired comparison.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import align, predictions
from .data import DataError, Dataset, SplitSpec, load_dataset, make_one_hot
from .graph import build_proximity_graph


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 16
    seeds: tuple[int, ...] = tuple(range(20))
    t_p: float = 95.0
    t_u: int = 5
    k: int = 2
    use_tpl: bool = True
    use_graph: bool = True
    weighting: str = "by-article"
    zero_diagonal: bool = False
    isolated_policy: str = "self-loop"
    base_source: str = "baseline"  # "baseline" or a prediction-file path
    articles_path: str | None = None
    engagements_path: str | None = None
    baseline: predictions.BaselineHyperparams = predictions.BaselineHyperparams()

    def validate(self) -> None:
        if self.n % 2 != 0 or self.n < 0:
            raise ValueError(f"n must be even and nonnegative for 1:1 balance, got {self.n}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        if not 0.0 < self.t_p <= 100.0:
            raise ValueError(f"t_p must be in (0, 100], got {self.t_p}")
        if self.t_u < 1:
            raise ValueError(f"t_u must be >= 1, got {self.t_u}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")


@dataclass(frozen=True)
class RunResult:
    seed: int
    accuracy: float  # aligned pipeline accuracy, percent
    base_accuracy: float  # base-prediction argmax accuracy, percent
    eval_size: int
    tie_broken: int  # rows whose label came from the argmax tie rule
    predictions: dict[str, int] | None = None


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    runs: tuple[RunResult, ...]
    wall_time: float

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([r.accuracy for r in self.runs]))

    @property
    def mean_base_accuracy(self) -> float:
        return float(np.mean([r.base_accuracy for r in self.runs]))


def derive_seeds(master_seed: int, count: int) -> tuple[int, ...]:
    """Independent per-run seeds from (master seed, run index)."""
    return tuple(
        int(np.random.SeedSequence((master_seed, i)).generate_state(1, np.uint64)[0])
        for i in range(count)
    )


def make_split(dataset: Dataset, n: int, seed: int) -> SplitSpec:
    """Balanced split: exactly n/2 per class, sampled without replacement
    from each class's id-sorted pool by the seeded stream."""
    if n % 2 != 0 or n < 0:
        raise ValueError(f"n must be even and nonnegative, got {n}")
    if n == 0:
        return SplitSpec(labeled_ids=(), one_hot=make_one_hot([]))
    pools = {cls: sorted(aid for aid, c in dataset.labels.items() if c == cls) for cls in (0, 1)}
    per_class = n // 2
    for cls, pool in pools.items():
        if len(pool) < per_class:
            raise DataError(
                f"class {cls} has {len(pool)} labeled articles, need {per_class}"
            )
    rng = np.random.default_rng(seed)
    ids: list[str] = []
    classes: list[int] = []
    for cls in (0, 1):
        chosen = rng.choice(len(pools[cls]), size=per_class, replace=False)
        ids.extend(pools[cls][i] for i in chosen)
        classes.extend([cls] * per_class)
    return SplitSpec(labeled_ids=tuple(ids), one_hot=make_one_hot(classes))


def accuracy(predicted: dict[str, int], gold: dict[str, int], eval_ids) -> float:
    """Percent of eval_ids whose predicted class matches gold."""
    eval_ids = list(eval_ids)
    if not eval_ids:
        raise ValueError("empty evaluation set")
    missing = [aid for aid in eval_ids if aid not in predicted]
    if missing:
        raise DataError(f"missing predictions for: {missing}")
    correct = sum(1 for aid in eval_ids if predicted[aid] == gold[aid])
    return 100.0 * correct / len(eval_ids)


def _base_predictions(config: ExperimentConfig, dataset: Dataset, split: SplitSpec) -> np.ndarray:
    if config.base_source == "baseline":
        model = predictions.train_baseline(dataset, split, config.baseline)
        return predictions.predict(model, dataset)
    return predictions.load_predictions(config.base_source, dataset)


def run_single(
    config: ExperimentConfig,
    dataset: Dataset,
    seed: int,
    graph=None,
    base: np.ndarray | None = None,
    keep_predictions: bool = False,
) -> RunResult:
    """One seeded run of the configured pipeline."""
    split = make_split(dataset, config.n, seed)
    if base is None:
        base = _base_predictions(config, dataset, split)

    labeled_idx = [dataset.index_of(aid) for aid in split.labeled_ids]
    eval_ids = [aid for aid in dataset.article_ids if aid not in set(split.labeled_ids)]

    h = align.build_confidence(base, split, dataset, t_p=config.t_p, use_tpl=config.use_tpl)
    if config.use_graph:
        if graph is None:
            graph = build_proximity_graph(
                dataset,
                config.t_u,
                weighting=config.weighting,
                zero_diagonal=config.zero_diagonal,
                isolated_policy=config.isolated_policy,
            )
        scores = align.propagate(graph, h, config.k)
    else:
        scores = align.AlignedScores(values=h.values, steps=0)

    by_index = align.predict_labels(scores, exclude=labeled_idx)
    predicted = {dataset.id_of(i): cls for i, cls in by_index.items()}
    base_by_index = align.predict_labels(base, exclude=labeled_idx)
    base_predicted = {dataset.id_of(i): cls for i, cls in base_by_index.items()}

    ties = [i for i in align.ambiguous_rows(scores) if i not in set(labeled_idx)]
    return RunResult(
        seed=seed,
        accuracy=accuracy(predicted, dataset.labels, eval_ids),
        base_accuracy=accuracy(base_predicted, dataset.labels, eval_ids),
        eval_size=len(eval_ids),
        tie_broken=len(ties),
        predictions=predicted if keep_predictions else None,
    )


def run_experiment(
    config: ExperimentConfig,
    dataset: Dataset | None = None,
    keep_predictions: bool = False,
) -> ExperimentReport:
    """Run every seed of the config and aggregate.

    The readership graph and any file-based predictions are shared across
    runs (neither depends on the seed); the built-in baseline is retrained
    per split. A failing seed aborts the experiment with context.
    """
    config.validate()
    started = time.perf_counter()
    if dataset is None:
        if config.articles_path is None:
            raise ValueError("config has no articles_path and no dataset was given")
        dataset = load_dataset(config.articles_path, config.engagements_path)

    graph = None
    if config.use_graph:
        graph = build_proximity_graph(
            dataset,
            config.t_u,
            weighting=config.weighting,
            zero_diagonal=config.zero_diagonal,
            isolated_policy=config.isolated_policy,
        )
    shared_base = None
    if config.base_source != "baseline":
        shared_base = predictions.load_predictions(config.base_source, dataset)

    runs = []
    for seed in config.seeds:
        try:
            runs.append(
                run_single(config, dataset, seed, graph=graph, base=shared_base,
                           keep_predictions=keep_predictions)
            )
        except Exception as exc:
            raise RuntimeError(f"run with seed {seed} failed: {exc}") from exc
    return ExperimentReport(
        config=config,
        runs=tuple(runs),
        wall_time=time.perf_counter() - started,
    )


def config_to_dict(config: ExperimentConfig) -> dict:
    out = {
        "n": config.n,
        "seeds": list(config.seeds),
        "t_p": config.t_p,
        "t_u": config.t_u,
        "k": config.k,
        "use_tpl": config.use_tpl,
        "use_graph": config.use_graph,
        "weighting": config.weighting,
        "zero_diagonal": config.zero_diagonal,
        "isolated_policy": config.isolated_policy,
        "base_source": config.base_source,
        "articles_path": config.articles_path,
        "engagements_path": config.engagements_path,
        "baseline": {
            "ngram_sizes": list(config.baseline.ngram_sizes),
            "regularization": config.baseline.regularization,
            "iterations": config.baseline.iterations,
        },
    }
    return out


def config_from_dict(obj: dict) -> ExperimentConfig:
    baseline = obj.get("baseline", {})
    hp = predictions.BaselineHyperparams(
        ngram_sizes=tuple(baseline.get("ngram_sizes", (2, 3))),
        regularization=baseline.get("regularization", 1e-3),
        iterations=baseline.get("iterations", 300),
    )
    known = {
        "n", "seeds", "t_p", "t_u", "k", "use_tpl", "use_graph", "weighting",
        "zero_diagonal", "isolated_policy", "base_source", "articles_path",
        "engagements_path",
    }
    kwargs = {key: obj[key] for key in known if key in obj}
    if "seeds" in kwargs:
        kwargs["seeds"] = tuple(kwargs["seeds"])
    return ExperimentConfig(baseline=hp, **kwargs)


def write_report_jsonl(report: ExperimentReport, path) -> None:
    """Machine-readable report: one config record, one record per run, one
    aggregate. Deterministic byte-for-byte for a fixed config and seeds
    (volatile fields like wall time are deliberately excluded)."""

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"record": "config", **config_to_dict(report.config)},
                            sort_keys=True) + "\n")
        for run in report.runs:
            fh.write(json.dumps({
                "record": "run",
                "seed": run.seed,
                "accuracy": run.accuracy,
                "base_accuracy": run.base_accuracy,
                "eval_size": run.eval_size,
                "tie_broken": run.tie_broken,
            }, sort_keys=True) + "\n")
        fh.write(json.dumps({
            "record": "aggregate",
            "runs": len(report.runs),
            "mean_accuracy": report.mean_accuracy,
            "mean_base_accuracy": report.mean_base_accuracy,
        }, sort_keys=True) + "\n")


def read_report_jsonl(path) -> dict:
    """Parse a machine-readable report into {config, runs, aggregate}."""
    config = None
    runs = []
    aggregate = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            kind = obj.pop("record", None)
            if kind == "config":
                config = obj
            elif kind == "run":
                runs.append(obj)
            elif kind == "aggregate":
                aggregate = obj
            else:
                raise DataError(f"{path}: unknown record kind {kind!r}")
    if aggregate is None:
        raise DataError(f"{path}: no aggregate record")
    return {"config": config, "runs": runs, "aggregate": aggregate}


def format_report(report: ExperimentReport) -> str:
    """Human-readable table."""
    lines = [
        f"runs={len(report.runs)} n={report.config.n} t_p={report.config.t_p}"
        f" t_u={report.config.t_u} k={report.config.k}"
        f" use_tpl={report.config.use_tpl} use_graph={report.config.use_graph}",
        f"{'seed':>12} {'base acc %':>11} {'aligned acc %':>14} {'eval size':>10}",
    ]
    for run in report.runs:
        lines.append(
            f"{run.seed:>12} {run.base_accuracy:>11.2f} {run.accuracy:>14.2f} {run.eval_size:>10}"
        )
    lines.append(
        f"{'mean':>12} {report.mean_base_accuracy:>11.2f} {report.mean_accuracy:>14.2f}"
    )
    lines.append(f"wall time: {report.wall_time:.2f}s")
    return "\n".join(lines)
