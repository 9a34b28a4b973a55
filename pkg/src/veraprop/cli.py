"""Command-line entry point.

Subcommands: ingest, fna, graph, align, synth, eval, report. All read one
structured JSON config (see README for the schema); ``--seed`` overrides
the config's master seed and ``--out`` selects the output directory.

Exit codes: 0 success, 2 validation/config error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import align as align_mod
from . import experiment, fna, graph, predictions, synth
from .data import (
    DataError,
    count_engagement_rows,
    load_dataset,
    save_articles,
    save_engagements,
    save_split,
)
from .stats import wilcoxon_signed_rank

DEFAULT_RUNS = 20


def _load_config(path) -> dict:
    if path is None:
        raise DataError("--config is required for this subcommand")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _experiment_config(cfg: dict, args) -> experiment.ExperimentConfig:
    cfg = dict(cfg)
    if "seeds" not in cfg:
        master = args.seed if args.seed is not None else cfg.get("master_seed")
        if master is None:
            raise DataError("config needs either 'seeds' or 'master_seed'/--seed")
        cfg["seeds"] = experiment.derive_seeds(master, cfg.get("runs", DEFAULT_RUNS))
    cfg.setdefault("articles_path", cfg.get("articles"))
    cfg.setdefault("engagements_path", cfg.get("engagements"))
    return experiment.config_from_dict(cfg)


def _dataset_from_config(cfg: dict):
    if "articles" not in cfg:
        raise DataError("config needs an 'articles' path")
    return load_dataset(cfg["articles"], cfg.get("engagements"), strict=cfg.get("strict", True))


def cmd_ingest(args) -> int:
    cfg = _load_config(args.config)
    dataset = _dataset_from_config(cfg)
    raw_rows = count_engagement_rows(cfg["engagements"]) if cfg.get("engagements") else 0
    print(f"articles: {dataset.n_articles}")
    print(f"labeled: {len(dataset.labels)}")
    print(f"engagement rows before merging: {raw_rows}")
    print(f"merged engagements: {len(dataset.engagements)}")
    print(f"distinct users: {dataset.n_users}")
    if dataset.dropped_engagements or dataset.dropped_labels:
        print(f"dropped dangling engagements: {dataset.dropped_engagements}")
        print(f"dropped dangling labels: {dataset.dropped_labels}")
    if args.out:
        out = _out_dir(args)
        save_articles(dataset.articles, out / "articles.jsonl", dataset.labels)
        save_engagements(dataset.engagements, out / "engagements.csv")
        print(f"canonical copies written to {out}")
    return 0


def cmd_fna(args) -> int:
    cfg = _load_config(args.config)
    dataset = _dataset_from_config(cfg)
    t_u = cfg.get("t_u", 5)
    weighting = cfg.get("weighting", "by-article")
    bins = cfg.get("bins", 10)
    table = fna.compute_fna(dataset, t_u, weighting)
    hist = fna.fna_histogram(table, bins)
    out = _out_dir(args)
    fna.save_histogram(hist, out / "fna_histogram.csv")
    with open(out / "fna_table.csv", "w", encoding="utf-8") as fh:
        fh.write("user_id,engagement_count,fake_count,fna\n")
        for user_id, ua in table.items():
            fh.write(f"{user_id},{ua.engagement_count},{ua.fake_count},{ua.fna:.17g}\n")
    print(f"active users (t_u={t_u}, {weighting}): {len(table)}")
    print(f"extreme-bin users: {fna.extreme_mass(hist)} of {len(table)}")
    print(f"wrote {out / 'fna_table.csv'} and {out / 'fna_histogram.csv'}")
    return 0


def cmd_graph(args) -> int:
    cfg = _load_config(args.config)
    dataset = _dataset_from_config(cfg)
    g = graph.build_proximity_graph(
        dataset,
        cfg.get("t_u", 5),
        weighting=cfg.get("weighting", "by-article"),
        zero_diagonal=cfg.get("zero_diagonal", False),
        isolated_policy=cfg.get("isolated_policy", "self-loop"),
    )
    out = _out_dir(args)
    graph.save_graph(g, out / "graph.csv")
    print(f"articles: {g.n}, stored entries: {g.a_t.nnz}, isolated: {g.isolated.size}")
    print(f"wrote {out / 'graph.csv'}")
    return 0


def cmd_align(args) -> int:
    cfg = _load_config(args.config)
    dataset = _dataset_from_config(cfg)
    config = _experiment_config(cfg, args)
    seed = config.seeds[0]
    split = experiment.make_split(dataset, config.n, seed)

    if config.base_source == "baseline":
        model = predictions.train_baseline(dataset, split, config.baseline)
        base = predictions.predict(model, dataset)
    else:
        base = predictions.load_predictions(config.base_source, dataset)

    h = align_mod.build_confidence(base, split, dataset, t_p=config.t_p, use_tpl=config.use_tpl)
    g = graph.build_proximity_graph(
        dataset, config.t_u, weighting=config.weighting,
        zero_diagonal=config.zero_diagonal, isolated_policy=config.isolated_policy,
    )
    scores = align_mod.propagate(g, h, config.k, record_steps=True)

    out = _out_dir(args)
    align_mod.save_alignment_csv(dataset, scores, out / "alignment_steps.csv")
    save_split(split, out / "split.json")
    labeled_idx = [dataset.index_of(aid) for aid in split.labeled_ids]
    labels = align_mod.predict_labels(scores, exclude=labeled_idx)
    with open(out / "predicted_labels.csv", "w", encoding="utf-8") as fh:
        fh.write("article_id,label\n")
        for i in sorted(labels):
            fh.write(f"{dataset.id_of(i)},{labels[i]}\n")
    print(f"seed: {seed}, pseudo-label threshold: {h.threshold}")
    print(f"wrote {out / 'alignment_steps.csv'}, {out / 'split.json'}, {out / 'predicted_labels.csv'}")
    return 0


def cmd_synth(args) -> int:
    cfg = _load_config(args.config).get("synth", {})
    if args.seed is not None:
        cfg["seed"] = args.seed
    config = synth.SynthConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in cfg.items()})
    dataset = synth.generate(config)
    out = _out_dir(args)
    save_articles(dataset.articles, out / "articles.jsonl", dataset.labels)
    save_engagements(dataset.engagements, out / "engagements.csv")
    print(f"generated {dataset.n_articles} articles, {len(dataset.engagements)} engagements,"
          f" {dataset.n_users} users (seed={config.seed})")
    print(f"wrote {out / 'articles.jsonl'} and {out / 'engagements.csv'}")
    return 0


def cmd_eval(args) -> int:
    cfg = _load_config(args.config)
    config = _experiment_config(cfg, args)
    report = experiment.run_experiment(config)
    out = _out_dir(args)
    experiment.write_report_jsonl(report, out / "report.jsonl")
    table = experiment.format_report(report)
    with open(out / "report.txt", "w", encoding="utf-8") as fh:
        fh.write(table + "\n")
    print(table)
    print(f"wrote {out / 'report.jsonl'} and {out / 'report.txt'}")
    return 0


def cmd_report(args) -> int:
    main_report = experiment.read_report_jsonl(args.report)
    agg = main_report["aggregate"]
    print(f"{args.report}: {agg['runs']} runs,"
          f" mean accuracy {agg['mean_accuracy']:.2f}%"
          f" (base {agg['mean_base_accuracy']:.2f}%)")
    if args.compare:
        other = experiment.read_report_jsonl(args.compare)
        a = [run["accuracy"] for run in main_report["runs"]]
        b = [run["accuracy"] for run in other["runs"]]
        result = wilcoxon_signed_rank(a, b)
        print(f"{args.compare}: mean accuracy {other['aggregate']['mean_accuracy']:.2f}%")
        print(f"wilcoxon signed-rank: statistic={result.statistic:.6g}"
              f" p={result.p_value:.6g} n_effective={result.n_effective}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="veraprop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="path to the JSON config file")
        cmd.add_argument("--seed", type=int, help="master seed override")
        cmd.add_argument("--out", help="output directory (default: cwd)")
        cmd.set_defaults(func=func)
        return cmd

    add("ingest", cmd_ingest, "load and validate dataset files")
    add("fna", cmd_fna, "per-user affinity table and histogram")
    add("graph", cmd_graph, "build and dump the readership graph")
    add("align", cmd_align, "single refinement run with per-step score dump")
    add("synth", cmd_synth, "generate a synthetic dataset")
    add("eval", cmd_eval, "repeated-split evaluation")

    rep = sub.add_parser("report", help="render or compare machine-readable reports")
    rep.add_argument("report", help="report.jsonl path")
    rep.add_argument("--compare", help="second report.jsonl for a paired test")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary between exit codes
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
