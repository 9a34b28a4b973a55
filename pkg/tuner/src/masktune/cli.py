"""Command line: tune on the labeled split and emit base predictions.

Reads the core pipeline's article and split files, writes its prediction
file format. Exit codes: 0 success, 2 validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .data import InputError, read_articles, read_split
from .fixture import load_checkpoint
from .prompts import get_template, validate_answer_tokens
from .scoring import emit_base_predictions
from .tuning import TuneConfig, training_loss, tune


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="masktune", description=__doc__)
    parser.add_argument("--articles", required=True, help="article JSONL file")
    parser.add_argument("--split", help="split JSON file (required unless --zero-shot)")
    parser.add_argument("--model", required=True, help="masked-LM checkpoint directory")
    parser.add_argument("--template", default="P1",
                        help="P1, P2, P3, or a custom pattern with [MASK] and {text}")
    parser.add_argument("--n", type=int, help="expected split size (validated if given)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="prediction CSV to write")
    parser.add_argument("--zero-shot", action="store_true",
                        help="skip tuning and emit from the raw checkpoint")
    parser.add_argument("--epochs", type=int, help="override the n-based epoch rule")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--learning-rate", type=float, default=5e-5)
    parser.add_argument("--max-length", type=int, default=512)
    parser.add_argument("--logit-space", action="store_true",
                        help="softmax answer log-probabilities instead of probabilities")
    return parser


def run(args) -> int:
    template = get_template(args.template)
    articles = read_articles(args.articles)
    model, tokenizer = load_checkpoint(args.model)
    validate_answer_tokens(tokenizer)

    if not args.zero_shot:
        if not args.split:
            raise InputError("--split is required unless --zero-shot is set")
        split_ids, split_labels = read_split(args.split)
        if args.n is not None and len(split_ids) != args.n:
            raise InputError(f"split has {len(split_ids)} ids, expected --n {args.n}")
        config = TuneConfig(
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            max_length=args.max_length,
            seed=args.seed,
        )
        texts = {a.id: a.text for a in articles}
        before = training_loss(model, tokenizer, [texts[i] for i in split_ids],
                               split_labels, template, args.max_length)
        result = tune(model, tokenizer, articles, split_ids, split_labels, template, config)
        after = training_loss(model, tokenizer, [texts[i] for i in split_ids],
                              split_labels, template, args.max_length)
        print(f"tuned {result.steps} steps; training loss {before:.6f} -> {after:.6f}")

    emit_base_predictions(model, tokenizer, articles, template, args.out,
                          max_length=args.max_length, batch_size=args.batch_size,
                          logit_space=args.logit_space)
    print(f"wrote predictions for {len(articles)} articles to {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (InputError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary between exit codes
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
