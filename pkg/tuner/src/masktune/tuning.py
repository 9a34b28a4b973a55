"""Decoupled-loss tuning of a masked LM on the labeled prompts.

The loss pushes the full-vocabulary probability of the correct answer
token toward 1 and the incorrect one toward 0 — because both terms act on
the full-vocabulary softmax, mass on non-answer tokens is penalized too,
unlike a two-logit cross entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

from .prompts import PromptTemplate, encode_batch, validate_answer_tokens

CLAMP = 1e-12


@dataclass(frozen=True)
class TuneConfig:
    epochs: int | None = None  # None: 3 up to n=32, 5 beyond
    batch_size: int = 16
    learning_rate: float = 5e-5
    max_length: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.epochs is not None and self.epochs < 1:
            raise ValueError(f"epochs must be positive, got {self.epochs}")
        if self.batch_size < 1 or self.learning_rate <= 0 or self.max_length < 4:
            raise ValueError("batch_size, learning_rate, and max_length must be positive")


def epochs_for(n: int) -> int:
    return 3 if n <= 32 else 5


def decoupled_loss(answer_probs: torch.Tensor) -> torch.Tensor:
    """Mean over the batch of BCE(P_correct, 1) + BCE(P_incorrect, 0).

    ``answer_probs`` is (batch, 2) with the correct answer's probability
    in column 0 and the incorrect one in column 1. Computed in float64:
    the 1e-12 clamp that keeps the logs finite is below float32
    resolution around 1.
    """
    probs = torch.clamp(answer_probs.double(), CLAMP, 1.0 - CLAMP)
    return (-torch.log(probs[:, 0]) - torch.log(1.0 - probs[:, 1])).mean()


@dataclass
class TuneResult:
    steps: int
    loss_history: list[float]  # one entry per optimizer step


def _batch_answer_probs(model, tokenizer, texts, labels, template, max_length, answer_ids):
    input_ids, attention, positions = encode_batch(tokenizer, texts, template, max_length)
    logits = model(input_ids=input_ids, attention_mask=attention).logits
    at_mask = logits[torch.arange(len(texts)), positions]
    vocab_probs = torch.softmax(at_mask, dim=-1)
    answers = vocab_probs[:, answer_ids]  # (batch, 2) in class order
    labels_t = torch.tensor(labels, dtype=torch.long)
    correct = answers[torch.arange(len(texts)), labels_t]
    incorrect = answers[torch.arange(len(texts)), 1 - labels_t]
    return torch.stack([correct, incorrect], dim=1)


def training_loss(model, tokenizer, texts, labels, template: PromptTemplate,
                  max_length: int = 512) -> float:
    """Decoupled loss over the whole labeled set, evaluation mode."""
    answer_ids = validate_answer_tokens(tokenizer)
    model.eval()
    with torch.no_grad():
        pairs = _batch_answer_probs(model, tokenizer, texts, labels, template,
                                    max_length, answer_ids)
        return float(decoupled_loss(pairs))


def tune(model, tokenizer, articles, split_ids, split_labels,
         template: PromptTemplate, config: TuneConfig = TuneConfig()) -> TuneResult:
    """Tune the model in place on the labeled prompts only.

    Batches follow the split order with no shuffling, so the step count is
    exactly ceil(n / batch_size) * epochs and the loss trajectory is
    reproducible for a fixed seed.
    """
    if not split_ids:
        raise ValueError("empty split; nothing to tune on")
    by_id = {a.id: a for a in articles}
    missing = [aid for aid in split_ids if aid not in by_id]
    if missing:
        raise ValueError(f"split references unknown article ids: {missing}")
    texts = [by_id[aid].text for aid in split_ids]
    answer_ids = validate_answer_tokens(tokenizer)

    torch.manual_seed(config.seed)
    epochs = config.epochs if config.epochs is not None else epochs_for(len(split_ids))
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)

    history: list[float] = []
    model.train()
    for _ in range(epochs):
        for start in range(0, len(texts), config.batch_size):
            batch_texts = texts[start : start + config.batch_size]
            batch_labels = split_labels[start : start + config.batch_size]
            pairs = _batch_answer_probs(model, tokenizer, batch_texts, batch_labels,
                                        template, config.max_length, answer_ids)
            loss = decoupled_loss(pairs)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            history.append(float(loss.detach()))
    model.eval()

    expected = math.ceil(len(texts) / config.batch_size) * epochs
    assert len(history) == expected
    return TuneResult(steps=len(history), loss_history=history)
