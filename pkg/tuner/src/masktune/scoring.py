"""Mask scoring and base-prediction emission.

The model's logits at the mask position are softmaxed over the full
vocabulary, and the answer-token entries of that distribution are the
per-class scores. Emission applies one more softmax over the two answer
scores and writes the core pipeline's prediction file format.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .prompts import PromptTemplate, encode_batch, validate_answer_tokens


@dataclass(frozen=True)
class MaskScores:
    vocab_probs: np.ndarray  # full-vocabulary distribution at the mask
    answer_probs: np.ndarray  # entries of vocab_probs at the answer tokens


def score_mask(model, tokenizer, prompt: str, max_length: int = 512) -> MaskScores:
    """Score one ready-made prompt string.

    The prompt must contain exactly one mask token after tokenization.
    """
    encoding = tokenizer(prompt, truncation=True, max_length=max_length)
    ids = encoding["input_ids"]
    positions = [i for i, t in enumerate(ids) if t == tokenizer.mask_token_id]
    if len(positions) != 1:
        raise ValueError(f"prompt must contain exactly one mask token, found {len(positions)}")
    answer_ids = validate_answer_tokens(tokenizer)

    model.eval()
    with torch.no_grad():
        logits = model(input_ids=torch.tensor([ids])).logits[0, positions[0]]
        vocab_probs = torch.softmax(logits.double(), dim=-1).numpy()
    return MaskScores(vocab_probs=vocab_probs, answer_probs=vocab_probs[answer_ids])


def score_articles(
    model,
    tokenizer,
    texts,
    template: PromptTemplate,
    max_length: int = 512,
    batch_size: int = 16,
) -> np.ndarray:
    """Answer-token probabilities for every text, shape (N, 2)."""
    answer_ids = validate_answer_tokens(tokenizer)
    model.eval()
    rows = []
    with torch.no_grad():
        for start in range(0, len(texts), batch_size):
            chunk = texts[start : start + batch_size]
            input_ids, attention, positions = encode_batch(tokenizer, chunk, template, max_length)
            logits = model(input_ids=input_ids, attention_mask=attention).logits
            at_mask = logits[torch.arange(len(chunk)), positions]
            vocab_probs = torch.softmax(at_mask.double(), dim=-1)
            rows.append(vocab_probs[:, answer_ids].numpy())
    return np.concatenate(rows) if rows else np.zeros((0, len(answer_ids)))


def answer_softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax over the answer scores (mirrors the core's)."""
    scores = np.asarray(scores, dtype=np.float64)
    shifted = scores - scores.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def base_prediction_rows(answer_probs: np.ndarray, logit_space: bool = False) -> np.ndarray:
    """Answer probabilities -> row-stochastic base predictions.

    Default is a softmax over the probabilities themselves, which
    compresses rows toward uniform. ``logit_space`` instead softmaxes the
    log-probabilities, i.e. renormalizes the two answer masses; exposed as
    a documented variant.
    """
    answer_probs = np.asarray(answer_probs, dtype=np.float64)
    if logit_space:
        return answer_softmax(np.log(np.clip(answer_probs, 1e-300, None)))
    return answer_softmax(answer_probs)


def emit_base_predictions(
    model,
    tokenizer,
    articles,
    template: PromptTemplate,
    out_path,
    max_length: int = 512,
    batch_size: int = 16,
    logit_space: bool = False,
) -> np.ndarray:
    """Write the prediction file the core pipeline consumes.

    One row per article, header ``article_id,p_real,p_fake``, 17
    significant digits. Returns the emitted matrix.
    """
    texts = [a.text for a in articles]
    answer_probs = score_articles(model, tokenizer, texts, template, max_length, batch_size)
    rows = base_prediction_rows(answer_probs, logit_space=logit_space)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("article_id,p_real,p_fake\n")
        for article, row in zip(articles, rows):
            fh.write(f"{article.id},{row[0]:.17g},{row[1]:.17g}\n")
    return rows
