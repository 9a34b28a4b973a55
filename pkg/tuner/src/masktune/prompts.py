"""Cloze prompt templates and tokenizer-aware encoding.

A template is a pattern with one mask slot and one article slot. The three
stock templates differ only in their prefix tokens; the answer-word
mapping ("news" is class 0/real, "rumor" is class 1/fake) is identical
across them.

Encoding budgets the sequence length against the article alone: the
template tokens (mask included) always survive truncation, the article
tail is what gets cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

MASK_SLOT = "[MASK]"
TEXT_SLOT = "{text}"

ANSWER_WORDS = ("news", "rumor")  # index == class: 0 real, 1 fake


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    pattern: str  # exactly one mask slot and one article slot

    def __post_init__(self):
        if self.pattern.count(MASK_SLOT) != 1:
            raise ValueError(f"pattern must contain exactly one {MASK_SLOT}: {self.pattern!r}")
        if self.pattern.count(TEXT_SLOT) != 1:
            raise ValueError(f"pattern must contain exactly one {TEXT_SLOT}: {self.pattern!r}")


TEMPLATES = {
    "P1": PromptTemplate("P1", "[MASK]: {text}"),
    "P2": PromptTemplate("P2", "Contains [MASK]: {text}"),
    "P3": PromptTemplate("P3", "Article with [MASK]: {text}"),
}


def get_template(spec: str) -> PromptTemplate:
    """Stock template by id, or a custom pattern string."""
    if spec in TEMPLATES:
        return TEMPLATES[spec]
    return PromptTemplate("custom", spec)


def build_prompt(text: str, template: PromptTemplate) -> str:
    """Plain-text prompt with the mask slot left as the literal [MASK]."""
    if not text:
        raise ValueError("article text is empty; nothing to prompt about")
    return template.pattern.replace(TEXT_SLOT, text)


def validate_answer_tokens(tokenizer, words=ANSWER_WORDS) -> list[int]:
    """Each answer word must be a single in-vocabulary token; no fallback
    (splitting an answer into word pieces would make its mask probability
    undefined)."""
    ids = []
    for word in words:
        pieces = tokenizer.tokenize(word)
        token_id = tokenizer.convert_tokens_to_ids(word)
        if len(pieces) != 1 or token_id == tokenizer.unk_token_id:
            raise ValueError(
                f"answer word {word!r} is not a single vocabulary token"
                f" (tokenizes to {pieces})"
            )
        ids.append(token_id)
    return ids


def encode_prompt(tokenizer, text: str, template: PromptTemplate, max_length: int = 512):
    """Token ids for one prompt, article tail truncated to the budget.

    Returns (input_ids list, mask_position). The template's tokens are
    encoded separately from the article so truncation can never eat the
    mask or the task tokens.
    """
    if not text:
        raise ValueError("article text is empty; nothing to prompt about")
    prefix, suffix = template.pattern.split(TEXT_SLOT)
    prefix_ids = tokenizer(prefix.replace(MASK_SLOT, tokenizer.mask_token),
                           add_special_tokens=False)["input_ids"]
    suffix_ids = tokenizer(suffix.replace(MASK_SLOT, tokenizer.mask_token),
                           add_special_tokens=False)["input_ids"]
    budget = max_length - len(prefix_ids) - len(suffix_ids) - 2  # [CLS] and [SEP]
    if budget < 1:
        raise ValueError(f"template leaves no room for the article at max_length={max_length}")
    article_ids = tokenizer(text, add_special_tokens=False)["input_ids"][:budget]

    ids = [tokenizer.cls_token_id, *prefix_ids, *article_ids, *suffix_ids, tokenizer.sep_token_id]
    mask_positions = [i for i, t in enumerate(ids) if t == tokenizer.mask_token_id]
    if len(mask_positions) != 1:
        raise ValueError(f"prompt must contain exactly one mask token, found {len(mask_positions)}")
    return ids, mask_positions[0]


def encode_batch(tokenizer, texts, template: PromptTemplate, max_length: int = 512):
    """Padded batch encoding. Returns (input_ids, attention_mask,
    mask_positions) tensors."""
    encoded = [encode_prompt(tokenizer, text, template, max_length) for text in texts]
    width = max(len(ids) for ids, _ in encoded)
    pad = tokenizer.pad_token_id
    input_ids = torch.full((len(encoded), width), pad, dtype=torch.long)
    attention = torch.zeros((len(encoded), width), dtype=torch.long)
    positions = torch.zeros(len(encoded), dtype=torch.long)
    for row, (ids, mask_pos) in enumerate(encoded):
        input_ids[row, : len(ids)] = torch.tensor(ids)
        attention[row, : len(ids)] = 1
        positions[row] = mask_pos
    return input_ids, attention, positions
