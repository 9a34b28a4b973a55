"""Tiny self-contained masked-LM checkpoint for offline runs and tests.

Builds a WordPiece tokenizer whose vocabulary contains the answer words
as single tokens, plus a small randomly initialized BERT, and saves both
in standard checkpoint layout so ``load_checkpoint`` (and anything else
speaking HuggingFace) can read it. Dropout is zeroed so training
gradients match the evaluation loss exactly, which keeps short tuning
runs strictly monotone and hardware-reproducible.
"""

from __future__ import annotations

import numpy as np
import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from tokenizers.processors import TemplateProcessing
from transformers import AutoModelForMaskedLM, AutoTokenizer, BertConfig, BertForMaskedLM
from transformers import PreTrainedTokenizerFast
from transformers.utils import logging as hf_logging

hf_logging.disable_progress_bar()

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
TEMPLATE_WORDS = ["contains", "article", "with", ":", "the", "a"]


def _filler_words(count: int, seed: int) -> list[str]:
    rng = np.random.default_rng(seed)
    letters = np.array(list("abcdefghijklmnopqrstuvwxyz"))
    words: list[str] = []
    seen = set(SPECIALS + TEMPLATE_WORDS + ["news", "rumor"])
    while len(words) < count:
        word = "".join(rng.choice(letters, size=5))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def build_tokenizer(extra_words=(), seed: int = 0, filler: int = 120) -> PreTrainedTokenizerFast:
    vocab_list = [*SPECIALS, "news", "rumor", *TEMPLATE_WORDS,
                  *extra_words, *_filler_words(filler, seed)]
    vocab = {token: idx for idx, token in enumerate(vocab_list)}
    backend = Tokenizer(models.WordPiece(vocab=vocab, unk_token="[UNK]"))
    backend.normalizer = normalizers.BertNormalizer(lowercase=True)
    backend.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    backend.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=backend,
        unk_token="[UNK]", pad_token="[PAD]", cls_token="[CLS]",
        sep_token="[SEP]", mask_token="[MASK]",
    )


def build_tiny_checkpoint(directory, seed: int = 0, extra_words=()) -> None:
    """Write a loadable checkpoint directory (model + tokenizer)."""
    tokenizer = build_tokenizer(extra_words=extra_words, seed=seed)
    config = BertConfig(
        vocab_size=len(tokenizer.get_vocab()),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=512,
        hidden_dropout_prob=0.0,
        attention_probs_dropout_prob=0.0,
    )
    torch.manual_seed(seed)
    model = BertForMaskedLM(config)
    model.save_pretrained(directory)
    tokenizer.save_pretrained(directory)


def load_checkpoint(directory):
    """(model, tokenizer) from a checkpoint directory; works offline."""
    tokenizer = AutoTokenizer.from_pretrained(directory, local_files_only=True)
    model = AutoModelForMaskedLM.from_pretrained(directory, local_files_only=True)
    model.eval()
    return model, tokenizer
