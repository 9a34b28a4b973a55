"""Synthetic dataset generator with controllable user veracity consistency.

Each user draws a preferred class uniformly at random. Every engagement
then targets a uniformly chosen not-yet-engaged article of the preferred
class with probability ``consistency``, otherwise of the opposite class.
At consistency 1.0 each user's readership is single-class, so all active
users sit at affinity 0 or 1; at 0.5 user preference carries no signal and
affinity concentrates around 1/2.

Article texts are bags of tokens drawn from class-specific vocabularies,
with ``class_token_overlap`` routing that fraction of tokens to a shared
vocabulary. Overlap 0 makes the classes textually disjoint (a linear
classifier can be perfect); overlap 1 makes the text uninformative.

Generation is single-threaded from one seeded stream: same config and
seed, byte-identical dataset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Article, Dataset, EngagementRecord, build_dataset


@dataclass(frozen=True)
class SynthConfig:
    n_articles: int = 600
    n_users: int = 2000
    consistency: float = 0.95
    engagements_per_user: tuple[int, int] = (3, 12)  # inclusive uniform bounds
    reposts_per_engagement: tuple[int, int] = (1, 3)
    class_token_overlap: float = 0.78
    seed: int = 0
    tokens_per_article: int = 40
    vocab_size: int = 80  # tokens per class-exclusive vocabulary and per shared pool

    def validate(self) -> None:
        if not 0.5 <= self.consistency <= 1.0:
            raise ValueError(f"consistency must be in [0.5, 1], got {self.consistency}")
        if not 0.0 <= self.class_token_overlap <= 1.0:
            raise ValueError(f"class_token_overlap must be in [0, 1], got {self.class_token_overlap}")
        for name in ("n_articles", "n_users", "tokens_per_article", "vocab_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("engagements_per_user", "reposts_per_engagement"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ValueError(f"{name} bounds must satisfy 1 <= min <= max, got ({lo}, {hi})")
        smallest_class = self.n_articles // 2
        if self.engagements_per_user[1] > smallest_class:
            raise ValueError(
                f"engagements_per_user max {self.engagements_per_user[1]} exceeds the"
                f" smaller class size {smallest_class}; a user could exhaust a class"
            )


_LETTERS = np.array(list("abcdefghijklmnopqrstuvwxyz"))


def _make_vocab(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    """Random letter tokens, disjoint from every other pool.

    Class membership must not be readable off a token's surface form
    (no class prefix), otherwise a character-level model can classify
    from a single token and the overlap knob loses its grip.
    """
    vocab: list[str] = []
    while len(vocab) < count:
        token = "".join(rng.choice(_LETTERS, size=6))
        if token not in taken:
            taken.add(token)
            vocab.append(token)
    return vocab


def _article_text(rng: np.random.Generator, cls: int, vocabs, config: SynthConfig) -> str:
    class_vocab, shared_vocab = vocabs[cls], vocabs["shared"]
    tokens = []
    for _ in range(config.tokens_per_article):
        pool = shared_vocab if rng.random() < config.class_token_overlap else class_vocab
        tokens.append(pool[rng.integers(len(pool))])
    return " ".join(tokens)


def generate(config: SynthConfig) -> Dataset:
    """Generate a labeled, engagement-bearing dataset per the config."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    width = len(str(config.n_articles - 1))

    taken: set[str] = set()
    vocabs = {
        0: _make_vocab(rng, config.vocab_size, taken),
        1: _make_vocab(rng, config.vocab_size, taken),
        "shared": _make_vocab(rng, config.vocab_size, taken),
    }

    n_real = (config.n_articles + 1) // 2  # odd sizes favor the first-built class
    articles, labels = [], {}
    by_class: dict[int, list[str]] = {0: [], 1: []}
    for i in range(config.n_articles):
        cls = 0 if i < n_real else 1
        aid = f"a{i:0{width}d}"
        articles.append(Article(id=aid, text=_article_text(rng, cls, vocabs, config)))
        labels[aid] = cls
        by_class[cls].append(aid)

    e_lo, e_hi = config.engagements_per_user
    r_lo, r_hi = config.reposts_per_engagement
    user_width = len(str(config.n_users - 1))
    engagements = []
    for u in range(config.n_users):
        user_id = f"u{u:0{user_width}d}"
        preferred = int(rng.integers(2))
        pools = {cls: list(ids) for cls, ids in by_class.items()}
        for _ in range(int(rng.integers(e_lo, e_hi + 1))):
            cls = preferred if rng.random() < config.consistency else 1 - preferred
            pool = pools[cls]
            pick = int(rng.integers(len(pool)))
            pool[pick], pool[-1] = pool[-1], pool[pick]
            aid = pool.pop()
            engagements.append(
                EngagementRecord(user_id, aid, int(rng.integers(r_lo, r_hi + 1)))
            )

    return build_dataset(articles, labels, engagements)
