"""Base prediction matrices: file transport, answer-token softmax, and a
built-in few-shot text classifier.

The built-in classifier is a character n-gram softmax regression. It is a
deliberately lightweight stand-in for an external language-model scorer,
good enough to be non-trivial on real and synthetic text while keeping the
core pipeline dependency-free. Prediction files cover all N articles so
the alignment stage alone decides which rows ground truth overwrites.

Prediction file format (the contract with external predictors):
CSV with header ``article_id,p_real,p_fake``, probabilities as decimals
with at least 9 significant digits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .data import DataError, Dataset, SplitSpec

ROW_SUM_ATOL = 1e-9
RENORMALIZE_ATOL = 1e-6

PREDICTION_HEADER = ["article_id", "p_real", "p_fake"]


def validate_prediction_matrix(p: np.ndarray, atol: float = ROW_SUM_ATOL) -> np.ndarray:
    """Check row-stochasticity: entries in [0, 1], rows summing to 1."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2:
        raise DataError(f"prediction matrix must be 2-D, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise DataError("prediction matrix has non-finite entries")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise DataError("prediction matrix has entries outside [0, 1]")
    if p.shape[0] and np.abs(p.sum(axis=1) - 1.0).max() > atol:
        raise DataError(f"prediction rows must sum to 1 within {atol}")
    return p


def answer_softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax over answer-token scores.

    Shift-invariant by construction (the row maximum is subtracted before
    exponentiation), so it is safe on raw logits and on already-
    probabilistic scores alike.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if not np.isfinite(scores).all():
        raise DataError("answer scores must be finite")
    shifted = scores - scores.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def load_predictions(path, dataset: Dataset) -> np.ndarray:
    """Load a prediction file and re-order rows to the dataset dense index.

    Every dataset article must appear exactly once. Rows whose sum strays
    from 1 by at most 1e-6 are renormalized; anything worse is rejected
    rather than silently fixed, to surface upstream bugs.
    """
    rows: dict[str, tuple[float, float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PREDICTION_HEADER:
            raise DataError(f"{path}: expected header {','.join(PREDICTION_HEADER)!r}")
        for row in reader:
            if len(row) != 3:
                raise DataError(f"{path}:{reader.line_num}: expected 3 fields")
            aid, p_real, p_fake = row[0], float(row[1]), float(row[2])
            if aid in rows:
                raise DataError(f"{path}: duplicate prediction for article {aid!r}")
            rows[aid] = (p_real, p_fake)

    missing = sorted(set(dataset.article_ids) - set(rows))
    extra = sorted(set(rows) - set(dataset.article_ids))
    if missing:
        raise DataError(f"{path}: missing predictions for articles: {missing}")
    if extra:
        raise DataError(f"{path}: predictions for unknown articles: {extra}")

    p = np.array([rows[aid] for aid in dataset.article_ids])
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise DataError(f"{path}: probabilities outside [0, 1]")
    sums = p.sum(axis=1)
    off = np.abs(sums - 1.0)
    if p.shape[0] and off.max() > RENORMALIZE_ATOL:
        worst = dataset.article_ids[int(off.argmax())]
        raise DataError(
            f"{path}: row for {worst!r} sums to {sums[off.argmax()]!r},"
            f" beyond the {RENORMALIZE_ATOL} renormalization tolerance"
        )
    p = p / sums[:, None]
    return validate_prediction_matrix(p)


def save_predictions(p: np.ndarray, dataset: Dataset, path) -> None:
    p = validate_prediction_matrix(p)
    if p.shape != (dataset.n_articles, 2):
        raise DataError(f"expected shape ({dataset.n_articles}, 2), got {p.shape}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(PREDICTION_HEADER) + "\n")
        for aid, (p_real, p_fake) in zip(dataset.article_ids, p):
            fh.write(f"{aid},{p_real:.17g},{p_fake:.17g}\n")


# ---------------------------------------------------------------------------
# Built-in character n-gram classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaselineHyperparams:
    ngram_sizes: tuple[int, ...] = (2, 3)
    regularization: float = 1e-3
    iterations: int = 300


@dataclass(frozen=True)
class BaselineModel:
    vocabulary: dict[str, int] = field(repr=False)
    weights: np.ndarray = field(repr=False)  # (vocab+1) x C, last row is the bias
    hyperparams: BaselineHyperparams = BaselineHyperparams()
    loss_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[1]


def _ngram_counts(text: str, sizes: tuple[int, ...]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for size in sizes:
        for start in range(len(text) - size + 1):
            gram = text[start : start + size]
            counts[gram] = counts.get(gram, 0) + 1
    return counts


def _featurize(texts, vocabulary: dict[str, int], sizes: tuple[int, ...]) -> np.ndarray:
    """Row-normalized n-gram count features plus a constant bias column.

    Rows with no in-vocabulary n-grams stay all-zero (bias included) so the
    model can recognize no-evidence inputs downstream.
    """
    x = np.zeros((len(texts), len(vocabulary) + 1))
    for row, text in enumerate(texts):
        counts = _ngram_counts(text, sizes)
        for gram, count in counts.items():
            col = vocabulary.get(gram)
            if col is not None:
                x[row, col] = count
        norm = np.linalg.norm(x[row, :-1])
        if norm > 0:
            x[row, :-1] /= norm
            x[row, -1] = 1.0
    return x


def train_baseline(
    dataset: Dataset,
    split: SplitSpec,
    hyperparams: BaselineHyperparams = BaselineHyperparams(),
) -> BaselineModel:
    """Fit the n-gram classifier on the labeled split.

    Full-batch gradient descent from zero weights with a step size bounded
    by the loss curvature, so training is deterministic and the loss is
    non-increasing. Training rows are aggregated in sorted article-id order,
    making the fitted model independent of the split's ordering.
    """
    if split.n < 2:
        raise DataError(f"need at least 2 labeled articles, got {split.n}")
    y = split.labels
    if len(set(y.tolist())) < 2:
        raise DataError("labeled split must contain both classes")

    order = sorted(range(split.n), key=lambda i: split.labeled_ids[i])
    ids = [split.labeled_ids[i] for i in order]
    texts = [dataset.articles[dataset.index_of(aid)].text for aid in ids]
    empty = [aid for aid, text in zip(ids, texts) if not text]
    if empty:
        raise DataError(f"training articles with empty text: {empty}")
    one_hot = split.one_hot[order]

    grams: set[str] = set()
    for text in texts:
        grams.update(_ngram_counts(text, hyperparams.ngram_sizes))
    vocabulary = {gram: col for col, gram in enumerate(sorted(grams))}

    x = _featurize(texts, vocabulary, hyperparams.ngram_sizes)
    n, n_classes = one_hot.shape
    w = np.zeros((x.shape[1], n_classes))
    reg = hyperparams.regularization
    # Softmax cross-entropy curvature is at most 1/2 per sample, so this
    # step size guarantees monotone descent.
    lipschitz = 0.5 * np.square(x).sum() / n + reg
    step = 1.0 / lipschitz

    history = []
    for _ in range(hyperparams.iterations):
        probs = answer_softmax(x @ w)
        loss = -np.mean(np.log(np.sum(probs * one_hot, axis=1) + 1e-300))
        loss += 0.5 * reg * np.square(w[:-1]).sum()
        history.append(float(loss))
        grad = x.T @ (probs - one_hot) / n
        grad[:-1] += reg * w[:-1]
        w = w - step * grad

    return BaselineModel(
        vocabulary=vocabulary,
        weights=w,
        hyperparams=hyperparams,
        loss_history=tuple(history),
    )


def predict(model: BaselineModel, dataset: Dataset) -> np.ndarray:
    """Row-stochastic predictions over all N articles.

    Articles yielding no in-vocabulary features (empty text included) get
    an exact uniform row: no features means no evidence.
    """
    texts = [a.text for a in dataset.articles]
    x = _featurize(texts, model.vocabulary, model.hyperparams.ngram_sizes)
    p = answer_softmax(x @ model.weights)
    no_evidence = ~x.any(axis=1)
    p[no_evidence] = 1.0 / model.n_classes
    return validate_prediction_matrix(p)


def training_accuracy(model: BaselineModel, dataset: Dataset, split: SplitSpec) -> float:
    """Fraction of the labeled split the model classifies correctly."""
    p = predict(model, dataset)
    idx = [dataset.index_of(aid) for aid in split.labeled_ids]
    return float(np.mean(np.argmax(p[idx], axis=1) == split.labels))
