"""Cloze-style masked-LM tuner that turns articles into base veracity
predictions for the core propagation pipeline.

Articles are wrapped in a mask-bearing template; the model's distribution
at the mask over {"news", "rumor"} carries the prediction. Tuning uses a
decoupled loss over the full-vocabulary softmax, and emission writes the
prediction file format the core pipeline loads.
"""

from .data import ArticleRecord, InputError, read_articles, read_split
from .fixture import build_tiny_checkpoint, load_checkpoint
from .prompts import (
    ANSWER_WORDS,
    TEMPLATES,
    PromptTemplate,
    build_prompt,
    encode_prompt,
    get_template,
    validate_answer_tokens,
)
from .scoring import MaskScores, base_prediction_rows, emit_base_predictions, score_articles, score_mask
from .tuning import TuneConfig, TuneResult, decoupled_loss, epochs_for, training_loss, tune

__version__ = "0.1.0"
