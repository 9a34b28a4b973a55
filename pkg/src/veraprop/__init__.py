"""Few-shot news veracity refinement via readership-graph label propagation.

The core pipeline turns per-article base veracity predictions plus
user-engagement records into refined predictions: a readership-similarity
graph is built from co-engagement, base predictions are enhanced with
ground truth and confident pseudo-labels, and the enhanced matrix is
propagated over the graph. A synthetic generator and a repeated-split
evaluation harness make the whole chain verifiable at desk scale.
"""

from .align import (
    AlignedScores,
    ConfidenceMatrix,
    build_confidence,
    inject_ground_truth,
    predict_labels,
    propagate,
    thresholded_pl,
)
from .data import (
    Article,
    DataError,
    Dataset,
    EngagementRecord,
    SplitSpec,
    build_dataset,
    load_articles,
    load_dataset,
    load_engagements,
    load_split,
    validate_split,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    accuracy,
    derive_seeds,
    make_split,
    run_experiment,
)
from .fna import Histogram, UserAffinity, compute_fna, fna_histogram
from .graph import (
    EngagementMatrix,
    ProximityGraph,
    build_proximity_graph,
    filter_active_users,
    normalize,
    project,
)
from .predictions import (
    BaselineHyperparams,
    BaselineModel,
    answer_softmax,
    load_predictions,
    predict,
    save_predictions,
    train_baseline,
)
from .stats import WilcoxonResult, wilcoxon_signed_rank
from .synth import SynthConfig, generate

__version__ = "0.1.0"
