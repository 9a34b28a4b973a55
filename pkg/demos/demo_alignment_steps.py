"""Watching propagation correct a single bad base prediction.

Finds an article the text classifier got wrong but the refined pipeline
got right, then prints its raw scores after each propagation step
alongside its strongest graph neighbors. The per-step dump is the same
data the `align` subcommand writes to alignment_steps.csv.
"""

import numpy as np

from veraprop.align import build_confidence, predict_labels, propagate
from veraprop.experiment import make_split
from veraprop.graph import build_proximity_graph
from veraprop.predictions import predict, train_baseline
from veraprop.synth import SynthConfig, generate

dataset = generate(SynthConfig(seed=42))
split = make_split(dataset, n=16, seed=3)
labeled_idx = [dataset.index_of(aid) for aid in split.labeled_ids]

base = predict(train_baseline(dataset, split), dataset)
h = build_confidence(base, split, dataset, t_p=95.0)
graph = build_proximity_graph(dataset, t_u=5)
scores = propagate(graph, h, k=2, record_steps=True)

refined = predict_labels(scores, exclude=labeled_idx)
corrected = [
    i for i, cls in refined.items()
    if cls == dataset.labels[dataset.id_of(i)] != int(np.argmax(base[i]))
]
print(f"{len(corrected)} articles corrected by alignment")

target = corrected[0]
aid = dataset.id_of(target)
print(f"\narticle {aid} (gold class {dataset.labels[aid]}):")
for step, snap in enumerate(scores.snapshots):
    row = snap[target]
    verdict = "real" if row[0] >= row[1] else "fake"
    print(f"  step {step}: score_real={row[0]:.4f} score_fake={row[1]:.4f} -> {verdict}")

row = graph.a_t.getrow(target).tocoo()
neighbors = sorted(zip(row.data, row.col), reverse=True)[:5]
print("\nstrongest readership neighbors:")
for weight, j in neighbors:
    tag = {0: "soft", 1: "ground-truth", 2: "pseudo-label"}[int(h.row_tags[j])]
    print(f"  {dataset.id_of(j)} weight={weight:.4f} gold={dataset.labels[dataset.id_of(j)]}"
          f" row={np.round(h.values[j], 3)} [{tag}]")
