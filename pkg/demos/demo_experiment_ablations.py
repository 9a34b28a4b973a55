"""Repeated-split evaluation with ablations and a paired significance test.

Twenty seeded runs per variant on one synthetic dataset: the full
pipeline, pseudo-labeling removed (-TPL), and graph removed (-G, which
collapses to the text-only baseline). Mirrors the report the `eval` and
`report` subcommands produce.
"""

from veraprop.experiment import ExperimentConfig, derive_seeds, run_experiment
from veraprop.stats import wilcoxon_signed_rank
from veraprop.synth import SynthConfig, generate

dataset = generate(SynthConfig(seed=42))
seeds = derive_seeds(7, 20)

variants = {
    "full": ExperimentConfig(n=16, seeds=seeds),
    "-TPL": ExperimentConfig(n=16, seeds=seeds, use_tpl=False),
    "-G": ExperimentConfig(n=16, seeds=seeds, use_graph=False),
}

reports = {}
for name, config in variants.items():
    reports[name] = run_experiment(config, dataset=dataset)
    rep = reports[name]
    print(f"{name:>5}: aligned {rep.mean_accuracy:6.2f}%  base {rep.mean_base_accuracy:6.2f}%")

full = [r.accuracy for r in reports["full"].runs]
for other in ("-TPL", "-G"):
    series = [r.accuracy for r in reports[other].runs]
    result = wilcoxon_signed_rank(full, series)
    print(f"\nfull vs {other}: wilcoxon statistic={result.statistic:.1f}"
          f" p={result.p_value:.2e} (n_effective={result.n_effective})")
