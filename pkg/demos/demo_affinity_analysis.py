"""How user veracity consistency shows up in the affinity histogram.

Generates synthetic engagement data at several consistency levels and
prints a text histogram of per-user fake-news affinity. High consistency
piles active users onto the extremes (they read one class almost
exclusively); a coin-flip preference concentrates them in the middle.
"""

from veraprop.fna import compute_fna, fna_histogram
from veraprop.synth import SynthConfig, generate

T_U = 5
BINS = 10

for consistency in (1.0, 0.95, 0.75, 0.5):
    dataset = generate(SynthConfig(
        n_articles=400, n_users=1200, consistency=consistency,
        engagements_per_user=(3, 12), seed=19,
    ))
    table = compute_fna(dataset, t_u=T_U)
    hist = fna_histogram(table, bins=BINS)
    print(f"\nconsistency {consistency}: {len(table)} active users (t_u={T_U})")
    peak = hist.counts.max()
    for lo, hi, count in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
        bar = "#" * int(round(40 * count / peak)) if peak else ""
        print(f"  [{lo:.1f},{hi:.1f}{']' if hi == 1.0 else ')'} {count:5d} {bar}")
