import numpy as np
import pytest

from veraprop.data import save_articles, save_engagements
from veraprop.fna import compute_fna
from veraprop.graph import build_proximity_graph
from veraprop.synth import SynthConfig, generate


class TestConfigValidation:
    def test_consistency_range(self):
        with pytest.raises(ValueError, match="consistency"):
            generate(SynthConfig(consistency=0.3))
        with pytest.raises(ValueError, match="consistency"):
            generate(SynthConfig(consistency=1.2))

    def test_overlap_range(self):
        with pytest.raises(ValueError, match="overlap"):
            generate(SynthConfig(class_token_overlap=-0.1))

    def test_engagements_cannot_exhaust_a_class(self):
        with pytest.raises(ValueError, match="exhaust"):
            generate(SynthConfig(n_articles=10, engagements_per_user=(1, 6)))

    def test_bounds_must_be_ordered(self):
        with pytest.raises(ValueError, match="bounds"):
            generate(SynthConfig(engagements_per_user=(5, 2)))


class TestGenerate:
    def test_class_balance_exact(self):
        ds = generate(SynthConfig(n_articles=100, n_users=50, seed=1))
        labels = np.array([ds.labels[aid] for aid in ds.article_ids])
        assert (labels == 0).sum() == 50
        assert (labels == 1).sum() == 50

    def test_odd_count_favors_first_class(self):
        ds = generate(SynthConfig(n_articles=11, n_users=10,
                                  engagements_per_user=(1, 3), seed=1))
        labels = list(ds.labels.values())
        assert labels.count(0) == 6 and labels.count(1) == 5

    def test_engagement_counts_within_bounds(self):
        ds = generate(SynthConfig(n_articles=60, n_users=80,
                                  engagements_per_user=(2, 7), seed=2))
        per_user = {}
        for rec in ds.engagements:
            per_user[rec.user_id] = per_user.get(rec.user_id, 0) + 1
        assert len(per_user) == 80
        assert all(2 <= count <= 7 for count in per_user.values())

    def test_repost_counts_within_bounds(self):
        ds = generate(SynthConfig(n_articles=60, n_users=40,
                                  reposts_per_engagement=(2, 4), seed=3))
        assert all(2 <= rec.reposts <= 4 for rec in ds.engagements)

    def test_same_seed_is_byte_identical(self, tmp_path):
        config = SynthConfig(n_articles=50, n_users=60, seed=77)
        for run in ("one", "two"):
            ds = generate(config)
            save_articles(ds.articles, tmp_path / f"{run}.jsonl", ds.labels)
            save_engagements(ds.engagements, tmp_path / f"{run}.csv")
        assert (tmp_path / "one.jsonl").read_bytes() == (tmp_path / "two.jsonl").read_bytes()
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()

    def test_different_seeds_differ(self):
        a = generate(SynthConfig(n_articles=50, n_users=60, seed=1))
        b = generate(SynthConfig(n_articles=50, n_users=60, seed=2))
        assert a.engagements != b.engagements

    def test_perfect_consistency_splits_users_by_class(self):
        ds = generate(SynthConfig(n_articles=40, n_users=100, consistency=1.0, seed=4))
        for ua in compute_fna(ds, t_u=1).values():
            assert ua.fna in (0.0, 1.0)

    def test_perfect_consistency_has_no_cross_class_edges(self):
        ds = generate(SynthConfig(n_articles=40, n_users=100, consistency=1.0, seed=5))
        g = build_proximity_graph(ds, t_u=1)
        coo = g.a_t.tocoo()
        for i, j in zip(coo.row, coo.col):
            if i != j:
                assert ds.labels[ds.id_of(i)] == ds.labels[ds.id_of(j)]

    def test_coin_flip_consistency_concentrates_mid_range(self):
        # With no preference signal, a heavy user's affinity is a
        # Binomial(e, 1/2) mean, which rarely strays past 0.1 or 0.9.
        ds = generate(SynthConfig(n_articles=200, n_users=400, consistency=0.5,
                                  engagements_per_user=(8, 16), seed=6))
        table = compute_fna(ds, t_u=8)
        scores = np.array([ua.fna for ua in table.values()])
        extreme = ((scores <= 0.1) | (scores >= 0.9)).sum()
        assert extreme < len(scores) / 4

    def test_texts_use_configured_token_budget(self):
        ds = generate(SynthConfig(n_articles=20, n_users=10, tokens_per_article=15,
                                  engagements_per_user=(1, 5), seed=7))
        assert all(len(a.text.split()) == 15 for a in ds.articles)
