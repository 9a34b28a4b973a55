import numpy as np
import pytest
from scipy import sparse

from veraprop.align import (
    GROUND_TRUTH,
    PSEUDO_LABEL,
    SOFT,
    AlignedScores,
    ambiguous_rows,
    build_confidence,
    inject_ground_truth,
    predict_labels,
    propagate,
    save_alignment_csv,
    selection_rank,
    thresholded_pl,
)
from veraprop.data import Article, DataError, SplitSpec, build_dataset, make_one_hot
from veraprop.graph import ProximityGraph, normalize


def random_stochastic(rng, n, c=2):
    p = rng.random((n, c)) + 1e-6
    return p / p.sum(axis=1, keepdims=True)


def graph_from_dense(a_t):
    a_t = sparse.csr_matrix(np.asarray(a_t, dtype=float))
    return ProximityGraph(a_t=a_t, degrees=np.asarray(a_t.sum(axis=1)).ravel(),
                          t_u=None, diagonal_policy="keep", isolated_policy="self-loop")


def labeled_dataset(n):
    labels = {f"a{i:03d}": i % 2 for i in range(n)}
    return build_dataset([Article(aid, "") for aid in labels], labels)


class TestInjectGroundTruth:
    def test_labeled_fake_row_becomes_one_hot(self):
        ds = labeled_dataset(3)
        p = np.array([[0.9, 0.1], [0.2, 0.8], [0.6, 0.4]])
        split = SplitSpec(("a001",), make_one_hot([1]))
        out = inject_ground_truth(p, split, ds.id_to_index)
        np.testing.assert_array_equal(out[1], [0.0, 1.0])
        np.testing.assert_array_equal(out[0], p[0])
        np.testing.assert_array_equal(out[2], p[2])

    def test_empty_split_is_identity(self):
        p = np.array([[0.9, 0.1], [0.2, 0.8]])
        out = inject_ground_truth(p, SplitSpec((), make_one_hot([])), {"a": 0, "b": 1})
        np.testing.assert_array_equal(out, p)

    def test_input_not_mutated(self):
        ds = labeled_dataset(2)
        p = np.array([[0.9, 0.1], [0.2, 0.8]])
        inject_ground_truth(p, SplitSpec(("a000",), make_one_hot([0])), ds.id_to_index)
        np.testing.assert_array_equal(p, [[0.9, 0.1], [0.2, 0.8]])

    def test_unknown_id_rejected(self):
        with pytest.raises(DataError, match="ghost"):
            inject_ground_truth(np.eye(2), SplitSpec(("ghost",), make_one_hot([0])), {"a": 0})

    def test_sixteen_rows_tagged_ground_truth(self):
        ds = labeled_dataset(100)
        rng = np.random.default_rng(0)
        ids = tuple(f"a{i:03d}" for i in range(16))
        split = SplitSpec(ids, make_one_hot([ds.labels[a] for a in ids]))
        h = build_confidence(random_stochastic(rng, 100), split, ds)
        assert (h.row_tags == GROUND_TRUTH).sum() == 16


class TestThresholdedPL:
    def test_worked_example(self):
        rows = np.array([[0.9, 0.1], [0.6, 0.4], [0.3, 0.7], [0.55, 0.45]])
        out, threshold = thresholded_pl(rows, 75)
        assert threshold == 0.7
        np.testing.assert_array_equal(out, [[1, 0], [0.6, 0.4], [0, 1], [0.55, 0.45]])

    def test_top_percentile_selects_single_max(self):
        rows = np.array([[0.9, 0.1], [0.6, 0.4], [0.3, 0.7], [0.55, 0.45]])
        out, threshold = thresholded_pl(rows, 100)
        assert threshold == 0.9
        np.testing.assert_array_equal(out[0], [1, 0])
        np.testing.assert_array_equal(out[1:], rows[1:])

    def test_uniform_rows_all_harden_to_class_zero(self):
        rows = np.full((5, 2), 0.5)
        out, threshold = thresholded_pl(rows, 95)
        assert threshold == 0.5
        np.testing.assert_array_equal(out, np.tile([1.0, 0.0], (5, 1)))

    def test_out_of_range_percentile(self):
        rows = np.array([[0.6, 0.4]])
        for t_p in (0, -1, 100.5):
            with pytest.raises(ValueError, match="t_p"):
                thresholded_pl(rows, t_p)

    def test_empty_input_rejected(self):
        with pytest.raises(DataError, match="at least one"):
            thresholded_pl(np.zeros((0, 2)), 95)

    def test_never_inverts_argmax(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = random_stochastic(rng, int(rng.integers(1, 40)))
            out, _ = thresholded_pl(p, float(rng.uniform(1, 100)))
            np.testing.assert_array_equal(np.argmax(out, axis=1), np.argmax(p, axis=1))

    def test_selection_matches_sort_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            m = int(rng.integers(1, 60))
            p = random_stochastic(rng, m)
            t_p = float(rng.uniform(1, 100))
            out, threshold = thresholded_pl(p, t_p)
            conf = p.max(axis=1)
            rank = int(np.ceil(t_p * m / 100))
            expected_threshold = np.sort(conf)[rank - 1]
            assert threshold == expected_threshold
            selected = np.flatnonzero(conf >= expected_threshold)
            expected_hard = np.zeros((selected.size, 2))
            expected_hard[np.arange(selected.size), np.argmax(p[selected], axis=1)] = 1.0
            np.testing.assert_array_equal(out[selected], expected_hard)
            untouched = np.setdiff1d(np.arange(m), selected)
            np.testing.assert_array_equal(out[untouched], p[untouched])

    def test_selection_monotone_in_percentile(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = random_stochastic(rng, 30)
            conf = p.max(axis=1)
            previous = None
            for t_p in (20, 40, 60, 80, 95, 100):
                _, threshold = thresholded_pl(p, t_p)
                selected = set(np.flatnonzero(conf >= threshold))
                if previous is not None:
                    assert selected <= previous
                previous = selected

    def test_rank_is_exact_at_integer_boundaries(self):
        # 10% of 10 rows must select rank 1, not 2 (float ceil pitfall)
        assert selection_rank(10.0, 10) == 1
        assert selection_rank(75.0, 4) == 3
        assert selection_rank(100.0, 7) == 7
        assert selection_rank(95.0, 584) == 555


class TestPropagate:
    def test_zero_steps_is_identity(self):
        rng = np.random.default_rng(4)
        h = random_stochastic(rng, 6)
        g = graph_from_dense(np.eye(6) * 0.5)
        out = propagate(g, h, 0)
        np.testing.assert_array_equal(out.values, h)

    def test_two_node_swap(self):
        g = graph_from_dense([[0.0, 1.0], [1.0, 0.0]])
        out = propagate(g, np.eye(2), 1)
        np.testing.assert_array_equal(out.values, [[0.0, 1.0], [1.0, 0.0]])

    def test_matches_dense_power_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 50))
            raw = rng.random((n, n)) * (rng.random((n, n)) < 0.3)
            g = normalize(raw + raw.T)
            h = random_stochastic(rng, n)
            for k in range(5):
                expected = np.linalg.matrix_power(g.a_t.toarray(), k) @ h
                out = propagate(g, h, k)
                np.testing.assert_allclose(out.values, expected, atol=1e-9)

    def test_linearity(self):
        rng = np.random.default_rng(6)
        raw = rng.random((12, 12)) * (rng.random((12, 12)) < 0.4)
        g = normalize(raw + raw.T)
        h1, h2 = rng.random((12, 2)), rng.random((12, 2))
        a, b = 0.3, 1.7
        combined = propagate(g, a * h1 + b * h2, 3).values
        separate = a * propagate(g, h1, 3).values + b * propagate(g, h2, 3).values
        np.testing.assert_allclose(combined, separate, atol=1e-9)

    def test_isolated_rows_preserved(self):
        a_n = np.zeros((4, 4))
        a_n[:2, :2] = [[2.0, 1.0], [1.0, 2.0]]
        g = normalize(a_n)  # rows 2,3 isolated -> identity rows
        rng = np.random.default_rng(7)
        h = random_stochastic(rng, 4)
        for k in range(4):
            out = propagate(g, h, k)
            np.testing.assert_array_equal(out.values[2:], h[2:])

    def test_identity_graph_fixed_point(self):
        g = graph_from_dense(np.eye(5))
        rng = np.random.default_rng(8)
        h = random_stochastic(rng, 5)
        np.testing.assert_array_equal(propagate(g, h, 2).values, h)

    def test_dimension_mismatch_rejected(self):
        g = graph_from_dense(np.eye(3))
        with pytest.raises(DataError, match="match"):
            propagate(g, np.zeros((4, 2)), 1)

    def test_snapshots_record_every_step(self):
        rng = np.random.default_rng(9)
        raw = rng.random((6, 6))
        g = normalize(raw + raw.T)
        h = random_stochastic(rng, 6)
        out = propagate(g, h, 3, record_steps=True)
        assert len(out.snapshots) == 4
        np.testing.assert_array_equal(out.snapshots[0], h)
        np.testing.assert_array_equal(out.snapshots[-1], out.values)
        for step in range(1, 4):
            np.testing.assert_allclose(out.snapshots[step],
                                       g.a_t.toarray() @ out.snapshots[step - 1], atol=1e-12)


class TestPredictLabels:
    def test_corrected_scores_pick_fake(self):
        labels = predict_labels(np.array([[0.148, 0.199]]))
        assert labels == {0: 1}

    def test_tie_breaks_to_real(self):
        assert predict_labels(np.array([[0.3, 0.3]])) == {0: 0}

    def test_zero_row_flagged_and_assigned_real(self):
        scores = np.array([[0.0, 0.0], [0.2, 0.8]])
        assert predict_labels(scores)[0] == 0
        assert ambiguous_rows(scores).tolist() == [0]

    def test_excluded_rows_missing_from_result(self):
        scores = np.array([[0.9, 0.1], [0.2, 0.8], [0.6, 0.4]])
        labels = predict_labels(scores, exclude=[1])
        assert sorted(labels) == [0, 2]


class TestBuildConfidence:
    def test_tags_and_threshold(self):
        ds = labeled_dataset(10)
        p = np.tile([0.6, 0.4], (10, 1))
        p[5] = [0.99, 0.01]
        split = SplitSpec(("a000", "a001"), make_one_hot([0, 1]))
        h = build_confidence(p, split, ds, t_p=95.0, use_tpl=True)
        assert h.threshold == 0.99
        assert h.row_tags[ds.index_of("a000")] == GROUND_TRUTH
        assert h.row_tags[5] == PSEUDO_LABEL
        assert (h.row_tags == SOFT).sum() == 7
        np.testing.assert_array_equal(h.values[5], [1.0, 0.0])

    def test_tpl_disabled_keeps_soft_rows(self):
        ds = labeled_dataset(6)
        rng = np.random.default_rng(10)
        p = random_stochastic(rng, 6)
        split = SplitSpec(("a000",), make_one_hot([0]))
        h = build_confidence(p, split, ds, use_tpl=False)
        assert h.threshold is None
        assert (h.row_tags == PSEUDO_LABEL).sum() == 0
        unlabeled = [i for i in range(6) if i != ds.index_of("a000")]
        np.testing.assert_array_equal(h.values[unlabeled], p[unlabeled])

    def test_fully_labeled_dataset_skips_tpl(self):
        ds = labeled_dataset(4)
        ids = tuple(sorted(ds.labels))
        split = SplitSpec(ids, make_one_hot([ds.labels[a] for a in ids]))
        h = build_confidence(np.full((4, 2), 0.5), split, ds, use_tpl=True)
        assert h.threshold is None
        assert (h.row_tags == GROUND_TRUTH).all()


class TestAlignmentDump:
    def test_per_step_csv(self, tmp_path):
        ds = labeled_dataset(3)
        g = graph_from_dense(np.eye(3))
        scores = propagate(g, np.full((3, 2), 0.5), 2, record_steps=True)
        path = tmp_path / "steps.csv"
        save_alignment_csv(ds, scores, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "article_id,step,score_real,score_fake"
        assert len(lines) == 1 + 3 * 3  # header + 3 articles x steps 0..2
        assert lines[1].split(",")[:2] == ["a000", "0"]

    def test_dump_requires_snapshots(self, tmp_path):
        ds = labeled_dataset(2)
        scores = AlignedScores(values=np.zeros((2, 2)), steps=0)
        with pytest.raises(DataError, match="record_steps"):
            save_alignment_csv(ds, scores, tmp_path / "x.csv")
