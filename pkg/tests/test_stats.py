import numpy as np
import pytest
from scipy import stats as scipy_stats

from veraprop.stats import wilcoxon_signed_rank

# Frozen reference values computed with scipy.stats.wilcoxon
# (zero_method="wilcox", correction=True, mode="approx").
REFERENCE_CASES = [
    # (a, b, statistic, p_value)
    ([7.0, 6, 8, 5, 7, 6, 9, 8], [9.0, 7, 8, 6, 10, 8, 10, 9],
     0.0, 0.019906512248927786),
    ([85.2, 83.1, 80.4, 86.0, 79.9, 84.4, 82.2, 88.1, 81.5, 83.0],
     [84.0, 83.9, 78.8, 86.0, 80.3, 83.1, 82.9, 85.5, 81.5, 82.2],
     7.0, 0.14148212148279338),
    ([5.0, 4, 8, 9, 3, 10, 12, 11, 4, 13], [4.0, 5, 6, 7, 6, 6, 7, 6, 6, 7],
     11.5, 0.11271708474094375),
]


class TestAgainstReference:
    @pytest.mark.parametrize("a,b,statistic,p_value", REFERENCE_CASES)
    def test_frozen_tabulated_cases(self, a, b, statistic, p_value):
        result = wilcoxon_signed_rank(a, b)
        assert result.statistic == pytest.approx(statistic, abs=1e-9)
        assert result.p_value == pytest.approx(p_value, abs=1e-9)

    @pytest.mark.parametrize("a,b,statistic,p_value", REFERENCE_CASES)
    def test_live_scipy_agreement(self, a, b, statistic, p_value):
        result = wilcoxon_signed_rank(a, b)
        ref = scipy_stats.wilcoxon(np.array(a), np.array(b), zero_method="wilcox",
                                   correction=True, mode="approx")
        assert result.statistic == pytest.approx(ref.statistic, abs=1e-9)
        assert result.p_value == pytest.approx(ref.pvalue, abs=1e-9)

    def test_random_series_track_scipy(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            n = int(rng.integers(6, 40))
            a = rng.normal(size=n)
            b = a + rng.choice([-1.0, 0.5, 1.0, 2.0], size=n) * rng.integers(0, 2, size=n)
            if np.all(a - b == 0):
                continue
            result = wilcoxon_signed_rank(a, b)
            ref = scipy_stats.wilcoxon(a, b, zero_method="wilcox",
                                       correction=True, mode="approx")
            assert result.statistic == pytest.approx(ref.statistic, abs=1e-9)
            assert result.p_value == pytest.approx(ref.pvalue, abs=1e-9)


class TestContract:
    def test_all_positive_differences_pin_statistic_at_zero(self):
        result = wilcoxon_signed_rank([1.0, 2, 3, 4, 5, 6], [0.0] * 6)
        assert result.statistic == 0.0
        assert result.n_effective == 6
        # smallest attainable p for n=6 under this approximation
        worst = wilcoxon_signed_rank([6.0, 5, 4, 3, 2, 1], [0.0] * 6)
        assert result.p_value == worst.p_value

    def test_zero_differences_dropped_from_n_effective(self):
        result = wilcoxon_signed_rank([1.0, 2, 3, 4, 5, 6, 7], [1.0, 0, 0, 0, 0, 0, 0])
        assert result.n_effective == 6

    def test_identical_series_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            wilcoxon_signed_rank([1.0, 2, 3, 4, 5, 6], [1.0, 2, 3, 4, 5, 6])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="equal-length"):
            wilcoxon_signed_rank([1.0, 2, 3, 4, 5, 6], [1.0, 2, 3])

    def test_too_short_rejected(self):
        with pytest.raises(ValueError, match="at least 6"):
            wilcoxon_signed_rank([1.0, 2, 3], [3.0, 2, 1])

    def test_symmetry_of_arguments(self):
        a = [3.0, 1, 4, 1, 5, 9, 2, 6]
        b = [2.0, 7, 1, 8, 2, 8, 1, 8]
        fwd = wilcoxon_signed_rank(a, b)
        rev = wilcoxon_signed_rank(b, a)
        assert fwd.statistic == rev.statistic
        assert fwd.p_value == rev.p_value
