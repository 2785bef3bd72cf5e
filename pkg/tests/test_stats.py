import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from guideline_qa.errors import LengthMismatch
from guideline_qa.stats import (
    MetricVectorPair,
    compare_scores,
    correlate,
    load_metric_pairs,
    pearson,
    permutation_pvalue,
    render_report_csv,
    render_report_json,
    spearman,
    timing_log,
)

from .oracles import oracle_permutation_pvalue


class TestPearson:
    def test_perfect_linear(self):
        result = pearson([0.1, 0.5, 0.9], [0.1, 0.5, 0.9])
        assert result.r == pytest.approx(1.0)
        assert result.p == pytest.approx(0.0, abs=1e-9)

    def test_anti_correlation(self):
        assert pearson([1, 2, 3], [3, 2, 1]).r == pytest.approx(-1.0)

    def test_constant_vector_degenerate(self):
        result = pearson([1, 1, 1], [1, 2, 3])
        assert result.degenerate == "constant"
        assert result.r == 0.0 and result.p == 1.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            pearson([1, 2], [1, 2, 3])

    def test_p_value_formula(self):
        from scipy import stats as sstats

        x = [0.2, 0.4, 0.1, 0.9, 0.7]
        y = [0.3, 0.5, 0.2, 0.7, 0.9]
        result = pearson(x, y)
        t = result.r * math.sqrt((5 - 2) / (1 - result.r**2))
        assert result.p == pytest.approx(2 * sstats.t.sf(abs(t), df=3))


class TestSpearman:
    def test_worked_example(self):
        assert spearman([1, 2, 3, 4], [2, 1, 4, 3]).r == pytest.approx(0.6)

    def test_tied_ranks(self):
        # ranks (1.5, 1.5, 3) vs (1, 2.5, 2.5)
        result = spearman([1, 1, 2], [1, 2, 2])
        rx = np.array([1.5, 1.5, 3.0])
        ry = np.array([1.0, 2.5, 2.5])
        expected = np.corrcoef(rx, ry)[0, 1]
        assert result.r == pytest.approx(expected)

    def test_identical_flagged(self):
        result = spearman([0.1, 0.5, 0.9], [0.1, 0.5, 0.9])
        assert result.degenerate == "identical"
        assert result.r == pytest.approx(1.0)

    def test_monotone_transform_invariance(self):
        x = [0.2, 0.4, 0.1, 0.9, 0.7]
        y = [0.3, 0.5, 0.2, 0.7, 0.9]
        fx = [math.exp(v) for v in x]
        gy = [v**3 + 2 for v in y]
        assert spearman(fx, gy).r == pytest.approx(spearman(x, y).r, abs=1e-12)
        assert spearman(x, x).r == pytest.approx(1.0)


class TestInvariances:
    @given(
        st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), min_size=3, max_size=10),
        st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), min_size=3, max_size=10),
        st.floats(min_value=0.1, max_value=10),
        st.floats(min_value=-5, max_value=5),
    )
    def test_pearson_affine_invariance(self, x, y, a, b):
        n = min(len(x), len(y))
        x, y = x[:n], y[:n]
        base = pearson(x, y)
        scaled = pearson([a * v + b for v in x], y)
        if base.degenerate or scaled.degenerate:
            return
        assert scaled.r == pytest.approx(base.r, abs=1e-12)

    @given(
        st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), min_size=3, max_size=10),
        st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), min_size=3, max_size=10),
    )
    def test_symmetry(self, x, y):
        n = min(len(x), len(y))
        x, y = x[:n], y[:n]
        assert pearson(x, y).r == pytest.approx(pearson(y, x).r, abs=1e-12)
        assert spearman(x, y).r == pytest.approx(spearman(y, x).r, abs=1e-12)

    def test_p_monotone_in_abs_r(self):
        from guideline_qa.stats import _t_pvalue

        rs = [0.0, 0.2, 0.4, 0.6, 0.8, 0.95, 1.0]
        ps = [_t_pvalue(r, 10) for r in rs]
        assert ps == sorted(ps, reverse=True)


class TestPermutation:
    def test_matches_independent_enumeration(self):
        rng = random.Random(99)
        for _ in range(10):
            n = rng.randrange(3, 7)
            x = [rng.random() for _ in range(n)]
            y = [rng.random() for _ in range(n)]
            for method in ("pearson", "spearman"):
                assert permutation_pvalue(x, y, method) == pytest.approx(
                    oracle_permutation_pvalue(x, y, method)
                )

    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            permutation_pvalue(list(range(11)), list(range(11)))

    def test_approaches_t_approximation(self):
        """The t-approximation converges toward the exact permutation law as n grows."""
        rng = np.random.default_rng(5)
        worst_by_n = {}
        for n in (5, 8):
            diffs = []
            for _ in range(30):
                x, y = rng.random(n), rng.random(n)
                diffs.append(abs(spearman(x, y).p - permutation_pvalue(x, y, "spearman")))
            worst_by_n[n] = max(diffs)
        assert worst_by_n[8] < worst_by_n[5]


class TestReport:
    def test_vector_pair_validation(self):
        with pytest.raises(LengthMismatch):
            MetricVectorPair("m", (1, 2), (1, 2, 3))
        with pytest.raises(LengthMismatch):
            MetricVectorPair("m", (1,), (1,))

    def test_identical_flagged_same(self):
        pairs = [MetricVectorPair("m", (0.1, 0.5, 0.9), (0.1, 0.5, 0.9))]
        report = compare_scores(pairs)
        assert report[0]["flag"] == "same"

    def test_constant_flagged(self):
        pairs = [MetricVectorPair("m", (1.0, 1.0, 1.0), (0.1, 0.5, 0.9))]
        assert compare_scores(pairs)[0]["flag"] == "constant"

    def test_row_per_metric(self):
        pairs = [
            MetricVectorPair(f"m{i}", (0.1, 0.5, 0.9), (0.2, 0.4, 0.8)) for i in range(12)
        ]
        assert len(compare_scores(pairs)) == 12

    def test_empty(self):
        assert compare_scores([]) == []

    def test_load_metric_pairs(self, tmp_path):
        path = tmp_path / "pairs.csv"
        path.write_text(
            "metric,patient_id,manual_score,automated_score\n"
            "m1,p1,0.5,0.6\n"
            "m1,p2,0.7,0.7\n"
            "m2,p1,1.0,1.0\n"
            "m2,p2,0.9,0.8\n",
            encoding="utf-8",
        )
        pairs = load_metric_pairs(path)
        assert {p.metric for p in pairs} == {"m1", "m2"}
        m1 = next(p for p in pairs if p.metric == "m1")
        assert m1.manual == (0.5, 0.7) and m1.automated == (0.6, 0.7)

    def test_render_csv_and_json(self):
        report = compare_scores([MetricVectorPair("m", (0.1, 0.5, 0.9), (0.2, 0.4, 0.8))])
        text = render_report_csv(report)
        assert text.splitlines()[0] == "metric,n,spearman_r,spearman_p,pearson_r,pearson_p,flag"
        assert "m,3," in text
        import json

        doc = json.loads(render_report_json(report))
        assert doc[0]["metric"] == "m"


class TestTiming:
    def test_constant_durations(self):
        entries = [(f"p{i}", 0.0, 600.0) for i in range(5)]
        summary = timing_log(entries)
        assert summary.mean == 600.0 and summary.sd == 0.0

    def test_two_durations(self):
        summary = timing_log([("p1", 0.0, 500.0), ("p2", 0.0, 700.0)])
        assert summary.mean == 600.0
        assert summary.sd == pytest.approx(141.42, abs=0.005)

    def test_decreasing_trend(self):
        entries = [(f"p{i}", 0.0, float(1000 - 50 * i)) for i in range(8)]
        assert timing_log(entries).trend_slope < 0

    def test_datetime_entries(self):
        from .conftest import at

        summary = timing_log([("p1", at(0), at(1))])
        assert summary.mean == 3600.0

    def test_end_before_start_rejected(self):
        with pytest.raises(ValueError):
            timing_log([("p1", 5.0, 4.0)])


class TestCorrelate:
    def test_bundles_both(self):
        result = correlate([1, 2, 3, 4], [2, 1, 4, 3])
        assert result.spearman.r == pytest.approx(0.6)
        assert result.pearson.r == pytest.approx(0.6)
