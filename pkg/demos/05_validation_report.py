"""Validate automated scores against a manual rater.

Builds paired manual/automated score vectors per metric and prints the
spearman/pearson report with p-values; degenerate vectors are flagged
instead of reported as spurious perfect correlations.
"""

from guideline_qa.stats import (
    MetricVectorPair,
    compare_scores,
    render_report_csv,
    timing_log,
)

pairs = [
    # close agreement with one disagreement
    MetricVectorPair("skin_check", (0.50, 0.70, 0.90, 1.00), (0.55, 0.70, 0.85, 1.00)),
    # rank-reversed on one patient
    MetricVectorPair("pain_test", (0.20, 0.40, 0.60, 0.80), (0.25, 0.60, 0.40, 0.85)),
    # manual rater gave everyone the same score -> flagged, not correlated
    MetricVectorPair("bandage", (1.0, 1.0, 1.0, 1.0), (0.9, 1.0, 0.8, 1.0)),
    # identical vectors -> flagged "same"
    MetricVectorPair("repositioning", (0.3, 0.6, 0.9), (0.3, 0.6, 0.9)),
]

print(render_report_csv(compare_scores(pairs)))

summary = timing_log([
    ("p1", 0.0, 540.0),
    ("p2", 0.0, 480.0),
    ("p3", 0.0, 400.0),
    ("p4", 0.0, 350.0),
])
print(f"assessment time: mean {summary.mean:.1f}s, sd {summary.sd:.1f}s, "
      f"trend {summary.trend_slope:+.1f}s per patient (learning effect)")
