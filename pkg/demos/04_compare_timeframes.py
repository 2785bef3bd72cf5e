"""Compare compliance between two timeframes of the same cohort.

Scores the first and second half of the observation window separately and
prints per-node deltas, plus the duration-weighted recombination of the two
half scores (close to, but not forced equal to, the whole-window score once
renormalization over Undefined nodes differs between frames).
"""

from pathlib import Path

from guideline_qa.aggregation import (
    Interval,
    compare_trees,
    score_cohort,
    score_timeframe,
)
from guideline_qa.protocol import parse_protocol
from guideline_qa.synth import generate_cohort

protocol = parse_protocol(Path(__file__).resolve().parent.parent / "protocols" / "pressure_ulcer.json")
cohort = generate_cohort(protocol, 10, {"skin_3x_week": 0.6}, seed=5)

start = min(p.admission for p in cohort.patients)
end = max(p.discharge for p in cohort.patients)
mid = start + (end - start) / 2

first = Interval(start, mid)
second = Interval(mid, end)
tree_a = score_cohort(cohort.patients, protocol, first)
tree_b = score_cohort(cohort.patients, protocol, second)

print("per-node delta (second half minus first half):")
for row in compare_trees(tree_a, tree_b):
    if row["kind"] in ("group", "stage") and row["delta"] is not None:
        print(f"  {row['path']:<44} {row['delta']:+.4f}")

whole = score_cohort(cohort.patients, protocol, Interval(start, end))
recombined = score_timeframe(
    [(first, tree_a.value), (second, tree_b.value)], Interval(start, end)
)
print(f"\nfirst half {tree_a.value:.4f}, second half {tree_b.value:.4f}")
print(f"duration-weighted recombination: {recombined:.4f}")
print(f"whole-window score:              {whole.value:.4f}")
