"""Generate a synthetic cohort and print the group-level compliance tree.

The generator targets a compliance level per action; here skin checks are
driven down to ~50% so the dashboard shows a realistic mix.
"""

from pathlib import Path

from guideline_qa.aggregation import Interval, score_cohort
from guideline_qa.protocol import parse_protocol
from guideline_qa.synth import generate_cohort

protocol = parse_protocol(Path(__file__).resolve().parent.parent / "protocols" / "pressure_ulcer.json")
cohort = generate_cohort(protocol, 25, {"skin_3x_week": 0.5, "pain_once_a_day": 0.8}, seed=42)

start = min(p.admission for p in cohort.patients)
end = max(p.discharge for p in cohort.patients)
tree = score_cohort(cohort.patients, protocol, Interval(start, end))

print(f"cohort of {len(tree.population)} patients, window {start:%Y-%m-%d} .. {end:%Y-%m-%d}")
print(f"overall compliance: {tree.display_percent}%\n")
for stage in tree.children:
    shown = "N/A" if stage.value is None else f"{stage.display_percent:>3}%"
    print(f"  {stage.label:<24} {shown}")
    for action in stage.children:
        shown = "N/A" if action.value is None else f"{action.display_percent:>3}%"
        print(f"    {action.label:<26} {shown}")
