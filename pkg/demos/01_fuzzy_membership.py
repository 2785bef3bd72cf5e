"""Fuzzy timing: how 'acceptable delay' is graded instead of pass/fail.

A trapezoid (a, b, c, d) in hours maps a delay to a degree of compliance:
full credit on the plateau [b, c], linearly decaying credit on the slopes,
none outside [a, d].  An infinite foot means there is no edge on that side.
"""

from guideline_qa.trapezoid import Trapezoid

# "should happen within 72 hours, tolerable up to 120 hours"
risk_assessment = Trapezoid(0, 0, 72, 120)
for hours in (10, 72, 80, 96, 120, 150):
    print(f"done after {hours:>3}h -> membership {risk_assessment.membership(hours):.4f}")

print()

# "at least daily, a gap of up to 72h is fine, 80h is the hard limit"
gap_rule = Trapezoid(0, 0, 72, 80)
print(f"75h gap -> {gap_rule.membership(75):.4f} (partial credit)")

# one-sided rule: never too early, too late after 48h
one_sided = Trapezoid(float("-inf"), 0, 24, 48)
print(f"one-sided rule at t=-100h -> {one_sided.membership(-100):.4f}")
print()
print("round-trip JSON:", gap_rule.to_json())
