"""Guideline compliance scoring over clinical event logs."""

from .aggregation import (
    Interval,
    ScoreNode,
    compare_trees,
    node_to_json,
    round_percent,
    score_cohort,
    score_group,
    score_protocol,
    score_stage,
    score_timeframe,
)
from .events import Cohort, Event, PatientRecord, load_events, slice_record
from .protocol import Protocol, parse_protocol, serialize_protocol
from .scoring import ActionScore, score_action
from .stats import compare_scores, pearson, permutation_pvalue, spearman, timing_log
from .synth import generate_cohort
from .trapezoid import Trapezoid, trapezoid_membership, validate_trapezoid

__all__ = [
    "ActionScore",
    "Cohort",
    "Event",
    "Interval",
    "PatientRecord",
    "Protocol",
    "ScoreNode",
    "Trapezoid",
    "compare_scores",
    "compare_trees",
    "generate_cohort",
    "load_events",
    "node_to_json",
    "parse_protocol",
    "pearson",
    "permutation_pvalue",
    "round_percent",
    "score_action",
    "score_cohort",
    "score_group",
    "score_protocol",
    "score_stage",
    "score_timeframe",
    "serialize_protocol",
    "slice_record",
    "spearman",
    "timing_log",
    "trapezoid_membership",
    "validate_trapezoid",
]
