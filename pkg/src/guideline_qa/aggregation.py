"""Rolling action scores up to stage, protocol, timeframe and group level.

The result is a drill-down tree of ScoreNodes: protocol -> stage ->
action -> component.  Undefined children are excluded from weighted
averages with their siblings' weights renormalized; a timeframe score is
the duration-weighted mean of its sub-interval scores; a group score is
the unweighted mean over patients (each patient counts once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional, Sequence

from .errors import OverlapError, StructureMismatch
from .events import PatientRecord, format_instant
from .protocol import Protocol, Stage
from .scoring import ActionScore, condition_ever_holds, score_action


@dataclass(frozen=True)
class Interval:
    start: datetime
    end: datetime

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("interval start must precede end")

    @property
    def duration_hours(self) -> float:
        return (self.end - self.start).total_seconds() / 3600.0


@dataclass(frozen=True)
class ScoreNode:
    kind: str  # component | action | stage | protocol | timeframe | group
    label: str
    weight: float
    value: Optional[float]
    children: tuple = ()
    window: Optional[Interval] = None
    population: tuple = ()
    reason: Optional[str] = None

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def display_percent(self) -> Optional[int]:
        return None if self.value is None else round_percent(self.value)

    def find(self, label: str) -> Optional["ScoreNode"]:
        for child in self.children:
            if child.label == label:
                return child
        return None


def round_percent(value: float) -> int:
    """Round half up, 0.892 -> 89, 0.895 -> 90."""
    return int(math.floor(100.0 * value + 0.5))


def weighted_value(children: Sequence[ScoreNode]) -> Optional[float]:
    """Weighted mean over defined children, weights renormalized; None if none defined."""
    defined = [c for c in children if c.defined]
    if not defined:
        return None
    total = sum(c.weight for c in defined)
    if total <= 0.0:
        return None
    return sum(c.weight * c.value for c in defined) / total


def _component_children(score: ActionScore, window: Interval) -> tuple:
    return tuple(
        ScoreNode(kind="component", label=kind, weight=w, value=v, window=window)
        for kind, w, v in score.components
    )


def score_stage(record: PatientRecord, stage: Stage, window: Interval) -> ScoreNode:
    """Stage node with one action child per ActionSpec.

    A stage whose entry condition never held in the window is Undefined
    (suppressed), not scored 0.
    """
    if stage.entry_condition is not None and not condition_ever_holds(
        record, stage.entry_condition, window.start, window.end
    ):
        return ScoreNode(
            kind="stage",
            label=stage.id,
            weight=stage.weight,
            value=None,
            window=window,
            population=(record.patient_id,),
            reason="stage entry condition never met in window",
        )
    children = []
    for action in stage.actions:
        s = score_action(record, action, window.start, window.end)
        children.append(
            ScoreNode(
                kind="action",
                label=action.id,
                weight=action.weight,
                value=s.value,
                children=_component_children(s, window),
                window=window,
                population=(record.patient_id,),
                reason=s.reason,
            )
        )
    return ScoreNode(
        kind="stage",
        label=stage.id,
        weight=stage.weight,
        value=weighted_value(children),
        children=tuple(children),
        window=window,
        population=(record.patient_id,),
    )


def score_protocol(record: PatientRecord, protocol: Protocol, window: Interval) -> ScoreNode:
    children = tuple(score_stage(record, stage, window) for stage in protocol.stages)
    return ScoreNode(
        kind="protocol",
        label=protocol.id,
        weight=1.0,
        value=weighted_value(children),
        children=children,
        window=window,
        population=(record.patient_id,),
    )


def score_timeframe(
    sub_scores: Sequence[tuple[Interval, Optional[float]]], frame: Interval
) -> Optional[float]:
    """Duration-weighted mean of disjoint sub-interval scores inside the frame."""
    intervals = sorted(sub_scores, key=lambda pair: pair[0].start)
    prev_end = None
    for interval, _ in intervals:
        if interval.start < frame.start or interval.end > frame.end:
            raise OverlapError(
                f"sub-interval {format_instant(interval.start)}..{format_instant(interval.end)} "
                "extends outside the frame"
            )
        if prev_end is not None and interval.start < prev_end:
            raise OverlapError(f"sub-intervals overlap at {format_instant(interval.start)}")
        prev_end = interval.end
    num = 0.0
    den = 0.0
    for interval, value in intervals:
        if value is None:
            continue
        num += interval.duration_hours * value
        den += interval.duration_hours
    if den == 0.0:
        return None
    return num / den


def score_group(patient_scores: Sequence[Optional[float]]) -> Optional[float]:
    """Unweighted mean over defined scores; each patient counts once."""
    defined = [v for v in patient_scores if v is not None]
    if not defined:
        return None
    return sum(defined) / len(defined)


def _merge_nodes(nodes: Sequence[ScoreNode], window: Interval) -> ScoreNode:
    """Average structurally identical per-patient nodes into one group-level node."""
    first = nodes[0]
    population = tuple(pid for n in nodes for pid in n.population)
    merged_children = []
    for i in range(len(first.children)):
        merged_children.append(_merge_nodes([n.children[i] for n in nodes], window))
    return ScoreNode(
        kind=first.kind,
        label=first.label,
        weight=first.weight,
        value=score_group([n.value for n in nodes]),
        children=tuple(merged_children),
        window=window,
        population=population,
    )


def score_cohort(
    records: Sequence[PatientRecord],
    protocol: Protocol,
    window: Interval,
    stage_id: Optional[str] = None,
) -> ScoreNode:
    """Group-level tree: per-patient trees averaged node-wise (mean over defined).

    When ``stage_id`` is given, only that stage's subtree is returned.
    """
    if not records:
        return ScoreNode(kind="group", label=protocol.id, weight=1.0, value=None, window=window,
                         reason="empty patient group")
    if stage_id is not None:
        stage = protocol.stage(stage_id)
        trees = [score_stage(r, stage, window) for r in records]
    else:
        trees = [score_protocol(r, protocol, window) for r in records]
    merged = _merge_nodes(trees, window)
    return ScoreNode(
        kind="group",
        label=merged.label,
        weight=1.0,
        value=merged.value,
        children=merged.children,
        window=window,
        population=merged.population,
    )


def compare_trees(tree_a: ScoreNode, tree_b: ScoreNode, path: str = "") -> list[dict]:
    """Node-aligned (value_a, value_b, delta) report over every shared node.

    Children are matched by label; a node present on only one side (e.g. a
    stage suppressed by its entry condition in one frame) is skipped.  Trees
    built from different protocols fail with StructureMismatch.
    """
    here = f"{path}/{tree_a.label}"
    if tree_a.kind != tree_b.kind or tree_a.label != tree_b.label:
        raise StructureMismatch(f"trees diverge at {here}")
    delta = None
    if tree_a.defined and tree_b.defined:
        delta = tree_b.value - tree_a.value
    rows = [
        {
            "path": here,
            "kind": tree_a.kind,
            "value_a": tree_a.value,
            "value_b": tree_b.value,
            "delta": delta,
        }
    ]
    b_children = {c.label: c for c in tree_b.children}
    for ca in tree_a.children:
        cb = b_children.get(ca.label)
        if cb is not None:
            rows.extend(compare_trees(ca, cb, here))
    return rows


def node_to_json(node: ScoreNode) -> dict:
    out = {
        "kind": node.kind,
        "label": node.label,
        "weight": node.weight,
        "value": node.value,
        "display_percent": node.display_percent,
        "children": [node_to_json(c) for c in node.children],
    }
    if node.window is not None:
        out["window"] = {
            "from": format_instant(node.window.start),
            "to": format_instant(node.window.end),
        }
    if node.population:
        out["population"] = sorted(set(node.population))
    if node.reason:
        out["reason"] = node.reason
    return out
