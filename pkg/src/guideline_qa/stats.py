"""Paired manual-vs-automated score comparison and timing summaries.

Spearman and Pearson correlations with two-sided p-values from the
t-approximation t = r * sqrt((n-2) / (1-r^2)).  Zero-variance vectors
produce an explicit degenerate result (rendered as "same", the
convention of published comparison tables) instead of NaN.  An exact
permutation p-value is available for small n as a verification oracle.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy import stats as sstats

from .errors import LengthMismatch


@dataclass(frozen=True)
class MetricVectorPair:
    metric: str
    manual: tuple
    automated: tuple

    def __post_init__(self):
        if len(self.manual) != len(self.automated):
            raise LengthMismatch(
                f"{self.metric}: manual has {len(self.manual)} entries, "
                f"automated has {len(self.automated)}"
            )
        if len(self.manual) < 2:
            raise LengthMismatch(f"{self.metric}: need at least 2 paired scores")

    @property
    def n(self) -> int:
        return len(self.manual)


@dataclass(frozen=True)
class TestResult:
    r: Optional[float]
    p: Optional[float]
    degenerate: Optional[str] = None  # "constant" | "identical"


@dataclass(frozen=True)
class CorrelationResult:
    spearman: TestResult
    pearson: TestResult


def _t_pvalue(r: float, n: int) -> Optional[float]:
    if n < 3:
        return None
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * sstats.t.sf(abs(t), df=n - 2))


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    xm = x - x.mean()
    ym = y - y.mean()
    denom = math.sqrt(float(xm @ xm) * float(ym @ ym))
    if denom == 0.0:
        # subnormal spreads can underflow to a zero denominator even when
        # ptp() > 0; such vectors are numerically constant
        return math.nan
    return float(xm @ ym) / denom


def pearson(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Sample linear correlation with a two-sided t-approximation p-value."""
    if len(x) != len(y):
        raise LengthMismatch(f"vector lengths differ: {len(x)} vs {len(y)}")
    ax, ay = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.ptp(ax) == 0.0 or np.ptp(ay) == 0.0:
        # zero variance: published tables report these rows as 0 with p = 1
        return TestResult(r=0.0, p=1.0, degenerate="constant")
    r = _pearson_r(ax, ay)
    if math.isnan(r):
        return TestResult(r=0.0, p=1.0, degenerate="constant")
    r = max(-1.0, min(1.0, r))
    return TestResult(r=r, p=_t_pvalue(r, len(x)))


def spearman(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Pearson over fractional ranks (average ranks on ties); same p machinery."""
    if len(x) != len(y):
        raise LengthMismatch(f"vector lengths differ: {len(x)} vs {len(y)}")
    ax, ay = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    identical = bool(np.array_equal(ax, ay))
    if np.ptp(ax) == 0.0 or np.ptp(ay) == 0.0:
        return TestResult(r=0.0, p=1.0, degenerate="constant")
    rx = sstats.rankdata(ax)
    ry = sstats.rankdata(ay)
    r = max(-1.0, min(1.0, _pearson_r(rx, ry)))
    return TestResult(
        r=r, p=_t_pvalue(r, len(x)), degenerate="identical" if identical else None
    )


def correlate(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    return CorrelationResult(spearman=spearman(x, y), pearson=pearson(x, y))


def permutation_pvalue(
    x: Sequence[float], y: Sequence[float], method: str = "pearson"
) -> float:
    """Exact two-sided permutation p-value; verification oracle for n <= 10."""
    n = len(x)
    if n != len(y):
        raise LengthMismatch(f"vector lengths differ: {n} vs {len(y)}")
    if n > 10:
        raise ValueError("exact permutation p-value only supported for n <= 10")
    ax, ay = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if method == "spearman":
        ax, ay = sstats.rankdata(ax), sstats.rankdata(ay)
    elif method != "pearson":
        raise ValueError(f"unknown method {method!r}")
    if np.ptp(ax) == 0.0 or np.ptp(ay) == 0.0:
        return 1.0  # constant vector: every permutation is equally extreme
    perms = np.array(list(itertools.permutations(ay)))
    xm = ax - ax.mean()
    pm = perms - perms.mean(axis=1, keepdims=True)
    num = pm @ xm
    denom = math.sqrt(float(xm @ xm)) * np.sqrt((pm * pm).sum(axis=1))
    rs = num / denom
    observed = abs(_pearson_r(ax, ay))
    return float(np.mean(np.abs(rs) >= observed - 1e-12))


# --------------------------------------------------------------------------
# report generation


def load_metric_pairs(path: Union[str, Path]) -> list[MetricVectorPair]:
    """CSV columns: metric,patient_id,manual_score,automated_score."""
    rows: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.setdefault(row["metric"], []).append(
                (row["patient_id"], float(row["manual_score"]), float(row["automated_score"]))
            )
    pairs = []
    for metric, triples in rows.items():
        triples.sort(key=lambda t: t[0])
        pairs.append(
            MetricVectorPair(
                metric,
                tuple(m for _, m, _ in triples),
                tuple(a for _, _, a in triples),
            )
        )
    return pairs


def compare_scores(pairs: Sequence[MetricVectorPair]) -> list[dict]:
    """One report row per metric; per-pair failures become warning rows."""
    report = []
    for pair in pairs:
        try:
            result = correlate(pair.manual, pair.automated)
        except LengthMismatch as exc:
            report.append({"metric": pair.metric, "n": pair.n, "flag": f"error: {exc}"})
            continue
        flag = ""
        if pair.manual == pair.automated:
            flag = "same"
        elif result.pearson.degenerate or result.spearman.degenerate:
            flag = result.pearson.degenerate or result.spearman.degenerate
        report.append(
            {
                "metric": pair.metric,
                "n": pair.n,
                "spearman_r": result.spearman.r,
                "spearman_p": result.spearman.p,
                "pearson_r": result.pearson.r,
                "pearson_p": result.pearson.p,
                "flag": flag,
            }
        )
    return report


REPORT_COLUMNS = ["metric", "n", "spearman_r", "spearman_p", "pearson_r", "pearson_p", "flag"]


def render_report_csv(report: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, extrasaction="ignore")
    writer.writeheader()
    for row in report:
        writer.writerow(row)
    return buf.getvalue()


def render_report_json(report: Sequence[dict]) -> str:
    return json.dumps(list(report), indent=2)


# --------------------------------------------------------------------------
# timing


@dataclass(frozen=True)
class TimingSummary:
    durations: tuple
    mean: float
    sd: float  # sample, n-1
    trend_slope: float  # least-squares seconds per patient


def timing_log(entries: Sequence[tuple]) -> TimingSummary:
    """Per-patient assessment durations from (patient_id, start, end) triples."""
    durations = []
    for pid, start, end in entries:
        if end < start:
            raise ValueError(f"patient {pid}: end before start")
        d = end - start
        durations.append(d.total_seconds() if hasattr(d, "total_seconds") else float(d))
    arr = np.asarray(durations, dtype=float)
    mean = float(arr.mean()) if len(arr) else 0.0
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    if len(arr) > 1:
        slope = float(np.polyfit(np.arange(len(arr)), arr, 1)[0])
    else:
        slope = 0.0
    return TimingSummary(tuple(durations), mean, sd, slope)
