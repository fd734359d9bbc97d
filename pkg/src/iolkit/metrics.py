"""Information-overload metrics over weekly topic histograms.

The central quantity is the Gini index of the topic-size distribution in a
time bin: 0 means posts are spread evenly over topics, values near the
upper bound 1 - 1/topic_count mean a single topic monopolizes the bin.
Three routes to the same number are provided (direct definition, algebraic
rewrite, closed-form approximation for the single-dominant-topic regime) so
they can cross-check each other, plus a small-sample bias correction and a
Shannon-entropy alternative.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

GINI_VARIANTS = ("exact", "rewritten", "degenerate_approx", "bias_corrected")


@dataclass(frozen=True)
class GiniResult:
    value: float
    topic_count: int
    post_count: int
    variant: str


def _as_counts(x) -> list[int]:
    """Normalize input to a sorted-ascending list of positive integer counts.

    Accepts a plain sequence of counts or anything exposing a ``counts``
    attribute (e.g. a TopicHistogram). Input order never matters: the
    ascending arrangement required by the definition is enforced here.
    """
    counts = getattr(x, "counts", x)
    out = sorted(int(c) for c in counts)
    if not out:
        raise ValueError("empty histogram")
    if out[0] < 1:
        raise ValueError("histogram counts must be positive integers")
    return out


def gini(x) -> GiniResult:
    """Gini index of a topic histogram, by the direct definition.

    With counts x_1 <= ... <= x_n and total P, computes
    sum_i (2i - n - 1) * x_i / (n * P), i starting at 1. The numerator is
    accumulated in exact integer arithmetic; the single float division at
    the end is the only rounding step.
    """
    counts = _as_counts(x)
    n = len(counts)
    total = sum(counts)
    num = sum((2 * i - n - 1) * c for i, c in enumerate(counts, start=1))
    return GiniResult(num / (n * total), n, total, "exact")


def gini_rewritten(x) -> GiniResult:
    """Gini index via the rank-weighted rewrite: 2*sum(i*x_i)/(n*P) - (n+1)/n.

    Algebraically identical to :func:`gini`; kept as an independent
    implementation for cross-checking.
    """
    counts = _as_counts(x)
    n = len(counts)
    total = sum(counts)
    s = sum(i * c for i, c in enumerate(counts, start=1))
    return GiniResult(2.0 * s / (n * total) - (n + 1) / n, n, total, "rewritten")


def gini_bias_corrected(x) -> GiniResult:
    """Gini index rescaled by n/(n-1) so the supremum is 1 instead of 1 - 1/n.

    For a single topic (n = 1) the uncorrected value is 0 and is returned
    unchanged.
    """
    base = gini(x)
    if base.topic_count < 2:
        return GiniResult(0.0, base.topic_count, base.post_count, "bias_corrected")
    value = base.value * base.topic_count / (base.topic_count - 1)
    return GiniResult(value, base.topic_count, base.post_count, "bias_corrected")


def gini_degenerate_approx(topic_count: int, post_count: int) -> float:
    """Closed-form approximation 1 - topic_count/post_count.

    Exact limit of the one-dominant-topic configuration (all topics but one
    holding a single post) for large counts; requires
    1 <= topic_count <= post_count.
    """
    if topic_count < 1:
        raise ValueError("topic_count must be >= 1")
    if topic_count > post_count:
        raise ValueError("topic_count cannot exceed post_count")
    return 1.0 - topic_count / post_count


def shannon_entropy(x) -> float:
    """Shannon entropy -sum(p_i * ln(p_i)) of the topic share distribution."""
    counts = _as_counts(x)
    total = sum(counts)
    return -sum((c / total) * math.log(c / total) for c in counts)


def gini_variant(x, variant: str = "exact") -> GiniResult:
    """Dispatch on the configured Gini variant name."""
    if variant == "exact":
        return gini(x)
    if variant == "rewritten":
        return gini_rewritten(x)
    if variant == "bias_corrected":
        return gini_bias_corrected(x)
    if variant == "degenerate_approx":
        counts = _as_counts(x)
        n, total = len(counts), sum(counts)
        return GiniResult(gini_degenerate_approx(n, total), n, total, "degenerate_approx")
    raise ValueError(f"unknown gini variant: {variant!r}")


# --- weekly overload series --------------------------------------------------


@dataclass(frozen=True)
class OverloadPoint:
    post_count: int  # raw bin size (outliers included)
    topic_count: int | None
    ratio: float | None  # topic_count / posts counted in the histogram
    gini: float | None

    @property
    def is_gap(self) -> bool:
        return self.topic_count is None


@dataclass
class OverloadSeries:
    scope: str
    variant: str
    points: "dict" = field(default_factory=dict)  # WeekKey -> OverloadPoint

    def gini_series(self) -> dict:
        return {w: p.gini for w, p in self.points.items() if not p.is_gap}


def overload_series(
    assignment,
    bins,
    include_outliers: bool = False,
    variant: str = "exact",
) -> OverloadSeries:
    """Per-week post/topic counts, topics-to-posts ratio and Gini index.

    Weeks with no posts, or none left after the outlier policy, are carried
    as gaps rather than zeros.
    """
    from .topics import EmptyBinError, topic_histogram

    series = OverloadSeries(scope=bins.scope, variant=variant)
    for week, ids in bins.bins.items():
        try:
            hist = topic_histogram(assignment, ids, include_outliers=include_outliers)
        except EmptyBinError:
            series.points[week] = OverloadPoint(len(ids), None, None, None)
            continue
        g = gini_variant(hist, variant)
        series.points[week] = OverloadPoint(
            len(ids), hist.topic_count, hist.topic_count / hist.post_count, g.value
        )
    return series


OVERLOAD_HEADER = [
    "scope", "iso_year", "iso_week", "post_count", "topic_count", "ratio", "gini",
]


def write_overload_csv(series_list: Iterable[OverloadSeries], path: str | Path) -> None:
    """Weekly overload CSV; gap weeks keep their post count, metric cells empty."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(OVERLOAD_HEADER)
        for series in series_list:
            for week, point in series.points.items():
                if point.is_gap:
                    writer.writerow([series.scope, week.iso_year, week.iso_week,
                                     point.post_count, "", "", ""])
                else:
                    writer.writerow([series.scope, week.iso_year, week.iso_week,
                                     point.post_count, point.topic_count,
                                     repr(point.ratio), repr(point.gini)])
