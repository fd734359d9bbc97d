"""Per-community correlation between weekly fake fractions and Gini series.

Three scoping schemes mirror how the two weekly series can be produced:

  a: topics fitted on the whole dataset, fake fraction also computed
     globally (every community is correlated against the same f series);
  b: topics global, fake fraction per community;
  c: both topics and fake fraction per community.

Significance is a two-sided t-test on the sample Pearson coefficient
(t = rho * sqrt((T-2)/(1-rho^2)), df = T-2), evaluated through the
regularized incomplete beta function.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from scipy import special

from .ingest import BinSeries, WeekKey
from .metrics import overload_series
from .topics import TopicAssignment
from .veracity import VeracityAssignment, fake_fraction

SCHEMES = ("a", "b", "c")
ALPHA = 0.05


@dataclass(frozen=True)
class CorrelationResult:
    scheme: str
    community: str
    community_size: int
    weeks_used: int
    rho: float | None
    p_value: float | None
    significant: bool | None
    skipped_reason: str | None = None


def pearson(f: Sequence[float], g: Sequence[float]) -> float:
    """Sample Pearson correlation of two aligned weekly series."""
    if len(f) != len(g):
        raise ValueError("series lengths differ")
    n = len(f)
    if n < 3:
        raise ValueError("insufficient data")
    mean_f = sum(f) / n
    mean_g = sum(g) / n
    df = [v - mean_f for v in f]
    dg = [v - mean_g for v in g]
    ss_f = sum(v * v for v in df)
    ss_g = sum(v * v for v in dg)
    if ss_f == 0.0 or ss_g == 0.0:
        raise ValueError("zero variance")
    return sum(a * b for a, b in zip(df, dg)) / math.sqrt(ss_f * ss_g)


def p_value(rho: float, n_weeks: int) -> float:
    """Two-sided p-value for a sample Pearson coefficient over n_weeks pairs.

    Equivalent to the t-test with df = n_weeks - 2: the tail integral
    reduces to I_{1-rho^2}(df/2, 1/2), the regularized incomplete beta.
    """
    if n_weeks < 3:
        raise ValueError("insufficient data")
    if abs(rho) > 1.0 + 1e-9:
        raise ValueError(f"|rho| > 1: {rho}")
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        return 0.0
    df = n_weeks - 2
    return float(special.betainc(df / 2.0, 0.5, 1.0 - rho * rho))


def paired_weeks(
    f_series: dict[WeekKey, float], g_series: dict[WeekKey, float]
) -> list[WeekKey]:
    """Weeks where both series are defined (gap weeks drop out pairwise)."""
    common = set(f_series) & set(g_series)
    return sorted(common, key=lambda w: w.monday())


def correlate_series(
    f_series: dict[WeekKey, float],
    g_series: dict[WeekKey, float],
    min_weeks: int = 3,
) -> tuple[int, float | None, float | None, str | None]:
    """Pairwise-aligned correlation; returns (T, rho, p, skipped_reason)."""
    weeks = paired_weeks(f_series, g_series)
    n = len(weeks)
    if n < min_weeks:
        return n, None, None, "insufficient data"
    f = [f_series[w] for w in weeks]
    g = [g_series[w] for w in weeks]
    try:
        rho = pearson(f, g)
    except ValueError as exc:
        return n, None, None, str(exc)
    return n, rho, p_value(rho, n), None


def run_scheme(
    scheme: str,
    bins_by_community: dict[str, BinSeries],
    global_bins: BinSeries,
    topics_global: TopicAssignment | None,
    topics_per_community: TopicAssignment | None,
    veracity: VeracityAssignment,
    include_outliers: bool = False,
    gini_variant: str = "exact",
    min_weeks: int = 3,
) -> list[CorrelationResult]:
    """One CorrelationResult per community under the requested scheme.

    Communities whose paired series are too short or constant are emitted
    with a skipped marker instead of being dropped.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    assignment = topics_per_community if scheme == "c" else topics_global
    if assignment is None:
        raise ValueError(f"scheme {scheme} requires a topic assignment for its scope")

    global_f = fake_fraction(veracity, global_bins).fake_series() if scheme == "a" else None

    results = []
    for name in sorted(bins_by_community):
        bins = bins_by_community[name]
        if scheme == "a":
            f_series = global_f
        else:
            f_series = fake_fraction(veracity, bins).fake_series()
        g_series = overload_series(
            assignment, bins, include_outliers=include_outliers, variant=gini_variant
        ).gini_series()
        n, rho, p, reason = correlate_series(f_series, g_series, min_weeks=min_weeks)
        results.append(
            CorrelationResult(
                scheme=scheme,
                community=name,
                community_size=bins.total_posts(),
                weeks_used=n,
                rho=rho,
                p_value=p,
                significant=None if p is None else p < ALPHA,
                skipped_reason=reason,
            )
        )
    return results


CORRELATION_HEADER = [
    "scheme", "community", "community_size", "T", "rho",
    "p_value", "significant", "skipped_reason",
]


def write_correlations_csv(results: Iterable[CorrelationResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CORRELATION_HEADER)
        for r in results:
            writer.writerow([
                r.scheme, r.community, r.community_size, r.weeks_used,
                "" if r.rho is None else repr(r.rho),
                "" if r.p_value is None else repr(r.p_value),
                "" if r.significant is None else str(r.significant).lower(),
                r.skipped_reason or "",
            ])
