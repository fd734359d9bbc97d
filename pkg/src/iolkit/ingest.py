"""Ingestion of newline-delimited post dumps into weekly bins.

Input records are one JSON object per line with at least ``id``,
``subreddit`` and ``created_utc`` fields (``title``/``selftext`` optional),
optionally gzip-compressed. Binning uses ISO-8601 weeks of the UTC
timestamp; interior weeks with no posts are materialized with empty bins so
downstream series stay index-aligned.
"""

from __future__ import annotations

import csv
import datetime as dt
import gzip
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

log = logging.getLogger(__name__)

DELETED_MARKERS = {"[deleted]", "[removed]"}
_UTC = dt.timezone.utc


class WeekKey(NamedTuple):
    iso_year: int
    iso_week: int

    @classmethod
    def from_timestamp(cls, created_utc: int) -> "WeekKey":
        iso = dt.datetime.fromtimestamp(created_utc, tz=_UTC).isocalendar()
        return cls(iso.year, iso.week)

    def next(self) -> "WeekKey":
        monday = dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)
        iso = (monday + dt.timedelta(days=7)).isocalendar()
        return WeekKey(iso.year, iso.week)

    def monday(self) -> dt.date:
        return dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)


def week_range(first: WeekKey, last: WeekKey) -> list[WeekKey]:
    """All ISO weeks from first to last inclusive."""
    if first.monday() > last.monday():
        raise ValueError("first week is after last week")
    weeks = [first]
    while weeks[-1] != last:
        weeks.append(weeks[-1].next())
    return weeks


@dataclass(frozen=True, slots=True)
class Post:
    id: str
    community: str
    created_utc: int
    text: str


@dataclass
class IngestStats:
    parsed: int = 0
    skipped_malformed: int = 0
    skipped_policy: int = 0


def parse_post_line(line: str, drop_deleted: bool = False) -> Post | None:
    """Parse one dump line into a Post, or None when the record is skipped.

    Malformed records (bad JSON, missing/invalid required fields) are
    skipped; deleted or empty-text records are skipped only when
    ``drop_deleted`` is set. Title and body are concatenated into ``text``
    with deletion placeholders stripped.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(raw, dict):
        return None
    post_id = raw.get("id")
    community = raw.get("subreddit")
    created = raw.get("created_utc")
    if not post_id or not isinstance(post_id, str):
        return None
    if not community or not isinstance(community, str):
        return None
    try:
        created_utc = int(float(created))
    except (TypeError, ValueError):
        return None
    if created_utc < 0:
        return None

    parts = []
    for key in ("title", "selftext"):
        value = raw.get(key)
        if isinstance(value, str) and value and value not in DELETED_MARKERS:
            parts.append(value)
    text = " ".join(parts)
    if drop_deleted and not text:
        return None
    return Post(id=post_id, community=community, created_utc=created_utc, text=text)


def read_posts(
    path: str | Path,
    drop_deleted: bool = False,
    stats: IngestStats | None = None,
) -> Iterator[Post]:
    """Stream posts from an NDJSON dump (gzip-compressed if *.gz).

    Never aborts on a corrupt line: malformed records are counted in
    ``stats`` and logged once at the end.
    """
    stats = stats if stats is not None else IngestStats()
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8", errors="replace") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            post = parse_post_line(line)
            if post is None:
                stats.skipped_malformed += 1
                log.debug("%s:%d: malformed record skipped", path, lineno)
                continue
            if drop_deleted and not post.text:
                stats.skipped_policy += 1
                continue
            stats.parsed += 1
            yield post
    if stats.skipped_malformed:
        log.warning(
            "%s: skipped %d malformed record(s)", path, stats.skipped_malformed
        )


def filter_communities(posts: Iterable[Post], keywords: list[str]) -> Iterator[Post]:
    """Keep posts whose community name contains any keyword (case-insensitive)."""
    if not keywords:
        raise ValueError("keywords must be nonempty")
    lowered = [k.lower() for k in keywords]
    for post in posts:
        name = post.community.lower()
        if any(k in name for k in lowered):
            yield post


@dataclass
class BinSeries:
    """Ordered weekly bins of post ids for one scope (global or a community)."""

    scope: str
    bins: dict[WeekKey, list[str]] = field(default_factory=dict)

    def post_counts(self) -> dict[WeekKey, int]:
        return {week: len(ids) for week, ids in self.bins.items()}

    def total_posts(self) -> int:
        return sum(len(ids) for ids in self.bins.values())

    def materialize_gaps(self) -> None:
        """Insert empty bins for interior weeks and sort bins chronologically."""
        if not self.bins:
            return
        keys = sorted(self.bins, key=lambda w: w.monday())
        filled = {}
        for week in week_range(keys[0], keys[-1]):
            filled[week] = self.bins.get(week, [])
        self.bins = filled


GLOBAL_SCOPE = "global"


def bin_weekly(posts: Iterable[Post], scope: str = GLOBAL_SCOPE) -> dict[str, BinSeries]:
    """Assign posts to ISO weeks, returning one BinSeries per scope.

    scope "global" pools everything under a single series; "per_community"
    produces one series per community name. Empty interior weeks are
    materialized in every series.
    """
    if scope not in (GLOBAL_SCOPE, "per_community"):
        raise ValueError(f"unknown scope: {scope!r}")
    series: dict[str, BinSeries] = {}
    for post in posts:
        key = GLOBAL_SCOPE if scope == GLOBAL_SCOPE else post.community
        week = WeekKey.from_timestamp(post.created_utc)
        series.setdefault(key, BinSeries(scope=key)).bins.setdefault(week, []).append(post.id)
    for bs in series.values():
        bs.materialize_gaps()
    return dict(sorted(series.items()))


def community_census(posts: Iterable[Post]) -> list[tuple[str, int]]:
    """Post counts per community, largest first (ties broken by name)."""
    counts: dict[str, int] = {}
    for post in posts:
        counts[post.community] = counts.get(post.community, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


# --- file staging -----------------------------------------------------------

BINS_HEADER = ["scope", "iso_year", "iso_week", "post_count"]
INDEX_HEADER = ["post_id", "community", "iso_year", "iso_week"]
CENSUS_HEADER = ["community", "post_count"]


def write_bins_csv(series_by_scope: dict[str, BinSeries], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(BINS_HEADER)
        for scope, bs in series_by_scope.items():
            for week, ids in bs.bins.items():
                writer.writerow([scope, week.iso_year, week.iso_week, len(ids)])


def write_index_csv(posts: Iterable[Post], path: str | Path) -> None:
    """Post-id index: which community and ISO week each ingested post landed in."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(INDEX_HEADER)
        for post in posts:
            week = WeekKey.from_timestamp(post.created_utc)
            writer.writerow([post.id, post.community, week.iso_year, week.iso_week])


def write_census_csv(census: list[tuple[str, int]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CENSUS_HEADER)
        writer.writerows(census)


def read_index_csv(path: str | Path) -> list[tuple[str, str, WeekKey]]:
    """Read the post-id index back as (post_id, community, week) rows."""
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != INDEX_HEADER:
            raise ValueError(f"{path}: not a post index file (header {header})")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns")
            post_id, community, year, week = row
            rows.append((post_id, community, WeekKey(int(year), int(week))))
    return rows


def bins_from_index(
    rows: list[tuple[str, str, WeekKey]], scope: str = GLOBAL_SCOPE
) -> dict[str, BinSeries]:
    """Rebuild BinSeries from index rows (re-materializing interior gaps)."""
    series: dict[str, BinSeries] = {}
    for post_id, community, week in rows:
        key = GLOBAL_SCOPE if scope == GLOBAL_SCOPE else community
        series.setdefault(key, BinSeries(scope=key)).bins.setdefault(week, []).append(post_id)
    for bs in series.values():
        bs.materialize_gaps()
    return dict(sorted(series.items()))
