"""Annotation jobs: flat key-value config, post reading, atomic CSV output.

A job file names the input post dump, the mode (topics or veracity), the
model identifier and the output path. The adapter is a process boundary:
files in, files out, nonzero exit on failure, and never a partial output
file (results are staged to a temp file and renamed on success).
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

MODES = ("topics", "veracity")
SCOPES = ("F", "Ds")
REDUCTIONS = ("none", "d", "e")


class JobError(Exception):
    pass


@dataclass
class AnnotationJob:
    mode: str
    posts: Path
    output: Path
    model: str
    scope: str = "F"
    topics: str = "auto"
    tau: float = 0.15
    outlier_reduction: str = "d"
    batch_size: int = 32
    seed: int = 0
    label_map: dict[str, str] = field(default_factory=dict)


def parse_job_file(path: str | Path) -> AnnotationJob:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise JobError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()

    for required in ("mode", "posts", "output", "model"):
        if not entries.get(required):
            raise JobError(f"{path}: missing required key {required!r}")
    if entries["mode"] not in MODES:
        raise JobError(f"{path}: mode must be one of {MODES}")

    label_map = {}
    if entries.get("label_map"):
        for pair in entries["label_map"].split(","):
            src, _, dst = pair.partition(":")
            if dst not in ("F", "T", "U"):
                raise JobError(f"{path}: label_map targets must be F, T or U")
            label_map[src.strip()] = dst.strip()

    job = AnnotationJob(
        mode=entries["mode"],
        posts=Path(entries["posts"]),
        output=Path(entries["output"]),
        model=entries["model"],
        scope=entries.get("scope", "F"),
        topics=entries.get("topics", "auto"),
        tau=float(entries.get("tau", 0.15)),
        outlier_reduction=entries.get("outlier_reduction", "d"),
        batch_size=int(entries.get("batch_size", 32)),
        seed=int(entries.get("seed", 0)),
        label_map=label_map,
    )
    if job.scope not in SCOPES:
        raise JobError(f"{path}: scope must be one of {SCOPES}")
    if job.outlier_reduction not in REDUCTIONS:
        raise JobError(f"{path}: outlier_reduction must be one of {REDUCTIONS}")
    if not job.posts.exists():
        raise JobError(f"{path}: posts file {job.posts} does not exist")
    return job


@dataclass(frozen=True)
class Record:
    id: str
    community: str
    text: str


def read_records(path: Path) -> list[Record]:
    """Read the NDJSON post dump (id, subreddit, title/selftext)."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError:
                continue
            post_id = raw.get("id")
            community = raw.get("subreddit")
            if not post_id or not community:
                continue
            parts = [raw.get(k) for k in ("title", "selftext")]
            text = " ".join(p for p in parts if isinstance(p, str) and p)
            records.append(Record(str(post_id), str(community), text))
    if not records:
        raise JobError(f"{path}: no readable posts")
    return records


def write_labels_atomic(path: Path, header: list[str], rows) -> None:
    """Write the interchange CSV via temp-file rename; no partial outputs."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
