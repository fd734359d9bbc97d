"""Topic assignment for posts: builtin clustering or externally produced labels.

The builtin path is classical: TF-IDF document vectors clustered with
spherical k-means, fitted either once over the whole dataset ("F" scope) or
independently per community ("Ds" scope). Documents too dissimilar from
every centroid are marked as outliers (topic -1) and can be folded back in
with one of two reduction methods. External label files produced by any
annotator are loaded through the same interchange CSV the builtin path
exports.

TF-IDF formula (scikit-learn smooth variant): tf(t, d) is the raw term
count, idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1, and each document row
is L2-normalized.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.feature_extraction.text import CountVectorizer, TfidfTransformer

from .ingest import Post

log = logging.getLogger(__name__)

OUTLIER_TOPIC = -1
DEFAULT_TAU = 0.1
MAX_AUTO_K = 200
TOKEN_PATTERN = r"(?u)\b\w+\b"

LABELS_HEADER = ["post_id", "topic_id"]


class EmptyBinError(Exception):
    """A bin has no posts left after the outlier policy is applied."""


def load_stopwords() -> list[str]:
    text = resources.files("iolkit.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return [w for w in text.split() if w]


@dataclass(frozen=True)
class TopicHistogram:
    """Per-topic post counts of one bin, sorted ascending."""

    counts: tuple[int, ...]
    topic_count: int
    post_count: int

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "TopicHistogram":
        ordered = tuple(sorted(int(c) for c in counts))
        if not ordered:
            raise ValueError("empty histogram")
        if ordered[0] < 1:
            raise ValueError("histogram counts must be positive")
        return cls(ordered, len(ordered), sum(ordered))


@dataclass(frozen=True)
class TopicStrategy:
    scope: str  # "Ds" (per community) or "F" (whole dataset)
    outlier_reduction: str = "none"  # none | distribution | centroid


@dataclass
class FitUnit:
    """Fitted state of one clustering unit (the whole dataset or one community)."""

    ids: list[str]
    counts: sp.csr_matrix
    tfidf: sp.csr_matrix
    vocabulary: list[str]
    centroids: np.ndarray  # one row per compacted topic id
    topic_offset: int


@dataclass
class TopicAssignment:
    """Mapping post-id -> topic-id (-1 = outlier) with provenance."""

    post_topic: dict[str, int]
    scope: str  # "global" | "per_community" | a community name
    method: str  # "builtin" | "external"
    strategy: TopicStrategy | None = None
    source_path: str | None = None
    units: dict[str, FitUnit] = field(default_factory=dict)

    def topic_count(self) -> int:
        topics = {t for t in self.post_topic.values() if t != OUTLIER_TOPIC}
        return len(topics)


# --- vectorization ----------------------------------------------------------


@dataclass
class VectorSpace:
    ids: list[str]
    vocabulary: list[str]
    counts: sp.csr_matrix
    tfidf: sp.csr_matrix


def vectorize(posts: Sequence[Post], stopwords: Sequence[str] | None = None) -> VectorSpace:
    """TF-IDF document-term matrix over lowercased, stopword-filtered tokens.

    Rows are L2-normalized; the raw term-count matrix is kept alongside for
    the distribution-based outlier reduction. Deterministic given the post
    list and stopword list.
    """
    if not posts:
        raise ValueError("post list is empty")
    stop = list(stopwords) if stopwords is not None else load_stopwords()
    counter = CountVectorizer(lowercase=True, token_pattern=TOKEN_PATTERN, stop_words=stop)
    try:
        counts = counter.fit_transform([p.text for p in posts])
    except ValueError as exc:
        raise ValueError("no vocabulary") from exc
    tfidf = TfidfTransformer(norm="l2", smooth_idf=True).fit_transform(counts)
    vocab = counter.get_feature_names_out().tolist()
    return VectorSpace([p.id for p in posts], vocab, counts.tocsr(), tfidf.tocsr())


# --- spherical k-means ------------------------------------------------------


def _row_norms(X: sp.csr_matrix) -> np.ndarray:
    return np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())


def _normalize_rows(M: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(M, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return M / norms


def _kmeans_pp_init(X: sp.csr_matrix, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding under cosine distance (rows of X are unit or zero)."""
    nonzero = np.flatnonzero(_row_norms(X) > 0)
    centers = [int(rng.choice(nonzero))]
    best_sim = np.asarray((X @ X[centers[0]].T).todense()).ravel()
    for _ in range(1, k):
        dist = np.clip(1.0 - best_sim, 0.0, None)
        dist[[*centers]] = 0.0
        weights = np.zeros_like(dist)
        weights[nonzero] = dist[nonzero]
        total = weights.sum()
        if total <= 0:
            remaining = [i for i in nonzero if i not in centers]
            centers.append(int(remaining[0]) if remaining else int(nonzero[0]))
        else:
            centers.append(int(rng.choice(len(dist), p=weights / total)))
        sim = np.asarray((X @ X[centers[-1]].T).todense()).ravel()
        best_sim = np.maximum(best_sim, sim)
    return X[centers].toarray()


def spherical_kmeans(
    X: sp.csr_matrix, k: int, seed: int = 0, max_iter: int = 100
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cluster L2-normalized rows by cosine similarity.

    Returns (labels, centroids, best_sims). Centroids are unit vectors;
    empty clusters are reseeded with the worst-fitting document.
    """
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} documents")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(X, k, rng)
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        sims = np.asarray((X @ centroids.T))
        new_labels = sims.argmax(axis=1)
        best = sims[np.arange(n), new_labels]
        for cluster in range(k):
            members = new_labels == cluster
            if not members.any():
                worst = int(best.argmin())
                new_labels[worst] = cluster
                best[worst] = 1.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        indicator = sp.csr_matrix(
            (np.ones(n), (labels, np.arange(n))), shape=(k, n)
        )
        centroids = _normalize_rows(np.asarray((indicator @ X).todense()))
    sims = np.asarray(X @ centroids.T)
    labels = sims.argmax(axis=1)
    best = sims[np.arange(n), labels]
    return labels, centroids, best


def auto_topic_count(n_docs: int) -> int:
    """Default cluster count: max(2, round(sqrt(n/2))), capped at 200."""
    return min(MAX_AUTO_K, max(2, round(math.sqrt(n_docs / 2))))


def _distinct_docs(counts: sp.csr_matrix) -> int:
    seen = set()
    for i in range(counts.shape[0]):
        row = counts.getrow(i)
        seen.add((tuple(row.indices.tolist()), tuple(row.data.tolist())))
    return len(seen)


def _fit_unit(
    posts: Sequence[Post],
    k: int | str,
    seed: int,
    tau: float,
    stopwords: Sequence[str] | None,
    topic_offset: int,
) -> tuple[dict[str, int], FitUnit]:
    space = vectorize(posts, stopwords=stopwords)
    n = len(space.ids)
    k_req = auto_topic_count(n) if k == "auto" else int(k)
    distinct = _distinct_docs(space.counts)
    k_eff = min(k_req, distinct)
    if k_eff < k_req:
        log.warning("k=%d clamped to %d (distinct documents)", k_req, k_eff)
    labels, centroids, best = spherical_kmeans(space.tfidf, k_eff, seed=seed)
    if k_eff > 1:
        labels = np.where(best < tau, OUTLIER_TOPIC, labels)

    # compact surviving cluster ids to 0..TC-1, keeping centroid order
    surviving = sorted({int(t) for t in labels if t != OUTLIER_TOPIC})
    remap = {old: new for new, old in enumerate(surviving)}
    mapping = {
        pid: (OUTLIER_TOPIC if t == OUTLIER_TOPIC else remap[int(t)] + topic_offset)
        for pid, t in zip(space.ids, labels)
    }
    unit = FitUnit(
        ids=space.ids,
        counts=space.counts,
        tfidf=space.tfidf,
        vocabulary=space.vocabulary,
        centroids=centroids[surviving],
        topic_offset=topic_offset,
    )
    return mapping, unit


def fit_topics(
    posts: Sequence[Post],
    scope: str = "F",
    k: int | str = "auto",
    seed: int = 0,
    tau: float = DEFAULT_TAU,
    stopwords: Sequence[str] | None = None,
) -> TopicAssignment:
    """Cluster posts into topics, whole-dataset ("F") or per community ("Ds").

    Per-community fits run with the same seed and k rule; their topic ids
    are offset so the merged assignment stays contiguous. Documents whose
    best cosine similarity falls below ``tau`` get the outlier topic -1
    (disabled when a unit ends up with a single cluster).
    """
    if scope not in ("F", "Ds"):
        raise ValueError(f"scope must be 'F' or 'Ds', got {scope!r}")
    if not posts:
        raise ValueError("post list is empty")
    strategy = TopicStrategy(scope=scope)
    if scope == "F":
        mapping, unit = _fit_unit(posts, k, seed, tau, stopwords, topic_offset=0)
        return TopicAssignment(mapping, "global", "builtin", strategy, units={"global": unit})

    by_community: dict[str, list[Post]] = {}
    for post in posts:
        by_community.setdefault(post.community, []).append(post)
    mapping: dict[str, int] = {}
    units: dict[str, FitUnit] = {}
    offset = 0
    for name in sorted(by_community):
        unit_mapping, unit = _fit_unit(
            by_community[name], k, seed, tau, stopwords, topic_offset=offset
        )
        mapping.update(unit_mapping)
        units[name] = unit
        offset += unit.centroids.shape[0]
    return TopicAssignment(mapping, "per_community", "builtin", strategy, units=units)


def reduce_outliers(assignment: TopicAssignment, method: str) -> TopicAssignment:
    """Reassign every outlier post to a real topic; non-outliers are untouched.

    "distribution" matches the document's term counts against each topic's
    aggregate token-frequency profile; "centroid" snaps to the nearest
    centroid regardless of the similarity threshold. The topic set never
    changes.
    """
    if method not in ("distribution", "centroid"):
        raise ValueError(f"unknown outlier reduction method: {method!r}")
    if assignment.method != "builtin" or not assignment.units:
        raise ValueError("outlier reduction requires a builtin fit")

    mapping = dict(assignment.post_topic)
    for unit in assignment.units.values():
        out_rows = [
            i for i, pid in enumerate(unit.ids) if mapping[pid] == OUTLIER_TOPIC
        ]
        if not out_rows:
            continue
        n_topics = unit.centroids.shape[0]
        if method == "centroid":
            sims = np.asarray(unit.tfidf[out_rows] @ unit.centroids.T)
        else:
            profiles = np.zeros((n_topics, unit.counts.shape[1]))
            for i, pid in enumerate(unit.ids):
                topic = mapping[pid]
                if topic != OUTLIER_TOPIC:
                    profiles[topic - unit.topic_offset] += unit.counts.getrow(i).toarray().ravel()
            profiles = _normalize_rows(profiles)
            docs = unit.counts[out_rows].astype(float)
            norms = _row_norms(docs)
            norms[norms == 0] = 1.0
            docs = sp.diags(1.0 / norms) @ docs
            sims = np.asarray(docs @ profiles.T)
        for row_pos, row in enumerate(out_rows):
            mapping[unit.ids[row]] = int(sims[row_pos].argmax()) + unit.topic_offset

    strategy = assignment.strategy
    if strategy is not None:
        strategy = replace(strategy, outlier_reduction=method)
    return TopicAssignment(
        mapping, assignment.scope, assignment.method, strategy, units=assignment.units
    )


# --- histograms -------------------------------------------------------------


def topic_histogram(
    assignment: TopicAssignment,
    bin_ids: Iterable[str],
    include_outliers: bool = False,
) -> TopicHistogram:
    """Topic post-count histogram restricted to one bin's post ids.

    Zero-count topics are dropped and counts come back sorted ascending.
    The outlier topic is excluded unless ``include_outliers`` is set; a bin
    left empty by that policy raises EmptyBinError.
    """
    counts: dict[int, int] = {}
    for post_id in bin_ids:
        try:
            topic = assignment.post_topic[post_id]
        except KeyError:
            raise KeyError(f"post {post_id!r} has no topic assignment") from None
        if topic == OUTLIER_TOPIC and not include_outliers:
            continue
        counts[topic] = counts.get(topic, 0) + 1
    if not counts:
        raise EmptyBinError("empty bin")
    return TopicHistogram.from_counts(counts.values())


# --- label interchange ------------------------------------------------------


def write_topic_labels(assignment: TopicAssignment, path: str | Path) -> None:
    """Export the interchange CSV (post_id,topic_id), sorted by post id."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(LABELS_HEADER)
        for post_id in sorted(assignment.post_topic):
            writer.writerow([post_id, assignment.post_topic[post_id]])


def load_topic_labels(
    path: str | Path, known_ids: set[str], scope: str = "global"
) -> TopicAssignment:
    """Load an interchange CSV, rejecting unknown ids, bad topics, duplicates."""
    mapping: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != LABELS_HEADER:
            raise ValueError(f"{path}: expected header {LABELS_HEADER}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns")
            post_id, raw_topic = row
            try:
                topic = int(raw_topic)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer topic {raw_topic!r}") from None
            if topic < OUTLIER_TOPIC:
                raise ValueError(f"{path}:{lineno}: topic id {topic} below -1")
            if post_id in mapping:
                raise ValueError(f"{path}:{lineno}: duplicate post id {post_id!r}")
            if post_id not in known_ids:
                raise ValueError(f"{path}:{lineno}: unknown post id {post_id!r}")
            mapping[post_id] = topic
    # compact arbitrary external ids to contiguous 0..TC-1 (outlier kept as -1)
    unique = sorted({t for t in mapping.values() if t != OUTLIER_TOPIC})
    remap = {old: new for new, old in enumerate(unique)}
    mapping = {
        pid: (OUTLIER_TOPIC if t == OUTLIER_TOPIC else remap[t])
        for pid, t in mapping.items()
    }
    return TopicAssignment(mapping, scope, "external", source_path=str(path))
