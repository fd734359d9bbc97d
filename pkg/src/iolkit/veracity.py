"""Three-class post veracity: labels, a baseline classifier, and weekly fractions.

Classes are the strict one-letter alphabet F (fake), T (true), U
(unverified). Labels come either from an external interchange CSV or from
the builtin baseline: multinomial logistic regression on word 1-2-gram
TF-IDF features. The baseline is a deterministic, self-contained stand-in;
transformer-grade accuracy is explicitly an external annotator's job.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import joblib
import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.linear_model import LogisticRegression

from .ingest import BinSeries, Post, WeekKey

CLASSES = ("F", "T", "U")
VERACITY_HEADER = ["post_id", "class"]
TRAINING_HEADER = ["text", "class"]
MODEL_FORMAT = "iolkit-veracity-model"
MODEL_VERSION = 1
_TOKEN_PATTERN = r"(?u)\b\w+\b"


@dataclass
class VeracityAssignment:
    post_class: dict[str, str]
    source: str  # "builtin" | "external"
    source_path: str | None = None


class ClassMetrics(NamedTuple):
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassReport:
    per_class: dict[str, ClassMetrics]
    accuracy: float


class ClassFractions(NamedTuple):
    fake: float
    true: float
    unverified: float


@dataclass
class FakeFractionSeries:
    """Weekly class fractions for one scope; zero-post weeks are gaps (None)."""

    scope: str
    post_counts: dict[WeekKey, int] = field(default_factory=dict)
    fractions: dict[WeekKey, ClassFractions | None] = field(default_factory=dict)

    def fake_series(self) -> dict[WeekKey, float]:
        return {w: f.fake for w, f in self.fractions.items() if f is not None}


# --- label interchange ------------------------------------------------------


def load_veracity_labels(path: str | Path, known_ids: set[str]) -> VeracityAssignment:
    """Load post_id,class CSV; strict alphabet, no duplicates, known ids only."""
    mapping: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != VERACITY_HEADER:
            raise ValueError(f"{path}: expected header {VERACITY_HEADER}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns")
            post_id, cls = row
            if cls not in CLASSES:
                raise ValueError(f"{path}:{lineno}: unknown class {cls!r}")
            if post_id in mapping:
                raise ValueError(f"{path}:{lineno}: duplicate post id {post_id!r}")
            if post_id not in known_ids:
                raise ValueError(f"{path}:{lineno}: unknown post id {post_id!r}")
            mapping[post_id] = cls
    return VeracityAssignment(mapping, "external", source_path=str(path))


def write_veracity_labels(assignment: VeracityAssignment, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(VERACITY_HEADER)
        for post_id in sorted(assignment.post_class):
            writer.writerow([post_id, assignment.post_class[post_id]])


def read_training_csv(path: str | Path) -> list[tuple[str, str]]:
    """Read labeled training rows (text,class), validating the class alphabet."""
    rows: list[tuple[str, str]] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != TRAINING_HEADER:
            raise ValueError(f"{path}: expected header {TRAINING_HEADER}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns")
            text, cls = row
            if cls not in CLASSES:
                raise ValueError(f"{path}:{lineno}: unknown class {cls!r}")
            rows.append((text, cls))
    return rows


# --- baseline classifier ----------------------------------------------------


@dataclass
class VeracityModel:
    vectorizer: TfidfVectorizer
    classifier: LogisticRegression
    class_order: tuple[str, ...]
    priors: dict[str, int]
    prior_class: str


def train_baseline(labeled: Sequence[tuple[str, str]], seed: int = 0) -> VeracityModel:
    """Fit the baseline classifier on (text, class) pairs.

    Deterministic given the seed; requires at least two classes and
    nonempty training texts.
    """
    if not labeled:
        raise ValueError("no training data")
    texts = [t for t, _ in labeled]
    classes = [c for _, c in labeled]
    for text, cls in labeled:
        if cls not in CLASSES:
            raise ValueError(f"unknown class {cls!r}")
        if not text.strip():
            raise ValueError("training texts must be nonempty")
    if len(set(classes)) < 2:
        raise ValueError("training data must contain at least two classes")

    vectorizer = TfidfVectorizer(
        lowercase=True, token_pattern=_TOKEN_PATTERN, ngram_range=(1, 2)
    )
    X = vectorizer.fit_transform(texts)
    clf = LogisticRegression(max_iter=1000, random_state=seed)
    clf.fit(X, classes)

    priors = {c: classes.count(c) for c in CLASSES if c in set(classes)}
    # largest training prior wins, ties broken by the fixed order F < T < U
    prior_class = max(priors, key=lambda c: (priors[c], -CLASSES.index(c)))
    return VeracityModel(vectorizer, clf, tuple(clf.classes_), priors, prior_class)


def classify(model: VeracityModel, post: Post | str) -> str:
    """Predict the class of one post; ties resolve in the order F < T < U.

    Texts with no known tokens (including the empty text) fall back to the
    class with the largest training prior.
    """
    return classify_many(model, [post])[0]


def classify_many(model: VeracityModel, posts: Sequence[Post | str]) -> list[str]:
    texts = [p.text if isinstance(p, Post) else p for p in posts]
    X = model.vectorizer.transform(texts)
    nnz = np.diff(X.indptr)
    scores = model.classifier.decision_function(X)
    if scores.ndim == 1:  # binary model: column is the decision for classes_[1]
        scores = np.column_stack([-scores, scores])
    # classes_ is sorted, so argmax's first-wins rule is the F < T < U tie-break
    picks = scores.argmax(axis=1)
    out = []
    for i in range(len(texts)):
        if nnz[i] == 0:
            out.append(model.prior_class)
        else:
            out.append(model.class_order[picks[i]])
    return out


def save_model(model: VeracityModel, path: str | Path) -> None:
    joblib.dump({"format": MODEL_FORMAT, "version": MODEL_VERSION, "model": model}, path)


def load_model(path: str | Path) -> VeracityModel:
    payload = joblib.load(path)
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a veracity model artifact")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {payload.get('version')}")
    return payload["model"]


# --- evaluation -------------------------------------------------------------


def harmonic_f1(precision: float, recall: float) -> float:
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def classification_report(
    predictions: Sequence[str], golds: Sequence[str]
) -> ClassReport:
    """Per-class precision/recall/F1/support from aligned label sequences."""
    if len(predictions) != len(golds):
        raise ValueError("predictions and golds differ in length")
    if not golds:
        raise ValueError("empty label sequences")
    labels = sorted(set(golds) | set(predictions))
    per_class = {}
    correct = 0
    for label in labels:
        tp = sum(1 for p, g in zip(predictions, golds) if p == label and g == label)
        fp = sum(1 for p, g in zip(predictions, golds) if p == label and g != label)
        fn = sum(1 for p, g in zip(predictions, golds) if p != label and g == label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        per_class[label] = ClassMetrics(precision, recall, harmonic_f1(precision, recall), tp + fn)
        correct += tp
    return ClassReport(per_class, correct / len(golds))


# --- weekly fractions -------------------------------------------------------


def fake_fraction(assignment: VeracityAssignment, bins: BinSeries) -> FakeFractionSeries:
    """Weekly F/T/U fractions over one BinSeries; empty weeks become gaps."""
    series = FakeFractionSeries(scope=bins.scope)
    for week, ids in bins.bins.items():
        series.post_counts[week] = len(ids)
        if not ids:
            series.fractions[week] = None
            continue
        tallies = {c: 0 for c in CLASSES}
        for post_id in ids:
            try:
                cls = assignment.post_class[post_id]
            except KeyError:
                raise KeyError(f"post {post_id!r} has no veracity class") from None
            tallies[cls] += 1
        n = len(ids)
        series.fractions[week] = ClassFractions(
            tallies["F"] / n, tallies["T"] / n, tallies["U"] / n
        )
    return series


FRACTIONS_HEADER = [
    "scope", "iso_year", "iso_week", "post_count",
    "frac_fake", "frac_true", "frac_unverified",
]


def write_fractions_csv(series_list: Iterable[FakeFractionSeries], path: str | Path) -> None:
    """Weekly fraction CSV; gap weeks keep their post count but empty fractions."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(FRACTIONS_HEADER)
        for series in series_list:
            for week, count in series.post_counts.items():
                fracs = series.fractions[week]
                if fracs is None:
                    writer.writerow([series.scope, week.iso_year, week.iso_week, count, "", "", ""])
                else:
                    writer.writerow([
                        series.scope, week.iso_year, week.iso_week, count,
                        repr(fracs.fake), repr(fracs.true), repr(fracs.unverified),
                    ])
