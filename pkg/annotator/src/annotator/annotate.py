"""Topic and veracity annotation over an ingested post dump.

Topic mode embeds documents with the configured backend and k-means
clusters them, either once over the whole dump (scope F) or per community
(scope Ds), with distribution- ("d") or embedding-based ("e") outlier
reassignment. Veracity mode runs a three-class sequence classifier. Both
emit the interchange CSVs the analytics toolkit loads back verbatim.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .encoders import resolve_encoder
from .job import AnnotationJob, JobError, Record, read_records, write_labels_atomic

TOPIC_HEADER = ["post_id", "topic_id"]
VERACITY_HEADER = ["post_id", "class"]
MAX_AUTO_TOPICS = 200

_NAME_ALIASES = {
    "f": "F", "fake": "F", "false": "F",
    "t": "T", "true": "T", "real": "T",
    "u": "U", "unverified": "U", "unknown": "U",
}


def _auto_topics(n: int) -> int:
    return min(MAX_AUTO_TOPICS, max(2, round(math.sqrt(n / 2))))


def _normalize(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


def _cluster_group(records: list[Record], encoder, job: AnnotationJob) -> dict[str, int]:
    from sklearn.cluster import KMeans
    from sklearn.feature_extraction.text import CountVectorizer

    embeddings = _normalize(encoder.encode([r.text for r in records], job.batch_size))
    n = len(records)
    k = _auto_topics(n) if job.topics == "auto" else int(job.topics)
    k = max(1, min(k, n))
    kmeans = KMeans(n_clusters=k, random_state=job.seed, n_init=10)
    labels = kmeans.fit_predict(embeddings)
    centroids = _normalize(kmeans.cluster_centers_)

    own_sim = np.einsum("ij,ij->i", embeddings, centroids[labels])
    outliers = (own_sim < job.tau) if k > 1 else np.zeros(n, dtype=bool)

    if outliers.any() and job.outlier_reduction == "e":
        sims = embeddings[outliers] @ centroids.T
        labels[outliers] = sims.argmax(axis=1)
        outliers[:] = False
    elif outliers.any() and job.outlier_reduction == "d":
        counter = CountVectorizer(lowercase=True, token_pattern=r"(?u)\b\w+\b")
        try:
            counts = counter.fit_transform([r.text for r in records]).astype(float)
        except ValueError:
            counts = None
        if counts is None:
            # nothing tokenizable anywhere: fall back to embedding distance
            sims = embeddings[outliers] @ centroids.T
            labels[outliers] = sims.argmax(axis=1)
        else:
            profiles = np.zeros((k, counts.shape[1]))
            for cluster in range(k):
                members = np.flatnonzero((labels == cluster) & ~outliers)
                if members.size:
                    profiles[cluster] = counts[members].sum(axis=0)
            profiles = _normalize(profiles)
            docs = _normalize(np.asarray(counts[np.flatnonzero(outliers)].todense()))
            labels[outliers] = (docs @ profiles.T).argmax(axis=1)
        outliers[:] = False

    surviving = sorted(set(int(t) for t, out in zip(labels, outliers) if not out))
    remap = {old: new for new, old in enumerate(surviving)}
    return {
        record.id: (-1 if out else remap[int(label)])
        for record, label, out in zip(records, labels, outliers)
    }


def annotate_topics(job: AnnotationJob) -> Path:
    encoder = resolve_encoder(job.model)  # resolve before touching any files
    records = read_records(job.posts)

    if job.scope == "Ds":
        groups: dict[str, list[Record]] = {}
        for record in records:
            groups.setdefault(record.community, []).append(record)
        mapping: dict[str, int] = {}
        offset = 0
        for name in sorted(groups):
            local = _cluster_group(groups[name], encoder, job)
            used = {t for t in local.values() if t != -1}
            mapping.update({
                pid: (t if t == -1 else t + offset) for pid, t in local.items()
            })
            offset += len(used)
    else:
        mapping = _cluster_group(records, encoder, job)

    write_labels_atomic(
        job.output, TOPIC_HEADER,
        ([pid, mapping[pid]] for pid in sorted(mapping)),
    )
    return job.output


def _resolve_label_map(config, explicit: dict[str, str]) -> dict[int, str]:
    id2label = {int(i): str(name) for i, name in config.id2label.items()}
    resolved: dict[int, str] = {}
    for idx, name in id2label.items():
        if explicit:
            target = explicit.get(name) or explicit.get(str(idx))
        elif name.upper() in ("F", "T", "U"):
            target = name.upper()
        else:
            target = _NAME_ALIASES.get(name.lower())
        if target is None:
            raise JobError(
                f"cannot map model label {name!r} to F/T/U; provide label_map"
            )
        resolved[idx] = target
    return resolved


def annotate_veracity(job: AnnotationJob) -> Path:
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    name = job.model.removeprefix("hf:")
    try:
        tokenizer = AutoTokenizer.from_pretrained(name)
        model = AutoModelForSequenceClassification.from_pretrained(name)
    except Exception as exc:
        raise JobError(f"cannot resolve classifier model {name!r}: {exc}") from exc
    model.eval()
    label_map = _resolve_label_map(model.config, job.label_map)

    records = read_records(job.posts)
    classes: list[str] = []
    for start in range(0, len(records), job.batch_size):
        batch = [r.text for r in records[start:start + job.batch_size]]
        encoded = tokenizer(
            batch, return_tensors="pt", padding=True, truncation=True, max_length=256
        )
        with torch.no_grad():
            logits = model(**encoded).logits
        classes.extend(label_map[int(i)] for i in logits.argmax(dim=1))

    rows = sorted(zip((r.id for r in records), classes))
    write_labels_atomic(job.output, VERACITY_HEADER, rows)
    return job.output


def run_job(job: AnnotationJob) -> Path:
    if job.mode == "topics":
        return annotate_topics(job)
    return annotate_veracity(job)
