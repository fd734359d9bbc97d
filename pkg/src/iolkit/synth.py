"""Synthetic post streams with known topic structure and planted correlation.

Every knob of the analytics pipeline gets a controllable ground truth here:
weekly topic histograms are Dirichlet-multinomial draws (the concentration
parameter sweeps between even spread and single-topic domination), per-post
texts use disjoint per-topic vocabularies so the builtin clustering can
recover them, and weekly fake fractions are planted with a chosen
correlation against the weekly Gini series. Everything is deterministic per
(config, seed).
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .ingest import Post, WeekKey
from .metrics import gini
from .topics import TopicAssignment, TopicHistogram, write_topic_labels
from .veracity import VeracityAssignment, write_veracity_labels

SECONDS_PER_WEEK = 7 * 86400


@dataclass
class SynthConfig:
    communities: int = 10
    weeks: int = 52
    posts_per_week: float = 40.0  # Poisson mean; draws are clamped to >= 1
    topics_per_community: int = 8
    alpha: float = 0.7  # symmetric Dirichlet concentration over topics
    target_rho: float = 0.9
    base_fake_rate: float = 0.45
    fake_amplitude: float = 0.12
    text_tokens: int = 10  # tokens per post; 0 emits empty texts
    vocab_per_topic: int = 20
    start_iso_year: int = 2020
    start_iso_week: int = 1
    seed: int = 0

    def validate(self) -> None:
        if self.communities < 1 or self.weeks < 1 or self.topics_per_community < 1:
            raise ValueError("communities, weeks and topics_per_community must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if not -1.0 <= self.target_rho <= 1.0:
            raise ValueError("target_rho must lie in [-1, 1]")
        if not 0.0 <= self.base_fake_rate <= 1.0:
            raise ValueError("base_fake_rate must lie in [0, 1]")
        if self.posts_per_week < 1:
            raise ValueError("posts_per_week must be >= 1")


@dataclass
class CommunityTruth:
    weeks: list[WeekKey]
    histograms: list[tuple[int, ...]]  # planted per-week counts, ascending
    gini_values: list[float]
    f_planted: list[float]
    f_realized: list[float]
    clip_rate: float


@dataclass
class SynthStream:
    posts: list[Post]
    topic_truth: TopicAssignment
    veracity_truth: VeracityAssignment
    truth: dict[str, CommunityTruth] = field(default_factory=dict)
    config: SynthConfig | None = None


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _topic_count_draw(
    rng: np.random.Generator, topic_count: int, post_count: int, alpha: float
) -> np.ndarray:
    shares = rng.dirichlet(np.full(topic_count, alpha))
    return rng.multinomial(post_count, shares)


def gen_topic_counts(
    topic_count: int, post_count: int, alpha: float, seed=0
) -> TopicHistogram:
    """One Dirichlet-multinomial histogram draw, zero-count topics dropped."""
    if topic_count > post_count:
        raise ValueError("topic_count cannot exceed post_count")
    draw = _topic_count_draw(_rng(seed), topic_count, post_count, alpha)
    return TopicHistogram.from_counts(draw[draw > 0])


@dataclass
class PlantedFractions:
    values: list[float]
    clip_rate: float


def plant_correlation(
    g_series: Sequence[float],
    target_rho: float,
    base_rate: float,
    seed=0,
    amplitude: float = 0.12,
) -> PlantedFractions:
    """Weekly fractions correlated with a Gini series at a chosen level.

    The series is a linear transform of the standardized Gini values mixed
    with independent Gaussian noise, weighted so the population correlation
    equals ``target_rho``. Values are clipped to [0, 1]; the clipping rate
    is reported (clipping biases the realized correlation toward zero and
    is intentionally not corrected).
    """
    if not -1.0 <= target_rho <= 1.0:
        raise ValueError("target_rho must lie in [-1, 1]")
    g = np.asarray(g_series, dtype=float)
    if g.size < 2 or float(g.std()) == 0.0:
        raise ValueError("constant series")
    rng = _rng(seed)
    z = (g - g.mean()) / g.std()
    noise = rng.standard_normal(g.size)
    mix = target_rho * z + math.sqrt(1.0 - target_rho**2) * noise
    raw = base_rate + amplitude * mix
    clipped = np.clip(raw, 0.0, 1.0)
    clip_rate = float((clipped != raw).mean())
    return PlantedFractions(clipped.tolist(), clip_rate)


def _week_sequence(config: SynthConfig) -> list[WeekKey]:
    weeks = [WeekKey(config.start_iso_year, config.start_iso_week)]
    # probe validity of the configured start week early
    weeks[0].monday()
    for _ in range(config.weeks - 1):
        weeks.append(weeks[-1].next())
    return weeks


def _topic_vocab(community_idx: int, topic: int, size: int) -> list[str]:
    return [f"tok{community_idx:02d}x{topic:02d}x{j:02d}" for j in range(size)]


def gen_stream(config: SynthConfig) -> SynthStream:
    """Generate posts plus ground-truth topic and veracity assignments.

    Per community and week: post count ~ max(1, Poisson), topic histogram
    from the Dirichlet-multinomial, fake count = round(f_t * PC_t) with the
    remainder split between T and U. Post texts draw ``text_tokens`` tokens
    from the post's topic vocabulary (disjoint across topics and
    communities).
    """
    config.validate()
    rng = _rng(config.seed)
    weeks = _week_sequence(config)
    epoch = dt.date(1970, 1, 1)
    week_start_ts = {w: (w.monday() - epoch).days * 86400 for w in weeks}

    posts: list[Post] = []
    topic_map: dict[str, int] = {}
    class_map: dict[str, str] = {}
    truth: dict[str, CommunityTruth] = {}
    topic_offset = 0

    for cidx in range(config.communities):
        community = f"synth{cidx:02d}"
        vocab = [
            _topic_vocab(cidx, t, config.vocab_per_topic)
            for t in range(config.topics_per_community)
        ]

        counts = np.maximum(
            1, rng.poisson(config.posts_per_week, size=config.weeks)
        ).astype(int)
        draws = [
            _topic_count_draw(rng, config.topics_per_community, int(pc), config.alpha)
            for pc in counts
        ]
        g_values = [gini(d[d > 0]).value for d in draws]
        if len(g_values) >= 2 and float(np.std(g_values)) > 0.0:
            planted = plant_correlation(
                g_values, config.target_rho, config.base_fake_rate,
                seed=rng, amplitude=config.fake_amplitude,
            )
        else:
            # degenerate G series (single week, or constant): nothing to
            # correlate against, fall back to independent noise around the base
            noise = rng.standard_normal(len(g_values))
            raw = config.base_fake_rate + config.fake_amplitude * noise
            clipped = np.clip(raw, 0.0, 1.0)
            planted = PlantedFractions(clipped.tolist(), float((clipped != raw).mean()))

        histograms = []
        f_realized = []
        seq = 0
        for widx, week in enumerate(weeks):
            pc = int(counts[widx])
            draw = draws[widx]
            histograms.append(tuple(sorted(int(c) for c in draw[draw > 0])))

            week_topics = np.repeat(np.arange(config.topics_per_community), draw)
            rng.shuffle(week_topics)

            n_fake = int(math.floor(planted.values[widx] * pc + 0.5))
            rest = pc - n_fake
            n_true = int(math.floor(0.5 * rest + 0.5))
            labels = np.array(
                ["F"] * n_fake + ["T"] * n_true + ["U"] * (rest - n_true)
            )
            rng.shuffle(labels)
            f_realized.append(n_fake / pc)

            offsets = rng.integers(0, SECONDS_PER_WEEK, size=pc)
            for i in range(pc):
                post_id = f"{community}-{seq:07d}"
                seq += 1
                topic = int(week_topics[i])
                if config.text_tokens > 0:
                    words = rng.choice(vocab[topic], size=config.text_tokens)
                    text = " ".join(words.tolist())
                else:
                    text = ""
                posts.append(
                    Post(
                        id=post_id,
                        community=community,
                        created_utc=week_start_ts[week] + int(offsets[i]),
                        text=text,
                    )
                )
                topic_map[post_id] = topic + topic_offset
                class_map[post_id] = str(labels[i])

        truth[community] = CommunityTruth(
            weeks=list(weeks),
            histograms=histograms,
            gini_values=g_values,
            f_planted=list(planted.values),
            f_realized=f_realized,
            clip_rate=planted.clip_rate,
        )
        topic_offset += config.topics_per_community

    # topics that never got a post would leave holes in the id space; compact
    # so the ground truth honors the same contiguity contract as fitted labels
    used = sorted(set(topic_map.values()))
    remap = {old: new for new, old in enumerate(used)}
    topic_map = {pid: remap[t] for pid, t in topic_map.items()}

    topic_truth = TopicAssignment(
        topic_map, "per_community", "external", source_path="synthetic"
    )
    veracity_truth = VeracityAssignment(class_map, "external", source_path="synthetic")
    return SynthStream(posts, topic_truth, veracity_truth, truth, config)


# --- serialization ------------------------------------------------------------


def write_dataset(stream: SynthStream, outdir: str | Path) -> dict[str, Path]:
    """Write the NDJSON dump, both label CSVs, and the ground-truth manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "posts": outdir / "posts.ndjson",
        "topic_labels": outdir / "topic_labels.csv",
        "veracity_labels": outdir / "veracity_labels.csv",
        "truth": outdir / "truth.json",
        "training": outdir / "training.csv",
    }

    with open(paths["posts"], "w", encoding="utf-8") as handle:
        for post in stream.posts:
            handle.write(
                json.dumps(
                    {
                        "id": post.id,
                        "subreddit": post.community,
                        "created_utc": post.created_utc,
                        "title": post.text,
                        "selftext": "",
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    write_topic_labels(stream.topic_truth, paths["topic_labels"])
    write_veracity_labels(stream.veracity_truth, paths["veracity_labels"])

    # labeled texts in the training-file shape, for exercising the baseline
    import csv as _csv

    with open(paths["training"], "w", newline="", encoding="utf-8") as handle:
        writer = _csv.writer(handle)
        writer.writerow(["text", "class"])
        for post in stream.posts:
            if post.text:
                writer.writerow([post.text, stream.veracity_truth.post_class[post.id]])

    truth_doc = {
        "config": asdict(stream.config) if stream.config else None,
        "communities": {
            name: {
                "weeks": [[w.iso_year, w.iso_week] for w in ct.weeks],
                "histograms": [list(h) for h in ct.histograms],
                "gini": ct.gini_values,
                "f_planted": ct.f_planted,
                "f_realized": ct.f_realized,
                "clip_rate": ct.clip_rate,
            }
            for name, ct in stream.truth.items()
        },
    }
    with open(paths["truth"], "w", encoding="utf-8") as handle:
        json.dump(truth_doc, handle, sort_keys=True, indent=1)
        handle.write("\n")
    return paths
