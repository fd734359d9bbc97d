"""Synthetic stream generator: histogram draws, planted correlation, round-trips.

The Monte-Carlo expectations below were measured with this module's own
generators at the committed seeds (100 draws per case) and frozen with
margin. Note the concentration regime: at alpha = 0.01 most of the 50
topics draw zero posts, and since zero-count topics are dropped, the Gini
of the surviving histogram is capped at 1 - 1/TC_surviving; median G sits
near 0.74 with a fat left tail, not uniformly above 0.7.
"""

import numpy as np
import pytest

from iolkit.correlate import pearson
from iolkit.ingest import bin_weekly, read_posts
from iolkit.metrics import gini
from iolkit.synth import (
    SynthConfig,
    gen_stream,
    gen_topic_counts,
    plant_correlation,
    write_dataset,
)
from iolkit.topics import load_topic_labels, topic_histogram
from iolkit.veracity import load_veracity_labels


# --- gen_topic_counts -----------------------------------------------------------


def test_near_uniform_limit_small_gini():
    for i in range(20):
        hist = gen_topic_counts(50, 10**5, 1e6, seed=np.random.default_rng(i))
        assert gini(hist).value < 0.05


def test_small_alpha_concentrates():
    values = [
        gini(gen_topic_counts(50, 10**5, 0.01, seed=np.random.default_rng(i))).value
        for i in range(100)
    ]
    values = np.array(values)
    assert float(np.median(values)) > 0.65
    assert float(np.mean(values > 0.7)) >= 0.5
    assert float(np.mean(values > 0.45)) >= 0.9


def test_single_topic_histogram():
    hist = gen_topic_counts(1, 500, 1.0, seed=0)
    assert hist.counts == (500,)
    assert gini(hist).value == 0.0


def test_topic_count_cannot_exceed_post_count():
    with pytest.raises(ValueError):
        gen_topic_counts(10, 5, 1.0, seed=0)


def test_histogram_contract():
    hist = gen_topic_counts(20, 1000, 0.5, seed=3)
    assert list(hist.counts) == sorted(hist.counts)
    assert all(c >= 1 for c in hist.counts)
    assert hist.post_count == 1000


# --- plant_correlation ----------------------------------------------------------


def test_plant_noise_free_limit():
    g = np.random.default_rng(3).uniform(0.2, 0.8, size=50)
    planted = plant_correlation(g, 1.0, 0.5, seed=3, amplitude=0.05)
    assert planted.clip_rate == 0.0
    assert pearson(planted.values, g) == pytest.approx(1.0, abs=1e-12)


def test_plant_zero_target_uncorrelated():
    g = np.random.default_rng(7).uniform(0.2, 0.8, size=10**4)
    planted = plant_correlation(g, 0.0, 0.5, seed=7)
    assert abs(pearson(planted.values, g)) <= 2 / np.sqrt(10**4)


def test_plant_target_recovered_across_seeds():
    for seed in range(20):
        g = np.random.default_rng(seed).uniform(0.2, 0.8, size=500)
        planted = plant_correlation(g, 0.9, 0.45, seed=seed + 1)
        assert 0.8 <= pearson(planted.values, g) <= 0.97


def test_plant_reports_clipping():
    g = np.random.default_rng(11).uniform(0.2, 0.8, size=200)
    planted = plant_correlation(g, 0.0, 0.95, seed=11, amplitude=0.4)
    assert planted.clip_rate > 0.0
    assert all(0.0 <= v <= 1.0 for v in planted.values)


def test_plant_rejects_bad_inputs():
    with pytest.raises(ValueError, match="constant"):
        plant_correlation([0.5, 0.5, 0.5], 0.5, 0.5, seed=0)
    with pytest.raises(ValueError):
        plant_correlation([0.1, 0.9], 1.5, 0.5, seed=0)


# --- gen_stream -----------------------------------------------------------------


def test_stream_deterministic_per_seed():
    config = SynthConfig(communities=2, weeks=5, posts_per_week=10, seed=42)
    a = gen_stream(config)
    b = gen_stream(SynthConfig(communities=2, weeks=5, posts_per_week=10, seed=42))
    assert a.posts == b.posts
    assert a.topic_truth.post_topic == b.topic_truth.post_topic
    assert a.veracity_truth.post_class == b.veracity_truth.post_class


def test_stream_spans_configured_weeks():
    config = SynthConfig(communities=3, weeks=52, posts_per_week=5, seed=1)
    stream = gen_stream(config)
    series = bin_weekly(stream.posts, "per_community")
    assert len(series) == 3
    for bs in series.values():
        assert len(bs.bins) == 52
        assert all(len(ids) >= 1 for ids in bs.bins.values())


def test_stream_histograms_match_counting_oracle():
    """Planted weekly histograms equal recounts over the ground-truth labels."""
    config = SynthConfig(communities=2, weeks=8, posts_per_week=20, seed=5)
    stream = gen_stream(config)
    series = bin_weekly(stream.posts, "per_community")
    for name, truth in stream.truth.items():
        bins = series[name]
        for week, planted in zip(truth.weeks, truth.histograms):
            hist = topic_histogram(stream.topic_truth, bins.bins[week])
            assert hist.counts == planted


def test_stream_weekly_fake_counts_match_planted():
    config = SynthConfig(communities=1, weeks=10, posts_per_week=30, seed=9)
    stream = gen_stream(config)
    truth = stream.truth["synth00"]
    bins = bin_weekly(stream.posts, "per_community")["synth00"]
    for week, planted_f, realized_f in zip(truth.weeks, truth.f_planted, truth.f_realized):
        ids = bins.bins[week]
        n_fake = sum(1 for pid in ids if stream.veracity_truth.post_class[pid] == "F")
        assert n_fake / len(ids) == realized_f
        assert abs(realized_f - planted_f) <= 0.5 / len(ids) + 1e-12


def test_dataset_round_trips_through_real_parsers(tmp_path):
    config = SynthConfig(communities=2, weeks=4, posts_per_week=8, seed=3)
    stream = gen_stream(config)
    paths = write_dataset(stream, tmp_path)
    parsed = list(read_posts(paths["posts"]))
    assert parsed == stream.posts
    ids = {p.id for p in parsed}
    topics = load_topic_labels(paths["topic_labels"], ids)
    assert topics.post_topic == stream.topic_truth.post_topic
    veracity = load_veracity_labels(paths["veracity_labels"], ids)
    assert veracity.post_class == stream.veracity_truth.post_class


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(communities=0).validate()
    with pytest.raises(ValueError):
        SynthConfig(alpha=0.0).validate()
    with pytest.raises(ValueError):
        SynthConfig(target_rho=2.0).validate()
    with pytest.raises(ValueError):
        SynthConfig(base_fake_rate=1.5).validate()
