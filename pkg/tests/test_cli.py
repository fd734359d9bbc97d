"""Subcommand wiring: staging files, exit codes, manifests, reproducibility."""

import csv
import json
from pathlib import Path

import pytest

from iolkit.cli import EXIT_CONFIG, EXIT_EMPTY, EXIT_OK, main
from iolkit.manifest import read_manifest


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def staged(tmp_path_factory):
    """One small synth dataset pushed through every pipeline stage."""
    root = tmp_path_factory.mktemp("staged")
    data, ing, met, cor = root / "data", root / "ing", root / "met", root / "cor"
    assert run("synth", "--communities", 3, "--weeks", 12, "--posts-per-week", 20,
               "--topics-per-community", 3, "--seed", 11, "--out", data) == EXIT_OK
    assert run("ingest", "--posts", data / "posts.ndjson", "--keywords", "synth",
               "--out", ing) == EXIT_OK
    assert run("metrics", "--index", ing / "posts_index.csv",
               "--topic-labels", data / "topic_labels.csv",
               "--veracity-labels", data / "veracity_labels.csv",
               "--out", met) == EXIT_OK
    assert run("correlate", "--index", ing / "posts_index.csv",
               "--topic-labels-global", data / "topic_labels.csv",
               "--topic-labels-community", data / "topic_labels.csv",
               "--veracity-labels", data / "veracity_labels.csv",
               "--out", cor) == EXIT_OK
    return root


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# --- synth ---------------------------------------------------------------------


def test_synth_repeat_seed_identical_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("synth", "--communities", 2, "--weeks", 6, "--seed", 5,
                   "--out", out) == EXIT_OK
    for name in ("posts.ndjson", "topic_labels.csv", "veracity_labels.csv",
                 "truth.json", "synth.manifest"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_synth_invalid_config_exits_1(tmp_path):
    assert run("synth", "--alpha", 0, "--out", tmp_path / "x") == EXIT_CONFIG


def test_synth_single_week_flows_downstream(tmp_path):
    data, ing = tmp_path / "d", tmp_path / "i"
    assert run("synth", "--communities", 1, "--weeks", 1, "--seed", 2,
               "--out", data) == EXIT_OK
    assert run("ingest", "--posts", data / "posts.ndjson", "--out", ing) == EXIT_OK
    rows = read_csv(ing / "bins.csv")
    assert {r["scope"] for r in rows} == {"global", "synth00"}
    assert all(r["iso_week"] == "1" for r in rows)


# --- ingest --------------------------------------------------------------------


def test_ingest_census_and_partition(staged):
    census = read_csv(staged / "ing" / "census.csv")
    counts = [int(r["post_count"]) for r in census]
    assert counts == sorted(counts, reverse=True)
    index_rows = read_csv(staged / "ing" / "posts_index.csv")
    assert sum(counts) == len(index_rows)
    bins = read_csv(staged / "ing" / "bins.csv")
    global_total = sum(
        int(r["post_count"]) for r in bins if r["scope"] == "global"
    )
    assert global_total == len(index_rows)


def test_ingest_no_matching_communities_exits_2(staged, tmp_path):
    posts = staged / "data" / "posts.ndjson"
    assert run("ingest", "--posts", posts, "--keywords", "nomatch",
               "--out", tmp_path / "e") == EXIT_EMPTY


def test_ingest_missing_required_flag_exits_1(tmp_path):
    assert run("ingest", "--out", tmp_path / "x") == EXIT_CONFIG


def test_ingest_manifest_reproducible(staged, tmp_path):
    posts = staged / "data" / "posts.ndjson"
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("ingest", "--posts", posts, "--keywords", "synth",
                   "--out", out) == EXIT_OK
    assert (a / "ingest.manifest").read_bytes() == (b / "ingest.manifest").read_bytes()
    manifest = read_manifest(a / "ingest.manifest")
    assert manifest["tool"].startswith("iolkit ")
    assert manifest["input.posts"].startswith("sha256:")


# --- topics / classify ----------------------------------------------------------


def test_topics_command_labels_load_back(staged, tmp_path):
    posts = staged / "data" / "posts.ndjson"
    out = tmp_path / "top"
    assert run("topics", "--posts", posts, "--scope", "Ds", "--k", 3,
               "--seed", 4, "--outlier-reduction", "centroid", "--out", out) == EXIT_OK
    labels = read_csv(out / "topic_labels_Ds.csv")
    index_rows = read_csv(staged / "ing" / "posts_index.csv")
    assert len(labels) == len(index_rows)
    assert all(int(r["topic_id"]) >= 0 for r in labels)


def test_classify_train_and_apply(staged, tmp_path):
    data = staged / "data"
    model = tmp_path / "model.joblib"
    out = tmp_path / "cls"
    assert run("classify", "--train-data", data / "training.csv",
               "--model-out", model, "--posts", data / "posts.ndjson",
               "--out", out) == EXIT_OK
    labels = read_csv(out / "veracity_labels.csv")
    assert {r["class"] for r in labels} <= {"F", "T", "U"}
    assert len(labels) == len(read_csv(staged / "ing" / "posts_index.csv"))


def test_classify_without_model_exits_1(staged, tmp_path):
    assert run("classify", "--posts", staged / "data" / "posts.ndjson",
               "--out", tmp_path / "x") == EXIT_CONFIG


# --- metrics ---------------------------------------------------------------------


def test_metrics_panel_rows_per_community(staged):
    met = staged / "met"
    for name in ("panel_a_posts", "panel_b_topics", "panel_c_ratio", "panel_d_gini"):
        rows = read_csv(met / f"{name}_community.csv")
        per_scope = {}
        for r in rows:
            per_scope.setdefault(r["scope"], []).append(r)
        assert set(per_scope) == {"synth00", "synth01", "synth02"}
        assert all(len(v) == 12 for v in per_scope.values())
    agg = read_csv(met / "panel_d_gini_aggregate.csv")
    assert len(agg) == 12
    assert all(r["n"] == "3" for r in agg)


def test_metrics_fraction_files_sum_to_one(staged):
    rows = read_csv(staged / "met" / "fractions_global.csv")
    for r in rows:
        if r["frac_fake"]:
            total = float(r["frac_fake"]) + float(r["frac_true"]) + float(r["frac_unverified"])
            assert abs(total - 1.0) <= 1e-12


def test_metrics_missing_coverage_exits_1(staged, tmp_path):
    ing = staged / "ing"
    data = staged / "data"
    partial = tmp_path / "partial.csv"
    with open(data / "topic_labels.csv") as fh:
        lines = fh.read().splitlines()
    partial.write_text("\n".join(lines[:-1]) + "\n")  # drop one post
    code = run("metrics", "--index", ing / "posts_index.csv",
               "--topic-labels", partial,
               "--veracity-labels", data / "veracity_labels.csv",
               "--out", tmp_path / "m")
    assert code == EXIT_CONFIG


def test_metrics_manifest_reproducible(staged, tmp_path):
    ing, data = staged / "ing", staged / "data"
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("metrics", "--index", ing / "posts_index.csv",
                   "--topic-labels", data / "topic_labels.csv",
                   "--veracity-labels", data / "veracity_labels.csv",
                   "--out", out) == EXIT_OK
    assert (a / "metrics.manifest").read_bytes() == (b / "metrics.manifest").read_bytes()


# --- correlate -------------------------------------------------------------------


def test_correlate_scheme_files(staged):
    for scheme in ("a", "b", "c"):
        rows = read_csv(staged / "cor" / f"scheme_{scheme}.csv")
        assert len(rows) == 3
        for r in rows:
            assert r["scheme"] == scheme
            if r["rho"]:
                assert -1.0 <= float(r["rho"]) <= 1.0
                assert (float(r["p_value"]) < 0.05) == (r["significant"] == "true")


def test_correlate_requires_scheme_inputs(staged, tmp_path):
    ing, data = staged / "ing", staged / "data"
    code = run("correlate", "--index", ing / "posts_index.csv",
               "--veracity-labels", data / "veracity_labels.csv",
               "--schemes", "c", "--out", tmp_path / "c")
    assert code == EXIT_CONFIG


def test_correlate_single_community(tmp_path):
    data, ing, cor = tmp_path / "d", tmp_path / "i", tmp_path / "c"
    assert run("synth", "--communities", 1, "--weeks", 10, "--seed", 3,
               "--out", data) == EXIT_OK
    assert run("ingest", "--posts", data / "posts.ndjson", "--out", ing) == EXIT_OK
    assert run("correlate", "--index", ing / "posts_index.csv",
               "--topic-labels-community", data / "topic_labels.csv",
               "--veracity-labels", data / "veracity_labels.csv",
               "--schemes", "c", "--out", cor) == EXIT_OK
    rows = read_csv(cor / "scheme_c.csv")
    assert len(rows) == 1


# --- config files -----------------------------------------------------------------


def test_config_file_with_flag_override(staged, tmp_path):
    posts = staged / "data" / "posts.ndjson"
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"# ingest settings\nposts = {posts}\nkeywords = nomatch\n"
    )
    # config alone filters everything out; the flag overrides the keyword list
    assert run("ingest", "--config", cfg, "--out", tmp_path / "a") == EXIT_EMPTY
    assert run("ingest", "--config", cfg, "--keywords", "synth",
               "--out", tmp_path / "b") == EXIT_OK


def test_config_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mystery_knob = 7\n")
    assert run("ingest", "--config", cfg, "--out", tmp_path / "x") == EXIT_CONFIG


# --- figures ---------------------------------------------------------------------


def test_figures_rendered(staged, tmp_path):
    out = tmp_path / "figs"
    assert run("figures", "--metrics-dir", staged / "met",
               "--correlations-dir", staged / "cor", "--out", out) == EXIT_OK
    rendered = sorted(p.name for p in out.glob("*.png"))
    assert rendered == ["fig_scheme_a.png", "fig_scheme_b.png",
                        "fig_scheme_c.png", "fig_weekly_panels.png"]
    assert all((out / name).stat().st_size > 1000 for name in rendered)


def test_figures_nothing_to_render(tmp_path):
    assert run("figures", "--out", tmp_path / "figs") == EXIT_CONFIG
