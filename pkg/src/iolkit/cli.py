"""Command-line pipeline: ingest, topics, classify, metrics, correlate, synth.

Subcommands compose through files only (CSV and NDJSON); no state is shared
between invocations. Every option can come from a flat key-value config
file (``--config``), with command-line flags taking precedence. Each run
writes a manifest with the tool version, seed, effective-config hash and
input/output digests: equal manifests certify byte-identical runs.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

from . import __version__
from .config import dump_config, load_config, split_list
from .correlate import SCHEMES, run_scheme, write_correlations_csv
from .ingest import (
    GLOBAL_SCOPE,
    IngestStats,
    bin_weekly,
    bins_from_index,
    community_census,
    filter_communities,
    read_index_csv,
    read_posts,
    write_bins_csv,
    write_census_csv,
    write_index_csv,
)
from .manifest import build_manifest, write_manifest
from .metrics import overload_series, write_overload_csv
from .synth import SynthConfig, gen_stream, write_dataset
from .topics import fit_topics, load_topic_labels, reduce_outliers, write_topic_labels
from .veracity import (
    classify_many,
    fake_fraction,
    load_model,
    load_veracity_labels,
    read_training_csv,
    save_model,
    train_baseline,
    write_fractions_csv,
    write_veracity_labels,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EMPTY = 2


class CliError(Exception):
    """Fatal configuration or validation problem (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are config errors, not "empty result"
        raise CliError(message)


def _resolve(args: argparse.Namespace, defaults: dict, coercers: dict) -> dict:
    """Merge CLI flags over config-file entries over defaults."""
    entries = load_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(entries) - set(defaults)
    if unknown:
        raise CliError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    resolved = {}
    for dest, default in defaults.items():
        cli_value = getattr(args, dest, None)
        if cli_value is not None:
            resolved[dest] = cli_value
        elif dest in entries:
            resolved[dest] = coercers.get(dest, str)(entries[dest])
        else:
            resolved[dest] = default
    return resolved


def _require(resolved: dict, *names: str) -> None:
    for name in names:
        if resolved[name] in (None, "", []):
            raise CliError(f"missing required option: --{name.replace('_', '-')}")


# Locations never influence output bytes (inputs are captured by digest),
# so they stay out of the hashed config: equal manifests must mean equal runs.
_PATH_OPTIONS = frozenset({
    "out", "posts", "index", "topic_labels", "veracity_labels",
    "topic_labels_global", "topic_labels_community", "train_data",
    "model", "model_out", "metrics_dir", "correlations_dir",
})


def _effective_text(command: str, resolved: dict) -> str:
    entries = {"command": command}
    for key, value in resolved.items():
        if key in _PATH_OPTIONS:
            continue
        if isinstance(value, bool):
            entries[key] = str(value).lower()
        elif isinstance(value, (list, tuple)):
            entries[key] = ",".join(str(v) for v in value)
        else:
            entries[key] = "" if value is None else str(value)
    return dump_config(entries)


def _outdir(resolved: dict) -> Path:
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_filtered_posts(resolved: dict) -> list:
    stats = IngestStats()
    posts = read_posts(resolved["posts"], drop_deleted=bool(resolved["drop_deleted"]), stats=stats)
    keywords = resolved["keywords"]
    if keywords:
        posts = filter_communities(posts, keywords)
    return list(posts)


def _bool_flag(parser, name, help_text):
    parser.add_argument(name, action=argparse.BooleanOptionalAction, default=None, help=help_text)


# --- ingest -------------------------------------------------------------------

_INGEST_DEFAULTS = {
    "posts": None, "keywords": [], "drop_deleted": False, "out": None,
}
_INGEST_COERCERS = {"keywords": split_list, "drop_deleted": lambda s: s.lower() == "true"}


def cmd_ingest(args) -> int:
    resolved = _resolve(args, _INGEST_DEFAULTS, _INGEST_COERCERS)
    _require(resolved, "posts", "out")
    out = _outdir(resolved)
    posts = _load_filtered_posts(resolved)
    if not posts:
        print("no posts passed the community filter", file=sys.stderr)
        return EXIT_EMPTY

    per_community = bin_weekly(posts, "per_community")
    global_bins = bin_weekly(posts, GLOBAL_SCOPE)
    series = {**global_bins, **per_community}

    paths = {
        "bins": out / "bins.csv",
        "index": out / "posts_index.csv",
        "census": out / "census.csv",
    }
    write_bins_csv(series, paths["bins"])
    write_index_csv(posts, paths["index"])
    write_census_csv(community_census(posts), paths["census"])

    manifest = build_manifest(
        "ingest", __version__, _effective_text("ingest", resolved), None,
        inputs={"posts": resolved["posts"]}, outputs=paths,
    )
    write_manifest(manifest, out / "ingest.manifest")
    print(f"ingested {len(posts)} posts into {out}")
    return EXIT_OK


# --- topics -------------------------------------------------------------------

_TOPICS_DEFAULTS = {
    "posts": None, "keywords": [], "drop_deleted": False, "out": None,
    "scope": "F", "k": "auto", "tau": 0.1, "outlier_reduction": "none", "seed": 0,
}
_TOPICS_COERCERS = {
    "keywords": split_list, "drop_deleted": lambda s: s.lower() == "true",
    "tau": float, "seed": int,
}


def cmd_topics(args) -> int:
    resolved = _resolve(args, _TOPICS_DEFAULTS, _TOPICS_COERCERS)
    _require(resolved, "posts", "out")
    if resolved["scope"] not in ("F", "Ds"):
        raise CliError("scope must be F (whole dataset) or Ds (per community)")
    out = _outdir(resolved)
    posts = _load_filtered_posts(resolved)
    if not posts:
        print("no posts passed the community filter", file=sys.stderr)
        return EXIT_EMPTY

    k = resolved["k"]
    if k != "auto":
        k = int(k)
    assignment = fit_topics(
        posts, scope=resolved["scope"], k=k,
        seed=int(resolved["seed"]), tau=float(resolved["tau"]),
    )
    if resolved["outlier_reduction"] != "none":
        assignment = reduce_outliers(assignment, resolved["outlier_reduction"])

    labels_path = out / f"topic_labels_{resolved['scope']}.csv"
    write_topic_labels(assignment, labels_path)
    manifest = build_manifest(
        "topics", __version__, _effective_text("topics", resolved), int(resolved["seed"]),
        inputs={"posts": resolved["posts"]}, outputs={"labels": labels_path},
    )
    write_manifest(manifest, out / f"topics_{resolved['scope']}.manifest")
    print(f"wrote {labels_path} ({assignment.topic_count()} topics)")
    return EXIT_OK


# --- classify -----------------------------------------------------------------

_CLASSIFY_DEFAULTS = {
    "train_data": None, "model_out": None, "model": None,
    "posts": None, "keywords": [], "drop_deleted": False, "out": None, "seed": 0,
}
_CLASSIFY_COERCERS = {
    "keywords": split_list, "drop_deleted": lambda s: s.lower() == "true", "seed": int,
}


def cmd_classify(args) -> int:
    resolved = _resolve(args, _CLASSIFY_DEFAULTS, _CLASSIFY_COERCERS)
    trained_path = None
    if resolved["train_data"]:
        _require(resolved, "model_out")
        rows = read_training_csv(resolved["train_data"])
        model = train_baseline(rows, seed=int(resolved["seed"]))
        save_model(model, resolved["model_out"])
        trained_path = resolved["model_out"]
        print(f"trained model on {len(rows)} rows -> {trained_path}")
        if not resolved["posts"]:
            return EXIT_OK
    model_path = trained_path or resolved["model"]
    if not model_path:
        raise CliError("need --model (or --train-data with --model-out) to classify posts")
    _require(resolved, "posts", "out")
    out = _outdir(resolved)
    posts = _load_filtered_posts(resolved)
    if not posts:
        print("no posts passed the community filter", file=sys.stderr)
        return EXIT_EMPTY

    model = load_model(model_path)
    labels = classify_many(model, posts)
    from .veracity import VeracityAssignment

    assignment = VeracityAssignment(
        {p.id: c for p, c in zip(posts, labels)}, "builtin"
    )
    labels_path = out / "veracity_labels.csv"
    write_veracity_labels(assignment, labels_path)
    inputs = {"posts": resolved["posts"], "model": model_path}
    if resolved["train_data"]:
        inputs["train_data"] = resolved["train_data"]
    manifest = build_manifest(
        "classify", __version__, _effective_text("classify", resolved), int(resolved["seed"]),
        inputs=inputs, outputs={"labels": labels_path},
    )
    write_manifest(manifest, out / "classify.manifest")
    print(f"wrote {labels_path} ({len(labels)} posts)")
    return EXIT_OK


# --- metrics ------------------------------------------------------------------

_METRICS_DEFAULTS = {
    "index": None, "topic_labels": None, "veracity_labels": None, "out": None,
    "include_outliers": False, "gini_variant": "exact",
}
_METRICS_COERCERS = {"include_outliers": lambda s: s.lower() == "true"}

_PANEL_NAMES = {"a": "posts", "b": "topics", "c": "ratio", "d": "gini"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _mean_ci(values: list[float]) -> tuple[float | None, float | None, float | None]:
    n = len(values)
    if n == 0:
        return None, None, None
    mean = sum(values) / n
    if n < 2:
        return mean, None, None
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    half = 1.96 * math.sqrt(var / n)
    return mean, mean - half, mean + half


def _write_panel(path, rows, header):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _all_weeks(series_list) -> list:
    weeks = set()
    for series in series_list:
        weeks.update(series)
    return sorted(weeks, key=lambda w: w.monday())


def cmd_metrics(args) -> int:
    resolved = _resolve(args, _METRICS_DEFAULTS, _METRICS_COERCERS)
    _require(resolved, "index", "topic_labels", "veracity_labels", "out")
    out = _outdir(resolved)

    rows = read_index_csv(resolved["index"])
    known_ids = {pid for pid, _, _ in rows}
    topics = load_topic_labels(resolved["topic_labels"], known_ids)
    veracity = load_veracity_labels(resolved["veracity_labels"], known_ids)
    missing_topics = known_ids - set(topics.post_topic)
    if missing_topics:
        raise CliError(
            f"topic labels missing for {len(missing_topics)} post(s), "
            f"e.g. {sorted(missing_topics)[0]!r}"
        )
    missing_classes = known_ids - set(veracity.post_class)
    if missing_classes:
        raise CliError(
            f"veracity labels missing for {len(missing_classes)} post(s), "
            f"e.g. {sorted(missing_classes)[0]!r}"
        )

    per_community = bins_from_index(rows, "per_community")
    global_bins = bins_from_index(rows, GLOBAL_SCOPE)[GLOBAL_SCOPE]

    overload_comm = {
        name: overload_series(
            topics, bins, include_outliers=bool(resolved["include_outliers"]),
            variant=resolved["gini_variant"],
        )
        for name, bins in per_community.items()
    }
    overload_glob = overload_series(
        topics, global_bins, include_outliers=bool(resolved["include_outliers"]),
        variant=resolved["gini_variant"],
    )
    fractions_comm = {
        name: fake_fraction(veracity, bins) for name, bins in per_community.items()
    }
    fractions_glob = fake_fraction(veracity, global_bins)

    paths = {}

    def stage(name, path):
        paths[name] = path
        return path

    write_overload_csv(overload_comm.values(), stage("overload_community", out / "overload_community.csv"))
    write_overload_csv([overload_glob], stage("overload_global", out / "overload_global.csv"))
    write_fractions_csv(fractions_comm.values(), stage("fractions_community", out / "fractions_community.csv"))
    write_fractions_csv([fractions_glob], stage("fractions_global", out / "fractions_global.csv"))

    # Weekly panels a-d: per-community, global, and across-community aggregate.
    def point_value(point, tag):
        if tag == "a":
            return point.post_count
        if point.is_gap:
            return None
        return {"b": point.topic_count, "c": point.ratio, "d": point.gini}[tag]

    header = ["scope", "iso_year", "iso_week", "value"]
    for tag, name in _PANEL_NAMES.items():
        comm_rows = []
        for scope in sorted(overload_comm):
            for week, point in overload_comm[scope].points.items():
                comm_rows.append([scope, week.iso_year, week.iso_week, _fmt(point_value(point, tag))])
        _write_panel(stage(f"panel_{tag}_community", out / f"panel_{tag}_{name}_community.csv"),
                     comm_rows, header)

        glob_rows = [
            [GLOBAL_SCOPE, week.iso_year, week.iso_week, _fmt(point_value(point, tag))]
            for week, point in overload_glob.points.items()
        ]
        _write_panel(stage(f"panel_{tag}_global", out / f"panel_{tag}_{name}_global.csv"),
                     glob_rows, header)

        weeks = _all_weeks([s.points for s in overload_comm.values()])
        agg_rows = []
        for week in weeks:
            values = []
            for series in overload_comm.values():
                point = series.points.get(week)
                if point is None:
                    continue
                value = point_value(point, tag)
                if value is not None:
                    values.append(float(value))
            mean, low, high = _mean_ci(values)
            agg_rows.append([week.iso_year, week.iso_week, len(values),
                             _fmt(mean), _fmt(low), _fmt(high)])
        _write_panel(stage(f"panel_{tag}_aggregate", out / f"panel_{tag}_{name}_aggregate.csv"),
                     agg_rows, ["iso_year", "iso_week", "n", "mean", "ci_low", "ci_high"])

    # Panel e: class fractions.
    frac_header = ["scope", "iso_year", "iso_week", "frac_fake", "frac_true", "frac_unverified"]

    def frac_row(scope, week, fracs):
        if fracs is None:
            return [scope, week.iso_year, week.iso_week, "", "", ""]
        return [scope, week.iso_year, week.iso_week,
                _fmt(fracs.fake), _fmt(fracs.true), _fmt(fracs.unverified)]

    comm_rows = []
    for scope in sorted(fractions_comm):
        series = fractions_comm[scope]
        comm_rows.extend(frac_row(scope, week, series.fractions[week]) for week in series.fractions)
    _write_panel(stage("panel_e_community", out / "panel_e_fractions_community.csv"),
                 comm_rows, frac_header)
    glob_rows = [
        frac_row(GLOBAL_SCOPE, week, fractions_glob.fractions[week])
        for week in fractions_glob.fractions
    ]
    _write_panel(stage("panel_e_global", out / "panel_e_fractions_global.csv"),
                 glob_rows, frac_header)

    weeks = _all_weeks([s.fractions for s in fractions_comm.values()])
    agg_rows = []
    for week in weeks:
        per_class = {"fake": [], "true": [], "unverified": []}
        for series in fractions_comm.values():
            fracs = series.fractions.get(week)
            if fracs is not None:
                per_class["fake"].append(fracs.fake)
                per_class["true"].append(fracs.true)
                per_class["unverified"].append(fracs.unverified)
        row = [week.iso_year, week.iso_week, len(per_class["fake"])]
        for key in ("fake", "true", "unverified"):
            mean, low, high = _mean_ci(per_class[key])
            row.extend([_fmt(mean), _fmt(low), _fmt(high)])
        agg_rows.append(row)
    _write_panel(
        stage("panel_e_aggregate", out / "panel_e_fractions_aggregate.csv"),
        agg_rows,
        ["iso_year", "iso_week", "n",
         "mean_fake", "ci_low_fake", "ci_high_fake",
         "mean_true", "ci_low_true", "ci_high_true",
         "mean_unverified", "ci_low_unverified", "ci_high_unverified"],
    )

    manifest = build_manifest(
        "metrics", __version__, _effective_text("metrics", resolved), None,
        inputs={
            "index": resolved["index"],
            "topic_labels": resolved["topic_labels"],
            "veracity_labels": resolved["veracity_labels"],
        },
        outputs=paths,
    )
    write_manifest(manifest, out / "metrics.manifest")
    print(f"wrote weekly metrics for {len(per_community)} communities to {out}")
    return EXIT_OK


# --- correlate ----------------------------------------------------------------

_CORRELATE_DEFAULTS = {
    "index": None, "topic_labels_global": None, "topic_labels_community": None,
    "veracity_labels": None, "out": None, "schemes": list(SCHEMES),
    "include_outliers": False, "gini_variant": "exact", "min_weeks": 3,
}
_CORRELATE_COERCERS = {
    "schemes": split_list, "include_outliers": lambda s: s.lower() == "true",
    "min_weeks": int,
}


def cmd_correlate(args) -> int:
    resolved = _resolve(args, _CORRELATE_DEFAULTS, _CORRELATE_COERCERS)
    _require(resolved, "index", "veracity_labels", "out")
    schemes = resolved["schemes"]
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise CliError(f"unknown scheme {scheme!r} (choose from {', '.join(SCHEMES)})")
    needs_global = any(s in ("a", "b") for s in schemes)
    needs_community = "c" in schemes
    if needs_global and not resolved["topic_labels_global"]:
        raise CliError("schemes a/b need --topic-labels-global")
    if needs_community and not resolved["topic_labels_community"]:
        raise CliError("scheme c needs --topic-labels-community")
    out = _outdir(resolved)

    rows = read_index_csv(resolved["index"])
    known_ids = {pid for pid, _, _ in rows}
    per_community = bins_from_index(rows, "per_community")
    global_bins = bins_from_index(rows, GLOBAL_SCOPE)[GLOBAL_SCOPE]
    veracity = load_veracity_labels(resolved["veracity_labels"], known_ids)

    topics_global = None
    if resolved["topic_labels_global"]:
        topics_global = load_topic_labels(resolved["topic_labels_global"], known_ids, scope="global")
    topics_community = None
    if resolved["topic_labels_community"]:
        topics_community = load_topic_labels(
            resolved["topic_labels_community"], known_ids, scope="per_community"
        )

    paths = {}
    inputs = {"index": resolved["index"], "veracity_labels": resolved["veracity_labels"]}
    if topics_global is not None:
        inputs["topic_labels_global"] = resolved["topic_labels_global"]
    if topics_community is not None:
        inputs["topic_labels_community"] = resolved["topic_labels_community"]

    for scheme in schemes:
        results = run_scheme(
            scheme, per_community, global_bins, topics_global, topics_community,
            veracity, include_outliers=bool(resolved["include_outliers"]),
            gini_variant=resolved["gini_variant"], min_weeks=int(resolved["min_weeks"]),
        )
        path = out / f"scheme_{scheme}.csv"
        write_correlations_csv(results, path)
        paths[f"scheme_{scheme}"] = path
        usable = sum(1 for r in results if r.rho is not None)
        print(f"scheme {scheme}: {usable}/{len(results)} communities correlated -> {path}")

    manifest = build_manifest(
        "correlate", __version__, _effective_text("correlate", resolved), None,
        inputs=inputs, outputs=paths,
    )
    write_manifest(manifest, out / "correlate.manifest")
    return EXIT_OK


# --- synth --------------------------------------------------------------------

_SYNTH_DEFAULTS = {
    "out": None, "seed": None,
    "communities": 10, "weeks": 52, "posts_per_week": 40.0,
    "topics_per_community": 8, "alpha": 0.7, "target_rho": 0.9,
    "base_fake_rate": 0.45, "fake_amplitude": 0.12,
    "text_tokens": 10, "vocab_per_topic": 20,
    "start_iso_year": 2020, "start_iso_week": 1,
}
_SYNTH_COERCERS = {
    "seed": int, "communities": int, "weeks": int, "posts_per_week": float,
    "topics_per_community": int, "alpha": float, "target_rho": float,
    "base_fake_rate": float, "fake_amplitude": float, "text_tokens": int,
    "vocab_per_topic": int, "start_iso_year": int, "start_iso_week": int,
}


def cmd_synth(args) -> int:
    resolved = _resolve(args, _SYNTH_DEFAULTS, _SYNTH_COERCERS)
    _require(resolved, "out")
    out = _outdir(resolved)
    seed = 0 if resolved["seed"] is None else int(resolved["seed"])
    resolved["seed"] = seed
    config = SynthConfig(
        communities=int(resolved["communities"]),
        weeks=int(resolved["weeks"]),
        posts_per_week=float(resolved["posts_per_week"]),
        topics_per_community=int(resolved["topics_per_community"]),
        alpha=float(resolved["alpha"]),
        target_rho=float(resolved["target_rho"]),
        base_fake_rate=float(resolved["base_fake_rate"]),
        fake_amplitude=float(resolved["fake_amplitude"]),
        text_tokens=int(resolved["text_tokens"]),
        vocab_per_topic=int(resolved["vocab_per_topic"]),
        start_iso_year=int(resolved["start_iso_year"]),
        start_iso_week=int(resolved["start_iso_week"]),
        seed=seed,
    )
    config.validate()
    stream = gen_stream(config)
    paths = write_dataset(stream, out)
    manifest = build_manifest(
        "synth", __version__, _effective_text("synth", resolved), seed,
        inputs={}, outputs=paths,
    )
    write_manifest(manifest, out / "synth.manifest")
    print(f"wrote {len(stream.posts)} synthetic posts to {out}")
    return EXIT_OK


# --- figures ------------------------------------------------------------------

_FIGURES_DEFAULTS = {"metrics_dir": None, "correlations_dir": None, "out": None}


def cmd_figures(args) -> int:
    from .figures import render_correlation_scatter, render_weekly_panels

    resolved = _resolve(args, _FIGURES_DEFAULTS, {})
    _require(resolved, "out")
    out = _outdir(resolved)
    written = []
    if resolved["metrics_dir"]:
        written.append(render_weekly_panels(resolved["metrics_dir"], out / "fig_weekly_panels.png"))
    if resolved["correlations_dir"]:
        for path in sorted(Path(resolved["correlations_dir"]).glob("scheme_*.csv")):
            written.append(
                render_correlation_scatter(path, out / f"fig_{path.stem}.png")
            )
    if not written:
        raise CliError("nothing to render: pass --metrics-dir and/or --correlations-dir")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iolkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"iolkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key-value config file")

    p = sub.add_parser("ingest", help="parse, filter and weekly-bin a post dump")
    add_common(p)
    p.add_argument("--posts", help="NDJSON dump (optionally .gz)")
    p.add_argument("--keywords", type=split_list, help="comma-separated community keywords")
    _bool_flag(p, "--drop-deleted", "drop records with empty text")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("topics", help="fit builtin topics and export the label CSV")
    add_common(p)
    p.add_argument("--posts")
    p.add_argument("--keywords", type=split_list)
    _bool_flag(p, "--drop-deleted", "drop records with empty text")
    p.add_argument("--scope", choices=["F", "Ds"], help="whole dataset (F) or per community (Ds)")
    p.add_argument("--k", help="cluster count or 'auto'")
    p.add_argument("--tau", type=float, help="outlier cosine-similarity threshold")
    p.add_argument("--outlier-reduction", choices=["none", "distribution", "centroid"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("classify", help="train the baseline and/or label posts")
    add_common(p)
    p.add_argument("--train-data", help="training CSV (text,class)")
    p.add_argument("--model-out", help="where to save the trained model artifact")
    p.add_argument("--model", help="existing model artifact to apply")
    p.add_argument("--posts")
    p.add_argument("--keywords", type=split_list)
    _bool_flag(p, "--drop-deleted", "drop records with empty text")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("metrics", help="weekly overload metrics and figure panel CSVs")
    add_common(p)
    p.add_argument("--index", help="posts_index.csv from ingest")
    p.add_argument("--topic-labels")
    p.add_argument("--veracity-labels")
    _bool_flag(p, "--include-outliers", "count outlier posts as a topic")
    p.add_argument("--gini-variant", choices=["exact", "rewritten", "degenerate_approx", "bias_corrected"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("correlate", help="per-community fake-fraction vs Gini correlations")
    add_common(p)
    p.add_argument("--index")
    p.add_argument("--topic-labels-global")
    p.add_argument("--topic-labels-community")
    p.add_argument("--veracity-labels")
    p.add_argument("--schemes", type=split_list, help="subset of a,b,c")
    _bool_flag(p, "--include-outliers", "count outlier posts as a topic")
    p.add_argument("--gini-variant", choices=["exact", "rewritten", "degenerate_approx", "bias_corrected"])
    p.add_argument("--min-weeks", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    add_common(p)
    for name in ("--communities", "--weeks", "--topics-per-community", "--text-tokens",
                 "--vocab-per-topic", "--start-iso-year", "--start-iso-week", "--seed"):
        p.add_argument(name, type=int)
    for name in ("--posts-per-week", "--alpha", "--target-rho", "--base-fake-rate",
                 "--fake-amplitude"):
        p.add_argument(name, type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("figures", help="render figures from stage CSVs")
    add_common(p)
    p.add_argument("--metrics-dir")
    p.add_argument("--correlations-dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
