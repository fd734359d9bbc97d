"""Render the weekly-panel and correlation-scatter figures from stage CSVs.

Purely a reporting convenience on top of the delimited outputs: every
figure is derived from CSV files the pipeline already wrote, so plots can
be regenerated without rerunning any analysis.
"""

from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({
    "figure.dpi": 120,
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
})

PANELS = [
    ("a", "posts", "posts per week"),
    ("b", "topics", "topics per week"),
    ("c", "ratio", "topics / posts"),
    ("d", "gini", "Gini index"),
]


def _read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def _week_date(row: dict[str, str]) -> dt.date:
    return dt.date.fromisocalendar(int(row["iso_year"]), int(row["iso_week"]), 1)


def render_weekly_panels(metrics_dir: str | Path, out_path: str | Path) -> Path:
    """Five stacked weekly panels: posts, topics, ratio, Gini, class fractions.

    Panels a-d show the across-community mean with its 95% confidence band;
    the bottom panel shows the global class fractions.
    """
    metrics_dir = Path(metrics_dir)
    out_path = Path(out_path)
    fig, axes = plt.subplots(5, 1, figsize=(8, 11), sharex=True)

    for ax, (tag, name, label) in zip(axes, PANELS):
        rows = _read_rows(metrics_dir / f"panel_{tag}_{name}_aggregate.csv")
        xs, means, lows, highs = [], [], [], []
        for row in rows:
            if not row["mean"]:
                continue
            xs.append(_week_date(row))
            means.append(float(row["mean"]))
            lows.append(float(row["ci_low"]) if row["ci_low"] else float(row["mean"]))
            highs.append(float(row["ci_high"]) if row["ci_high"] else float(row["mean"]))
        ax.plot(xs, means, color="tab:blue", lw=1.2)
        ax.fill_between(xs, lows, highs, color="tab:blue", alpha=0.25, lw=0)
        ax.set_ylabel(label)

    ax = axes[4]
    rows = _read_rows(metrics_dir / "panel_e_fractions_global.csv")
    series = {"frac_true": ("true", "tab:green"),
              "frac_fake": ("fake", "tab:blue"),
              "frac_unverified": ("unverified", "tab:orange")}
    for column, (label, color) in series.items():
        xs = [_week_date(r) for r in rows if r[column]]
        ys = [float(r[column]) for r in rows if r[column]]
        ax.plot(xs, ys, color=color, lw=1.2, label=label)
    ax.set_ylabel("fraction of posts")
    ax.set_ylim(0, 1)
    ax.legend(loc="upper right", ncol=3)
    ax.set_xlabel("week")

    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_correlation_scatter(corr_csv: str | Path, out_path: str | Path) -> Path:
    """Correlation vs community size; significant points (p < .05) in gray."""
    rows = [r for r in _read_rows(Path(corr_csv)) if r["rho"]]
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for significant, color, label in (
        ("true", "dimgray", "p < .05"),
        ("false", "lightsteelblue", "n.s."),
    ):
        pts = [r for r in rows if r["significant"] == significant]
        ax.scatter(
            [int(r["community_size"]) for r in pts],
            [float(r["rho"]) for r in pts],
            s=28, color=color, label=label, edgecolors="none",
        )
    ax.set_xscale("log")
    ax.set_ylim(-1.05, 1.05)
    ax.axhline(0.0, color="black", lw=0.6)
    ax.set_xlabel("community size (posts)")
    ax.set_ylabel("Pearson correlation")
    scheme = rows[0]["scheme"] if rows else "?"
    ax.set_title(f"scheme {scheme}")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
