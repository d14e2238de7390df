"""report.json, report.csv and the two summary figures.

The JSON and CSV carry no timestamps or provider details, so a replayed run
writes byte-identical files to the run it replays.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

from .dataset import DifficultyBucket  # noqa: E402
from .metrics import Metrics, game_rows  # noqa: E402
from .puzzle_core import GroupColor  # noqa: E402
from .transcript import Transcript  # noqa: E402

CSV_COLUMNS = (
    "approach",
    "puzzles",
    "solved_pct",
    "perfect_pct",
    "correct_total",
    "incorrect_total",
    *(f"solved_pct_{b.label}" for b in DifficultyBucket),
)

# NYT tile colors, reused for the per-color panel
_TILE = {
    GroupColor.YELLOW: "#f9df6d",
    GroupColor.GREEN: "#a0c35a",
    GroupColor.BLUE: "#b0c4ef",
    GroupColor.PURPLE: "#ba81c5",
}

Run = tuple[Metrics, Sequence[Transcript]]


def run_label(metrics: Metrics) -> str:
    return "+".join(metrics.approaches) or "empty"


def csv_row(metrics: Metrics) -> dict[str, object]:
    row: dict[str, object] = {
        "approach": run_label(metrics),
        "puzzles": metrics.games,
        "solved_pct": metrics.puzzles_solved_pct,
        "perfect_pct": metrics.solved_perfectly_pct,
        "correct_total": metrics.total_correct,
        "incorrect_total": metrics.total_incorrect,
    }
    for b in DifficultyBucket:
        pct = metrics.buckets[b].solved_pct
        row[f"solved_pct_{b.label}"] = "" if pct is None else pct
    return row


def render_csv(runs: Sequence[Metrics]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for m in runs:
        writer.writerow(csv_row(m))
    return buf.getvalue()


def render_json(runs: Sequence[Run]) -> str:
    payload = {
        "runs": [
            {"approach": run_label(m), "metrics": m.to_dict(), "games": game_rows(ts)}
            for m, ts in runs
        ]
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def plot_good_bad(runs: Sequence[Metrics], path: Path) -> Path:
    labels = [run_label(m) for m in runs]
    good = [m.total_correct for m in runs]
    bad = [m.total_incorrect for m in runs]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(runs) + 2), 3.5))
    ax.bar(labels, good, color="#4c9a2a", label="correct")
    ax.bar(labels, bad, bottom=good, color="#c0392b", label="incorrect")
    for i, (g, b) in enumerate(zip(good, bad)):
        ax.text(i, g + b, f"{g}:{b}", ha="center", va="bottom", fontsize=8)
    ax.set_ylim(0, max([g + b for g, b in zip(good, bad)] + [1]) * 1.25)
    ax.set_ylabel("guesses submitted")
    ax.set_title("Correct and incorrect guesses")
    ax.legend(frameon=False, fontsize=8, loc="upper left", ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_buckets(runs: Sequence[Metrics], path: Path) -> Path:
    buckets = list(DifficultyBucket)
    width = 0.8 / max(1, len(runs))
    fig, (ax, cax) = plt.subplots(1, 2, figsize=(9, 3.5), gridspec_kw={"width_ratios": [3, 2]})
    for i, m in enumerate(runs):
        xs = [j + i * width for j in range(len(buckets))]
        ys = [m.buckets[b].solved_pct or 0.0 for b in buckets]
        ax.bar(xs, ys, width=width, label=run_label(m))
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(buckets))])
    ax.set_xticklabels([b.label for b in buckets], fontsize=8)
    ax.set_ylim(0, 118)
    ax.set_ylabel("puzzles solved (%)")
    ax.set_xlabel("difficulty rating")
    ax.legend(frameon=False, fontsize=8, loc="upper left", ncol=min(4, len(runs)))

    for i, m in enumerate(runs):
        xs = [j + i * width for j in range(len(GroupColor))]
        ys = [m.colors[c] for c in GroupColor]
        cax.bar(xs, ys, width=width, color=[_TILE[c] for c in GroupColor], edgecolor="black", linewidth=0.5)
    cax.set_xticks([j + 0.4 - width / 2 for j in range(len(GroupColor))])
    cax.set_xticklabels([c.label for c in GroupColor], fontsize=8)
    top = max([m.colors[c] for m in runs for c in GroupColor] + [1])
    cax.set_ylim(0, top * 1.1)
    cax.yaxis.set_major_locator(MaxNLocator(integer=True))
    cax.set_title("correct groups in partial solves", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(out: str | Path, runs: Sequence[Run]) -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    metrics = [m for m, _ in runs]
    json_path = out / "report.json"
    csv_path = out / "report.csv"
    json_path.write_text(render_json(runs), encoding="utf-8")
    csv_path.write_text(render_csv(metrics), encoding="utf-8")
    return [
        json_path,
        csv_path,
        plot_good_bad(metrics, out / "good_bad.png"),
        plot_buckets(metrics, out / "buckets.png"),
    ]


__all__ = ["CSV_COLUMNS", "csv_row", "render_csv", "render_json", "write_report"]
