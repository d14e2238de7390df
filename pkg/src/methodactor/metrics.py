"""Scores, ratios and breakdowns computed from finished transcripts.

Everything here is a pure function of transcripts plus the puzzle archive, so
a report recomputed from disk matches the one written at run time.

Aborted games (restart cap hit, provider failure) are counted separately and
left out of every other statistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .dataset import DifficultyBucket, difficulty_bucket
from .puzzle_core import GROUP_COUNT, GroupColor, Puzzle
from .transcript import Transcript


class UnknownPuzzleId(KeyError):
    def __init__(self, puzzle_id: int, game_id: str) -> None:
        self.puzzle_id = puzzle_id
        self.game_id = game_id
        super().__init__(f"transcript {game_id} refers to puzzle {puzzle_id}, which is not in the dataset")


@dataclass(frozen=True)
class BucketRate:
    games: int
    solved: int

    @property
    def solved_pct(self) -> float | None:
        return _pct(self.solved, self.games) if self.games else None

    def to_dict(self) -> dict[str, Any]:
        return {"games": self.games, "solved": self.solved, "solved_pct": self.solved_pct}


@dataclass(frozen=True)
class ColorBreakdown:
    """Correct groups by color, over games that ended with 1 to 3 correct groups."""

    counts: dict[GroupColor, int]
    partial_games: int

    def __getitem__(self, color: GroupColor) -> int:
        return self.counts[color]

    def as_tuple(self) -> tuple[int, int, int, int]:
        return tuple(self.counts[c] for c in GroupColor)  # type: ignore[return-value]

    def to_dict(self) -> dict[str, Any]:
        return {
            "partial_games": self.partial_games,
            **{c.label: self.counts[c] for c in GroupColor},
        }


@dataclass(frozen=True)
class Metrics:
    games: int
    aborted: int
    solved: int
    perfect: int
    total_correct: int
    total_incorrect: int
    buckets: dict[DifficultyBucket, BucketRate]
    colors: ColorBreakdown
    approaches: tuple[str, ...] = field(default=())

    @property
    def puzzles_solved_pct(self) -> float:
        return _pct(self.solved, self.games)

    @property
    def solved_perfectly_pct(self) -> float:
        return _pct(self.perfect, self.games)

    @property
    def good_bad_ratio(self) -> float | None:
        """Correct guesses per incorrect guess; ``None`` when nothing was wrong."""
        if self.total_incorrect == 0:
            return None
        return self.total_correct / self.total_incorrect

    @property
    def good_bad_label(self) -> str:
        return f"{self.total_correct}:{self.total_incorrect}"

    def to_dict(self) -> dict[str, Any]:
        ratio = self.good_bad_ratio
        return {
            "approaches": list(self.approaches),
            "games": self.games,
            "aborted": self.aborted,
            "solved": self.solved,
            "perfect": self.perfect,
            "puzzles_solved_pct": self.puzzles_solved_pct,
            "solved_perfectly_pct": self.solved_perfectly_pct,
            "total_correct_guesses": self.total_correct,
            "total_incorrect_guesses": self.total_incorrect,
            "good_bad_ratio": None if ratio is None else round(ratio, 6),
            "good_bad": self.good_bad_label,
            "buckets": {b.label: self.buckets[b].to_dict() for b in DifficultyBucket},
            "color_breakdown": self.colors.to_dict(),
        }


def _pct(num: int, den: int) -> float:
    return round(100.0 * num / den, 4) if den else 0.0


def _index(dataset: Iterable[Puzzle]) -> dict[int, Puzzle]:
    return {p.id: p for p in dataset}


def _finished(transcripts: Iterable[Transcript], dataset: Sequence[Puzzle]) -> tuple[list[Transcript], int, dict[int, Puzzle]]:
    by_id = _index(dataset)
    done, aborted = [], 0
    for t in transcripts:
        if t.puzzle_id not in by_id:
            raise UnknownPuzzleId(t.puzzle_id, t.game_id)
        if t.aborted:
            aborted += 1
        else:
            done.append(t)
    return done, aborted, by_id


def color_breakdown(transcripts: Iterable[Transcript], dataset: Sequence[Puzzle]) -> ColorBreakdown:
    done, _, _ = _finished(transcripts, dataset)
    counts = {c: 0 for c in GroupColor}
    partial = 0
    for t in done:
        n = t.score.correct_count
        if not 1 <= n <= GROUP_COUNT - 1:
            continue
        partial += 1
        for label in t.ended.get("correct_colors", []):
            counts[GroupColor.parse(label)] += 1
    return ColorBreakdown(counts, partial)


def compute_metrics(transcripts: Iterable[Transcript], dataset: Sequence[Puzzle]) -> Metrics:
    transcripts = list(transcripts)
    done, aborted, by_id = _finished(transcripts, dataset)
    solved = perfect = correct = incorrect = 0
    tally = {b: [0, 0] for b in DifficultyBucket}
    for t in done:
        score = t.score
        solved += score.solved
        perfect += score.perfect
        correct += score.correct_count
        incorrect += score.incorrect_count
        bucket = difficulty_bucket(by_id[t.puzzle_id].difficulty)
        tally[bucket][0] += 1
        tally[bucket][1] += score.solved
    return Metrics(
        games=len(done),
        aborted=aborted,
        solved=solved,
        perfect=perfect,
        total_correct=correct,
        total_incorrect=incorrect,
        buckets={b: BucketRate(*tally[b]) for b in DifficultyBucket},
        colors=color_breakdown(done, dataset),
        approaches=tuple(sorted({t.approach for t in transcripts})),
    )


def game_rows(transcripts: Iterable[Transcript]) -> list[dict[str, Any]]:
    """One summary row per game, sorted by puzzle id then game id."""
    rows = []
    for t in sorted(transcripts, key=lambda t: (t.puzzle_id, t.game_id)):
        end = t.ended or {}
        score = end.get("score", {})
        rows.append(
            {
                "game_id": t.game_id,
                "puzzle_id": t.puzzle_id,
                "approach": t.approach,
                "aborted": t.aborted,
                "reason": end.get("reason"),
                **score,
                "correct_colors": end.get("correct_colors", []),
            }
        )
    return rows


__all__ = [
    "BucketRate",
    "ColorBreakdown",
    "Metrics",
    "UnknownPuzzleId",
    "color_breakdown",
    "compute_metrics",
    "game_rows",
]
