from __future__ import annotations

import json
from pathlib import Path

import pytest

from methodactor.dataset import load_archive, load_archive_file
from methodactor.puzzle_core import GameScore, Guess, puzzle_to_record
from methodactor.transcript import Transcript, TranscriptWriter, new_header

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# Red herrings around #430 named in the source: DISNEY CHARACTERS (plus a
# fourth word) and CARTOON CHARACTERS.
DISNEY = Guess(["MICKEY", "DAISY", "BUZZ", "GOOF"])
CARTOON = Guess(["BOO-BOO", "YOGI", "MICKEY", "DAISY"])

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def puzzle430():
    (p,) = load_archive_file(FIXTURES / "archive.json")
    return p


@pytest.fixture(scope="session")
def e2e_puzzles():
    return load_archive_file(FIXTURES / "e2e_puzzles.json")


def synthetic_archive(base, n=100):
    """``n`` copies of ``base`` under ids 1..n; difficulty cycles 1.6, 2.7, 3.2, 4.0 by id % 4."""
    recs = []
    for i in range(1, n + 1):
        rec = puzzle_to_record(base)
        rec["id"], rec["difficulty"] = i, (1.6, 2.7, 3.2, 4.0)[i % 4]
        recs.append(rec)
    return load_archive(json.dumps(recs))


def synthetic_transcript(
    puzzle_id: int,
    correct: int,
    incorrect: int,
    *,
    colors: list[str] | None = None,
    approach: str = "actor",
    aborted: bool = False,
    game_id: str | None = None,
) -> Transcript:
    """A transcript holding only a GameEnded event with the given tallies."""
    solved = correct == 4
    writer = TranscriptWriter(
        new_header(game_id or f"{approach}-{puzzle_id}", puzzle_id, {"approach": approach}, 0)
    )
    writer.emit(
        "GameEnded",
        score=GameScore(solved, solved and incorrect == 0, correct, incorrect).to_dict(),
        aborted=aborted,
        reason="synthetic" if aborted else None,
        status="won" if solved else "lost",
        correct_colors=colors if colors is not None else [],
        auto_completed=False,
    )
    return writer.transcript


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
