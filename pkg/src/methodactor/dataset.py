"""Puzzle archive loading and difficulty buckets."""

from __future__ import annotations

import enum
import json
from collections import Counter
from pathlib import Path
from typing import IO, Iterable

from .puzzle_core import Puzzle, PuzzleError, puzzle_to_record, validate_puzzle

__all__ = [
    "ArchiveError",
    "ParseError",
    "ValidationError",
    "DuplicateId",
    "DifficultyBucket",
    "load_archive",
    "load_archive_file",
    "dump_archive",
    "difficulty_bucket",
    "dataset_summary",
]


class ArchiveError(ValueError):
    pass


class ParseError(ArchiveError):
    def __init__(self, message: str, offset: int) -> None:
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class ValidationError(ArchiveError):
    def __init__(self, puzzle_id: object, cause: PuzzleError) -> None:
        self.puzzle_id = puzzle_id
        self.cause = cause
        super().__init__(f"puzzle {puzzle_id}: {cause}")


class DuplicateId(ArchiveError):
    def __init__(self, puzzle_id: int) -> None:
        self.puzzle_id = puzzle_id
        super().__init__(f"duplicate puzzle id {puzzle_id}")


class DifficultyBucket(enum.IntEnum):
    BELOW_2_5 = 0
    FROM_2_5_TO_3 = 1
    FROM_3_TO_3_5 = 2
    ABOVE_3_5 = 3

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    DifficultyBucket.BELOW_2_5: "<2.5",
    DifficultyBucket.FROM_2_5_TO_3: "2.5-3",
    DifficultyBucket.FROM_3_TO_3_5: "3-3.5",
    DifficultyBucket.ABOVE_3_5: ">=3.5",
}


def difficulty_bucket(rating: float) -> DifficultyBucket:
    """Half-open buckets ``[0, 2.5) [2.5, 3) [3, 3.5) [3.5, inf)``."""
    if rating <= 0:
        raise ValueError(f"non-positive rating {rating}")
    if rating < 2.5:
        return DifficultyBucket.BELOW_2_5
    if rating < 3.0:
        return DifficultyBucket.FROM_2_5_TO_3
    if rating < 3.5:
        return DifficultyBucket.FROM_3_TO_3_5
    return DifficultyBucket.ABOVE_3_5


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def load_archive(source: IO[bytes] | bytes | str) -> list[Puzzle]:
    """Parse a JSON archive into validated puzzles sorted by id."""
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("invalid UTF-8", exc.start) from None
    else:
        text = source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, _byte_offset(text, exc.pos)) from None
    if not isinstance(data, list):
        raise ParseError("archive must be a JSON array", 0)

    puzzles: dict[int, Puzzle] = {}
    for index, record in enumerate(data):
        if not isinstance(record, dict):
            raise ValidationError(f"#{index}", PuzzleError(f"[{index}]", "record is not an object"))
        try:
            puzzle = validate_puzzle(record)
        except PuzzleError as exc:
            raise ValidationError(record.get("id", f"#{index}"), exc) from exc
        if puzzle.id in puzzles:
            raise DuplicateId(puzzle.id)
        puzzles[puzzle.id] = puzzle
    return [puzzles[k] for k in sorted(puzzles)]


def load_archive_file(path: str | Path) -> list[Puzzle]:
    with open(path, "rb") as fh:
        return load_archive(fh)


def dump_archive(puzzles: Iterable[Puzzle]) -> str:
    return json.dumps([puzzle_to_record(p) for p in puzzles], indent=2, ensure_ascii=False) + "\n"


def dataset_summary(puzzles: Iterable[Puzzle]) -> dict[DifficultyBucket, int]:
    counts = Counter(difficulty_bucket(p.difficulty) for p in puzzles)
    return {b: counts.get(b, 0) for b in DifficultyBucket}
