"""Connections domain types and the game state machine.

Words are plain ``str`` values in canonical form (see :func:`canonical_word`).
Guesses compare as sets, so ``Guess(["A", "B", "C", "D"])`` equals any
permutation of the same four words.
"""

from __future__ import annotations

import datetime as dt
import enum
import re
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping

__all__ = [
    "GroupColor",
    "SolutionGroup",
    "Puzzle",
    "Guess",
    "GameStatus",
    "GameState",
    "GameScore",
    "InvalidReason",
    "SubmitResult",
    "PuzzleError",
    "DuplicateWord",
    "WrongGroupCount",
    "WrongGroupSize",
    "MissingColor",
    "DifficultyOutOfRange",
    "WordNotInPuzzle",
    "GameOver",
    "canonical_word",
    "validate_puzzle",
    "puzzle_to_record",
    "new_game",
    "check_guess",
    "invalid_reason",
    "submit_guess",
    "auto_complete",
    "game_score",
]

GUESS_SIZE = 4
GROUP_COUNT = 4
MAX_INCORRECT = 4

_SPACES = re.compile(r"\s+")


class PuzzleError(ValueError):
    """Raised when a puzzle record cannot be turned into a valid Puzzle."""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


class DuplicateWord(PuzzleError):
    pass


class WrongGroupCount(PuzzleError):
    pass


class WrongGroupSize(PuzzleError):
    pass


class MissingColor(PuzzleError):
    pass


class DifficultyOutOfRange(PuzzleError):
    pass


class WordNotInPuzzle(ValueError):
    def __init__(self, words: Iterable[str]) -> None:
        self.words = sorted(words)
        super().__init__(f"not in puzzle: {', '.join(self.words)}")


class GameOver(RuntimeError):
    pass


def canonical_word(text: str) -> str:
    """Uppercase, trim and collapse internal whitespace. Hyphens are kept."""
    word = _SPACES.sub(" ", str(text).strip()).upper()
    if not word:
        raise ValueError("empty word")
    return word


class GroupColor(enum.IntEnum):
    """Group colors, ordered from easiest to hardest."""

    YELLOW = 0
    GREEN = 1
    BLUE = 2
    PURPLE = 3

    @classmethod
    def parse(cls, name: str) -> GroupColor:
        try:
            return cls[str(name).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown color {name!r}") from None

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Guess:
    words: frozenset[str]

    def __init__(self, words: Iterable[str]) -> None:
        canon = [canonical_word(w) for w in words]
        ws = frozenset(canon)
        if len(canon) != GUESS_SIZE or len(ws) != GUESS_SIZE:
            raise ValueError(f"a guess needs {GUESS_SIZE} distinct words, got {canon}")
        object.__setattr__(self, "words", ws)

    def sorted(self) -> list[str]:
        return sorted(self.words)

    def __str__(self) -> str:
        return ", ".join(self.sorted())

    def isdisjoint(self, other: Guess) -> bool:
        return self.words.isdisjoint(other.words)


@dataclass(frozen=True)
class SolutionGroup:
    category: str
    color: GroupColor
    words: frozenset[str]

    @property
    def guess(self) -> Guess:
        return Guess(self.words)


@dataclass(frozen=True)
class Puzzle:
    id: int
    date: dt.date
    groups: tuple[SolutionGroup, ...]
    difficulty: float

    @property
    def words(self) -> frozenset[str]:
        return frozenset().union(*(g.words for g in self.groups))

    def group(self, color: GroupColor) -> SolutionGroup:
        return next(g for g in self.groups if g.color == color)

    def board(self) -> list[str]:
        """All 16 words, grouped by color then alphabetical."""
        return [w for g in self.groups for w in sorted(g.words)]


def validate_puzzle(record: Mapping[str, Any]) -> Puzzle:
    """Build a canonical :class:`Puzzle` from a raw archive record."""
    for key in ("id", "date", "difficulty", "groups"):
        if key not in record:
            raise PuzzleError(key, "missing field")
    try:
        pid = int(record["id"])
    except (TypeError, ValueError):
        raise PuzzleError("id", f"not an integer: {record['id']!r}") from None
    try:
        date = dt.date.fromisoformat(str(record["date"]))
    except ValueError:
        raise PuzzleError("date", f"not an ISO date: {record['date']!r}") from None
    try:
        difficulty = float(record["difficulty"])
    except (TypeError, ValueError):
        raise PuzzleError("difficulty", f"not a number: {record['difficulty']!r}") from None
    if not 1.0 <= difficulty <= 5.0:
        raise DifficultyOutOfRange("difficulty", f"{difficulty} outside [1.0, 5.0]")

    raw_groups = record["groups"]
    if not isinstance(raw_groups, list) or len(raw_groups) != GROUP_COUNT:
        n = len(raw_groups) if isinstance(raw_groups, list) else "non-list"
        raise WrongGroupCount("groups", f"expected {GROUP_COUNT} groups, got {n}")

    seen: dict[str, str] = {}
    groups: list[SolutionGroup] = []
    for gi, raw in enumerate(raw_groups):
        where = f"groups[{gi}]"
        try:
            color = GroupColor.parse(raw["color"])
        except (KeyError, ValueError) as exc:
            raise MissingColor(f"{where}.color", str(exc)) from None
        words = raw.get("words")
        if not isinstance(words, list) or len(words) != GUESS_SIZE:
            n = len(words) if isinstance(words, list) else "non-list"
            raise WrongGroupSize(f"{where}.words", f"expected {GUESS_SIZE} words, got {n}")
        canon: list[str] = []
        for wi, w in enumerate(words):
            try:
                cw = canonical_word(w)
            except ValueError:
                raise WrongGroupSize(f"{where}.words[{wi}]", "empty word") from None
            if cw in seen:
                raise DuplicateWord(f"{where}.words[{wi}]", f"{cw} already used in {seen[cw]}")
            seen[cw] = where
            canon.append(cw)
        category = str(raw.get("category", "")).strip()
        groups.append(SolutionGroup(category, color, frozenset(canon)))

    colors = {g.color for g in groups}
    missing = [c.label for c in GroupColor if c not in colors]
    if missing:
        raise MissingColor("groups", f"no group for color(s) {', '.join(missing)}")
    groups.sort(key=lambda g: g.color)
    return Puzzle(pid, date, tuple(groups), difficulty)


def puzzle_to_record(puzzle: Puzzle) -> dict[str, Any]:
    return {
        "id": puzzle.id,
        "date": puzzle.date.isoformat(),
        "difficulty": puzzle.difficulty,
        "groups": [
            {"category": g.category, "color": g.color.label, "words": sorted(g.words)}
            for g in puzzle.groups
        ],
    }


def check_guess(puzzle: Puzzle, guess: Guess) -> SolutionGroup | None:
    """Return the solution group the guess matches, or ``None`` if incorrect."""
    stray = guess.words - puzzle.words
    if stray:
        raise WordNotInPuzzle(stray)
    for group in puzzle.groups:
        if group.words == guess.words:
            return group
    return None


class GameStatus(str, enum.Enum):
    IN_PROGRESS = "in_progress"
    WON = "won"
    LOST = "lost"


class InvalidReason(str, enum.Enum):
    NOT_IN_REMAINING = "not_in_remaining"
    REPEATED_INCORRECT = "repeated_incorrect"


@dataclass(frozen=True)
class SubmitResult:
    """What happened to one submission: ``correct``, ``incorrect`` or ``invalid``."""

    status: str
    group: SolutionGroup | None = None
    reason: InvalidReason | None = None

    @property
    def correct(self) -> bool:
        return self.status == "correct"


@dataclass(frozen=True)
class GameState:
    puzzle: Puzzle
    remaining: frozenset[str]
    correct: tuple[tuple[Guess, SolutionGroup], ...] = ()
    incorrect: tuple[Guess, ...] = ()
    status: GameStatus = GameStatus.IN_PROGRESS
    auto_completed: bool = field(default=False)

    @property
    def solved_groups(self) -> list[SolutionGroup]:
        return [g for _, g in self.correct]

    @property
    def is_over(self) -> bool:
        return self.status is not GameStatus.IN_PROGRESS


def new_game(puzzle: Puzzle) -> GameState:
    return GameState(puzzle=puzzle, remaining=puzzle.words)


def invalid_reason(state: GameState, guess: Guess) -> InvalidReason | None:
    """Why ``guess`` may not be submitted in ``state``, or ``None`` if it may."""
    if not guess.words <= state.remaining:
        return InvalidReason.NOT_IN_REMAINING
    if guess in state.incorrect:
        return InvalidReason.REPEATED_INCORRECT
    return None


def _status(correct: int, incorrect: int) -> GameStatus:
    if correct == GROUP_COUNT:
        return GameStatus.WON
    if incorrect >= MAX_INCORRECT:
        return GameStatus.LOST
    return GameStatus.IN_PROGRESS


def submit_guess(state: GameState, guess: Guess) -> tuple[GameState, SubmitResult]:
    if state.is_over:
        raise GameOver(f"game already {state.status.value}")
    reason = invalid_reason(state, guess)
    if reason is not None:
        return state, SubmitResult("invalid", reason=reason)
    group = check_guess(state.puzzle, guess)
    if group is None:
        incorrect = state.incorrect + (guess,)
        new = replace(state, incorrect=incorrect, status=_status(len(state.correct), len(incorrect)))
        return new, SubmitResult("incorrect")
    correct = state.correct + ((guess, group),)
    new = replace(
        state,
        remaining=state.remaining - guess.words,
        correct=correct,
        status=_status(len(correct), len(state.incorrect)),
    )
    return new, SubmitResult("correct", group=group)


def auto_complete(state: GameState) -> GameState:
    """Submit the last group once three are solved; otherwise return ``state``."""
    if state.status is not GameStatus.IN_PROGRESS or len(state.correct) != GROUP_COUNT - 1:
        return state
    new, result = submit_guess(state, Guess(state.remaining))
    # the last four words always form the remaining group
    assert result.correct
    return replace(new, auto_completed=True)


@dataclass(frozen=True)
class GameScore:
    solved: bool
    perfect: bool
    correct_count: int
    incorrect_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "solved": self.solved,
            "perfect": self.perfect,
            "correct_count": self.correct_count,
            "incorrect_count": self.incorrect_count,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> GameScore:
        return cls(
            bool(data["solved"]),
            bool(data["perfect"]),
            int(data["correct_count"]),
            int(data["incorrect_count"]),
        )


def game_score(state: GameState) -> GameScore:
    solved = state.status is GameStatus.WON
    return GameScore(
        solved=solved,
        perfect=solved and not state.incorrect,
        correct_count=len(state.correct),
        incorrect_count=len(state.incorrect),
    )
