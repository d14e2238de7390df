"""Single-call-per-guess approaches (Vanilla, CoT, CoT-Scripted, Vanilla-o1) and Oneshot."""

from __future__ import annotations

from typing import Sequence

from ..guess_logic import Abstain, Malformed, parse_guess, parse_solution
from ..puzzle_core import GROUP_COUNT, GameScore, Guess, Puzzle, check_guess
from .config import ApproachId
from .session import GameSession, RestartCapExceeded

MAKE_GUESS_TEMPLATES = {
    ApproachId.VANILLA: "vanilla.make_guess",
    ApproachId.COT: "cot.make_guess",
    ApproachId.COT_SCRIPTED: "cot_scripted.make_guess",
    ApproachId.VANILLA_O1: "vanilla_o1.make_guess",
}


def guess_loop(session: GameSession) -> None:
    """Make-guess call, formatting call, parse, submit; repeat until the game ends."""
    tag = MAKE_GUESS_TEMPLATES[session.cfg.approach]
    restarts = 0
    while not session.over:
        session.emit("StageEntered", stage="make_guess")
        reply = session.ask(tag, session.context())
        formatted = session.ask("format_guess", session.context(notes=reply))
        parsed = parse_guess(formatted, session.state.remaining)
        _log_parse(session, "make_guess", parsed)

        if isinstance(parsed, Guess):
            reason = session.check(parsed)
            if reason is None:
                session.submit(parsed)
                restarts = 0
                continue
            session.reject(parsed, reason.value, "make_guess")

        restarts += 1
        if restarts >= session.cfg.restart_cap:
            raise RestartCapExceeded(f"{restarts} attempts without a valid guess")


def _log_parse(session: GameSession, stage: str, parsed) -> None:
    if isinstance(parsed, Guess):
        session.emit("GuessParsed", stage=stage, result="guess", words=parsed.sorted())
    elif isinstance(parsed, Abstain):
        session.emit("GuessParsed", stage=stage, result="abstain")
    else:
        session.emit("GuessParsed", stage=stage, result="malformed", reason=parsed.reason)


def grade_oneshot(puzzle: Puzzle, groups: Sequence[Guess]) -> tuple[GameScore, list[str | None]]:
    """Grade a whole-puzzle answer: three or more correct groups count as solved.

    Returns the score and, per proposed group, the matched color or ``None``.
    A group proposed twice only counts once.
    """
    colors: list[str | None] = []
    matched = set()
    for guess in groups:
        group = check_guess(puzzle, guess)
        colors.append(group.color.label if group else None)
        if group is not None:
            matched.add(group.color)
    correct = len(matched)
    score = GameScore(
        solved=correct >= GROUP_COUNT - 1,
        perfect=correct == GROUP_COUNT,
        correct_count=correct,
        incorrect_count=GROUP_COUNT - correct,
    )
    return score, colors


def oneshot(session: GameSession) -> tuple[GameScore, list[str]]:
    attempts = 0
    words = sorted(session.puzzle.words)
    while True:
        session.emit("StageEntered", stage="solve")
        reply = session.ask("oneshot", session.context(words))
        formatted = session.ask("format_solution", session.context(words, notes=reply))
        parsed = parse_solution(formatted, session.puzzle.words)
        if isinstance(parsed, Malformed):
            session.emit("GuessParsed", stage="solve", result="malformed", reason=parsed.reason)
            attempts += 1
            if attempts >= session.cfg.restart_cap:
                raise RestartCapExceeded(f"{attempts} malformed solutions")
            continue
        score, colors = grade_oneshot(session.puzzle, parsed)
        session.emit(
            "SolutionGraded",
            groups=[g.sorted() for g in parsed],
            colors=colors,
        )
        seen: list[str] = []
        for c in colors:
            if c is not None and c not in seen:
                seen.append(c)
        return score, seen
