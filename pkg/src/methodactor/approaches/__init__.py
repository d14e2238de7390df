"""The eight solver approaches and the :func:`play` entry point."""

from __future__ import annotations

import logging
from pathlib import Path

from ..provider import CompletionProvider
from ..puzzle_core import Puzzle
from ..transcript import Transcript, TranscriptWriter, new_header
from .actor import StagedPipeline
from .config import ApproachConfig, ApproachId, default_model
from .loops import MAKE_GUESS_TEMPLATES, grade_oneshot, guess_loop, oneshot
from .session import GameSession, RestartCapExceeded

log = logging.getLogger(__name__)

__all__ = [
    "ApproachConfig",
    "ApproachId",
    "GameSession",
    "RestartCapExceeded",
    "default_model",
    "grade_oneshot",
    "play",
    "run_guess_loop",
    "run_oneshot",
    "run_actor",
    "run_actor2",
    "run_actor_o1",
]


def play(
    puzzle: Puzzle,
    provider: CompletionProvider,
    cfg: ApproachConfig,
    *,
    path: str | Path | None = None,
    game_id: str | None = None,
    rng_seed: int | None = None,
) -> Transcript:
    """Play one game and return its transcript.

    A game that hits its restart cap ends as an aborted loss. Any other
    exception (provider failures) is written to the transcript as an abort
    and then re-raised.
    """
    seed = cfg.rng_seed if rng_seed is None else rng_seed
    gid = game_id or f"{cfg.approach.value}-{puzzle.id}"
    writer = TranscriptWriter(new_header(gid, puzzle.id, cfg.to_dict(), seed), path)
    session = GameSession(puzzle, provider, cfg, writer)
    try:
        if cfg.approach is ApproachId.ONESHOT:
            score, colors = oneshot(session)
            session.finish(score, correct_colors=colors)
        else:
            if cfg.approach in MAKE_GUESS_TEMPLATES:
                guess_loop(session)
            else:
                StagedPipeline(session).run()
            session.finish()
    except RestartCapExceeded as exc:
        log.warning("game %s aborted: %s", gid, exc)
        session.finish(aborted=True, reason=f"restart cap: {exc}")
    except Exception as exc:
        session.finish(aborted=True, reason=f"{type(exc).__name__}: {exc}")
        raise
    return writer.transcript


def _check(cfg: ApproachConfig, *allowed: ApproachId) -> None:
    if cfg.approach not in allowed:
        raise ValueError(f"config is for {cfg.approach.value}, expected {'/'.join(a.value for a in allowed)}")


def run_guess_loop(puzzle: Puzzle, provider: CompletionProvider, cfg: ApproachConfig, **kw) -> Transcript:
    _check(cfg, *MAKE_GUESS_TEMPLATES)
    return play(puzzle, provider, cfg, **kw)


def run_oneshot(puzzle: Puzzle, provider: CompletionProvider, cfg: ApproachConfig, **kw) -> Transcript:
    _check(cfg, ApproachId.ONESHOT)
    return play(puzzle, provider, cfg, **kw)


def run_actor(puzzle: Puzzle, provider: CompletionProvider, cfg: ApproachConfig, **kw) -> Transcript:
    _check(cfg, ApproachId.ACTOR)
    return play(puzzle, provider, cfg, **kw)


def run_actor2(puzzle: Puzzle, provider: CompletionProvider, cfg: ApproachConfig, **kw) -> Transcript:
    _check(cfg, ApproachId.ACTOR2)
    return play(puzzle, provider, cfg, **kw)


def run_actor_o1(puzzle: Puzzle, provider: CompletionProvider, cfg: ApproachConfig, **kw) -> Transcript:
    _check(cfg, ApproachId.ACTOR_O1)
    return play(puzzle, provider, cfg, **kw)
