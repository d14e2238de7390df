"""Per-game plumbing shared by every approach: prompts, submissions, events."""

from __future__ import annotations

import random
import time
from typing import Sequence

from ..prompt_kit import BrainstormTemplate, PromptContext, render
from ..provider import CompletionProvider, CompletionRequest, Sampling, prompt_hash
from ..puzzle_core import (
    GameScore,
    GameState,
    Guess,
    InvalidReason,
    Puzzle,
    SubmitResult,
    auto_complete,
    game_score,
    invalid_reason,
    new_game,
    submit_guess,
)
from ..transcript import TranscriptWriter
from .config import ApproachConfig


class RestartCapExceeded(RuntimeError):
    pass


class GameSession:
    def __init__(
        self,
        puzzle: Puzzle,
        provider: CompletionProvider,
        cfg: ApproachConfig,
        writer: TranscriptWriter,
    ) -> None:
        self.puzzle = puzzle
        self.provider = provider
        self.cfg = cfg
        self.writer = writer
        self.state: GameState = new_game(puzzle)
        self.rng = random.Random(writer.transcript.header["rng_seed"])
        self.call_index = 0
        self._sampling = Sampling(cfg.temperature, cfg.max_output_tokens)

    @property
    def over(self) -> bool:
        return self.state.is_over

    def emit(self, type_: str, **fields) -> None:
        self.writer.emit(type_, **fields)

    def remaining_words(self) -> list[str]:
        return sorted(self.state.remaining)

    def context(
        self,
        words: Sequence[str] | None = None,
        *,
        notes: str | None = None,
        template: BrainstormTemplate | None = None,
    ) -> PromptContext:
        return PromptContext(
            words=list(words) if words is not None else self.remaining_words(),
            bad_guesses=list(self.state.incorrect),
            notes=notes,
            template=template,
        )

    def ask(self, tag: str, ctx: PromptContext) -> str:
        prompt = render(tag, ctx)
        request = CompletionRequest(self.cfg.model_id, prompt, self.call_index, self._sampling, tag)
        self.call_index += 1
        self.emit(
            "PromptIssued",
            call_index=request.call_index,
            tag=tag,
            prompt_hash=prompt_hash(prompt),
            prompt=prompt,
            sampling=self._sampling.to_dict(),
        )
        start = time.monotonic()
        response = self.provider.complete(request)
        self.emit(
            "CompletionReceived",
            call_index=request.call_index,
            text=response.text,
            latency_s=round(time.monotonic() - start, 4),
        )
        return response.text

    def check(self, guess: Guess) -> InvalidReason | None:
        return invalid_reason(self.state, guess)

    def submit(self, guess: Guess, rule: str | None = None) -> SubmitResult:
        """Submit a guess already known to be valid, then auto-complete if due."""
        reason = self.check(guess)
        if reason is not None:
            raise ValueError(f"refusing to submit invalid guess {guess}: {reason.value}")
        self.emit("GuessSubmitted", words=guess.sorted(), auto=False, rule=rule)
        self.state, result = submit_guess(self.state, guess)
        self._record(result)
        if result.correct and not self.over:
            before = self.state
            self.state = auto_complete(self.state)
            if self.state is not before:
                last_guess, _ = self.state.correct[-1]
                self.emit("GuessSubmitted", words=last_guess.sorted(), auto=True, rule="auto_complete")
                self._record(SubmitResult("correct", group=self.state.correct[-1][1]))
        return result

    def _record(self, result: SubmitResult) -> None:
        group = result.group
        self.emit(
            "OutcomeRecorded",
            result=result.status,
            color=group.color.label if group else None,
            category=group.category if group else None,
            correct_count=len(self.state.correct),
            incorrect_count=len(self.state.incorrect),
        )

    def reject(self, guess: Guess, reason: str, stage: str) -> None:
        self.emit("GuessRejected", words=guess.sorted(), reason=reason, stage=stage)

    def finish(
        self,
        score: GameScore | None = None,
        *,
        aborted: bool = False,
        reason: str | None = None,
        correct_colors: list[str] | None = None,
    ) -> None:
        if score is None:
            score = game_score(self.state)
        if correct_colors is None:
            correct_colors = [g.color.label for _, g in self.state.correct]
        self.emit(
            "GameEnded",
            score=score.to_dict(),
            aborted=aborted,
            reason=reason,
            status=self.state.status.value,
            correct_colors=correct_colors,
            auto_completed=self.state.auto_completed,
        )
