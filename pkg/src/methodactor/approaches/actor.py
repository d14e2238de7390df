"""Staged "actor" pipelines.

Actor: brainstorm x5 -> extract -> discern -> decide, stockpile approved
guesses, evaluate once the stockpile is full and submit the winner.

Actor-2: same stages, but the evaluate winner goes onto a final-guesses list
and only leaves it through :func:`actor2_decide`. Word lists are thinned on
alternate rounds and salted with mole words after two misses.

Actor-o1: one brainstorm-and-select call replaces the first four stages; the
final list is gated by :func:`actor_o1_decide`.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..guess_logic import (
    FinalGuessList,
    Guess,
    Malformed,
    Submit,
    actor2_decide,
    actor_o1_decide,
    diversity_remove,
    inject_moles,
    mole_reject,
    parse_decision,
    parse_guess,
)
from ..prompt_kit import next_brainstorm_template
from .config import ApproachId
from .loops import _log_parse
from .session import GameSession, RestartCapExceeded

EVALUATE_TEMPLATES = {
    ApproachId.ACTOR: "actor.evaluate",
    ApproachId.ACTOR2: "actor2.evaluate",
    ApproachId.ACTOR_O1: "actor_o1.evaluate",
}


@dataclass(frozen=True)
class Candidate:
    guess: Guess
    note: str


class StagedPipeline:
    def __init__(self, session: GameSession) -> None:
        self.s = session
        self.cfg = session.cfg
        self.kind = session.cfg.approach
        if self.kind not in EVALUATE_TEMPLATES:
            raise ValueError(f"{self.kind.value} is not a staged approach")
        self.gated = self.kind in (ApproachId.ACTOR2, ApproachId.ACTOR_O1)
        self.stockpile: list[Candidate] = []
        self.final = FinalGuessList()
        self.cursor = 0
        self.round = 0
        self.moles_shown: set[str] = set()
        self.unproductive = 0
        self.cycles = 0

    def run(self) -> None:
        while not self.s.over:
            self.round += 1
            self.cycles += 1
            words = self.round_words()
            if self.kind is ApproachId.ACTOR_O1:
                produced = self.select(words)
            else:
                produced = self.brainstorm_and_discern(words)
            if not produced:
                self.unproductive += 1
            threshold = self.threshold()
            if len(self.stockpile) >= threshold:
                self.evaluate(threshold)
            if self.s.over:
                break
            if self.unproductive >= self.cfg.restart_cap:
                raise RestartCapExceeded(f"{self.unproductive} unproductive cycles since last submission")
            if self.cycles >= self.cfg.cycle_cap:
                raise RestartCapExceeded(f"{self.cycles} cycles without a submission")

    def threshold(self) -> int:
        if len(self.s.state.correct) >= self.cfg.reduce_after_correct:
            return self.cfg.reduced_threshold
        return self.cfg.stockpile_threshold

    def round_words(self) -> list[str]:
        state = self.s.state
        if not self.gated:
            return sorted(state.remaining)
        words = diversity_remove(
            state.remaining,
            self.final,
            [c.guess for c in self.stockpile],
            self.round,
            self.cfg.diversity,
            self.cfg.diversity_floor,
        )
        solved = state.solved_groups
        if (
            self.cfg.mole_count > 0
            and len(state.incorrect) >= self.cfg.moles_after_incorrect
            and solved
        ):
            seed = self.s.rng.getrandbits(32)
            words, moles = inject_moles(words, solved, self.cfg.mole_count, seed)
            self.moles_shown |= moles.moles
            self.s.emit("MoleInjected", round=self.round, moles=sorted(moles.moles), rng_seed=seed, words=words)
        return words

    def accept(self, guess: Guess, stage: str) -> bool:
        if self.gated and mole_reject(guess, self.moles_shown):
            self.s.reject(guess, "mole", stage)
            return False
        reason = self.s.check(guess)
        if reason is not None:
            self.s.reject(guess, reason.value, stage)
            return False
        return True

    def stockpile_add(self, guess: Guess, note: str) -> None:
        self.stockpile.append(Candidate(guess, note))
        self.s.emit("Stockpiled", words=guess.sorted(), size=len(self.stockpile))

    def brainstorm_and_discern(self, words: list[str]) -> bool:
        s = self.s
        s.emit("StageEntered", stage="brainstorm", round=self.round, words=words)
        notes = []
        for n in range(1, self.cfg.brainstorm_calls + 1):
            template, self.cursor = next_brainstorm_template(self.cursor)
            reply = s.ask("actor.brainstorm", s.context(words, template=template))
            notes.append(f"Brainstormer {n}:\n{reply.strip()}")

        s.emit("StageEntered", stage="extract", round=self.round)
        extracted = s.ask("actor.extract", s.context(words, notes="\n\n".join(notes)))
        s.emit("StageEntered", stage="discern", round=self.round)
        discerned = s.ask("actor.discern", s.context(words, notes=extracted.strip()))
        s.emit("StageEntered", stage="decide", round=self.round)
        decided = s.ask("actor.decide", s.context(words, notes=discerned.strip()))
        formatted = s.ask("format_decision", s.context(words, notes=decided.strip()))

        verdict = parse_decision(formatted, words)
        if isinstance(verdict, Malformed):
            s.emit("GuessParsed", stage="decide", result="malformed", reason=verdict.reason)
            return False
        approved, guess = verdict
        if not approved or guess is None:
            s.emit("GuessParsed", stage="decide", result="continue")
            return False
        s.emit("GuessParsed", stage="decide", result="guess", words=guess.sorted())
        if not self.accept(guess, "decide"):
            return False
        self.stockpile_add(guess, discerned)
        return True

    def select(self, words: list[str]) -> bool:
        s = self.s
        s.emit("StageEntered", stage="brainstorm", round=self.round, words=words)
        reply = s.ask("actor_o1.brainstorm", s.context(words))
        formatted = s.ask("format_guess", s.context(words, notes=reply.strip()))
        parsed = parse_guess(formatted, words)
        _log_parse(s, "brainstorm", parsed)
        if not isinstance(parsed, Guess) or not self.accept(parsed, "brainstorm"):
            return False
        self.stockpile_add(parsed, reply)
        return True

    def _consume(self, guess: Guess) -> None:
        for i, cand in enumerate(self.stockpile):
            if cand.guess == guess:
                del self.stockpile[i]
                return

    def evaluate(self, threshold: int) -> None:
        s = self.s
        s.emit("StageEntered", stage="evaluate", round=self.round, stockpile=len(self.stockpile), threshold=threshold)
        notes = "\n\n".join(
            f"Option {i}: {c.guess}\n{c.note.strip()}" for i, c in enumerate(self.stockpile, 1)
        )
        allowed = sorted(s.state.remaining | self.moles_shown)
        reply = s.ask(EVALUATE_TEMPLATES[self.kind], s.context(allowed, notes=notes))
        formatted = s.ask("format_guess", s.context(allowed, notes=reply.strip()))
        parsed = parse_guess(formatted, allowed)
        _log_parse(s, "evaluate", parsed)
        if not isinstance(parsed, Guess):
            self.unproductive += 1
            return
        self._consume(parsed)
        if not self.accept(parsed, "evaluate"):
            self.unproductive += 1
            return
        if not self.gated:
            s.submit(parsed, rule="evaluate")
            self.after_submission()
            return

        self.final.add(parsed)
        s.emit(
            "FinalListUpdated",
            action="add",
            words=parsed.sorted(),
            count=self.final.count(parsed),
            processed_count=self.final.processed_count,
            entries=[[g.sorted(), n] for g, n in self.final.entries],
        )
        if self.kind is ApproachId.ACTOR2:
            decision = actor2_decide(self.final)
        else:
            decision = actor_o1_decide(self.final, self.cfg.triplet_after, self.cfg.pair_after)
        if not isinstance(decision, Submit):
            s.emit("DecisionMade", rule=decision.rule, guesses=[])
            return
        s.emit("DecisionMade", rule=decision.rule, guesses=[g.sorted() for g in decision.guesses])
        for guess in decision.guesses:
            if s.over:
                break
            self.final.discard(guess)
            if s.check(guess) is None:
                s.submit(guess, rule=decision.rule)
            self.after_submission()

    def after_submission(self) -> None:
        self.unproductive = 0
        self.cycles = 0
        if self.s.over:
            return
        self.stockpile = [c for c in self.stockpile if self.s.check(c.guess) is None]
        dropped = self.final.prune(lambda g: self.s.check(g) is None)
        if dropped:
            self.s.emit(
                "FinalListUpdated",
                action="prune",
                dropped=[g.sorted() for g in dropped],
                processed_count=self.final.processed_count,
                entries=[[g.sorted(), n] for g, n in self.final.entries],
            )


def staged(session: GameSession) -> None:
    StagedPipeline(session).run()


__all__ = ["StagedPipeline", "Candidate", "staged"]
