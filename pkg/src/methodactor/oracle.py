"""A scripted provider that knows the answer.

:class:`OracleProvider` reads the prompt tag and the rendered prompt and
replies the way a perfect solver would, in the formats the pipelines parse.
Optional red herrings are put forward once per selection stage before the
oracle falls back to the true groups, which makes deferral logic testable.
With ``rotate=True`` successive proposals cycle through the visible groups
instead of always naming the easiest one.
"""

from __future__ import annotations

import re
import threading
from typing import Iterable, Sequence

from .guess_logic import ABSTAIN_SENTENCE
from .provider import CompletionRequest, CompletionResponse
from .puzzle_core import Guess, Puzzle, canonical_word

_WORDS_LINE = re.compile(r"^Puzzle words: (.*)$", re.M)
_GUESS_LINE = re.compile(r"^Guess: (.*)$", re.M)
_OPTION_LINE = re.compile(r"^Option \d+: (.*)$", re.M)
_GROUP_LINE = re.compile(r"^GROUP \d: (.*)$", re.M)

PROPOSE_TAGS = frozenset(
    {
        "vanilla.make_guess",
        "cot.make_guess",
        "cot_scripted.make_guess",
        "vanilla_o1.make_guess",
        "actor.brainstorm",
        "actor_o1.brainstorm",
    }
)
EVALUATE_TAGS = frozenset({"actor.evaluate", "actor2.evaluate", "actor_o1.evaluate"})


def _guess_of(line: str) -> Guess | None:
    parts = [p for p in (s.strip() for s in line.split(",")) if p]
    try:
        return Guess(canonical_word(p) for p in parts)
    except ValueError:
        return None


def _words_in(prompt: str) -> list[str]:
    m = _WORDS_LINE.findall(prompt)
    return [w.strip() for w in m[-1].split(",")] if m else []


def _response_section(prompt: str) -> str:
    """The quoted reply inside a format_* prompt."""
    _, _, rest = prompt.partition("Response:")
    body, _, _ = rest.rpartition("Puzzle words:")
    return body or rest


class OracleProvider:
    def __init__(
        self,
        puzzle: Puzzle,
        herrings: Iterable[Guess | Sequence[str]] = (),
        approve: bool = True,
        rotate: bool = False,
    ) -> None:
        self.puzzle = puzzle
        self.herrings = [h if isinstance(h, Guess) else Guess(h) for h in herrings]
        self.approve = approve
        self.rotate = rotate
        self._turn = 0
        self._used: dict[str, set[Guess]] = {"propose": set(), "discern": set(), "evaluate": set()}
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        with self._lock:
            return CompletionResponse(self._reply(request.tag, request.prompt))

    def _herring(self, stage: str, candidates: Iterable[Guess]) -> Guess | None:
        cands = list(candidates)
        for h in self.herrings:
            if h in cands and h not in self._used[stage]:
                self._used[stage].add(h)
                return h
        return None

    def _solution(self, candidates: Iterable[Guess]) -> Guess | None:
        answers = {g.guess for g in self.puzzle.groups}
        return next((c for c in candidates if c in answers), None)

    def _propose(self, prompt: str) -> str:
        visible = set(_words_in(prompt))
        fits = [h for h in self.herrings if h.words <= visible]
        pick = self._herring("propose", fits)
        if pick is None:
            groups = [g.guess for g in self.puzzle.groups if g.words <= visible]
            if groups:
                pick = groups[self._turn % len(groups)] if self.rotate else groups[0]
                self._turn += 1
        if pick is None:
            return f"None of the patterns fit. {ABSTAIN_SENTENCE}."
        return f"These four words share a connection.\nGuess: {pick}"

    def _select(self, stage: str, candidates: list[Guess]) -> Guess | None:
        if not candidates:
            return None
        return self._herring(stage, candidates) or self._solution(candidates) or candidates[0]

    def _reply(self, tag: str, prompt: str) -> str:
        if tag in PROPOSE_TAGS:
            return self._propose(prompt)
        if tag == "oneshot":
            return "\n".join(
                f"GROUP {i}: {', '.join(sorted(g.words))}" for i, g in enumerate(self.puzzle.groups, 1)
            )
        if tag == "actor.extract":
            seen: list[str] = []
            for line in _GUESS_LINE.findall(prompt):
                if line not in seen:
                    seen.append(line)
            return "\n".join(f"Guess: {line}" for line in seen) or "No complete guesses in the notes."
        if tag == "actor.discern":
            cands = [g for g in map(_guess_of, _GUESS_LINE.findall(prompt)) if g]
            pick = self._select("discern", cands)
            return f"My top choice.\nGuess: {pick}" if pick else "Nothing here is worth submitting."
        if tag == "actor.decide":
            cands = [g for g in map(_guess_of, _GUESS_LINE.findall(prompt)) if g]
            if cands and self.approve:
                return f"Decision: SUBMIT\nGuess: {cands[0]}"
            return "Decision: CONTINUE"
        if tag in EVALUATE_TAGS:
            cands = [g for g in map(_guess_of, _OPTION_LINE.findall(prompt)) if g]
            pick = self._select("evaluate", cands)
            return f"Strongest option.\nGuess: {pick}" if pick else ABSTAIN_SENTENCE
        if tag == "format_guess":
            lines = _GUESS_LINE.findall(_response_section(prompt))
            return lines[-1] if lines else f"{ABSTAIN_SENTENCE}."
        if tag == "format_decision":
            section = _response_section(prompt)
            lines = _GUESS_LINE.findall(section)
            if "Decision: SUBMIT" in section and lines:
                return f"{lines[-1]}\nSUBMIT"
            return "CONTINUE"
        if tag == "format_solution":
            groups = _GROUP_LINE.findall(_response_section(prompt))[-4:]
            return "\n".join(f"GROUP {i}: {g}" for i, g in enumerate(groups, 1))
        raise ValueError(f"oracle has no reply for prompt tag {tag!r}")
