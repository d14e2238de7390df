"""Guess parsing and the deterministic submission gates.

Nothing in here talks to a model. The approaches feed LLM output through
:func:`parse_guess` and let :func:`actor2_decide` / :func:`actor_o1_decide`
decide what actually gets submitted.
"""

from __future__ import annotations

import random
import re
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass, field

from .puzzle_core import GUESS_SIZE, Guess, SolutionGroup, canonical_word

ABSTAIN_SENTENCE = "I can't identify a good guess to submit"
_ABSTAIN_KEY = ABSTAIN_SENTENCE.lower()
_LABEL = re.compile(r"^[^,]*:\s*")
_STRIP = " \t*_`\"'“”‘’[](){}.;"


@dataclass(frozen=True)
class Abstain:
    pass


@dataclass(frozen=True)
class Malformed:
    reason: str


ParsedGuess = Guess | Abstain | Malformed


def _normalize_quotes(text: str) -> str:
    return text.replace("’", "'").replace("‘", "'")


def is_abstain(text: str) -> bool:
    return _ABSTAIN_KEY in _normalize_quotes(text).lower()


def _last_line(text: str) -> str | None:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    return lines[-1] if lines else None


def _parse_words(line: str, allowed: Collection[str]) -> Guess | Malformed:
    body = _LABEL.sub("", line.strip().strip(_STRIP))
    tokens = [t.strip().strip(_STRIP) for t in body.split(",")]
    tokens = [t for t in tokens if t]
    if len(tokens) != GUESS_SIZE:
        return Malformed(f"wrong count {len(tokens)}")
    words = []
    for tok in tokens:
        word = canonical_word(tok)
        if word not in allowed:
            return Malformed(f"not in word list: {word}")
        if word in words:
            return Malformed(f"repeated word: {word}")
        words.append(word)
    return Guess(words)


def parse_guess(text: str, remaining: Collection[str]) -> ParsedGuess:
    """Read a guess from the final non-empty line of a formatting reply."""
    if is_abstain(text):
        return Abstain()
    line = _last_line(text)
    if line is None:
        return Malformed("empty completion")
    return _parse_words(line, remaining)


def parse_decision(text: str, words: Collection[str]) -> tuple[bool, Guess | None] | Malformed:
    """Parse a decide-stage formatting reply.

    Returns ``(True, guess)`` for SUBMIT and ``(False, None)`` for CONTINUE.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        return Malformed("empty completion")
    verdict = lines[-1].strip(_STRIP).upper()
    if verdict == "CONTINUE":
        return False, None
    if verdict != "SUBMIT":
        return Malformed(f"no SUBMIT/CONTINUE verdict: {lines[-1][:40]!r}")
    if len(lines) < 2:
        return Malformed("SUBMIT without a guess line")
    parsed = _parse_words(lines[-2], words)
    if isinstance(parsed, Malformed):
        return parsed
    return True, parsed


def parse_solution(text: str, puzzle_words: Collection[str]) -> list[Guess] | Malformed:
    """Read four ``GROUP n: w, w, w, w`` lines from the end of a reply.

    Each line must name four distinct puzzle words. Groups are not required
    to partition the board; overlapping or incomplete solutions are graded
    as they stand.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        return Malformed(f"expected 4 group lines, got {len(lines)}")
    groups = []
    for line in lines[-4:]:
        parsed = _parse_words(line, puzzle_words)
        if isinstance(parsed, Malformed):
            return parsed
        groups.append(parsed)
    return groups


@dataclass
class FinalGuessList:
    """Ordered multiset of approved guesses awaiting submission.

    ``processed_count`` counts every append ever made, including repeats and
    entries later pruned.
    """

    _seqs: dict[Guess, list[int]] = field(default_factory=dict)
    processed_count: int = 0

    def add(self, guess: Guess) -> None:
        self._seqs.setdefault(guess, []).append(self.processed_count)
        self.processed_count += 1

    def count(self, guess: Guess) -> int:
        return len(self._seqs.get(guess, ()))

    @property
    def entries(self) -> list[tuple[Guess, int]]:
        return [(g, len(s)) for g, s in self._seqs.items()]

    def guesses(self) -> list[Guess]:
        return list(self._seqs)

    def words(self) -> set[str]:
        return set().union(*(g.words for g in self._seqs)) if self._seqs else set()

    def discard(self, guess: Guess) -> None:
        self._seqs.pop(guess, None)

    def prune(self, keep) -> list[Guess]:
        """Drop entries for which ``keep(guess)`` is false; return the dropped."""
        dropped = [g for g in self._seqs if not keep(g)]
        for g in dropped:
            del self._seqs[g]
        return dropped

    def copy(self) -> FinalGuessList:
        return FinalGuessList({g: list(s) for g, s in self._seqs.items()}, self.processed_count)

    def __len__(self) -> int:
        return len(self._seqs)

    def __contains__(self, guess: object) -> bool:
        return guess in self._seqs

    def _nth_append(self, guess: Guess, n: int) -> int | None:
        seqs = self._seqs.get(guess, [])
        return seqs[n - 1] if len(seqs) >= n else None


def append_final(lst: FinalGuessList, guess: Guess) -> FinalGuessList:
    new = lst.copy()
    new.add(guess)
    return new


def thrice_repeated(lst: FinalGuessList, times: int = 3) -> Guess | None:
    """The guess that reached ``times`` appends first, if any."""
    best: tuple[int, Guess] | None = None
    for guess in lst.guesses():
        seq = lst._nth_append(guess, times)
        if seq is not None and (best is None or seq < best[0]):
            best = (seq, guess)
    return best[1] if best else None


def find_disjoint(lst: FinalGuessList | Sequence[Guess], k: int) -> list[Guess] | None:
    """First ``k`` entries (lexicographic by append order) that share no words."""
    items = lst.guesses() if isinstance(lst, FinalGuessList) else list(lst)
    chosen: list[int] = []

    def search(start: int, used: frozenset[str]) -> bool:
        if len(chosen) == k:
            return True
        for i in range(start, len(items) - (k - len(chosen)) + 1):
            if used.isdisjoint(items[i].words):
                chosen.append(i)
                if search(i + 1, used | items[i].words):
                    return True
                chosen.pop()
        return False

    if k < 1 or not search(0, frozenset()):
        return None
    return [items[i] for i in chosen]


@dataclass(frozen=True)
class Submit:
    guesses: tuple[Guess, ...]
    rule: str


@dataclass(frozen=True)
class Wait:
    rule: str = "wait"


SubmissionDecision = Submit | Wait


def actor2_decide(lst: FinalGuessList) -> SubmissionDecision:
    pair = find_disjoint(lst, 2)
    if pair:
        return Submit(tuple(pair), "pair")
    repeated = thrice_repeated(lst)
    if repeated:
        return Submit((repeated,), "thrice")
    return Wait()


def actor_o1_decide(
    lst: FinalGuessList, triplet_after: int = 13, pair_after: int = 15
) -> SubmissionDecision:
    quad = find_disjoint(lst, 4)
    if quad:
        return Submit(tuple(quad), "quadruplet")
    if lst.processed_count >= triplet_after:
        trip = find_disjoint(lst, 3)
        if trip:
            return Submit(tuple(trip), "triplet")
    if lst.processed_count > pair_after:
        pair = find_disjoint(lst, 2)
        if pair:
            return Submit(tuple(pair), "pair")
    repeated = thrice_repeated(lst)
    if repeated:
        return Submit((repeated,), "thrice")
    return Wait()


class NoSolvedGroups(ValueError):
    pass


class CountTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class MoleSet:
    moles: frozenset[str] = frozenset()
    rng_seed: int | None = None


def _as_rng(rng: random.Random | int) -> tuple[random.Random, int | None]:
    if isinstance(rng, random.Random):
        return rng, None
    return random.Random(rng), int(rng)


def inject_moles(
    remaining: Iterable[str],
    solved_groups: Sequence[SolutionGroup],
    count: int,
    rng: random.Random | int,
) -> tuple[list[str], MoleSet]:
    """Mix ``count`` already-solved words into the candidate list."""
    words = sorted(remaining)
    gen, seed = _as_rng(rng)
    if count == 0:
        return words, MoleSet(frozenset(), seed)
    if not solved_groups:
        raise NoSolvedGroups("no solved group to draw moles from")
    pool = sorted(set().union(*(g.words for g in solved_groups)))
    if count > len(pool) or count < 0:
        raise CountTooLarge(f"asked for {count} moles from {len(pool)} solved words")
    moles = gen.sample(pool, count)
    mixed = words + moles
    gen.shuffle(mixed)
    return mixed, MoleSet(frozenset(moles), seed)


def mole_reject(guess: Guess, moles: MoleSet | Collection[str]) -> bool:
    pool = moles.moles if isinstance(moles, MoleSet) else moles
    return not guess.words.isdisjoint(pool)


DIVERSITY_POLICIES = ("alternate", "always", "never")


def diversity_remove(
    remaining: Iterable[str],
    final_list: FinalGuessList,
    pending: Iterable[Guess],
    round_index: int,
    policy: str = "alternate",
    floor: int = 8,
) -> list[str]:
    """Word list for a brainstorm round, minus words already under consideration.

    ``round_index`` is 1-based; the alternate policy removes words on even
    rounds. Removal is skipped when it would leave fewer than ``floor`` words.
    """
    if policy not in DIVERSITY_POLICIES:
        raise ValueError(f"unknown diversity policy {policy!r}")
    words = sorted(remaining)
    active = policy == "always" or (policy == "alternate" and round_index % 2 == 0)
    if not active:
        return words
    taken = final_list.words().union(*(g.words for g in pending))
    kept = [w for w in words if w not in taken]
    return kept if len(kept) >= floor else words

