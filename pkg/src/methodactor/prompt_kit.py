"""Prompt catalog and placeholder rendering.

Templates live as UTF-8 text files under ``methodactor/prompts``; the file
name (minus ``.txt``) is the template id. Brainstorm templates sit in
``prompts/brainstorm/NN.txt``. Placeholders look like ``[[{words}]]``.
"""

from __future__ import annotations

import functools
import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from .puzzle_core import Guess

PLACEHOLDER = re.compile(r"\[\[\{(\w+)\}\]\]")
FIELDS = frozenset({"bad_guesses", "notes", "template", "words"})
NO_BAD_GUESSES = "Incorrect guesses so far: none."
BRAINSTORM_COUNT = 24

# Ids whose text comes from the published prompts; everything else is ours.
PAPER_TEMPLATES = (
    "vanilla.make_guess",
    "cot.make_guess",
    "cot_scripted.make_guess",
    "actor.brainstorm",
    "actor.extract",
    "actor.discern",
    "actor.decide",
    "actor.evaluate",
    "actor2.evaluate",
    "oneshot",
    "vanilla_o1.make_guess",
    "actor_o1.brainstorm",
    "actor_o1.evaluate",
)
FORMAT_TEMPLATES = ("format_guess", "format_decision", "format_solution")


class MissingContextField(KeyError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"prompt context has no value for [[{{{self.name}}}]]"


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str

    def __post_init__(self) -> None:
        unknown = self.placeholders - FIELDS
        if unknown:
            raise ValueError(f"{self.id}: unknown placeholder(s) {sorted(unknown)}")

    @property
    def placeholders(self) -> frozenset[str]:
        return frozenset(PLACEHOLDER.findall(self.body))


@dataclass(frozen=True)
class BrainstormTemplate:
    index: int
    body: str

    @property
    def pattern(self) -> str:
        """The leading ``Pattern: ...`` line."""
        return self.body.splitlines()[0]


@dataclass(frozen=True)
class PromptContext:
    words: Sequence[str]
    bad_guesses: Sequence[Guess] = ()
    notes: str | None = None
    template: BrainstormTemplate | None = None

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("prompt context needs at least one word")


def _prompt_files():
    return resources.files("methodactor").joinpath("prompts")


@functools.lru_cache(maxsize=None)
def load_catalog() -> dict[str, PromptTemplate]:
    root = _prompt_files()
    catalog = {}
    for entry in root.iterdir():
        if entry.name.endswith(".txt"):
            tid = entry.name[: -len(".txt")]
            catalog[tid] = PromptTemplate(tid, entry.read_text(encoding="utf-8"))
    return dict(sorted(catalog.items()))


@functools.lru_cache(maxsize=None)
def brainstorm_templates() -> tuple[BrainstormTemplate, ...]:
    root = _prompt_files().joinpath("brainstorm")
    out = [
        BrainstormTemplate(i, root.joinpath(f"{i:02d}.txt").read_text(encoding="utf-8"))
        for i in range(1, BRAINSTORM_COUNT + 1)
    ]
    return tuple(out)


def get_template(template_id: str) -> PromptTemplate:
    try:
        return load_catalog()[template_id]
    except KeyError:
        raise KeyError(f"no prompt template {template_id!r}") from None


def file_checksums() -> dict[str, str]:
    """sha256 of every catalog file, keyed by path relative to ``prompts/``."""
    root = _prompt_files()
    sums = {}
    for tid in load_catalog():
        data = root.joinpath(f"{tid}.txt").read_bytes()
        sums[f"{tid}.txt"] = hashlib.sha256(data).hexdigest()
    for i in range(1, BRAINSTORM_COUNT + 1):
        data = root.joinpath("brainstorm", f"{i:02d}.txt").read_bytes()
        sums[f"brainstorm/{i:02d}.txt"] = hashlib.sha256(data).hexdigest()
    return sums


def pinned_checksums() -> dict[str, str]:
    return json.loads(_prompt_files().joinpath("manifest.json").read_text(encoding="utf-8"))


def verify_manifest() -> list[str]:
    """Files whose contents no longer match the pinned manifest."""
    pinned = pinned_checksums()
    actual = file_checksums()
    return sorted(k for k in pinned if actual.get(k) != pinned[k])


def format_words(words: Iterable[str]) -> str:
    return ", ".join(words)


def format_bad_guesses(guesses: Sequence[Guess]) -> str:
    if not guesses:
        return NO_BAD_GUESSES
    lines = ["Incorrect guesses so far:"]
    lines += [", ".join(g.sorted()) for g in guesses]
    return "\n".join(lines)


def render(template: PromptTemplate | str, ctx: PromptContext) -> str:
    if isinstance(template, str):
        template = get_template(template)
    values: dict[str, str | None] = {
        "words": format_words(ctx.words),
        "bad_guesses": format_bad_guesses(ctx.bad_guesses),
        "notes": ctx.notes,
        "template": ctx.template.body.strip() if ctx.template else None,
    }
    for name in template.placeholders:
        if values[name] is None:
            raise MissingContextField(name)
    return PLACEHOLDER.sub(lambda m: values[m.group(1)], template.body)  # type: ignore[arg-type,return-value]


def next_brainstorm_template(cursor: int) -> tuple[BrainstormTemplate, int]:
    return brainstorm_templates()[cursor % BRAINSTORM_COUNT], cursor + 1
