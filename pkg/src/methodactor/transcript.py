"""Per-game JSON Lines transcripts.

Line 1 is a header object (schema, version, ids, config snapshot, seed).
Every following line is one event: ``{"seq": n, "type": "...", ...}``.
"""

from __future__ import annotations

import datetime as dt
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .provider import CallRecord
from .puzzle_core import GameScore

SCHEMA = "methodactor.transcript"
VERSION = 1
VOLATILE_KEYS = frozenset({"created_at", "latency_s"})

EVENT_TYPES = frozenset(
    {
        "StageEntered",
        "PromptIssued",
        "CompletionReceived",
        "GuessParsed",
        "GuessRejected",
        "MoleInjected",
        "Stockpiled",
        "FinalListUpdated",
        "DecisionMade",
        "GuessSubmitted",
        "OutcomeRecorded",
        "SolutionGraded",
        "GameEnded",
    }
)


class TranscriptError(ValueError):
    pass


@dataclass
class Transcript:
    header: dict[str, Any]
    events: list[dict[str, Any]] = field(default_factory=list)

    @property
    def game_id(self) -> str:
        return self.header["game_id"]

    @property
    def puzzle_id(self) -> int:
        return int(self.header["puzzle_id"])

    @property
    def config(self) -> dict[str, Any]:
        return self.header["config"]

    @property
    def approach(self) -> str:
        return self.config["approach"]

    @property
    def rng_seed(self) -> int:
        return int(self.header["rng_seed"])

    def of_type(self, *types: str) -> list[dict[str, Any]]:
        return [e for e in self.events if e["type"] in types]

    @property
    def ended(self) -> dict[str, Any] | None:
        ends = self.of_type("GameEnded")
        return ends[-1] if ends else None

    @property
    def score(self) -> GameScore:
        end = self.ended
        if end is None:
            raise TranscriptError(f"{self.game_id}: no GameEnded event")
        return GameScore.from_dict(end["score"])

    @property
    def aborted(self) -> bool:
        end = self.ended
        return bool(end and end.get("aborted"))

    def call_records(self) -> list[CallRecord]:
        """Prompt/completion pairs, usable to build a replay provider."""
        prompts = {e["call_index"]: e for e in self.of_type("PromptIssued")}
        out = []
        for e in self.of_type("CompletionReceived"):
            p = prompts[e["call_index"]]
            out.append(CallRecord(e["call_index"], p["prompt_hash"], p["prompt"], e["text"], p.get("tag", "")))
        return out


class TranscriptWriter:
    """Builds a transcript in memory and, given a path, mirrors each line to disk."""

    def __init__(self, header: dict[str, Any], path: str | Path | None = None) -> None:
        self.transcript = Transcript({"schema": SCHEMA, "version": VERSION, **header})
        self.path = Path(path) if path else None
        self._seq = 0
        self._lock = threading.Lock()
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(_dumps(self.transcript.header) + "\n", encoding="utf-8")

    def emit(self, type_: str, **fields: Any) -> dict[str, Any]:
        if type_ not in EVENT_TYPES:
            raise TranscriptError(f"unknown event type {type_!r}")
        with self._lock:
            self._seq += 1
            event = {"seq": self._seq, "type": type_, **fields}
            self.transcript.events.append(event)
            if self.path:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(_dumps(event) + "\n")
        return event


def new_header(game_id: str, puzzle_id: int, config: dict[str, Any], rng_seed: int) -> dict[str, Any]:
    return {
        "game_id": game_id,
        "puzzle_id": puzzle_id,
        "config": config,
        "rng_seed": rng_seed,
        "created_at": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    }


def _dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def parse_lines(lines: Iterable[str], source: str = "<transcript>") -> Transcript:
    rows = []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise TranscriptError(f"{source}:{n}: {exc.msg}") from None
    if not rows or rows[0].get("schema") != SCHEMA:
        raise TranscriptError(f"{source}: missing transcript header")
    if rows[0].get("version") != VERSION:
        raise TranscriptError(f"{source}: unsupported version {rows[0].get('version')}")
    return Transcript(rows[0], rows[1:])


def read_transcript(path: str | Path) -> Transcript:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_lines(fh, str(path))


def read_transcripts(directory: str | Path) -> list[Transcript]:
    files = sorted(Path(directory).glob("*.jsonl"))
    return [read_transcript(f) for f in files]


def check_transcript(t: Transcript) -> list[str]:
    """Structural problems: ordering, GameEnded count, submit/outcome pairing."""
    problems = []
    seqs = [e.get("seq") for e in t.events]
    if seqs != list(range(1, len(seqs) + 1)):
        problems.append("event seq numbers are not 1..n")
    for e in t.events:
        if e.get("type") not in EVENT_TYPES:
            problems.append(f"unknown event type {e.get('type')!r}")
    ends = [i for i, e in enumerate(t.events) if e["type"] == "GameEnded"]
    if len(ends) != 1:
        problems.append(f"expected one GameEnded, found {len(ends)}")
    elif ends[0] != len(t.events) - 1:
        problems.append("GameEnded is not the last event")
    for i, e in enumerate(t.events):
        if e["type"] == "GuessSubmitted":
            nxt = t.events[i + 1] if i + 1 < len(t.events) else None
            if not nxt or nxt["type"] != "OutcomeRecorded":
                problems.append(f"GuessSubmitted seq {e['seq']} not followed by OutcomeRecorded")
    return problems


def stable_text(path: str | Path) -> str:
    """File contents with volatile fields (timestamps, latencies) removed."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        for key in VOLATILE_KEYS:
            obj.pop(key, None)
        out.append(_dumps(obj))
    return "\n".join(out) + "\n"
