import json

import pytest

from methodactor.approaches import ApproachConfig, play
from methodactor.oracle import OracleProvider
from methodactor.provider import ReplayProvider
from methodactor.transcript import (
    VOLATILE_KEYS,
    TranscriptError,
    TranscriptWriter,
    check_transcript,
    new_header,
    parse_lines,
    read_transcript,
    read_transcripts,
    stable_text,
)


def test_writer_mirrors_to_disk(tmp_path, puzzle430):
    path = tmp_path / "g.jsonl"
    t = play(puzzle430, OracleProvider(puzzle430), ApproachConfig("cot"), path=path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + len(t.events)
    header = json.loads(lines[0])
    assert header["schema"] == "methodactor.transcript" and header["version"] == 1
    again = read_transcript(path)
    assert again.events == t.events
    assert check_transcript(again) == []


def test_unknown_event_rejected():
    w = TranscriptWriter(new_header("g", 1, {"approach": "vanilla"}, 0))
    with pytest.raises(TranscriptError):
        w.emit("Nonsense")


def test_parse_errors():
    with pytest.raises(TranscriptError):
        parse_lines(['{"schema": "methodactor.transcript", "version": 1}', "{bad"])
    with pytest.raises(TranscriptError):
        parse_lines(['{"hello": 1}'])
    with pytest.raises(TranscriptError):
        parse_lines(['{"schema": "methodactor.transcript", "version": 99}'])


def test_check_transcript_finds_problems():
    w = TranscriptWriter(new_header("g", 1, {"approach": "vanilla"}, 0))
    w.emit("GuessSubmitted", words=["A", "B", "C", "D"], auto=False, rule=None)
    problems = check_transcript(w.transcript)
    assert any("GameEnded" in p for p in problems)
    assert any("OutcomeRecorded" in p for p in problems)


def test_call_records_replay_the_game(puzzle430):
    cfg = ApproachConfig("actor2")
    first = play(puzzle430, OracleProvider(puzzle430, [("MICKEY", "DAISY", "BUZZ", "GOOF")]), cfg)
    second = play(puzzle430, ReplayProvider(first.call_records()), cfg)
    strip = lambda evs: [{k: v for k, v in e.items() if k not in VOLATILE_KEYS} for e in evs]  # noqa: E731
    assert strip(second.events) == strip(first.events)


def test_stable_text_drops_volatile_fields(tmp_path, puzzle430):
    path = tmp_path / "g.jsonl"
    play(puzzle430, OracleProvider(puzzle430), ApproachConfig("vanilla"), path=path)
    text = stable_text(path)
    for key in VOLATILE_KEYS:
        assert f'"{key}"' not in text


def test_read_transcripts_sorted(tmp_path, puzzle430):
    for name in ("b", "a"):
        play(puzzle430, OracleProvider(puzzle430), ApproachConfig("vanilla"), path=tmp_path / f"{name}.jsonl", game_id=name)
    assert [t.game_id for t in read_transcripts(tmp_path)] == ["a", "b"]
