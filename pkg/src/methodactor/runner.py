"""Batch experiments: one game per puzzle, transcripts to disk, then a report.

A run directory looks like::

    out/
      run.json            the RunConfig that produced it (used by replay)
      transcripts/*.jsonl one file per game
      report.json         metrics recomputed from transcripts/
      report.csv
      good_bad.png, buckets.png
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping

from .approaches import ApproachConfig, play
from .dataset import load_archive_file
from .metrics import Metrics, compute_metrics
from .oracle import OracleProvider
from .provider import (
    CompletionProvider,
    HttpProvider,
    ReplayProvider,
    RetryPolicy,
    ScriptedProvider,
    with_retries,
)
from .puzzle_core import GameScore, Puzzle
from .report import write_report
from .transcript import TranscriptWriter, new_header, read_transcript, read_transcripts

log = logging.getLogger(__name__)

DEFAULT_PARALLELISM = 4
PROVIDER_KINDS = ("oracle", "scripted", "replay", "http")
TRANSCRIPT_DIR = "transcripts"
RUN_FILE = "run.json"

ProviderFactory = Callable[[Puzzle], CompletionProvider]


class ConfigError(ValueError):
    pass


def game_seed(seed: int, puzzle_id: int) -> int:
    """Per-game RNG seed derived from the global seed and the puzzle id."""
    digest = hashlib.sha256(f"{seed}:{puzzle_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class RunConfig:
    dataset: Path
    approach: ApproachConfig
    provider: Mapping[str, Any]
    out: Path
    parallelism: int = DEFAULT_PARALLELISM
    seed: int = 0

    def __post_init__(self) -> None:
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        kind = self.provider.get("kind")
        if kind not in PROVIDER_KINDS:
            raise ConfigError(f"provider.kind must be one of {', '.join(PROVIDER_KINDS)}, got {kind!r}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Path | None = None) -> RunConfig:
        """Build from parsed JSON. Relative paths resolve against ``base``."""
        base = base or Path(".")
        known = {"dataset", "approach", "provider", "out", "parallelism", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        for key in ("dataset", "approach", "provider"):
            if key not in data:
                raise ConfigError(f"config is missing {key!r}")
        approach = data["approach"]
        if isinstance(approach, str):
            approach = {"approach": approach}
        provider = dict(data["provider"])
        for key in ("path", "dir"):
            if key in provider:
                provider[key] = str(_resolve(base, provider[key]))
        try:
            return cls(
                dataset=_resolve(base, data["dataset"]),
                approach=ApproachConfig.from_dict(approach),
                provider=provider,
                out=_resolve(base, data.get("out", "out")),
                parallelism=int(data.get("parallelism", DEFAULT_PARALLELISM)),
                seed=int(data.get("seed", 0)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset": str(Path(self.dataset).resolve()),
            "approach": self.approach.to_dict(),
            "provider": {k: str(Path(v).resolve()) if k in ("path", "dir") else v for k, v in self.provider.items()},
            "out": str(Path(self.out).resolve()),
            "parallelism": self.parallelism,
            "seed": self.seed,
        }

    def with_(self, **changes: Any) -> RunConfig:
        return replace(self, **changes)


def _resolve(base: Path, value: str | Path) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return RunConfig.from_dict(data, path.parent)


def provider_factory(cfg: RunConfig) -> ProviderFactory:
    spec = dict(cfg.provider)
    kind = spec.pop("kind")
    if kind == "oracle":
        herrings = [tuple(h) for h in spec.get("herrings", [])]
        approve = bool(spec.get("approve", True))
        return lambda puzzle: OracleProvider(puzzle, herrings, approve)
    if kind == "scripted":
        try:
            scripts = json.loads(Path(spec["path"]).read_text(encoding="utf-8"))
        except (KeyError, OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"scripted provider needs a readable JSON 'path': {exc}") from None

        def scripted(puzzle: Puzzle) -> CompletionProvider:
            script = scripts.get(str(puzzle.id), scripts.get("*"))
            if script is None:
                raise ConfigError(f"no script for puzzle {puzzle.id}")
            return ScriptedProvider(script)

        return scripted
    if kind == "replay":
        directory = Path(spec.get("dir", ""))
        if not directory.is_dir():
            raise ConfigError(f"replay directory not found: {directory}")
        recorded = {}
        for t in read_transcripts(directory):
            if t.approach == cfg.approach.approach.value:
                recorded[t.puzzle_id] = t

        def replay(puzzle: Puzzle) -> CompletionProvider:
            if puzzle.id not in recorded:
                raise ConfigError(f"no recorded transcript for puzzle {puzzle.id} in {directory}")
            return ReplayProvider(recorded[puzzle.id].call_records())

        return replay
    # kind == "http"
    if "endpoint" not in spec:
        raise ConfigError("http provider needs an 'endpoint'")
    http = HttpProvider(spec["endpoint"], timeout=float(spec.get("timeout", 120.0)))
    try:
        policy = RetryPolicy(**spec.get("retries", {}))
    except TypeError as exc:
        raise ConfigError(f"bad retries block: {exc}") from None
    shared = with_retries(http, policy)
    return lambda puzzle: shared


@dataclass
class RunReport:
    out: Path
    metrics: Metrics
    transcripts: list[Path]
    failures: dict[int, str] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)

    @property
    def warnings(self) -> list[str]:
        return [f"puzzle {pid}: {msg}" for pid, msg in sorted(self.failures.items())]


def _write_aborted(path: Path, header: dict[str, Any], reason: str) -> None:
    """Transcript for a game that failed before its first prompt."""
    writer = TranscriptWriter(header, path)
    writer.emit(
        "GameEnded",
        score=GameScore(False, False, 0, 0).to_dict(),
        aborted=True,
        reason=reason,
        status="in_progress",
        correct_colors=[],
        auto_completed=False,
    )


def _play_one(cfg: RunConfig, factory: ProviderFactory, puzzle: Puzzle, tdir: Path) -> tuple[Path, str | None]:
    approach = cfg.approach.approach.value
    gid = f"{approach}-{puzzle.id}"
    path = tdir / f"{gid}.jsonl"
    seed = game_seed(cfg.seed, puzzle.id)
    try:
        provider = factory(puzzle)
    except Exception as exc:
        reason = f"{type(exc).__name__}: {exc}"
        _write_aborted(path, new_header(gid, puzzle.id, cfg.approach.to_dict(), seed), reason)
        return path, reason
    try:
        transcript = play(puzzle, provider, cfg.approach, path=path, game_id=gid, rng_seed=seed)
    except Exception as exc:
        return path, f"{type(exc).__name__}: {exc}"
    return path, transcript.ended.get("reason") if transcript.aborted else None


def run_experiment(cfg: RunConfig, factory: ProviderFactory | None = None) -> RunReport:
    """Play every puzzle in the dataset, then report from the files written.

    Config and dataset problems raise. Failures inside a game are recorded
    as aborted transcripts and listed in ``RunReport.failures``.
    """
    puzzles = load_archive_file(cfg.dataset)
    factory = factory or provider_factory(cfg)
    out = Path(cfg.out)
    tdir = out / TRANSCRIPT_DIR
    tdir.mkdir(parents=True, exist_ok=True)
    for stale in tdir.glob("*.jsonl"):
        stale.unlink()
    (out / RUN_FILE).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
        results = list(pool.map(lambda p: _play_one(cfg, factory, p, tdir), puzzles))

    failures = {}
    for puzzle, (_, reason) in zip(puzzles, results):
        if reason is not None:
            failures[puzzle.id] = reason
            log.warning("puzzle %s aborted: %s", puzzle.id, reason)

    paths = [path for path, _ in results]
    transcripts = [read_transcript(p) for p in paths]
    metrics = compute_metrics(transcripts, puzzles)

    files = write_report(out, [(metrics, transcripts)])
    return RunReport(out, metrics, paths, failures, files)


def replay_config(recorded: str | Path, out: str | Path, parallelism: int | None = None) -> RunConfig:
    """Config that re-runs a recorded experiment against its own transcripts."""
    recorded = Path(recorded)
    cfg = load_run_config(recorded / RUN_FILE)
    changes: dict[str, Any] = {
        "provider": {"kind": "replay", "dir": str(recorded / TRANSCRIPT_DIR)},
        "out": Path(out),
    }
    if parallelism is not None:
        changes["parallelism"] = parallelism
    return cfg.with_(**changes)


__all__ = [
    "ConfigError",
    "DEFAULT_PARALLELISM",
    "RunConfig",
    "RunReport",
    "game_seed",
    "load_run_config",
    "provider_factory",
    "replay_config",
    "run_experiment",
]
