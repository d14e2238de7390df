"""Command line entry point: ``methodactor {run,replay,report,validate,prompts}``.

Exit status is 0 on success (including runs where some games aborted), 1 on
a fatal config, dataset or transcript error, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .approaches import ApproachId
from .dataset import ArchiveError, dataset_summary, load_archive_file
from .metrics import UnknownPuzzleId, compute_metrics
from .prompt_kit import brainstorm_templates, get_template, load_catalog, verify_manifest
from .report import render_csv, write_report
from .runner import (
    RUN_FILE,
    TRANSCRIPT_DIR,
    ConfigError,
    RunReport,
    load_run_config,
    replay_config,
    run_experiment,
)
from .transcript import TranscriptError, read_transcripts

log = logging.getLogger("methodactor")

EXIT_OK, EXIT_FATAL, EXIT_USAGE = 0, 1, 2
FATAL = (ConfigError, ArchiveError, TranscriptError, UnknownPuzzleId, OSError)


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="methodactor", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play every puzzle in a dataset and write a report")
    run.add_argument("--config", required=True, type=Path, help="run config (JSON)")
    run.add_argument("--out", type=Path, help="output directory (overrides config)")
    run.add_argument("--seed", type=int, help="global seed (overrides config)")
    run.add_argument("--parallelism", type=int, help="concurrent games (overrides config)")
    run.add_argument("--approach", help="approach name (overrides config; model resets to its default)")
    run.add_argument("--model", help="model id (overrides config)")

    replay = sub.add_parser("replay", help="re-run a recorded experiment from its transcripts")
    replay.add_argument("recorded", type=Path, help="directory written by an earlier run")
    replay.add_argument("--out", type=Path, required=True)
    replay.add_argument("--parallelism", type=int)

    report = sub.add_parser("report", help="metrics, CSV and figures from transcript directories")
    report.add_argument("dirs", nargs="+", type=Path, help="run directories or transcript directories")
    report.add_argument("--dataset", type=Path, help="puzzle archive (default: from each run.json)")
    report.add_argument("--out", type=Path, help="where to write report files (default: the single input dir)")

    validate = sub.add_parser("validate", help="check a puzzle archive file")
    validate.add_argument("archive", type=Path)

    prompts = sub.add_parser("prompts", help="list or print prompt templates")
    prompts.add_argument("action", choices=("list", "dump", "verify"))
    prompts.add_argument("template", nargs="?", help="template id for dump, e.g. actor.decide or brainstorm/07")
    return parser


def _print_run(report: RunReport) -> None:
    m = report.metrics
    print(
        f"{m.games} games, {m.aborted} aborted: solved {m.puzzles_solved_pct:.1f}%, "
        f"perfect {m.solved_perfectly_pct:.1f}%, correct:incorrect {m.good_bad_label}"
    )
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {report.out}")


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    changes = {}
    if args.out is not None:
        changes["out"] = args.out
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.parallelism is not None:
        if args.parallelism < 1:
            raise UsageError("--parallelism must be >= 1")
        changes["parallelism"] = args.parallelism
    approach = cfg.approach
    if args.approach is not None:
        try:
            approach = approach.with_(approach=ApproachId.parse(args.approach), model_id="")
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.model is not None:
        approach = approach.with_(model_id=args.model)
    cfg = cfg.with_(approach=approach, **changes)
    _print_run(run_experiment(cfg))
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    if not (args.recorded / RUN_FILE).is_file():
        raise ConfigError(f"{args.recorded} has no {RUN_FILE}; is it a run directory?")
    _print_run(run_experiment(replay_config(args.recorded, args.out, args.parallelism)))
    return EXIT_OK


def _dataset_for(directory: Path, override: Path | None) -> Path:
    if override is not None:
        return override
    run_file = directory / RUN_FILE
    if run_file.is_file():
        return Path(json.loads(run_file.read_text(encoding="utf-8"))["dataset"])
    raise UsageError(f"{directory} has no {RUN_FILE}; pass --dataset")


def cmd_report(args: argparse.Namespace) -> int:
    if args.out is None and len(args.dirs) > 1:
        raise UsageError("--out is required with more than one directory")
    runs = []
    for d in args.dirs:
        if not d.is_dir():
            raise ConfigError(f"not a directory: {d}")
        tdir = d / TRANSCRIPT_DIR if (d / TRANSCRIPT_DIR).is_dir() else d
        transcripts = read_transcripts(tdir)
        if not transcripts:
            raise ConfigError(f"no transcripts in {tdir}")
        puzzles = load_archive_file(_dataset_for(d, args.dataset))
        runs.append((compute_metrics(transcripts, puzzles), transcripts))
    out = args.out or args.dirs[0]
    files = write_report(out, runs)
    sys.stdout.write(render_csv([m for m, _ in runs]))
    log.info("wrote %s", ", ".join(str(f) for f in files))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    puzzles = load_archive_file(args.archive)
    n = len(puzzles)
    print(f"{n} puzzle{'' if n == 1 else 's'} OK")
    for bucket, count in dataset_summary(puzzles).items():
        if count:
            print(f"  difficulty {bucket.label}: {count}")
    return EXIT_OK


def cmd_prompts(args: argparse.Namespace) -> int:
    if args.action == "list":
        for tid in sorted(load_catalog()):
            print(tid)
        for t in brainstorm_templates():
            print(f"brainstorm/{t.index:02d}  {t.pattern}")
        return EXIT_OK
    if args.action == "verify":
        changed = verify_manifest()
        for name in changed:
            print(f"changed: {name}")
        print("manifest OK" if not changed else f"{len(changed)} file(s) differ from manifest")
        return EXIT_FATAL if changed else EXIT_OK
    if not args.template:
        raise UsageError("prompts dump needs a template id")
    if args.template.startswith("brainstorm/"):
        try:
            idx = int(args.template.split("/", 1)[1])
            body = brainstorm_templates()[idx - 1].body
        except (ValueError, IndexError):
            raise UsageError(f"no brainstorm template {args.template!r}") from None
    else:
        try:
            body = get_template(args.template).body
        except KeyError:
            raise UsageError(f"no template {args.template!r}") from None
    sys.stdout.write(body if body.endswith("\n") else body + "\n")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "replay": cmd_replay,
    "report": cmd_report,
    "validate": cmd_validate,
    "prompts": cmd_prompts,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"methodactor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FATAL as exc:
        print(f"methodactor: error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
