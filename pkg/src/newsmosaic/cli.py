"""Command-line front door: run the pipeline, compute metrics, debug layouts.

Exit codes: 0 success, 1 fatal configuration problem, 2 fixture I/O problem.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .edits import LiveIrcSource, ReplaySource
from .layout import (
    LOOSE_KIND,
    STRICT_KIND,
    LayoutSpec,
    classify_prominent,
    layout_loose,
    layout_strict,
)
from .media import MediaItem, SocialSignals
from .metrics import UndefinedMetricError, compute_metrics, load_labels
from .pipeline import ConfigError, PipelineConfig, run_pipeline

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FIXTURE_IO = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); keep 2 for I/O
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="newsmosaic")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the detection + illustration pipeline")
    run.add_argument("--config", required=True, help="JSON pipeline config")
    mode = run.add_mutually_exclusive_group()
    mode.add_argument("--replay", help="replay fixture instead of the live feed")
    mode.add_argument("--live", action="store_true", help="connect to the live feed")
    run.add_argument("--archive-dir", help="override the archive directory")

    metrics = sub.add_parser("metrics", help="compute evaluation metrics from labels")
    metrics.add_argument("--labels", required=True, help="JSON-lines label file")

    layout = sub.add_parser("layout", help="print placed rectangles for an item file")
    layout.add_argument("--items", required=True, help="JSON list of media items")
    layout.add_argument("--kind", required=True, choices=[STRICT_KIND, LOOSE_KIND])
    layout.add_argument("--width", type=int, default=600)
    layout.add_argument("--row-height", type=int, default=200)
    layout.add_argument("--columns", type=int, default=2)
    layout.add_argument("--gutter", type=int, default=2)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = PipelineConfig.from_file(args.config)
        if args.archive_dir:
            cfg.archive_dir = Path(args.archive_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.replay:
        if not Path(args.replay).exists():
            print(f"replay fixture not found: {args.replay}", file=sys.stderr)
            return EXIT_FIXTURE_IO
        source = ReplaySource(args.replay)
    elif args.live:
        source = LiveIrcSource(languages=cfg.languages)
    else:
        print("one of --replay or --live is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_pipeline(cfg, source)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"fixture I/O error: {exc}", file=sys.stderr)
        return EXIT_FIXTURE_IO
    print(json.dumps(report.as_dict(), ensure_ascii=False, indent=2))
    return EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    try:
        labels = load_labels(args.labels)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"cannot read labels: {exc}", file=sys.stderr)
        return EXIT_FIXTURE_IO
    try:
        report = compute_metrics(labels)
    except (UndefinedMetricError, ValueError) as exc:
        print(f"metrics error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps({
        "recall": report.recall,
        "absolute_precision": report.absolute_precision,
        "relative_precision": report.relative_precision,
    }, indent=2))
    return EXIT_OK


def _item_from_record(record: dict) -> MediaItem:
    record = dict(record)
    signals = record.pop("signals", {})
    return MediaItem(signals=SocialSignals(**signals), **record)


def _cmd_layout(args: argparse.Namespace) -> int:
    try:
        records = json.loads(Path(args.items).read_text(encoding="utf-8"))
        items = [_item_from_record(r) for r in records]
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read items: {exc}", file=sys.stderr)
        return EXIT_FIXTURE_IO
    except (TypeError, ValueError, KeyError) as exc:
        print(f"bad item record: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        spec = LayoutSpec(args.width, args.row_height, args.columns, args.gutter)
        if args.kind == STRICT_KIND:
            gallery = layout_strict(items, spec)
        else:
            gallery = layout_loose(items, classify_prominent(items), spec)
    except ValueError as exc:
        print(f"layout error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for placed in gallery.placed:
        print(json.dumps({
            "item_id": placed.item.item_id,
            "x": placed.x,
            "y": placed.y,
            "w": placed.w,
            "h": placed.h,
            "prominent": placed.prominent,
            "unit": placed.unit,
        }))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "metrics":
        return _cmd_metrics(args)
    return _cmd_layout(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
