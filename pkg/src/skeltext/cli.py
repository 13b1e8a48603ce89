"""Command-line front end: build-templates, detect, evaluate, synth.

Exit codes: 0 success, 1 partial failure (some inputs skipped), 2 fatal.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import pipeline, synth
from .evaluate import (
    evaluate,
    load_detections_file,
    load_icdar2003_xml,
    load_truth_file,
    write_detections_file,
)
from .image import read_image, write_png
from .templates import (
    GlyphBuildError,
    DatabaseFormatError,
    SheetLayoutError,
    build_database,
    load_database,
    load_layout,
    save_database,
)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="pipeline config JSON; flags below override it")
    p.add_argument("--mode", choices=["auto", "global", "adaptive"])
    p.add_argument("--global-threshold", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--offset-c", type=float)
    p.add_argument("--uniformity-cutoff", type=float)
    p.add_argument("--accept-threshold", type=float)
    p.add_argument("--min-foreground", type=int)
    p.add_argument("--granularity", choices=["word", "line"])
    p.add_argument("--dilation-width-factor", type=float)
    p.add_argument("--dilation-height", type=int)
    p.add_argument("--threshold-source", choices=["paired", "ar", "density"])
    p.add_argument("--rule-scale", type=float)
    p.add_argument("--median-radius", type=int)
    p.add_argument("--ncc-variant", choices=["pearson", "printed"])
    p.add_argument("--localize-order", choices=["regions-first", "blocks-first"])
    p.add_argument("--threads", help="worker count or 'auto'")


def _config_from_args(args) -> pipeline.PipelineConfig:
    cfg = pipeline.load_config(args.config) if args.config else pipeline.PipelineConfig()
    b, c, l = cfg.binarization, cfg.classifier, cfg.localizer
    if args.mode is not None:
        b.mode = args.mode
    if args.global_threshold is not None:
        b.global_threshold = args.global_threshold
    if args.window is not None:
        b.window = args.window
    if args.offset_c is not None:
        b.offset_c = args.offset_c
    if args.uniformity_cutoff is not None:
        b.uniformity_cutoff = args.uniformity_cutoff
    if args.accept_threshold is not None:
        c.accept_threshold = args.accept_threshold
    if args.min_foreground is not None:
        c.min_foreground = args.min_foreground
    if args.granularity is not None:
        l.granularity = args.granularity
    if args.dilation_width_factor is not None:
        l.dilation_width_factor = args.dilation_width_factor
    if args.dilation_height is not None:
        l.dilation_height = args.dilation_height
    if args.threshold_source is not None:
        l.threshold_source = args.threshold_source
    if args.rule_scale is not None:
        cfg.rule_scale = args.rule_scale
    if args.median_radius is not None:
        cfg.median_radius = args.median_radius
    if args.ncc_variant is not None:
        cfg.ncc_variant = args.ncc_variant
    if args.localize_order is not None:
        cfg.localize_order = args.localize_order
    if args.threads is not None:
        cfg.threads = None if args.threads == "auto" else int(args.threads)
    return cfg


def cmd_build_templates(args) -> int:
    if len(args.sheet) != len(args.layout):
        print("error: need one --layout per --sheet", file=sys.stderr)
        return EXIT_FATAL
    tags = args.font_tag or []
    if tags and len(tags) != len(args.sheet):
        print("error: need one --font-tag per --sheet (or none)", file=sys.stderr)
        return EXIT_FATAL
    sheets = []
    try:
        for i, (sheet_path, layout_path) in enumerate(zip(args.sheet, args.layout)):
            tag = tags[i] if tags else None
            sheets.append((read_image(sheet_path), load_layout(layout_path, tag)))
        db = build_database(sheets)
        save_database(db, args.out)
    except (GlyphBuildError, SheetLayoutError, DatabaseFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    print(f"{len(db)} templates -> {args.out}")
    counts: dict[str, int] = {}
    for e in db.entries:
        counts[e.font_tag] = counts.get(e.font_tag, 0) + 1
    for tag in sorted(counts):
        print(f"  {tag}: {counts[tag]} glyphs")
    return EXIT_OK


def _detect_one(path: Path, db, cfg):
    img = read_image(path)
    boxes = pipeline.detect_text(img, db, cfg)
    return img, boxes


def cmd_detect(args) -> int:
    try:
        cfg = _config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_FATAL
    db_path = args.db or cfg.db_path
    if not db_path:
        print("error: no template database (--db flag or db_path in config)", file=sys.stderr)
        return EXIT_FATAL
    try:
        db = load_database(db_path)
    except (DatabaseFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [Path(p) for p in args.images]
    workers = cfg.threads or None

    results: list[tuple[Path, object] | Exception] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        def run(path: Path):
            try:
                return _detect_one(path, db, cfg)
            except Exception as exc:  # noqa: BLE001 - reported per image
                return exc

        results = list(pool.map(run, paths))

    detections: dict[str, list] = {}
    failed = 0
    for path, result in zip(paths, results):
        if isinstance(result, Exception):
            print(f"warning: skipping {path}: {result}", file=sys.stderr)
            failed += 1
            continue
        img, boxes = result
        image_id = path.stem
        detections[image_id] = boxes
        write_png(out_dir / f"{image_id}_boxes.png", pipeline.annotate(img, boxes))
        print(f"{image_id}: {len(boxes)} boxes")
    write_detections_file(out_dir / "detections.txt", detections)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        if args.truth_xml:
            truth = load_icdar2003_xml(args.truth_xml)
        else:
            truth = load_truth_file(args.truth)
        detections = load_detections_file(args.detections)
        report = evaluate(
            detections, truth, mode=args.mode, per_image_mean=args.per_image_mean
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    print(report.to_text(), end="")
    if args.out:
        report.write_summary(args.out)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        sheet = read_image(args.sheet)
        layout = load_layout(args.layout)
        glyphs = synth.load_glyph_set(sheet, layout)
        seeds = range(args.seed_start, args.seed_start + args.count)
        backgrounds = tuple(args.backgrounds.split(","))
        truth_path, image_paths, failures = synth.write_corpus(
            args.out_dir,
            seeds,
            glyphs,
            width=args.width,
            height=args.height,
            backgrounds=backgrounds,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    print(f"{len(image_paths)} scenes -> {args.out_dir} (truth: {truth_path})")
    for seed, message in failures:
        print(f"warning: seed {seed} skipped: {message}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skeltext", description="Scene text localization toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-templates", help="build a template database from glyph sheets")
    p.add_argument("--sheet", action="append", required=True, help="glyph sheet image")
    p.add_argument("--layout", action="append", required=True, help="layout descriptor")
    p.add_argument("--font-tag", action="append", help="font tag per sheet")
    p.add_argument("--out", required=True, help="output database path")
    p.set_defaults(func=cmd_build_templates)

    p = sub.add_parser("detect", help="detect text boxes in images")
    p.add_argument("images", nargs="+", help="input images")
    p.add_argument("--db", help="template database (or db_path in --config)")
    p.add_argument("--out-dir", required=True, help="output directory")
    _add_config_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="score detections against ground truth")
    p.add_argument("--detections", required=True)
    p.add_argument("--truth", help="truth file (image_id x y w h [transcription])")
    p.add_argument("--truth-xml", help="ICDAR 2003 tagged-rectangles XML")
    p.add_argument("--mode", choices=["harmonic", "iou"], default="harmonic")
    p.add_argument("--per-image-mean", action="store_true")
    p.add_argument("--out", help="write machine-readable summary JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic scene corpus")
    p.add_argument("--sheet", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--width", type=int, default=560)
    p.add_argument("--height", type=int, default=400)
    p.add_argument("--backgrounds", default="flat,gradient")
    p.set_defaults(func=cmd_synth)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "evaluate" and not (args.truth or args.truth_xml):
        print("error: one of --truth or --truth-xml is required", file=sys.stderr)
        return EXIT_FATAL
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
