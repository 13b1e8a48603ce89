#!/usr/bin/env python3
"""Run the synthetic end-to-end benchmark and print P/R/F plus timing.

Generates a seeded scene corpus, runs the full detection pipeline, and
scores word-level boxes with the harmonic-area metric. Useful for
calibrating thresholds: every pipeline knob is exposed as a flag.
"""

import argparse
import json
import time
from pathlib import Path

from skeltext.evaluate import evaluate
from skeltext.image import read_image
from skeltext.matching import ClassifierConfig
from skeltext.pipeline import PipelineConfig, detect_text
from skeltext.synth import SceneOverflowError, generate_scene, load_glyph_set
from skeltext.templates import build_database, load_layout

ROOT = Path(__file__).resolve().parent.parent
SIZES = (64, 44, 30, 21, 15)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fonts-dir", default=str(ROOT / "assets" / "fonts"))
    ap.add_argument("--name", default="dejavu_sans")
    ap.add_argument("--seed-start", type=int, default=0)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--accept-threshold", type=float, default=None)
    ap.add_argument("--threshold-source", default=None,
                    choices=["paired", "ar", "density", "robust"])
    ap.add_argument("--localize-order", default=None,
                    choices=["regions-first", "blocks-first"])
    ap.add_argument("--ncc-variant", default=None, choices=["pearson", "printed"])
    ap.add_argument("--granularity", default=None, choices=["word", "line"])
    ap.add_argument("--mode", default="harmonic", choices=["harmonic", "iou"])
    ap.add_argument("--json", action="store_true", help="emit a JSON summary line")
    args = ap.parse_args()

    fonts = Path(args.fonts_dir)
    sheets = [
        (read_image(fonts / f"{args.name}_{s}.png"), load_layout(fonts / f"{args.name}_{s}.layout"))
        for s in SIZES
    ]
    glyphs = load_glyph_set(*sheets[0])

    cfg = PipelineConfig()
    if args.accept_threshold is not None:
        cfg.classifier = ClassifierConfig(accept_threshold=args.accept_threshold)
    if args.threshold_source is not None:
        cfg.localizer.threshold_source = args.threshold_source
    if args.localize_order is not None:
        cfg.localize_order = args.localize_order
    if args.ncc_variant is not None:
        cfg.ncc_variant = args.ncc_variant
    if args.granularity is not None:
        cfg.localizer.granularity = args.granularity

    start = time.perf_counter()
    db = build_database(sheets)
    build_time = time.perf_counter() - start

    detections, truths, overflow = {}, [], 0
    detect_start = time.perf_counter()
    for seed in range(args.seed_start, args.seed_start + args.count):
        try:
            img, truth = generate_scene(seed, glyphs)
        except SceneOverflowError:
            overflow += 1
            continue
        detections[truth.image_id] = detect_text(img, db, cfg)
        truths.append(truth)
    detect_time = time.perf_counter() - detect_start

    report = evaluate(detections, truths, mode=args.mode)
    summary = {
        "scenes": len(truths),
        "overflow_seeds": overflow,
        "precision": round(report.precision, 4),
        "recall": round(report.recall, 4),
        "f_measure": round(report.f_measure, 4),
        "db_build_seconds": round(build_time, 2),
        "detect_seconds": round(detect_time, 2),
    }
    if args.json:
        print(json.dumps(summary))
    else:
        for key, value in summary.items():
            print(f"{key}: {value}")


if __name__ == "__main__":
    main()
