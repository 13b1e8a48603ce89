"""End-to-end detection: preprocess, binarize, segment, classify, localize."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .binarize import BinarizationConfig, binarize
from .components import label_components
from .image import ensure_gray, median_filter, to_grayscale
from .localize import (
    LocalizerConfig,
    TextBox,
    boxes_from_blocks,
    compute_thresholds,
    merge_candidate_blocks,
    merge_text_regions,
    passes_absolute_rules,
    rejected_by_rules,
)
from .matching import ClassifierConfig, classify_block


@dataclass
class PipelineConfig:
    binarization: BinarizationConfig = field(default_factory=BinarizationConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    localizer: LocalizerConfig = field(default_factory=LocalizerConfig)
    rule_scale: float = 1.0
    median_radius: int = 1
    ncc_variant: str = "pearson"
    localize_order: str = "regions-first"  # or "blocks-first"
    db_path: str | None = None
    threads: int | None = None  # None = auto

    def __post_init__(self) -> None:
        if self.rule_scale <= 0:
            raise ValueError("rule_scale must be > 0")
        if self.localize_order not in ("regions-first", "blocks-first"):
            raise ValueError(f"unknown localize_order {self.localize_order!r}")


def _dataclass_from_dict(cls, data: dict):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**data)


def config_from_dict(data: dict) -> PipelineConfig:
    data = dict(data)
    kwargs = {}
    for key, cls in (
        ("binarization", BinarizationConfig),
        ("classifier", ClassifierConfig),
        ("localizer", LocalizerConfig),
    ):
        if key in data:
            kwargs[key] = _dataclass_from_dict(cls, data.pop(key))
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs.update(data)
    return PipelineConfig(**kwargs)


def load_config(path: str | Path) -> PipelineConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def detect_text(img: np.ndarray, db, cfg: PipelineConfig | None = None) -> list[TextBox]:
    """Run the whole pipeline on one image and return its text boxes."""
    cfg = cfg or PipelineConfig()
    gray = to_grayscale(img) if img.ndim == 3 else ensure_gray(img)
    gray = median_filter(gray, cfg.median_radius)
    binary = binarize(gray, cfg.binarization)

    _, blocks = label_components(binary, connectivity=8)
    candidates = []
    for block in blocks:
        kind, result = classify_block(block, db, cfg.classifier, cfg.ncc_variant)
        if kind == "text":
            candidates.append((block, result.score))
    if not candidates:
        return []
    text_blocks = [b for b, _ in candidates]
    scores = [s for _, s in candidates]

    if cfg.localize_order == "regions-first":
        # merge detections into word/line regions first, then apply the
        # rejection rules at region granularity, where the per-image
        # statistics are comparable across candidates
        regions, region_scores = merge_candidate_blocks(
            text_blocks, binary.shape, cfg.localizer, scores
        )
        th = compute_thresholds(regions, cfg.localizer.threshold_source)
        kept = [
            (b, s)
            for b, s in zip(regions, region_scores)
            if not rejected_by_rules(b, th, cfg.rule_scale)
        ]
        if not kept:
            return []
        return boxes_from_blocks(
            [b for b, _ in kept], [s for _, s in kept], cfg.localizer.granularity
        )

    # literal order: rules on the raw blocks, then dilation grouping;
    # threshold statistics come from candidates the absolute size rules keep
    population = [b for b in text_blocks if passes_absolute_rules(b, cfg.rule_scale)]
    th = compute_thresholds(population or text_blocks, cfg.localizer.threshold_source)
    kept = [(b, s) for b, s in candidates if not rejected_by_rules(b, th, cfg.rule_scale)]
    if not kept:
        return []
    return merge_text_regions(
        [b for b, _ in kept], binary.shape, cfg.localizer, [s for _, s in kept]
    )


def annotate(img: np.ndarray, boxes, color=(255, 0, 0), thickness: int = 2) -> np.ndarray:
    """Copy of the image with box outlines drawn on it."""
    if img.ndim == 2:
        out = np.repeat(img[:, :, None], 3, axis=2).copy()
    else:
        out = img.copy()
    h, w = out.shape[:2]
    col = np.array(color, dtype=np.uint8)
    for b in boxes:
        x0, y0 = max(0, b.x), max(0, b.y)
        x1, y1 = min(w, b.x + b.width), min(h, b.y + b.height)
        t = thickness
        out[max(0, y0 - t) : y0, max(0, x0 - t) : min(w, x1 + t)] = col
        out[y1 : min(h, y1 + t), max(0, x0 - t) : min(w, x1 + t)] = col
        out[max(0, y0 - t) : min(h, y1 + t), max(0, x0 - t) : x0] = col
        out[max(0, y0 - t) : min(h, y1 + t), x1 : min(w, x1 + t)] = col
    return out
