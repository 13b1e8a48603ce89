"""Scene text localization by skeleton template matching."""

from .binarize import (
    BinarizationConfig,
    adaptive_binarize,
    binarize,
    global_binarize,
    otsu_threshold,
    select_mode,
)
from .components import ComponentBlock, compute_edge_area, label_components
from .evaluate import EvalReport, GroundTruth, evaluate, match_score
from .image import median_filter, read_image, to_grayscale, write_png
from .localize import (
    LocalizerConfig,
    RuleThresholds,
    TextBox,
    boxes_from_blocks,
    compute_thresholds,
    geometric_filter,
    group_blocks,
    merge_candidate_blocks,
    merge_text_regions,
    passes_absolute_rules,
)
from .matching import ClassifierConfig, MatchResult, best_match, classify_block, ncc
from .pipeline import PipelineConfig, detect_text, load_config
from .skeleton import Template, normalize_template, skeletonize, tight_crop
from .synth import GlyphSet, generate_scene, load_glyph_set
from .templates import (
    TemplateDatabase,
    build_database,
    load_database,
    load_layout,
    save_database,
)

__version__ = "0.1.0"

__all__ = [
    "BinarizationConfig",
    "ClassifierConfig",
    "ComponentBlock",
    "EvalReport",
    "GlyphSet",
    "GroundTruth",
    "LocalizerConfig",
    "MatchResult",
    "PipelineConfig",
    "RuleThresholds",
    "Template",
    "TemplateDatabase",
    "TextBox",
    "adaptive_binarize",
    "best_match",
    "binarize",
    "boxes_from_blocks",
    "build_database",
    "classify_block",
    "compute_edge_area",
    "compute_thresholds",
    "detect_text",
    "evaluate",
    "generate_scene",
    "geometric_filter",
    "global_binarize",
    "group_blocks",
    "label_components",
    "merge_candidate_blocks",
    "passes_absolute_rules",
    "load_config",
    "load_database",
    "load_glyph_set",
    "load_layout",
    "match_score",
    "median_filter",
    "merge_text_regions",
    "ncc",
    "normalize_template",
    "otsu_threshold",
    "read_image",
    "save_database",
    "select_mode",
    "skeletonize",
    "tight_crop",
    "to_grayscale",
    "write_png",
]
