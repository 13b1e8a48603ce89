"""Geometric rejection rules, dilation-based grouping, and box emission.

Rules reject a block when any of these holds (thresholds frozen up front):

  i)   ar < T1  or  density < T2
  ii)  height > 50  or  height < 6
  iii) width < 5  or  height * width < 24

T1 and T2 are a mean and a standard deviation computed per image over the
candidate population; which statistic feeds which threshold is configurable
because the pairing is genuinely ambiguous. The "paired" source gates each
quantity by its own population mean/deviation; "robust" sets each threshold
two deviations below its population mean, the usual outlier fence, which
keeps rule i from biting typical members when candidate shapes vary widely.
The pixel constants assume roughly VGA-scale inputs and scale with
``rule_scale``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .components import ComponentBlock, label_components

ThresholdSource = str  # "paired" | "ar" | "density" | "robust"
Granularity = str  # "word" | "line"

_WORD_FACTOR = 0.5
_LINE_FACTOR = 1.5


@dataclass
class RuleThresholds:
    t1: float
    t2: float


@dataclass
class TextBox:
    x: int
    y: int
    width: int
    height: int
    score: float
    granularity: Granularity = "word"


@dataclass
class LocalizerConfig:
    granularity: Granularity = "word"
    dilation_width_factor: float | None = None  # None -> 0.5 word / 1.5 line
    dilation_height: int = 3
    threshold_source: ThresholdSource = "robust"

    def __post_init__(self) -> None:
        if self.granularity not in ("word", "line"):
            raise ValueError(f"granularity must be 'word' or 'line': {self.granularity}")
        if self.dilation_width_factor is not None and self.dilation_width_factor <= 0:
            raise ValueError("dilation_width_factor must be > 0")
        if self.threshold_source not in ("paired", "ar", "density", "robust"):
            raise ValueError(f"unknown threshold_source {self.threshold_source!r}")

    @property
    def width_factor(self) -> float:
        if self.dilation_width_factor is not None:
            return self.dilation_width_factor
        return _WORD_FACTOR if self.granularity == "word" else _LINE_FACTOR


def compute_thresholds(
    blocks: Sequence[ComponentBlock], source: ThresholdSource = "paired"
) -> RuleThresholds:
    """T1/T2 from the candidate population (population standard deviation)."""
    if not blocks:
        raise ValueError("cannot compute thresholds from an empty block list")
    ars = np.array([b.ar for b in blocks], dtype=np.float64)
    densities = np.array([b.density for b in blocks], dtype=np.float64)
    if source == "paired":
        return RuleThresholds(t1=float(ars.mean()), t2=float(densities.std()))
    if source == "ar":
        return RuleThresholds(t1=float(ars.mean()), t2=float(ars.std()))
    if source == "density":
        return RuleThresholds(t1=float(densities.mean()), t2=float(densities.std()))
    return RuleThresholds(
        t1=float(ars.mean() - 2.0 * ars.std()),
        t2=float(densities.mean() - 2.0 * densities.std()),
    )


def rejected_by_rules(
    block: ComponentBlock, th: RuleThresholds, rule_scale: float = 1.0
) -> bool:
    if block.ar < th.t1 or block.density < th.t2:
        return True
    return not passes_absolute_rules(block, rule_scale)


def geometric_filter(
    blocks: Sequence[ComponentBlock], th: RuleThresholds, rule_scale: float = 1.0
) -> list[ComponentBlock]:
    """Keep blocks no rule fires on, in input order; thresholds stay frozen."""
    return [b for b in blocks if not rejected_by_rules(b, th, rule_scale)]


def passes_absolute_rules(block: ComponentBlock, rule_scale: float = 1.0) -> bool:
    """The size rules alone (ii and iii), which need no thresholds."""
    s = rule_scale
    if block.height > 50 * s or block.height < 6 * s:
        return False
    if block.width < 5 * s or block.height * block.width < 24 * s * s:
        return False
    return True


def group_blocks(
    blocks: Sequence[ComponentBlock],
    img_dims: tuple[int, int],
    cfg: LocalizerConfig | None = None,
) -> list[list[int]]:
    """Partition block indices into dilation-connected groups.

    Block foreground is painted onto a blank canvas, dilated with a
    horizontal rectangular element sized from the median block height, and
    re-labeled with 4-connectivity; blocks landing in the same component
    form one group. Groups come back ordered by component label.
    """
    cfg = cfg or LocalizerConfig()
    if not blocks:
        return []
    h, w = img_dims
    canvas = np.zeros((h, w), dtype=np.uint8)
    for block in blocks:
        x, y, bw, bh = block.bbox
        region = canvas[y : y + bh, x : x + bw]
        np.maximum(region, block.crop, out=region)

    median_h = float(np.median([b.height for b in blocks]))
    elem_w = max(3, round(cfg.width_factor * median_h))
    elem_h = max(1, cfg.dilation_height)
    dilated = ndimage.binary_dilation(canvas, structure=np.ones((elem_h, elem_w)))
    labels, _ = label_components(dilated.astype(np.uint8), connectivity=4)

    groups: dict[int, list[int]] = {}
    for i, block in enumerate(blocks):
        ys, xs = np.nonzero(block.crop)
        comp = int(labels[block.y + ys[0], block.x + xs[0]])
        groups.setdefault(comp, []).append(i)
    return [groups[comp] for comp in sorted(groups)]


def _union_bbox(blocks: Sequence[ComponentBlock]) -> tuple[int, int, int, int]:
    x0 = min(b.x for b in blocks)
    y0 = min(b.y for b in blocks)
    x1 = max(b.x + b.width for b in blocks)
    y1 = max(b.y + b.height for b in blocks)
    return x0, y0, x1 - x0, y1 - y0


def merge_candidate_blocks(
    blocks: Sequence[ComponentBlock],
    img_dims: tuple[int, int],
    cfg: LocalizerConfig | None = None,
    scores: Sequence[float] | None = None,
) -> tuple[list[ComponentBlock], list[float]]:
    """Fuse dilation-connected blocks into region blocks with mean scores.

    The returned regions carry geometry aggregated from their members
    (union bbox, summed area and edge pixels), so the rejection rules can
    run at word/line granularity.
    """
    if scores is None:
        scores = [1.0] * len(blocks)
    if len(scores) != len(blocks):
        raise ValueError("scores must align with blocks")
    regions: list[ComponentBlock] = []
    region_scores: list[float] = []
    for k, member_ids in enumerate(group_blocks(blocks, img_dims, cfg)):
        members = [blocks[i] for i in member_ids]
        x, y, w, h = _union_bbox(members)
        crop = np.zeros((h, w), dtype=np.uint8)
        for m in members:
            view = crop[m.y - y : m.y - y + m.height, m.x - x : m.x - x + m.width]
            np.maximum(view, m.crop, out=view)
        ea = sum(m.edge_area for m in members)
        regions.append(
            ComponentBlock(
                label=k + 1,
                bbox=(x, y, w, h),
                area=sum(m.area for m in members),
                crop=crop,
                edge_area=ea,
                ar=w / h,
                density=ea / (h * w),
            )
        )
        region_scores.append(float(np.mean([scores[i] for i in member_ids])))
    return regions, region_scores


def boxes_from_blocks(
    blocks: Sequence[ComponentBlock],
    scores: Sequence[float] | None = None,
    granularity: Granularity = "word",
) -> list[TextBox]:
    """One TextBox per block, verbatim geometry."""
    if scores is None:
        scores = [1.0] * len(blocks)
    return [
        TextBox(x=b.x, y=b.y, width=b.width, height=b.height, score=float(s), granularity=granularity)
        for b, s in zip(blocks, scores)
    ]


def merge_text_regions(
    survivors: Sequence[ComponentBlock],
    img_dims: tuple[int, int],
    cfg: LocalizerConfig | None = None,
    scores: Sequence[float] | None = None,
) -> list[TextBox]:
    """Group surviving blocks by dilation and emit one box per group.

    Each group's box is the union of its members' bounding boxes; its score
    is the mean of member scores.
    """
    cfg = cfg or LocalizerConfig()
    if not survivors:
        return []
    if scores is None:
        scores = [1.0] * len(survivors)
    if len(scores) != len(survivors):
        raise ValueError("scores must align with survivors")
    boxes: list[TextBox] = []
    for member_ids in group_blocks(survivors, img_dims, cfg):
        x, y, w, h = _union_bbox([survivors[i] for i in member_ids])
        boxes.append(
            TextBox(
                x=x,
                y=y,
                width=w,
                height=h,
                score=float(np.mean([scores[i] for i in member_ids])),
                granularity=cfg.granularity,
            )
        )
    return boxes
