import numpy as np
import pytest

from skeltext.components import ComponentBlock
from skeltext.localize import (
    LocalizerConfig,
    RuleThresholds,
    boxes_from_blocks,
    compute_thresholds,
    geometric_filter,
    group_blocks,
    merge_candidate_blocks,
    merge_text_regions,
    passes_absolute_rules,
)


def make_block(width, height, density, label=1, x=0, y=0):
    """A block with chosen geometry; ar follows from width/height."""
    crop = np.ones((height, width), np.uint8)
    area = width * height
    ea = max(1, round(density * height * width))
    return ComponentBlock(
        label=label,
        bbox=(x, y, width, height),
        area=area,
        crop=crop,
        edge_area=ea,
        ar=width / height,
        density=density,
    )


# Hand-constructed rule table, evaluated against thresholds T1=0.5, T2=0.20.
# Expected outcomes derived by hand from the three rejection rules:
#   i)   ar < 0.5 or density < 0.20
#   ii)  height > 50 or height < 6
#   iii) width < 5 or height*width < 24
RULE_TABLE = [
    # (width, height, density, survives, note)
    (12, 20, 0.30, True, "no rule fires"),
    (4, 7, 0.30, False, "iii alone: width < 5"),
    (35, 60, 0.30, False, "ii alone: height > 50"),
    (12, 5, 0.30, False, "ii alone: height < 6"),
    (5, 10, 0.30, True, "boundary: width == 5, ar 0.5 not < 0.5"),
    (9, 20, 0.30, False, "i alone: ar 0.45 < T1"),
    (12, 20, 0.19, False, "i alone: density < T2"),
    (3, 4, 0.10, False, "i (density), ii, and iii fire jointly"),
    (30, 30, 0.20, True, "boundaries: density == T2, area 900"),
    (60, 50, 0.95, True, "boundary: height == 50 passes"),
    (6, 6, 0.50, True, "area 36 >= 24, ar 1.0"),
    (23, 1, 1.00, False, "ii and iii despite huge ar"),
]
EXPECTED_SURVIVORS = [i for i, row in enumerate(RULE_TABLE) if row[3]]


class TestComputeThresholds:
    def test_singleton(self):
        th = compute_thresholds([make_block(10, 20, 0.3)])
        assert th.t1 == 10 / 20
        assert th.t2 == 0.0

    def test_two_blocks_hand_arithmetic(self):
        blocks = [make_block(4, 10, 0.2), make_block(8, 10, 0.6)]
        th = compute_thresholds(blocks, source="paired")
        assert th.t1 == pytest.approx(0.6, abs=1e-15)
        assert th.t2 == pytest.approx(0.2, abs=1e-15)

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(0)
        blocks = [
            make_block(int(rng.integers(5, 40)), int(rng.integers(6, 45)), float(rng.uniform(0.05, 0.9)))
            for _ in range(20)
        ]
        th = compute_thresholds(blocks, source="paired")
        ars = [b.ar for b in blocks]
        dens = [b.density for b in blocks]
        mean_ar = sum(ars) / len(ars)
        var_d = sum((d - sum(dens) / len(dens)) ** 2 for d in dens) / len(dens)
        assert abs(th.t1 - mean_ar) < 1e-12
        assert abs(th.t2 - var_d ** 0.5) < 1e-12

    def test_sources(self):
        blocks = [make_block(4, 10, 0.2), make_block(8, 10, 0.6)]
        ar = compute_thresholds(blocks, source="ar")
        assert ar.t1 == pytest.approx(0.6) and ar.t2 == pytest.approx(0.2)
        dens = compute_thresholds(blocks, source="density")
        assert dens.t1 == pytest.approx(0.4) and dens.t2 == pytest.approx(0.2)
        robust = compute_thresholds(blocks, source="robust")
        assert robust.t1 == pytest.approx(0.6 - 2 * 0.2)
        assert robust.t2 == pytest.approx(0.4 - 2 * 0.2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compute_thresholds([])


class TestGeometricFilter:
    def setup_method(self):
        self.th = RuleThresholds(t1=0.5, t2=0.20)
        self.blocks = [make_block(w, h, d, label=i) for i, (w, h, d, _, _) in enumerate(RULE_TABLE)]

    def test_hand_table(self):
        survivors = geometric_filter(self.blocks, self.th)
        assert [b.label for b in survivors] == EXPECTED_SURVIVORS

    def test_idempotent_under_frozen_thresholds(self):
        once = geometric_filter(self.blocks, self.th)
        twice = geometric_filter(once, self.th)
        assert twice == once

    def test_permutation_independent(self):
        rng = np.random.default_rng(1)
        perm = list(rng.permutation(len(self.blocks)))
        shuffled = [self.blocks[i] for i in perm]
        survivors = geometric_filter(shuffled, self.th)
        assert {b.label for b in survivors} == set(EXPECTED_SURVIVORS)
        kept_order = [b.label for b in survivors]
        assert kept_order == [self.blocks[i].label for i in perm if self.blocks[i].label in set(EXPECTED_SURVIVORS)]

    def test_rule_scale(self):
        # at scale 2 the small-size limits double: a 20-tall block is fine,
        # but an 8-tall one dies (8 < 12)
        th = RuleThresholds(t1=-1.0, t2=-1.0)
        tall = make_block(12, 20, 0.5)
        short = make_block(12, 8, 0.5)
        assert geometric_filter([tall, short], th, rule_scale=2.0) == [tall]

    def test_absolute_rules_helper(self):
        assert passes_absolute_rules(make_block(12, 20, 0.3))
        assert not passes_absolute_rules(make_block(4, 20, 0.3))
        assert not passes_absolute_rules(make_block(12, 60, 0.3))

    def test_empty_ok(self):
        assert geometric_filter([], self.th) == []


def glyph_like(x, y, w=8, h=16):
    crop = np.ones((h, w), np.uint8)
    return ComponentBlock(
        label=0, bbox=(x, y, w, h), area=w * h, crop=crop, edge_area=2 * (w + h) - 4,
        ar=w / h, density=(2 * (w + h) - 4) / (w * h),
    )


class TestMergeTextRegions:
    def test_empty(self):
        assert merge_text_regions([], (50, 50)) == []

    def test_small_gap_merges(self):
        # gap of 4 px; element width = max(3, round(0.5 * 16)) = 8 > gap
        a = glyph_like(10, 10)
        b = glyph_like(22, 10)
        boxes = merge_text_regions([a, b], (40, 60))
        assert len(boxes) == 1
        box = boxes[0]
        assert (box.x, box.y) == (10, 10)
        assert box.width == 20 and box.height == 16

    def test_word_vs_line_granularity(self):
        # words 20 px apart: the word element (8 px) bridges at most 7, the
        # line element round(1.5 * 16) = 24 px bridges up to 23
        left = [glyph_like(10, 10), glyph_like(20, 10)]
        right = [glyph_like(48, 10), glyph_like(58, 10)]
        blocks = left + right
        word_boxes = merge_text_regions(blocks, (40, 120), LocalizerConfig(granularity="word"))
        assert len(word_boxes) == 2
        line_boxes = merge_text_regions(blocks, (40, 120), LocalizerConfig(granularity="line"))
        assert len(line_boxes) == 1
        assert line_boxes[0].granularity == "line"

    def test_boxes_contain_member_bboxes(self):
        rng = np.random.default_rng(2)
        blocks = [glyph_like(int(rng.integers(0, 180)), int(rng.integers(0, 80))) for _ in range(12)]
        boxes = merge_text_regions(blocks, (100, 200))
        for blk in blocks:
            containing = [
                b for b in boxes
                if b.x <= blk.x and b.y <= blk.y
                and blk.x + blk.width <= b.x + b.width
                and blk.y + blk.height <= b.y + b.height
            ]
            assert containing, "every block's bbox lies inside some emitted box"

    def test_scores_averaged(self):
        a = glyph_like(10, 10)
        b = glyph_like(22, 10)
        boxes = merge_text_regions([a, b], (40, 60), scores=[0.4, 0.8])
        assert boxes[0].score == pytest.approx(0.6)

    def test_more_survivors_never_shrink_coverage(self):
        def coverage(boxes, dims):
            canvas = np.zeros(dims, dtype=bool)
            for b in boxes:
                canvas[b.y : b.y + b.height, b.x : b.x + b.width] = True
            return canvas

        rng = np.random.default_rng(3)
        dims = (100, 200)
        blocks = [glyph_like(int(rng.integers(0, 180)), int(rng.integers(0, 80))) for _ in range(10)]
        smaller = coverage(merge_text_regions(blocks[:6], dims), dims)
        larger = coverage(merge_text_regions(blocks, dims), dims)
        assert (smaller <= larger).all()

    def test_score_length_mismatch(self):
        with pytest.raises(ValueError):
            merge_text_regions([glyph_like(0, 0)], (30, 30), scores=[0.1, 0.2])


class TestMergeCandidateBlocks:
    def test_region_geometry_aggregates(self):
        a = glyph_like(10, 10)
        b = glyph_like(22, 12)
        regions, scores = merge_candidate_blocks([a, b], (40, 60), scores=[0.5, 0.7])
        assert len(regions) == 1
        r = regions[0]
        assert r.bbox == (10, 10, 20, 18)
        assert r.area == a.area + b.area
        assert r.edge_area == a.edge_area + b.edge_area
        assert r.ar == 20 / 18
        assert r.density == r.edge_area / (18 * 20)
        assert scores[0] == pytest.approx(0.6)
        assert int(r.crop.sum()) == r.area

    def test_groups_partition_indices(self):
        blocks = [glyph_like(10, 10), glyph_like(22, 10), glyph_like(150, 60)]
        groups = group_blocks(blocks, (100, 200))
        flat = sorted(i for g in groups for i in g)
        assert flat == [0, 1, 2]
        assert len(groups) == 2

    def test_boxes_from_blocks(self):
        blocks = [glyph_like(5, 6)]
        boxes = boxes_from_blocks(blocks, [0.9], granularity="line")
        assert boxes[0].x == 5 and boxes[0].granularity == "line"


class TestConfigValidation:
    def test_granularity(self):
        with pytest.raises(ValueError):
            LocalizerConfig(granularity="char")

    def test_factor_positive(self):
        with pytest.raises(ValueError):
            LocalizerConfig(dilation_width_factor=0)

    def test_width_factor_defaults(self):
        assert LocalizerConfig(granularity="word").width_factor == 0.5
        assert LocalizerConfig(granularity="line").width_factor == 1.5
        assert LocalizerConfig(dilation_width_factor=2.0).width_factor == 2.0
