"""Synthetic scene generation with pixel-accurate word ground truth.

Scenes are words composited from glyph-sheet masks over flat, gradient, or
textured backgrounds, with optional additive noise. Everything is driven by
one seeded generator, so a seed fully determines the scene and its truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .evaluate import GroundTruth, write_truth_file
from .image import write_png
from .skeleton import _coverage_resample
from .templates import SheetLayout

BACKGROUNDS = ("flat", "gradient", "texture")


class SceneOverflowError(ValueError):
    """Raised when a scene's words cannot be placed without collisions."""


@dataclass
class Glyph:
    mask: np.ndarray  # tight binary mask
    dx: int  # bbox offset within its sheet cell
    dy: int


@dataclass
class GlyphSet:
    glyphs: dict[str, Glyph]
    ref_height: int  # tallest glyph, used as the scale reference

    @property
    def charset(self) -> str:
        return "".join(sorted(self.glyphs))


def load_glyph_set(sheet: np.ndarray, layout: SheetLayout, threshold: int = 128) -> GlyphSet:
    """Extract tight glyph masks and their in-cell offsets from a sheet."""
    if sheet.ndim == 3:
        from .image import to_grayscale

        sheet = to_grayscale(sheet)
    glyphs: dict[str, Glyph] = {}
    ref = 1
    for row, col, label in layout.cells:
        y0 = layout.origin_y + row * layout.cell_h
        x0 = layout.origin_x + col * layout.cell_w
        cell = sheet[y0 : y0 + layout.cell_h, x0 : x0 + layout.cell_w]
        fg = (cell < threshold).astype(np.uint8)
        ys, xs = np.nonzero(fg)
        if ys.size == 0:
            raise ValueError(f"glyph cell ({row}, {col}) for {label!r} is empty")
        mask = fg[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
        glyphs[label] = Glyph(mask=mask, dx=int(xs.min()), dy=int(ys.min()))
        ref = max(ref, mask.shape[0])
    return GlyphSet(glyphs=glyphs, ref_height=ref)


def _scale_mask(mask: np.ndarray, factor: float) -> np.ndarray:
    out_h = max(1, round(mask.shape[0] * factor))
    out_w = max(1, round(mask.shape[1] * factor))
    if (out_h, out_w) == mask.shape:
        return mask
    return _coverage_resample(mask, out_h, out_w)


def render_word(glyphs: GlyphSet, text: str, height: int) -> np.ndarray:
    """Binary mask of a word: baseline-aligned glyphs with small gaps."""
    factor = height / glyphs.ref_height
    gap = max(2, round(0.08 * height))
    placed: list[tuple[np.ndarray, int, int]] = []  # mask, x, y (baseline-relative)
    cursor = 0
    for ch in text:
        g = glyphs.glyphs[ch]
        mask = _scale_mask(g.mask, factor)
        placed.append((mask, cursor, round(g.dy * factor)))
        cursor += mask.shape[1] + gap
    top = min(y for _, _, y in placed)
    bottom = max(y + m.shape[0] for m, _, y in placed)
    width = max(x + m.shape[1] for m, x, _ in placed)
    canvas = np.zeros((bottom - top, width), dtype=np.uint8)
    for mask, x, y in placed:
        region = canvas[y - top : y - top + mask.shape[0], x : x + mask.shape[1]]
        np.maximum(region, mask, out=region)
    return canvas


def _background(rng: np.random.Generator, h: int, w: int, kind: str) -> tuple[np.ndarray, bool]:
    """Background intensity field; returns (field, dark_background)."""
    if kind == "flat":
        dark = rng.random() < 0.25
        level = int(rng.integers(20, 81)) if dark else int(rng.integers(160, 236))
        return np.full((h, w), level, dtype=np.float64), dark
    if kind == "gradient":
        low = float(rng.integers(65, 91))
        span = float(rng.integers(110, 161))
        angle = rng.uniform(0, 2 * np.pi)
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        t = (np.cos(angle) * xx / max(w - 1, 1)) + (np.sin(angle) * yy / max(h - 1, 1))
        t = (t - t.min()) / max(t.max() - t.min(), 1e-9)
        return low + span * t, False
    if kind == "texture":
        base = float(rng.integers(150, 221))
        field = rng.normal(0.0, 30.0, size=(h, w))
        field = ndimage.uniform_filter(field, size=9)
        return np.clip(base + field, 0, 255), False
    raise ValueError(f"unknown background kind {kind!r}")


def generate_scene(
    seed: int,
    glyphs: GlyphSet,
    width: int = 560,
    height: int = 400,
    backgrounds: tuple[str, ...] = ("flat", "gradient"),
    noise_sigma: tuple[float, float] = (1.0, 4.0),
    min_word_gap: int = 40,
    max_tries: int = 300,
) -> tuple[np.ndarray, GroundTruth]:
    """Render one scene and its word-level truth, deterministically per seed."""
    for kind in backgrounds:
        if kind not in BACKGROUNDS:
            raise ValueError(f"unknown background kind {kind!r}")
    rng = np.random.default_rng(seed)
    kind = backgrounds[int(rng.integers(len(backgrounds)))]
    bg, dark_bg = _background(rng, height, width, kind)

    n_words = int(rng.integers(1, 7))
    charset = glyphs.charset
    drawn: list[tuple[np.ndarray, str]] = []
    image_id = f"scene_{seed:05d}"
    for _ in range(n_words):
        length = int(rng.integers(3, 9))
        text = "".join(charset[int(rng.integers(len(charset)))] for _ in range(length))
        word_h = int(rng.integers(12, 49))
        mask = render_word(glyphs, text, word_h)
        if mask.shape[1] > width - 2 or mask.shape[0] > height - 2:
            raise SceneOverflowError(
                f"seed {seed}: word {text!r} at height {word_h} does not fit {width}x{height}"
            )
        drawn.append((mask, text))

    # big words first: packing stays feasible for crowded scenes
    drawn.sort(key=lambda wt: -(wt[0].shape[0] * wt[0].shape[1]))
    occupied: list[tuple[int, int, int, int]] = []  # inflated x, y, w, h
    words: list[tuple[np.ndarray, int, int, str]] = []
    for mask, text in drawn:
        mh, mw = mask.shape
        placed = False
        for _try in range(max_tries):
            x = int(rng.integers(1, width - mw))
            y = int(rng.integers(1, height - mh))
            rect = (x - min_word_gap, y - min_word_gap, mw + 2 * min_word_gap, mh + 2 * min_word_gap)
            if all(
                rect[0] + rect[2] <= ox
                or ox + ow <= rect[0]
                or rect[1] + rect[3] <= oy
                or oy + oh <= rect[1]
                for ox, oy, ow, oh in occupied
            ):
                occupied.append(rect)
                words.append((mask, x, y, text))
                placed = True
                break
        if not placed:
            raise SceneOverflowError(
                f"seed {seed}: no room for word {text!r} ({mw}x{mh}) after {max_tries} tries"
            )

    field = bg.copy()
    truth = GroundTruth(image_id=image_id)
    for mask, x, y, text in words:
        ink = float(rng.integers(200, 256)) if dark_bg else float(rng.integers(0, 61))
        mh, mw = mask.shape
        region = field[y : y + mh, x : x + mw]
        region[mask == 1] = ink
        ys, xs = np.nonzero(mask)
        truth.boxes.append(
            (x + int(xs.min()), y + int(ys.min()), int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1), text)
        )

    sigma = float(rng.uniform(*noise_sigma))
    if sigma > 0:
        field = field + rng.normal(0.0, sigma, size=field.shape)
    gray = np.clip(np.rint(field), 0, 255).astype(np.uint8)
    color = np.repeat(gray[:, :, None], 3, axis=2)
    return color, truth


def write_corpus(
    out_dir: str | Path,
    seeds: range,
    glyphs: GlyphSet,
    **scene_kwargs,
) -> tuple[Path, list[Path], list[tuple[int, str]]]:
    """Emit scene PNGs plus one truth file; overflow seeds are skipped and reported."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    truths: list[GroundTruth] = []
    image_paths: list[Path] = []
    failures: list[tuple[int, str]] = []
    for seed in seeds:
        try:
            img, truth = generate_scene(seed, glyphs, **scene_kwargs)
        except SceneOverflowError as exc:
            failures.append((seed, str(exc)))
            continue
        path = out_dir / f"{truth.image_id}.png"
        write_png(path, img)
        image_paths.append(path)
        truths.append(truth)
    truth_path = out_dir / "truth.txt"
    write_truth_file(truth_path, truths)
    return truth_path, image_paths, failures
