from pathlib import Path

import numpy as np
import pytest
from scipy import ndimage

from skeltext.image import read_image
from skeltext.synth import load_glyph_set
from skeltext.templates import build_database, load_layout

ASSET_DIR = Path(__file__).resolve().parent.parent / "assets" / "fonts"
SHEET_SIZES = (64, 44, 30, 21, 15)


def sheet_pair(size):
    return (
        read_image(ASSET_DIR / f"dejavu_sans_{size}.png"),
        load_layout(ASSET_DIR / f"dejavu_sans_{size}.layout"),
    )


@pytest.fixture(scope="session")
def sheets():
    return [sheet_pair(s) for s in SHEET_SIZES]


@pytest.fixture(scope="session")
def db(sheets):
    """The stock multi-scale database (one face, five rendering sizes)."""
    return build_database(sheets)


@pytest.fixture(scope="session")
def db_single(sheets):
    """A 62-entry database from the largest sheet only."""
    return build_database(sheets[:1])


@pytest.fixture(scope="session")
def glyphs(sheets):
    return load_glyph_set(*sheets[0])


def random_blob(rng, size=48):
    """A smooth random blob: thresholded blurred noise, largest component."""
    field = ndimage.gaussian_filter(rng.standard_normal((size, size)), sigma=3.0)
    mask = (field > np.quantile(field, 0.72)).astype(np.uint8)
    labels, count = ndimage.label(mask, structure=np.ones((3, 3)))
    if count == 0:
        mask = np.zeros((size, size), np.uint8)
        mask[size // 2, size // 2] = 1
        return mask
    areas = np.bincount(labels.ravel())
    areas[0] = 0
    return (labels == int(areas.argmax())).astype(np.uint8)


def flood_fill_partition(bin_img, connectivity):
    """Reference partition of foreground pixels via explicit flood fill."""
    h, w = bin_img.shape
    if connectivity == 4:
        steps = ((1, 0), (-1, 0), (0, 1), (0, -1))
    else:
        steps = tuple((dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0))
    seen = np.zeros_like(bin_img, dtype=bool)
    parts = set()
    for sy in range(h):
        for sx in range(w):
            if bin_img[sy, sx] == 0 or seen[sy, sx]:
                continue
            stack = [(sy, sx)]
            seen[sy, sx] = True
            pixels = []
            while stack:
                y, x = stack.pop()
                pixels.append((y, x))
                for dy, dx in steps:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and bin_img[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
            parts.add(frozenset(pixels))
    return parts


def partition_of_labels(labels):
    parts = {}
    for (y, x), lab in np.ndenumerate(labels):
        if lab:
            parts.setdefault(int(lab), []).append((y, x))
    return {frozenset(v) for v in parts.values()}
