"""Connected-component labeling and per-component geometry.

Labels are assigned 1..K in first-touch raster order, so identical inputs
always produce identical label maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .image import ensure_binary

_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)
_STRUCTURE_8 = np.ones((3, 3), dtype=np.uint8)


@dataclass
class ComponentBlock:
    """One labeled component plus the geometry the localization rules use."""

    label: int
    bbox: tuple[int, int, int, int]  # x, y, width, height
    area: int
    crop: np.ndarray  # binary, other components masked out
    edge_area: int
    ar: float
    density: float

    @property
    def x(self) -> int:
        return self.bbox[0]

    @property
    def y(self) -> int:
        return self.bbox[1]

    @property
    def width(self) -> int:
        return self.bbox[2]

    @property
    def height(self) -> int:
        return self.bbox[3]


def compute_edge_area(crop: np.ndarray) -> int:
    """Count foreground pixels with a background (or out-of-crop) 4-neighbor."""
    crop = ensure_binary(crop)
    padded = np.pad(crop, 1)
    fg = crop == 1
    boundary = fg & (
        (padded[:-2, 1:-1] == 0)
        | (padded[2:, 1:-1] == 0)
        | (padded[1:-1, :-2] == 0)
        | (padded[1:-1, 2:] == 0)
    )
    return int(boundary.sum())


def label_components(
    bin_img: np.ndarray, connectivity: int = 8
) -> tuple[np.ndarray, list[ComponentBlock]]:
    """Label foreground and return (label map, blocks sorted by label)."""
    bin_img = ensure_binary(bin_img)
    if connectivity == 4:
        structure = _STRUCTURE_4
    elif connectivity == 8:
        structure = _STRUCTURE_8
    else:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")

    raw, count = ndimage.label(bin_img, structure=structure)
    if count == 0:
        return raw.astype(np.int32), []

    # renumber into first-touch raster order
    flat = raw.ravel()
    values, first = np.unique(flat, return_index=True)
    nz = values > 0
    order = values[nz][np.argsort(first[nz])]
    remap = np.zeros(count + 1, dtype=np.int32)
    remap[order] = np.arange(1, count + 1, dtype=np.int32)
    labels = remap[raw]

    blocks: list[ComponentBlock] = []
    slices = ndimage.find_objects(labels)
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    for label in range(1, count + 1):
        sy, sx = slices[label - 1]
        crop = (labels[sy, sx] == label).astype(np.uint8)
        w = sx.stop - sx.start
        h = sy.stop - sy.start
        ea = compute_edge_area(crop)
        blocks.append(
            ComponentBlock(
                label=label,
                bbox=(sx.start, sy.start, w, h),
                area=int(areas[label]),
                crop=crop,
                edge_area=ea,
                ar=w / h,
                density=ea / (h * w),
            )
        )
    return labels, blocks
