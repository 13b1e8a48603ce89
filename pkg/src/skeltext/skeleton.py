"""Morphological thinning to 1-pixel skeletons and fixed-size template grids.

The thinning is the classic two-subcycle scheme (neighbor count, crossing
number, and directional products decide candidates), with one safeguard: a
candidate is only deleted while it stays a simple point, so a component can
never vanish or split mid-thinning. Candidates per subcycle are found
vectorized; deletions are applied sequentially in raster order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import ensure_binary

TEMPLATE_H = 42
TEMPLATE_W = 24

# ring neighbors clockwise from north: N, NE, E, SE, S, SW, W, NW
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def _build_simple_lut() -> np.ndarray:
    """simple[code] == 1 iff deleting the center keeps local topology.

    code encodes the 8 ring neighbors (bit k = ring position k foreground).
    Simple means exactly one 8-connected foreground group in the ring and at
    least one background 4-neighbor.
    """
    lut = np.zeros(256, dtype=np.uint8)
    for code in range(256):
        fg = [k for k in range(8) if code >> k & 1]
        if not fg:
            continue
        # count 8-connected groups among the ring cells
        seen: set[int] = set()
        groups = 0
        for start in fg:
            if start in seen:
                continue
            groups += 1
            stack = [start]
            seen.add(start)
            while stack:
                a = stack.pop()
                ya, xa = _RING[a]
                for b in fg:
                    if b in seen:
                        continue
                    yb, xb = _RING[b]
                    if max(abs(ya - yb), abs(xa - xb)) <= 1:
                        seen.add(b)
                        stack.append(b)
        has_bg_4_neighbor = any(not (code >> k & 1) for k in (0, 2, 4, 6))
        lut[code] = 1 if groups == 1 and has_bg_4_neighbor else 0
    return lut


_SIMPLE = _build_simple_lut()

# bit weights for the ring positions, aligned with _RING order
_BIT = tuple(1 << k for k in range(8))


def _neighbor_rings(padded: np.ndarray) -> list[np.ndarray]:
    """The 8 neighbor planes of the unpadded interior, in _RING order."""
    h, w = padded.shape[0] - 2, padded.shape[1] - 2
    return [padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w] for dy, dx in _RING]


def _thin_candidates(padded: np.ndarray, sub: int) -> np.ndarray:
    """Vectorized deletion candidates for one subcycle, as an (N, 2) index array."""
    rings = _neighbor_rings(padded)
    n, ne, e, se, s, sw, w, nw = rings
    img = padded[1:-1, 1:-1]

    b = sum(r.astype(np.uint8) for r in rings)
    seq = [n, ne, e, se, s, sw, w, nw, n]
    a = sum(((seq[k] == 0) & (seq[k + 1] == 1)).astype(np.uint8) for k in range(8))

    cond = (img == 1) & (b >= 2) & (b <= 6) & (a == 1)
    if sub == 0:
        cond &= (n * e * s == 0) & (e * s * w == 0)
    else:
        cond &= (n * e * w == 0) & (n * s * w == 0)
    return np.argwhere(cond)


def _code_at(padded: np.ndarray, i: int, j: int) -> int:
    """Ring configuration byte for the pixel at unpadded (i, j)."""
    r, c = i + 1, j + 1
    code = 0
    for k, (dy, dx) in enumerate(_RING):
        if padded[r + dy, c + dx]:
            code |= _BIT[k]
    return code


def skeletonize(crop: np.ndarray) -> np.ndarray:
    """Thin a binary shape to unit width; topology is preserved throughout."""
    crop = ensure_binary(crop)
    if not crop.any():
        raise ValueError("cannot skeletonize an empty image")

    padded = np.pad(crop, 1).astype(np.uint8)
    changed = True
    while changed:
        changed = False
        for sub in (0, 1):
            for i, j in _thin_candidates(padded, sub):
                if _SIMPLE[_code_at(padded, i, j)]:
                    padded[i + 1, j + 1] = 0
                    changed = True
    _dissolve_squares(padded)
    return padded[1:-1, 1:-1]


def _dissolve_squares(padded: np.ndarray) -> None:
    """Break residual 2x2 foreground blocks by deleting simple members."""
    while True:
        img = padded[1:-1, 1:-1]
        quads = (img[:-1, :-1] == 1) & (img[:-1, 1:] == 1) & (img[1:, :-1] == 1) & (img[1:, 1:] == 1)
        if not quads.any():
            return
        deleted = False
        for qi, qj in np.argwhere(quads):
            members = [(qi + di, qj + dj) for di, dj in ((0, 0), (0, 1), (1, 0), (1, 1))]
            if not all(padded[i + 1, j + 1] for i, j in members):
                continue  # broken by an earlier deletion this sweep
            for i, j in members:
                if _SIMPLE[_code_at(padded, i, j)]:
                    padded[i + 1, j + 1] = 0
                    deleted = True
                    break
        if not deleted:
            return  # every member pinned by topology; leave the block


def tight_crop(skel: np.ndarray) -> np.ndarray:
    """Minimal bounding-box crop containing all foreground."""
    skel = ensure_binary(skel)
    rows = np.flatnonzero(skel.any(axis=1))
    cols = np.flatnonzero(skel.any(axis=0))
    if rows.size == 0:
        raise ValueError("cannot crop an empty image")
    return skel[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]


@dataclass
class Template:
    """A 42x24 binary skeleton grid, labeled when it came from the database."""

    grid: np.ndarray
    label: str | None = None
    font_tag: str = ""

    def __post_init__(self) -> None:
        self.grid = ensure_binary(self.grid)
        if self.grid.shape != (TEMPLATE_H, TEMPLATE_W):
            raise ValueError(
                f"template grid must be {TEMPLATE_H}x{TEMPLATE_W}, got {self.grid.shape}"
            )


def _fractional_integral(grid: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Exact integral of the pixel-constant indicator at real corner coords.

    The 2-D antiderivative of a function constant on unit pixels is piecewise
    bilinear, so bilinear interpolation of the corner integral image is exact.
    """
    h, w = grid.shape
    s = np.zeros((h + 1, w + 1), dtype=np.float64)
    s[1:, 1:] = grid.cumsum(axis=0).cumsum(axis=1)

    iy = np.minimum(ys.astype(np.int64), h - 1)
    ix = np.minimum(xs.astype(np.int64), w - 1)
    fy = (ys - iy)[:, None]
    fx = (xs - ix)[None, :]
    iy = iy[:, None]
    ix = ix[None, :]
    return (
        (1 - fy) * (1 - fx) * s[iy, ix]
        + (1 - fy) * fx * s[iy, ix + 1]
        + fy * (1 - fx) * s[iy + 1, ix]
        + fy * fx * s[iy + 1, ix + 1]
    )


def _cell_integrals(crop: np.ndarray, out_h: int, out_w: int) -> tuple[np.ndarray, float]:
    """Foreground area inside each output cell's source footprint."""
    h, w = crop.shape
    ys = np.arange(out_h + 1) * (h / out_h)
    xs = np.arange(out_w + 1) * (w / out_w)
    corners = _fractional_integral(crop, ys, xs)
    cell = corners[1:, 1:] - corners[:-1, 1:] - corners[1:, :-1] + corners[:-1, :-1]
    return cell, (h / out_h) * (w / out_w)


def _coverage_resample(crop: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Output pixel is 1 iff >= 50% of its source footprint is foreground."""
    cell, footprint = _cell_integrals(crop, out_h, out_w)
    return (cell >= 0.5 * footprint - 1e-9).astype(np.uint8)


def _nearest_resample(crop: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w = crop.shape
    rows = np.minimum(((np.arange(out_h) + 0.5) * h / out_h).astype(np.int64), h - 1)
    cols = np.minimum(((np.arange(out_w) + 0.5) * w / out_w).astype(np.int64), w - 1)
    return crop[rows][:, cols]


def normalize_template(skel: np.ndarray) -> Template:
    """Tight-crop, rescale to 42x24 by area coverage, and re-thin.

    A coverage result that comes out empty falls back to nearest-neighbor
    sampling, and as a last resort to any-coverage, so a non-empty input
    never produces an empty template.
    """
    crop = tight_crop(skel)
    if crop.shape == (TEMPLATE_H, TEMPLATE_W):
        grid = crop
    else:
        grid = _coverage_resample(crop, TEMPLATE_H, TEMPLATE_W)
        if not grid.any():
            grid = _nearest_resample(crop, TEMPLATE_H, TEMPLATE_W)
        if not grid.any():
            h, w = crop.shape
            ys = np.arange(TEMPLATE_H + 1) * (h / TEMPLATE_H)
            xs = np.arange(TEMPLATE_W + 1) * (w / TEMPLATE_W)
            corners = _fractional_integral(crop, ys, xs)
            cell = corners[1:, 1:] - corners[:-1, 1:] - corners[1:, :-1] + corners[:-1, :-1]
            grid = (cell > 1e-9).astype(np.uint8)
    return Template(grid=skeletonize(grid))
