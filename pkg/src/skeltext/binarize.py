"""Global and locally-adaptive binarization with automatic mode selection.

Foreground convention is text-as-1. Both binarizers assume dark text and
auto-flip polarity when the dark side would be the strict majority, so
light-on-dark sources come out with text as foreground too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import ensure_gray

Mode = str  # "auto" | "global" | "adaptive"


@dataclass
class BinarizationConfig:
    mode: Mode = "auto"
    global_threshold: int | None = None
    window: int = 15
    offset_c: float = 7.0
    uniformity_cutoff: float = 18.0

    def __post_init__(self) -> None:
        if self.mode not in ("auto", "global", "adaptive"):
            raise ValueError(f"unknown binarization mode {self.mode!r}")
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.global_threshold is not None and not 0 <= self.global_threshold <= 255:
            raise ValueError(f"global_threshold out of [0, 255]: {self.global_threshold}")


def otsu_threshold(img: np.ndarray) -> int:
    """Threshold maximizing between-class variance of the {<=t, >t} split.

    Ties break toward the smaller t. A constant image returns that constant.
    All scoring is done in exact integer arithmetic, so the winner matches an
    exhaustive scan bit-for-bit.
    """
    img = ensure_gray(img)
    hist = np.bincount(img.ravel(), minlength=256)
    nonzero = np.flatnonzero(hist)
    if len(nonzero) == 1:
        return int(nonzero[0])

    n = int(hist.sum())
    total = int((hist * np.arange(256, dtype=np.int64)).sum())
    # sigma_b^2(t) = n0*n1*(mu0-mu1)^2 / n^2, compared as the exact fraction
    # (n1*S0 - n0*S1)^2 / (n0*n1); n^2 is constant and drops out.
    best_t = 0
    best_num = -1  # numerator of best score
    best_den = 1
    n0 = 0
    s0 = 0
    for t in range(256):
        n0 += int(hist[t])
        s0 += t * int(hist[t])
        n1 = n - n0
        if n0 == 0 or n1 == 0:
            continue
        s1 = total - s0
        num = (n1 * s0 - n0 * s1) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def _apply_polarity(fg: np.ndarray) -> np.ndarray:
    """Flip the mask when foreground would be the strict majority."""
    count = int(fg.sum())
    if 2 * count > fg.size:
        fg = ~fg
    return fg.astype(np.uint8)


def global_binarize(img: np.ndarray, t: int) -> np.ndarray:
    """Binarize with one threshold: dark side foreground, minority polarity."""
    img = ensure_gray(img)
    if not 0 <= t <= 255:
        raise ValueError(f"threshold out of [0, 255]: {t}")
    return _apply_polarity(img < t)


def _window_sums(img: np.ndarray, window: int) -> np.ndarray:
    """Exact sum over the window centered at each pixel, edges replicated."""
    half = window // 2
    padded = np.pad(img.astype(np.int64), half, mode="edge")
    c = padded.cumsum(axis=0).cumsum(axis=1)
    c = np.pad(c, ((1, 0), (1, 0)))
    h, w = img.shape
    return (
        c[window : window + h, window : window + w]
        - c[window : window + h, 0:w]
        - c[0:h, window : window + w]
        + c[0:h, 0:w]
    )


def adaptive_binarize(img: np.ndarray, cfg: BinarizationConfig) -> np.ndarray:
    """Per-pixel threshold: foreground iff intensity < window mean - offset_c."""
    img = ensure_gray(img)
    h, w = img.shape
    if cfg.window > h and cfg.window > w:
        raise ValueError(f"window {cfg.window} larger than both image dimensions {w}x{h}")
    area = cfg.window * cfg.window
    sums = _window_sums(img, cfg.window)
    # img < sums/area - c, kept exact by scaling through the window area
    fg = img.astype(np.int64) * area < sums - cfg.offset_c * area
    return _apply_polarity(fg)


def select_mode(img: np.ndarray, cfg: BinarizationConfig) -> Mode:
    """Pick global vs adaptive from the spread of coarse-cell mean intensities."""
    img = ensure_gray(img)
    h, w = img.shape
    rows = min(4, h)
    cols = min(4, w)
    means = [
        float(cell.mean())
        for band in np.array_split(img, rows, axis=0)
        for cell in np.array_split(band, cols, axis=1)
    ]
    spread = float(np.std(means))
    return "adaptive" if spread > cfg.uniformity_cutoff else "global"


def binarize(img: np.ndarray, cfg: BinarizationConfig | None = None) -> np.ndarray:
    """Front door: resolve the mode, then run the matching binarizer."""
    cfg = cfg or BinarizationConfig()
    mode = cfg.mode
    if mode == "auto":
        mode = select_mode(img, cfg)
    if mode == "global":
        t = cfg.global_threshold
        if t is None:
            t = otsu_threshold(img)
        return global_binarize(img, t)
    return adaptive_binarize(img, cfg)
