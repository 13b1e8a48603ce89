"""Pixel buffers, grayscale conversion, median filtering, and PNG I/O.

Images are plain numpy arrays:

* color image: ``(H, W, 3)`` uint8, RGB
* gray image:  ``(H, W)`` uint8
* binary image: ``(H, W)`` uint8 with values in {0, 1}, 1 = foreground
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

# BT.601 luminance weights
_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114


def ensure_color(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) color image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got shape {img.shape}")
    if img.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {img.dtype}")
    return img


def ensure_gray(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"expected (H, W) gray image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got shape {img.shape}")
    if img.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {img.dtype}")
    return img


def ensure_binary(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"expected (H, W) binary image, got shape {img.shape}")
    if img.dtype not in (np.uint8, np.bool_):
        raise ValueError(f"expected uint8/bool pixels, got {img.dtype}")
    if img.dtype == np.bool_:
        img = img.astype(np.uint8)
    elif img.size and img.max() > 1:
        raise ValueError("binary image must contain only {0, 1}")
    return img


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert an RGB image to gray with BT.601 weights, rounded per pixel."""
    img = ensure_color(img)
    luma = _LUMA_R * img[:, :, 0] + _LUMA_G * img[:, :, 1] + _LUMA_B * img[:, :, 2]
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def median_filter(img: np.ndarray, radius: int = 1) -> np.ndarray:
    """Median-filter with a (2*radius+1)^2 window; borders replicate edges."""
    img = ensure_gray(img)
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    if radius >= min(img.shape):
        raise ValueError(
            f"radius {radius} too large for {img.shape[1]}x{img.shape[0]} image"
        )
    return ndimage.median_filter(img, size=2 * radius + 1, mode="nearest")


def read_image(path: str | Path) -> np.ndarray:
    """Decode a raster file into a color or gray array.

    Grayscale sources come back as (H, W); everything else as (H, W, 3) RGB.
    """
    with Image.open(path) as im:
        if im.mode == "L":
            return np.asarray(im, dtype=np.uint8)
        if im.mode != "RGB":
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8)


def write_png(path: str | Path, img: np.ndarray) -> None:
    """Write a color, gray, or binary array as PNG (binary scaled to 0/255)."""
    img = np.asarray(img)
    if img.ndim == 2:
        if img.dtype == np.bool_ or (img.size and img.max() <= 1):
            img = (img.astype(np.uint8)) * 255
        Image.fromarray(img.astype(np.uint8), mode="L").save(path, format="PNG")
    elif img.ndim == 3 and img.shape[2] == 3:
        Image.fromarray(img.astype(np.uint8), mode="RGB").save(path, format="PNG")
    else:
        raise ValueError(f"cannot encode array of shape {img.shape} as PNG")
