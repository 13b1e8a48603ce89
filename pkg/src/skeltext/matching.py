"""Normalized correlation over template grids and text/non-text classification.

For integer grids the correlation is evaluated in exact integer arithmetic
(deviations scaled by the grid size), so self-correlation is exactly 1.0 and
correlation with the binary complement exactly -1.0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .components import ComponentBlock
from .skeleton import TEMPLATE_H, TEMPLATE_W, Template, normalize_template, skeletonize

Variant = str  # "pearson" | "printed"


@dataclass
class MatchResult:
    label: str
    font_tag: str
    score: float


@dataclass
class ClassifierConfig:
    # 0.20 calibrated on the synthetic benchmark corpus (see README);
    # scores for same-font glyphs run 0.3-0.9, junk shapes mostly below 0.3
    accept_threshold: float = 0.20
    min_foreground: int = 8

    def __post_init__(self) -> None:
        if not -1.0 < self.accept_threshold < 1.0:
            raise ValueError(f"accept_threshold must lie in (-1, 1): {self.accept_threshold}")


def _grid_of(t: Template | np.ndarray) -> np.ndarray:
    grid = t.grid if isinstance(t, Template) else np.asarray(t)
    if grid.shape != (TEMPLATE_H, TEMPLATE_W):
        raise ValueError(f"expected a {TEMPLATE_H}x{TEMPLATE_W} grid, got {grid.shape}")
    return grid


def _scaled_deviation(grid: np.ndarray) -> np.ndarray:
    """n*x - sum(x): deviations from the mean scaled by n (exact for ints)."""
    flat = grid.ravel().astype(np.int64)
    return flat.size * flat - flat.sum()


def ncc_flagged(
    a: Template | np.ndarray, b: Template | np.ndarray, variant: Variant = "pearson"
) -> tuple[float, bool]:
    """Correlation plus a degeneracy flag (True when a grid has no variance)."""
    ga, gb = _grid_of(a), _grid_of(b)
    if np.issubdtype(ga.dtype, np.integer) and np.issubdtype(gb.dtype, np.integer):
        da, db = _scaled_deviation(ga), _scaled_deviation(gb)
        s11 = int(np.dot(da, db))
        if variant == "printed":
            den2 = int(np.dot(da * da, db * db))
            if den2 == 0:
                return 0.0, True
            return s11 / math.sqrt(den2), False
        s20 = int(np.dot(da, da))
        s02 = int(np.dot(db, db))
        if s20 == 0 or s02 == 0:
            return 0.0, True
        if s11 * s11 == s20 * s02:
            return (1.0 if s11 > 0 else -1.0), False
        return max(-1.0, min(1.0, s11 / math.sqrt(s20 * s02))), False

    fa = ga.ravel().astype(np.float64)
    fb = gb.ravel().astype(np.float64)
    da = fa - fa.mean()
    db = fb - fb.mean()
    s11 = float(np.dot(da, db))
    if variant == "printed":
        den2 = float(np.dot(da * da, db * db))
        if den2 == 0.0:
            return 0.0, True
        return s11 / math.sqrt(den2), False
    s20 = float(np.dot(da, da))
    s02 = float(np.dot(db, db))
    if s20 == 0.0 or s02 == 0.0:
        return 0.0, True
    return max(-1.0, min(1.0, s11 / math.sqrt(s20 * s02))), False


def ncc(a: Template | np.ndarray, b: Template | np.ndarray, variant: Variant = "pearson") -> float:
    return ncc_flagged(a, b, variant)[0]


def _db_arrays(db):
    """Centered integer grids for a database, cached on the database object."""
    cache = getattr(db, "_ncc_cache", None)
    if cache is None or cache[0] != len(db.entries):
        flat = np.stack([e.grid.ravel() for e in db.entries]).astype(np.int64)
        n = flat.shape[1]
        dev = n * flat - flat.sum(axis=1, keepdims=True)
        s20 = np.einsum("ij,ij->i", dev, dev)
        cache = (len(db.entries), dev, dev * dev, s20)
        db._ncc_cache = cache
    return cache[1], cache[2], cache[3]


def score_all(query: Template | np.ndarray, db, variant: Variant = "pearson") -> np.ndarray:
    """ncc(query, entry) for every database entry, in database order.

    Integer queries take a vectorized exact path that reproduces ``ncc``
    bit-for-bit; other dtypes fall back to per-entry scoring.
    """
    grid = _grid_of(query)
    if not np.issubdtype(grid.dtype, np.integer):
        return np.array([ncc(grid, e, variant) for e in db.entries], dtype=np.float64)
    dev, dev2, s20 = _db_arrays(db)
    dq = _scaled_deviation(grid)
    s11 = dev @ dq
    if variant == "printed":
        den2 = dev2 @ (dq * dq)
        out = np.zeros(len(s11), dtype=np.float64)
        ok = den2 > 0
        out[ok] = s11[ok] / np.sqrt(den2[ok])
        return out
    s02 = int(np.dot(dq, dq))
    prod = s20 * s02
    out = np.zeros(len(s11), dtype=np.float64)
    ok = prod > 0
    out[ok] = np.clip(s11[ok] / np.sqrt(prod[ok]), -1.0, 1.0)
    exact = ok & (s11 * s11 == prod)
    out[exact] = np.sign(s11[exact])
    return out


def best_match(query: Template | np.ndarray, db, variant: Variant = "pearson") -> MatchResult:
    """Exhaustive search; ties resolve to the earliest database entry."""
    if len(db.entries) == 0:
        raise ValueError("cannot match against an empty database")
    scores = score_all(query, db, variant)
    idx = int(np.argmax(scores))
    e = db.entries[idx]
    return MatchResult(label=e.label, font_tag=e.font_tag, score=float(scores[idx]))


def classify_block(
    block: ComponentBlock,
    db,
    cfg: ClassifierConfig | None = None,
    variant: Variant = "pearson",
) -> tuple[str, MatchResult | None]:
    """Classify a segmented block as "text" or "non-text".

    Blocks below the foreground floor are non-text without matching; so are
    blocks whose skeleton cannot be normalized.
    """
    cfg = cfg or ClassifierConfig()
    if block.area < cfg.min_foreground:
        return "non-text", None
    try:
        query = normalize_template(skeletonize(block.crop))
    except ValueError:
        return "non-text", None
    result = best_match(query, db, variant)
    kind = "text" if result.score >= cfg.accept_threshold else "non-text"
    return kind, result
