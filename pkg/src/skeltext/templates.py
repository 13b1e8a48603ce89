"""Character template database: build from glyph sheets, persist, load.

File format (little-endian): magic ``SKTDB1``, version u16, entry count u32;
per entry: label byte, font-tag length u8 + bytes, then 126 bytes of
bit-packed 42x24 grid (row-major, MSB-first, 3 bytes per row).
"""

from __future__ import annotations

import string
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .binarize import BinarizationConfig, adaptive_binarize
from .components import label_components
from .image import to_grayscale
from .skeleton import TEMPLATE_H, TEMPLATE_W, Template, normalize_template, skeletonize

MAGIC = b"SKTDB1"
VERSION = 1
VALID_LABELS = frozenset(string.ascii_uppercase + string.ascii_lowercase + string.digits)

_ROW_BYTES = 3
_GRID_BYTES = _ROW_BYTES * TEMPLATE_H


class DatabaseFormatError(ValueError):
    """Raised when a template database file fails validation."""


class SheetLayoutError(ValueError):
    """Raised when a glyph sheet layout descriptor is malformed."""


class GlyphBuildError(ValueError):
    """Raised when one or more sheet cells cannot produce a template."""


@dataclass
class SheetLayout:
    """Grid geometry of a glyph sheet plus which cell holds which character."""

    cell_w: int
    cell_h: int
    origin_x: int
    origin_y: int
    cells: list[tuple[int, int, str]]  # row, col, label
    font_tag: str = "default"


def parse_layout(text: str, font_tag: str = "default") -> SheetLayout:
    """Parse a layout descriptor: `cell <w> <h> origin <x> <y>` then `row col label`."""
    header = None
    cells: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "cell":
            if len(parts) != 6 or parts[3] != "origin":
                raise SheetLayoutError(f"line {lineno}: bad header {line!r}")
            header = tuple(int(p) for p in (parts[1], parts[2], parts[4], parts[5]))
        else:
            if len(parts) != 3:
                raise SheetLayoutError(f"line {lineno}: expected 'row col label', got {line!r}")
            row, col = int(parts[0]), int(parts[1])
            label = parts[2]
            if len(label) != 1 or label not in VALID_LABELS:
                raise SheetLayoutError(f"line {lineno}: invalid label {label!r}")
            cells.append((row, col, label))
    if header is None:
        raise SheetLayoutError("missing 'cell <w> <h> origin <x> <y>' header line")
    if not cells:
        raise SheetLayoutError("layout defines no glyph cells")
    return SheetLayout(*header, cells=cells, font_tag=font_tag)


def load_layout(path: str | Path, font_tag: str | None = None) -> SheetLayout:
    path = Path(path)
    tag = font_tag if font_tag is not None else path.stem
    return parse_layout(path.read_text(), font_tag=tag)


@dataclass
class TemplateDatabase:
    entries: list[Template] = field(default_factory=list)
    version: int = VERSION

    def __post_init__(self) -> None:
        if not self.entries:
            raise DatabaseFormatError("database must hold at least one entry")
        seen: set[tuple[str, str]] = set()
        for e in self.entries:
            if e.label is None or e.label not in VALID_LABELS:
                raise DatabaseFormatError(f"unknown template label {e.label!r}")
            key = (e.label, e.font_tag)
            if key in seen:
                raise DatabaseFormatError(f"duplicate (label, font_tag) pair {key}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def font_tags(self) -> list[str]:
        return [e.font_tag for e in self.entries]


def _cell_region(gray: np.ndarray, layout: SheetLayout, row: int, col: int) -> np.ndarray:
    y0 = layout.origin_y + row * layout.cell_h
    x0 = layout.origin_x + col * layout.cell_w
    if y0 + layout.cell_h > gray.shape[0] or x0 + layout.cell_w > gray.shape[1]:
        raise SheetLayoutError(f"cell ({row}, {col}) falls outside the sheet image")
    return gray[y0 : y0 + layout.cell_h, x0 : x0 + layout.cell_w]


def glyph_template(cell_gray: np.ndarray, bin_cfg: BinarizationConfig | None = None) -> Template:
    """Binarize one glyph cell, keep its largest component, thin, normalize."""
    cfg = bin_cfg or BinarizationConfig(mode="adaptive")
    fg = adaptive_binarize(cell_gray, cfg)
    if not fg.any():
        raise GlyphBuildError("cell has no foreground after binarization")
    _, blocks = label_components(fg, connectivity=8)
    biggest = max(blocks, key=lambda b: b.area)
    return normalize_template(skeletonize(biggest.crop))


def build_database(
    sheets: list[tuple[np.ndarray, SheetLayout]],
    bin_cfg: BinarizationConfig | None = None,
) -> TemplateDatabase:
    """Ingest glyph sheets into a database ordered by (font_tag, label)."""
    entries: list[Template] = []
    failures: list[str] = []
    seen: set[tuple[str, str]] = set()
    for sheet_idx, (img, layout) in enumerate(sheets):
        gray = to_grayscale(img) if img.ndim == 3 else img
        for row, col, label in layout.cells:
            key = (label, layout.font_tag)
            if key in seen:
                raise GlyphBuildError(
                    f"duplicate glyph (label={label!r}, font_tag={layout.font_tag!r})"
                )
            seen.add(key)
            cell = _cell_region(gray, layout, row, col)
            try:
                tmpl = glyph_template(cell, bin_cfg)
            except GlyphBuildError as exc:
                failures.append(f"sheet {sheet_idx} cell ({row}, {col}) label {label!r}: {exc}")
                continue
            entries.append(Template(grid=tmpl.grid, label=label, font_tag=layout.font_tag))
    if failures:
        raise GlyphBuildError("; ".join(failures))
    entries.sort(key=lambda e: (e.font_tag, e.label))
    return TemplateDatabase(entries=entries)


def _pack_grid(grid: np.ndarray) -> bytes:
    return np.packbits(grid.astype(np.uint8), axis=1, bitorder="big").tobytes()


def _unpack_grid(blob: bytes) -> np.ndarray:
    rows = np.frombuffer(blob, dtype=np.uint8).reshape(TEMPLATE_H, _ROW_BYTES)
    bits = np.unpackbits(rows, axis=1, bitorder="big")
    return bits[:, :TEMPLATE_W].copy()


def save_database(db: TemplateDatabase, path: str | Path) -> None:
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HI", db.version, len(db.entries))
    for e in db.entries:
        tag = e.font_tag.encode("utf-8")
        if len(tag) > 255:
            raise DatabaseFormatError(f"font tag too long: {e.font_tag!r}")
        out += e.label.encode("ascii")
        out += struct.pack("<B", len(tag))
        out += tag
        out += _pack_grid(e.grid)
    try:
        Path(path).write_bytes(bytes(out))
    except OSError as exc:
        raise OSError(f"cannot write template database {path}: {exc}") from exc


def load_database(path: str | Path) -> TemplateDatabase:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read template database {path}: {exc}") from exc

    header_len = len(MAGIC) + 6
    if len(blob) < header_len:
        raise DatabaseFormatError(
            f"truncated header: expected at least {header_len} bytes, got {len(blob)}"
        )
    if blob[: len(MAGIC)] != MAGIC:
        raise DatabaseFormatError(f"bad magic {blob[:len(MAGIC)]!r}, expected {MAGIC!r}")
    version, count = struct.unpack_from("<HI", blob, len(MAGIC))
    if version != VERSION:
        raise DatabaseFormatError(f"unsupported version {version}, expected {VERSION}")

    entries: list[Template] = []
    off = header_len
    for idx in range(count):
        if off + 2 > len(blob):
            raise DatabaseFormatError(
                f"entry {idx}: truncated at byte {len(blob)}, expected {off + 2} or more"
            )
        label = chr(blob[off])
        taglen = blob[off + 1]
        off += 2
        need = off + taglen + _GRID_BYTES
        if need > len(blob):
            raise DatabaseFormatError(
                f"entry {idx}: truncated file, expected {need} bytes, got {len(blob)}"
            )
        tag = blob[off : off + taglen].decode("utf-8")
        off += taglen
        if label not in VALID_LABELS:
            raise DatabaseFormatError(f"entry {idx}: unknown label {label!r}")
        grid = _unpack_grid(blob[off : off + _GRID_BYTES])
        off += _GRID_BYTES
        entries.append(Template(grid=grid, label=label, font_tag=tag))
    if off != len(blob):
        raise DatabaseFormatError(
            f"trailing data: expected file length {off}, got {len(blob)}"
        )
    return TemplateDatabase(entries=entries, version=version)
