#!/usr/bin/env python3
"""Regenerate the checked-in glyph sheet assets under assets/fonts/.

Renders A-Z a-z 0-9 into a fixed grid from a TTF (DejaVu Sans by default,
located via matplotlib's bundled fonts) and writes one sheet PNG plus layout
descriptor per requested pixel size. The detector's stock database is built
from several sizes of the same face so that queries at any scale find a
template rendered near their own resolution.
"""

import argparse
import string
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

CHARSET = string.ascii_uppercase + string.ascii_lowercase + string.digits
COLS = 8
DEFAULT_SIZES = (64, 44, 30, 21, 15)


def find_default_ttf() -> str:
    import matplotlib

    path = Path(matplotlib.get_data_path()) / "fonts" / "ttf" / "DejaVuSans.ttf"
    if not path.exists():
        raise FileNotFoundError(f"DejaVuSans.ttf not found at {path}")
    return str(path)


def render_sheet(ttf: str, size: int) -> tuple[Image.Image, str]:
    cell_w = size + 16
    cell_h = round(size * 1.5)
    pen_x, pen_y = 8, round(size * 1.15)  # anchor "ls": left edge, baseline
    font = ImageFont.truetype(ttf, size)
    rows = (len(CHARSET) + COLS - 1) // COLS
    sheet = Image.new("L", (COLS * cell_w, rows * cell_h), color=255)
    draw = ImageDraw.Draw(sheet)

    layout_lines = [f"cell {cell_w} {cell_h} origin 0 0"]
    for idx, ch in enumerate(CHARSET):
        row, col = divmod(idx, COLS)
        cx, cy = col * cell_w, row * cell_h
        draw.text((cx + pen_x, cy + pen_y), ch, fill=0, font=font, anchor="ls")
        layout_lines.append(f"{row} {col} {ch}")

    arr = np.asarray(sheet)
    for idx, ch in enumerate(CHARSET):
        row, col = divmod(idx, COLS)
        cell = arr[row * cell_h : (row + 1) * cell_h, col * cell_w : (col + 1) * cell_w]
        ys, xs = np.nonzero(cell < 128)
        assert ys.size > 0, f"glyph {ch!r} rendered empty at size {size}"
        assert 0 < ys.min() and ys.max() < cell_h - 1, f"glyph {ch!r} touches cell edge"
        assert 0 < xs.min() and xs.max() < cell_w - 1, f"glyph {ch!r} touches cell edge"
    return sheet, "\n".join(layout_lines) + "\n"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ttf", default=None, help="font file (default: bundled DejaVu Sans)")
    ap.add_argument("--name", default="dejavu_sans", help="asset base name")
    ap.add_argument("--sizes", default=",".join(str(s) for s in DEFAULT_SIZES))
    ap.add_argument(
        "--out-dir", default=str(Path(__file__).resolve().parent.parent / "assets" / "fonts")
    )
    args = ap.parse_args()

    ttf = args.ttf or find_default_ttf()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for size in (int(s) for s in args.sizes.split(",")):
        sheet, layout_text = render_sheet(ttf, size)
        sheet_path = out_dir / f"{args.name}_{size}.png"
        layout_path = out_dir / f"{args.name}_{size}.layout"
        sheet.save(sheet_path, format="PNG")
        layout_path.write_text(layout_text)
        print(f"wrote {sheet_path} ({sheet.size[0]}x{sheet.size[1]}) and {layout_path}")


if __name__ == "__main__":
    main()
