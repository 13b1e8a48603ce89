#!/usr/bin/env python3
"""Build the stock template database from the checked-in glyph sheets.

One face (DejaVu Sans) rendered at five sizes; each size gets its own font
tag so queries at any scale can find a template rendered near their own
resolution. Writes assets/stock.sktdb by default.
"""

import argparse
from pathlib import Path

from skeltext.image import read_image
from skeltext.templates import build_database, load_layout, save_database

ROOT = Path(__file__).resolve().parent.parent
SIZES = (64, 44, 30, 21, 15)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fonts-dir", default=str(ROOT / "assets" / "fonts"))
    ap.add_argument("--name", default="dejavu_sans")
    ap.add_argument("--out", default=str(ROOT / "assets" / "stock.sktdb"))
    args = ap.parse_args()

    fonts = Path(args.fonts_dir)
    sheets = []
    for size in SIZES:
        sheet = read_image(fonts / f"{args.name}_{size}.png")
        layout = load_layout(fonts / f"{args.name}_{size}.layout")
        sheets.append((sheet, layout))
    db = build_database(sheets)
    save_database(db, args.out)
    print(f"{len(db)} templates ({len(SIZES)} sizes x 62 glyphs) -> {args.out}")


if __name__ == "__main__":
    main()
