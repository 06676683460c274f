"""Image file I/O: ASCII PGM (P2) for integer images, CSV for continuous ones.

Both formats are plain text so test fixtures diff cleanly and no third-party
decoders are needed.  Writers go through a temp-file-plus-rename so no
partial file is ever left behind.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .phasemap import Image

__all__ = [
    "read_image",
    "read_pgm",
    "read_csv_image",
    "pgm_text",
    "csv_text",
    "write_image",
    "write_text_atomic",
]


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write to a temp file in the target directory, then rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_pgm(path: str | Path) -> Image:
    """Parse an ASCII (P2) PGM; maxval sets the bit-depth hint."""
    tokens: list[str] = []
    with open(path) as handle:
        for line in handle:
            body = line.split("#", 1)[0]
            tokens.extend(body.split())
    if not tokens or tokens[0] != "P2":
        raise ValueError(f"{path}: not an ASCII PGM (expected magic 'P2')")
    if len(tokens) < 4:
        raise ValueError(f"{path}: truncated PGM header")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        values = [int(t) for t in tokens[4:]]
    except ValueError:
        raise ValueError(f"{path}: non-integer token in PGM body") from None
    if width < 1 or height < 1 or maxval < 1:
        raise ValueError(f"{path}: bad PGM dimensions {width}x{height} maxval {maxval}")
    if len(values) != width * height:
        raise ValueError(
            f"{path}: expected {width * height} samples, found {len(values)}"
        )
    pixels = np.array(values, dtype=np.float64)
    if (pixels > maxval).any():
        raise ValueError(f"{path}: sample exceeds declared maxval {maxval}")
    hint = max(1, int(maxval).bit_length())
    return Image(width=width, height=height, pixels=pixels, bit_depth_hint=hint)


def read_csv_image(path: str | Path) -> Image:
    """Parse comma-separated decimal rows, one line per image row."""
    rows: list[list[float]] = []
    with open(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(cell) for cell in line.split(",")])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric cell") from None
    if not rows:
        raise ValueError(f"{path}: empty image")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows (expected {width} columns everywhere)")
    return Image.from_grid(np.array(rows, dtype=np.float64))


def read_image(path: str | Path) -> Image:
    """Dispatch on extension: .pgm is ASCII PGM, anything else is CSV."""
    if str(path).lower().endswith(".pgm"):
        return read_pgm(path)
    return read_csv_image(path)


def pgm_text(image: Image, maxval: int | None = None) -> str:
    """Render as ASCII PGM; intensities must already be integral."""
    pixels = image.pixels
    rounded = np.rint(pixels)
    if not np.allclose(pixels, rounded, atol=1e-9):
        raise ValueError("PGM output needs integer intensities; write CSV instead")
    ints = rounded.astype(np.int64)
    if maxval is None:
        maxval = max(1, int(ints.max()))
    if (ints > maxval).any():
        raise ValueError(f"intensity {ints.max()} exceeds maxval {maxval}")
    lines = [f"P2", f"{image.width} {image.height}", str(maxval)]
    grid = ints.reshape(image.height, image.width)
    lines.extend(" ".join(str(v) for v in row) for row in grid)
    return "\n".join(lines) + "\n"


def csv_text(image: Image) -> str:
    grid = image.pixel_grid()
    lines = [",".join(f"{v:.17g}" for v in row) for row in grid]
    return "\n".join(lines) + "\n"


def write_image(path: str | Path, image: Image, fmt: str | None = None) -> None:
    """Write PGM or CSV (defaulting from the extension)."""
    if fmt is None:
        fmt = "pgm" if str(path).lower().endswith(".pgm") else "csv"
    if fmt == "pgm":
        write_text_atomic(path, pgm_text(image))
    elif fmt == "csv":
        write_text_atomic(path, csv_text(image))
    else:
        raise ValueError(f"unknown image format {fmt!r}; expected 'pgm' or 'csv'")
