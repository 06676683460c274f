"""Seeded synthetic image generators for desk-scale runs.

The same seed always yields the same pixels; every noise parameter is a
real argument rather than a constant hidden in code.
"""

from __future__ import annotations

import numpy as np

from .phasemap import Image

__all__ = ["ramp", "step", "phantom_speckle", "GENERATORS", "generate"]


def ramp(width: int, height: int, i_range: float = 256.0, seed: int | None = None) -> Image:
    """Horizontal linear gradient spanning [0, i_range)."""
    cols = np.arange(width, dtype=np.float64) * (i_range / width)
    grid = np.tile(cols, (height, 1))
    return Image.from_grid(grid)


def step(
    width: int,
    height: int,
    high: float = 200.0,
    low: float = 0.0,
    split: int | None = None,
    seed: int | None = None,
) -> Image:
    """Block edge: columns left of `split` hold `high`, the rest `low`.

    The default 200/0 levels put a 200-to-0 transition at the boundary when
    scanned left to right.
    """
    if split is None:
        split = width // 2
    if not 0 < split < width:
        raise ValueError(f"split column {split} must lie strictly inside 0..{width}")
    grid = np.full((height, width), float(low))
    grid[:, :split] = float(high)
    return Image.from_grid(grid)


def phantom_speckle(
    width: int,
    height: int,
    sigma: float = 0.1,
    i_range: float = 256.0,
    seed: int = 0,
) -> Image:
    """Two-ellipse phantom with multiplicative speckle I*(1 + sigma*g).

    g is standard normal per pixel; the result is clipped to [0, i_range).
    sigma=0 reproduces the noise-free phantom exactly.
    """
    if sigma < 0:
        raise ValueError(f"noise level must be nonnegative, got {sigma}")
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:height, 0:width]
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    scale = i_range / 256.0
    grid = np.full((height, width), 20.0 * scale)
    outer = ((xs - cx) / (0.42 * width)) ** 2 + ((ys - cy) / (0.36 * height)) ** 2 <= 1.0
    grid[outer] = 150.0 * scale
    inner = ((xs - cx - 0.08 * width) / (0.18 * width)) ** 2 + (
        (ys - cy + 0.05 * height) / (0.15 * height)
    ) ** 2 <= 1.0
    grid[inner] = 210.0 * scale
    if sigma > 0:
        grid = grid * (1.0 + sigma * rng.standard_normal(grid.shape))
    grid = np.clip(grid, 0.0, np.nextafter(i_range, 0.0))
    return Image.from_grid(grid)


GENERATORS = {
    "ramp": ramp,
    "step": step,
    "phantom-speckle": phantom_speckle,
}


def generate(name: str, **kwargs) -> Image:
    try:
        maker = GENERATORS[name]
    except KeyError:
        raise ValueError(
            f"unknown generator {name!r}; expected one of {sorted(GENERATORS)}"
        ) from None
    return maker(**kwargs)
