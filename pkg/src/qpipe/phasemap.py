"""Classical pre-processing: intensity-to-phase mapping, padding and shifts.

Phase fractions are kept in turns (one turn = 2*pi radians) everywhere
outside the simulator; radians appear only at the circuit boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "MappingKind",
    "MappingMode",
    "Image",
    "PhaseImage",
    "ShiftAxis",
    "ShiftFill",
    "default_i_range",
    "flatten_and_pad",
    "map_phases",
    "shift_image",
    "negate_phases",
    "accumulate_phases",
]


class MappingKind(str, Enum):
    # full: theta = I / i_range in [0, 1)
    # half: theta = I / (2 * i_range) in [0, 0.5); decode doubles the value
    # signed: theta wrapped into [-0.5, 0.5); same circuit phases as full,
    #         signed interpretation at decode
    FULL_TURN = "full"
    HALF_TURN = "half"
    SIGNED_CENTERED = "signed"


@dataclass(frozen=True)
class MappingMode:
    """Intensity-to-phase map plus the normalization denominator."""

    kind: MappingKind
    i_range: float = 256.0

    def __post_init__(self):
        if not (self.i_range > 0 and math.isfinite(self.i_range)):
            raise ValueError(f"i_range must be a positive finite number, got {self.i_range}")

    @property
    def compensation(self) -> float:
        """Decode multiplier undoing the domain compression (2 for half-turn)."""
        return 2.0 if self.kind is MappingKind.HALF_TURN else 1.0

    @property
    def signed_decode(self) -> bool:
        """Whether decoded bin values are interpreted modularly as signed."""
        return self.kind is not MappingKind.FULL_TURN


@dataclass(frozen=True)
class Image:
    """Row-major grid of finite, nonnegative real intensities."""

    width: int
    height: int
    pixels: np.ndarray
    bit_depth_hint: int | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "pixels", np.ascontiguousarray(self.pixels, dtype=np.float64).ravel()
        )
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        if self.pixels.size != self.width * self.height:
            raise ValueError(
                f"{self.width}x{self.height} image needs {self.width * self.height} "
                f"pixels, got {self.pixels.size}"
            )
        if not np.isfinite(self.pixels).all():
            raise ValueError("image intensities must be finite")
        if (self.pixels < 0).any():
            raise ValueError("image intensities must be nonnegative")

    @classmethod
    def from_grid(cls, grid, bit_depth_hint: int | None = None) -> "Image":
        grid = np.asarray(grid, dtype=np.float64)
        if grid.ndim != 2:
            raise ValueError(f"expected a 2-D grid, got shape {grid.shape}")
        return cls(width=grid.shape[1], height=grid.shape[0], pixels=grid.ravel(),
                   bit_depth_hint=bit_depth_hint)

    def pixel_grid(self) -> np.ndarray:
        return self.pixels.reshape(self.height, self.width)


class ShiftAxis(str, Enum):
    HORIZONTAL = "horizontal"  # output (r, c) = input (r, c-1)
    VERTICAL = "vertical"      # output (r, c) = input (r-1, c)


class ShiftFill(str, Enum):
    ZERO = "zero"  # entering border pixels become 0
    WRAP = "wrap"  # circular wrap from the opposite edge


@dataclass(frozen=True)
class PhaseImage:
    """Per-pixel phase fractions (turns) over a zero-padded 2**n grid."""

    n: int
    theta: np.ndarray
    mode: MappingMode
    pad_count: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "theta", np.ascontiguousarray(self.theta, dtype=np.float64)
        )
        if self.theta.shape != (1 << self.n,):
            raise ValueError(
                f"phase image over n={self.n} position qubits needs {1 << self.n} "
                f"entries, got shape {self.theta.shape}"
            )
        if not np.isfinite(self.theta).all():
            raise ValueError("phase fractions must be finite")
        if self.pad_count and self.theta[self.theta.size - self.pad_count:].any():
            raise ValueError("padding entries must be exactly zero")


def default_i_range(image: Image) -> float:
    """256 for 8-bit hints (2**hint generally), otherwise max intensity + 1."""
    if image.bit_depth_hint is not None:
        return float(1 << image.bit_depth_hint)
    return float(image.pixels.max()) + 1.0


def flatten_and_pad(image: Image) -> tuple[int, np.ndarray]:
    """Row-major flatten into the smallest power-of-two slot count.

    Returns (n, padded intensities of length 2**n); pixel (r, c) lands at
    index r*width + c and padding entries are exactly zero.
    """
    count = image.pixels.size
    n = max(1, (count - 1).bit_length())
    padded = np.zeros(1 << n, dtype=np.float64)
    padded[:count] = image.pixels
    return n, padded


def map_phases(image: Image, mode: MappingMode) -> PhaseImage:
    """Map intensities to phase fractions per the mode formula.

    Full- and half-turn mappings reject intensities at or above i_range:
    an out-of-domain value would alias silently, so it fails loudly instead.
    """
    n, padded = flatten_and_pad(image)
    top = float(padded.max())
    if top >= mode.i_range:
        raise ValueError(
            f"intensity {top} is outside [0, {mode.i_range}) for {mode.kind.value} "
            f"mapping; raise i_range or rescale the image"
        )
    if mode.kind is MappingKind.FULL_TURN:
        theta = padded / mode.i_range
    elif mode.kind is MappingKind.HALF_TURN:
        theta = padded / (2.0 * mode.i_range)
    else:
        theta = np.mod(padded / mode.i_range + 0.5, 1.0) - 0.5
        theta[padded == 0.0] = 0.0  # keep padding and true zeros exactly zero
    pad_count = theta.size - image.pixels.size
    return PhaseImage(n=n, theta=theta, mode=mode, pad_count=pad_count)


def shift_image(image: Image, axis: ShiftAxis, fill: ShiftFill = ShiftFill.ZERO) -> Image:
    """Shift one pixel along the axis; the entering row/column obeys `fill`."""
    grid = image.pixel_grid()
    out = np.zeros_like(grid)
    if axis is ShiftAxis.HORIZONTAL:
        out[:, 1:] = grid[:, :-1]
        if fill is ShiftFill.WRAP:
            out[:, 0] = grid[:, -1]
    else:
        out[1:, :] = grid[:-1, :]
        if fill is ShiftFill.WRAP:
            out[0, :] = grid[-1, :]
    return Image(width=image.width, height=image.height, pixels=out.ravel(),
                 bit_depth_hint=image.bit_depth_hint)


def negate_phases(phases: PhaseImage) -> PhaseImage:
    theta = -phases.theta
    theta[theta == 0.0] = 0.0  # normalize -0.0 so padding stays exactly zero
    return PhaseImage(n=phases.n, theta=theta, mode=phases.mode, pad_count=phases.pad_count)


def accumulate_phases(images: Sequence[PhaseImage]) -> PhaseImage:
    """Entrywise sum of phase fractions; no modular reduction.

    The circuit phase e^{2*pi*i*theta} is inherently mod 1, so wrapping is
    deferred to decode.
    """
    if not images:
        raise ValueError("need at least one phase image to accumulate")
    first = images[0]
    for other in images[1:]:
        if other.n != first.n:
            raise ValueError(f"phase image shapes differ: n={first.n} vs n={other.n}")
        if other.mode != first.mode:
            raise ValueError(
                f"phase image mappings differ: {first.mode} vs {other.mode}"
            )
    theta = np.sum([img.theta for img in images], axis=0)
    theta[theta == 0.0] = 0.0
    pad_count = min(img.pad_count for img in images)
    return PhaseImage(n=first.n, theta=theta, mode=first.mode, pad_count=pad_count)
