"""Pixel grids in [0, 1], plain-text PGM/PPM round-trips, and Gaussian blur."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .channel import RngSeed

_PNM_MAXVAL = 255


@dataclass(frozen=True)
class ImageTensor:
    """Immutable (height, width, channels) grid of values in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 3 or min(v.shape) < 1:
            raise ValueError(f"values must be (h, w, c) with all dims >= 1, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("pixel values must be finite and in [0, 1]")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]

    @property
    def size(self) -> int:
        return self.values.size

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def random_image(height: int, width: int, channels: int, seed: RngSeed) -> ImageTensor:
    """Uniform-random image, deterministic given the seed."""
    rng = seed.generator()
    return ImageTensor(rng.uniform(0.0, 1.0, size=(height, width, channels)))


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    """Normalized 1-D Gaussian taps over [-radius, radius]."""
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be finite and > 0, got {sigma}")
    if not isinstance(radius, int) or radius < 1:
        raise ValueError(f"radius must be an integer >= 1, got {radius!r}")
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-(x**2) / (2.0 * sigma**2))
    return k / k.sum()


def gaussian_blur(img: ImageTensor, sigma: float = 1.5, radius: int = 3) -> ImageTensor:
    """Separable Gaussian blur with clamp-to-edge boundaries, per channel."""
    k = gaussian_kernel(sigma, radius)
    out = np.empty_like(img.values)
    for c in range(img.channels):
        plane = ndimage.convolve1d(img.values[:, :, c], k, axis=0, mode="nearest")
        out[:, :, c] = ndimage.convolve1d(plane, k, axis=1, mode="nearest")
    # convex combination of inputs; clip only guards fp round-off
    return ImageTensor(np.clip(out, 0.0, 1.0))


def write_pnm(img: ImageTensor, path) -> None:
    """Write plain-text PGM (1 channel) or PPM (3 channels), maxval 255."""
    if img.channels == 1:
        magic = "P2"
    elif img.channels == 3:
        magic = "P3"
    else:
        raise ValueError(f"PNM supports 1 or 3 channels, got {img.channels}")
    levels = np.rint(img.values * _PNM_MAXVAL).astype(int)
    lines = [magic, f"{img.width} {img.height}", str(_PNM_MAXVAL)]
    for row in levels.reshape(img.height, -1):
        lines.append(" ".join(str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_pnm(path) -> ImageTensor:
    """Read a plain-text PGM/PPM written by write_pnm (comments allowed)."""
    text = Path(path).read_text(encoding="ascii")
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] not in ("P2", "P3"):
        raise ValueError(f"{path}: expected plain PGM(P2)/PPM(P3) header")
    channels = 1 if tokens[0] == "P2" else 3
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
        samples = np.array([int(t) for t in tokens[4:]], dtype=float)
    except (ValueError, IndexError) as e:
        raise ValueError(f"{path}: malformed PNM payload") from e
    if maxval < 1:
        raise ValueError(f"{path}: maxval must be >= 1, got {maxval}")
    expected = width * height * channels
    if samples.size != expected:
        raise ValueError(f"{path}: expected {expected} samples, found {samples.size}")
    if samples.min() < 0 or samples.max() > maxval:
        raise ValueError(f"{path}: sample values outside [0, {maxval}]")
    return ImageTensor((samples / maxval).reshape(height, width, channels))
