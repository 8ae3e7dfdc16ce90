"""Burt-Adelson image pyramids on 2-D planes."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from ltiphdr._errors import FusionError

__all__ = [
    "BINOMIAL_KERNEL",
    "Pyramid",
    "auto_levels",
    "collapse",
    "downsample",
    "gaussian_pyramid",
    "laplacian_pyramid",
    "max_levels",
    "resolve_levels",
    "upsample",
]

FloatArray = npt.NDArray[np.float64]

BINOMIAL_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def _blur(plane: FloatArray, mode: str) -> FloatArray:
    out = ndimage.convolve1d(plane, BINOMIAL_KERNEL, axis=0, mode=mode)
    return ndimage.convolve1d(out, BINOMIAL_KERNEL, axis=1, mode=mode)


def downsample(plane: FloatArray) -> FloatArray:
    """Blur with replicated borders and keep every other row and column."""
    return _blur(plane, "nearest")[::2, ::2]


def upsample(plane: FloatArray, shape: tuple[int, ...]) -> FloatArray:
    """Zero-insert ``plane`` into ``shape`` and interpolate with the same kernel."""
    up = np.zeros(shape[:2], dtype=np.float64)
    up[::2, ::2] = plane
    return 4.0 * _blur(up, "mirror")


def max_levels(shape: tuple[int, ...]) -> int:
    """The most levels a plane of ``shape`` supports (coarsest level 1 pixel)."""
    return int(math.floor(math.log2(min(shape[0], shape[1])))) + 1


def auto_levels(shape: tuple[int, ...]) -> int:
    """``floor(log2(min(H, W))) - 1`` levels, at least one."""
    return max(1, int(math.floor(math.log2(min(shape[0], shape[1])))) - 1)


def resolve_levels(shape: tuple[int, ...], levels: int | None) -> int:
    """Resolve a requested level count (``None`` for automatic) for ``shape``.

    Raises
    ------
    FusionError
        If the plane is smaller than 2x2 or more levels are requested than fit.
    """
    if shape[0] < 2 or shape[1] < 2:
        raise FusionError(f"Images must be at least 2x2, got {shape[0]}x{shape[1]}")
    if levels is None:
        return auto_levels(shape)
    limit = max_levels(shape)
    if levels < 1 or levels > limit:
        raise FusionError(
            f"Cannot build {levels} pyramid levels for a {shape[0]}x{shape[1]} image "
            f"(at most {limit})"
        )
    return levels


def gaussian_pyramid(plane: FloatArray, levels: int) -> list[FloatArray]:
    """Successively blurred and halved copies of ``plane``, finest first."""
    pyramid = [plane]
    for _ in range(levels - 1):
        pyramid.append(downsample(pyramid[-1]))
    return pyramid


def laplacian_pyramid(plane: FloatArray, levels: int) -> list[FloatArray]:
    """Band-pass differences of the Gaussian pyramid plus its coarsest level."""
    gaussian = gaussian_pyramid(plane, levels)
    bands = [
        fine - upsample(coarse, fine.shape)
        for fine, coarse in zip(gaussian[:-1], gaussian[1:])
    ]
    bands.append(gaussian[-1])
    return bands


def collapse(levels: list[FloatArray]) -> FloatArray:
    """Invert :func:`laplacian_pyramid`."""
    result = levels[-1]
    for band in reversed(levels[:-1]):
        result = band + upsample(result, band.shape)
    return result


@dataclasses.dataclass(frozen=True, eq=False)
class Pyramid:
    """A multiresolution decomposition of one plane, finest level first.

    Attributes
    ----------
    levels : tuple of numpy.ndarray
        The planes. Band-pass pyramids hold signed coefficients with the coarsest
        low-pass residual last; low-pass pyramids hold blurred copies.
    kind : {"band", "lowpass"}
        Which decomposition ``levels`` holds.
    """

    levels: tuple[FloatArray, ...]
    kind: str = "band"

    @classmethod
    def band(cls, plane: FloatArray, levels: int) -> Pyramid:
        return cls(tuple(laplacian_pyramid(plane, levels)), kind="band")

    @classmethod
    def lowpass(cls, plane: FloatArray, levels: int) -> Pyramid:
        return cls(tuple(gaussian_pyramid(plane, levels)), kind="lowpass")

    @property
    def base_shape(self) -> tuple[int, ...]:
        return tuple(self.levels[0].shape)

    def __len__(self) -> int:
        return len(self.levels)

    def collapse(self) -> FloatArray:
        """Reconstruct the finest plane.

        Raises
        ------
        ValueError
            If this is a low-pass pyramid, whose finest level is already the plane.
        """
        if self.kind != "band":
            raise ValueError("Only band-pass pyramids can be collapsed")
        return collapse(list(self.levels))
