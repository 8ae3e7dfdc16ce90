"""Pixel containers and conversions shared by the fusion and I/O layers."""

from __future__ import annotations

import dataclasses
import typing

import numpy as np
import numpy.typing as npt

from ltiphdr._algebra import PIXEL_MAX
from ltiphdr._errors import ExposureTimeError, FusionError

__all__ = [
    "ExposedFrame",
    "as_frame_stack",
    "clamp_pixels",
    "codes_to_pixels",
    "luminance",
    "pixels_to_codes",
]

FloatArray = npt.NDArray[np.float64]


def clamp_pixels(x: npt.ArrayLike) -> FloatArray:
    """Clamp values into the pixel domain ``[0, 1 - eps]``."""
    return np.clip(np.asarray(x, dtype=np.float64), 0.0, PIXEL_MAX)


def codes_to_pixels(codes: npt.ArrayLike, bitdepth: int) -> FloatArray:
    """Map integer codes of the given bit depth to clamped pixel values.

    A code ``v`` maps to ``v / (2**bitdepth - 1)`` so white lands on ``1 - eps``.
    """
    scale = float(2**bitdepth - 1)
    return clamp_pixels(np.asarray(codes, dtype=np.float64) / scale)


def pixels_to_codes(x: npt.ArrayLike, bitdepth: int = 8) -> npt.NDArray[typing.Any]:
    """Quantize pixel values with ``floor(x * (2**bitdepth - 1) + 0.5)``.

    Returns
    -------
    numpy.ndarray
        ``uint8`` codes for 8-bit output, ``uint16`` otherwise.
    """
    scale = float(2**bitdepth - 1)
    codes = np.floor(np.asarray(x, dtype=np.float64) * scale + 0.5)
    dtype = np.uint8 if bitdepth <= 8 else np.uint16
    return np.clip(codes, 0, scale).astype(dtype)


def luminance(image: npt.ArrayLike) -> FloatArray:
    """The channel mean of an ``(H, W, C)`` image; 2-D images pass through."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return image
    return image.mean(axis=-1)


@dataclasses.dataclass(frozen=True, eq=False)
class ExposedFrame:
    """A decoded frame and the exposure time it was captured with.

    Parameters
    ----------
    image : numpy.ndarray
        Pixel values of shape ``(H, W)`` or ``(H, W, C)``.
    exposure_time : float
        The exposure time in seconds; by default 1.
    """

    image: FloatArray
    exposure_time: float = 1.0

    def __post_init__(self) -> None:
        if not (self.exposure_time > 0 and np.isfinite(self.exposure_time)):
            raise ExposureTimeError(
                f"Invalid exposure time {self.exposure_time!r}. Must be positive"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.image.shape)


def as_frame_stack(frames: typing.Sequence[npt.ArrayLike | ExposedFrame]) -> FloatArray:
    """Stack frames into one ``(N, H, W[, C])`` float array.

    Raises
    ------
    FusionError
        If there are no frames, they differ in shape, or they are smaller than 2x2.
    """
    if len(frames) == 0:
        raise FusionError("At least one frame is required")
    arrays = [
        np.asarray(f.image if isinstance(f, ExposedFrame) else f, dtype=np.float64)
        for f in frames
    ]
    shape = arrays[0].shape
    if arrays[0].ndim not in (2, 3):
        raise FusionError(f"Frames must be 2-D or 3-D arrays, got shape {shape}")
    for i, array in enumerate(arrays[1:], start=1):
        if array.shape != shape:
            raise FusionError(
                f"Frame {i} has shape {array.shape}, expected {shape} like frame 0"
            )
    if shape[0] < 2 or shape[1] < 2:
        raise FusionError(f"Frames must be at least 2x2, got {shape[0]}x{shape[1]}")
    return np.stack(arrays)
