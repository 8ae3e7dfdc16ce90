"""Synthetic scenes and brackets rendered through the model camera response."""

from __future__ import annotations

import typing

import numpy as np

from ltiphdr._algebra import LTIP, Algebra
from ltiphdr._image import ExposedFrame, codes_to_pixels, pixels_to_codes
from ltiphdr._irradiance import IrradianceMap

__all__ = ["DEFAULT_EXPOSURES", "synthetic_bracket", "synthetic_scene"]

DEFAULT_EXPOSURES = (0.25, 1.0, 4.0)

_SATURATED_RADIANCE = 1e7


def synthetic_scene(
    height: int = 64,
    width: int = 64,
    seed: int = 0,
    dynamic_range: float = 1e4,
    saturated: bool = True,
) -> IrradianceMap:
    """A textured radiance map spanning ``dynamic_range`` from left to right.

    Parameters
    ----------
    height, width : int, optional
        The size, by default 64x64.
    seed : int, optional
        Seeds the placement and color of the blobs.
    dynamic_range : float, optional
        Ratio of the brightest to the darkest base radiance.
    saturated : bool, optional
        Add a very bright patch in the top-right corner that saturates every
        exposure of a bracket.

    Returns
    -------
    IrradianceMap
        An ``(H, W, 3)`` map.
    """
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    x /= max(width - 1, 1)
    y /= max(height - 1, 1)

    base = np.power(dynamic_range, x - 0.5)
    texture = 1.0 + 0.4 * np.sin(2 * np.pi * 5 * y) * np.cos(2 * np.pi * 3 * x)
    radiance = (base * texture)[..., np.newaxis] * np.ones(3)
    for _ in range(4):
        cy, cx = rng.uniform(0.15, 0.85, size=2)
        color = rng.uniform(0.3, 1.7, size=3)
        blob = np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2 * 0.08**2))
        radiance *= 1.0 + blob[..., np.newaxis] * (color - 1.0)
    if saturated:
        patch = (slice(0, max(height // 6, 1)), slice(width - max(width // 6, 1), width))
        radiance[patch] = _SATURATED_RADIANCE
    return IrradianceMap(radiance)


def synthetic_bracket(
    scene: IrradianceMap,
    exposure_times: typing.Sequence[float] = DEFAULT_EXPOSURES,
    algebra: Algebra = LTIP,
    gain: float = 1.0,
) -> list[ExposedFrame]:
    """Photograph a scene at several exposure times with ``phi_inv`` as response.

    Each frame is ``phi_inv(gain * E * dt)`` quantized to 8-bit codes and decoded
    like a file would be, so white lands on ``1 - eps``.
    """
    frames = []
    for time in exposure_times:
        response = algebra.phi_inv(gain * scene.values * time)
        frames.append(ExposedFrame(codes_to_pixels(pixels_to_codes(response), 8), time))
    return frames
