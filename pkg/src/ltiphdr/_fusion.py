"""Exposure fusion with the blending arithmetic pulled through an algebra.

With normalized weights ``w_i`` the flat fusion of frames ``f_i`` is

    phi_inv(sum_i w_i * phi(f_i))

which is ``(+)``-summing ``w_i (x) f_i`` in the algebra itself. Pyramid fusion
does the same per band-pass level, with the weights blended by low-pass
pyramids in ordinary arithmetic.
"""

from __future__ import annotations

import dataclasses
import logging
import typing

import numpy as np
import numpy.typing as npt

from ltiphdr._algebra import LTIP, Algebra
from ltiphdr._errors import FusionError
from ltiphdr._image import ExposedFrame, as_frame_stack, clamp_pixels
from ltiphdr._lut import DEFAULT_RESOLUTION, DirectTransform, LutTransform, transform_for
from ltiphdr._parallel import TilePool, map_units
from ltiphdr._protocols import PoolProtocol, TransformProtocol
from ltiphdr._pyramid import Pyramid, resolve_levels
from ltiphdr._weights import WeightParams, WeightStack, compute_weights, normalize_stack

__all__ = [
    "FusionConfig",
    "FusionMode",
    "Pyramids",
    "build_pyramids",
    "from_transform_space",
    "fuse",
    "fuse_flat",
    "fuse_flat_algebraic",
    "fuse_pyramid",
    "to_transform_space",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
FusionMode = typing.Literal["flat", "pyramid"]
Frames = typing.Sequence[typing.Union[npt.ArrayLike, ExposedFrame]]


@dataclasses.dataclass(frozen=True)
class FusionConfig:
    """How frames are fused.

    Parameters
    ----------
    algebra : Algebra
        The arithmetic frames are blended with, by default LTIP.
    mode : {"flat", "pyramid"}
        Single-level or multiresolution blending, by default pyramid.
    levels : int, optional
        Pyramid levels; ``None`` picks ``floor(log2(min(H, W))) - 1``.
    weight_params : WeightParams
        The quality weight configuration.
    use_lut : bool
        Evaluate the generative function through look-up tables.
    lut_resolution : int
        Intervals per look-up table.
    workers : int
        Worker threads; results do not depend on it.
    """

    algebra: Algebra = LTIP
    mode: FusionMode = "pyramid"
    levels: int | None = None
    weight_params: WeightParams = WeightParams()
    use_lut: bool = False
    lut_resolution: int = DEFAULT_RESOLUTION
    workers: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("flat", "pyramid"):
            raise ValueError(f"Invalid value for `mode`: {self.mode!r}")
        if self.levels is not None and self.levels < 1:
            raise ValueError(f"Invalid value for `levels`: {self.levels}. Must be >= 1")
        if self.workers < 1:
            raise ValueError(f"Invalid value for `workers`: {self.workers}. Must be >= 1")

    def transform(self) -> DirectTransform | LutTransform:
        """The pixel/transform-space maps this configuration evaluates with."""
        return transform_for(self.algebra, self.use_lut, self.lut_resolution)

    def to_dict(self) -> dict[str, typing.Any]:
        return {
            **self.algebra.params(),
            "mode": self.mode,
            "levels": "auto" if self.levels is None else self.levels,
            **self.weight_params.to_dict(),
            "lut": self.use_lut,
            "lut_resolution": self.lut_resolution,
            "workers": self.workers,
        }


def to_transform_space(frame: npt.ArrayLike, algebra: Algebra = LTIP) -> FloatArray:
    """Map a frame through the generative function.

    Raises
    ------
    DomainError
        If any value is outside the algebra's domain.
    """
    return algebra.phi(algebra.check_domain(frame))


def from_transform_space(plane: npt.ArrayLike, algebra: Algebra = LTIP) -> FloatArray:
    """Map a transform-space plane back to pixels.

    This inverts :func:`to_transform_space`.
    """
    return algebra.phi_inv(algebra.check_transform(plane))


def _prepare(
    frames: Frames, stack: WeightStack, config: FusionConfig
) -> tuple[FloatArray, FloatArray]:
    data = as_frame_stack(frames)
    config.algebra.check_domain(data)
    if len(stack) != data.shape[0] or stack.shape != data.shape[1:3]:
        raise FusionError(
            f"Weight stack of {len(stack)} maps of {stack.shape} does not match "
            f"{data.shape[0]} frames of {data.shape[1:3]}"
        )
    if not stack.normalized:
        stack = normalize_stack(stack)
    return data, stack.weights


def _expand(weight: FloatArray, frame: FloatArray) -> FloatArray:
    return weight[..., np.newaxis] if frame.ndim == 3 else weight


def _forward_all(
    data: FloatArray, transform: TransformProtocol, pool: PoolProtocol | None
) -> list[FloatArray]:
    def forward(i: int) -> FloatArray:
        return transform.forward(data[i])

    return map_units(pool, forward, range(data.shape[0]))


def fuse_flat(
    frames: Frames,
    stack: WeightStack,
    config: FusionConfig = FusionConfig(),
    pool: PoolProtocol | None = None,
) -> FloatArray:
    """Fuse frames pixelwise with normalized weights in transform space.

    Parameters
    ----------
    frames : sequence of array_like
        Aligned frames of identical shape in the algebra's domain.
    stack : WeightStack
        Weights, normalized here if they are not already.
    config : FusionConfig, optional
        Supplies the algebra and LUT settings.
    pool : PoolProtocol, optional
        Maps frames to transform space one frame per work unit.

    Returns
    -------
    numpy.ndarray
        ``phi_inv(sum_i w_i phi(f_i))`` clamped to ``[0, 1 - eps]``. With the real
        algebra this is the convex combination ``sum_i w_i f_i``.

    Raises
    ------
    FusionError
        If there are no frames or shapes disagree.
    """
    data, weights = _prepare(frames, stack, config)
    transform = config.transform()
    planes = _forward_all(data, transform, pool)

    acc = _expand(weights[0], data[0]) * planes[0]
    for i in range(1, len(planes)):
        acc = acc + _expand(weights[i], data[i]) * planes[i]
    return clamp_pixels(transform.inverse(np.maximum(acc, 0.0)))


def fuse_flat_algebraic(
    frames: Frames,
    weights: WeightStack | npt.ArrayLike,
    algebra: Algebra = LTIP,
) -> FloatArray:
    """Fuse frames using only the algebra's addition and scalar multiplication.

    Evaluates ``(1 / eta) (x) ((+)-sum_i w_i (x) f_i)`` with raw weights ``w_i`` and
    their per-pixel sum ``eta``, never leaving the image domain.

    Parameters
    ----------
    frames : sequence of array_like
        Aligned frames of identical shape.
    weights : WeightStack or array_like
        Unnormalized non-negative weights of shape ``(N, H, W)``.
    algebra : Algebra, optional
        The algebra, by default LTIP.

    Returns
    -------
    numpy.ndarray
        The fused frame clamped to ``[0, 1 - eps]``.
    """
    data = as_frame_stack(frames)
    algebra.check_domain(data)
    if isinstance(weights, WeightStack):
        weights = weights.weights
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != data.shape[:3]:
        raise FusionError(f"Weights of shape {w.shape} do not match frames {data.shape}")
    if np.any(w < 0):
        raise FusionError("Weights must be non-negative")

    terms = (algebra.smul(_expand(w[i], data[i]), data[i]) for i in range(data.shape[0]))
    total = algebra.sum(terms)
    eta = WeightStack(w).eta
    return clamp_pixels(algebra.smul(_expand(1.0 / eta, data[0]), total))


@dataclasses.dataclass(frozen=True, eq=False)
class Pyramids:
    """Band-pass pyramids of the frames and low-pass pyramids of their weights.

    ``bands[i][c]`` decomposes channel ``c`` of frame ``i`` in transform space and
    ``weights[i]`` the normalized weight map of frame ``i``.
    """

    bands: tuple[tuple[Pyramid, ...], ...]
    weights: tuple[Pyramid, ...]
    base_shape: tuple[int, ...]

    @property
    def levels(self) -> int:
        return len(self.weights[0])


def _channels(plane: FloatArray) -> list[FloatArray]:
    if plane.ndim == 2:
        return [plane]
    return [np.ascontiguousarray(plane[..., c]) for c in range(plane.shape[-1])]


def build_pyramids(
    frames: Frames,
    stack: WeightStack,
    config: FusionConfig = FusionConfig(),
    pool: PoolProtocol | None = None,
) -> Pyramids:
    """Decompose frames in transform space and weights in ordinary arithmetic.

    Raises
    ------
    FusionError
        If the frames are smaller than 2x2, too many levels are requested, or the
        weights do not match the frames.
    """
    data, weights = _prepare(frames, stack, config)
    levels = resolve_levels(data.shape[1:3], config.levels)
    logger.debug("building %d-level pyramids for %d frames", levels, data.shape[0])
    planes = _forward_all(data, config.transform(), pool)

    def decompose(i: int) -> tuple[tuple[Pyramid, ...], Pyramid]:
        bands = tuple(Pyramid.band(ch, levels) for ch in _channels(planes[i]))
        return bands, Pyramid.lowpass(weights[i], levels)

    parts = map_units(pool, decompose, range(data.shape[0]))
    return Pyramids(
        bands=tuple(bands for bands, _ in parts),
        weights=tuple(weight for _, weight in parts),
        base_shape=tuple(data.shape[1:]),
    )


def _blend_channel(pyramids: Pyramids, c: int) -> FloatArray:
    blended = []
    for level in range(pyramids.levels):
        acc = pyramids.weights[0].levels[level] * pyramids.bands[0][c].levels[level]
        for i in range(1, len(pyramids.weights)):
            weight = pyramids.weights[i].levels[level]
            acc = acc + weight * pyramids.bands[i][c].levels[level]
        blended.append(acc)
    return Pyramid(tuple(blended)).collapse()


def fuse_pyramid(
    frames: Frames,
    stack: WeightStack,
    config: FusionConfig = FusionConfig(),
    pool: PoolProtocol | None = None,
) -> FloatArray:
    """Fuse frames level by level on band-pass pyramids in transform space.

    Each level blends ``sum_i W_i * L_i`` with the low-pass weight pyramid ``W_i``
    and band-pass frame pyramid ``L_i``. The collapsed plane is clamped at zero,
    mapped back through ``phi_inv`` and clamped to ``[0, 1 - eps]``.
    """
    pyramids = build_pyramids(frames, stack, config, pool)
    n_channels = len(pyramids.bands[0])

    def blend(c: int) -> FloatArray:
        return _blend_channel(pyramids, c)

    channels = map_units(pool, blend, range(n_channels))
    plane = channels[0] if len(pyramids.base_shape) == 2 else np.stack(channels, axis=-1)
    return clamp_pixels(config.transform().inverse(np.maximum(plane, 0.0)))


def fuse(
    frames: Frames,
    exposure_metadata: typing.Sequence[float] | None = None,
    config: FusionConfig = FusionConfig(),
) -> FloatArray:
    """Fuse an exposure bracket end to end.

    Parameters
    ----------
    frames : sequence of array_like or ExposedFrame
        The bracket, aligned and of identical shape.
    exposure_metadata : sequence of float, optional
        Exposure times. Exposure fusion does not use them.
    config : FusionConfig, optional
        The fusion configuration.

    Returns
    -------
    numpy.ndarray
        The fused frame in ``[0, 1 - eps]``.
    """
    if exposure_metadata is not None:
        logger.debug("fusion ignores %d exposure time(s)", len(exposure_metadata))
    data = as_frame_stack(frames)
    config.algebra.check_domain(data)
    with TilePool(config.workers) as pool:
        stack = normalize_stack(compute_weights(data, config.weight_params, pool))
        if config.mode == "flat":
            return fuse_flat(data, stack, config, pool)
        return fuse_pyramid(data, stack, config, pool)
