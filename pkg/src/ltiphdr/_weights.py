"""Per-pixel quality weights computed in ordinary arithmetic on acquired frames."""

from __future__ import annotations

import dataclasses
import logging
import typing

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from ltiphdr._image import as_frame_stack, luminance
from ltiphdr._parallel import map_units
from ltiphdr._protocols import PoolProtocol

__all__ = [
    "STABILIZER",
    "WeightParams",
    "WeightStack",
    "combine_weights",
    "compute_weights",
    "contrast_weight",
    "normalize_stack",
    "saturation_weight",
    "well_exposedness_weight",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

STABILIZER = 1e-12
_LAPLACIAN = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])


@dataclasses.dataclass(frozen=True)
class WeightParams:
    """Exponents and well-exposedness shape of the quality weights.

    The defaults favor darker tones (``mu < 0.5``) to balance the bright bias of
    logarithmic addition.
    """

    wc_exponent: float = 1.0
    ws_exponent: float = 1.0
    we_exponent: float = 1.0
    mu: float = 0.37
    sigma2: float = 0.2

    def __post_init__(self) -> None:
        for name in ("wc_exponent", "ws_exponent", "we_exponent"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"Invalid value for `{name}`. Must be non-negative")
        if not 0 < self.mu < 1:
            raise ValueError(f"Invalid value for `mu`: {self.mu}. Must be in (0, 1)")
        if not self.sigma2 > 0:
            raise ValueError(f"Invalid value for `sigma2`: {self.sigma2}. Must be > 0")

    def to_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True, eq=False)
class WeightStack:
    """Per-frame weight maps of shape ``(N, H, W)``.

    Attributes
    ----------
    weights : numpy.ndarray
        Non-negative weights, one map per frame.
    normalized : bool
        Whether the maps sum to one at every pixel.
    """

    weights: FloatArray
    normalized: bool = False

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        """The ``(H, W)`` shape of each map."""
        return (int(self.weights.shape[1]), int(self.weights.shape[2]))

    @property
    def eta(self) -> FloatArray:
        """The per-pixel sum of the weights."""
        return _frame_sum(self.weights)


def _frame_sum(weights: FloatArray) -> FloatArray:
    # fixed frame-index order
    total = weights[0].copy()
    for w in weights[1:]:
        total += w
    return total


def contrast_weight(frame: npt.ArrayLike) -> FloatArray:
    """Absolute response of the 4-neighbour Laplacian on the frame's luminance.

    Borders replicate the edge pixels.
    """
    response = ndimage.convolve(luminance(frame), _LAPLACIAN, mode="nearest")
    return np.abs(response)


def saturation_weight(frame: npt.ArrayLike) -> FloatArray:
    """Population standard deviation across the color channels.

    Grayscale frames have zero saturation everywhere.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim == 2 or frame.shape[-1] == 1:
        return np.zeros(frame.shape[:2])
    return frame.std(axis=-1)


def well_exposedness_weight(
    frame: npt.ArrayLike, params: WeightParams = WeightParams()
) -> FloatArray:
    """Product over channels of ``exp(-(v - mu)**2 / (2 sigma2))``.

    Parameters
    ----------
    frame : array_like
        An ``(H, W)`` or ``(H, W, C)`` frame with values in ``[0, 1]``.
    params : WeightParams, optional
        Supplies ``mu`` and ``sigma2``.

    Returns
    -------
    numpy.ndarray
        Weights in ``(0, 1]``, equal to 1 where every channel is at ``mu``.
    """
    frame = np.asarray(frame, dtype=np.float64)
    gauss = np.exp(-((frame - params.mu) ** 2) / (2.0 * params.sigma2))
    if frame.ndim == 2:
        return gauss
    result = gauss[..., 0].copy()
    for c in range(1, frame.shape[-1]):
        result *= gauss[..., c]
    return result


def combine_weights(
    contrast: npt.ArrayLike,
    saturation: npt.ArrayLike,
    well_exposedness: npt.ArrayLike,
    params: WeightParams = WeightParams(),
) -> FloatArray:
    """Multiply the three measures raised to their exponents, plus a stabilizer.

    ``0 ** 0`` is taken as 1, so a measure with exponent zero drops out.
    """
    c = np.power(np.asarray(contrast, dtype=np.float64), params.wc_exponent)
    s = np.power(np.asarray(saturation, dtype=np.float64), params.ws_exponent)
    e = np.power(np.asarray(well_exposedness, dtype=np.float64), params.we_exponent)
    return c * s * e + STABILIZER


def _frame_weight(frame: FloatArray, params: WeightParams) -> FloatArray:
    return combine_weights(
        contrast_weight(frame),
        saturation_weight(frame),
        well_exposedness_weight(frame, params),
        params,
    )


def compute_weights(
    frames: typing.Sequence[npt.ArrayLike],
    params: WeightParams = WeightParams(),
    pool: PoolProtocol | None = None,
) -> WeightStack:
    """Compute the unnormalized weight map of every frame.

    Parameters
    ----------
    frames : sequence of array_like
        Frames of identical shape.
    params : WeightParams, optional
        The weight configuration, by default the standard one.
    pool : PoolProtocol, optional
        Runs one frame per work unit when given.

    Returns
    -------
    WeightStack
        The unnormalized stack.
    """
    stack = as_frame_stack(frames)

    def weigh(i: int) -> FloatArray:
        return _frame_weight(stack[i], params)

    maps = map_units(pool, weigh, range(stack.shape[0]))
    logger.debug("computed weights for %d frames", len(maps))
    return WeightStack(np.stack(maps), normalized=False)


def normalize_stack(stack: WeightStack) -> WeightStack:
    """Divide every weight by the per-pixel sum over frames.

    Pixels whose sum is below ``1e-12`` get uniform weights ``1 / N``.
    """
    weights = stack.weights
    n = weights.shape[0]
    eta = _frame_sum(weights)
    degenerate = eta < STABILIZER
    safe_eta = np.where(degenerate, 1.0, eta)
    normalized = np.where(degenerate, 1.0 / n, weights / safe_eta)
    if np.any(degenerate):
        logger.debug("%d pixel(s) fell back to uniform weights", int(degenerate.sum()))
    return WeightStack(normalized, normalized=True)
