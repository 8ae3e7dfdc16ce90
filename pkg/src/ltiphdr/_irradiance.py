"""Irradiance recovery, merging and tone mapping with ``phi`` as the camera response.

Recovering ``E_i = phi(f_i) / dt_i``, merging ``E = sum w_i E_i / sum w_i`` and
tone mapping with ``phi_inv`` gives, once a shared exposure time is scaled back out,
the same image as fusing the frames directly in the algebra.
"""

from __future__ import annotations

import dataclasses
import logging
import typing

import numpy as np
import numpy.typing as npt

from ltiphdr._algebra import LTIP, Algebra
from ltiphdr._errors import DomainError, ExposureTimeError, FusionError
from ltiphdr._fusion import FusionConfig, fuse_flat, fuse_flat_algebraic
from ltiphdr._image import ExposedFrame, as_frame_stack, clamp_pixels
from ltiphdr._weights import WeightStack, compute_weights

__all__ = [
    "EquivalenceReport",
    "IrradianceMap",
    "merge_irradiance",
    "recover_irradiance",
    "tonemap_ltip",
    "verify_equivalence",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


@dataclasses.dataclass(frozen=True, eq=False)
class IrradianceMap:
    """Relative scene radiance, non-negative and unbounded above."""

    values: FloatArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DomainError("Irradiance values must be finite and non-negative")
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.values.shape)


def recover_irradiance(frame: ExposedFrame, algebra: Algebra = LTIP) -> IrradianceMap:
    """Invert the response and divide by the exposure time: ``phi(f) / dt``.

    Raises
    ------
    DomainError
        If the frame is outside the algebra's domain.
    """
    response = algebra.phi(algebra.check_domain(frame.image))
    return IrradianceMap(response / frame.exposure_time)


def merge_irradiance(
    maps: typing.Sequence[IrradianceMap], stack: WeightStack
) -> IrradianceMap:
    """Weighted average of irradiance maps, ``sum_i w_i E_i / sum_i w_i``.

    Parameters
    ----------
    maps : sequence of IrradianceMap
        Maps of identical shape.
    stack : WeightStack
        One weight map per irradiance map, normalized or not.

    Returns
    -------
    IrradianceMap
        The merged map, bounded by the per-pixel extrema of the inputs.

    Raises
    ------
    FusionError
        If the shapes or counts disagree.
    """
    values = as_frame_stack([m.values for m in maps])
    if len(stack) != values.shape[0] or stack.shape != values.shape[1:3]:
        raise FusionError(
            f"Weight stack of {len(stack)} maps of {stack.shape} does not match "
            f"{values.shape[0]} irradiance maps of {values.shape[1:3]}"
        )
    weights = stack.weights
    if values.ndim == 4:
        weights = weights[..., np.newaxis]
    total = weights[0] * values[0]
    for i in range(1, values.shape[0]):
        total = total + weights[i] * values[i]
    eta = stack.eta if values.ndim == 3 else stack.eta[..., np.newaxis]
    return IrradianceMap(total / eta)


def tonemap_ltip(irradiance: IrradianceMap, algebra: Algebra = LTIP) -> FloatArray:
    """Display irradiance through the response ``phi_inv``, in ``[0, 1 - eps]``."""
    return clamp_pixels(algebra.phi_inv(irradiance.values))


@dataclasses.dataclass(frozen=True)
class EquivalenceReport:
    """Agreement between direct fusion and the irradiance path.

    Attributes
    ----------
    algebraic : float
        Max absolute difference of the pure ``(+)``/``(x)`` fusion.
    transform : float
        Max absolute difference of the transform-space fusion.
    """

    algebraic: float
    transform: float

    @property
    def max_diff(self) -> float:
        return max(self.algebraic, self.transform)

    def to_dict(self) -> dict[str, float]:
        return {**dataclasses.asdict(self), "max_diff": self.max_diff}


def verify_equivalence(
    frames: typing.Sequence[ExposedFrame],
    config: FusionConfig = FusionConfig(),
    stack: WeightStack | None = None,
) -> EquivalenceReport:
    """Compare exposure fusion in the algebra with the irradiance-map pipeline.

    Parameters
    ----------
    frames : sequence of ExposedFrame
        The bracket; all frames must share one exposure time.
    config : FusionConfig, optional
        Supplies the algebra and weight parameters. Flat mode with direct
        evaluation is always used.
    stack : WeightStack, optional
        Unnormalized weights; computed from the frames when omitted.

    Returns
    -------
    EquivalenceReport
        Max absolute per-pixel differences against
        ``tonemap_ltip(merge_irradiance(recover_irradiance(...)))``, with the merged
        irradiance scaled back by the shared exposure time.

    Raises
    ------
    ExposureTimeError
        If the exposure times differ, since fusion drops them.
    """
    shared = frames[0].exposure_time if frames else 1.0
    unequal = [i for i, f in enumerate(frames) if f.exposure_time != shared]
    if unequal:
        raise ExposureTimeError(
            f"Equivalence needs equal exposure times; frame(s) {unequal} differ "
            f"from the {shared:g} s of frame 0"
        )
    if config.use_lut or config.mode != "flat":
        logger.debug("equivalence check uses flat mode with direct evaluation")
        config = dataclasses.replace(config, mode="flat", use_lut=False)

    algebra = config.algebra
    images = [f.image for f in frames]
    if stack is None:
        stack = compute_weights(images, config.weight_params)

    merged = merge_irradiance([recover_irradiance(f, algebra) for f in frames], stack)
    reference = tonemap_ltip(IrradianceMap(merged.values * shared), algebra)
    algebraic = fuse_flat_algebraic(images, stack, algebra)
    transform = fuse_flat(images, stack, config)
    report = EquivalenceReport(
        algebraic=float(np.max(np.abs(algebraic - reference))),
        transform=float(np.max(np.abs(transform - reference))),
    )
    logger.debug("equivalence max diff %.3e", report.max_diff)
    return report
