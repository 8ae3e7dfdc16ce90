"""Look-up tables for the generative function and its inverse.

The generative functions have a pole at the top of the pixel domain, where
uniform pixel knots cannot follow them. Tables are therefore laid out on
logarithmic coordinates:

- ``phi`` tables hold ``log(phi(x))`` on knots uniform in the log-odds of the
  pixel, ``log(x / (D - x))``. In these coordinates every generative function is
  close to linear at both ends of the domain.
- ``phi_inv`` tables hold pixel values on knots uniform in ``log(y)``.

Lookups compute the knot index arithmetically, so a lookup costs a few array
passes and one or two transcendental functions, whatever the resolution.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import typing

import numpy as np
import numpy.typing as npt

from ltiphdr._algebra import LTIP, Algebra
from ltiphdr._errors import LutError

__all__ = [
    "DEFAULT_RESOLUTION",
    "MIN_RESOLUTION",
    "DirectTransform",
    "Lut",
    "LutFunction",
    "LutTransform",
    "build_lut",
    "transform_for",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
LutFunction = typing.Literal["phi", "phi_inv"]

DEFAULT_RESOLUTION = 65536
MIN_RESOLUTION = 256
_SAMPLES_PER_INTERVAL = 4
# pixels below this fraction of the domain are interpolated linearly through zero
_FLOOR = 2.0**-40


def _scale(algebra: Algebra) -> float:
    return algebra.upper if np.isfinite(algebra.upper) else 1.0


def _log_odds(x: npt.ArrayLike, scale: float) -> FloatArray:
    x = np.asarray(x, dtype=np.float64)
    return np.log(x / (scale - x))


def _from_log_odds(z: npt.ArrayLike, scale: float) -> FloatArray:
    return scale / (1.0 + np.exp(-np.asarray(z, dtype=np.float64)))


@dataclasses.dataclass(frozen=True, eq=False)
class Lut:
    """A piecewise-linear table of ``phi`` or ``phi_inv``.

    Knot ``k`` sits at coordinate ``start + k * step``. For ``phi`` the
    coordinate is the log-odds of the pixel and ``values`` holds ``log(phi)``;
    for ``phi_inv`` the coordinate is ``log(y)`` and ``values`` holds pixels.
    Inputs below ``floor`` map linearly onto ``[0, floor_value]``, inputs past the
    last knot clamp to it.

    ``max_abs_error`` is measured at build time against direct evaluation:

    - ``phi``: ``|lut(x) - phi(x)| / max(1, phi(x))``, absolute below 1 and relative
      above. For LTIP with normalized weights, the error it causes in a flat-fused
      pixel is at most this value.
    - ``phi_inv``: ``|lut(y) - phi_inv(y)|``, in pixels.
    """

    function: LutFunction
    algebra: Algebra
    resolution: int
    start: float
    step: float
    values: FloatArray
    slopes: FloatArray
    floor: float
    floor_value: float
    max_abs_error: float

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        """Look up ``x`` with linear interpolation."""
        return self.lookup(x)

    def lookup(self, x: npt.ArrayLike) -> FloatArray:
        """Look up ``x`` with linear interpolation.

        Parameters
        ----------
        x : array_like
            Pixel values (``phi`` tables) or transform values (``phi_inv`` tables).

        Returns
        -------
        numpy.ndarray
            The interpolated function values, same shape as ``x``.
        """
        x = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(x)
        if self.function == "phi":
            clipped = np.clip(flat, self.floor, self.algebra.pixel_max)
            position = _log_odds(clipped, _scale(self.algebra))
        else:
            position = np.log(np.maximum(flat, self.floor))
        position -= self.start
        position *= 1.0 / self.step
        np.clip(position, 0.0, self.resolution, out=position)
        index = np.minimum(position.astype(np.intp), self.resolution - 1)
        position -= index
        out = self.values[index] + position * self.slopes[index]
        if self.function == "phi":
            np.exp(out, out=out)
        below = flat < self.floor
        if np.any(below):
            ramp = np.maximum(flat, 0.0) * (self.floor_value / self.floor)
            out = np.where(below, ramp, out)
        return out.reshape(x.shape)

    def info(self) -> dict[str, typing.Any]:
        """Summary of the table for diagnostics output."""
        return {
            "function": self.function,
            **self.algebra.params(),
            "resolution": self.resolution,
            "max_abs_error": self.max_abs_error,
            "bound": 1.0 / self.resolution,
        }


def _measure_error(lut: Lut) -> float:
    algebra, scale = lut.algebra, _scale(lut.algebra)
    # four samples per interval land on every knot and every midpoint
    stop = lut.start + lut.resolution * lut.step
    coords = np.linspace(lut.start, stop, _SAMPLES_PER_INTERVAL * lut.resolution + 1)
    below = [0.0, lut.floor / 3.0, lut.floor / 2.0]
    if lut.function == "phi":
        x = np.minimum(_from_log_odds(coords, scale), algebra.pixel_max)
        x = np.concatenate([below, x])
        exact = algebra.phi(x)
        error = np.abs(lut.lookup(x) - exact) / np.maximum(exact, 1.0)
    else:
        y = np.concatenate([below, np.exp(coords)])
        error = np.abs(lut.lookup(y) - algebra.phi_inv(y))
    return float(error.max())


def build_lut(
    function: LutFunction,
    algebra: Algebra = LTIP,
    resolution: int = DEFAULT_RESOLUTION,
) -> Lut:
    """Tabulate ``phi`` or ``phi_inv`` of an algebra.

    Parameters
    ----------
    function : {"phi", "phi_inv"}
        Which direction the table evaluates.
    algebra : Algebra, optional
        The algebra, by default LTIP.
    resolution : int, optional
        Number of intervals between knots, by default 65536.

    Returns
    -------
    Lut
        The table, with its measured error.

    Raises
    ------
    LutError
        If the resolution is below 256, the algebra's transform range cannot be
        tabulated, or the error measured on a dense sample grid exceeds
        ``1 / resolution``.
    """
    if function not in ("phi", "phi_inv"):
        raise ValueError(f"Unknown LUT function: {function!r}")
    if resolution < MIN_RESOLUTION:
        raise LutError(
            f"LUT resolution {resolution} is below the minimum of {MIN_RESOLUTION}"
        )

    scale = _scale(algebra)
    x_floor, x_top = scale * _FLOOR, algebra.pixel_max
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        y_floor, y_top = float(algebra.phi(x_floor)), float(algebra.phi(x_top))
    if not (0.0 < y_floor < y_top < np.inf):
        raise LutError(
            f"Cannot tabulate {function} for {algebra.params()}: transform range "
            f"[{y_floor:g}, {y_top:g}] is not representable"
        )

    if function == "phi":
        start, stop = float(_log_odds(x_floor, scale)), float(_log_odds(x_top, scale))
        coords = np.linspace(start, stop, resolution + 1)
        values = np.log(algebra.phi(np.minimum(_from_log_odds(coords, scale), x_top)))
        floor, floor_value = x_floor, y_floor
    else:
        start, stop = float(np.log(y_floor)), float(np.log(y_top))
        coords = np.linspace(start, stop, resolution + 1)
        values = algebra.phi_inv(np.exp(coords))
        floor, floor_value = y_floor, x_floor
    slopes = np.diff(values)
    values.flags.writeable = False
    slopes.flags.writeable = False

    lut = Lut(
        function,
        algebra,
        resolution,
        start=start,
        step=(stop - start) / resolution,
        values=values,
        slopes=slopes,
        floor=floor,
        floor_value=floor_value,
        max_abs_error=np.nan,
    )
    error = _measure_error(lut)
    if error > 1.0 / resolution:
        raise LutError(
            f"LUT for {function} with resolution {resolution} has measured error "
            f"{error:.3e}, above the bound {1.0 / resolution:.3e}",
            measured_error=error,
        )
    logger.debug("built %s LUT, resolution=%d, error=%.3e", function, resolution, error)
    return dataclasses.replace(lut, max_abs_error=error)


@functools.lru_cache(maxsize=16)
def _cached_lut(function: LutFunction, algebra: Algebra, resolution: int) -> Lut:
    return build_lut(function, algebra, resolution)


@dataclasses.dataclass(frozen=True)
class DirectTransform:
    """Evaluates the algebra's generative function directly."""

    algebra: Algebra

    def forward(self, x: npt.ArrayLike) -> FloatArray:
        """Map pixels to transform space."""
        return self.algebra.phi(x)

    def inverse(self, y: npt.ArrayLike) -> FloatArray:
        """Map transform values back to pixels."""
        return self.algebra.phi_inv(y)


@dataclasses.dataclass(frozen=True)
class LutTransform:
    """Evaluates the generative function through a pair of look-up tables."""

    forward_lut: Lut
    inverse_lut: Lut

    def forward(self, x: npt.ArrayLike) -> FloatArray:
        """Map pixels to transform space."""
        return self.forward_lut.lookup(x)

    def inverse(self, y: npt.ArrayLike) -> FloatArray:
        """Map transform values back to pixels."""
        return self.inverse_lut.lookup(y)

    def info(self) -> dict[str, dict[str, typing.Any]]:
        """Diagnostics of both tables, keyed by function."""
        return {"phi": self.forward_lut.info(), "phi_inv": self.inverse_lut.info()}


def transform_for(
    algebra: Algebra, use_lut: bool = False, resolution: int = DEFAULT_RESOLUTION
) -> DirectTransform | LutTransform:
    """Select the direct or table-driven transform for an algebra.

    Tables are cached per algebra and resolution, so repeated fusions share them.
    """
    if not use_lut:
        return DirectTransform(algebra)
    return LutTransform(
        forward_lut=_cached_lut("phi", algebra, resolution),
        inverse_lut=_cached_lut("phi_inv", algebra, resolution),
    )
