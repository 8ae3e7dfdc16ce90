"""Photoreceptor response models."""

from __future__ import annotations

import dataclasses

import numpy as np
import numpy.typing as npt

__all__ = ["HvsParams", "michaelis_menten", "naka_rushton"]


@dataclasses.dataclass(frozen=True)
class HvsParams:
    """Parameters of the hyperbolic photoreceptor response.

    Parameters
    ----------
    semisaturation : float
        The intensity at which the response is half maximal.
    exponent : float
        The response exponent; ``0.74`` was measured for the rhesus monkey and
        ``1`` gives the Naka-Rushton special case.
    """

    semisaturation: float = 1.0
    exponent: float = 1.0

    def __post_init__(self) -> None:
        if not self.semisaturation > 0:
            raise ValueError("Invalid value for `semisaturation`. Must be positive")
        if not self.exponent > 0:
            raise ValueError("Invalid value for `exponent`. Must be positive")


def michaelis_menten(
    intensity: npt.ArrayLike, params: HvsParams = HvsParams()
) -> npt.NDArray[np.float64]:
    """Normalized photoreceptor response ``I**n / (I**n + I_S**n)``.

    Parameters
    ----------
    intensity : array_like
        Non-negative light intensities.
    params : HvsParams, optional
        The semisaturation level and exponent.

    Returns
    -------
    numpy.ndarray
        Responses in ``[0, 1)``.
    """
    if params.exponent == 1.0:
        return naka_rushton(intensity, params.semisaturation)
    i_n = np.power(np.asarray(intensity, dtype=np.float64), params.exponent)
    return i_n / (i_n + params.semisaturation**params.exponent)


def naka_rushton(
    intensity: npt.ArrayLike, semisaturation: float = 1.0
) -> npt.NDArray[np.float64]:
    """Normalized photoreceptor response ``I / (I + I_S)``.

    With ``semisaturation=1`` this is the same closed form as the LTIP inverse
    generative function.
    """
    i = np.asarray(intensity, dtype=np.float64)
    return i / (i + semisaturation)
