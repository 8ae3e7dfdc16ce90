from __future__ import annotations

import typing

import numpy as np
import numpy.typing as npt

__all__ = [
    "PoolProtocol",
    "TransformProtocol",
]

T = typing.TypeVar("T")
R = typing.TypeVar("R")


class TransformProtocol(typing.Protocol):
    """A pair of maps between the image domain and transform space."""

    def forward(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Map image values into transform space.

        Parameters
        ----------
        x : array_like
            Image values in the pixel domain.

        Returns
        -------
        numpy.ndarray
            The transform-space values.
        """
        ...

    def inverse(self, y: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Map transform-space values back into the image domain.

        Parameters
        ----------
        y : array_like
            Transform-space values.

        Returns
        -------
        numpy.ndarray
            The image values.
        """
        ...


class PoolProtocol(typing.Protocol):
    """Something that maps a function over independent work units, in order."""

    def map(
        self, func: typing.Callable[[T], R], items: typing.Iterable[T]
    ) -> list[R]: ...
