"""Logarithmic-type image algebras.

Each algebra is defined by a generative function ``phi`` that carries the bounded
image domain onto the real half-line. Addition and scalar multiplication are the
pull-backs of the real operations through ``phi``, so that

    u (+) v     = phi_inv(phi(u) + phi(v))
    a (x) u     = phi_inv(a * phi(u))

The closed forms below are the tabulated ones; they agree with the pull-backs to
round-off.
"""

from __future__ import annotations

import abc
import dataclasses
import functools
import typing

import numpy as np
import numpy.typing as npt

from ltiphdr._errors import DomainError

__all__ = [
    "EPSILON",
    "LIP",
    "LTIP",
    "PIXEL_MAX",
    "REAL",
    "Algebra",
    "ClassicalLipAlgebra",
    "LtipAlgebra",
    "ModelName",
    "ParametricLtipAlgebra",
    "RealAlgebra",
    "create_algebra",
    "ltip_add",
    "ltip_smul",
    "ltip_sub",
    "phi",
    "phi_inv",
]

FloatArray = npt.NDArray[np.float64]
ModelName = typing.Literal["ltip", "lip", "parametric", "real"]

# 8-bit white maps here; keeps phi finite at the pole.
EPSILON = 2.0**-20
PIXEL_MAX = 1.0 - EPSILON


def _as_float(x: npt.ArrayLike) -> FloatArray:
    return np.asarray(x, dtype=np.float64)


def _pow(x: FloatArray, p: float) -> FloatArray:
    if p == 1.0:
        return x
    return np.power(x, p)


class Algebra(metaclass=abc.ABCMeta):
    """A non-linear image arithmetic defined through a generative function."""

    name: typing.ClassVar[ModelName]

    @property
    def upper(self) -> float:
        """The open upper bound of the image domain (``inf`` when unbounded)."""
        return 1.0

    @property
    def pixel_max(self) -> float:
        """The largest pixel value the pipeline feeds into this algebra."""
        return self.upper * PIXEL_MAX if np.isfinite(self.upper) else PIXEL_MAX

    @property
    def transform_floor(self) -> float:
        """Transform values at or below this have no preimage (``-inf`` if none)."""
        return -np.inf

    @abc.abstractmethod
    def phi(self, x: npt.ArrayLike) -> FloatArray:
        """Evaluate the generative function (no domain check)."""
        ...

    @abc.abstractmethod
    def phi_inv(self, y: npt.ArrayLike) -> FloatArray:
        """Evaluate the inverse generative function, extended to negative inputs."""
        ...

    @abc.abstractmethod
    def add(self, u: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
        """Add two images in the algebra."""
        ...

    @abc.abstractmethod
    def smul(self, alpha: npt.ArrayLike, u: npt.ArrayLike) -> FloatArray:
        """Multiply an image by a non-negative scalar in the algebra."""
        ...

    def sub(self, u: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
        """Subtract ``v`` from ``u``; the result may be negative.

        The result is the odd pull-back ``sign(d) * phi_inv(|d|)`` of the real
        difference ``d = phi(u) - phi(v)``, so it lies in ``(-upper, upper)`` and
        ``signed_phi(sub(u, v)) + phi(v) == phi(u)``.
        """
        d = self.phi(u) - self.phi(v)
        return np.sign(d) * self.phi_inv(np.abs(d))

    def signed_phi(self, s: npt.ArrayLike) -> FloatArray:
        """Map a signed difference back to transform space (inverse of ``sub``)."""
        s = _as_float(s)
        return np.sign(s) * self.phi(np.abs(s))

    def sum(self, values: typing.Iterable[npt.ArrayLike]) -> FloatArray:
        """Accumulate values with the algebra's addition, in iteration order."""
        iterator = iter(values)
        try:
            total = _as_float(next(iterator))
        except StopIteration:
            raise ValueError("Cannot sum an empty sequence") from None
        for value in iterator:
            total = self.add(total, value)
        return total

    def check_domain(self, x: npt.ArrayLike) -> FloatArray:
        """Validate that ``x`` lies in the image domain ``[0, upper)``.

        Raises
        ------
        DomainError
            If any value is negative, not finite, or not below the upper bound.
        """
        x = _as_float(x)
        bad = ~np.isfinite(x) | (x < 0) | (x >= self.upper)
        if np.any(bad):
            raise DomainError(
                f"{int(np.count_nonzero(bad))} value(s) outside the {self.name} "
                f"domain [0, {self.upper:g})"
            )
        return x

    def check_transform(self, y: npt.ArrayLike) -> FloatArray:
        """Validate that ``y`` lies in the domain of the extended inverse.

        Raises
        ------
        DomainError
            If any value is at or below ``transform_floor`` or is NaN.
        """
        y = _as_float(y)
        bad = np.isnan(y) | (y <= self.transform_floor)
        if np.any(bad):
            raise DomainError(
                f"{int(np.count_nonzero(bad))} transform value(s) at or below "
                f"{self.transform_floor:g} have no {self.name} preimage"
            )
        return y

    def params(self) -> dict[str, typing.Any]:
        """The parameters identifying this algebra, for provenance reports."""
        return {"model": self.name}

    def _close(self, r: FloatArray) -> FloatArray:
        # round-off must not reach the (excluded) upper bound
        return np.minimum(r, _below(self.upper))


@functools.lru_cache(maxsize=None)
def _below(upper: float) -> float:
    return float(np.nextafter(upper, 0.0))


@dataclasses.dataclass(frozen=True)
class LtipAlgebra(Algebra):
    """The logarithmic-type model with ``phi(x) = x / (1 - x)`` on ``[0, 1)``."""

    name: typing.ClassVar[ModelName] = "ltip"

    @property
    def transform_floor(self) -> float:
        return -1.0

    def phi(self, x: npt.ArrayLike) -> FloatArray:
        x = _as_float(x)
        return x / (1.0 - x)

    def phi_inv(self, y: npt.ArrayLike) -> FloatArray:
        y = _as_float(y)
        return self._close(y / (1.0 + y))

    def add(self, u: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
        u, v = _as_float(u), _as_float(v)
        # 1 - (1-u)(1-v)/(1-uv), rearranged to avoid cancellation
        return self._close((u * (1.0 - v) + v * (1.0 - u)) / (1.0 - u * v))

    def smul(self, alpha: npt.ArrayLike, u: npt.ArrayLike) -> FloatArray:
        alpha, u = _as_float(alpha), _as_float(u)
        return self._close(alpha * u / (1.0 + (alpha - 1.0) * u))


@dataclasses.dataclass(frozen=True)
class ParametricLtipAlgebra(Algebra):
    """The parametric extension with ``phi_m(x) = x**m / (1 - x**m)``.

    Parameters
    ----------
    m : float
        The positive exponent. ``m = 1`` reproduces :class:`LtipAlgebra`.
    """

    m: float = 1.0
    name: typing.ClassVar[ModelName] = "parametric"

    def __post_init__(self) -> None:
        if not self.m > 0:
            raise ValueError(f"Invalid value for `m`: {self.m}. Must be positive")

    @property
    def transform_floor(self) -> float:
        return -1.0

    def phi(self, x: npt.ArrayLike) -> FloatArray:
        a = _pow(_as_float(x), self.m)
        return a / (1.0 - a)

    def phi_inv(self, y: npt.ArrayLike) -> FloatArray:
        y = _as_float(y)
        r = y / (1.0 + y)
        if self.m != 1.0:
            r = np.sign(r) * np.power(np.abs(r), 1.0 / self.m)
        return self._close(r)

    def add(self, u: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
        a, b = _pow(_as_float(u), self.m), _pow(_as_float(v), self.m)
        r = (a * (1.0 - b) + b * (1.0 - a)) / (1.0 - a * b)
        return self._close(_pow(r, 1.0 / self.m))

    def smul(self, alpha: npt.ArrayLike, u: npt.ArrayLike) -> FloatArray:
        alpha, u = _as_float(alpha), _as_float(u)
        ratio = alpha / (1.0 + (alpha - 1.0) * _pow(u, self.m))
        return self._close(u * _pow(ratio, 1.0 / self.m))

    def params(self) -> dict[str, typing.Any]:
        return {"model": self.name, "m": self.m}


@dataclasses.dataclass(frozen=True)
class ClassicalLipAlgebra(Algebra):
    """The classical logarithmic model in the gray-tone convention on ``[0, D)``.

    ``phi(x) = -D ln(1 - x/D)``, ``u (+) v = u + v - uv/D`` and
    ``a (x) u = D - D (1 - u/D)**a``.
    """

    d: float = 1.0
    name: typing.ClassVar[ModelName] = "lip"

    def __post_init__(self) -> None:
        if not self.d > 0:
            raise ValueError(f"Invalid value for `d`: {self.d}. Must be positive")

    @property
    def upper(self) -> float:
        return self.d

    def phi(self, x: npt.ArrayLike) -> FloatArray:
        return -self.d * np.log1p(-_as_float(x) / self.d)

    def phi_inv(self, y: npt.ArrayLike) -> FloatArray:
        return self._close(-self.d * np.expm1(-_as_float(y) / self.d))

    def add(self, u: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
        u, v = _as_float(u), _as_float(v)
        return self._close(u + v - u * v / self.d)

    def smul(self, alpha: npt.ArrayLike, u: npt.ArrayLike) -> FloatArray:
        alpha, u = _as_float(alpha), _as_float(u)
        return self._close(-self.d * np.expm1(alpha * np.log1p(-u / self.d)))

    def params(self) -> dict[str, typing.Any]:
        return {"model": self.name, "d": self.d}


@dataclasses.dataclass(frozen=True)
class RealAlgebra(Algebra):
    """Ordinary arithmetic; fusion with it is classic exposure fusion."""

    name: typing.ClassVar[ModelName] = "real"

    @property
    def upper(self) -> float:
        return float("inf")

    def phi(self, x: npt.ArrayLike) -> FloatArray:
        return _as_float(x)

    def phi_inv(self, y: npt.ArrayLike) -> FloatArray:
        return _as_float(y)

    def add(self, u: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
        return _as_float(u) + _as_float(v)

    def smul(self, alpha: npt.ArrayLike, u: npt.ArrayLike) -> FloatArray:
        return _as_float(alpha) * _as_float(u)

    def sub(self, u: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
        return _as_float(u) - _as_float(v)

    def check_domain(self, x: npt.ArrayLike) -> FloatArray:
        x = _as_float(x)
        if not np.all(np.isfinite(x)):
            raise DomainError("Real arithmetic requires finite values")
        return x


LTIP = LtipAlgebra()
LIP = ClassicalLipAlgebra()
REAL = RealAlgebra()


def create_algebra(model: ModelName | str, m: float = 1.0, d: float = 1.0) -> Algebra:
    """Create an algebra by model name.

    Parameters
    ----------
    model : {"ltip", "lip", "parametric", "real"}
        The model name.
    m : float, optional
        The exponent of the parametric model, by default 1.
    d : float, optional
        The upper bound of the classical model, by default 1.

    Returns
    -------
    Algebra
        The algebra.

    Raises
    ------
    ValueError
        If the model name is unknown or a parameter is invalid.
    """
    if model == "ltip":
        return LTIP
    if model == "parametric":
        return ParametricLtipAlgebra(m=float(m))
    if model == "lip":
        return ClassicalLipAlgebra(d=float(d))
    if model == "real":
        return REAL
    raise ValueError(f"Unknown model: {model!r}")


def phi(x: npt.ArrayLike, algebra: Algebra = LTIP) -> FloatArray:
    """Evaluate the generative function of ``algebra``.

    Parameters
    ----------
    x : array_like
        Values in the image domain.
    algebra : Algebra, optional
        The algebra, by default LTIP.

    Returns
    -------
    numpy.ndarray
        The isomorphism image of ``x``.

    Raises
    ------
    DomainError
        If any value is outside the image domain.
    """
    return algebra.phi(algebra.check_domain(x))


def phi_inv(y: npt.ArrayLike, algebra: Algebra = LTIP) -> FloatArray:
    """Evaluate the inverse generative function of ``algebra``.

    Negative inputs are accepted down to the pole of the extended inverse
    (``-1`` for the LTIP models); the sign of the result follows ``y``.

    Raises
    ------
    DomainError
        If any value has no preimage.
    """
    return algebra.phi_inv(algebra.check_transform(y))


def ltip_add(u: npt.ArrayLike, v: npt.ArrayLike, algebra: Algebra = LTIP) -> FloatArray:
    """Add two images with the algebra's addition."""
    return algebra.add(algebra.check_domain(u), algebra.check_domain(v))


def ltip_smul(
    alpha: npt.ArrayLike, u: npt.ArrayLike, algebra: Algebra = LTIP
) -> FloatArray:
    """Multiply an image by a non-negative scalar with the algebra's multiplication.

    Raises
    ------
    DomainError
        If ``alpha`` is negative or ``u`` is outside the image domain.
    """
    alpha = _as_float(alpha)
    if np.any(alpha < 0) or not np.all(np.isfinite(alpha)):
        raise DomainError("Scalar factors must be finite and non-negative")
    return algebra.smul(alpha, algebra.check_domain(u))


def ltip_sub(u: npt.ArrayLike, v: npt.ArrayLike, algebra: Algebra = LTIP) -> FloatArray:
    """Subtract ``v`` from ``u``; see :meth:`Algebra.sub`."""
    return algebra.sub(algebra.check_domain(u), algebra.check_domain(v))
