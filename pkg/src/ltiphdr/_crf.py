"""Comparison of measured camera response curves with the inverse generative function.

Response curves come in the DoRF text layout, repeated records of::

    <name>
    <type>
    I =
    <irradiance samples ...>
    B =
    <brightness samples ...>

Samples may follow the ``=`` on the same line or on the following lines.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import pathlib
import typing

import numpy as np
import numpy.typing as npt
from scipy import optimize

from ltiphdr._algebra import LTIP, Algebra
from ltiphdr._errors import DorfError
from ltiphdr._parallel import map_units
from ltiphdr._protocols import PoolProtocol

__all__ = [
    "CrfCurve",
    "CrfFit",
    "CrfReport",
    "compare_crf",
    "fit_gain",
    "format_dorf",
    "load_dorf",
    "parse_dorf",
    "synthetic_curve",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

_MONOTONE_TOLERANCE = 1e-6
_LOG_GAIN_BOUNDS = (math.log(1e-4), math.log(1e4))
_GRID_POINTS = 161


@dataclasses.dataclass(frozen=True, eq=False)
class CrfCurve:
    """A sampled camera response: brightness as a function of irradiance.

    Raises
    ------
    DorfError
        If the sample counts differ, there are fewer than two samples, values
        leave ``[0, 1]``, or either column decreases.
    """

    name: str
    irradiance: FloatArray
    intensity: FloatArray
    kind: str = ""

    def __post_init__(self) -> None:
        irradiance = np.asarray(self.irradiance, dtype=np.float64)
        intensity = np.asarray(self.intensity, dtype=np.float64)
        if irradiance.ndim != 1 or irradiance.shape != intensity.shape:
            raise DorfError(
                f"{irradiance.size} irradiance and {intensity.size} intensity samples"
            )
        if irradiance.size < 2:
            raise DorfError("fewer than two samples")
        if not (np.all(np.isfinite(irradiance)) and np.all(np.isfinite(intensity))):
            raise DorfError("non-finite samples")
        if irradiance.min() < 0 or intensity.min() < 0 or intensity.max() > 1:
            raise DorfError("samples outside [0, 1]")
        if np.any(np.diff(irradiance) < 0):
            raise DorfError("decreasing irradiance samples")
        if np.any(np.diff(intensity) < -_MONOTONE_TOLERANCE):
            raise DorfError("decreasing intensity samples")
        object.__setattr__(self, "irradiance", irradiance)
        object.__setattr__(self, "intensity", intensity)

    def __len__(self) -> int:
        return int(self.irradiance.size)


def _numbers(tokens: list[str]) -> list[float] | None:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        return None


def _is_marker(line: str, key: str) -> bool:
    head, sep, _ = line.partition("=")
    return bool(sep) and head.strip() == key


def _read_samples(lines: list[str], start: int, key: str) -> tuple[list[float], int]:
    # the marker line, then numeric lines until anything else
    samples = _numbers(lines[start].partition("=")[2].split())
    if samples is None:
        raise DorfError(f"non-numeric {key} samples")
    i = start + 1
    while i < len(lines):
        more = _numbers(lines[i].split())
        if more is None:
            break
        samples.extend(more)
        i += 1
    return samples, i


def parse_dorf(text: str) -> tuple[list[CrfCurve], list[tuple[str, str]]]:
    """Parse DoRF text into curves, skipping malformed records.

    Parameters
    ----------
    text : str
        The file contents.

    Returns
    -------
    curves : list of CrfCurve
        The valid curves in file order.
    skipped : list of tuple of str
        ``(name, reason)`` for every record that was skipped.
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    curves: list[CrfCurve] = []
    skipped: list[tuple[str, str]] = []

    header: list[str] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        if not _is_marker(line, "I"):
            if _is_marker(line, "B"):
                skipped.append((header[0] if header else "?", "B = without I ="))
                _, i = _read_samples(lines, i, "B")
                header = []
                continue
            header.append(line)
            i += 1
            continue

        name = header[-2] if len(header) >= 2 else (header[-1] if header else "?")
        kind = header[-1] if len(header) >= 2 else ""
        if len(header) > 2:
            logger.debug("ignoring %d line(s) before %r", len(header) - 2, name)
        header = []
        start = i
        try:
            irradiance, i = _read_samples(lines, i, "I")
            if i >= len(lines) or not _is_marker(lines[i], "B"):
                raise DorfError("missing B = line")
            intensity, i = _read_samples(lines, i, "B")
            curves.append(CrfCurve(name, np.array(irradiance), np.array(intensity), kind))
        except DorfError as e:
            skipped.append((name, str(e)))
            logger.warning("skipping response curve %r: %s", name, e)
            i = max(i, start + 1)
            while i < len(lines) and not _is_marker(lines[i], "I"):
                i += 1
            # keep the two lines before the next record as its header
            if i < len(lines):
                header = lines[max(0, i - 2) : i]
    for name, reason in skipped:
        logger.debug("skipped %r: %s", name, reason)
    return curves, skipped


def load_dorf(path: str | pathlib.Path) -> list[CrfCurve]:
    """Load response curves from a DoRF text file.

    Raises
    ------
    DorfError
        If the file cannot be read or holds no valid curve.
    """
    try:
        text = pathlib.Path(path).read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise DorfError(f"Cannot read response curves from {path}: {e}") from e
    curves, skipped = parse_dorf(text)
    if not curves:
        raise DorfError(f"{path}: zero parseable curves ({len(skipped)} skipped)")
    if skipped:
        logger.warning("%s: skipped %d malformed curve(s)", path, len(skipped))
    return curves


def format_dorf(curves: typing.Iterable[CrfCurve]) -> str:
    """Write curves in the DoRF text layout read by :func:`parse_dorf`."""
    records = []
    for curve in curves:
        records.append(
            f"{curve.name}\n{curve.kind or 'graph'}\n"
            f"I =\n{' '.join(f'{v:.9e}' for v in curve.irradiance)}\n"
            f"B =\n{' '.join(f'{v:.9e}' for v in curve.intensity)}\n"
        )
    return "".join(records)


def synthetic_curve(
    gain: float, algebra: Algebra = LTIP, samples: int = 1024, name: str | None = None
) -> CrfCurve:
    """The model response ``phi_inv(gain * E)`` sampled on ``E`` in ``[0, 1]``."""
    irradiance = np.linspace(0.0, 1.0, samples)
    return CrfCurve(
        name or f"synthetic k={gain:g}",
        irradiance,
        algebra.phi_inv(gain * irradiance),
        kind="synthetic",
    )


@dataclasses.dataclass(frozen=True)
class CrfFit:
    """The best gain for one curve and the remaining error."""

    name: str
    gain: float
    rmse: float

    def to_dict(self) -> dict[str, typing.Any]:
        return dataclasses.asdict(self)


def _rmse(residual: FloatArray) -> float:
    return math.sqrt(math.fsum(residual * residual) / residual.size)


def fit_gain(curve: CrfCurve, algebra: Algebra = LTIP) -> CrfFit:
    """Fit ``k`` so that ``phi_inv(k * E)`` best matches the curve in the RMSE sense.

    The search scans a logarithmic grid of gains in ``[1e-4, 1e4]`` and refines
    the best grid point with a bounded Brent search in ``log k``.
    """
    irradiance, intensity = curve.irradiance, curve.intensity

    def mse(log_gain: float) -> float:
        residual = intensity - algebra.phi_inv(math.exp(log_gain) * irradiance)
        return float(np.mean(residual * residual))

    grid = np.linspace(*_LOG_GAIN_BOUNDS, _GRID_POINTS)
    best = int(np.argmin([mse(t) for t in grid]))
    lo, hi = grid[max(best - 1, 0)], grid[min(best + 1, grid.size - 1)]
    result = optimize.minimize_scalar(
        mse, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    log_gain = float(result.x) if mse(result.x) <= mse(grid[best]) else float(grid[best])
    gain = math.exp(log_gain)
    rmse = _rmse(intensity - algebra.phi_inv(gain * irradiance))
    return CrfFit(curve.name, gain, rmse)


def _average_curve(curves: list[CrfCurve]) -> CrfCurve:
    grid = curves[0].irradiance
    total = np.zeros_like(grid)
    for curve in curves:
        total += np.interp(grid, curve.irradiance, curve.intensity)
    return CrfCurve("average", grid, total / len(curves), kind="average")


@dataclasses.dataclass(frozen=True)
class CrfReport:
    """Fits of every curve, of their pointwise average, and the closest curve."""

    fits: tuple[CrfFit, ...]
    average: CrfFit
    best: CrfFit
    params: dict[str, typing.Any] = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict[str, typing.Any]:
        return {
            "curves": [fit.to_dict() for fit in self.fits],
            "average": self.average.to_dict(),
            "best": self.best.to_dict(),
            "params": self.params,
        }


def compare_crf(
    curves: typing.Sequence[CrfCurve],
    algebra: Algebra = LTIP,
    pool: PoolProtocol | None = None,
) -> CrfReport:
    """Gain-fit every curve and their average to the algebra's inverse function.

    Parameters
    ----------
    curves : sequence of CrfCurve
        The measured curves.
    algebra : Algebra, optional
        The model, by default LTIP.
    pool : PoolProtocol, optional
        Fits one curve per work unit.

    Returns
    -------
    CrfReport
        Per-curve gains and RMSE, the average-curve fit and the best match.

    Raises
    ------
    DorfError
        If no curves are given.
    """
    curves = list(curves)
    if not curves:
        raise DorfError("No response curves to compare")
    fits = map_units(pool, lambda curve: fit_gain(curve, algebra), curves)
    average = fit_gain(_average_curve(curves), algebra)
    best = min(fits, key=lambda fit: fit.rmse)
    logger.debug("fitted %d curves, best %r rmse=%.3e", len(fits), best.name, best.rmse)
    return CrfReport(tuple(fits), average, best, params=algebra.params())
