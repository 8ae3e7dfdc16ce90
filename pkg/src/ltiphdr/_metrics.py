"""Quality scores for fused images.

Structural fidelity is single-scale SSIM against a log-mapped HDR reference,
naturalness scores the global luminance statistics, and the two combine into
``Q = a S**alpha + (1 - a) N**beta``.
"""

from __future__ import annotations

import dataclasses
import math
import typing

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from ltiphdr._errors import ShapeError
from ltiphdr._image import luminance
from ltiphdr._irradiance import IrradianceMap

__all__ = [
    "NaturalnessParams",
    "QualityReport",
    "QualityWeights",
    "assess_quality",
    "normalize_log_hdr",
    "overall_quality",
    "rmse_to_baseline",
    "ssim",
    "ssim_map",
    "ssim_to_baseline",
    "statistical_naturalness",
    "structural_fidelity",
]

FloatArray = npt.NDArray[np.float64]

SSIM_SIGMA = 1.5
C1 = 0.01**2
C2 = 0.03**2
_RMSE_FLOOR = 1e-12


@dataclasses.dataclass(frozen=True)
class QualityWeights:
    """Coefficients combining structural fidelity and naturalness."""

    a: float = 0.8012
    alpha: float = 0.3046
    beta: float = 0.7088

    def __post_init__(self) -> None:
        if not 0 <= self.a <= 1:
            raise ValueError(f"Invalid value for `a`: {self.a}. Must be in [0, 1]")
        if not self.alpha > 0:
            raise ValueError(f"Invalid value for `alpha`: {self.alpha}. Must be > 0")
        if not self.beta > 0:
            raise ValueError(f"Invalid value for `beta`: {self.beta}. Must be > 0")

    def to_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class NaturalnessParams:
    """Centers and spreads of the Gaussians scoring luminance mean and spread.

    These are implementation defaults, not calibrated values.
    """

    mean_center: float = 0.5
    mean_spread: float = 0.2
    std_center: float = 0.25
    std_spread: float = 0.1

    def __post_init__(self) -> None:
        if not (self.mean_spread > 0 and self.std_spread > 0):
            raise ValueError("Invalid value for `mean_spread`/`std_spread`. Must be > 0")

    def to_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


def _check_same_shape(a: FloatArray, b: FloatArray, what: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what}: shapes {a.shape} and {b.shape} differ")


def _mean(values: FloatArray) -> float:
    return math.fsum(values.ravel()) / values.size


def ssim_map(x: npt.ArrayLike, y: npt.ArrayLike, window: int = 11) -> FloatArray:
    """Local SSIM of two planes with a Gaussian window (sigma 1.5).

    Parameters
    ----------
    x, y : array_like
        2-D planes on the unit range.
    window : int, optional
        Odd window width, by default 11.

    Returns
    -------
    numpy.ndarray
        The SSIM map. When the planes are larger than the window, the border
        where the window leaves the image is cropped.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"Invalid value for `window`: {window}. Must be odd and >= 3")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_same_shape(x, y, "SSIM")
    radius = window // 2

    def blur(plane: FloatArray) -> FloatArray:
        return ndimage.gaussian_filter(
            plane, SSIM_SIGMA, mode="reflect", truncate=radius / SSIM_SIGMA
        )

    mu_x, mu_y = blur(x), blur(y)
    sigma_xx = blur(x * x) - mu_x * mu_x
    sigma_yy = blur(y * y) - mu_y * mu_y
    sigma_xy = blur(x * y) - mu_x * mu_y
    numerator = (2.0 * mu_x * mu_y + C1) * (2.0 * sigma_xy + C2)
    denominator = (mu_x * mu_x + mu_y * mu_y + C1) * (sigma_xx + sigma_yy + C2)
    result = numerator / denominator
    if x.shape[0] > window and x.shape[1] > window:
        result = result[radius:-radius, radius:-radius]
    return result


def ssim(x: npt.ArrayLike, y: npt.ArrayLike, window: int = 11) -> float:
    """Mean SSIM of two planes, summed with compensated summation."""
    return _mean(ssim_map(x, y, window))


def normalize_log_hdr(hdr: IrradianceMap | npt.ArrayLike) -> FloatArray:
    """Map irradiance luminance through ``ln(1 + E)`` and rescale to ``[0, 1]``.

    A constant map normalizes to zeros.
    """
    values = hdr.values if isinstance(hdr, IrradianceMap) else np.asarray(hdr, float)
    mapped = np.log1p(luminance(values))
    lo, hi = float(mapped.min()), float(mapped.max())
    if hi <= lo:
        return np.zeros_like(mapped)
    return (mapped - lo) / (hi - lo)


def structural_fidelity(
    ldr: npt.ArrayLike, hdr: IrradianceMap | npt.ArrayLike, window: int = 11
) -> float:
    """SSIM between the LDR luminance and the normalized log-HDR luminance.

    Parameters
    ----------
    ldr : array_like
        The tone-mapped or fused image.
    hdr : IrradianceMap or array_like
        The reference irradiance.
    window : int, optional
        Odd SSIM window width, by default 11.

    Returns
    -------
    float
        The mean SSIM clipped to ``[0, 1]``.

    Raises
    ------
    ShapeError
        If the image sizes differ.
    """
    ldr_lum = luminance(ldr)
    reference = normalize_log_hdr(hdr)
    _check_same_shape(ldr_lum, reference, "structural fidelity")
    return min(1.0, max(0.0, ssim(ldr_lum, reference, window)))


def statistical_naturalness(
    ldr: npt.ArrayLike, params: NaturalnessParams = NaturalnessParams()
) -> float:
    """Score how close the global luminance mean and spread are to natural values.

    The product of two unnormalized Gaussians at the luminance mean and standard
    deviation; 1 when both sit at their centers.
    """
    lum = luminance(ldr)
    mean = _mean(lum)
    std = math.sqrt(_mean((lum - mean) ** 2))
    return math.exp(
        -((mean - params.mean_center) ** 2) / (2.0 * params.mean_spread**2)
    ) * math.exp(-((std - params.std_center) ** 2) / (2.0 * params.std_spread**2))


def overall_quality(
    s: float, n: float, weights: QualityWeights = QualityWeights()
) -> float:
    """Combine fidelity and naturalness as ``a * s**alpha + (1 - a) * n**beta``."""
    if not (0 <= s <= 1 and 0 <= n <= 1):
        raise ValueError(f"Scores must be in [0, 1], got s={s}, n={n}")
    return weights.a * s**weights.alpha + (1.0 - weights.a) * n**weights.beta


def rmse_to_baseline(test: npt.ArrayLike, baseline: npt.ArrayLike) -> tuple[float, float]:
    """Root mean square difference over all pixels and channels, and its log.

    Returns
    -------
    rmse : float
        The root mean square difference.
    log_rmse : float
        ``ln(rmse)``, or ``-inf`` when the rmse is below ``1e-12``.
    """
    test = np.asarray(test, dtype=np.float64)
    baseline = np.asarray(baseline, dtype=np.float64)
    _check_same_shape(test, baseline, "rmse")
    rmse = math.sqrt(_mean((test - baseline) ** 2))
    log_rmse = math.log(rmse) if rmse >= _RMSE_FLOOR else -math.inf
    return rmse, log_rmse


def ssim_to_baseline(
    test: npt.ArrayLike, baseline: npt.ArrayLike, window: int = 11
) -> float:
    """Mean SSIM between the luminances of two images, in ``[-1, 1]``."""
    test_lum, baseline_lum = luminance(test), luminance(baseline)
    _check_same_shape(test_lum, baseline_lum, "SSIM to baseline")
    return ssim(test_lum, baseline_lum, window)


def _json_float(value: float | None) -> float | str | None:
    if value is not None and math.isinf(value):
        return "-inf" if value < 0 else "inf"
    return value


@dataclasses.dataclass(frozen=True)
class QualityReport:
    """Scores of one image; absent entries had no reference to compare with."""

    n: float
    s: float | None = None
    q: float | None = None
    rmse: float | None = None
    log_rmse: float | None = None
    ssim_to_baseline: float | None = None
    params: dict[str, typing.Any] = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict[str, typing.Any]:
        return {
            "s": self.s,
            "n": self.n,
            "q": self.q,
            "rmse": self.rmse,
            "log_rmse": _json_float(self.log_rmse),
            "ssim": self.ssim_to_baseline,
            "params": self.params,
        }


def assess_quality(
    test: npt.ArrayLike,
    hdr: IrradianceMap | npt.ArrayLike | None = None,
    baseline: npt.ArrayLike | None = None,
    weights: QualityWeights = QualityWeights(),
    naturalness: NaturalnessParams = NaturalnessParams(),
    window: int = 11,
) -> QualityReport:
    """Score an image against whichever references are supplied.

    Parameters
    ----------
    test : array_like
        The image being scored.
    hdr : IrradianceMap or array_like, optional
        An irradiance reference; enables ``s`` and ``q``.
    baseline : array_like, optional
        A baseline rendering; enables ``rmse``, ``log_rmse`` and ``ssim``.
    weights, naturalness : optional
        Metric parameters, echoed in the report.
    window : int, optional
        SSIM window width.

    Returns
    -------
    QualityReport
        The scores.
    """
    n = statistical_naturalness(test, naturalness)
    s = q = rmse = log_rmse = ssim_value = None
    if hdr is not None:
        s = structural_fidelity(test, hdr, window)
        q = overall_quality(s, n, weights)
    if baseline is not None:
        rmse, log_rmse = rmse_to_baseline(test, baseline)
        ssim_value = ssim_to_baseline(test, baseline, window)
    params = {
        **weights.to_dict(),
        **naturalness.to_dict(),
        "window": window,
        "naturalness_defaults": "implementation defaults, not calibrated",
    }
    return QualityReport(
        n=n,
        s=s,
        q=q,
        rmse=rmse,
        log_rmse=log_rmse,
        ssim_to_baseline=ssim_value,
        params=params,
    )
