from __future__ import annotations

import json
import math
import typing

import numpy as np
import pytest

from ltiphdr._algebra import REAL
from ltiphdr._errors import ShapeError
from ltiphdr._fusion import FusionConfig, fuse
from ltiphdr._irradiance import IrradianceMap
from ltiphdr._metrics import (
    NaturalnessParams,
    QualityReport,
    QualityWeights,
    assess_quality,
    normalize_log_hdr,
    overall_quality,
    rmse_to_baseline,
    ssim,
    ssim_map,
    ssim_to_baseline,
    statistical_naturalness,
    structural_fidelity,
)
from ltiphdr._synthetic import synthetic_bracket, synthetic_scene


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(11)


@pytest.mark.parametrize(
    "s, n, expected",
    [
        (1.0, 1.0, 1.0),
        (1.0, 0.0, 0.8012),
        (0.0, 0.0, 0.0),
    ],
)
def test_overall_quality(s: float, n: float, expected: float) -> None:
    assert overall_quality(s, n) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("s, n", [(-0.1, 0.5), (0.5, 1.1)])
def test_overall_quality_rejects_out_of_range(s: float, n: float) -> None:
    with pytest.raises(ValueError):
        overall_quality(s, n)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"a": 1.5},
        {"alpha": 0.0},
        {"beta": -1.0},
    ],
)
def test_quality_weights_reject(kwargs: dict[str, float]) -> None:
    with pytest.raises(ValueError):
        QualityWeights(**kwargs)


def test_naturalness_params_reject() -> None:
    with pytest.raises(ValueError):
        NaturalnessParams(mean_spread=0.0)


def test_ssim_self_comparison(rng: np.random.Generator) -> None:
    plane = rng.uniform(size=(40, 40))
    assert ssim(plane, plane) == pytest.approx(1.0, abs=1e-9)


def test_ssim_map_crops_border(rng: np.random.Generator) -> None:
    plane = rng.uniform(size=(40, 30))
    assert ssim_map(plane, plane).shape == (30, 20)
    assert ssim_map(plane[:8, :8], plane[:8, :8]).shape == (8, 8)


def test_ssim_drops_with_distortion(rng: np.random.Generator) -> None:
    plane = rng.uniform(size=(40, 40))
    noisy = np.clip(plane + rng.normal(scale=0.2, size=plane.shape), 0.0, 1.0)
    assert ssim(plane, noisy) < 0.99
    assert ssim(plane, 0.5 * plane + 0.25) < 0.99
    assert ssim(plane, 1.0 - plane) < 0.0


def test_ssim_errors(rng: np.random.Generator) -> None:
    plane = rng.uniform(size=(16, 16))
    with pytest.raises(ShapeError):
        ssim(plane, plane[:, :15])
    with pytest.raises(ValueError):
        ssim(plane, plane, window=4)


def test_normalize_log_hdr() -> None:
    hdr = IrradianceMap(np.array([[0.0, 1.0], [10.0, 1000.0]]))
    normalized = normalize_log_hdr(hdr)
    assert normalized.min() == 0.0
    assert normalized.max() == 1.0
    assert np.all(np.diff(normalized.ravel()) > 0)
    np.testing.assert_array_equal(normalize_log_hdr(np.full((4, 4), 3.0)), 0.0)


def test_structural_fidelity_of_the_reference_itself(rng: np.random.Generator) -> None:
    hdr = IrradianceMap(rng.uniform(0.0, 1e3, size=(32, 32, 3)))
    ldr = normalize_log_hdr(hdr)
    assert structural_fidelity(ldr, hdr) == pytest.approx(1.0, abs=1e-9)
    assert 0.0 <= structural_fidelity(1.0 - ldr, hdr) < 0.5
    with pytest.raises(ShapeError):
        structural_fidelity(ldr[:16], hdr)


def test_statistical_naturalness() -> None:
    natural = np.tile([0.25, 0.75], (8, 4))
    assert statistical_naturalness(natural) == pytest.approx(1.0, abs=1e-12)
    flat = np.full((8, 8), 0.5)
    assert statistical_naturalness(flat) == pytest.approx(math.exp(-3.125), rel=1e-12)
    dark = np.tile([0.0, 0.1], (8, 4))
    assert statistical_naturalness(dark) < statistical_naturalness(flat)


@pytest.mark.parametrize(
    "offset, rmse",
    [
        (0.1, 0.1),
        (0.25, 0.25),
    ],
)
def test_rmse_to_baseline(offset: float, rmse: float) -> None:
    baseline = np.full((8, 8, 3), 0.5)
    value, log_value = rmse_to_baseline(baseline + offset, baseline)
    assert value == pytest.approx(rmse, abs=1e-12)
    assert log_value == pytest.approx(math.log(rmse), abs=1e-9)


def test_rmse_of_identical_images() -> None:
    image = np.full((4, 4), 0.3)
    assert rmse_to_baseline(image, image) == (0.0, -math.inf)
    with pytest.raises(ShapeError):
        rmse_to_baseline(image, image[:2])


def test_assess_quality_recomposes(rng: np.random.Generator) -> None:
    hdr = IrradianceMap(rng.uniform(0.0, 1e3, size=(32, 32, 3)))
    test = rng.uniform(size=(32, 32, 3))
    weights = QualityWeights()
    report = assess_quality(test, hdr=hdr, weights=weights)
    assert report.s is not None and report.q is not None
    recomposed = weights.a * report.s**weights.alpha + (1 - weights.a) * (
        report.n**weights.beta
    )
    assert report.q == pytest.approx(recomposed, abs=1e-12)
    assert report.rmse is None
    assert report.ssim_to_baseline is None


def test_assess_quality_against_baseline(rng: np.random.Generator) -> None:
    test = rng.uniform(size=(24, 24, 3))
    report = assess_quality(test, baseline=test)
    assert report.s is None and report.q is None
    assert report.rmse == 0.0
    assert report.ssim_to_baseline == pytest.approx(1.0, abs=1e-9)

    payload = report.to_dict()
    assert sorted(payload) == ["log_rmse", "n", "params", "q", "rmse", "s", "ssim"]
    assert payload["log_rmse"] == "-inf"
    assert payload["params"]["a"] == 0.8012
    assert payload["params"]["window"] == 11
    assert "naturalness_defaults" in payload["params"]
    json.dumps(payload, allow_nan=False)


def test_quality_report_serializes_finite_values() -> None:
    report = QualityReport(n=0.5, rmse=0.1, log_rmse=math.log(0.1))
    assert report.to_dict()["log_rmse"] == pytest.approx(math.log(0.1))


def test_ssim_to_baseline_uses_luminance(rng: np.random.Generator) -> None:
    gray = rng.uniform(size=(24, 24))
    color = np.repeat(gray[..., np.newaxis], 3, axis=-1)
    assert ssim_to_baseline(color, gray) == pytest.approx(1.0, abs=1e-9)


def test_fusion_is_closer_to_baseline_than_corrupted_variants() -> None:
    frames = synthetic_bracket(synthetic_scene(64, 64, seed=5), (0.5, 1.0, 2.0))
    fused = fuse(frames)
    baseline = fuse(frames, config=FusionConfig(algebra=REAL))

    rmse, _ = rmse_to_baseline(fused, baseline)
    for variant in (fused**2.2, 1.0 - fused):
        assert rmse < rmse_to_baseline(variant, baseline)[0]


def test_ssim_of_constant_planes_is_the_luminance_term() -> None:
    x, y = np.full((20, 20), 0.3), np.full((20, 20), 0.5)
    expected = (2 * 0.3 * 0.5 + 0.01**2) / (0.3**2 + 0.5**2 + 0.01**2)
    assert ssim(x, y) == pytest.approx(expected, rel=1e-9)


def test_ssim_is_symmetric(rng: np.random.Generator) -> None:
    x, y = rng.uniform(size=(2, 32, 32))
    assert ssim(x, y) == pytest.approx(ssim(y, x), abs=1e-12)


def test_ssim_to_baseline_of_independent_noise(rng: np.random.Generator) -> None:
    test, baseline = rng.uniform(size=(2, 64, 64, 3))
    assert abs(ssim_to_baseline(test, baseline)) < 0.1


def test_ssim_to_baseline_of_slightly_noisy_copy(rng: np.random.Generator) -> None:
    baseline = rng.uniform(size=(64, 64, 3))
    test = np.clip(baseline + rng.normal(scale=1e-3, size=baseline.shape), 0.0, 1.0)
    assert ssim_to_baseline(test, baseline) > 0.99


@pytest.mark.parametrize(
    "transform",
    [np.fliplr, np.flipud, lambda a: np.swapaxes(a, 0, 1)],
    ids=["horizontal", "vertical", "transpose"],
)
def test_structural_fidelity_under_shared_mirroring(
    transform: typing.Callable[[np.ndarray], np.ndarray], rng: np.random.Generator
) -> None:
    hdr = rng.uniform(0.0, 1e3, size=(32, 40, 3))
    base = normalize_log_hdr(hdr)[..., np.newaxis] ** 0.8
    ldr = np.clip(base + rng.uniform(0.0, 0.05, size=hdr.shape), 0.0, 1.0)
    expected = structural_fidelity(ldr, IrradianceMap(hdr))
    mirrored = structural_fidelity(transform(ldr), IrradianceMap(transform(hdr)))
    assert mirrored == pytest.approx(expected, abs=1e-12)


def test_statistical_naturalness_ignores_pixel_order(rng: np.random.Generator) -> None:
    image = rng.uniform(size=(24, 16, 3))
    pixels = image.reshape(-1, 3)
    shuffled = pixels[rng.permutation(pixels.shape[0])].reshape(image.shape)
    assert statistical_naturalness(shuffled) == pytest.approx(
        statistical_naturalness(image), rel=1e-12
    )
    assert statistical_naturalness(shuffled.reshape(16, 24, 3)) == pytest.approx(
        statistical_naturalness(image), rel=1e-12
    )


def test_statistical_naturalness_of_black_is_low() -> None:
    assert statistical_naturalness(np.zeros((16, 16, 3))) < 0.1
    assert statistical_naturalness(np.zeros((16, 16))) < 0.1


def test_overall_quality_is_monotone() -> None:
    grid = np.linspace(0.0, 1.0, 21)
    q = np.array([[overall_quality(s, n) for n in grid] for s in grid])
    assert np.all(np.diff(q, axis=0) > 0)
    assert np.all(np.diff(q, axis=1) > 0)
    custom = QualityWeights(a=0.5, alpha=2.0, beta=0.5)
    q = np.array([[overall_quality(s, n, custom) for n in grid] for s in grid])
    assert np.all(np.diff(q, axis=0) > 0)
    assert np.all(np.diff(q, axis=1) > 0)
