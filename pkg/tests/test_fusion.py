from __future__ import annotations

import time
import typing

import numpy as np
import pytest

from ltiphdr._algebra import LIP, LTIP, PIXEL_MAX, REAL, Algebra, ParametricLtipAlgebra
from ltiphdr._errors import FusionError
from ltiphdr._fusion import (
    FusionConfig,
    build_pyramids,
    from_transform_space,
    fuse,
    fuse_flat,
    fuse_flat_algebraic,
    fuse_pyramid,
    to_transform_space,
)
from ltiphdr._image import as_frame_stack, pixels_to_codes
from ltiphdr._synthetic import synthetic_bracket, synthetic_scene
from ltiphdr._weights import WeightParams, WeightStack, compute_weights, normalize_stack

KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


def _frames(rng: np.random.Generator, n: int, shape: tuple[int, ...]) -> list[np.ndarray]:
    return [rng.uniform(0.0, 0.95, size=shape) for _ in range(n)]


def _stack(frames: list[np.ndarray]) -> WeightStack:
    return normalize_stack(compute_weights(as_frame_stack(frames), WeightParams()))


def test_fuse_flat_example() -> None:
    frames = [np.full((4, 4), 0.5), np.full((4, 4), 2.0 / 3.0)]
    stack = WeightStack(np.full((2, 4, 4), 0.5), normalized=True)
    np.testing.assert_allclose(fuse_flat(frames, stack), 0.6, atol=1e-12)


def test_fuse_flat_normalizes_raw_weights() -> None:
    frames = [np.full((4, 4), 0.5), np.full((4, 4), 2.0 / 3.0)]
    raw = WeightStack(np.full((2, 4, 4), 3.0))
    np.testing.assert_allclose(fuse_flat(frames, raw), 0.6, atol=1e-12)


@pytest.mark.parametrize(
    "value, expected",
    [
        (0.0, 0.0),
        (0.5, 1.0),
    ],
)
def test_to_transform_space_examples(value: float, expected: float) -> None:
    plane = to_transform_space(np.full((3, 3), value))
    np.testing.assert_array_equal(plane, np.full((3, 3), expected))


def test_transform_space_round_trip(rng: np.random.Generator) -> None:
    frame = rng.uniform(0.0, PIXEL_MAX, size=(32, 32, 3))
    for algebra in (LTIP, ParametricLtipAlgebra(m=2.0), REAL):
        back = from_transform_space(to_transform_space(frame, algebra), algebra)
        np.testing.assert_allclose(back, frame, atol=1e-12, rtol=0)


@pytest.mark.parametrize("mode", ["flat", "pyramid"])
def test_single_frame_is_returned(mode: str, rng: np.random.Generator) -> None:
    frame = rng.uniform(0.0, 0.95, size=(64, 64, 3))
    fused = fuse([frame], config=FusionConfig(mode=mode))
    np.testing.assert_allclose(fused, frame, atol=1e-6, rtol=0)


def test_single_mid_gray_frame() -> None:
    frame = np.full((16, 16), 0.5)
    np.testing.assert_allclose(fuse([frame]), frame, atol=1e-12)


@pytest.mark.parametrize("mode", ["flat", "pyramid"])
def test_identical_frames_fuse_to_themselves(mode: str, rng: np.random.Generator) -> None:
    frame = rng.uniform(0.0, 0.95, size=(48, 40, 3))
    fused = fuse([frame, frame, frame], config=FusionConfig(mode=mode))
    np.testing.assert_allclose(fused, frame, atol=1e-6, rtol=0)


def test_fuse_flat_is_convex_in_transform_space(rng: np.random.Generator) -> None:
    frames = _frames(rng, 4, (32, 32, 3))
    fused = fuse_flat(frames, _stack(frames))
    planes = LTIP.phi(np.stack(frames))
    value = LTIP.phi(fused)
    assert np.all(value >= planes.min(axis=0) - 1e-8)
    assert np.all(value <= planes.max(axis=0) + 1e-8)


@pytest.mark.parametrize(
    "mode, n, atol",
    [
        ("flat", 2, 0.0),
        ("pyramid", 2, 0.0),
        ("flat", 5, 1e-12),
        ("pyramid", 5, 1e-12),
    ],
)
def test_frame_order_does_not_matter(
    mode: str, n: int, atol: float, rng: np.random.Generator
) -> None:
    frames = _frames(rng, n, (32, 48, 3))
    config = FusionConfig(mode=mode)
    forward = fuse(frames, config=config)
    backward = fuse(frames[::-1], config=config)
    np.testing.assert_allclose(forward, backward, atol=atol, rtol=0)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_algebraic_and_transform_fusion_agree(n: int, rng: np.random.Generator) -> None:
    frames = _frames(rng, n, (24, 24, 3))
    raw = compute_weights(as_frame_stack(frames), WeightParams())
    direct = fuse_flat_algebraic(frames, raw, LTIP)
    via_transform = fuse_flat(frames, raw)
    assert np.max(np.abs(direct - via_transform)) <= 1e-8


def test_fuse_flat_algebraic_rejects_bad_weights() -> None:
    frames = [np.full((4, 4), 0.2), np.full((4, 4), 0.4)]
    with pytest.raises(FusionError):
        fuse_flat_algebraic(frames, np.ones((3, 4, 4)))
    with pytest.raises(FusionError):
        fuse_flat_algebraic(frames, -np.ones((2, 4, 4)))


def test_fusion_errors() -> None:
    with pytest.raises(FusionError):
        fuse([])
    with pytest.raises(FusionError):
        fuse([np.zeros((4, 4)), np.zeros((4, 5))])
    with pytest.raises(FusionError):
        fuse([np.zeros((1, 8))])
    frames = [np.zeros((4, 4)), np.zeros((4, 4))]
    with pytest.raises(FusionError):
        fuse_flat(frames, WeightStack(np.ones((3, 4, 4))))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mode": "tiled"},
        {"levels": 0},
        {"workers": 0},
    ],
)
def test_fusion_config_rejects(kwargs: dict[str, object]) -> None:
    with pytest.raises(ValueError):
        FusionConfig(**kwargs)  # type: ignore[arg-type]


def test_fusion_config_to_dict() -> None:
    assert FusionConfig(levels=3).to_dict() == {
        "model": "ltip",
        "mode": "pyramid",
        "levels": 3,
        "wc_exponent": 1.0,
        "ws_exponent": 1.0,
        "we_exponent": 1.0,
        "mu": 0.37,
        "sigma2": 0.2,
        "lut": False,
        "lut_resolution": 65536,
        "workers": 1,
    }
    assert FusionConfig().to_dict()["levels"] == "auto"


def test_build_pyramids_layout(rng: np.random.Generator) -> None:
    frames = _frames(rng, 3, (64, 48, 3))
    pyramids = build_pyramids(frames, _stack(frames), FusionConfig(levels=4))
    assert pyramids.levels == 4
    assert pyramids.base_shape == (64, 48, 3)
    assert len(pyramids.bands) == 3
    assert all(len(channels) == 3 for channels in pyramids.bands)
    assert [w.kind for w in pyramids.weights] == ["lowpass"] * 3
    # band-pass pyramids hold transform-space coefficients
    band = pyramids.bands[0][1]
    np.testing.assert_allclose(
        band.collapse(), LTIP.phi(frames[0][..., 1]), atol=1e-9, rtol=0
    )


def test_constant_frame_has_only_lowpass_energy() -> None:
    frames = [np.full((32, 32), 0.3), np.full((32, 32), 0.6)]
    pyramids = build_pyramids(frames, _stack(frames), FusionConfig(levels=4))
    for channels in pyramids.bands:
        *bands, residual = channels[0].levels
        for band in bands:
            np.testing.assert_allclose(band, 0.0, atol=1e-12)
        assert np.all(residual > 0)


def test_single_level_pyramid_is_flat_fusion(rng: np.random.Generator) -> None:
    frames = _frames(rng, 3, (16, 16, 3))
    stack = _stack(frames)
    flat = fuse_flat(frames, stack)
    pyramid = fuse_pyramid(frames, stack, FusionConfig(levels=1))
    np.testing.assert_allclose(pyramid, flat, atol=1e-12, rtol=0)


def test_build_pyramids_rejects_too_many_levels(rng: np.random.Generator) -> None:
    frames = _frames(rng, 2, (8, 8))
    with pytest.raises(FusionError):
        build_pyramids(frames, _stack(frames), FusionConfig(levels=5))


def _pad_blur(plane: np.ndarray, mode: str) -> np.ndarray:
    h, w = plane.shape
    padded = np.pad(plane, 2, mode=mode)
    rows = sum(k * padded[i : i + h, :] for i, k in enumerate(KERNEL))
    return sum(k * rows[:, j : j + w] for j, k in enumerate(KERNEL))


def _pad_down(plane: np.ndarray) -> np.ndarray:
    return _pad_blur(plane, "edge")[::2, ::2]


def _pad_up(plane: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    up = np.zeros(shape)
    up[::2, ::2] = plane
    return 4.0 * _pad_blur(up, "reflect")


def _mertens(frames: list[np.ndarray], weights: np.ndarray, levels: int) -> np.ndarray:
    out = np.empty_like(frames[0])
    for c in range(frames[0].shape[-1]):
        blended = None
        for frame, weight in zip(frames, weights):
            gauss_f, gauss_w = [frame[..., c]], [weight]
            for _ in range(levels - 1):
                gauss_f.append(_pad_down(gauss_f[-1]))
                gauss_w.append(_pad_down(gauss_w[-1]))
            lap = [f - _pad_up(g, f.shape) for f, g in zip(gauss_f[:-1], gauss_f[1:])]
            lap.append(gauss_f[-1])
            terms = [w * b for w, b in zip(gauss_w, lap)]
            if blended is not None:
                terms = [a + t for a, t in zip(blended, terms)]
            blended = terms
        assert blended is not None
        result = blended[-1]
        for band in reversed(blended[:-1]):
            result = band + _pad_up(result, band.shape)
        out[..., c] = result
    return np.clip(out, 0.0, PIXEL_MAX)


def test_real_algebra_reproduces_classic_exposure_fusion() -> None:
    bracket = synthetic_bracket(synthetic_scene(48, 64, seed=3), (0.05, 0.5, 5.0))
    frames = [f.image for f in bracket]
    stack = _stack(frames)
    config = FusionConfig(algebra=REAL, levels=4)

    expected = _mertens(frames, stack.weights, levels=4)
    np.testing.assert_allclose(
        fuse_pyramid(frames, stack, config), expected, atol=1e-10, rtol=0
    )
    convex = sum(w[..., np.newaxis] * f for w, f in zip(stack.weights, frames))
    np.testing.assert_allclose(
        fuse_flat(frames, stack, config), np.clip(convex, 0.0, PIXEL_MAX), atol=1e-12
    )


@pytest.mark.parametrize("mode", ["flat", "pyramid"])
def test_worker_count_does_not_change_output(mode: str) -> None:
    frames = synthetic_bracket(synthetic_scene(64, 64, seed=1))
    single = fuse(frames, config=FusionConfig(mode=mode, workers=1))
    many = fuse(frames, config=FusionConfig(mode=mode, workers=4))
    np.testing.assert_array_equal(single, many)


def _bright_frames(rng: np.random.Generator, n: int) -> list[np.ndarray]:
    return [rng.uniform(1.0 - 1e-3, PIXEL_MAX, size=(32, 32, 3)) for _ in range(n)]


def _full_range_frames(rng: np.random.Generator, n: int) -> list[np.ndarray]:
    return [rng.uniform(0.0, PIXEL_MAX, size=(32, 32, 3)) for _ in range(n)]


@pytest.mark.parametrize("mode", ["flat", "pyramid"])
@pytest.mark.parametrize(
    "make_frames",
    [
        lambda rng: [f.image for f in synthetic_bracket(synthetic_scene(64, 64, seed=2))],
        lambda rng: _full_range_frames(rng, 5),
        lambda rng: _bright_frames(rng, 5),
        lambda rng: [*_bright_frames(rng, 2), *_full_range_frames(rng, 3)],
    ],
)
def test_lut_fusion_stays_close_to_direct(
    mode: str,
    make_frames: typing.Callable[[np.random.Generator], list[np.ndarray]],
    rng: np.random.Generator,
) -> None:
    frames = make_frames(rng)
    direct = fuse(frames, config=FusionConfig(mode=mode))
    tabled = fuse(frames, config=FusionConfig(mode=mode, use_lut=True))
    assert np.max(np.abs(direct - tabled)) <= 5e-4


@pytest.mark.parametrize(
    "algebra", [ParametricLtipAlgebra(m=0.5), ParametricLtipAlgebra(m=2.0), LIP, REAL]
)
def test_lut_fusion_stays_close_for_every_model(
    algebra: Algebra, rng: np.random.Generator
) -> None:
    mixed = [*_bright_frames(rng, 2), *_full_range_frames(rng, 3)]
    for mode, frames in (("flat", mixed), ("pyramid", _full_range_frames(rng, 5))):
        direct = fuse(frames, config=FusionConfig(algebra=algebra, mode=mode))
        config = FusionConfig(algebra=algebra, mode=mode, use_lut=True)
        assert np.max(np.abs(direct - fuse(frames, config=config))) <= 5e-4


def test_lut_follows_the_pole_under_small_weights() -> None:
    frames = [np.full((4, 4), 0.99999), np.full((4, 4), 0.2)]
    weights = np.stack([np.full((4, 4), 1e-4), np.full((4, 4), 1.0 - 1e-4)])
    stack = WeightStack(weights, normalized=True)
    direct = fuse_flat(frames, stack)
    tabled = fuse_flat(frames, stack, FusionConfig(use_lut=True))
    np.testing.assert_allclose(tabled, direct, atol=1e-9)


def test_fused_bracket_never_saturates() -> None:
    exposures = (0.01, 0.1, 1.0, 10.0, 100.0)
    frames = synthetic_bracket(synthetic_scene(64, 64, seed=4), exposures)
    assert np.any(frames[-1].image == PIXEL_MAX)
    fused = fuse(frames)
    assert np.all(fused < 1.0)
    assert np.all(fused >= 0.0)


def test_closed_addition_saturates_less_than_real_addition() -> None:
    exposures = (0.01, 0.1, 1.0, 10.0, 100.0)
    frames = [f.image for f in synthetic_bracket(synthetic_scene(64, 64), exposures)]
    closed = LTIP.sum(frames)
    real = np.clip(REAL.sum(frames), 0.0, PIXEL_MAX)
    assert np.all(closed < 1.0)
    closed_white = np.count_nonzero(pixels_to_codes(closed) == 255)
    real_white = np.count_nonzero(pixels_to_codes(real) == 255)
    assert real_white > closed_white


@pytest.mark.slow
@pytest.mark.parametrize("mode", ["flat", "pyramid"])
def test_lut_fusion_is_not_slower(mode: str) -> None:
    rng = np.random.default_rng(0)
    frames = [rng.uniform(0.0, PIXEL_MAX, size=(768, 1024, 3)) for _ in range(5)]

    def timed(use_lut: bool) -> float:
        start = time.perf_counter()
        fuse(frames, config=FusionConfig(mode=mode, use_lut=use_lut))
        return time.perf_counter() - start

    timed(True)  # build and cache the tables
    assert timed(True) <= 2.0 * timed(False)
