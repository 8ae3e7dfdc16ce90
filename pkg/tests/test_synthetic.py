from __future__ import annotations

import numpy as np
import pytest

from ltiphdr._algebra import LTIP, PIXEL_MAX, ParametricLtipAlgebra
from ltiphdr._image import codes_to_pixels
from ltiphdr._synthetic import DEFAULT_EXPOSURES, synthetic_bracket, synthetic_scene


def test_scene_shape_and_range() -> None:
    scene = synthetic_scene(32, 48, saturated=False)
    assert scene.shape == (32, 48, 3)
    values = scene.values
    assert np.all(values > 0)
    # the log ramp spans roughly the requested dynamic range
    assert values[:, -1].mean() / values[:, 0].mean() > 1e3


def test_scene_is_seeded() -> None:
    np.testing.assert_array_equal(
        synthetic_scene(seed=3).values, synthetic_scene(seed=3).values
    )
    other = synthetic_scene(seed=4).values
    assert not np.array_equal(synthetic_scene(seed=3).values, other)


def test_saturated_patch_saturates_every_frame() -> None:
    frames = synthetic_bracket(synthetic_scene(60, 60))
    assert [f.exposure_time for f in frames] == list(DEFAULT_EXPOSURES)
    for frame in frames:
        assert np.all(frame.image[:10, -10:] == PIXEL_MAX)


def test_bracket_is_quantized_response() -> None:
    scene = synthetic_scene(16, 16, saturated=False)
    frames = synthetic_bracket(scene, (0.5, 2.0))
    levels = codes_to_pixels(np.arange(256), 8)
    for frame in frames:
        assert np.all(np.isin(frame.image, levels))
        expected = LTIP.phi_inv(scene.values * frame.exposure_time)
        error = np.abs(np.minimum(expected, PIXEL_MAX) - frame.image)
        assert np.max(error) <= 0.5 / 255 + 1e-12
    # longer exposures are never darker
    assert np.all(frames[1].image >= frames[0].image)


@pytest.mark.parametrize("gain", [0.5, 4.0])
def test_bracket_gain_and_model(gain: float) -> None:
    scene = synthetic_scene(16, 16, saturated=False)
    algebra = ParametricLtipAlgebra(m=2.0)
    (frame,) = synthetic_bracket(scene, (1.0,), algebra, gain)
    expected = np.minimum(algebra.phi_inv(gain * scene.values), PIXEL_MAX)
    assert np.max(np.abs(expected - frame.image)) <= 0.5 / 255 + 1e-12
