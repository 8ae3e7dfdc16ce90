from __future__ import annotations

import math

import numpy as np
import pytest

from ltiphdr._algebra import LIP, LTIP, REAL, Algebra, ParametricLtipAlgebra
from ltiphdr._fusion import FusionConfig, fuse, fuse_flat
from ltiphdr._parallel import TilePool
from ltiphdr._weights import (
    STABILIZER,
    WeightParams,
    WeightStack,
    combine_weights,
    compute_weights,
    contrast_weight,
    normalize_stack,
    saturation_weight,
    well_exposedness_weight,
)


def test_default_params() -> None:
    params = WeightParams()
    assert params.to_dict() == {
        "wc_exponent": 1.0,
        "ws_exponent": 1.0,
        "we_exponent": 1.0,
        "mu": 0.37,
        "sigma2": 0.2,
    }


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mu": 0.0},
        {"mu": 1.0},
        {"sigma2": 0.0},
        {"wc_exponent": -1.0},
    ],
)
def test_invalid_params(kwargs: dict[str, float]) -> None:
    with pytest.raises(ValueError):
        WeightParams(**kwargs)


def test_contrast_of_constant_is_zero() -> None:
    assert np.all(contrast_weight(np.full((6, 6, 3), 0.4)) == 0)


def test_contrast_peaks_at_impulse() -> None:
    frame = np.zeros((5, 5))
    frame[2, 2] = 1.0
    response = contrast_weight(frame)
    assert np.unravel_index(np.argmax(response), response.shape) == (2, 2)
    assert response[2, 2] == 4.0
    assert response[1, 2] == response[2, 1] == response[3, 2] == response[2, 3] == 1.0
    assert response[0, 0] == 0.0


def test_contrast_of_step_edge() -> None:
    frame = np.zeros((6, 6))
    frame[:, 3:] = 1.0
    expected = np.zeros((6, 6))
    # left of the edge: 1 (right neighbour); right of it: |-1|
    expected[:, 2] = 1.0
    expected[:, 3] = 1.0
    np.testing.assert_array_equal(contrast_weight(frame), expected)


def test_saturation() -> None:
    frame = np.array([[[0.5, 0.5, 0.5], [1.0, 0.0, 0.0]]])
    result = saturation_weight(frame)
    assert result[0, 0] == 0.0
    assert result[0, 1] == pytest.approx(math.sqrt(2.0 / 9.0))
    np.testing.assert_allclose(saturation_weight(frame * 0.5), 0.5 * result)
    assert np.all(saturation_weight(np.ones((3, 3))) == 0)


def test_well_exposedness() -> None:
    params = WeightParams()
    assert well_exposedness_weight(np.full((1, 1, 3), 0.37), params)[0, 0] == 1.0
    ratio = (
        well_exposedness_weight(np.full((1, 1), 0.37), params)[0, 0]
        / well_exposedness_weight(np.full((1, 1), 0.87), params)[0, 0]
    )
    assert ratio == pytest.approx(1.0 / math.exp(-0.25 / 0.4))

    centered = WeightParams(mu=0.5, sigma2=0.2)
    gray = well_exposedness_weight(np.full((1, 1, 3), 1.0), centered)[0, 0]
    assert gray == pytest.approx(math.exp(-0.25 / 0.4) ** 3)


def test_combine_weights() -> None:
    c, s, e = np.full((2, 2), 0.5), np.full((2, 2), 0.2), np.full((2, 2), 0.9)
    np.testing.assert_allclose(combine_weights(c, s, e), 0.5 * 0.2 * 0.9 + STABILIZER)

    none = WeightParams(wc_exponent=0, ws_exponent=0, we_exponent=0)
    zeros = np.zeros((2, 2))
    np.testing.assert_array_equal(
        combine_weights(zeros, zeros, zeros, none), 1.0 + STABILIZER
    )
    np.testing.assert_array_equal(combine_weights(zeros, s, e), STABILIZER)


def test_normalized_stack_sums_to_one() -> None:
    rng = np.random.default_rng(1)
    frames = rng.uniform(0.0, 0.99, size=(5, 16, 12, 3))
    stack = compute_weights(list(frames))
    assert not stack.normalized
    assert len(stack) == 5 and stack.shape == (16, 12)
    assert np.all(stack.weights >= 0)

    normalized = normalize_stack(stack)
    assert normalized.normalized
    np.testing.assert_allclose(normalized.eta, 1.0, atol=1e-9)


def test_normalize_falls_back_to_uniform() -> None:
    weights = np.zeros((4, 3, 3))
    weights[:, 0, 0] = [1.0, 3.0, 0.0, 0.0]
    normalized = normalize_stack(WeightStack(weights))
    assert normalized.weights[:, 0, 0].tolist() == [0.25, 0.75, 0.0, 0.0]
    np.testing.assert_array_equal(normalized.weights[:, 1, 1], 0.25)


def test_weights_do_not_depend_on_workers() -> None:
    frames = list(np.random.default_rng(2).uniform(0.0, 0.99, size=(4, 20, 20, 3)))
    serial = compute_weights(frames)
    with TilePool(3) as pool:
        threaded = compute_weights(frames, pool=pool)
    np.testing.assert_array_equal(serial.weights, threaded.weights)


@pytest.mark.parametrize("order", [[2, 0, 3, 1], [3, 2, 1, 0]])
def test_weights_follow_frame_permutation(order: list[int]) -> None:
    frames = np.random.default_rng(3).uniform(0.0, 0.99, size=(4, 18, 14, 3))
    stack = compute_weights(list(frames))
    permuted = compute_weights([frames[i] for i in order])
    np.testing.assert_array_equal(permuted.weights, stack.weights[order])
    np.testing.assert_allclose(
        normalize_stack(permuted).weights, normalize_stack(stack).weights[order]
    )


@pytest.mark.parametrize(
    "algebra", [LTIP, LIP, REAL, ParametricLtipAlgebra(m=0.5)]
)
def test_fusion_weights_do_not_depend_on_the_algebra(algebra: Algebra) -> None:
    frames = np.random.default_rng(4).uniform(0.0, 0.99, size=(3, 16, 16, 3))
    stack = normalize_stack(compute_weights(list(frames)))
    config = FusionConfig(algebra=algebra, mode="flat")
    np.testing.assert_allclose(
        fuse(list(frames), config=config),
        fuse_flat(list(frames), stack, config),
        atol=1e-12,
    )
