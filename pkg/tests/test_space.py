import numpy as np
import pytest

from peakcast.errors import ConfigError, DimensionMismatchError
from peakcast.space import SearchSpace, clip_to_bounds


def box(lo, hi):
    return SearchSpace(np.array(lo, dtype=float), np.array(hi, dtype=float))


def test_dimension_and_center():
    space = box([-5, -5], [5, 15])
    assert space.dimension == 2
    assert np.array_equal(space.center, [0.0, 5.0])


def test_rejects_empty_and_inverted_bounds():
    with pytest.raises(ConfigError):
        box([], [])
    with pytest.raises(ConfigError):
        box([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(ConfigError):
        box([0.0], [np.inf])


def test_clip_identity_inside_box():
    space = box([-5, -5], [5, 5])
    position = np.array([1.25, -4.75])
    assert np.array_equal(clip_to_bounds(position, space), position)


def test_clip_clamps_outside_components():
    space = box([-5, -5], [5, 5])
    assert np.array_equal(clip_to_bounds(np.array([-10.0, 20.0]), space), [-5.0, 5.0])


def test_clip_boundary_is_inside():
    space = box([-5, -5], [5, 5])
    position = np.array([space.lower[0], space.upper[1]])
    assert np.array_equal(clip_to_bounds(position, space), position)


def test_clip_length_mismatch():
    space = box([-5, -5], [5, 5])
    with pytest.raises(DimensionMismatchError):
        clip_to_bounds(np.array([1.0, 2.0, 3.0]), space)
