import numpy as np
import pytest

from biwarp.ambient import AmbientSpace
from biwarp.errors import ConfigError, DimensionMismatch


def test_structure():
    space = AmbientSpace(3)
    j = space.J
    np.testing.assert_array_equal(j @ j, -np.eye(6))
    np.testing.assert_array_equal(j.T @ j, np.eye(6))
    e = np.eye(6)
    np.testing.assert_array_equal(space.apply_J(e[:, 0]), e[:, 1])
    np.testing.assert_array_equal(space.apply_J(e[:, 1]), -e[:, 0])


def test_apply_matches_matrix(rng):
    space = AmbientSpace(4)
    v = rng.standard_normal((8, 3))
    np.testing.assert_array_equal(space.apply_J(v), space.J @ v)
    assert space.check_kaehler_compatibility(v[:, 0], v[:, 1]) < 1e-14


def test_rejections():
    with pytest.raises(ConfigError):
        AmbientSpace(0)
    with pytest.raises(ConfigError):
        AmbientSpace(2, "interleaved")
    with pytest.raises(DimensionMismatch):
        AmbientSpace(2).apply_J(np.ones(3))
