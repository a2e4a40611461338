import numpy as np
import pytest

from cnn.tensor_core import child_seed, ensure_finite, he_normal_init, make_rng, reshape, tensor_new
from utils.errors import InvalidParameterError, InvalidShapeError


def test_tensor_new_fills_requested_shape():
    t = tensor_new([2, 3], 0.0)
    assert t.shape == (2, 3)
    assert t.dtype == np.float64
    assert np.count_nonzero(t) == 0

    np.testing.assert_array_equal(tensor_new([1], 7.5), [7.5])
    assert tensor_new([3, 32, 32], 1.0).sum() == 3072


@pytest.mark.parametrize("shape", [[0, 3], [2, -1], []])
def test_tensor_new_rejects_non_positive_extents(shape):
    with pytest.raises(InvalidShapeError):
        tensor_new(shape)


def test_reshape_round_trip_is_exact(rng):
    t = rng.standard_normal((4, 6, 5))
    back = reshape(reshape(t, [20, 6]), [4, 6, 5])
    assert np.array_equal(back, t)


def test_reshape_rejects_size_change():
    with pytest.raises(InvalidShapeError):
        reshape(tensor_new([2, 3]), [4, 2])


def test_ensure_finite():
    t = tensor_new([3], 1.0)
    assert ensure_finite(t) is t
    t[1] = np.nan
    with pytest.raises(InvalidParameterError):
        ensure_finite(t, "logits")


def test_equal_seeds_give_identical_streams():
    a = make_rng(42).standard_normal(10_000)
    b = make_rng(42).standard_normal(10_000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, make_rng(43).standard_normal(10_000))


def test_child_seed_is_stable_and_key_sensitive():
    assert child_seed(7, 1, 2) == child_seed(7, 1, 2)
    assert child_seed(7, 1, 2) != child_seed(7, 2, 1)
    assert child_seed(7, 1) != child_seed(8, 1)
    assert 0 <= child_seed(2**64 - 1, 3) < 2**64


def test_he_normal_moments():
    samples = he_normal_init([1000, 1000], 50, make_rng(0))
    assert samples.std() == pytest.approx(0.2, abs=0.005)
    assert abs(samples.mean()) < 0.01


def test_he_normal_rejects_zero_fan_in(rng):
    with pytest.raises(InvalidParameterError):
        he_normal_init([3, 3], 0, rng)
