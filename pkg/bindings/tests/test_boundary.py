"""View binding: zero-copy rules, copy-once flags, boundary rejections."""

import array

import numpy as np
import pytest

from fusedist import InvalidInputError
from fusedist_bindings import as_view


def test_contiguous_numpy_is_not_copied():
    x = np.random.default_rng(0).normal(size=(40, 5))
    v = as_view(x)
    assert v.copied is False
    assert np.shares_memory(v.data, x)
    assert v.n == 40 and v.d == 5


def test_flat_stdlib_buffer_with_shape():
    buf = array.array("d", [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    v = as_view(buf, shape=(3, 2))
    assert v.copied is False
    assert np.shares_memory(v.data, np.asarray(buf))
    np.testing.assert_array_equal(v.data, [[1, 2], [3, 4], [5, 6]])


def test_two_d_memoryview_keeps_its_shape():
    x = np.arange(12.0).reshape(4, 3)
    v = as_view(memoryview(x))
    assert v.copied is False
    assert v.data.shape == (4, 3)
    assert np.shares_memory(v.data, x)


@pytest.mark.parametrize("make", [
    lambda x: x.T,
    lambda x: np.asfortranarray(x),
    lambda x: x[::2],
    lambda x: x[:, 1:],
])
def test_non_contiguous_is_copied_once_and_flagged(make):
    x = np.random.default_rng(1).normal(size=(8, 6))
    strided = make(x)
    v = as_view(strided)
    assert v.copied is True
    assert v.data.flags.c_contiguous
    assert not np.shares_memory(v.data, x)
    np.testing.assert_array_equal(v.data, np.asarray(strided))


def test_one_by_n_fortran_layout_counts_as_contiguous():
    # A single row is both C- and Fortran-contiguous; no copy needed.
    v = as_view(np.asfortranarray(np.ones((1, 7))))
    assert v.copied is False


def test_view_is_read_only():
    x = np.ones((3, 3))
    v = as_view(x)
    with pytest.raises(ValueError):
        v.data[0, 0] = 2.0
    x[0, 0] = 5.0  # the host still owns and may mutate its buffer
    assert v.data[0, 0] == 5.0


@pytest.mark.parametrize("obj", [
    array.array("f", [1.0, 2.0]),
    array.array("i", [1, 2]),
    b"\x00" * 16,
    np.ones((2, 2), dtype=np.float32),
])
def test_rejects_non_float64_formats(obj):
    with pytest.raises(InvalidInputError, match="format"):
        as_view(obj, shape=(1, 2))


def test_rejects_non_buffer_objects():
    with pytest.raises(InvalidInputError, match="buffer protocol"):
        as_view([[1.0, 2.0]])


def test_flat_buffer_requires_shape():
    with pytest.raises(InvalidInputError, match="shape"):
        as_view(array.array("d", [1.0, 2.0]))


@pytest.mark.parametrize("shape", [(2, 2), (0, 3), (3, -1), (3,), "ab", 6])
def test_rejects_inconsistent_or_malformed_shapes(shape):
    buf = array.array("d", [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    with pytest.raises(InvalidInputError):
        as_view(buf, shape=shape)


def test_rejects_shape_fighting_a_two_d_buffer():
    x = np.ones((4, 3))
    with pytest.raises(InvalidInputError, match="does not match"):
        as_view(x, shape=(3, 4))
    v = as_view(x, shape=(4, 3))  # agreeing shape is allowed
    assert v.copied is False


def test_rejects_higher_dimensional_buffers():
    with pytest.raises(InvalidInputError, match="dimensions"):
        as_view(np.ones((2, 2, 2)))


def test_rejects_non_finite_values_by_position():
    x = np.ones((3, 4))
    x[1, 2] = np.inf
    with pytest.raises(InvalidInputError, match="row 1, column 2"):
        as_view(x)


def test_error_carries_structured_code():
    try:
        as_view([[1.0]])
    except InvalidInputError as err:
        assert err.code == "invalid-input"
        assert err.exit_code == 1
