# -*- coding: utf-8 -*-

from __future__ import absolute_import

import itertools

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from tenrec.common import TensorShapeError
from tenrec.tensor import (ObservationMask, as_tensor, unfold, fold, min_dims,
                           mask_apply, mask_complement_apply, l2_norm,
                           save_tensor, load_tensor, save_mask, load_mask,
                           export_unfolding_csv)


def random_shape(rng, order):
    return tuple(int(n) for n in rng.integers(1, 6, size=order))


def test_unfold_fold_roundtrip(rng):
    for _ in range(200):
        shape = random_shape(rng, int(rng.integers(3, 5)))
        X = rng.standard_normal(shape)
        for m in range(len(shape)):
            M = unfold(X, m)
            rest = int(np.prod(shape)) // shape[m]
            assert M.shape == (shape[m], rest), '%s mode %d' % (shape, m)
            assert_array_equal(fold(M, m, shape), X)


def test_unfold_index_map():
    # column of entry (i_1, ..., i_N) is sum_{k != m} i_k J_k with
    # J_k the product of the earlier dimensions other than n_m
    shape = (2, 3, 4)
    X = np.arange(24, dtype=float).reshape(shape)
    for m in range(3):
        M = unfold(X, m)
        for idx in itertools.product(*[range(n) for n in shape]):
            col, stride = 0, 1
            for k, n in enumerate(shape):
                if k == m:
                    continue
                col += idx[k] * stride
                stride *= n
            assert M[idx[m], col] == X[idx], '%s mode %d' % (idx, m)


def test_unfold_returns_a_copy():
    X = np.ones((2, 2, 2))
    M = unfold(X, 0)
    M[0, 0] = 5.
    assert X[0, 0, 0] == 1.


def test_order_two_unfoldings():
    X = np.arange(6, dtype=float).reshape(2, 3)
    assert_array_equal(unfold(X, 0), X)
    assert_array_equal(unfold(X, 1), X.T)


def test_single_entry_dimension():
    X = np.arange(5, dtype=float).reshape(1, 5, 1)
    assert unfold(X, 0).shape == (1, 5)
    assert unfold(X, 2).shape == (1, 5)
    assert_array_equal(fold(unfold(X, 1), 1, X.shape), X)


@pytest.mark.parametrize('m', [-1, 3])
def test_unfold_bad_mode(m):
    with pytest.raises(TensorShapeError):
        unfold(np.zeros((2, 2, 2)), m)


def test_fold_shape_mismatch():
    with pytest.raises(TensorShapeError):
        fold(np.zeros((2, 5)), 0, (2, 2, 2))


@pytest.mark.parametrize('data, error', [
    (np.zeros(3), TensorShapeError),
    (np.zeros((1, ) * 7), TensorShapeError),
    (np.zeros((2, 0, 2)), TensorShapeError),
    (np.zeros((2, 2), dtype=complex), ValueError),
])
def test_as_tensor_rejects(data, error):
    with pytest.raises(error):
        as_tensor(data)


def test_min_dims():
    assert min_dims((40, 40, 40)) == (40, 40, 40)
    assert min_dims((2, 3, 50)) == (2, 3, 6)
    assert min_dims((16, 16, 16, 16)) == (16, 16, 16, 16)


def test_mask_from_indices_first_mode_fastest():
    mask = ObservationMask.from_indices((2, 3), [0, 1, 3])
    expected = np.array([[True, False, False],
                         [True, True, False]])
    assert_array_equal(mask.observed, expected)
    assert mask.count == 3
    assert mask.complement().count == 3
    assert mask == ObservationMask(expected)
    assert mask != mask.complement()


def test_mask_is_read_only():
    mask = ObservationMask.full((2, 2))
    with pytest.raises(ValueError):
        mask.observed[0, 0] = False


def test_mask_apply_and_complement(rng):
    X = rng.standard_normal((3, 4, 2))
    mask = ObservationMask(rng.random((3, 4, 2)) < 0.5)
    A = mask_apply(X, mask)
    B = mask_complement_apply(X, mask)
    assert_array_equal(A + B, X)
    assert np.all(A[~mask.observed] == 0)
    assert np.all(B[mask.observed] == 0)
    assert_array_equal(mask.indicator, mask.observed.astype(float))

    with pytest.raises(TensorShapeError):
        mask_apply(np.zeros((3, 4)), mask)


def test_l2_norm():
    assert l2_norm(np.full((2, 2, 2), 0.5)) == pytest.approx(np.sqrt(2.))


def test_tensor_file(tmpdir, rng):
    X = rng.standard_normal((3, 1, 4, 2))
    path = str(tmpdir.join('x.tnr'))
    save_tensor(path, X)
    with open(path, 'rb') as fp:
        content = fp.read()
    assert content[:4] == b'TNR1'
    assert len(content) == 4 + 4 * 5 + 8 * X.size
    # first mode varies fastest
    assert np.frombuffer(content[24:32], '<f8')[0] == X[0, 0, 0, 0]
    assert np.frombuffer(content[32:40], '<f8')[0] == X[1, 0, 0, 0]
    assert_array_equal(load_tensor(path), X)


def test_tensor_file_errors(tmpdir):
    path = str(tmpdir.join('bad.tnr'))
    with open(path, 'wb') as fp:
        fp.write(b'XXXX')
    with pytest.raises(ValueError):
        load_tensor(path)

    save_tensor(path, np.ones((2, 2)))
    with open(path, 'rb') as fp:
        content = fp.read()
    with open(path, 'wb') as fp:
        fp.write(content[:-8])
    with pytest.raises(ValueError):
        load_tensor(path)


def test_mask_file(tmpdir, rng):
    mask = ObservationMask(rng.random((4, 3, 2)) < 0.3)
    path = str(tmpdir.join('mask.tnr'))
    save_mask(path, mask)
    assert load_mask(path) == mask


def test_export_unfolding_csv(tmpdir):
    X = np.arange(8, dtype=float).reshape(2, 2, 2)
    path = str(tmpdir.join('u.csv'))
    export_unfolding_csv(path, X, 1)
    assert_array_equal(np.loadtxt(path, delimiter=','), unfold(X, 1))
