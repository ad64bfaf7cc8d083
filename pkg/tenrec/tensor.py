# -*- coding: utf-8 -*-
"""
    tenrec.tensor
    ~~~~~~~~~~~~~

    Dense tensors, mode unfoldings, observation masks and the TNR1 container.

    Tensors are plain ``numpy.ndarray`` of float64. Whenever a tensor is
    linearized (unfoldings, files) the first index varies fastest, so the
    column of entry (i_1, ..., i_N) in the mode-m unfolding is::

        j_m = sum_{k != m} i_k * prod_{l < k, l != m} n_l      (0-based)

    Modes are 0-based throughout the Python API.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

import numpy as np

from .common import logger, TensorShapeError

#: Highest tensor order handled by the package.
MAX_ORDER = 6

#: Magic bytes of the binary tensor container.
MAGIC = b'TNR1'


def as_tensor(data):
    """Validate and convert data into a float64 tensor.

    :param data: array-like of order 2 to MAX_ORDER.
    :rtype: numpy.ndarray
    """
    if np.iscomplexobj(data):
        raise ValueError('complex valued tensors are not supported')

    X = np.asarray(data, dtype=np.float64)
    if not 2 <= X.ndim <= MAX_ORDER:
        raise TensorShapeError('tensor order must be between 2 and %d, not %d'
                               % (MAX_ORDER, X.ndim))
    if 0 in X.shape:
        raise TensorShapeError('all dimensions must be positive, got %s'
                               % (X.shape, ))
    return X


def _check_mode(shape, m):
    if not 0 <= m < len(shape):
        raise TensorShapeError('mode %r out of range for an order %d tensor'
                               % (m, len(shape)))


def min_dims(shape):
    """Return min(rows, cols) of every mode unfolding of a tensor of shape.

    :rtype: tuple[int]
    """
    total = int(np.prod(shape))
    return tuple(min(n, total // n) for n in shape)


def unfold(X, m):
    """Mode-m unfolding of X into an n_m x prod_{k != m} n_k matrix.

    The result is a fresh array, never a view on X.
    """
    _check_mode(X.shape, m)
    M = np.moveaxis(X, m, 0).reshape((X.shape[m], -1), order='F')
    return np.array(M, copy=True)


def fold(M, m, shape):
    """Inverse of :func:`unfold`.

    :param M: n_m x prod_{k != m} n_k matrix.
    :param m: mode.
    :param shape: shape of the tensor to rebuild.
    """
    shape = tuple(int(n) for n in shape)
    _check_mode(shape, m)

    rest = [n for k, n in enumerate(shape) if k != m]
    expected = (shape[m], int(np.prod(rest)))
    if np.shape(M) != expected:
        raise TensorShapeError('cannot fold a %s matrix along mode %d into %s,'
                               ' expected %s' % (np.shape(M), m, shape, expected))

    X = np.reshape(M, [shape[m]] + rest, order='F')
    return np.ascontiguousarray(np.moveaxis(X, 0, m))


class ObservationMask(object):
    """Set of observed entries of a tensor.

    :param observed: boolean array, True where the entry is observed.
    """

    def __init__(self, observed):
        observed = np.array(observed, dtype=bool, copy=True)
        observed.flags.writeable = False

        #: Indicator of the observed entries.
        #: :type: numpy.ndarray[bool]
        self.observed = observed

    @classmethod
    def full(cls, shape):
        return cls(np.ones(shape, dtype=bool))

    @classmethod
    def from_indices(cls, shape, flat_indices):
        """Build a mask from flat indices in first-mode-fastest order.
        """
        observed = np.zeros(int(np.prod(shape)), dtype=bool)
        observed[np.asarray(flat_indices, dtype=np.intp)] = True
        return cls(observed.reshape(shape, order='F'))

    @property
    def shape(self):
        return self.observed.shape

    @property
    def count(self):
        """|Omega|, the number of observed entries.
        """
        return int(np.count_nonzero(self.observed))

    @property
    def indicator(self):
        """Observed entries as a 0/1 float tensor.
        """
        return self.observed.astype(np.float64)

    def complement(self):
        """Mask of the missing entries.
        """
        return ObservationMask(~self.observed)

    def check_shape(self, X):
        if np.shape(X) != self.shape:
            raise TensorShapeError('tensor shape %s does not match mask shape %s'
                                   % (np.shape(X), self.shape))

    def __eq__(self, other):
        if not isinstance(other, ObservationMask):
            return NotImplemented
        return np.array_equal(self.observed, other.observed)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<ObservationMask %s, %d observed>' % (self.shape, self.count)


def mask_apply(X, mask):
    """A_Omega(X): X on the observed entries, 0 elsewhere.
    """
    mask.check_shape(X)
    return np.where(mask.observed, X, 0.0)


def mask_complement_apply(X, mask):
    """A_Omega-bar(X): X on the missing entries, 0 elsewhere.
    """
    mask.check_shape(X)
    return np.where(mask.observed, 0.0, X)


def l2_norm(X):
    """Square root of the sum of squares of all entries.
    """
    return float(np.linalg.norm(np.ravel(X)))


def save_tensor(path, X):
    """Write X into a TNR1 container.

    Layout: magic, little endian uint32 order N, N uint32 dimensions, then
    float64 values with the first index varying fastest.
    """
    X = as_tensor(X)
    header = np.array([X.ndim] + list(X.shape), dtype='<u4')
    with open(path, 'wb') as fp:
        fp.write(MAGIC)
        fp.write(header.tobytes())
        fp.write(X.ravel(order='F').astype('<f8').tobytes())
    logger.debug('Wrote %s tensor to %s', X.shape, path)


def load_tensor(path):
    """Read a tensor written by :func:`save_tensor`.
    """
    with open(path, 'rb') as fp:
        content = fp.read()

    if content[:4] != MAGIC:
        raise ValueError('%s is not a TNR1 tensor file' % path)

    order = int(np.frombuffer(content, dtype='<u4', count=1, offset=4)[0])
    if not 2 <= order <= MAX_ORDER:
        raise TensorShapeError('%s declares an unsupported order %d'
                               % (path, order))
    shape = tuple(int(n) for n in
                  np.frombuffer(content, dtype='<u4', count=order, offset=8))

    offset = 8 + 4 * order
    size = int(np.prod(shape))
    if len(content) - offset != 8 * size:
        raise ValueError('%s is truncated: expected %d values for shape %s'
                         % (path, size, shape))

    data = np.frombuffer(content, dtype='<f8', count=size, offset=offset)
    return data.astype(np.float64).reshape(shape, order='F')


def save_mask(path, mask):
    """Store a mask as a 0/1 tensor in a TNR1 container.
    """
    save_tensor(path, mask.indicator)


def load_mask(path):
    return ObservationMask(load_tensor(path) != 0)


def export_unfolding_csv(path, X, m):
    """Dump unfold_m(X) as CSV for debugging.
    """
    np.savetxt(path, unfold(X, m), delimiter=',', fmt='%.17g')
