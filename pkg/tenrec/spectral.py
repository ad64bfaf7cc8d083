# -*- coding: utf-8 -*-
"""
    tenrec.spectral
    ~~~~~~~~~~~~~~~

    Singular value machinery: thin SVD, scalar p-thresholding, the weighted
    Schatten-p proximal map, rank truncation, l2 ball projection and the
    (tensor) weighted Schatten-p values.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

from collections import namedtuple

import numpy as np
from scipy.optimize import brentq

from .common import logger, TensorShapeError, WeightError
from .tensor import l2_norm, min_dims, unfold

#: Relative floor under which singular values count as zero for rank decisions.
RANK_FLOOR = 1e-12

#: Tolerance on sum(gamma) == 1.
GAMMA_TOL = 1e-12

def _is_p(p, value):
    return abs(p - value) < 1e-12


class ThinSVD(namedtuple('ThinSVD', 'U singulars V')):
    """Thin SVD M = U diag(singulars) V^T with k = min(rows, cols).

    U is rows x k, V is cols x k and singulars are nonincreasing.
    """

    __slots__ = ()

    def to_matrix(self):
        return np.dot(self.U * self.singulars, self.V.T)

    def replace_singulars(self, singulars):
        return self._replace(singulars=np.asarray(singulars, dtype=np.float64))


def thin_svd(M):
    """Thin SVD of a finite matrix.

    :rtype: ThinSVD
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise TensorShapeError('thin_svd expects a matrix, got shape %s'
                               % (M.shape, ))
    if not np.all(np.isfinite(M)):
        raise ValueError('thin_svd received non finite entries')

    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return ThinSVD(U, s, Vt.T)


def numerical_rank(M, floor=RANK_FLOOR):
    """Number of singular values above floor * sigma_max.
    """
    s = np.linalg.svd(np.asarray(M, dtype=np.float64), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > floor * s[0]))


def p_threshold_level(w, p):
    """Magnitude at which the minimizer of 1/2 (y - x)^2 + w |x|^p jumps
    away from zero.
    """
    w = np.asarray(w, dtype=np.float64)
    if _is_p(p, 1.0):
        return w
    c = 2 * w * (1 - p)
    with np.errstate(divide='ignore', invalid='ignore'):
        level = c ** (1 / (2 - p)) + w * p * c ** ((p - 1) / (2 - p))
    return np.where(w > 0, level, 0.0)


def _half_threshold(a, w):
    # |y| >= 3/2 w^(2/3); x = 2/3 |y| (1 + cos(2 pi / 3 - 2 phi / 3))
    phi = np.arccos(np.clip(w / 4 * (a / 3) ** -1.5, -1., 1.))
    return 2. / 3 * a * (1 + np.cos(2 * np.pi / 3 - 2 * phi / 3))


def _two_thirds_threshold(a, w):
    # Same family as the half thresholding, written for lam = 2 w
    lam = 2 * w
    theta = np.arccosh(np.maximum(27. / 16 * a ** 2 * lam ** -1.5, 1.))
    A = 2 / np.sqrt(3) * lam ** 0.25 * np.sqrt(np.cosh(theta / 3))
    return ((A + np.sqrt(np.maximum(2 * a / A - A ** 2, 0.))) / 2) ** 3


def _generic_threshold(a, w, p):
    """Minimizer for any 0 < p < 1 using a bracketing root finder.
    """
    if a == 0 or w == 0:
        return a

    # g(x) = x + w p x^(p-1) - a is increasing on [x0, a]
    x0 = (w * p * (1 - p)) ** (1 / (2 - p))
    if x0 >= a:
        return 0.

    def g(x):
        return x + w * p * x ** (p - 1) - a

    if g(x0) > 0:
        return 0.

    x = brentq(g, x0, a, xtol=1e-15, rtol=8.9e-16, maxiter=200)

    # the stationary point still has to beat x = 0
    if 0.5 * (a - x) ** 2 + w * x ** p <= 0.5 * a ** 2:
        return x
    return 0.


def p_threshold(y, w, p):
    """Elementwise minimizer of 1/2 (y - x)^2 + w |x|^p.

    Closed forms are used for p in {1, 1/2, 2/3}; other exponents in (0, 1)
    go through a bracketing root finder. At the jump magnitude, where zero
    and a nonzero point are both minimizers, the nonzero one is returned.

    :param y: array of values.
    :param w: array of nonnegative weights broadcastable with y.
    :param p: exponent, 0 < p <= 1.
    """
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError('threshold weights must be nonnegative')
    if not 0 < p <= 1:
        raise ValueError('exponent p must be in (0, 1], got %r' % p)

    y, w = np.broadcast_arrays(y, w)
    shape = y.shape
    y, w = y.ravel(), w.ravel()
    a = np.abs(y)

    if _is_p(p, 1.0):
        return (np.sign(y) * np.maximum(a - w, 0.)).reshape(shape)

    out = np.zeros_like(a)
    free = w == 0
    out[free] = a[free]

    if _is_p(p, 0.5) or _is_p(p, 2. / 3):
        sel = ~free & (a >= p_threshold_level(w, p))
        func = _half_threshold if _is_p(p, 0.5) else _two_thirds_threshold
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            out[sel] = func(a[sel], w[sel])
    else:
        for i in np.flatnonzero(~free):
            out[i] = _generic_threshold(a[i], w[i], p)

    return (np.sign(y) * out).reshape(shape)


def scalar_p_threshold(y, w, p):
    """Global minimizer x* of 1/2 (y - x)^2 + w |x|^p for scalar y.
    """
    return float(p_threshold(y, w, p))


class WeightSpec(object):
    """Weights of the weighted tensor Schatten-p norm.

    :param per_mode: one nondecreasing, nonnegative weight vector per mode,
                     of length min(rows, cols) of that mode's unfolding.
    :param gamma: positive mode coefficients summing to one.
    :param p: exponent in (0, 1].
    """

    def __init__(self, per_mode, gamma, p):
        per_mode = tuple(np.array(w, dtype=np.float64, copy=True)
                         for w in per_mode)
        gamma = np.array(gamma, dtype=np.float64, copy=True)

        if len(per_mode) != len(gamma):
            raise WeightError('%d weight vectors but %d mode coefficients'
                              % (len(per_mode), len(gamma)))
        for m, w in enumerate(per_mode):
            check_weights(w, 'mode %d' % m)
            w.flags.writeable = False
        if np.any(gamma <= 0):
            raise WeightError('mode coefficients must be positive: %s' % gamma)
        if abs(gamma.sum() - 1) > GAMMA_TOL:
            raise WeightError('mode coefficients must sum to 1, got %r'
                              % gamma.sum())
        if not 0 < p <= 1:
            raise WeightError('exponent p must be in (0, 1], got %r' % p)
        gamma.flags.writeable = False

        self.per_mode = per_mode
        self.gamma = gamma
        self.p = float(p)

    @classmethod
    def with_equal_gamma(cls, per_mode, p):
        """WeightSpec with every gamma_m = 1/N.
        """
        n = len(per_mode)
        return cls(per_mode, np.full(n, 1. / n), p)

    @property
    def order(self):
        return len(self.per_mode)

    def check_shape(self, shape):
        expected = min_dims(shape)
        found = tuple(len(w) for w in self.per_mode)
        if found != expected:
            raise WeightError('weight lengths %s do not match tensor shape %s'
                              ' (expected %s)' % (found, tuple(shape), expected))

    def mode_weights(self, m, scale=1.0):
        """scale * gamma_m * w_m, the weights of the mode m proximal step.
        """
        return scale * self.gamma[m] * self.per_mode[m]

    def __repr__(self):
        return '<WeightSpec N=%d p=%g>' % (self.order, self.p)


def check_weights(w, what='weights'):
    """Raise WeightError unless w is finite, nonnegative and nondecreasing.
    """
    w = np.asarray(w)
    if w.ndim != 1:
        raise WeightError('%s must be a vector' % what)
    if not np.all(np.isfinite(w)):
        raise WeightError('%s must be finite: %s' % (what, w))
    if np.any(w < 0):
        raise WeightError('%s must be nonnegative' % what)
    if np.any(np.diff(w) < 0):
        raise WeightError('%s must be nondecreasing: %s' % (what, w))


def weighted_sv_shrink(svd, w, p):
    """Replace every singular value by its p-thresholded value.

    :type svd: ThinSVD
    :param w: nondecreasing weights, one per singular value.
    :rtype: ThinSVD
    """
    w = np.asarray(w, dtype=np.float64)
    if w.shape != svd.singulars.shape:
        raise WeightError('%d weights for %d singular values'
                          % (w.size, svd.singulars.size))
    check_weights(w)

    shrunk = p_threshold(svd.singulars, w, p)
    tol = 1e-12 * max(float(np.max(shrunk, initial=0.)), 1.)
    assert np.all(np.diff(shrunk) <= tol), \
        'thresholded singular values lost their ordering'
    return svd.replace_singulars(shrunk)


def wspn_prox(M, w, p):
    """Proximal map of the weighted Schatten-p norm (to the power p).

    Returns U S_{w,p}(Sigma) V^T for the SVD of M.
    """
    w = np.asarray(w, dtype=np.float64)
    check_weights(w)
    if not np.any(w):
        return np.array(M, dtype=np.float64, copy=True)
    return weighted_sv_shrink(thin_svd(M), w, p).to_matrix()


def wspn_value(M, w, p):
    """sum_k w_k sigma_k(M)^p.
    """
    s = np.linalg.svd(np.asarray(M, dtype=np.float64), compute_uv=False)
    w = np.asarray(w, dtype=np.float64)
    if w.shape != s.shape:
        raise WeightError('%d weights for %d singular values' % (w.size, s.size))
    check_weights(w)
    return float(np.sum(w * s ** p))


def wtspn_value(X, spec):
    """sum_m gamma_m * wspn_value(unfold_m(X), w_m, p).

    :type spec: WeightSpec
    """
    if spec.order != X.ndim:
        raise WeightError('weight spec of order %d for an order %d tensor'
                          % (spec.order, X.ndim))
    spec.check_shape(X.shape)
    return float(sum(g * wspn_value(unfold(X, m), w, spec.p)
                     for m, (g, w) in enumerate(zip(spec.gamma, spec.per_mode))))


def rank_truncate(M, r):
    """Best rank-r approximation of M (keeps the r largest singular values).
    """
    M = np.asarray(M, dtype=np.float64)
    k = min(M.shape)
    if not 0 <= r <= k:
        raise ValueError('rank %r out of range [0, %d]' % (r, k))
    if r == k:
        return M.copy()

    U, s, V = thin_svd(M)
    return np.dot(U[:, :r] * s[:r], V[:, :r].T)


def ball_project(P, center, radius):
    """Metric projection of P onto the l2 ball B(center, radius).
    """
    P = np.asarray(P, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if P.shape != center.shape:
        raise TensorShapeError('cannot project a %s tensor on a ball centered'
                               ' at a %s tensor' % (P.shape, center.shape))
    if radius < 0:
        raise ValueError('ball radius must be nonnegative, got %r' % radius)

    d = P - center
    dist = l2_norm(d)
    if dist <= radius:
        return P.copy()
    return center + (radius / dist) * d


def dump_threshold_csv(path, singulars, weights, shrunk):
    """Write (sigma, weight, thresholded sigma) rows for diagnostics.
    """
    table = np.column_stack([singulars, weights, shrunk])
    np.savetxt(path, table, delimiter=',', fmt='%.17g',
               header='sigma,weight,thresholded', comments='')
    logger.debug('Wrote %d threshold triples to %s', len(table), path)
