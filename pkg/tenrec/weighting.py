# -*- coding: utf-8 -*-
"""
    tenrec.weighting
    ~~~~~~~~~~~~~~~~

    Weight schemes of the weighted tensor Schatten-p norm: ideal (from the
    original tensor), observation (from the mean filled observation) and
    uniform.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

import csv

import numpy as np

from .common import logger, WeightError
from .spectral import WeightSpec, check_weights
from .tensor import min_dims, unfold

#: Singular values below DEFAULT_CLAMP * sigma_1 are raised to that floor
#: before being inverted.
DEFAULT_CLAMP = 1e-8

IDEAL = 'ideal'
OBSERVATION = 'observation'
UNIFORM = 'uniform'

#: Short labels used in figure legends and result files.
LABELS = {IDEAL: 'Id', OBSERVATION: 'Obs', UNIFORM: 'Uni'}

#: Maps a scheme name to the function building its per mode weights.
#: dict[str, callable]
_schemes = dict()


def register_scheme(name):
    """Register a per mode weight builder for a scheme name.

    The builder is called as ``builder(choice, shape, clamp)`` and returns
    one weight vector per mode.
    """
    def _internal(func):
        if name in _schemes:
            logger.warning('Weight scheme %s is already registered. '
                           'Overwriting with %s', name, func)
        _schemes[name] = func
        return func
    return _internal


def get_scheme(name):
    try:
        return _schemes[name]
    except KeyError:
        raise ValueError('Unknown weight scheme %r, expected one of %s'
                         % (name, ', '.join(sorted(_schemes))))


def list_schemes():
    return tuple(sorted(_schemes))


class WeightSchemeChoice(object):
    """A weight scheme together with its parameter and reference data.

    :param kind: 'ideal', 'observation' or 'uniform'.
    :param alpha: exponent of the inverted singular values (not used by
                  the uniform scheme).
    :param reference: (X_org, ) for ideal weights, (Y, mask) for observation
                      weights, () for uniform ones.
    """

    def __init__(self, kind, alpha=None, reference=()):
        get_scheme(kind)
        if (alpha is None) != (kind == UNIFORM):
            raise ValueError('alpha must be given for the %s scheme only if it'
                             ' is not uniform, got %r' % (kind, alpha))
        if alpha is not None and alpha < 0:
            raise ValueError('alpha must be nonnegative, got %r' % alpha)

        self.kind = kind
        self.alpha = None if alpha is None else float(alpha)
        self.reference = tuple(reference)

    @property
    def label(self):
        return LABELS.get(self.kind, self.kind)

    def __repr__(self):
        if self.alpha is None:
            return '<WeightSchemeChoice %s>' % self.kind
        return '<WeightSchemeChoice %s alpha=%g>' % (self.kind, self.alpha)


def _inverse_power_weights(s, alpha, clamp):
    """R * s_i^-alpha / sum_k s_k^-alpha for nonincreasing s.
    """
    R = s.size
    if s[0] <= 0:
        return np.ones(R)

    ratio = s / s[0]
    clamped = ratio < clamp
    if np.any(clamped):
        logger.debug('Clamped %d of %d singular values to %g * sigma_1',
                     np.count_nonzero(clamped), R, clamp)
    # log of ratio^-alpha, shifted so the largest term is exp(0)
    log_inv = -alpha * np.log(np.maximum(ratio, clamp))
    inv = np.exp(log_inv - log_inv.max())
    w = R * inv / inv.sum()

    # rounding can break ties between clamped values
    return np.maximum.accumulate(w)


def ideal_weights(X_org, alpha, clamp=DEFAULT_CLAMP):
    """Per mode weights from the singular values of the original tensor.

    :return: one nondecreasing weight vector per mode; each sums to R, the
             smaller dimension of that mode's unfolding.
    :rtype: tuple[numpy.ndarray]
    """
    if alpha < 0:
        raise ValueError('alpha must be nonnegative, got %r' % alpha)
    if not clamp > 0:
        raise ValueError('clamp must be positive, got %r' % clamp)

    weights = []
    for m in range(X_org.ndim):
        s = np.linalg.svd(unfold(X_org, m), compute_uv=False)
        w = _inverse_power_weights(s, alpha, clamp)
        check_weights(w, 'mode %d weights' % m)
        weights.append(w)
    return tuple(weights)


def mean_fill(Y, mask):
    """Fill the missing entries of Y with the mean of the observed ones.
    """
    mask.check_shape(Y)
    if mask.count == 0:
        raise ValueError('cannot mean fill with an empty mask')
    mean = Y[mask.observed].mean()
    return np.where(mask.observed, Y, mean)


def observation_weights(Y, mask, alpha, clamp=DEFAULT_CLAMP):
    """Ideal weights formula applied to the mean filled observation.
    """
    return ideal_weights(mean_fill(Y, mask), alpha, clamp)


def uniform_weights(shape):
    """All ones weight vectors.
    """
    return tuple(np.ones(k) for k in min_dims(shape))


@register_scheme(IDEAL)
def _ideal(choice, shape, clamp):
    X_org, = choice.reference
    return ideal_weights(X_org, choice.alpha, clamp)


@register_scheme(OBSERVATION)
def _observation(choice, shape, clamp):
    Y, mask = choice.reference
    return observation_weights(Y, mask, choice.alpha, clamp)


@register_scheme(UNIFORM)
def _uniform(choice, shape, clamp):
    return uniform_weights(shape)


def make_weight_spec(choice, shape, p, gamma=None, clamp=DEFAULT_CLAMP):
    """Resolve a scheme choice into a complete WeightSpec.

    :type choice: WeightSchemeChoice
    :param shape: shape of the tensor to recover.
    :param p: Schatten exponent.
    :param gamma: mode coefficients, 1/N each by default.
    :rtype: WeightSpec
    """
    try:
        per_mode = get_scheme(choice.kind)(choice, tuple(shape), clamp)
    except ValueError as e:
        raise WeightError('Could not build %r weights: %s' % (choice, e))

    if gamma is None:
        spec = WeightSpec.with_equal_gamma(per_mode, p)
    else:
        spec = WeightSpec(per_mode, gamma, p)
    spec.check_shape(shape)
    return spec


def export_weights_csv(path, spec):
    """Write (mode, index, weight) rows.

    :type spec: WeightSpec
    """
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp)
        writer.writerow(['mode', 'index', 'weight'])
        for m, w in enumerate(spec.per_mode):
            for i, value in enumerate(w):
                writer.writerow([m, i, repr(float(value))])
