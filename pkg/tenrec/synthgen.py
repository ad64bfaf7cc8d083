# -*- coding: utf-8 -*-
"""
    tenrec.synthgen
    ~~~~~~~~~~~~~~~

    Synthetic Tucker tensors, the observation process and the recovery error.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

import json
import os

import numpy as np

from .common import logger, TensorShapeError
from .tensor import (ObservationMask, as_tensor, l2_norm, mask_apply,
                     save_tensor, load_tensor, save_mask, load_mask)

# Sub-stream slots spawned from every seed.
_CORE, _FACTORS, _NOISE, _MASK = range(4)

SIDECAR = 'instance.json'


def _streams(seed):
    return [np.random.default_rng(s)
            for s in np.random.SeedSequence(seed).spawn(4)]


class TuckerSpec(object):
    """Shape, Tucker ranks and seed of a synthetic tensor.
    """

    def __init__(self, shape, ranks, seed=0):
        shape = tuple(int(n) for n in shape)
        ranks = tuple(int(r) for r in ranks)
        if len(shape) != len(ranks):
            raise TensorShapeError('%d dimensions but %d ranks'
                                   % (len(shape), len(ranks)))
        for n, r in zip(shape, ranks):
            if not 1 <= r <= n:
                raise ValueError('Tucker ranks %s incompatible with shape %s'
                                 % (ranks, shape))
        self.shape = shape
        self.ranks = ranks
        self.seed = int(seed)

    def with_seed(self, seed):
        return TuckerSpec(self.shape, self.ranks, seed)

    def to_dict(self):
        return {'shape': list(self.shape), 'ranks': list(self.ranks),
                'seed': self.seed}

    @classmethod
    def from_dict(cls, dd):
        return cls(dd['shape'], dd['ranks'], dd.get('seed', 0))

    def __eq__(self, other):
        return isinstance(other, TuckerSpec) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<TuckerSpec %s ranks=%s seed=%d>' % (
            'x'.join(map(str, self.shape)), self.ranks, self.seed)


class ObservationSpec(object):
    """Missing rate, noise level and seed of the observation process.
    """

    def __init__(self, missing_rate, sigma_n=0., seed=0):
        if not 0 <= missing_rate < 1:
            raise ValueError('missing_rate must be in [0, 1), got %r'
                             % missing_rate)
        if sigma_n < 0:
            raise ValueError('sigma_n must be nonnegative, got %r' % sigma_n)
        self.missing_rate = float(missing_rate)
        self.sigma_n = float(sigma_n)
        self.seed = int(seed)

    def with_seed(self, seed):
        return ObservationSpec(self.missing_rate, self.sigma_n, seed)

    def observed_count(self, shape):
        """round((1 - missing_rate) * prod(shape)), at least one.
        """
        total = int(np.prod(shape))
        return max(int(round((1 - self.missing_rate) * total)), 1)

    def to_dict(self):
        return {'missing_rate': self.missing_rate, 'sigma_n': self.sigma_n,
                'seed': self.seed}

    @classmethod
    def from_dict(cls, dd):
        return cls(dd['missing_rate'], dd.get('sigma_n', 0.), dd.get('seed', 0))

    def __eq__(self, other):
        return (isinstance(other, ObservationSpec)
                and self.to_dict() == other.to_dict())

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<ObservationSpec missing=%g sigma_n=%g seed=%d>' % (
            self.missing_rate, self.sigma_n, self.seed)


def generate_tucker(spec):
    """Tucker tensor with core entries in U[0, 1] and factor entries in
    U[-0.5, 0.5], scaled so that max - min = 1.

    :type spec: TuckerSpec
    """
    streams = _streams(spec.seed)
    X = streams[_CORE].uniform(0., 1., size=spec.ranks)

    factor_rng = streams[_FACTORS]
    for k, (n, r) in enumerate(zip(spec.shape, spec.ranks)):
        U = factor_rng.uniform(-0.5, 0.5, size=(n, r))
        X = np.moveaxis(np.tensordot(U, X, axes=(1, k)), 0, k)

    spread = X.max() - X.min()
    if spread > 0:
        X = X / spread
    else:
        logger.warning('Generated tensor for %r is constant', spec)
    return np.ascontiguousarray(X)


def observe(X_org, spec):
    """Y = A_Omega(X_org + V) with V i.i.d. N(0, sigma_n^2) and Omega drawn
    uniformly without replacement.

    :type spec: ObservationSpec
    :rtype: (numpy.ndarray, tenrec.tensor.ObservationMask)
    """
    X_org = as_tensor(X_org)
    streams = _streams(spec.seed)

    V = spec.sigma_n * streams[_NOISE].standard_normal(X_org.shape)

    total = X_org.size
    flat = streams[_MASK].choice(total, size=spec.observed_count(X_org.shape),
                                 replace=False)
    mask = ObservationMask.from_indices(X_org.shape, flat)

    return mask_apply(X_org + V, mask), mask


def recovery_error(X_hat, X_ref):
    """l2 norm of the difference divided by the number of entries.
    """
    X_hat = np.asarray(X_hat, dtype=np.float64)
    X_ref = np.asarray(X_ref, dtype=np.float64)
    if X_hat.shape != X_ref.shape:
        raise TensorShapeError('cannot compare a %s tensor with a %s one'
                               % (X_hat.shape, X_ref.shape))
    return l2_norm(X_hat - X_ref) / X_ref.size


def save_instance(directory, X_org, Y, mask, tucker_spec, obs_spec):
    """Write an instance as TNR1 files plus a JSON sidecar.
    """
    if not os.path.isdir(directory):
        os.makedirs(directory)

    save_tensor(os.path.join(directory, 'x_org.tnr'), X_org)
    save_tensor(os.path.join(directory, 'y.tnr'), Y)
    save_mask(os.path.join(directory, 'mask.tnr'), mask)

    sidecar = {'tucker': tucker_spec.to_dict(),
               'observation': obs_spec.to_dict(),
               'observed': mask.count}
    with open(os.path.join(directory, SIDECAR), 'w') as fp:
        json.dump(sidecar, fp, indent=2, sort_keys=True)
        fp.write('\n')
    logger.info('Saved instance %r / %r to %s', tucker_spec, obs_spec, directory)


def load_instance(directory):
    """Read an instance written by :func:`save_instance`.

    :return: X_org, Y, mask, tucker spec, observation spec.
    """
    with open(os.path.join(directory, SIDECAR)) as fp:
        sidecar = json.load(fp)

    X_org = load_tensor(os.path.join(directory, 'x_org.tnr'))
    Y = load_tensor(os.path.join(directory, 'y.tnr'))
    mask = load_mask(os.path.join(directory, 'mask.tnr'))

    return (X_org, Y, mask, TuckerSpec.from_dict(sidecar['tucker']),
            ObservationSpec.from_dict(sidecar['observation']))
