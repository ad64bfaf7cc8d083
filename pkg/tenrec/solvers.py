# -*- coding: utf-8 -*-
"""
    tenrec.solvers
    ~~~~~~~~~~~~~~

    ADMM loops for weighted tensor Schatten-p minimization under an l2 ball
    constraint ('wtspn') and for rank constrained least squares ('rc').

    Both loops share the splitting::

        X      <- argmin 1/2 sum_m ||Y1_m - unfold_m(X) - Z1_m||^2
                         + lam ||Y2 - A_Omega(X) - Z2||^2
        Y1_m   <- mode step on unfold_m(X) + Z1_m
        Z1_m   <- Z1_m + unfold_m(X) - Y1_m
        Y2     <- data step on X + Z2
        Z2     <- Z2 + A_Omega(X) - Y2
        lam    <- decay * lam

    and differ only in the mode step (weighted Schatten-p prox or rank
    truncation) and the data step (ball projection or quadratic fit).

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

import csv
import math

import numpy as np

from .common import logger, SolverDivergence, TensorShapeError
from .spectral import (WeightSpec, wspn_prox, rank_truncate, ball_project,
                       wtspn_value)
from .tensor import fold, unfold, mask_apply, l2_norm, min_dims
from .weighting import mean_fill

#: Any state entry above this magnitude aborts the solve.
DIVERGENCE_LIMIT = 1e12

#: Header of the per iteration trace.
TRACE_FIELDS = ('k', 'lambda', 'objective', 'ball_residual', 'rel_change')


class _Config(object):

    def __init__(self, lambda0=100., decay=0.99, max_iter=500, rel_tol=1e-7):
        if not lambda0 > 0:
            raise ValueError('lambda0 must be positive, got %r' % lambda0)
        if not 0 < decay <= 1:
            raise ValueError('decay must be in (0, 1], got %r' % decay)
        if int(max_iter) != max_iter or max_iter < 1:
            raise ValueError('max_iter must be a positive integer, got %r'
                             % max_iter)
        if not rel_tol >= 0:
            raise ValueError('rel_tol must be nonnegative, got %r' % rel_tol)

        self.lambda0 = float(lambda0)
        self.decay = float(decay)
        self.max_iter = int(max_iter)
        self.rel_tol = float(rel_tol)

    def lam(self, k):
        """lambda0 * decay^k, the penalty used during iteration k.
        """
        return self.lambda0 * self.decay ** k


class WtspnSolverConfig(_Config):
    """Inputs of the ball constrained WTSPN solver.

    :type weights: WeightSpec
    :param sigma_n: noise standard deviation, sets the ball radius
                    sigma_n * sqrt(|Omega|).
    """

    def __init__(self, weights, sigma_n=0., **kwargs):
        super(WtspnSolverConfig, self).__init__(**kwargs)
        if not isinstance(weights, WeightSpec):
            raise TypeError('weights must be a WeightSpec, not %s'
                            % type(weights).__name__)
        if sigma_n < 0:
            raise ValueError('sigma_n must be nonnegative, got %r' % sigma_n)
        self.weights = weights
        self.sigma_n = float(sigma_n)


class RcSolverConfig(_Config):
    """Inputs of the rank constrained solver.

    :param target_ranks: upper bound of the rank of every mode unfolding.
    :param sigma_n: only used to report the ball residual.
    """

    def __init__(self, target_ranks, sigma_n=0., **kwargs):
        super(RcSolverConfig, self).__init__(**kwargs)
        target_ranks = tuple(int(r) for r in target_ranks)
        if any(r < 1 for r in target_ranks):
            raise ValueError('target ranks must be positive, got %s'
                             % (target_ranks, ))
        self.target_ranks = target_ranks
        self.sigma_n = float(sigma_n)

    def check_shape(self, shape):
        if len(self.target_ranks) != len(shape):
            raise TensorShapeError('%d target ranks for an order %d tensor'
                                   % (len(self.target_ranks), len(shape)))
        for m, (r, k) in enumerate(zip(self.target_ranks, min_dims(shape))):
            if r > k:
                raise ValueError('target rank %d of mode %d exceeds %d'
                                 % (r, m, k))


class SolverState(object):
    """Primal and dual variables of one ADMM run.
    """

    def __init__(self, X, Y1, Z1, Y2, Z2, k, lam):
        self.X = X
        self.Y1 = list(Y1)
        self.Z1 = list(Z1)
        self.Y2 = Y2
        self.Z2 = Z2
        self.k = k
        self.lam = lam

    @classmethod
    def initial(cls, Y, lambda0):
        """Y1_m = unfold_m(Y), Y2 = Y, all duals zero. X is set by the
        first X update.
        """
        Y1 = [unfold(Y, m) for m in range(Y.ndim)]
        Z1 = [np.zeros_like(M) for M in Y1]
        return cls(None, Y1, Z1, np.array(Y, dtype=np.float64, copy=True),
                   np.zeros(Y.shape), 0, float(lambda0))

    @property
    def shape(self):
        return self.Y2.shape

    def arrays(self):
        if self.X is not None:
            yield self.X
        for M in self.Y1 + self.Z1:
            yield M
        yield self.Y2
        yield self.Z2


class SolverResult(object):
    """Outcome of a solve.

    :param X_hat: last primal iterate.
    :param iterations: number of completed iterations.
    :param ball_residual: max(||A_Omega(X_hat) - Y|| - sigma_n sqrt(|Omega|), 0).
    :param converged: True if the relative change rule stopped the loop.
    :param trace: list of TRACE_FIELDS tuples, empty unless requested.
    """

    def __init__(self, X_hat, iterations, ball_residual, converged, trace=(),
                 state=None):
        self.X_hat = X_hat
        self.iterations = iterations
        self.ball_residual = ball_residual
        self.converged = converged
        self.trace = list(trace)

        #: Final SolverState, kept for diagnostics.
        self.state = state

    def __repr__(self):
        return ('<SolverResult %d iterations, converged=%s, ball_residual=%g>'
                % (self.iterations, self.converged, self.ball_residual))


def x_update(state, mask):
    """Closed form minimizer of the X subproblem.

    Every unfolding is a bijection of the entries, so the quadratic
    decouples per entry::

        X = [sum_m fold_m(Y1_m - Z1_m) + 2 lam 1_Omega (Y2 - Z2)]
            / (N + 2 lam 1_Omega)
    """
    shape = state.shape
    N = len(state.Y1)
    acc = np.zeros(shape)
    for m in range(N):
        acc += fold(state.Y1[m] - state.Z1[m], m, shape)

    ind = mask.indicator
    two_lam = 2 * state.lam
    return (acc + two_lam * ind * (state.Y2 - state.Z2)) / (N + two_lam * ind)


def y1_update_wtspn(state, m, config):
    """Weighted Schatten-p prox of unfold_m(X) + Z1_m with weights
    lam * gamma_m * w_m.
    """
    weights = config.weights
    return wspn_prox(unfold(state.X, m) + state.Z1[m],
                     weights.mode_weights(m, state.lam), weights.p)


def y2_update_wtspn(state, Y, mask, sigma_n):
    """Projection of the observed part of X + Z2 onto the ball around Y of
    radius sigma_n sqrt(|Omega|); missing entries pass through.
    """
    V = state.X + state.Z2
    observed = mask.observed
    radius = sigma_n * math.sqrt(mask.count)

    out = V.copy()
    out[observed] = ball_project(V[observed], Y[observed], radius)
    return out


def y1_update_rc(state, m, rank):
    """Best rank-r approximation of unfold_m(X) + Z1_m.
    """
    return rank_truncate(unfold(state.X, m) + state.Z1[m], rank)


def y2_update_rc(state, Y, mask, lam):
    """Minimizer of lam ||A_Omega(V') - Y||^2 + 1/2 ||X + Z2 - V'||^2.
    """
    V = state.X + state.Z2
    return np.where(mask.observed, (2 * lam * Y + V) / (2 * lam + 1), V)


def ball_residual(X, Y, mask, sigma_n):
    gap = l2_norm(mask_apply(X, mask) - mask_apply(Y, mask))
    return max(gap - sigma_n * math.sqrt(mask.count), 0.)


def mean_fill_baseline(Y, mask):
    """Reference recovery: observed entries kept, the rest set to their mean.
    """
    return mean_fill(Y, mask)


class AdmmSolver(object):
    """Base class of the ADMM loops.

    Subclasses provide the mode step and the data step; the X update, dual
    updates, penalty schedule, stopping rule and divergence guard live here.

    :param Y: observation tensor, zero on the missing entries.
    :type mask: tenrec.tensor.ObservationMask
    :param config: solver configuration.
    :param executor: optional concurrent.futures.Executor used for the
                     independent mode steps.
    :param trace: record a per iteration trace.
    """

    #: Maps a solver name to the class implementing it.
    #: dict[str, AdmmSolver]
    _solver_classes = dict()

    #: Registered name.
    name = None

    @classmethod
    def get_solver_class(cls, name):
        """Return the solver class registered under name.
        """
        try:
            return cls._solver_classes[name]
        except KeyError:
            raise ValueError('No solver registered for %r' % (name, ))

    @classmethod
    def register(cls, name):
        """Register a solver class under name.
        """
        def _internal(python_class):
            if name in cls._solver_classes:
                logger.warning('%s is already registered. Overwriting with %s',
                               name, python_class)

            python_class.name = name
            cls._solver_classes[name] = python_class
            return python_class
        return _internal

    def __init__(self, Y, mask, config, executor=None, trace=False):
        Y = np.asarray(Y, dtype=np.float64)
        mask.check_shape(Y)
        if mask.count < 1:
            raise ValueError('at least one entry must be observed')

        self.Y = Y
        self.mask = mask
        self.config = config
        self.executor = executor
        self.record_trace = trace
        self.after_init()

    def after_init(self):
        """Override in derived class to validate the configuration against
        the observation.
        """
        pass

    def y1_update(self, state, m):
        raise NotImplementedError()

    def y2_update(self, state):
        raise NotImplementedError()

    def objective(self, X):
        raise NotImplementedError()

    def ball_residual(self, X):
        return ball_residual(X, self.Y, self.mask, self.config.sigma_n)

    def _mode_steps(self, state):
        modes = range(len(state.Y1))
        if self.executor is None:
            return [self.y1_update(state, m) for m in modes]
        return list(self.executor.map(lambda m: self.y1_update(state, m), modes))

    def step(self, state):
        """Run one iteration in place.
        """
        mask = self.mask
        state.X = X = x_update(state, mask)

        Y1 = self._mode_steps(state)
        state.Z1 = [Z + unfold(X, m) - Y1[m] for m, Z in enumerate(state.Z1)]
        state.Y1 = Y1

        Y2 = self.y2_update(state)
        state.Z2 = state.Z2 + mask_apply(X, mask) - Y2
        state.Y2 = Y2

        state.k += 1
        state.lam = self.config.lam(state.k)

    def _check_divergence(self, state):
        for arr in state.arrays():
            if not np.all(np.isfinite(arr)) or np.max(np.abs(arr)) > DIVERGENCE_LIMIT:
                raise SolverDivergence('%s solver diverged at iteration %d'
                                       % (self.name, state.k), state.k)

    def solve(self):
        """Iterate until the relative change of X drops below rel_tol or
        max_iter iterations are done.

        :rtype: SolverResult
        """
        config = self.config
        state = SolverState.initial(self.Y, config.lambda0)
        trace = []
        converged = False

        X_prev = None
        while state.k < config.max_iter:
            lam = state.lam
            self.step(state)
            self._check_divergence(state)

            rel_change = float('nan')
            if X_prev is not None:
                rel_change = (l2_norm(state.X - X_prev)
                              / max(l2_norm(X_prev), 1e-12))

            if self.record_trace:
                trace.append((state.k, lam, self.objective(state.X),
                              self.ball_residual(state.X), rel_change))

            logger.debug('%s iteration %d: lambda=%g rel_change=%g',
                         self.name, state.k, lam, rel_change)

            if rel_change <= config.rel_tol:
                converged = True
                break
            X_prev = state.X

        residual = self.ball_residual(state.X)
        logger.info('%s solver stopped after %d iterations (converged=%s, '
                    'ball residual %g)', self.name, state.k, converged, residual)
        return SolverResult(state.X, state.k, residual, converged, trace, state)


@AdmmSolver.register('wtspn')
class WtspnSolver(AdmmSolver):
    """Weighted tensor Schatten-p minimization inside the l2 ball
    B(Y, sigma_n sqrt(|Omega|)).
    """

    def after_init(self):
        self.config.weights.check_shape(self.Y.shape)

    def y1_update(self, state, m):
        return y1_update_wtspn(state, m, self.config)

    def y2_update(self, state):
        return y2_update_wtspn(state, self.Y, self.mask, self.config.sigma_n)

    def objective(self, X):
        return wtspn_value(X, self.config.weights)


@AdmmSolver.register('rc')
class RcSolver(AdmmSolver):
    """Least squares fit on the observed entries with per mode rank bounds.
    """

    def after_init(self):
        self.config.check_shape(self.Y.shape)

    def y1_update(self, state, m):
        return y1_update_rc(state, m, self.config.target_ranks[m])

    def y2_update(self, state):
        return y2_update_rc(state, self.Y, self.mask, state.lam)

    def objective(self, X):
        return l2_norm(mask_apply(X, self.mask) - mask_apply(self.Y, self.mask)) ** 2


def solve(name, Y, mask, config, executor=None, trace=False):
    """Run the solver registered under name.

    :rtype: SolverResult
    """
    cls = AdmmSolver.get_solver_class(name)
    return cls(Y, mask, config, executor, trace).solve()


def wtspn_admm_solve(Y, mask, config, executor=None, trace=False):
    """Ball constrained WTSPN minimization.

    :type config: WtspnSolverConfig
    :rtype: SolverResult
    """
    return solve('wtspn', Y, mask, config, executor, trace)


def rc_admm_solve(Y, mask, config, executor=None, trace=False):
    """Rank constrained minimization.

    :type config: RcSolverConfig
    :rtype: SolverResult
    """
    return solve('rc', Y, mask, config, executor, trace)


def write_trace_csv(path, trace):
    """Write a solver trace as CSV.
    """
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp)
        writer.writerow(TRACE_FIELDS)
        for row in trace:
            writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
