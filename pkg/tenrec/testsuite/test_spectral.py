# -*- coding: utf-8 -*-

from __future__ import absolute_import

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import minimize_scalar

from tenrec.common import WeightError
from tenrec.spectral import (thin_svd, numerical_rank, p_threshold,
                             p_threshold_level, scalar_p_threshold,
                             weighted_sv_shrink, wspn_prox, wspn_value,
                             wtspn_value, rank_truncate, ball_project,
                             WeightSpec, check_weights, dump_threshold_csv)
from tenrec.tensor import unfold


def scalar_objective(x, y, w, p):
    return 0.5 * (y - x) ** 2 + w * abs(x) ** p


def brute_force_threshold(y, w, p):
    """Grid search on [0, |y|] refined by a bounded scalar minimization.
    """
    a = abs(y)
    if a == 0:
        return 0.
    grid = np.linspace(0., a, 2001)
    values = 0.5 * (a - grid) ** 2 + w * grid ** p
    i = int(np.argmin(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    refined = minimize_scalar(lambda x: scalar_objective(x, a, w, p),
                              bounds=(lo, hi), method='bounded',
                              options={'xatol': 1e-12}).x
    best = min([0., refined, a], key=lambda x: scalar_objective(x, a, w, p))
    return np.sign(y) * best


@pytest.mark.parametrize('p', [1., 0.5, 2. / 3, 0.3])
def test_scalar_threshold_against_brute_force(p):
    rng = np.random.default_rng(7)
    count = 1000 if p != 0.3 else 200
    for y, w in zip(rng.uniform(-10, 10, count), rng.uniform(0, 5, count)):
        x = scalar_p_threshold(y, w, p)
        ref = brute_force_threshold(y, w, p)
        f, f_ref = scalar_objective(x, y, w, p), scalar_objective(ref, y, w, p)
        assert f <= f_ref + 1e-10 * max(1., abs(f_ref)), \
            'p=%r y=%r w=%r: %r (%r) vs %r (%r)' % (p, y, w, x, f, ref, f_ref)

        # away from the jump both minimizers must coincide
        if abs(abs(y) - float(p_threshold_level(w, p))) > 1e-3:
            assert abs(x - ref) <= 1e-6 * max(1., abs(ref)), \
                'p=%r y=%r w=%r: %r vs %r' % (p, y, w, x, ref)


@pytest.mark.parametrize('p', [0.5, 2. / 3, 0.3])
def test_threshold_jump(p):
    w = 1.3
    level = float(p_threshold_level(w, p))
    assert scalar_p_threshold(level * (1 - 1e-6), w, p) == 0.
    assert scalar_p_threshold(-level * (1 - 1e-6), w, p) == 0.
    assert scalar_p_threshold(level * (1 + 1e-6), w, p) > 0.
    assert scalar_p_threshold(-level * (1 + 1e-6), w, p) < 0.


@pytest.mark.parametrize('p', [0.5, 2. / 3])
def test_threshold_tie_returns_nonzero(p):
    w = 1.3
    level = float(p_threshold_level(w, p))
    at = scalar_p_threshold(level, w, p)
    assert at > 0.
    assert scalar_objective(at, level, w, p) == pytest.approx(
        scalar_objective(0., level, w, p), rel=1e-6)


def test_soft_threshold():
    y = np.array([-3., -0.5, 0., 0.5, 3.])
    assert_allclose(p_threshold(y, 1., 1.), [-2., 0., 0., 0., 2.])


@pytest.mark.parametrize('p', [1., 0.5, 2. / 3])
def test_threshold_shrinks_and_keeps_sign(p):
    rng = np.random.default_rng(1)
    y = rng.uniform(-10, 10, 500)
    x = p_threshold(y, rng.uniform(0, 5, 500), p)
    assert np.all(np.abs(x) <= np.abs(y) + 1e-12)
    assert np.all(x * y >= 0)


def test_zero_weight_is_identity():
    y = np.array([-2., 0.1, 7.])
    for p in (1., 0.5, 2. / 3, 0.4):
        assert_allclose(p_threshold(y, 0., p), y)


def test_threshold_argument_errors():
    with pytest.raises(ValueError):
        p_threshold([1.], [-1.], 1.)
    with pytest.raises(ValueError):
        p_threshold([1.], [1.], 0.)
    with pytest.raises(ValueError):
        p_threshold([1.], [1.], 1.5)


def test_thin_svd_reconstruction(rng):
    for _ in range(50):
        M = rng.standard_normal((int(rng.integers(1, 8)), int(rng.integers(1, 8))))
        svd = thin_svd(M)
        assert svd.U.shape[1] == svd.V.shape[1] == min(M.shape)
        assert np.all(np.diff(svd.singulars) <= 0)
        err = np.linalg.norm(svd.to_matrix() - M) / max(np.linalg.norm(M), 1e-300)
        assert err <= 1e-10


def test_thin_svd_rejects_non_finite():
    with pytest.raises(ValueError):
        thin_svd(np.array([[1., np.nan]]))


def test_numerical_rank(rng):
    M = np.dot(rng.standard_normal((8, 3)), rng.standard_normal((3, 6)))
    assert numerical_rank(M) == 3
    assert numerical_rank(np.zeros((3, 3))) == 0


def test_weighted_shrink_p1_is_soft_thresholding(rng):
    M = rng.standard_normal((5, 7))
    svd = thin_svd(M)
    w = np.linspace(0.1, 1., 5)
    shrunk = weighted_sv_shrink(svd, w, 1.)
    assert_allclose(shrunk.singulars, np.maximum(svd.singulars - w, 0.))
    assert np.all(np.diff(shrunk.singulars) <= 1e-12)


def test_weighted_shrink_length_mismatch(rng):
    with pytest.raises(WeightError):
        weighted_sv_shrink(thin_svd(rng.standard_normal((4, 4))), np.ones(3), 1.)


@pytest.mark.parametrize('p', [1., 0.5, 2. / 3])
def test_wspn_prox_is_a_minimizer(p, rng):
    M = rng.standard_normal((6, 4)) * 3
    w = np.sort(rng.uniform(0, 2, 4))
    P = wspn_prox(M, w, p)

    def objective(A):
        return wspn_value(A, w, p) + 0.5 * np.linalg.norm(A - M) ** 2

    best = objective(P)
    for _ in range(100):
        other = P + 1e-3 * rng.standard_normal(P.shape)
        assert best <= objective(other) + 1e-12


def test_wspn_prox_zero_weights(rng):
    M = rng.standard_normal((3, 5))
    P = wspn_prox(M, np.zeros(3), 0.5)
    assert_allclose(P, M)
    assert P is not M


def test_wtspn_value_uniform_p1_is_average_nuclear_norm(rng):
    X = rng.standard_normal((3, 4, 5))
    spec = WeightSpec.with_equal_gamma([np.ones(3), np.ones(4), np.ones(5)], 1.)
    expected = np.mean([np.linalg.norm(unfold(X, m), 'nuc') for m in range(3)])
    assert wtspn_value(X, spec) == pytest.approx(expected)


def test_weight_spec_validation():
    with pytest.raises(WeightError):
        WeightSpec([np.ones(2), np.ones(2)], [0.5, 0.6], 1.)
    with pytest.raises(WeightError):
        WeightSpec([np.array([2., 1.])], [1.], 1.)
    with pytest.raises(WeightError):
        WeightSpec([np.ones(2)], [1.], 1.5)
    with pytest.raises(WeightError):
        WeightSpec([np.ones(2)], [0.5, 0.5], 1.)

    spec = WeightSpec.with_equal_gamma([np.ones(2)] * 3, 0.5)
    assert_allclose(spec.gamma, [1. / 3] * 3)
    assert_allclose(spec.mode_weights(1, 6.), [2., 2.])
    spec.check_shape((2, 2, 2))
    with pytest.raises(WeightError):
        spec.check_shape((3, 3, 3))


def test_check_weights():
    check_weights(np.array([0., 0., 1.]))
    with pytest.raises(WeightError):
        check_weights(np.array([1., -1.]))
    with pytest.raises(WeightError):
        check_weights(np.ones((2, 2)))


@pytest.mark.parametrize('bad', [[0., np.nan, np.nan], [1., np.inf]])
def test_check_weights_rejects_non_finite(bad):
    with pytest.raises(WeightError):
        check_weights(np.array(bad))
    with pytest.raises(WeightError):
        WeightSpec.with_equal_gamma([np.array(bad)], 1.)


def test_rank_truncate_eckart_young(rng):
    M = rng.standard_normal((7, 5))
    s = np.linalg.svd(M, compute_uv=False)
    for r in range(6):
        T = rank_truncate(M, r)
        assert numerical_rank(T) == r if r else np.allclose(T, 0)
        assert np.linalg.norm(M - T) == pytest.approx(np.sqrt(np.sum(s[r:] ** 2)),
                                                      abs=1e-10)
    with pytest.raises(ValueError):
        rank_truncate(M, 6)


def test_ball_projection(rng):
    for _ in range(500):
        shape = (3, 4)
        P = rng.standard_normal(shape) * rng.uniform(0.1, 5)
        Q = rng.standard_normal(shape) * rng.uniform(0.1, 5)
        center = rng.standard_normal(shape)
        radius = rng.uniform(0, 3)

        proj = ball_project(P, center, radius)
        assert np.linalg.norm(proj - center) <= radius * (1 + 1e-12) + 1e-12
        assert_allclose(ball_project(proj, center, radius), proj, atol=1e-12)
        assert (np.linalg.norm(proj - ball_project(Q, center, radius))
                <= np.linalg.norm(P - Q) + 1e-12)


def test_ball_projection_radius_zero(rng):
    center = rng.standard_normal(5)
    assert_allclose(ball_project(rng.standard_normal(5), center, 0.), center)
    with pytest.raises(ValueError):
        ball_project(center, center, -1.)


def test_dump_threshold_csv(tmpdir):
    path = str(tmpdir.join('t.csv'))
    dump_threshold_csv(path, [3., 1.], [0.5, 2.], [2.5, 0.])
    with open(path) as fp:
        assert fp.readline().strip() == 'sigma,weight,thresholded'
    assert_allclose(np.loadtxt(path, delimiter=',', skiprows=1),
                    [[3., 0.5, 2.5], [1., 2., 0.]])
