import os

import numpy as np
import pytest

from tenrec.synthgen import TuckerSpec, ObservationSpec, generate_tucker, observe

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture
def rng():
    return np.random.default_rng(20210)


@pytest.fixture(scope='session')
def small_instance():
    """6x6x6 Tucker rank (2, 2, 2) tensor with 40% of its entries missing.
    """
    tucker_spec = TuckerSpec((6, 6, 6), (2, 2, 2), seed=3)
    obs_spec = ObservationSpec(0.4, 0., seed=3)
    X_org = generate_tucker(tucker_spec)
    Y, mask = observe(X_org, obs_spec)
    return X_org, Y, mask


@pytest.fixture
def instance_dir(tmpdir):
    from tenrec.synthgen import save_instance

    def _make(shape=(5, 5, 5), ranks=(2, 2, 2), missing_rate=0.4, sigma_n=0.,
              seed=1):
        tucker_spec = TuckerSpec(shape, ranks, seed)
        obs_spec = ObservationSpec(missing_rate, sigma_n, seed)
        X_org = generate_tucker(tucker_spec)
        Y, mask = observe(X_org, obs_spec)
        path = str(tmpdir.join('instance_%d' % seed))
        save_instance(path, X_org, Y, mask, tucker_spec, obs_spec)
        return path
    return _make
