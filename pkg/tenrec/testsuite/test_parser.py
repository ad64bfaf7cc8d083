# -*- coding: utf-8 -*-

from __future__ import absolute_import

import pytest

from tenrec.harness import RC
from tenrec.parser import (get_grid, parse_resource, SimpleChainmap,
                           SPEC_VERSION)
from tenrec.synthgen import TuckerSpec, ObservationSpec

from .conftest import fixture_path


def test_bundled_grid():
    grid = get_grid()
    assert [(t.shape, t.ranks) for t in grid.tensor_specs] == [
        ((40, 40, 40), (4, 4, 4)), ((40, 40, 40), (5, 5, 5)),
        ((16, 16, 16, 16), (2, 2, 2, 2)), ((16, 16, 16, 16), (3, 3, 3, 3))]
    assert [(o.missing_rate, o.sigma_n) for o in grid.obs_specs] == [
        (0.4, 0.), (0.4, 1.), (0.8, 0.), (0.8, 1.)]
    assert grid.alphas == [1. + 0.25 * i for i in range(13)]
    assert grid.ps == pytest.approx([0.5, 2. / 3, 1.])
    assert grid.replicates == 5
    assert grid.solver_options == {'lambda0': 100., 'decay': 0.99,
                                   'max_iter': 500, 'rel_tol': 1e-7}
    assert grid.rc_ranks_for(grid.tensor_specs[0]) == [
        (3, 3, 3), (4, 4, 4), (5, 5, 5), (6, 6, 6)]


def test_bundled_grid_panel_size():
    # 13 alphas x 3 p x (ideal, observation) + 3 uniform + 4 rc
    grid = get_grid()
    cells = grid.cells(grid.tensor_specs[0])
    assert len(cells) == 13 * 3 * 2 + 3 + 4
    assert sum(1 for c in cells if c.scheme == RC) == 4
    assert grid.cell_count() == 85 * 4 * 4 * 5


def test_parse_resource_spec():
    assert parse_resource('default.yaml')['spec'] == SPEC_VERSION


def test_small_grid_file():
    grid = get_grid(fixture_path('small_grid.yaml'))
    assert grid.tensor_specs == [TuckerSpec((6, 6, 6), (2, 2, 2))]
    assert grid.obs_specs == [ObservationSpec(0.4, 0.), ObservationSpec(0.4, 0.05)]
    assert grid.alphas == [1., 2.]
    assert grid.ps == [0.5, 1.]
    assert grid.solver_options['max_iter'] == 30
    assert grid.solver_options['decay'] == 0.95
    assert grid.replicates == 2
    assert grid.seed == 11
    assert grid.timing is False
    assert grid.rc_ranks_for(grid.tensor_specs[0]) == [(2, 2, 2), (3, 3, 3)]


def test_bases_inherit_bundled_grid():
    grid = get_grid(fixture_path('default_16x4.yaml'))
    assert grid.tensor_specs == [TuckerSpec((16, 16, 16, 16), (2, 2, 2, 2))]
    assert len(grid.obs_specs) == 4
    assert len(grid.alphas) == 13
    assert grid.replicates == 5
    assert grid.timing is False


def test_bases_on_disk():
    grid = get_grid(fixture_path('nested.yaml'))
    assert grid.replicates == 1
    assert grid.ps == pytest.approx([2. / 3])
    assert grid.alphas == [1., 2.]
    assert grid.solver_options['max_iter'] == 30


def test_json_grid_file():
    grid = get_grid(fixture_path('grid.json'))
    assert grid.alphas == [1., 1.5, 2.]
    assert grid.schemes == ['uniform']
    assert grid.rc_ranks_for(grid.tensor_specs[0]) == []
    assert grid.cell_count() == 3
    # defaults of the keys left out
    assert grid.solver_options['lambda0'] == 100.


@pytest.mark.parametrize('name', ['bad_scheme.yaml', 'future.yaml'])
def test_invalid_files(name):
    with pytest.raises(ValueError):
        get_grid(fixture_path(name))


def test_missing_file():
    with pytest.raises(IOError):
        get_grid(fixture_path('does_not_exist.yaml'))


def test_simple_chainmap():
    chained = SimpleChainmap({'a': 1}, {'a': 2, 'b': 3})
    assert chained['a'] == 1
    assert chained['b'] == 3
    assert 'b' in chained
    assert chained.get('c', 4) == 4
    with pytest.raises(KeyError):
        chained['c']
