# -*- coding: utf-8 -*-
"""
    tenrec.parser
    ~~~~~~~~~~~~~

    Experiment grid definition files.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

import os
from contextlib import closing
from io import open, StringIO
from traceback import format_exc

import pkg_resources
import yaml

from .common import logger
from .harness import ExperimentGrid
from .params import (ParameterSet, SOLVER_PARAMETERS, to_bool,
                     value_parameter)
from .synthgen import TuckerSpec, ObservationSpec
from .weighting import list_schemes


def _ver_to_tuple(ver):
    return tuple(int(part) for part in ver.split('.'))


#: Version of the definition file format
SPEC_VERSION = '1.0'

SPEC_VERSION_TUPLE = _ver_to_tuple(SPEC_VERSION)

#: Name of the bundled definitions file holding the full experiment grid.
DEFAULT_RESOURCE = 'default.yaml'


class SimpleChainmap(object):
    """Look keys up in several mappings, first match wins.
    """

    def __init__(self, *maps):
        self._maps = maps

    def __getitem__(self, key):
        for mapping in self._maps:
            if key in mapping:
                return mapping[key]
        raise KeyError(key)

    def __contains__(self, key):
        return any(key in mapping for mapping in self._maps)

    def get(self, key, default=None):
        return self[key] if key in self else default


def _load(content_or_fp):
    """Parse YAML text or stream and check its spec version.

    Scalars are kept as strings, typing is done by :mod:`tenrec.params`.
    """
    try:
        data = yaml.load(content_or_fp, Loader=yaml.loader.BaseLoader)
    except Exception as e:
        raise type(e)('Malformed grid file:\n%s' % format_exc())

    if not isinstance(data, dict) or 'spec' not in data:
        raise ValueError('The grid file does not declare a spec version')

    try:
        ver = _ver_to_tuple(data['spec'])
    except (AttributeError, ValueError):
        raise ValueError("Invalid spec version %r, expected 'X.Y'"
                         % (data['spec'], ))

    if ver > SPEC_VERSION_TUPLE:
        raise ValueError('The grid file has spec version %s but tenrec reads '
                         'up to %s. Please update tenrec.'
                         % (data['spec'], SPEC_VERSION))

    return data


def parse_resource(name):
    """Parse a definitions file bundled with tenrec.
    """
    with closing(pkg_resources.resource_stream(__name__, name)) as fp:
        text = fp.read().decode('utf-8')
    return _load(StringIO(text))


def parse_file(fullpath):
    """Parse a definitions file on disk.
    """
    with open(fullpath, encoding='utf-8') as fp:
        return _load(fp)


def get_bases(definition_dict, loader, parent=None, bundled=False):
    """Chain a definition with the files listed under its bases key.

    Relative base names resolve from the directory of the including file.
    """
    bases = definition_dict.get('bases', ())
    if not bases:
        return definition_dict

    chained = []
    for base in bases:
        base_bundled = to_bool(base.get('bundled', False))
        data, path = loader.load(base['filename'], base_bundled, parent, bundled)
        chained.append(get_bases(data, loader, path, base_bundled))
    return SimpleChainmap(definition_dict, *chained)


class Loader(object):
    """Reads a grid file and the files it is based on, once each.
    """

    def __init__(self, filename, bundled):

        #: (path or resource name, bundled) -> dict
        self._cache = {}

        self._filename = filename
        self._bundled = bundled
        self.data = self._read(filename, bundled)

    def load(self, filename, bundled, parent=None, parent_bundled=None):
        """Load a base file of parent (the top file when None).

        :return: the definitions and the resolved name.
        """
        if parent is None:
            parent, parent_bundled = self._filename, self._bundled

        if parent_bundled and not bundled:
            raise ValueError('Bundled file %s can only be based on other '
                             'bundled files, not on %s' % (parent, filename))

        if not bundled:
            filename = os.path.join(os.path.dirname(parent), filename)

        return self._read(filename, bundled), filename

    def _read(self, filename, bundled):
        key = (filename, bundled)
        if key not in self._cache:
            data = parse_resource(filename) if bundled else parse_file(filename)
            major = _ver_to_tuple(data['spec'])[0]
            if major != SPEC_VERSION_TUPLE[0]:
                raise ValueError('%s (bundled = %s) has spec version %s, '
                                 'expected %d.x' % (filename, bundled,
                                                    data['spec'],
                                                    SPEC_VERSION_TUPLE[0]))
            logger.debug('Loaded grid definitions from %s (bundled = %s)',
                         filename, bundled)
            self._cache[key] = data
        return self._cache[key]

    def get_definitions(self):
        return get_bases(self.data, self, self._filename, self._bundled)


def _get_alphas(value):
    """alphas are either a list or a {start, stop, step} range.
    """
    alpha = value_parameter('alpha')
    if isinstance(value, dict):
        start, stop, step = (alpha.validate_value(value[k])
                             for k in ('start', 'stop', 'step'))
        if step <= 0:
            raise ValueError('alphas: step must be positive, got %r' % step)
        count = int(round((stop - start) / step))
        return [start + i * step for i in range(count + 1)]
    return alpha.validate_list(value)


def _get_tensor_spec(dd):
    shape = value_parameter('dimension').validate_list(dd['shape'])
    ranks = value_parameter('rank').validate_list(dd['ranks'])
    return TuckerSpec(shape, ranks)


def _get_observation_spec(dd):
    return ObservationSpec(value_parameter('missing_rate').validate_value(dd['missing_rate']),
                           value_parameter('sigma_n').validate_value(dd.get('sigma_n', 0)))


def get_grid_from_dict(definitions):
    """Build an ExperimentGrid from a (chained) definition mapping.

    :rtype: ExperimentGrid
    """
    solver = ParameterSet(SOLVER_PARAMETERS)
    solver.update(definitions.get('solver', {}), 'solver section')

    tensor_specs = []
    for tensor_dict in definitions['tensors']:
        try:
            tensor_specs.append(_get_tensor_spec(tensor_dict))
        except (KeyError, ValueError) as e:
            raise ValueError('Malformed tensor entry %s: %s' % (tensor_dict, e))

    obs_specs = []
    for obs_dict in definitions['observations']:
        try:
            obs_specs.append(_get_observation_spec(obs_dict))
        except (KeyError, ValueError) as e:
            raise ValueError('Malformed observation entry %s: %s' % (obs_dict, e))

    # keys left out fall back to the ExperimentGrid defaults
    options = solver.as_dict()

    if 'alphas' in definitions:
        options['alphas'] = _get_alphas(definitions['alphas'])

    if 'ps' in definitions:
        options['ps'] = value_parameter('p').validate_list(definitions['ps'])

    if 'schemes' in definitions:
        schemes = definitions['schemes']
        for scheme in schemes:
            if scheme not in list_schemes():
                raise ValueError('Unknown weight scheme %r, expected one of %s'
                                 % (scheme, ', '.join(list_schemes())))
        options['schemes'] = schemes

    if 'rc_ranks' in definitions:
        rank = value_parameter('rank')
        options['rc_ranks'] = [tuple(rank.validate_list(r))
                               for r in definitions['rc_ranks']]

    if 'rc_offsets' in definitions:
        options['rc_offsets'] = value_parameter('rank_offset').validate_list(
            definitions['rc_offsets'])

    if 'replicates' in definitions:
        options['replicates'] = value_parameter('replicates').validate_value(
            definitions['replicates'])

    for key in ('seed', 'clamp', 'workers'):
        if key in definitions:
            options[key] = value_parameter(key).validate_value(definitions[key])

    if 'timing' in definitions:
        options['timing'] = to_bool(definitions['timing'])

    grid = ExperimentGrid(tensor_specs, obs_specs, **options)

    logger.debug('Loaded %r', grid)
    return grid


def get_grid(filename=None, bundled=False):
    """Get an ExperimentGrid from a file.

    :param filename: full path of the file to parse or name of the resource;
                     the bundled default grid when None.
    :param bundled: filename names a resource bundled with tenrec.
    :rtype: ExperimentGrid
    """
    if filename is None:
        filename, bundled = DEFAULT_RESOURCE, True

    loader = Loader(filename, bundled)

    try:
        return get_grid_from_dict(loader.get_definitions())
    except KeyError as e:
        raise ValueError('Definitions file %s lacks the %s key' % (filename, e))
    except ValueError as e:
        raise ValueError('In definitions file %s: %s' % (filename, e))
