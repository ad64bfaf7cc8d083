# -*- coding: utf-8 -*-
"""
    tenrec.params
    ~~~~~~~~~~~~~

    Typed and range checked configuration values.

    Definition files are read without implicit typing, so every value
    arrives as a string and is converted here according to its specs.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

from fractions import Fraction


def to_bool(val):
    if isinstance(val, bool):
        return val
    lowered = str(val).strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError('%r is not a boolean' % (val, ))


def to_fraction(val):
    """Float from '0.5', '1/2' or 2/3 style values.
    """
    if isinstance(val, float):
        return val
    return float(Fraction(str(val).strip()))


_TYPES = {'float': float, 'int': int, 'str': str, 'bool': to_bool,
          'fraction': to_fraction}


class Parameter(object):
    """A configuration value

    :param name: name of the parameter
    :param value: default value
    :param specs: specification dictionary with optional keys type, min,
                  max, exclusive_min, exclusive_max and valid.
    """

    def __init__(self, name, value, specs):
        specs = dict(specs)
        t = specs.get('type', None)
        if t in _TYPES:
            t = specs['type'] = _TYPES[t]

        for key in ('min', 'max'):
            if key in specs:
                specs[key] = t(specs[key])

        if 'valid' in specs:
            specs['valid'] = set([t(val) for val in specs['valid']])

        self.name = name
        self.specs = specs
        self._value = None
        self.init_value(value)

    def init_value(self, string_value):
        """Initialize the value hold by the Parameter.
        """
        if string_value is not None:
            self.set_value(string_value)

    def get_value(self):
        return self._value

    def set_value(self, string_value):
        self._value = self.validate_value(string_value)

    def validate_value(self, string_value):
        """Convert a value and check that it matches the Parameter specs.
        """
        specs = self.specs
        try:
            value = specs['type'](string_value) if 'type' in specs else string_value
        except (TypeError, ValueError):
            raise ValueError('%s: cannot interpret %r' % (self.name, string_value))

        if 'min' in specs and value < specs['min']:
            raise ValueError('%s: %r is below the minimum %r'
                             % (self.name, value, specs['min']))
        if 'max' in specs and value > specs['max']:
            raise ValueError('%s: %r is above the maximum %r'
                             % (self.name, value, specs['max']))
        if specs.get('exclusive_min') is not None and value <= specs['exclusive_min']:
            raise ValueError('%s: %r must be greater than %r'
                             % (self.name, value, specs['exclusive_min']))
        if specs.get('exclusive_max') is not None and value >= specs['exclusive_max']:
            raise ValueError('%s: %r must be smaller than %r'
                             % (self.name, value, specs['exclusive_max']))
        if 'valid' in specs and value not in specs['valid']:
            raise ValueError('%s: %r is not one of %s'
                             % (self.name, value, sorted(specs['valid'])))
        return value

    def validate_list(self, values):
        """Validate every element of a list of values.
        """
        if isinstance(values, (str, bytes)) or not hasattr(values, '__iter__'):
            raise ValueError('%s: expected a list, got %r' % (self.name, values))
        return [self.validate_value(v) for v in values]


class ParameterSet(object):
    """Named collection of Parameters.

    :param definitions: mapping name -> (default, specs).
    """

    def __init__(self, definitions):
        #: Maps parameter names to Parameter objects.
        #: :type: dict[str, Parameter]
        self._parameters = dict((name, Parameter(name, default, specs))
                                for name, (default, specs) in definitions.items())

    def __getitem__(self, name):
        return self._parameters[name].get_value()

    def __contains__(self, name):
        return name in self._parameters

    def parameter(self, name):
        return self._parameters[name]

    def update(self, mapping, where='configuration'):
        """Validate and store every value of mapping.
        """
        for name, value in mapping.items():
            if name not in self._parameters:
                raise ValueError('Unknown key %r in %s, expected one of %s'
                                 % (name, where, ', '.join(sorted(self._parameters))))
            self._parameters[name].set_value(value)

    def as_dict(self):
        return dict((name, p.get_value()) for name, p in self._parameters.items())


#: Specs of the solver knobs shared by the definition files and the CLI.
SOLVER_PARAMETERS = {
    'lambda0': (100., {'type': 'float', 'exclusive_min': 0.}),
    'decay': (0.99, {'type': 'float', 'exclusive_min': 0., 'max': 1.}),
    'max_iter': (500, {'type': 'int', 'min': 1}),
    'rel_tol': (1e-7, {'type': 'float', 'min': 0.}),
}

#: Specs of single grid values.
VALUE_SPECS = {
    'alpha': {'type': 'float', 'min': 0.},
    'p': {'type': 'fraction', 'exclusive_min': 0., 'max': 1.},
    'missing_rate': {'type': 'float', 'min': 0., 'exclusive_max': 1.},
    'sigma_n': {'type': 'float', 'min': 0.},
    'dimension': {'type': 'int', 'min': 1},
    'rank': {'type': 'int', 'min': 1},
    'rank_offset': {'type': 'int'},
    'seed': {'type': 'int', 'min': 0},
    'replicates': {'type': 'int', 'min': 1},
    'workers': {'type': 'int', 'min': 1},
    'clamp': {'type': 'float', 'exclusive_min': 0.},
}


def value_parameter(name):
    """Parameter with no default validating the grid value called name.
    """
    return Parameter(name, None, VALUE_SPECS[name])
