# -*- coding: utf-8 -*-
"""
    tenrec.common
    ~~~~~~~~~~~~~

    Logger and error types shared by all modules.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import absolute_import

import logging

logger = logging.LoggerAdapter(logging.getLogger('tenrec'), {'backend': 'numpy'})


class TensorShapeError(ValueError):
    """Raised when shapes, modes or dimensions do not agree.
    """


class WeightError(ValueError):
    """Raised when a weight specification is inconsistent.
    """


class SolverDivergence(ArithmeticError):
    """Raised when an ADMM state becomes non finite or blows up.

    :param iteration: iteration index at which the divergence was detected.
    """

    def __init__(self, msg, iteration):
        super(SolverDivergence, self).__init__(msg)
        self.iteration = iteration