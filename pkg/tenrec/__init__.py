# -*- coding: utf-8 -*-
"""
    tenrec
    ~~~~~~

    Low rank tensor completion by weighted tensor Schatten-p norm
    minimization, with a rank constrained baseline and an experiment
    harness on synthetic Tucker tensors.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

from .common import TensorShapeError, WeightError, SolverDivergence
from .tensor import ObservationMask, unfold, fold
from .spectral import WeightSpec, p_threshold, wspn_prox
from .weighting import WeightSchemeChoice, make_weight_spec
from .solvers import (WtspnSolverConfig, RcSolverConfig, wtspn_admm_solve,
                      rc_admm_solve)
from .synthgen import TuckerSpec, ObservationSpec, generate_tucker, observe
from .harness import ExperimentGrid, run_grid

import pkg_resources

__version__ = "unknown"
try:                # pragma: no cover
    __version__ = pkg_resources.get_distribution('tenrec').version
except Exception:   # pragma: no cover
    pass    # local copy or not installed with setuptools
