# -*- coding: utf-8 -*-
"""
    tenrec.cli
    ~~~~~~~~~~

    Command line entry points: gen, solve, sweep, figdata and info.

    Exit status is 0 on success, 2 on invalid flags or definition files and
    1 when a run fails.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import, print_function

import argparse
import logging
import os
import sys
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

from .common import logger, SolverDivergence
from .harness import RC, run_grid, emit_csv, read_csv, emit_figure_data
from .params import Parameter, SOLVER_PARAMETERS, value_parameter
from .solvers import (WtspnSolverConfig, RcSolverConfig, solve,
                      write_trace_csv)
from .synthgen import (TuckerSpec, ObservationSpec, generate_tucker, observe,
                       recovery_error, save_instance, load_instance)
from .tensor import save_tensor
from .weighting import (IDEAL, OBSERVATION, UNIFORM, DEFAULT_CLAMP,
                        WeightSchemeChoice, make_weight_spec, export_weights_csv)

#: Environment variable holding the default worker count.
WORKERS_ENV = 'TENREC_WORKERS'


class UsageError(Exception):
    """Invalid input discovered after argument parsing (exit status 2).
    """


def _arg_type(parameter, as_list=False):
    """argparse type validating a value, or comma separated values, with
    the specs of a Parameter.
    """
    def _convert(text):
        try:
            if as_list:
                return tuple(parameter.validate_list(text.split(',')))
            return parameter.validate_value(text)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
    _convert.__name__ = parameter.name + (' list' if as_list else '')
    return _convert


def _value(name):
    return _arg_type(value_parameter(name))


def _value_list(name):
    return _arg_type(value_parameter(name), as_list=True)


def _solver_value(name):
    _, specs = SOLVER_PARAMETERS[name]
    return _arg_type(Parameter(name, None, specs))


def _panel(text):
    parts = text.split(',')
    if len(parts) != 2:
        raise argparse.ArgumentTypeError('expected MISSING_RATE,SIGMA_N, got %r'
                                         % text)
    return (_value('missing_rate')(parts[0]), _value('sigma_n')(parts[1]))


def resolve_workers(flag, configured=None):
    """Worker count from the flag, else TENREC_WORKERS, else the definition
    file, else 1.
    """
    if flag is not None:
        return flag
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return value_parameter('workers').validate_value(env)
        except ValueError as e:
            raise UsageError('%s: %s' % (WORKERS_ENV, e))
    return configured or 1


def get_debug_info():
    """Version of the package and of the definition file format.
    """
    from . import __version__
    from .parser import SPEC_VERSION
    d = OrderedDict()
    d['Version'] = '%s' % __version__
    d['Spec version'] = SPEC_VERSION
    return d


def cmd_info(args):
    for key, value in get_debug_info().items():
        print('%s: %s' % (key, value))
    return 0


def cmd_gen(args):
    try:
        tucker_spec = TuckerSpec(args.shape, args.ranks, args.seed)
    except ValueError as e:
        raise UsageError(str(e))
    obs_spec = ObservationSpec(args.missing_rate, args.sigma_n, args.seed)

    X_org = generate_tucker(tucker_spec)
    Y, mask = observe(X_org, obs_spec)
    save_instance(args.out, X_org, Y, mask, tucker_spec, obs_spec)
    print('Wrote %r / %r to %s' % (tucker_spec, obs_spec, args.out))
    return 0


def _solver_options(args):
    return dict((name, getattr(args, name)) for name in SOLVER_PARAMETERS)


def cmd_solve(args):
    X_org, Y, mask, tucker_spec, obs_spec = load_instance(args.instance)
    sigma_n = obs_spec.sigma_n if args.sigma_n is None else args.sigma_n

    if args.scheme == RC:
        if args.rc_rank is None:
            raise UsageError('--rc-rank is required with --scheme rc')
        config = RcSolverConfig(args.rc_rank, sigma_n=sigma_n,
                                **_solver_options(args))
    else:
        if args.scheme != UNIFORM and args.alpha is None:
            raise UsageError('--alpha is required with --scheme %s' % args.scheme)
        reference = {IDEAL: (X_org, ), OBSERVATION: (Y, mask), UNIFORM: ()}[args.scheme]
        alpha = None if args.scheme == UNIFORM else args.alpha
        choice = WeightSchemeChoice(args.scheme, alpha, reference)
        weights = make_weight_spec(choice, Y.shape, args.p, clamp=args.clamp)
        if args.weights:
            export_weights_csv(args.weights, weights)
        config = WtspnSolverConfig(weights, sigma_n=sigma_n,
                                   **_solver_options(args))

    name = 'rc' if args.scheme == RC else 'wtspn'
    workers = resolve_workers(args.workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            result = solve(name, Y, mask, config, executor, bool(args.trace))
    else:
        result = solve(name, Y, mask, config, trace=bool(args.trace))

    if args.out:
        save_tensor(args.out, result.X_hat)
    if args.trace:
        write_trace_csv(args.trace, result.trace)

    print('error=%r iterations=%d ball_residual=%r converged=%s'
          % (recovery_error(result.X_hat, X_org), result.iterations,
             result.ball_residual, result.converged))
    return 0


def cmd_sweep(args):
    from .parser import get_grid

    try:
        if args.config is None:
            grid = get_grid()
        else:
            grid = get_grid(args.config)
    except (IOError, ValueError) as e:
        raise UsageError(str(e))

    workers = resolve_workers(args.workers, grid.workers)
    timing = grid.timing and not args.no_timing

    records = run_grid(grid, workers)
    emit_csv(records, args.out, timing=timing)
    print('Wrote %d records to %s' % (len(records), args.out))
    return 0


def cmd_figdata(args):
    try:
        records = read_csv(args.records)
    except (IOError, ValueError, KeyError) as e:
        raise UsageError('Cannot read records from %s: %s' % (args.records, e))

    written = emit_figure_data(records, args.panel, args.out)
    for path in written:
        print(path)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog='tenrec',
        description='Low rank tensor completion experiments.')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='log debug messages')

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    sub = commands.add_parser('info', help='print version information')
    sub.set_defaults(func=cmd_info)

    sub = commands.add_parser('gen', help='write a synthetic instance')
    sub.add_argument('--shape', type=_value_list('dimension'), required=True,
                     help='comma separated dimensions, e.g. 16,16,16,16')
    sub.add_argument('--ranks', type=_value_list('rank'), required=True,
                     help='comma separated Tucker ranks')
    sub.add_argument('--seed', type=_value('seed'), default=0)
    sub.add_argument('--missing-rate', type=_value('missing_rate'), default=0.4)
    sub.add_argument('--sigma-n', type=_value('sigma_n'), default=0.)
    sub.add_argument('--out', required=True, help='instance directory')
    sub.set_defaults(func=cmd_gen)

    sub = commands.add_parser('solve', help='run one solver on one instance')
    sub.add_argument('--instance', required=True,
                     help='directory written by gen')
    sub.add_argument('--scheme', required=True,
                     choices=(IDEAL, OBSERVATION, UNIFORM, RC))
    sub.add_argument('--alpha', type=_value('alpha'))
    sub.add_argument('--p', type=_value('p'), default=1.,
                     help='Schatten exponent, e.g. 1, 2/3 or 0.5')
    sub.add_argument('--rc-rank', type=_value_list('rank'),
                     help='comma separated ranks of the rank constrained method')
    sub.add_argument('--sigma-n', type=_value('sigma_n'),
                     help='noise level, the instance one by default')
    for name, (default, _) in sorted(SOLVER_PARAMETERS.items()):
        sub.add_argument('--' + name.replace('_', '-'), dest=name,
                         type=_solver_value(name), default=default)
    sub.add_argument('--clamp', type=_value('clamp'), default=DEFAULT_CLAMP)
    sub.add_argument('--workers', type=_value('workers'),
                     help='threads for the per mode steps')
    sub.add_argument('--out', help='write the estimate as a tensor file')
    sub.add_argument('--trace', help='write the iteration trace as CSV')
    sub.add_argument('--weights', help='write the weight vectors as CSV')
    sub.set_defaults(func=cmd_solve)

    sub = commands.add_parser('sweep', help='run an experiment grid')
    sub.add_argument('--config',
                     help='grid definition file, the bundled grid by default')
    sub.add_argument('--out', required=True, help='records CSV file')
    sub.add_argument('--workers', type=_value('workers'))
    sub.add_argument('--no-timing', action='store_true',
                     help='leave wall_ms empty so reruns are identical')
    sub.set_defaults(func=cmd_sweep)

    sub = commands.add_parser('figdata', help='write error versus alpha series')
    sub.add_argument('--records', required=True, help='records CSV file')
    sub.add_argument('--panel', type=_panel, required=True,
                     help='MISSING_RATE,SIGMA_N')
    sub.add_argument('--out', required=True, help='output directory')
    sub.set_defaults(func=cmd_figdata)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print('tenrec %s: error: %s' % (args.command, e), file=sys.stderr)
        return 2
    except (SolverDivergence, ValueError, IOError) as e:
        logger.error('%s failed: %s', args.command, e)
        return 1
