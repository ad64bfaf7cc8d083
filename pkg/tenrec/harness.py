# -*- coding: utf-8 -*-
"""
    tenrec.harness
    ~~~~~~~~~~~~~~

    Experiment sweep: every weight scheme and rank constrained cell of a
    grid is run on the same synthetic instances, and the recovery errors are
    written as records and as plot ready series.

    :copyright: 2021 by tenrec Authors, see AUTHORS for more details.
    :license: MIT, see LICENSE for more details.
"""

from __future__ import division, absolute_import

import csv
import math
import os
import threading
import time
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor, as_completed

import numpy as np
import pandas as pd

from .common import logger, SolverDivergence
from .solvers import (WtspnSolverConfig, RcSolverConfig, wtspn_admm_solve,
                      rc_admm_solve)
from .synthgen import generate_tucker, observe, recovery_error
from .weighting import (IDEAL, OBSERVATION, UNIFORM, DEFAULT_CLAMP,
                        WeightSchemeChoice, make_weight_spec, list_schemes)

#: Scheme name of the rank constrained cells.
RC = 'rc'

DEFAULT_ALPHAS = tuple(1. + 0.25 * i for i in range(13))
DEFAULT_PS = (0.5, 2. / 3, 1.)
DEFAULT_SCHEMES = (IDEAL, OBSERVATION, UNIFORM)

#: Per mode offsets from the true Tucker ranks tried by the rank
#: constrained method when no explicit ranks are given.
DEFAULT_RC_OFFSETS = (-1, 0, 1, 2)

CSV_FIELDS = ('scheme', 'alpha', 'p', 'rc_rank', 'missing_rate', 'sigma_n',
              'shape', 'ranks', 'seed', 'error', 'iterations',
              'ball_residual', 'wall_ms')

#: One solver run on one instance. alpha is None for uniform and rc cells,
#: p is None and rc_rank is set for rc cells.
Cell = namedtuple('Cell', 'scheme alpha p rc_rank')


class ExperimentGrid(object):
    """Tensor specs, observation specs and method parameters of a sweep.

    :param tensor_specs: list of TuckerSpec; their seeds are ignored.
    :param obs_specs: list of ObservationSpec; their seeds are ignored.
    :param alphas: ascending weight exponents of the ideal and observation
                   schemes.
    :param ps: Schatten exponents.
    :param schemes: weight schemes to run.
    :param rc_ranks: explicit per mode ranks of the rank constrained method.
    :param rc_offsets: offsets from the true ranks used when rc_ranks is
                       empty. Both empty disables the rank constrained cells.
    :param replicates: instances drawn per (tensor spec, observation spec),
                       with seeds seed, seed + 1, ...
    """

    def __init__(self, tensor_specs, obs_specs, alphas=DEFAULT_ALPHAS,
                 ps=DEFAULT_PS, schemes=DEFAULT_SCHEMES, rc_ranks=(),
                 rc_offsets=DEFAULT_RC_OFFSETS, lambda0=100., decay=0.99,
                 max_iter=500, rel_tol=1e-7, replicates=5, seed=0,
                 clamp=DEFAULT_CLAMP, workers=None, timing=True):

        self.tensor_specs = list(tensor_specs)
        self.obs_specs = list(obs_specs)
        self.alphas = [float(a) for a in alphas]
        self.ps = [float(p) for p in ps]
        self.schemes = list(schemes)
        self.rc_ranks = [tuple(int(r) for r in ranks) for ranks in rc_ranks]
        self.rc_offsets = [int(o) for o in rc_offsets]

        if not self.tensor_specs:
            raise ValueError('the grid needs at least one tensor spec')
        if not self.obs_specs:
            raise ValueError('the grid needs at least one observation spec')
        if len(set(self.schemes)) != len(self.schemes):
            raise ValueError('repeated weight scheme in %s' % self.schemes)
        for scheme in self.schemes:
            if scheme not in list_schemes():
                raise ValueError('unknown weight scheme %r, expected one of %s'
                                 % (scheme, ', '.join(list_schemes())))
        if self.schemes and not self.ps:
            raise ValueError('the grid needs at least one p')
        if any(s != UNIFORM for s in self.schemes) and not self.alphas:
            raise ValueError('the grid needs at least one alpha')
        if self.alphas != sorted(self.alphas):
            raise ValueError('alphas must be sorted ascending, got %s'
                             % self.alphas)
        if not (self.schemes or self.rc_ranks or self.rc_offsets):
            raise ValueError('the grid runs no method')
        if int(replicates) < 1:
            raise ValueError('replicates must be at least 1, got %r'
                             % replicates)

        self.solver_options = dict(lambda0=lambda0, decay=decay,
                                   max_iter=max_iter, rel_tol=rel_tol)
        self.replicates = int(replicates)
        self.seed = int(seed)
        self.clamp = clamp
        self.workers = workers
        self.timing = timing

        for tucker_spec in self.tensor_specs:
            self.rc_ranks_for(tucker_spec)

    def rc_ranks_for(self, tucker_spec):
        """Rank vectors tried by the rank constrained method on a spec.

        :rtype: list[tuple[int]]
        """
        shape, true_ranks = tucker_spec.shape, tucker_spec.ranks

        if self.rc_ranks:
            selected = [r for r in self.rc_ranks if len(r) == len(shape)]
            for ranks in selected:
                if not all(1 <= r <= n for r, n in zip(ranks, shape)):
                    raise ValueError('rc ranks %s out of range for shape %s'
                                     % (ranks, shape))
            return selected

        out = []
        for offset in self.rc_offsets:
            ranks = tuple(min(max(r + offset, 1), n)
                          for r, n in zip(true_ranks, shape))
            if ranks not in out:
                out.append(ranks)
        return out

    def cells(self, tucker_spec):
        """Method cells run on every instance of a tensor spec.

        Uniform and rc cells do not depend on alpha and appear once.

        :rtype: list[Cell]
        """
        out = []
        for scheme in self.schemes:
            if scheme == UNIFORM:
                out.extend(Cell(scheme, None, p, None) for p in self.ps)
            else:
                out.extend(Cell(scheme, alpha, p, None)
                           for alpha in self.alphas for p in self.ps)
        out.extend(Cell(RC, None, None, ranks)
                   for ranks in self.rc_ranks_for(tucker_spec))
        return out

    def instance_count(self):
        return len(self.tensor_specs) * len(self.obs_specs) * self.replicates

    def cell_count(self):
        """Number of records a sweep of this grid produces.
        """
        per_spec = sum(len(self.cells(t)) for t in self.tensor_specs)
        return per_spec * len(self.obs_specs) * self.replicates

    def __repr__(self):
        return '<ExperimentGrid %d instances, %d records>' % (
            self.instance_count(), self.cell_count())


def _fmt_float(value):
    if value is None:
        return ''
    return repr(float(value))


def _parse_float(text):
    return None if text == '' else float(text)


def _fmt_ints(values, sep):
    if values is None:
        return ''
    return sep.join(str(v) for v in values)


def _parse_ints(text, sep):
    if text == '':
        return None
    return tuple(int(v) for v in text.split(sep))


class ResultRecord(object):
    """Grid coordinates and outcome of one solver run.
    """

    __slots__ = CSV_FIELDS

    def __init__(self, scheme, alpha, p, rc_rank, missing_rate, sigma_n,
                 shape, ranks, seed, error, iterations, ball_residual,
                 wall_ms=None):
        self.scheme = scheme
        self.alpha = alpha
        self.p = p
        self.rc_rank = None if rc_rank is None else tuple(rc_rank)
        self.missing_rate = missing_rate
        self.sigma_n = sigma_n
        self.shape = tuple(shape)
        self.ranks = tuple(ranks)
        self.seed = seed
        self.error = error
        self.iterations = iterations
        self.ball_residual = ball_residual
        self.wall_ms = wall_ms

    @property
    def diverged(self):
        return math.isnan(self.error)

    def to_row(self, timing=True):
        """CSV fields as strings, in CSV_FIELDS order.
        """
        return [self.scheme, _fmt_float(self.alpha), _fmt_float(self.p),
                _fmt_ints(self.rc_rank, ','), _fmt_float(self.missing_rate),
                _fmt_float(self.sigma_n), _fmt_ints(self.shape, 'x'),
                _fmt_ints(self.ranks, ','), str(self.seed),
                _fmt_float(self.error), str(self.iterations),
                _fmt_float(self.ball_residual),
                '%.3f' % self.wall_ms if timing and self.wall_ms is not None else '']

    @classmethod
    def from_row(cls, row):
        """Build a record from a mapping of CSV field names to strings.
        """
        return cls(row['scheme'], _parse_float(row['alpha']),
                   _parse_float(row['p']), _parse_ints(row['rc_rank'], ','),
                   float(row['missing_rate']), float(row['sigma_n']),
                   _parse_ints(row['shape'], 'x'), _parse_ints(row['ranks'], ','),
                   int(row['seed']), float(row['error']), int(row['iterations']),
                   float(row['ball_residual']), _parse_float(row['wall_ms']))

    def as_dict(self):
        return dict((name, getattr(self, name)) for name in CSV_FIELDS)

    def __eq__(self, other):
        if not isinstance(other, ResultRecord):
            return NotImplemented
        return self.to_row(timing=False) == other.to_row(timing=False)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<ResultRecord %s alpha=%s p=%s rc_rank=%s error=%g>' % (
            self.scheme, self.alpha, self.p, self.rc_rank, self.error)


def run_cell(grid, cell, X_org, Y, mask, tucker_spec, obs_spec, seed):
    """Run one method cell on one instance.

    A diverging solver yields a record with a NaN error and the iteration
    it stopped at.

    :rtype: ResultRecord
    """
    start = time.perf_counter()
    try:
        if cell.scheme == RC:
            config = RcSolverConfig(cell.rc_rank, sigma_n=obs_spec.sigma_n,
                                    **grid.solver_options)
            result = rc_admm_solve(Y, mask, config)
        else:
            if cell.scheme == IDEAL:
                reference = (X_org, )
            elif cell.scheme == UNIFORM:
                reference = ()
            else:
                reference = (Y, mask)
            choice = WeightSchemeChoice(cell.scheme, cell.alpha, reference)
            weights = make_weight_spec(choice, Y.shape, cell.p, clamp=grid.clamp)
            config = WtspnSolverConfig(weights, sigma_n=obs_spec.sigma_n,
                                       **grid.solver_options)
            result = wtspn_admm_solve(Y, mask, config)
        error = recovery_error(result.X_hat, X_org)
        iterations, residual = result.iterations, result.ball_residual
    except SolverDivergence as e:
        logger.warning('Cell %s on %r / %r (seed %d) diverged: %s',
                       cell, tucker_spec, obs_spec, seed, e)
        error, iterations, residual = float('nan'), e.iteration, float('nan')

    wall_ms = (time.perf_counter() - start) * 1e3

    return ResultRecord(cell.scheme, cell.alpha, cell.p, cell.rc_rank,
                        obs_spec.missing_rate, obs_spec.sigma_n,
                        tucker_spec.shape, tucker_spec.ranks, seed,
                        error, iterations, residual, wall_ms)


def _tasks(grid):
    """Yield (key, arguments of run_cell) with instances generated once per
    (tensor spec, replicate) and observed once per observation spec.
    """
    for t_idx, base_tucker in enumerate(grid.tensor_specs):
        cells = grid.cells(base_tucker)
        for replicate in range(grid.replicates):
            seed = grid.seed + replicate
            tucker_spec = base_tucker.with_seed(seed)
            X_org = generate_tucker(tucker_spec)
            for o_idx, base_obs in enumerate(grid.obs_specs):
                obs_spec = base_obs.with_seed(seed)
                Y, mask = observe(X_org, obs_spec)
                for c_idx, cell in enumerate(cells):
                    key = (t_idx, o_idx, replicate, c_idx)
                    yield key, (grid, cell, X_org, Y, mask, tucker_spec,
                                obs_spec, seed)


def run_grid(grid, workers=None):
    """Run every cell of the grid.

    :param workers: size of the worker pool; grid.workers, else 1, when None.
    :return: records ordered by tensor spec, observation spec, replicate and
             cell, whatever the completion order.
    :rtype: list[ResultRecord]
    """
    workers = workers or grid.workers or 1
    logger.info('Sweeping %r with %d worker(s)', grid, workers)

    sink = []
    lock = threading.Lock()

    def _run(key, args):
        record = run_cell(*args)
        logger.debug('Cell %s done: %r', key, record)
        with lock:
            sink.append((key, record))

    if workers == 1:
        for key, args in _tasks(grid):
            _run(key, args)
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run, key, args)
                       for key, args in _tasks(grid)]
            for future in as_completed(futures):
                future.result()

    sink.sort(key=lambda item: item[0])
    records = [record for _, record in sink]

    diverged = sum(1 for r in records if r.diverged)
    if diverged:
        logger.warning('%d of %d cells diverged', diverged, len(records))
    logger.info('Sweep finished with %d records', len(records))
    return records


def emit_csv(records, path, timing=True):
    """Write records as CSV with a CSV_FIELDS header.

    :param timing: write wall_ms; when False the column is left empty so
                   reruns produce identical files.
    """
    if not records:
        raise ValueError('no records to write')

    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp, lineterminator='\r\n')
        writer.writerow(CSV_FIELDS)
        for record in records:
            writer.writerow(record.to_row(timing))
    logger.info('Wrote %d records to %s', len(records), path)


def read_csv(path):
    """Read records written by :func:`emit_csv`.

    :rtype: list[ResultRecord]
    """
    with open(path, newline='') as fp:
        reader = csv.DictReader(fp)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError('%s is not a records file, header is %s'
                             % (path, reader.fieldnames))
        return [ResultRecord.from_row(row) for row in reader]


def _records_frame(records):
    frame = pd.DataFrame([r.as_dict() for r in records], columns=CSV_FIELDS)
    for name in ('shape', 'ranks', 'rc_rank'):
        sep = 'x' if name == 'shape' else '-'
        frame[name] = [_fmt_ints(v, sep) for v in frame[name]]
    frame['error'] = frame['error'].astype(float)
    return frame


def series_name(scheme, p=None, rc_rank=None):
    """File stem of a figure series: <scheme>_p<p> or rc_r<ranks>.
    """
    if scheme == RC:
        return 'rc_r%s' % rc_rank
    return '%s_p%g' % (scheme, p)


def _write_series(path, alphas, errors):
    pd.DataFrame({'alpha': alphas, 'error': errors},
                 columns=['alpha', 'error']).to_csv(path, index=False)


def emit_figure_data(records, panel, directory):
    """Write the error versus alpha series of one (missing_rate, sigma_n)
    panel, averaged over replicates.

    One subdirectory per tensor spec holds one file per (scheme, p) and per
    rc rank vector. Uniform and rc series repeat their single value at every
    alpha of the ideal and observation series.

    :param panel: (missing_rate, sigma_n)
    :return: paths of the written files.
    :rtype: list[str]
    """
    missing_rate, sigma_n = panel
    frame = _records_frame(records)
    selected = frame[np.isclose(frame['missing_rate'], missing_rate)
                     & np.isclose(frame['sigma_n'], sigma_n)]
    if selected.empty:
        raise ValueError('no records for panel missing_rate=%g sigma_n=%g'
                         % (missing_rate, sigma_n))

    diverged = int(selected['error'].isna().sum())
    if diverged:
        logger.warning('%d diverged records left out of the panel averages',
                       diverged)

    written = []
    for (shape, ranks), figure in selected.groupby(['shape', 'ranks'], sort=False):
        figure_dir = os.path.join(directory, '%s_r%s' % (shape, ranks))
        if not os.path.isdir(figure_dir):
            os.makedirs(figure_dir)

        weighted = figure[~figure['scheme'].isin([UNIFORM, RC])]
        alphas = sorted(weighted['alpha'].unique()) or [float('nan')]

        for (scheme, p), series in weighted.groupby(['scheme', 'p'], sort=False):
            means = series.groupby('alpha')['error'].mean()
            missing = [a for a in alphas if a not in means.index]
            if missing:
                logger.warning('Series %s of %s lacks alpha %s', series_name(scheme, p),
                               figure_dir, ', '.join('%g' % a for a in missing))
            path = os.path.join(figure_dir, series_name(scheme, p) + '.csv')
            _write_series(path, alphas, means.reindex(alphas).values)
            written.append(path)

        flat = figure[figure['scheme'] == UNIFORM].groupby('p', sort=False)
        for p, series in flat:
            path = os.path.join(figure_dir, series_name(UNIFORM, p) + '.csv')
            _write_series(path, alphas, [series['error'].mean()] * len(alphas))
            written.append(path)

        flat = figure[figure['scheme'] == RC].groupby('rc_rank', sort=False)
        for rc_rank, series in flat:
            path = os.path.join(figure_dir, series_name(RC, rc_rank=rc_rank) + '.csv')
            _write_series(path, alphas, [series['error'].mean()] * len(alphas))
            written.append(path)

    logger.info('Wrote %d series for panel missing_rate=%g sigma_n=%g to %s',
                len(written), missing_rate, sigma_n, directory)
    return written
