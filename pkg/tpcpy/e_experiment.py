#!/usr/bin/env python

############################################################################
#
# MODULE:       e.experiment
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Run, validate and report two-phase averaging experiments.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
Command line front end.

Presets:
    fig-mse          MSE curves and traces per topology and size.
    fig-scaling      Stopping times over a size sweep, one row per topology and size.
    spectral-report  Spectral gap and Poincare bound per topology and size.
    custom           fig-mse outputs plus e1/e2 envelope checks.

Every result file starts with the canonical spec echo, so it can be regenerated from its own header.
Exit status: 0 if every artifact was written, 2 for usage or spec errors, 1 for any other failure.
"""
import argparse
import math
import os
import sys
from dataclasses import replace

import pandas as pd

from tpcpy import __version__
from tpcpy import messages as gs
from tpcpy.c_channel.c_awgn import DATA_DOMAIN, GRAPH_DOMAIN, PATH_DOMAIN, SPECTRAL_DOMAIN, RandomStream
from tpcpy.e_spec import (CUSTOM, FIG_MSE, FIG_SCALING, PRESETS, SPECTRAL_REPORT, build_spec, echo_spec,
                          read_spec_file, spec_to_dict)
from tpcpy.exceptions import SpecFileError, SpecValidationError, TpcError
from tpcpy.g_graph.g_topology import (CYCLE, GRID, RGG, TOPOLOGIES, build_cycle, build_grid, build_rgg, diameter,
                                      save_edge_list)
from tpcpy.m_metrics.m_mse import (check_e1_bound, check_e2_bound, guaranteed_mse_target,
                                   guaranteed_outer_iterations, mse_curve, sample_mean, stopping_time,
                                   write_curve_csv, write_report_json)
from tpcpy.m_metrics.m_trace import write_commented_csv, write_theta_snapshots, write_trace_csv
from tpcpy.p_protocol.p_twophase import ProtocolConfig, inner_rounds, run_paths
from tpcpy.s_spectral.s_gap import expected_matrix_closed_form, expected_matrix_monte_carlo, lambda2_gap
from tpcpy.s_spectral.s_poincare import spectral_report

__all__ = ['Experiment', 'run_experiment', 'main', 'OUTDIR_ENV']

OUTDIR_ENV = 'TPCPY_OUTDIR'

# Largest graph whose averaged matrix is built for the envelope checks of the custom preset.
ENVELOPE_MAX_N = 2500

SCALING_COLUMNS = ['topology', 'n', 'm', 'diameter', 'inner_rounds', 'delta', 'target', 'tau_star', 'rounds',
                   'transmissions', 'resolution', 'paths']

_NAME = 'e_experiment'


class Experiment(object):
    """
    One experiment described by an :class:`~tpcpy.e_spec.ExperimentSpec`.

    Parameters
    ----------
    spec : ExperimentSpec

    Attributes
    ----------
    spec : ExperimentSpec
    outdir : str
    workers : int
    artifacts : list of str
        Files written so far.

    Methods
    -------
    run()
        Run the preset and write its result files.
    print_products()
        Print the canonical spec and the planned result files.

    Examples
    --------
    The general usage is
    ::
        $ tpcpy [-p -v -q] [--preset NAME] [--spec FILE] [--seed INT] [--paths INT] [--out DIR]
                [--workers INT] [--theta-paths INT] [--mode {explicit,aggregate}]

    Reproduce the MSE curves of a 30 x 30 grid
    ::
        $ tpcpy --preset fig-mse --seed 7 --sizes 900 --out results
    """

    def __init__(self, spec):
        self.spec = spec
        self.outdir = spec.outdir
        self.workers = spec.workers or os.cpu_count() or 1
        self.artifacts = []

        self.__header = echo_spec(spec, runtime=False)

    # ------------------------------------------------------------------------------------------------------------------
    # Public Methods
    # ------------------------------------------------------------------------------------------------------------------
    def run(self):
        """
        Run the preset.

        Returns
        -------
        list of str
            Paths of the written files.
        """
        os.makedirs(self.outdir, exist_ok=True)
        gs.message('Running preset <{0}> with seed {1}'.format(self.spec.preset, self.spec.seed), _NAME)

        if self.spec.preset == FIG_MSE:
            self.__fig_mse(envelopes=False)
        elif self.spec.preset == CUSTOM:
            self.__fig_mse(envelopes=True)
        elif self.spec.preset == FIG_SCALING:
            self.__fig_scaling()
        elif self.spec.preset == SPECTRAL_REPORT:
            self.__spectral_report()

        for path in self.artifacts:
            gs.message('Written <{0}>'.format(path), _NAME)

        return list(self.artifacts)

    def print_products(self):
        for line in echo_spec(self.spec):
            sys.stdout.write(line + os.linesep)

        for name in self.__planned():
            sys.stdout.write('Planned File <{0}>{1}'.format(os.path.join(self.outdir, name), os.linesep))

    # ------------------------------------------------------------------------------------------------------------------
    # Private Methods
    # ------------------------------------------------------------------------------------------------------------------
    def __planned(self):
        spec = self.spec
        names = []
        for topology in spec.topology:
            for n in spec.sizes:
                stem = '{0}_n{1}'.format(topology, n)
                names.append('graph_{0}.txt'.format(stem))
                if spec.preset in (FIG_SCALING, SPECTRAL_REPORT):
                    continue

                names.extend(['mse_{0}.csv'.format(stem), 'trace_{0}.csv'.format(stem)])
                names.extend('theta_{0}_p{1}.csv'.format(stem, p) for p in range(spec.theta_paths))
                if spec.preset == CUSTOM:
                    names.append('bounds_{0}.json'.format(stem))

        if spec.preset == FIG_SCALING:
            names.append('scaling.csv')
        elif spec.preset == SPECTRAL_REPORT:
            names.append('spectral.json')

        return names

    def __fig_mse(self, envelopes):
        for topology in self.spec.topology:
            for n in self.spec.sizes:
                g, theta0, traces, curve = self.__simulate(topology, n)
                stem = '{0}_n{1}'.format(topology, n)
                header = self.__header + self.__run_lines(g, topology, n)

                self.__keep(write_curve_csv(curve, os.path.join(self.outdir, 'mse_{0}.csv'.format(stem)), header))
                self.__keep(write_trace_csv(traces, os.path.join(self.outdir, 'trace_{0}.csv'.format(stem)), header))

                for trace in traces[:self.spec.theta_paths]:
                    name = 'theta_{0}_p{1}.csv'.format(stem, trace.sample_path_id)
                    self.__keep(write_theta_snapshots(trace, os.path.join(self.outdir, name), header))

                found = stopping_time(curve, self.spec.target_for(topology, n))
                gs.message('{0} n={1}: stopping time {2}'.format(
                    topology, n, 'not reached' if found is None else found.tau), _NAME)

                if envelopes:
                    self.__envelopes(g, topology, n, curve, found, stem)

    def __envelopes(self, g, topology, n, curve, found, stem):
        if n > ENVELOPE_MAX_N:
            gs.warning('n={0} exceeds {1}; envelope checks skipped'.format(n, ENVELOPE_MAX_N), _NAME)
            return

        if topology == RGG:
            matrix = expected_matrix_monte_carlo(g, samples=self.spec.mc_samples,
                                                 rng=RandomStream(self.spec.seed, n, SPECTRAL_DOMAIN))
        else:
            matrix = expected_matrix_closed_form(g)

        sigma2 = float(self.spec.sigma2)
        delta = self.spec.delta_for(topology, n)
        gap = lambda2_gap(matrix)

        e1 = check_e1_bound(curve, sigma2, delta, gap)
        e2 = check_e2_bound(curve, sigma2, delta, gap)

        payload = {'topology': topology, 'n': n, 'lambda2': gap, 'delta': delta, 'sigma2': sigma2,
                   'e1': e1.to_dict(), 'e2': e2.to_dict(),
                   'guaranteed_mse_target': guaranteed_mse_target(sigma2, delta, gap),
                   'guaranteed_outer_iterations': guaranteed_outer_iterations(sigma2, delta, gap, float(curve.e2[0])),
                   'stopping_time': None if found is None else found._asdict()}

        self.__keep(write_report_json(payload, os.path.join(self.outdir, 'bounds_{0}.json'.format(stem)),
                                      self.__echo()))

    def __fig_scaling(self):
        rows = []
        for topology in self.spec.topology:
            for n in self.spec.sizes:
                g, _, _, curve = self.__simulate(topology, n)
                target = self.spec.target_for(topology, n)
                found = stopping_time(curve, target)

                rows.append({'topology': topology, 'n': n, 'm': g.m, 'diameter': diameter(g),
                             'inner_rounds': inner_rounds(g), 'delta': self.spec.delta_for(topology, n),
                             'target': target,
                             'tau_star': None if found is None else found.tau,
                             'rounds': None if found is None else found.rounds,
                             'transmissions': None if found is None else found.transmissions,
                             'resolution': None if found is None else found.resolution,
                             'paths': curve.paths})

        frame = pd.DataFrame(rows, columns=SCALING_COLUMNS)
        frame = frame.astype({key: 'Int64' for key in ('tau_star', 'rounds', 'transmissions', 'resolution')})
        self.__keep(write_commented_csv(frame, os.path.join(self.outdir, 'scaling.csv'),
                                        self.__header + [_record_line(self.spec)]))

    def __spectral_report(self):
        reports = []
        for topology in self.spec.topology:
            for n in self.spec.sizes:
                g = self.__graph(topology, n)
                self.__archive(g, topology, n)
                report = spectral_report(g, samples=self.spec.mc_samples,
                                         rng=RandomStream(self.spec.seed, n, SPECTRAL_DOMAIN))
                report.update(diameter=diameter(g), inner_rounds=inner_rounds(g))
                reports.append(report)

        self.__keep(write_report_json({'reports': reports}, os.path.join(self.outdir, 'spectral.json'),
                                      self.__echo()))

    def __simulate(self, topology, n):
        spec = self.spec
        g = self.__graph(topology, n)
        self.__archive(g, topology, n)
        theta0 = self.__initial_values(n)

        config = ProtocolConfig(delta=spec.delta_for(topology, n), sigma2=float(spec.sigma2),
                                max_outer=spec.max_outer, dissemination_mode=spec.dissemination_mode,
                                lambda2_hint=float(spec.lambda2_hint), record_every=spec.record_every)

        domain = (PATH_DOMAIN, TOPOLOGIES.index(topology), n)
        kept = spec.theta_paths

        # path ids fix the streams, so splitting the run keeps every trajectory unchanged
        traces = []
        if kept:
            traces += run_paths(g, theta0, replace(config, keep_theta=True), spec.seed, kept,
                                workers=self.workers, domain=domain)
        if spec.sample_paths > kept:
            traces += run_paths(g, theta0, config, spec.seed, spec.sample_paths - kept, workers=self.workers,
                                domain=domain, first=kept)

        curve = mse_curve(traces, sample_mean(theta0))

        return g, theta0, traces, curve

    def __archive(self, g, topology, n):
        path = os.path.join(self.outdir, 'graph_{0}_n{1}.txt'.format(topology, n))
        self.__keep(save_edge_list(g, path, self.__header))

    def __graph(self, topology, n):
        if topology == CYCLE:
            return build_cycle(n)
        if topology == GRID:
            return build_grid(math.isqrt(n))

        return build_rgg(n, float(self.spec.c), RandomStream(self.spec.seed, n, GRAPH_DOMAIN),
                         retry_cap=self.spec.retry_cap)

    def __initial_values(self, n):
        # drawn once per (seed, n) and shared by every sample path
        rng = RandomStream(self.spec.seed, n, DATA_DOMAIN)

        return float(self.spec.theta_mean) + math.sqrt(float(self.spec.theta_var)) * rng.normal(n)

    def __run_lines(self, g, topology, n):
        return ['run: topology={0} n={1} m={2} inner_rounds={3} delta={4!r}'.format(
            topology, n, g.m, inner_rounds(g), self.spec.delta_for(topology, n)), _record_line(self.spec)]

    def __echo(self):
        return spec_to_dict(self.spec, runtime=False)

    def __keep(self, path):
        self.artifacts.append(str(path))


def _record_line(spec):
    if spec.record_every is None:
        return 'recorded: every iteration up to tau=100, then every 10th; stopping time resolution follows'

    return 'recorded: every {0} iterations; stopping time resolution follows'.format(spec.record_every)


def run_experiment(spec):
    """
    Run an experiment and write its result files.

    Parameters
    ----------
    spec : ExperimentSpec

    Returns
    -------
    list of str
        Written files.
    """
    return Experiment(spec).run()


def _parser():
    parser = argparse.ArgumentParser(prog='tpcpy', description='Two-phase distributed averaging over noisy links.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)

    inputs = parser.add_argument_group('Input')
    inputs.add_argument('--preset', choices=PRESETS, help='Experiment preset.')
    inputs.add_argument('--spec', metavar='FILE', help='Spec file with key = value lines.')
    inputs.add_argument('--seed', type=int, help='Root seed of every random stream.')
    inputs.add_argument('--paths', type=int, dest='sample_paths', help='Number of sample paths.')
    inputs.add_argument('--sizes', help='Comma separated node counts.')
    inputs.add_argument('--topology', help='Comma separated topologies: ' + ', '.join(TOPOLOGIES) + '.')
    inputs.add_argument('--mode', choices=('explicit', 'aggregate'), dest='dissemination_mode',
                        help='Dissemination mode.')
    inputs.add_argument('--delta-prime', dest='delta_prime', help="RGG tolerance delta' / (log n)^2.")

    output = parser.add_argument_group('Output')
    output.add_argument('--out', dest='outdir', metavar='DIR',
                        help='Output directory; default ${0}, then the spec file.'.format(OUTDIR_ENV))
    output.add_argument('--workers', type=int, help='Worker processes; default number of processors.')
    output.add_argument('--theta-paths', type=int, dest='theta_paths', metavar='INT',
                        help='Write full theta snapshots of the first INT sample paths.')

    optional = parser.add_argument_group('Optional')
    optional.add_argument('-p', '--print-spec', action='store_true', help='Print the canonical spec and exit.')
    optional.add_argument('--validate', metavar='FILE', help='Validate a spec file, print every violation and exit.')
    optional.add_argument('-v', '--verbose', action='store_true', help='Verbose module output.')
    optional.add_argument('-q', '--quiet', action='store_true', help='Quiet module output.')

    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    gs.set_verbosity('quiet' if args.quiet else 'verbose' if args.verbose else 'normal')

    overrides = {key: getattr(args, key) for key in ('preset', 'seed', 'sample_paths', 'sizes', 'topology',
                                                     'dissemination_mode', 'delta_prime', 'theta_paths', 'workers')}
    overrides['outdir'] = args.outdir or os.environ.get(OUTDIR_ENV) or None
    for key in ('sizes', 'topology'):
        if overrides[key] is not None:
            overrides[key] = tuple(part.strip() for part in overrides[key].split(',') if part.strip())

    try:
        if args.validate:
            spec = build_spec(read_spec_file(args.validate))
            sys.stdout.write('Spec <{0}> is valid{1}'.format(args.validate, os.linesep))
            for line in echo_spec(spec):
                sys.stdout.write(line + os.linesep)
            return 0

        options = read_spec_file(args.spec) if args.spec else {}
        spec = build_spec(options, overrides)
        experiment = Experiment(spec)

        if args.print_spec:
            experiment.print_products()
            return 0

        experiment.run()

    except SpecValidationError as e:
        for violation in e.violations:
            sys.stderr.write('ERROR: {0}{1}'.format(violation, os.linesep))
        return 2
    except SpecFileError as e:
        sys.stderr.write('ERROR: {0}{1}'.format(e, os.linesep))
        return 2
    except TpcError as e:
        sys.stderr.write('ERROR: {0}{1}'.format(e, os.linesep))
        return 1
    except OSError as e:
        sys.stderr.write('ERROR: cannot write results: {0}{1}'.format(e, os.linesep))
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
