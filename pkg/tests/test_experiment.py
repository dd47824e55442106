import json
from decimal import Decimal

import numpy as np
import pandas as pd
import pytest

from tpcpy.e_experiment import OUTDIR_ENV, Experiment, main, run_experiment
from tpcpy.e_spec import (CUSTOM, FIG_MSE, build_spec, change_dict_value, echo_spec, parse_spec_text,
                          preset_defaults, read_spec_file, spec_to_dict, tuple_multi_string, validate_spec)
from tpcpy.exceptions import InvalidArgumentError, SpecFileError, SpecValidationError
from tpcpy.g_graph.g_topology import GRID, RGG, build_grid, load_edge_list
from tpcpy.p_protocol.p_twophase import AGGREGATE, EXPLICIT

SMALL_SPEC = """\
# four by four grid, a handful of paths
preset = fig-mse
topology = grid2d
sizes = 16
seed = 5
sample_paths = 3
max_outer = 20
"""


@pytest.fixture
def small_spec(tmp_path):
    path = tmp_path / 'small.spec'
    path.write_text(SMALL_SPEC)
    return path


class TestOptionDictionaries:
    def test_change_dict_value(self):
        assert change_dict_value({'a': '', 'b': 'x'}, '', None) == {'a': None, 'b': 'x'}

    def test_tuple_multi_string(self):
        assert tuple_multi_string({'a': 'x, y', 'b': 'z'}) == {'a': ('x', 'y'), 'b': 'z'}
        assert tuple_multi_string({'a': 'x, y', 'b': 'z'}, keys=('b',)) == {'a': 'x, y', 'b': ('z',)}

    def test_preset_defaults(self):
        assert preset_defaults(FIG_MSE)['sizes'] == (900, 2500)
        with pytest.raises(InvalidArgumentError):
            preset_defaults('fig-unknown')


class TestParsing:
    def test_comments_and_lists(self):
        options = parse_spec_text('seed = 1\n# comment\n\nsizes = 4, 9  # trailing\n')
        assert options == {'seed': '1', 'sizes': '4, 9'}

    def test_malformed_line(self):
        with pytest.raises(SpecFileError) as info:
            parse_spec_text('seed 1')
        assert info.value.kind == 'parse'

    def test_repeated_key(self):
        with pytest.raises(SpecFileError):
            parse_spec_text('seed = 1\nseed = 2\n')

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecFileError) as info:
            read_spec_file(tmp_path / 'absent.spec')
        assert info.value.kind == 'io'

    def test_validate_file(self, small_spec):
        spec = validate_spec(small_spec)
        assert spec.sizes == (16,)
        assert spec.max_outer == 20


class TestBuildSpec:
    def test_all_violations_reported(self):
        with pytest.raises(SpecValidationError) as info:
            build_spec({'delta': '0.6', 'sizes': '10', 'colour': 'blue'})

        violations = info.value.violations
        assert 'seed is required' in violations
        assert 'delta must be in (0, 1/2)' in violations
        assert 'unknown key <colour>' in violations
        assert any('squares' in v for v in violations)

    def test_invalid_number(self):
        with pytest.raises(SpecValidationError) as info:
            build_spec({'seed': '1', 'max_outer': '2.5'})
        assert info.value.violations == ['max_outer has an invalid value <2.5>']

    @pytest.mark.parametrize('value', ['abc', 'inf', 'nan', '1e400x'])
    def test_unparsable_integers(self, value):
        with pytest.raises(SpecValidationError) as info:
            build_spec({'seed': '1', 'max_outer': value})
        assert info.value.violations == ['max_outer has an invalid value <{0}>'.format(value)]

    def test_unparsable_integer_exit_code(self, tmp_path):
        path = tmp_path / 'bad.spec'
        path.write_text('seed = 1\nsample_paths = lots\n')
        assert main(['--validate', str(path)]) == 2

    def test_precedence(self):
        spec = build_spec({'seed': '1', 'sample_paths': '4'}, {'seed': 2, 'sample_paths': None})
        assert spec.seed == 2
        assert spec.sample_paths == 4

    def test_preset_sizes(self):
        assert build_spec({'seed': '1', 'preset': 'fig-scaling'}).sizes == (1024, 2500, 4900, 10000)

    def test_mode_alias(self):
        assert build_spec({'seed': '1', 'dissemination_mode': 'explicit'}).dissemination_mode == EXPLICIT
        assert build_spec({'seed': '1'}).dissemination_mode == AGGREGATE

    def test_decimals_keep_digits(self):
        spec = build_spec({'seed': '1', 'delta': '0.050'})
        assert spec.delta == Decimal('0.050')
        assert 'delta = 0.050' in echo_spec(spec)

    def test_echo_round_trip(self):
        spec = build_spec({'seed': '7', 'sizes': '16, 25', 'delta': '0.05', 'record_every': '5'})
        again = build_spec(parse_spec_text('\n'.join(echo_spec(spec))))
        assert again == spec

    def test_runtime_keys_left_out(self):
        spec = build_spec({'seed': '7'}, {'outdir': '/tmp/x', 'workers': 3})
        assert 'outdir' in spec_to_dict(spec)
        assert 'outdir' not in spec_to_dict(spec, runtime=False)
        assert 'workers' not in spec_to_dict(spec, runtime=False)

    def test_rgg_tolerance(self):
        spec = build_spec({'seed': '1', 'topology': 'rgg', 'sizes': '200', 'delta_prime': '2'})
        assert spec.delta_for(RGG, 200) == pytest.approx(2.0 / np.log(200) ** 2)
        assert spec.delta_for(GRID, 900) == pytest.approx(0.1)
        assert spec.target_for(GRID, 900) == pytest.approx(0.1)


class TestMain:
    def test_validate_bad_file(self, tmp_path, capsys):
        path = tmp_path / 'bad.spec'
        path.write_text('delta = 0.6\n')

        assert main(['--validate', str(path)]) == 2
        err = capsys.readouterr().err
        assert 'seed is required' in err
        assert 'delta must be in (0, 1/2)' in err

    def test_validate_good_file(self, small_spec, capsys):
        assert main(['--validate', str(small_spec)]) == 0
        assert 'seed = 5' in capsys.readouterr().out

    def test_validate_missing_file(self, tmp_path):
        assert main(['--validate', str(tmp_path / 'absent.spec')]) == 2

    def test_missing_seed(self, tmp_path):
        assert main(['--preset', 'fig-mse', '-p', '--out', str(tmp_path)]) == 2

    def test_print_spec(self, tmp_path, capsys):
        assert main(['--seed', '3', '--sizes', '16', '-p', '--out', str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert 'seed = 3' in out
        assert 'Planned File' in out
        assert 'mse_grid2d_n16.csv' in out

    def test_outdir_from_environment(self, tmp_path, monkeypatch, capsys):
        target = tmp_path / 'from-env'
        monkeypatch.setenv(OUTDIR_ENV, str(target))

        assert main(['--seed', '3', '--sizes', '16', '-p']) == 0
        assert str(target) in capsys.readouterr().out

    def test_fig_mse_files(self, small_spec, tmp_path):
        out = tmp_path / 'out'
        assert main(['--spec', str(small_spec), '--out', str(out), '--workers', '1', '-q']) == 0

        curve = pd.read_csv(out / 'mse_grid2d_n16.csv', comment='#')
        trace = pd.read_csv(out / 'trace_grid2d_n16.csv', comment='#')

        assert curve['tau'].tolist() == list(range(21))
        assert (curve['paths'] == 3).all()
        assert sorted(trace['sample_path_id'].unique()) == [0, 1, 2]
        assert (out / 'mse_grid2d_n16.csv').read_text().startswith('# preset = fig-mse\n')

    def test_results_independent_of_workers_and_reruns(self, small_spec, tmp_path):
        runs = [('a', '1'), ('b', '2'), ('c', '1')]
        for name, workers in runs:
            assert main(['--spec', str(small_spec), '--out', str(tmp_path / name), '--workers', workers, '-q']) == 0

        for stem in ('mse_grid2d_n16.csv', 'trace_grid2d_n16.csv'):
            reference = (tmp_path / 'a' / stem).read_bytes()
            for name, _ in runs[1:]:
                assert (tmp_path / name / stem).read_bytes() == reference

    def test_spectral_report(self, tmp_path):
        out = tmp_path / 'spectral'
        args = ['--preset', 'spectral-report', '--topology', 'cycle,grid2d', '--sizes', '16', '--seed', '1',
                '--out', str(out), '-q']
        assert main(args) == 0

        with open(out / 'spectral.json') as fp:
            document = json.load(fp)

        gaps = {r['topology']: r['lambda2'] for r in document['reports']}
        assert gaps['cycle'] == pytest.approx(1.0, abs=1e-10)
        assert gaps['grid2d'] == pytest.approx(0.5, abs=1e-12)
        assert document['spec']['seed'] == '1'
        assert 'outdir' not in document['spec']

    def test_custom_writes_bounds(self, tmp_path):
        out = tmp_path / 'custom'
        args = ['--preset', 'custom', '--sizes', '16', '--seed', '2', '--paths', '3', '--out', str(out), '-q']
        assert main(args) == 0

        with open(out / 'bounds_grid2d_n16.json') as fp:
            document = json.load(fp)

        assert document['spec']['preset'] == CUSTOM
        assert document['lambda2'] == pytest.approx(0.5)
        assert document['e1']['applicable'] is True
        # delta = 0.1 exceeds lambda2^2 / 4 on a grid
        assert document['e2']['applicable'] is False

    def test_graph_archived(self, small_spec, tmp_path):
        out = tmp_path / 'out'
        assert main(['--spec', str(small_spec), '--out', str(out), '--workers', '1', '-q']) == 0

        path = out / 'graph_grid2d_n16.txt'
        assert path.read_text().startswith('# preset = fig-mse\n')
        assert load_edge_list(path).edges == build_grid(4).edges

    def test_rgg_graph_archived(self, rgg200, tmp_path):
        path = tmp_path / 'rgg.spec'
        path.write_text('topology = rgg\nsizes = 200\nseed = 11\nsample_paths = 2\nmax_outer = 3\n')
        out = tmp_path / 'rgg'

        assert main(['--spec', str(path), '--out', str(out), '--workers', '1', '-q']) == 0

        loaded = load_edge_list(out / 'graph_rgg_n200.txt')
        assert loaded.edges == rgg200.edges
        assert loaded.square_of == rgg200.square_of
        np.testing.assert_array_equal(loaded.positions, rgg200.positions)

    def test_theta_snapshots(self, small_spec, tmp_path):
        plain, snapped = tmp_path / 'plain', tmp_path / 'snapped'
        assert main(['--spec', str(small_spec), '--out', str(plain), '--workers', '1', '-q']) == 0
        assert main(['--spec', str(small_spec), '--out', str(snapped), '--workers', '2', '--theta-paths', '2',
                     '-q']) == 0

        assert sorted(p.name for p in snapped.glob('theta_*')) == ['theta_grid2d_n16_p0.csv',
                                                                   'theta_grid2d_n16_p1.csv']
        assert not list(plain.glob('theta_*'))

        theta = pd.read_csv(snapped / 'theta_grid2d_n16_p0.csv', comment='#')
        assert theta.columns.tolist() == ['tau'] + ['theta_{0}'.format(k) for k in range(16)]
        assert theta['tau'].tolist() == list(range(21))

        trace = pd.read_csv(snapped / 'trace_grid2d_n16.csv', comment='#')
        first = trace[trace['sample_path_id'] == 0]
        np.testing.assert_allclose(theta.filter(like='theta_').mean(axis=1).to_numpy(), first['theta_mean'].to_numpy(),
                                   rtol=1e-12, atol=1e-12)

        # keeping snapshots leaves the trajectories untouched
        plain_trace = pd.read_csv(plain / 'trace_grid2d_n16.csv', comment='#')
        pd.testing.assert_frame_equal(trace, plain_trace)

    def test_theta_paths_bounded_by_sample_paths(self, small_spec, tmp_path):
        assert main(['--spec', str(small_spec), '--out', str(tmp_path), '--theta-paths', '4', '-p']) == 2

    def test_irregular_rgg_fails(self, tmp_path):
        path = tmp_path / 'rgg.spec'
        path.write_text('topology = rgg\nsizes = 200\nc = 0.05\nretry_cap = 1\nseed = 1\nsample_paths = 2\n')

        assert main(['--spec', str(path), '--out', str(tmp_path / 'rgg'), '-q']) == 1

    def test_run_experiment(self, tmp_path):
        spec = build_spec({'seed': '4', 'sizes': '9', 'sample_paths': '2', 'max_outer': '5'},
                          {'outdir': str(tmp_path), 'workers': 1})
        written = run_experiment(spec)

        names = ('graph_grid2d_n9.txt', 'mse_grid2d_n9.csv', 'trace_grid2d_n9.csv')
        assert sorted(written) == sorted(str(tmp_path / n) for n in names)
        assert Experiment(spec).workers == 1


@pytest.mark.slow
def test_mse_stopping_time_reproduction(tmp_path):
    out = tmp_path / 'fig-mse'
    assert main(['--preset', 'fig-mse', '--seed', '7', '--out', str(out), '-q']) == 0

    stops = []
    for n in (900, 2500):
        curve = pd.read_csv(out / 'mse_grid2d_n{0}.csv'.format(n), comment='#')
        mse, ci = curve['mse'].to_numpy(), curve['ci'].to_numpy()

        later = curve['tau'].to_numpy() >= 5
        assert np.all(np.diff(mse[later]) <= ci[later][1:] + ci[later][:-1])

        stops.append(int(curve['tau'][curve['mse'] <= 0.1].iloc[0]))

    assert all(10 <= tau <= 50 for tau in stops)
    assert max(stops) < 2 * min(stops)


@pytest.mark.slow
def test_scaling_is_flat(tmp_path):
    out = tmp_path / 'fig-scaling'
    assert main(['--preset', 'fig-scaling', '--sizes', '100,400,900', '--seed', '11', '--out', str(out), '-q']) == 0

    table = pd.read_csv(out / 'scaling.csv', comment='#')
    assert table['n'].tolist() == [100, 400, 900]

    stops = table['tau_star'].to_numpy(dtype=float)
    assert not np.isnan(stops).any()
    assert stops.max() < 2 * stops.min()
