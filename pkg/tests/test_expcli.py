import pytest
import numpy as np
from imslab.domain import SchemeId, FIELD_NAMES
from imslab.expcli.cli import main, build_parser, EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_DIVERGENCE
from imslab.expcli.runner import CSV_COLUMNS, FIGURES, EVENT_CAP_ENV, event_cap_from_env, parse_schemes
from conftest import write_params, read_rows


def output_lines(capsys):
    return dict(line.split('\t') for line in capsys.readouterr().out.splitlines())


def column(rows, scheme, name):
    return [float(row[name]) for row in rows if row['scheme'] == scheme]


class TestSimulate:
    @pytest.mark.parametrize('scheme, expected', [('standard', '1594.000'), ('predictive', '854.000')])
    def test_disruption(self, capsys, params_file, scheme, expected):
        assert main(['simulate', '--scheme', scheme, '--params', str(params_file)]) == EXIT_OK
        report = output_lines(capsys)
        assert report['disruption_ms'] == expected
        assert report['context_preserved'] == 'true'
        assert report['regime'] == 'slack'

    def test_counts(self, capsys, params_file):
        main(['simulate', '--scheme', 'reactive', '--params', str(params_file)])
        report = output_lines(capsys)
        assert (report['messages_total'], report['messages_mn']) == ('19', '12')

    def test_missing_params_file(self, capsys, tmp_path):
        assert main(['simulate', '--scheme', 'standard', '--params', str(tmp_path / 'nope.json')]) == EXIT_CONFIG
        captured = capsys.readouterr()
        assert 'not found' in captured.err
        assert captured.out == ''

    def test_unknown_scheme(self, params_file):
        with pytest.raises(SystemExit) as err:
            main(['simulate', '--scheme', 'proactive', '--params', str(params_file)])
        assert err.value.code == 2

    def test_trace_is_deterministic(self, tmp_path, params_file):
        for name in ('a.jsonl', 'b.jsonl'):
            main(['simulate', '--scheme', 'qos-reactive', '--params', str(params_file), '--trace', str(tmp_path / name)])
        first = (tmp_path / 'a.jsonl').read_bytes()
        assert first == (tmp_path / 'b.jsonl').read_bytes()
        assert len(first.splitlines()) == 24

    def test_ladder(self, tmp_path, params_file):
        ladder = tmp_path / 'standard.txt'
        main(['simulate', '--scheme', 'standard', '--params', str(params_file), '--ladder', str(ladder)])
        lines = ladder.read_text().splitlines()
        assert lines[0] == '# standard'
        assert lines[-1].endswith('@ 1594.000 ms')


class TestAnalytic:
    def test_reactive(self, capsys, params_file):
        assert main(['analytic', '--scheme', 'reactive', '--params', str(params_file)]) == EXIT_OK
        assert capsys.readouterr().out == '873.000\n'

    def test_qos_reactive_with_ar_delay(self, capsys, tmp_path):
        path = write_params(tmp_path, t_par=0)
        main(['analytic', '--scheme', 'qos-reactive', '--params', str(path)])
        assert capsys.readouterr().out == '873.000\n'


class TestSweep:
    def sweep(self, params_file, out, *extra):
        return main(['sweep', '--params', str(params_file), '--out', str(out), *extra])

    def test_p_cscf_delay(self, capsys, tmp_path, params_file):
        out  = tmp_path / 'onp.csv'
        code = self.sweep(params_file, out, '--param', 't_onp', '--from', '0', '--to', '21', '--step', '7',
                          '--schemes', 'predictive,reactive')
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == str(out)
        rows = read_rows(out)
        assert len(rows) == 8
        assert [row['scheme'] for row in rows[:2]] == ['predictive', 'reactive']
        assert column(rows, 'predictive', 'analytic_ms') == [854] * 4
        assert column(rows, 'reactive', 'analytic_ms') == [852, 873, 894, 915]
        assert rows[0]['simulated_ms'] == '' and rows[0]['regime'] == ''

    def test_header_after_comments(self, tmp_path, params_file):
        out = tmp_path / 'mc.csv'
        self.sweep(params_file, out, '--param', 't_mc', '--from', '50', '--to', '250', '--step', '50', '--schemes', 'standard')
        lines = out.read_text().splitlines()
        data  = [line for line in lines if not line.startswith('#')]
        assert lines[0].startswith('# sweep t_mc')
        assert data[0] == ','.join(CSV_COLUMNS)
        assert data[1].startswith('t_mc,50.000,standard,')
        assert np.allclose(np.diff(column(read_rows(out), 'standard', 'analytic_ms')), 500)

    def test_step_past_the_end(self, tmp_path, params_file):
        out = tmp_path / 'one.csv'
        self.sweep(params_file, out, '--param', 't_h', '--from', '10', '--to', '20', '--step', '50', '--schemes', 'standard')
        rows = read_rows(out)
        assert [(row['value'], row['scheme']) for row in rows] == [('10.000', 'standard')]

    def test_infinite_step(self, tmp_path, params_file):
        out = tmp_path / 'inf.csv'
        code = self.sweep(params_file, out, '--param', 't_mc', '--from', '10', '--to', '20', '--step', 'inf', '--schemes', 'standard')
        assert code == EXIT_OK
        assert [(row['value'], row['analytic_ms']) for row in read_rows(out)] == [('10.000', '414.000')]

    def test_simulated_columns(self, tmp_path, params_file):
        out = tmp_path / 'sim.csv'
        code = self.sweep(params_file, out, '--param', 't_onp', '--from', '0', '--to', '21', '--step', '7',
                          '--schemes', 'all', '--simulate')
        assert code == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 4 * len(SchemeId)
        for row in rows:
            assert row['simulated_ms'] == row['analytic_ms']
            assert row['regime'] == 'slack'

    @pytest.mark.parametrize('extra', [
        ['--param', 'T_onp', '--from', '0', '--to', '21', '--step', '7'],
        ['--param', 't_onp', '--from', '21', '--to', '0', '--step', '7'],
        ['--param', 't_onp', '--from', '0', '--to', '21', '--step', '0'],
        ['--param', 't_onp', '--from', '-7', '--to', '21', '--step', '7'],
        ['--param', 't_mc', '--from', '0', '--to', 'inf', '--step', '1'],
        ['--param', 't_mc', '--from', 'nan', '--to', '21', '--step', '7'],
    ])
    def test_invalid_sweep(self, capsys, tmp_path, params_file, extra):
        out = tmp_path / 'bad.csv'
        assert self.sweep(params_file, out, *extra) == EXIT_CONFIG
        assert not out.exists()
        assert capsys.readouterr().err != ''


class TestCompare:
    def test_operating_point(self, capsys, params_file):
        assert main(['compare', '--params', str(params_file)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == 'scheme,analytic_ms,simulated_ms,abs_diff_ms,regime'
        assert len(lines) == 1 + len(SchemeId)
        for line in lines[1:]:
            _, analytic, simulated, diff, _ = line.split(',')
            assert analytic == simulated
            assert float(diff) == 0

    def test_context_branch_dominates(self, capsys, tmp_path):
        path = write_params(tmp_path, t_onp=2000, t_ops=3000)
        assert main(['compare', '--params', str(path)]) == EXIT_DIVERGENCE
        captured = capsys.readouterr()
        assert 'predictive,854.000,2308.000' in captured.out
        assert 'predictive: simulated 2308.000 ms vs analytic 854.000 ms' in captured.err
        assert 'ct_data' in captured.err
        diverged = {line.split(':')[0] for line in captured.err.splitlines() if ' vs analytic ' in line}
        assert diverged == {'predictive', 'qos-predictive'}

    def test_zero_delays(self, tmp_path):
        path = write_params(tmp_path, **{name: 0 for name in FIELD_NAMES})
        assert main(['compare', '--params', str(path)]) == EXIT_OK


class TestFigures:
    def test_datasets(self, capsys, tmp_path):
        assert main(['figures', '--out', str(tmp_path)]) == EXIT_OK
        written = capsys.readouterr().out.split()
        assert sorted(written) == sorted(str(tmp_path / f'{name}.csv') for name in FIGURES)

    def test_byte_identical(self, tmp_path):
        main(['figures', '--out', str(tmp_path / 'a')])
        main(['figures', '--out', str(tmp_path / 'b')])
        for name in FIGURES:
            assert (tmp_path / 'a' / f'{name}.csv').read_bytes() == (tmp_path / 'b' / f'{name}.csv').read_bytes()

    def test_mn_cn_delay_slopes(self, tmp_path):
        main(['figures', '--out', str(tmp_path)])
        rows = read_rows(tmp_path / 'fig10.csv')
        assert len(rows) == 11 * 3
        step = 25.6
        for scheme, coefficient in (('standard', 10), ('predictive', 4), ('reactive', 4)):
            assert np.allclose(np.diff(column(rows, scheme, 'analytic_ms')), coefficient * step, atol=2e-3)
            assert column(rows, scheme, 'simulated_ms') == column(rows, scheme, 'analytic_ms')

    def test_home_agent_gaps(self, tmp_path):
        main(['figures', '--out', str(tmp_path)])
        rows = read_rows(tmp_path / 'fig11.csv')
        standard   = np.array(column(rows, 'standard', 'analytic_ms'))
        predictive = np.array(column(rows, 'predictive', 'analytic_ms'))
        reactive   = np.array(column(rows, 'reactive', 'analytic_ms'))
        assert np.allclose(standard - predictive, 740, atol=2e-3)
        assert np.allclose(standard - reactive, 721, atol=2e-3)

    def test_qos_curves(self, tmp_path):
        main(['figures', '--out', str(tmp_path)])
        rows = read_rows(tmp_path / 'fig17.csv')
        assert {row['scheme'] for row in rows} == {scheme.value for scheme in SchemeId}
        assert column(rows, 'qos-predictive', 'simulated_ms') == column(rows, 'predictive', 'simulated_ms')
        assert column(rows, 'qos-predictive', 'analytic_ms') == column(rows, 'predictive', 'analytic_ms')

    def test_grid_is_noted(self, tmp_path):
        main(['figures', '--out', str(tmp_path)])
        first = (tmp_path / 'fig12.csv').read_text().splitlines()[:3]
        assert all(line.startswith('#') for line in first)

    def test_out_is_a_file(self, tmp_path):
        taken = tmp_path / 'taken'
        taken.write_text('')
        assert main(['figures', '--out', str(taken)]) == EXIT_CONFIG


class TestEventCap:
    def test_from_environment(self, monkeypatch, params_file):
        monkeypatch.setenv(EVENT_CAP_ENV, '5')
        assert main(['simulate', '--scheme', 'standard', '--params', str(params_file)]) == EXIT_RUNTIME

    def test_not_a_number(self, monkeypatch, params_file):
        monkeypatch.setenv(EVENT_CAP_ENV, 'abc')
        assert main(['simulate', '--scheme', 'standard', '--params', str(params_file)]) == EXIT_CONFIG

    def test_flag_beats_environment(self, monkeypatch, params_file):
        monkeypatch.setenv(EVENT_CAP_ENV, 'abc')
        assert main(['simulate', '--scheme', 'standard', '--params', str(params_file), '--event-cap', '100']) == EXIT_OK

    @pytest.mark.parametrize('environ, expected', [({}, None), ({EVENT_CAP_ENV: ''}, None), ({EVENT_CAP_ENV: '42'}, 42)])
    def test_parsing(self, environ, expected):
        assert event_cap_from_env(environ) == expected

    def test_must_be_positive(self):
        with pytest.raises(ValueError):
            event_cap_from_env({EVENT_CAP_ENV: '0'})


class TestParser:
    def test_schemes_all(self):
        assert parse_schemes('all') == tuple(SchemeId)

    def test_schemes_list_keeps_one_of_each(self):
        assert parse_schemes('reactive, standard,reactive') == (SchemeId.Reactive, SchemeId.Standard)

    def test_sweep_defaults_to_every_scheme(self, tmp_path):
        args = build_parser().parse_args(['sweep', '--param', 't_mc', '--from', '0', '--to', '1', '--step', '1',
                                          '--params', 'p.json', '--out', str(tmp_path / 'o.csv')])
        assert args.schemes == tuple(SchemeId)
        assert args.event_cap is None
