import json

import pytest

from quatalg.cli import EXIT_BUDGET, EXIT_ERROR, EXIT_FAILED, EXIT_OK, EXIT_USAGE, run


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_module_report(capsys):
    code, report = invoke(capsys, 'module', 'y')
    assert code == EXIT_OK
    assert report['ok'] is True
    assert report['command'] == 'module'
    assert report['inputs'] == {'module': {'builtin': 'y'}}
    assert report['result']['dims'] == [8, 5, 3]
    assert report['result']['stable'] is True


def test_tensor_report_with_formula(capsys):
    code, report = invoke(capsys, 'tensor', '--left', 'y', '--right', 'y')
    assert code == EXIT_OK
    assert report['result']['dims'] == [12, 7]
    assert report['result']['formula'] == [12, 7]


def test_alternating_power(capsys):
    code, report = invoke(capsys, 'power', 'u', '--alt', '-k', '2')
    assert code == EXIT_OK
    assert report['result']['kind'] == 'alt'
    assert report['result']['dims'] == [8, 5]
    assert report['result']['formula'] == [8, 5]


def test_exactness_example(capsys):
    code, report = invoke(capsys, 'exactness', '--example')
    assert code == EXIT_OK
    assert report['result']['sequence']['ah_exact'] is True
    assert report['result']['tensored']['failures'] == [2]


def test_module_from_file(capsys, tmp_path):
    path = tmp_path / 'h.json'
    path.write_text(json.dumps({'n': 1, 'uprime': [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 'name': 'H'}))
    code, report = invoke(capsys, 'module', str(path))
    assert code == EXIT_OK
    assert report['result']['dims'] == [4, 3, 1]
    assert report['inputs']['module']['file'] == str(path)
    assert len(report['inputs']['module']['sha256']) == 64


def test_failed_ah_condition_reports_witness(capsys, tmp_path):
    rows = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    path = tmp_path / 'full.json'
    path.write_text(json.dumps({'n': 1, 'uprime': rows}))
    code, report = invoke(capsys, 'module', str(path))
    assert code == EXIT_ERROR
    assert report['error']['kind'] == 'not_ah_module'
    assert len(report['error']['witness']) == 4


def test_floats_in_input_are_usage_errors(capsys, tmp_path):
    path = tmp_path / 'float.json'
    path.write_text(json.dumps({'n': 1, 'uprime': [[0, 0.5, 0, 0]]}))
    code, report = invoke(capsys, 'module', str(path))
    assert code == EXIT_USAGE
    assert report['error']['kind'] == 'usage'


@pytest.mark.parametrize('argv', [
    [],
    ['module'],
    ['module', 'y', '--bogus'],
    ['module', 'missing.json'],
    ['variety', 'emit', '--lambda', '1,2'],
    ['variety', 'member', '--point', '1,0,0'],
    ['fueter', 'dim', '-k', '-1'],
    ['variety', 'emit', '--lambda', '0.5,0,0,0,0'],
    ['variety', 'member', '--point', '1,0,0,0,1,0,0,0,1e0'],
])
def test_usage_errors(capsys, argv):
    code, report = invoke(capsys, *argv)
    assert code == EXIT_USAGE
    assert report['error']['kind'] == 'usage'


def test_invalid_module_is_an_error(capsys):
    code, report = invoke(capsys, 'module', 'xq:0,0,0')
    assert code == EXIT_ERROR
    assert report['error']['kind'] == 'invariant_violation'


def test_budget_exit_code(capsys):
    code, report = invoke(capsys, 'tensor', '--left', 'y', '--right', 'y', '--budget', '10')
    assert code == EXIT_BUDGET
    assert report['error']['kind'] == 'budget_exceeded'
    assert report['error']['budget'] == 10


def test_hl_builtin(capsys):
    code, report = invoke(capsys, 'hl', 'so3', '-K', '2')
    assert code == EXIT_OK
    assert report['result']['passed'] is True
    assert report['result']['carrier_dims'] == [24, 15, 9]


def test_hl_from_file(capsys, tmp_path):
    path = tmp_path / 'solv.json'
    path.write_text(json.dumps({'dim': 2, 'brackets': [[0, 1, 1, 1]], 'name': 'solv'}))
    code, report = invoke(capsys, 'hl', str(path), '-K', '2')
    assert code == EXIT_OK
    assert report['result']['lie_dim'] == 2


def test_hl_rejects_non_lie_brackets(capsys, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'dim': 3, 'brackets': [[0, 1, 2, 1], [0, 2, 0, 1]]}))
    code, report = invoke(capsys, 'hl', str(path))
    assert code == EXIT_ERROR
    assert report['error']['kind'] == 'invariant_violation'


def test_variety_member(capsys):
    code, report = invoke(capsys, 'variety', 'member', '--point', '1,0,0,0,1,0,0,0,1')
    assert code == EXIT_OK
    assert report['result']['member'] is True
    assert report['result']['jacobian_rank'] == 5
    assert report['seed'] == 0


def test_variety_emit(capsys):
    code, report = invoke(capsys, 'variety', 'emit', '--lambda', '0,0,0,0,0')
    assert code == EXIT_OK
    assert report['result']['case'] == 1
    assert report['result']['system']['count'] == 5


def test_fueter_commands(capsys):
    code, report = invoke(capsys, 'fueter', 'dim', '-k', '2', '--forms')
    assert code == EXIT_OK
    assert report['result']['dim'] == report['result']['expected'] == 24
    assert report['result']['forms_agree'] is True

    code, report = invoke(capsys, 'fueter', 'delta', '-n', '1')
    assert report['result']['plus'] == report['result']['minus'] == 3

    code, report = invoke(capsys, 'fueter', 'grades', '-K', '4')
    assert report['result']['dims'] == report['result']['expected']


def test_timing_is_optional(capsys):
    _, report = invoke(capsys, 'module', 'h')
    assert 'seconds' not in report
    _, report = invoke(capsys, 'module', 'h', '--timing')
    assert report['seconds'] >= 0


@pytest.mark.slow
def test_quick_suite_passes(capsys):
    code, report = invoke(capsys, 'suite', '--quick')
    assert code == EXIT_OK
    assert all(check['passed'] for check in report['result']['checks'])


def _identity_gens(path, n):
    rows = [['1' if i == j else '0' for j in range(n)] for i in range(n)]
    path.write_text(json.dumps({'ambient': n, 'rows': rows}))
    return path


def test_ideal_from_generator_file(capsys, tmp_path):
    gens = _identity_gens(tmp_path / 'gens.json', 4)
    code, report = invoke(capsys, 'ideal', '--gen', 'h', '--gens', f"1,{gens}", '-K', '2', '--absorption')
    assert code == EXIT_OK
    assert report['inputs']['gens']['grade'] == 1
    assert len(report['inputs']['gens']['sha256']) == 64
    assert report['result']['generator_grade'] == 1
    assert report['result']['dims'] == {'0': 0, '1': 4, '2': 4}
    assert report['result']['passed'] is True


def test_quotient_from_generator_file(capsys, tmp_path):
    gens = _identity_gens(tmp_path / 'gens.json', 4)
    code, report = invoke(capsys, 'quotient', '--gen', 'h', '--gens', f"1,{gens}", '-K', '2')
    assert code == EXIT_OK
    assert report['result']['dims'] == {'0': [4, 3], '1': [0, 0], '2': [0, 0]}


@pytest.mark.parametrize('argv', [
    ['ideal', '--gens', 'x,gens.json', '-K', '2'],
    ['ideal', '--gens', '2', '-K', '2'],
    ['ideal', '--gens', '1,missing.json', '-K', '2'],
    ['free', '-K', '2'],
    ['free', 'h', '--gen', 'y', '-K', '2'],
    ['hl', '-K', '2'],
])
def test_generator_flag_errors(capsys, argv):
    code, report = invoke(capsys, *argv)
    assert code == EXIT_USAGE
    assert report['error']['kind'] == 'usage'


def test_generators_outside_their_grade(capsys, tmp_path):
    gens = _identity_gens(tmp_path / 'gens.json', 4)
    code, report = invoke(capsys, 'ideal', '--gen', 'h', '--gens', f"1,{gens}", '-K', '2', '--weight', '2')
    assert code == EXIT_USAGE


def test_free_accepts_gen_flag(capsys):
    _, positional = invoke(capsys, 'free', 'h', '-K', '2')
    code, flagged = invoke(capsys, 'free', '--gen', 'h', '-K', '2')
    assert code == EXIT_OK
    assert flagged['result'] == positional['result']
    assert flagged['inputs'] == {'module': {'builtin': 'h'}}


def test_hl_accepts_lie_flag(capsys):
    code, report = invoke(capsys, 'hl', '--lie', 'so3', '-K', '2')
    assert code == EXIT_OK
    assert report['inputs'] == {'lie': {'builtin': 'so3'}}
    assert report['result']['passed'] is True


def test_failed_axiom_sets_exit_code(capsys, monkeypatch):
    from quatalg import api
    from quatalg.halg import AxiomReport

    def broken(alg):
        report = AxiomReport()
        report.add('коммутативность', False, 'нарушений: 1')
        return report

    monkeypatch.setattr(api, 'axiom_a_check', broken)
    code, report = invoke(capsys, 'free', 'h', '-K', '1', '--axioms')
    assert code == EXIT_FAILED
    assert report['ok'] is False
    assert report['result']['passed'] is False
