#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""命令行入口测试：退出码、JSON 行输出、生成命令"""

import json

import pytest

from src.models.reports import FAIL, INCONCLUSIVE, PASS, RunReport
from src.services.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, EXIT_USAGE, exit_code, main


def _lines(out: str):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.fixture
def repserver_file(tmp_path):
    path = tmp_path / "repserver.rck"
    assert main(["gen", "repserver", "--clients", "2", "--replicas", "2", "--maxfail", "1", "-o", str(path)]) == 0
    return path


def test_exit_code_precedence():
    def report(v):
        return RunReport(check='x', verdict=v)

    assert exit_code([]) == EXIT_PASS
    assert exit_code([report(PASS), report(INCONCLUSIVE)]) == EXIT_INCONCLUSIVE
    assert exit_code([report(INCONCLUSIVE), report(FAIL), report(PASS)]) == EXIT_FAIL


def test_parse_command(repserver_file, capsys):
    assert main(["parse", str(repserver_file)]) == EXIT_PASS
    (line,) = _lines(capsys.readouterr().out)
    assert line['verdict'] == PASS
    assert line['stats']['systems'] == 3


def test_parse_error_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.rck"
    path.write_text("domain { v }\nsystem S = a!(v .0\n", encoding='utf-8')
    assert main(["parse", str(path)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert f"{path}:2:" in err


def test_missing_file_is_usage_error(tmp_path):
    assert main(["parse", str(tmp_path / "nope.rck")]) == EXIT_USAGE


def test_no_arguments_is_usage_error():
    assert main([]) == EXIT_USAGE


def test_gen_to_stdout(capsys):
    assert main(["gen", "sidechannel", "--n", "2", "--n1", "4"]) == 0
    assert "system c1" in capsys.readouterr().out


def test_gen_rejects_bad_parameters():
    assert main(["gen", "sidechannel", "--n", "4", "--n1", "2"]) == EXIT_USAGE


def test_resilience_command(repserver_file, capsys):
    code = main(["resilience", str(repserver_file), "--core", "OTP", "--context", "Crep", "--adversary", "FS"])
    assert code == EXIT_PASS
    (line,) = _lines(capsys.readouterr().out)
    assert line['check'] == 'resilience'
    assert line['verdict'] == PASS
    assert line['engine'] == 'explicit'


def test_resilience_expectation_mismatch_fails(repserver_file):
    code = main(["resilience", str(repserver_file), "--core", "OTP", "--context", "Crep", "--adversary", "FS",
                 "--expect", "fail"])
    assert code == EXIT_FAIL


def test_bisim_command(repserver_file, capsys):
    assert main(["bisim", str(repserver_file), "--left", "Sys1", "--right", "Sys1"]) == EXIT_PASS
    (line,) = _lines(capsys.readouterr().out)
    assert line['evidence']['equivalent'] is True


def test_barbs_command(repserver_file, capsys):
    assert main(["barbs", str(repserver_file), "--system", "Sys1", "--expect", "d1!v"]) == EXIT_PASS
    (line,) = _lines(capsys.readouterr().out)
    assert line['evidence']['weak_barbs'] == ['d1!v']


def test_cover_command(tmp_path, capsys):
    path = tmp_path / "tx.rck"
    assert main(["gen", "transmission", "--k", "2", "--pmax", "2", "-o", str(path)]) == 0
    code = main(["cover", str(path), "--instance", "transmission:2", "--target", "delivery_reachable",
                 "--expect", "reachable"])
    assert code == EXIT_PASS
    (line,) = _lines(capsys.readouterr().out)
    assert line['evidence']['replayed'] is True


def test_unknown_cover_query_is_usage_error(tmp_path):
    path = tmp_path / "tx.rck"
    main(["gen", "transmission", "-o", str(path)])
    assert main(["cover", str(path), "--instance", "transmission:2", "--target", "nope"]) == EXIT_USAGE


@pytest.mark.slow
@pytest.mark.timeout(300)
def test_check_command_is_deterministic(tmp_path, capsys):
    path = tmp_path / "side.rck"
    assert main(["gen", "sidechannel", "--nested", "-o", str(path)]) == 0
    capsys.readouterr()
    assert main(["--seed", "3", "check", str(path)]) == EXIT_PASS
    first = capsys.readouterr().out
    assert main(["--seed", "3", "check", str(path)]) == EXIT_PASS
    second = capsys.readouterr().out
    assert first == second
    assert [line['check'] for line in _lines(first)] == [
        'fast_err', 'slow_err', 'noise_explicit', 'noise_wsts', 'noise_nested',
    ]


def test_check_only_unknown_name(repserver_file):
    assert main(["check", str(repserver_file), "--only", "nope"]) == EXIT_USAGE


@pytest.mark.timeout(300)
def test_selftest_command(capsys):
    assert main(["selftest", "--count", "20", "--bound", "8"]) in (EXIT_PASS, EXIT_INCONCLUSIVE)
    checks = [line['check'] for line in _lines(capsys.readouterr().out)]
    assert checks == ['counter_covering', 'counter_subcovering', 'transmission_queries', 'transmission_pred_basis']
