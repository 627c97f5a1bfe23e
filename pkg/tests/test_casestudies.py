#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""案例模型测试：生成、声明的检查、传输协议的计数器打包"""

import pytest

from src.models.reports import FAIL, PASS
from src.services.casestudies import (
    DELIVER, ROUND, TransmissionCounters, replicated_server_text, sidechannel_text, transmission_queries,
    transmission_text,
)
from src.services.cli import CheckRunner
from src.services.parser import parse_model
from src.services.wsts import covering, explore, validate_pred_basis
from src.utils.errors import BadParams


def test_generators_reject_bad_parameters():
    with pytest.raises(BadParams):
        sidechannel_text(5, 3)
    with pytest.raises(BadParams):
        replicated_server_text(0, 2, 1)
    with pytest.raises(BadParams):
        replicated_server_text(2, 2, 3)
    with pytest.raises(BadParams):
        transmission_text(1, 2)


def test_generated_models_parse():
    assert len(parse_model(sidechannel_text(2, 4)).checks) == 4
    persistent = parse_model(replicated_server_text(3, 2, 1, persistent=True))
    assert 'BC3' in persistent.defs
    assert 'Rro_sys' in parse_model(transmission_text(3, 2)).systems


@pytest.mark.timeout(300)
def test_sidechannel_checks_pass(sidechannel):
    reports = CheckRunner(sidechannel).run_all()
    assert [r.check for r in reports] == [c.name for c in sidechannel.checks]
    assert all(r.verdict == PASS for r in reports), [r.to_line() for r in reports]
    fast = reports[0]
    assert fast.evidence['replayed'] is True


@pytest.mark.timeout(300)
@pytest.mark.parametrize("fixture", ["repserver", "repserver_two_failures"])
def test_repserver_checks_pass(fixture, request):
    model = request.getfixturevalue(fixture)
    reports = CheckRunner(model).run_all()
    assert all(r.verdict == PASS for r in reports), [r.to_line() for r in reports]
    by_name = {r.check: r for r in reports}
    assert by_name['sys2_under_failure'].evidence['replayed'] is True


def test_exhausting_every_replica_fails_resilience(repserver_two_failures):
    runner = CheckRunner(repserver_two_failures)
    decl = next(c for c in repserver_two_failures.checks if c.name == 'otp_replicated')
    report = runner.run_check(decl)
    assert report.verdict == PASS
    assert report.expected == FAIL
    assert report.evidence['replayed'] is True


def test_transmission_queries_agree_with_explicit_oracle():
    tc = TransmissionCounters(2)
    w = tc.instance()
    for name, target in transmission_queries(2).items():
        v = covering(w, w.initial, target)
        assert v.answer == tc.explicit_cover(target, 4), name
        if v.answer:
            assert v.witness.replays(w.successors)


def test_transmission_delivery_is_reachable():
    tc = TransmissionCounters(2)
    w = tc.instance()
    v = covering(w, w.initial, tc.state((DELIVER, 1)))
    assert v.answer is True
    assert v.witness.last.ctrl == (DELIVER, 1)


def test_transmission_successors():
    tc = TransmissionCounters(2)
    succ = tc.succ(tc.initial)
    assert tc.state(ROUND, p=1, b=1) in succ
    assert tc.state(ROUND, server=2) in succ
    assert len(succ) == 2


@pytest.mark.timeout(120)
def test_transmission_pred_basis_is_sound_and_complete():
    w = TransmissionCounters(2).instance()
    assert validate_pred_basis(w, explore(w, 300)) == []


@pytest.mark.slow
@pytest.mark.timeout(300)
def test_transmission_checks(transmission):
    model, _ = transmission
    reports = {r.check: r for r in CheckRunner(model).run_all()}
    reorder = reports['ro_reordering']
    assert reorder.verdict == PASS
    assert reorder.evidence['barb'] == 'stale!1'
    assert reorder.evidence['replayed'] is True
    assert reports['rs_stuck'].verdict == PASS
    assert reports['ro_progress'].verdict == PASS
    rro = reports['rro_against_ro']
    assert rro.verdict == PASS
    assert rro.evidence['barb'] == 'stale!1'
    assert rro.evidence['missing_side'] == 'left'
    assert len(rro.evidence['right_trace']) > 1
    assert rro.evidence['replayed'] is True
    in_order = reports['rrc_in_order']
    assert in_order.verdict == PASS
    assert in_order.evidence['weak_barbs'] == ['d!1', 'd!2']
    assert in_order.evidence['saturated'] is True


def test_transmission_model_declares_carried_client():
    model = parse_model(transmission_text(3, 2))
    assert {'Rro', 'Rrc'} <= set(model.defs)
    assert 'Rrc_sys' in model.systems
    checks = {c.name: c for c in model.checks}
    assert checks['rro_against_ro'].param_dict['expect'] == 'inequivalent'
    assert checks['rrc_in_order'].kind == 'barbs'
