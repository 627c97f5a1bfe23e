#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""弱 barb、双模拟、err/卡死可达性与韧性判定测试"""

import random

import pytest

from src.models.reports import FAIL, PASS
from src.models.terms import Barb, ContextTerm, show
from src.services.adversary import benign, couple, resolve_adversary
from src.services.parser import parse_model, parse_term
from src.services.resilience import (
    EXPLICIT, WSTS, check_context_constraints, check_resilience, err_check, explicit_weak_barbed_bisim,
    replay_bisim_evidence, stuck_check, system_weak_barbs,
)
from src.services.semantics import compose_contexts
from src.utils.errors import PreconditionViolated


def test_weak_barbs_of_one_time_provider(tiny_model):
    barbs, saturated = system_weak_barbs(tiny_model, tiny_model.system('Sys1'))
    assert barbs == frozenset({Barb('d1', 'v')})
    assert saturated


@pytest.mark.parametrize("engine", [EXPLICIT, WSTS])
def test_fast_program_reaches_err(sidechannel, engine):
    adv = resolve_adversary(sidechannel, 'A')
    v = err_check(sidechannel, sidechannel.system('c'), adv, engine=engine)
    assert v.answer is True
    cs = couple(sidechannel, sidechannel.system('c'), adv)
    assert v.witness.states[0] == cs.initial
    assert v.witness.replays(cs.successors)


@pytest.mark.parametrize("engine", [EXPLICIT, WSTS])
def test_slow_program_never_reaches_err(sidechannel, engine):
    adv = resolve_adversary(sidechannel, 'A')
    v = err_check(sidechannel, sidechannel.system('c1'), adv, engine=engine)
    assert v.answer is False
    assert v.witness is None


@pytest.mark.timeout(120)
@pytest.mark.parametrize("engine", [EXPLICIT, WSTS])
def test_white_noise_context_is_resilient(sidechannel, engine, rng):
    verdict, report = check_resilience(sidechannel, sidechannel.system('c'), sidechannel.context('Noise'),
                                       resolve_adversary(sidechannel, 'A'), engine=engine, samples=100, rng=rng)
    assert verdict.answer is True
    assert report.all_pass
    assert verdict.evidence['constraints']['outcome'] == PASS


@pytest.mark.timeout(120)
def test_nested_white_noise_is_resilient(sidechannel):
    verdict, _ = check_resilience(sidechannel, sidechannel.system('c'), sidechannel.context('Noise2'),
                                  resolve_adversary(sidechannel, 'A'))
    assert verdict.answer is True


def test_replication_survives_one_failure(repserver):
    verdict, _ = check_resilience(repserver, repserver.system('OTP'), repserver.context('Crep'),
                                  resolve_adversary(repserver, 'FS'))
    assert verdict.answer is True


def test_replication_breaks_when_every_replica_fails(repserver_two_failures):
    m = repserver_two_failures
    verdict, _ = check_resilience(m, m.system('OTP'), m.context('Crep'), resolve_adversary(m, 'FS'))
    assert verdict.answer is False
    assert verdict.evidence['bisim']['equivalent'] is False


def test_unknown_engine(repserver):
    with pytest.raises(PreconditionViolated):
        check_resilience(repserver, repserver.system('OTP'), repserver.context('Crep'),
                         resolve_adversary(repserver, 'FS'), engine='magic')


def test_single_server_is_not_bisimilar_under_failure(repserver):
    left = couple(repserver, repserver.system('Sys2'), benign())
    right = couple(repserver, repserver.system('Sys2'), resolve_adversary(repserver, 'FS1'))
    result = explicit_weak_barbed_bisim(left, right)
    assert result.equivalent is False
    assert result.barb.startswith('d')
    assert result.left_trace and result.right_trace
    assert replay_bisim_evidence(left, right, result)


def test_bisimulation_is_reflexive(repserver):
    left = couple(repserver, repserver.system('Sys3'), benign())
    right = couple(repserver, repserver.system('Sys3'), benign())
    result = explicit_weak_barbed_bisim(left, right)
    assert result.equivalent is True
    assert not replay_bisim_evidence(left, right, result)


def test_bisimulation_over_budget_is_inconclusive(repserver):
    left = couple(repserver, repserver.system('Sys2'), benign())
    right = couple(repserver, repserver.system('Sys3'), benign())
    result = explicit_weak_barbed_bisim(left, right, cap=1)
    assert result.equivalent is None
    assert result.reason


def test_stuck_check():
    m = parse_model("channel a, b\nsystem Dead = new a . a!().0\nsystem Live = !b!().0\n")
    v = stuck_check(m, m.system('Dead'), benign())
    assert v.answer is True
    assert v.witness.steps == 0
    assert stuck_check(m, m.system('Live'), benign()).answer is False


def test_context_output_violates_constraints(tiny_model):
    noisy = ContextTerm(parse_term("b!(0).0 | []_1"))
    report = check_context_constraints(tiny_model, noisy, tiny_model.system('Sys1'), depth=8)
    assert report.conditions['2c'].outcome == FAIL
    assert report.conditions['2c'].counterexample == str(Barb('b', 0))
    assert not report.all_pass


def test_guarded_hole_violates_constraints(tiny_model):
    guarded = ContextTerm(parse_term("a?(x).[]_1"))
    report = check_context_constraints(tiny_model, guarded, tiny_model.system('Sys1'), depth=8)
    assert report.conditions['2a'].outcome == FAIL
    assert 'a?' in report.conditions['2a'].counterexample


def test_replicated_context_satisfies_constraints(repserver):
    report = check_context_constraints(repserver, repserver.context('Crep'), repserver.system('OTP'), depth=8)
    assert report.all_pass


RANDOM_MODEL = """
domain { 0..1 }
channel a, b, c, e
"""

FRAGMENTS = [
    "a!(0).0", "a!(1).0", "a?(x).b!(x).0", "a?(x).c!(0).0", "a?(x).[x = 0] b!(1).0",
    "b!(0).0", "c!(1).0", "a!(0).a!(1).0", "b!(0).0 + c!(0).0",
]

CONTEXTS = [
    "[]_1", "[]_1 | c!(0).0", "[]_1 | b!(0).0", "new e . ([]_1 | e!(0).0 | e?(y).0)", "[]_1 | []_2",
]


def _random_core(rng) -> str:
    return "new a . (" + " | ".join(rng.sample(FRAGMENTS, rng.randint(1, 3))) + ")"


def _closed(model, text):
    return couple(model, parse_term(text), benign())


def test_wsts_engine_rejects_unmatched_core_move():
    m = parse_model(RANDOM_MODEL)
    q = parse_term("new a . (a!(0).0 | a?(x).b!(0).0 | a?(x).c!(0).0)")
    c = ContextTerm(parse_term("[]_1 | c!(0).0"))
    explicit, _ = check_resilience(m, q, c, benign(), engine=EXPLICIT)
    wsts, _ = check_resilience(m, q, c, benign(), engine=WSTS, samples=20, rng=random.Random(5))
    assert explicit.answer is False
    assert wsts.answer is False
    assert wsts.evidence['obligation'] == 'upward'


@pytest.mark.slow
@pytest.mark.timeout(600)
def test_engines_agree_on_random_models():
    m = parse_model(RANDOM_MODEL)
    rng = random.Random(2024)
    compared = 0
    for i in range(50):
        q = parse_term(_random_core(rng))
        c = ContextTerm(parse_term(rng.choice(CONTEXTS)))
        explicit, _ = check_resilience(m, q, c, benign(), engine=EXPLICIT)
        wsts, _ = check_resilience(m, q, c, benign(), engine=WSTS, samples=10, rng=random.Random(i))
        if explicit.answer is None or wsts.answer is None:
            continue
        compared += 1
        assert explicit.answer == wsts.answer, (i, show(q), show(c.term))
    assert compared >= 10


@pytest.mark.timeout(300)
def test_bisimulation_is_an_equivalence_on_random_systems():
    m = parse_model(RANDOM_MODEL)
    rng = random.Random(99)
    texts = ["b!(0).0", "new e . (e!(0).0 | e?(y).b!(0).0)", "new a . (a!(0).0 | a?(x).b!(x).0)"]
    texts += [_random_core(rng) for _ in range(7)]
    systems = [_closed(m, t) for t in texts]
    n = len(systems)
    eq = [[explicit_weak_barbed_bisim(systems[i], systems[j]).equivalent for j in range(n)] for i in range(n)]
    for i in range(n):
        assert eq[i][i] is True
        for j in range(n):
            assert eq[i][j] is not None
            assert eq[i][j] == eq[j][i]
            for k in range(n):
                if eq[i][j] and eq[j][k]:
                    assert eq[i][k], (texts[i], texts[j], texts[k])
    assert eq[0][1] and eq[0][2]


def test_distinguishing_trace_ends_in_the_barb():
    m = parse_model(RANDOM_MODEL)
    left = _closed(m, "new e . (e!(0).0 | e?(y).b!(0).0)")
    right = _closed(m, "c!(0).0")
    result = explicit_weak_barbed_bisim(left, right)
    assert result.equivalent is False
    assert result.barb == 'b!0'
    assert result.missing_side == 'right'
    assert len(result.left_trace) == 2
    current = left.initial
    for shown in result.left_trace[1:]:
        current = next(s for s in left.successors(current) if left.show(s) == shown)
    assert result.barb in {str(b) for b in left.barbs(current)}
    assert result.left_state == result.left_trace[-1]
    assert replay_bisim_evidence(left, right, result)


@pytest.mark.parametrize("engine", [EXPLICIT, WSTS])
def test_failed_constraints_block_a_positive_verdict(tiny_model, engine):
    q = parse_term("b!(0).0")
    noisy = ContextTerm(parse_term("b!(0).0 | []_1"))
    verdict, report = check_resilience(tiny_model, q, noisy, benign(), engine=engine, samples=10,
                                       rng=random.Random(3))
    assert report.conditions['2c'].outcome == FAIL
    assert verdict.answer is None
    assert '2c' in verdict.reason
    assert verdict.evidence['constraints']['outcome'] == FAIL


@pytest.mark.timeout(300)
def test_nesting_a_context_in_itself_keeps_the_verdict(sidechannel):
    noise = sidechannel.context('Noise')
    adv = resolve_adversary(sidechannel, 'A')
    once, _ = check_resilience(sidechannel, sidechannel.system('c'), noise, adv)
    twice, _ = check_resilience(sidechannel, sidechannel.system('c'), compose_contexts(noise, noise), adv)
    assert once.answer is True
    assert twice.answer == once.answer


@pytest.mark.timeout(120)
def test_wsts_engine_on_failure_adversary(repserver_two_failures, rng):
    m = repserver_two_failures
    verdict, _ = check_resilience(m, m.system('OTP'), m.context('Crep'), resolve_adversary(m, 'FS'),
                                  engine=WSTS, samples=50, rng=rng)
    assert verdict.answer is False
    assert verdict.evidence['upward_simulation']['checked'] > 0
