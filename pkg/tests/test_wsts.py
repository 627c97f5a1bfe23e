#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""WSTS 判定器测试：覆盖、子覆盖、上模拟抽样、前驱基校验"""

import random

import pytest

from src.services.wsts import (
    CounterRule, CounterSystem, check_upward_simulation, counter_oracle_agreement, covering,
    covering_any, explicit_cover, explore, pred_star_basis, subcovering, succ_star_basis,
    validate_pred_basis,
)
from src.utils.errors import IterationCap, PreconditionViolated


@pytest.fixture
def pump():
    # 控制点 0 上自增 x，转到 1 时消耗一个 x 并自增 y
    return CounterSystem(controls=2, dimension=2, rules=[
        CounterRule(0, 0, (1, 0)),
        CounterRule(0, 1, (-1, 1)),
        CounterRule(1, 1, (-1, 1)),
    ])


def test_covering_with_witness(pump):
    w = pump.instance((0, (0, 0)))
    v = covering(w, w.initial, (1, (0, 3)))
    assert v.answer is True
    assert v.witness.states[0] == w.initial
    assert w.order.leq((1, (0, 3)), v.witness.last)
    assert v.witness.replays(pump.succ)
    assert v.stats['basis_size'] >= 1


def test_not_coverable(pump):
    w = pump.instance((0, (0, 0)))
    # 控制点 0 上 y 不会增长
    assert covering(w, w.initial, (0, (0, 1))).answer is False
    # 控制点 1 之后不能再回到 0
    w1 = pump.instance((1, (0, 0)))
    assert covering(w1, w1.initial, (0, (0, 0))).answer is False


def test_covering_any_empty_targets(pump):
    w = pump.instance((0, (0, 0)))
    v = covering_any(w, w.initial, [])
    assert v.answer is False
    assert v.stats['basis_size'] == 0


def test_pred_star_basis_contains_initial(pump):
    w = pump.instance((0, (0, 0)))
    basis = pred_star_basis(w, [(1, (0, 2))])
    assert (0, (0, 0)) in basis


def test_iteration_cap():
    cs = CounterSystem(controls=1, dimension=1, rules=[CounterRule(0, 0, (1,))])
    w = cs.instance((0, (0,)))
    with pytest.raises(IterationCap):
        pred_star_basis(w, [(0, (50,))], cap=3)


def test_subcovering_requires_downward_simulation(pump):
    w = pump.instance((0, (0, 0)))
    with pytest.raises(PreconditionViolated):
        subcovering(w, w.initial, (1, (0, 0)))


def test_subcovering_on_increment_system():
    cs = CounterSystem(controls=3, dimension=2, rules=[
        CounterRule(0, 1, (1, 0)),
        CounterRule(1, 2, (0, 1)),
        CounterRule(1, 1, (1, 0)),
    ])
    w = cs.instance((0, (0, 0)))
    v = subcovering(w, w.initial, (2, (1, 1)))
    assert v.answer is True
    assert v.witness.replays(cs.succ)
    assert subcovering(w, w.initial, (2, (0, 1))).answer is False
    basis = succ_star_basis(w, w.initial)
    assert set(basis) == {(0, (0, 0)), (1, (1, 0)), (2, (1, 1))}


def test_upward_simulation_holds_for_counters(pump, rng):
    w = pump.instance((0, (0, 0)))
    report = check_upward_simulation(w, samples=200, rng=rng)
    assert report['validated']
    assert report['counterexample_count'] == 0


def test_upward_simulation_detects_zero_test(rng):
    # 只有 x 为 0 时才能从 0 转到 1：不单调
    cs = CounterSystem(controls=2, dimension=1, rules=[CounterRule(0, 0, (1,))])
    base = cs.instance((0, (0,)))

    def succ(state):
        q, (x,) = state
        out = list(cs.succ(state))
        if q == 0 and x == 0:
            out.append((1, (0,)))
        return out

    base.succ = succ
    report = check_upward_simulation(base, samples=300, depth=3, rng=rng, pool_size=5)
    assert not report['validated']
    assert report['counterexamples']


def test_validate_pred_basis_on_counters(pump):
    w = pump.instance((0, (0, 0)))
    assert validate_pred_basis(w, explore(w, 150)) == []


def test_validate_pred_basis_flags_unsound_rule(pump):
    w = pump.instance((0, (0, 0)))
    w.pred_basis = lambda m: [(m[0], (0, 0))]
    issues = validate_pred_basis(w, explore(w, 50), targets=[(1, (0, 2))])
    assert any(i['kind'] == 'unsound' for i in issues)


def test_explicit_oracle_matches_example(pump):
    assert explicit_cover(pump, (0, (0, 0)), (1, (0, 3)))
    assert not explicit_cover(pump, (1, (0, 0)), (0, (0, 0)))


@pytest.mark.slow
@pytest.mark.timeout(120)
def test_covering_agrees_with_explicit_oracle():
    stats = counter_oracle_agreement(random.Random(7), count=200, bound=12)
    assert stats['disagreements'] == []
    assert stats['unreplayed'] == 0
    assert stats['inconclusive'] == 0
    assert all(case['confirmed'] for case in stats['beyond_bound'])
    assert stats['positives'] > 0


@pytest.mark.slow
@pytest.mark.timeout(120)
def test_subcovering_agrees_with_explicit_oracle():
    stats = counter_oracle_agreement(random.Random(11), count=200, bound=12, subcover=True)
    assert stats['disagreements'] == []
    assert stats['unreplayed'] == 0
    assert stats['inconclusive'] == 0
    assert all(case['confirmed'] for case in stats['beyond_bound'])
