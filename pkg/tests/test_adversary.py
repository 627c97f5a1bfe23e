#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""敌手模型与耦合系统测试"""

import networkx as nx
import pytest

from src.models.terms import ERR, AdversaryDecl
from src.services.adversary import (
    BENIGN, builtin, channel_fault, couple, coupled_barbs, coupled_successors, fail_stop, from_decl,
    resolve_adversary, step_counter,
)
from src.services.casestudies import explicit_reach
from src.services.wsts import check_upward_simulation, explore, validate_pred_basis
from src.utils.errors import BadParams, MediationMismatch


def test_builtin_rejects_bad_parameters():
    with pytest.raises(BadParams):
        builtin('gremlin')
    with pytest.raises(BadParams):
        builtin('step_counter', {'n': -1})
    with pytest.raises(BadParams):
        builtin('fail_stop', {'locs': ['l1'], 'max': 2})
    with pytest.raises(BadParams):
        builtin('channel_omission', {})


def test_fail_stop_state_space():
    adv = fail_stop(['l1', 'l2'], 1, ['l1', 'l2', 'l3'])
    assert adv.initial == (0, 0)
    assert len(adv.states()) == 3
    assert adv.autonomous_succ(adv.initial) == [(1, 0), (0, 1)]
    assert adv.autonomous_succ((1, 0)) == []
    assert adv.location_up((1, 0)) == frozenset({'l2', 'l3'})
    assert adv.order.leq(adv.initial, (0, 1))


def test_step_counter_saturates():
    adv = step_counter(2)
    assert adv.on_system_step(0) == 1
    assert adv.on_system_step(3) == 3
    assert adv.states() == [0, 1, 2, 3]


def test_resolve_adversary(repserver):
    assert resolve_adversary(repserver, None).kind == BENIGN
    assert resolve_adversary(repserver, 'benign').kind == BENIGN
    fs = resolve_adversary(repserver, 'FS1')
    assert fs.name == 'FS1'
    assert fs.params == {'locs': ['l1'], 'max': 1}
    with pytest.raises(BadParams):
        resolve_adversary(repserver, 'Nope')


def test_from_decl_checks_mediated_channels(tiny_model):
    decl = AdversaryDecl('X', 'channel_omission', (('chs', ['zz']),))
    with pytest.raises(BadParams):
        from_decl(decl, tiny_model)


def test_mediated_channel_must_be_restricted(tiny_model):
    with pytest.raises(MediationMismatch):
        couple(tiny_model, tiny_model.system('Pair'), channel_fault(['a'], reorder=False))


def test_fail_stop_silences_location(repserver):
    graph = explicit_reach(repserver, 'Sys2', 'FS1', depth=8)
    failed = [n for n in graph.nodes if n.adv == (1,)]
    assert failed
    assert any(not graph.nodes[n]['barbs'] for n in failed)
    assert not graph.graph.get('budget_exceeded')


def test_step_counter_flags_fast_termination(sidechannel):
    cs = couple(sidechannel, sidechannel.system('c'), resolve_adversary(sidechannel, 'A'))
    graph = cs.explore()
    assert any(ERR in graph.nodes[n]['barbs'] for n in graph.nodes)
    w, control = cs.to_wsts()
    assert w.has_downward_reflexive_simulation
    assert cs.err_basis(control)


def test_channel_omission_buffers_and_drops(transmission):
    model, _ = transmission
    cs = couple(model, model.system('Ro_sys'), resolve_adversary(model, 'Ao'), truncate=True, buffer_cap=2)
    assert cs.channels == ['b', 'c']
    assert cs.initial.buffers == ((), ())
    sent = [st for st in cs.successors(cs.initial) if st.buffers[0]]
    assert sent
    dropped = [st for st in cs.successors(sent[0]) if st.system == sent[0].system and not st.buffers[0]]
    assert dropped


def test_coupled_pred_basis_is_sound_and_complete(repserver):
    cs = couple(repserver, repserver.system('Sys2'), resolve_adversary(repserver, 'FS1'))
    w, _ = cs.to_wsts()
    assert validate_pred_basis(w, explore(w, 60)) == []


def test_coupled_functions_match_methods(tiny_model):
    adv = resolve_adversary(tiny_model, None)
    cs = couple(tiny_model, tiny_model.system('Pair'), adv)
    assert coupled_successors(cs, cs.initial) == cs.successors(cs.initial)
    assert coupled_barbs(cs, cs.initial) == cs.barbs(cs.initial)
    assert adv.err(0, cs.initial.system, cs.sem, None) is False


def test_fail_stop_never_revives_a_node(repserver):
    graph = explicit_reach(repserver, 'Sys2', 'FS1', depth=12)
    order = resolve_adversary(repserver, 'FS1').order
    assert any(u.adv != v.adv for u, v in graph.edges)
    for u, v in graph.edges:
        assert order.leq(u.adv, v.adv)


def test_step_counter_counts_system_steps(sidechannel):
    adv = resolve_adversary(sidechannel, 'A')
    cs = couple(sidechannel, sidechannel.system('c'), adv)
    graph = cs.explore()
    top = adv.params['n'] + 1
    for u, v in graph.edges:
        assert v.adv == min(u.adv + 1, top)
    lengths = nx.single_source_shortest_path_length(graph, cs.initial)
    for n in graph.nodes:
        if n.adv < top:
            assert lengths[n] == n.adv


def test_buffers_change_by_one_message_per_step(transmission):
    model, _ = transmission
    cs = couple(model, model.system('Ro_sys'), resolve_adversary(model, 'Ao'), truncate=True, buffer_cap=2)
    graph = cs.explore()
    kinds = set()
    for u, v in graph.edges:
        delta = sum(len(b) for b in v.buffers) - sum(len(b) for b in u.buffers)
        assert delta in (-1, 0, 1)
        if delta == 1:
            assert u.system != v.system
            kinds.add('send')
        elif delta == -1:
            kinds.add('drop' if u.system == v.system else 'receive')
        else:
            assert u.buffers == v.buffers
    assert kinds == {'send', 'drop', 'receive'}


def test_successor_sets_are_finite(transmission):
    model, _ = transmission
    cs = couple(model, model.system('Rro_sys'), resolve_adversary(model, 'Aro'), truncate=True, buffer_cap=2)
    graph = cs.explore(depth=6)
    for n in graph.nodes:
        succ = cs.successors(n)
        assert isinstance(succ, list)
        assert len(succ) == len(set(succ))


def test_fail_stop_breaks_upward_simulation(repserver, rng):
    cs = couple(repserver, repserver.system('Sys2'), resolve_adversary(repserver, 'FS1'))
    w, _ = cs.to_wsts()
    report = check_upward_simulation(w, samples=400, rng=rng)
    assert report['checked'] > 0
    assert report['counterexample_count'] > 0
    assert report['validated'] is False
    assert not w.upward_simulation_validated
