#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""归约语义测试：规范化、迁移、barb、填洞"""

import pytest

from src.models.terms import Barb, BinOp, ContextTerm, Lit, Var, holes_of
from src.services.parser import parse_model, parse_term
from src.services.semantics import _CACHE_SIZE, Semantics, compose_contexts, plug, plug_all
from src.utils.errors import CaptureViolation, DomainEscape, HoleCountMismatch, OpenTerm


@pytest.fixture
def sem(tiny_model):
    return Semantics(tiny_model)


def canon(sem, text):
    return sem.canonicalize(parse_term(text, constants=('v',)))


def test_parallel_laws(sem):
    assert canon(sem, "a!(1).0 | b!(0).0") == canon(sem, "b!(0).0 | a!(1).0")
    assert canon(sem, "a!(1).0 | 0") == canon(sem, "a!(1).0")
    assert canon(sem, "(a!(1).0 | b!(0).0) | d1!(1).0") == canon(sem, "a!(1).0 | (b!(0).0 | d1!(1).0)")


def test_restriction_is_alpha_invariant(sem):
    assert canon(sem, "new x . (x!(1).0 | x?(y).a!(y).0)") == canon(sem, "new z . (z!(1).0 | z?(w).a!(w).0)")


def test_restriction_scope_extrusion(sem):
    assert canon(sem, "a!(0).0 | new x . x!(1).0") == canon(sem, "new x . (a!(0).0 | x!(1).0)")


def test_replication_idempotent(sem):
    assert canon(sem, "!a!(1).0 | !a!(1).0") == canon(sem, "!a!(1).0")


def test_closed_match_evaluated(sem):
    assert canon(sem, "[1 = 1] a!(0).0") == canon(sem, "a!(0).0")
    assert canon(sem, "[0 = 1] a!(0).0").is_inert


def test_communication_step(sem, tiny_model):
    s = sem.canonicalize(tiny_model.system('Pair'))
    assert sem.strong_barbs(s) == frozenset({Barb('a', 1)})
    succs = sem.successors(s)
    after = [t for t in succs if sem.strong_barbs(t) == frozenset({Barb('b', 1)})]
    assert after


def test_restricted_channel_is_not_a_barb(sem, tiny_model):
    s = sem.canonicalize(tiny_model.system('Sys1'))
    assert sem.strong_barbs(s) == frozenset()
    assert sem.weak_barbs(s, depth=4, saturate=True) == frozenset({Barb('d1', 'v')})


def test_location_gating(sem):
    s = canon(sem, "loc l1 [ a!(1).0 ] | b!(0).0")
    assert sem.strong_barbs(s, up=frozenset({'l2'})) == frozenset({Barb('b', 0)})
    assert sem.strong_barbs(s, up=None) == frozenset({Barb('a', 1), Barb('b', 0)})


def test_monus_floors_at_zero(sem):
    assert sem.eval_expr(BinOp('-', Lit(0), Lit(1))) == 0
    assert sem.stats['monus_floor'] == 1


def test_domain_escape(sem):
    with pytest.raises(DomainEscape):
        sem.eval_expr(BinOp('+', Lit(1), Lit(1)))


def test_open_term(sem):
    with pytest.raises(OpenTerm):
        sem.eval_expr(Var('x'))
    with pytest.raises(OpenTerm):
        sem.canonicalize(parse_term("a!(x).0"))


def test_truncation_prunes_escaping_steps():
    model = parse_model("domain { 0..1 }\nchannel a, go\ndef Up(n) = go?(u).(a!(n).0 | Up(n + 1))\n"
                        "system S = !go!(0).0 | Up(1)\n")
    strict = Semantics(model)
    s = strict.canonicalize(model.system('S'))
    with pytest.raises(DomainEscape):
        strict.successors(s)
    lenient = Semantics(model, truncate=True)
    s = lenient.canonicalize(model.system('S'))
    assert lenient.successors(s) == set()
    assert lenient.stats['pruned'] >= 1


def test_plug_checks_arity_and_closure(tiny_model):
    twice = tiny_model.contexts['Twice']
    with pytest.raises(HoleCountMismatch):
        plug(twice, [parse_term("a!(1).0")])
    with pytest.raises(CaptureViolation):
        plug(twice, [parse_term("a!(1).0"), parse_term("a!(x).0")])
    filled = plug_all(twice, parse_term("a!(1).0"))
    assert holes_of(filled) == []


def test_compose_contexts_renumbers_holes(tiny_model):
    twice = tiny_model.contexts['Twice']
    inner = ContextTerm(parse_term("b!(0).0 | []_1"))
    assert compose_contexts(twice, inner).hole_count == 2
    assert compose_contexts(twice, twice).hole_count == 4
    assert compose_contexts(inner, twice).hole_count == 2


def test_input_binders_are_alpha_normalized(sem):
    assert canon(sem, "a?(y).b!(y).0") == canon(sem, "a?(w).b!(w).0")
    assert canon(sem, "a?(y).a?(z).b!(z).0") == canon(sem, "a?(u).a?(y).b!(y).0")
    assert canon(sem, "a?(y).a?(z).b!(z).0") != canon(sem, "a?(y).a?(z).b!(y).0")


def test_step_caches_are_bounded_and_clearable(sem):
    s = canon(sem, "a!(1).0 | a?(x).b!(x).0")
    assert sem.successors(s)
    info = sem._steps_cached.cache_info()
    assert info.maxsize == _CACHE_SIZE
    assert info.currsize > 0
    sem.clear_caches()
    assert sem._steps_cached.cache_info().currsize == 0
    assert sem._unfold_cached.cache_info().currsize == 0
