#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""模型文件解析测试"""

import pytest

from src.models.terms import Call, Hole, Input, Located, Match, Output, Par, Restrict, Repl, show
from src.services.casestudies import replicated_server_text, sidechannel_text, transmission_text
from src.services.parser import parse_model, parse_term
from src.utils.errors import (
    ArityMismatch, DuplicateDeclaration, ModelError, ParseError, UndeclaredName, UnguardedRecursion,
)


def test_parses_declarations(tiny_model):
    assert tiny_model.domain.atoms() == [0, 1, 'v']
    assert set(tiny_model.channels) == {'a', 'b', 'd1'}
    assert tiny_model.locations == ['l1', 'l2']
    assert tiny_model.defs['BC'].params == ('i',)
    assert isinstance(tiny_model.systems['Sys1'], Restrict)
    assert tiny_model.contexts['Twice'].hole_count == 2


def test_constants_resolve_to_literals(tiny_model):
    body = tiny_model.defs['OTP'].body
    assert isinstance(body, Output)
    assert body.expr.value == 'v'


def test_term_shapes():
    p = parse_term("new a . (!a!().0 | loc l [ [x = 1] b?(y).0 ])", constants=())
    assert isinstance(p, Restrict)
    assert isinstance(p.body, Par)
    assert isinstance(p.body.left, Repl)
    located = p.body.right
    assert isinstance(located, Located) and located.loc == 'l'
    assert isinstance(located.body, Match)
    assert isinstance(located.body.body, Input)


def test_show_reads_back():
    text = "new a . (a!(1).P(2) | a?(x).[x <= 1] d!(x).0)"
    p = parse_term(text)
    assert parse_term(show(p)) == p


def test_holes_and_calls():
    p = parse_term("[]_1 | Q(1, 2)")
    assert p.left == Hole(1)
    assert isinstance(p.right, Call) and len(p.right.args) == 2


def test_checks_and_adversaries():
    m = parse_model("""
domain { v }
channel a, d1
location l1
def OTP = a!v.0
system S = new a . (a?(x).d1!x.0 | loc l1 [ !OTP ])
adversary FS = fail_stop(locs=[l1], max=1)
check barbs name=first system=S expect={d1!v}
check bisim left=S right=S right_adversary=FS
""")
    assert m.adversaries['FS'].param_dict == {'locs': ['l1'], 'max': 1}
    first, second = m.checks
    assert first.name == 'first'
    assert first.param_dict['expect'] == frozenset({'d1!v'})
    assert second.name == 'bisim#2'
    assert second.param_dict['right_adversary'] == 'FS'


def test_keyword_named_check_kind_and_parameters():
    m = parse_model("""
domain { 0..1 }
channel a, d
system S = d!(1).0
context C = []_1
adversary A = step_counter(n=2)
check err name=fast system=S adversary=A expect=unreachable
check resilience core=S context=C adversary=A engine=explicit expect=pass
""")
    err, res = m.checks
    assert err.kind == 'err'
    assert err.param_dict == {'system': 'S', 'adversary': 'A', 'expect': 'unreachable'}
    assert res.param_dict['context'] == 'C'
    assert res.param_dict['core'] == 'S'


@pytest.mark.parametrize("text", [
    sidechannel_text(3, 5, nested=True),
    replicated_server_text(2, 2, 1),
    replicated_server_text(3, 2, 2, persistent=True),
    transmission_text(2, 3),
], ids=['sidechannel', 'repserver', 'repserver_persistent', 'transmission'])
def test_generated_model_text_parses(text):
    m = parse_model(text)
    declared = [line.split()[1] for line in text.splitlines() if line.startswith('check ')]
    assert [c.kind for c in m.checks] == declared


def test_model_text_reparses(repserver):
    again = parse_model(repserver.to_text())
    assert again.systems == repserver.systems
    assert [c.name for c in again.checks] == [c.name for c in repserver.checks]


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_model("domain { v }\nsystem S = a!(v .0\n")
    assert info.value.line == 2
    assert info.value.col is not None
    assert str(info.value).startswith("2:")


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        parse_model("channel a\ndef P(x) = a!x.0\nsystem S = P\n")


def test_undeclared_process():
    with pytest.raises(UndeclaredName):
        parse_model("channel a\nsystem S = Q\n")


def test_unbound_variable():
    with pytest.raises(UndeclaredName):
        parse_model("domain { 0..1 }\nchannel a\nsystem S = a!(y).0\n")


def test_undeclared_location():
    with pytest.raises(UndeclaredName):
        parse_model("channel a\nlocation l1\nsystem S = loc l9 [ a!().0 ]\n")


def test_duplicate_system():
    with pytest.raises(DuplicateDeclaration):
        parse_model("channel a\nsystem S = a!().0\nsystem S = 0\n")


def test_unguarded_recursion():
    with pytest.raises(UnguardedRecursion):
        parse_model("channel a\ndef P = a!().0 | P\nsystem S = P\n")


def test_location_under_prefix_rejected():
    with pytest.raises(ModelError):
        parse_model("channel a\nlocation l1\nsystem S = a?(x).loc l1 [ 0 ]\n")


def test_hole_numbering_must_be_contiguous():
    with pytest.raises(ModelError):
        parse_model("channel a\ncontext C = []_1 | []_3\n")


def test_check_references_unknown_adversary():
    with pytest.raises(UndeclaredName):
        parse_model("channel a\nsystem S = a!().0\ncheck err system=S adversary=Nope\n")
