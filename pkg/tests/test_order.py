#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""拟序组合子与基运算的性质测试"""

from typing import NamedTuple, Tuple

import pytest

from src.services.order import (
    BagEmbed, Basis, DicksonVec, EqualityOn, Product, Subword, bag, includes, member_up, minimize,
    union_bases,
)
from src.utils.errors import CarrierMismatch

ORDERS = [
    EqualityOn(['a', 'b', 'c']),
    DicksonVec(3),
    DicksonVec(2, bound=1),
    BagEmbed([1, 2, 3]),
    Subword(['x', 'y']),
    Product([EqualityOn([0, 1]), DicksonVec(2), BagEmbed(['m'])]),
]


@pytest.mark.timeout(60)
@pytest.mark.parametrize("order", ORDERS, ids=lambda o: o.describe())
def test_reflexive_and_transitive(order, rng):
    for _ in range(1000):
        a = order.sample(rng)
        b = order.sample_above(a, rng)
        c = order.sample_above(b, rng)
        assert order.leq(a, a)
        assert order.leq(a, b)
        assert order.leq(a, c)
        d = order.sample(rng)
        if order.leq(a, d) and order.leq(d, c):
            assert order.leq(a, c)


@pytest.mark.parametrize("order", ORDERS, ids=lambda o: o.describe())
def test_minimize_is_idempotent_antichain(order, rng):
    xs = [order.sample(rng) for _ in range(40)]
    basis = minimize(order, xs)
    assert minimize(order, basis) == basis
    for m in basis:
        for n in basis:
            if m != n:
                assert not order.leq(m, n)


@pytest.mark.parametrize("order", ORDERS, ids=lambda o: o.describe())
def test_membership_matches_disjunction(order, rng):
    xs = [order.sample(rng) for _ in range(20)]
    basis = minimize(order, xs)
    for _ in range(200):
        y = order.sample(rng)
        assert member_up(order, basis, y) == any(order.leq(x, y) for x in xs)


def test_union_and_inclusion(rng):
    order = DicksonVec(2)
    b1 = minimize(order, [(2, 0), (0, 3)])
    b2 = minimize(order, [(1, 1)])
    union = union_bases(order, b1, b2)
    assert includes(order, union, b1)
    assert includes(order, union, b2)
    assert not includes(order, b1, b2)
    assert set(union) == {(2, 0), (0, 3), (1, 1)}


def test_dickson_example():
    order = DicksonVec(2)
    basis = minimize(order, [(1, 0), (0, 1), (1, 1)])
    assert set(basis) == {(1, 0), (0, 1)}
    assert member_up(order, basis, (2, 3))
    assert not member_up(order, basis, (0, 0))


def test_subword_and_bag():
    sub = Subword(['x', 'y'])
    assert sub.leq(('x', 'y'), ('y', 'x', 'x', 'y'))
    assert not sub.leq(('y', 'y', 'x'), ('x', 'y', 'x'))
    b = BagEmbed(['x', 'y'])
    assert b.leq(bag(('y', 'y', 'x')), bag(('x', 'y', 'y', 'x')))


def test_subword_implies_bag_embedding(rng):
    sub = Subword([1, 2, 3])
    b = BagEmbed([1, 2, 3])
    for _ in range(500):
        u = sub.sample(rng)
        w = sub.sample_above(u, rng)
        assert sub.leq(u, w)
        assert b.leq(bag(u), bag(w))


def test_carrier_mismatch():
    with pytest.raises(CarrierMismatch):
        DicksonVec(2).leq((1, 2), (1, 2, 3))
    with pytest.raises(CarrierMismatch):
        EqualityOn([0]).leq(0, 1)
    with pytest.raises(CarrierMismatch):
        union_bases(DicksonVec(1), Basis(DicksonVec(1), ((1,),)), Basis(DicksonVec(2), ((1, 1),)))


def test_minimize_keeps_one_representative_of_equivalent_elements():
    order = Product([EqualityOn([0]), BagEmbed(['m', 'n'])])
    basis = minimize(order, [(0, ('m', 'n')), (0, ('m', 'n')), (0, ('m',))])
    assert list(basis) == [(0, ('m',))]


def test_product_sample_above_keeps_named_tuple(rng):
    class Point(NamedTuple):
        ctrl: int
        counters: Tuple[int, ...]

    order = Product([EqualityOn([0, 1]), DicksonVec(2)])
    x = Point(1, (0, 2))
    for _ in range(50):
        y = order.sample_above(x, rng)
        assert isinstance(y, Point)
        assert y.ctrl == 1
        assert order.leq(x, y)
    assert type(order.sample_above((0, (1, 1)), rng)) is tuple
