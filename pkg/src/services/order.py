#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
良拟序服务模块

提供良拟序组合子与上闭集基的代数，支持：
1. 有限集合上的相等序、Dickson 向量序、多重集嵌入、子词序及其乘积
2. 基（极小元反链）的极小化、成员判定、并与包含判定
3. 随机抽样（用于序律测试与上模拟校验）
"""

import random
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, List, Sequence, Tuple

from ..models.terms import value_key
from ..utils.errors import CarrierMismatch


def _key(x: Any) -> Tuple:
    """载体元素的确定性全序键"""
    if isinstance(x, bool):
        return (0, int(x), ())
    if isinstance(x, int):
        return (0, x, ())
    if isinstance(x, str):
        return (1, 0, x)
    if isinstance(x, (tuple, list)):
        return (2, len(x), tuple(_key(i) for i in x))
    if isinstance(x, frozenset):
        return (3, len(x), tuple(sorted(_key(i) for i in x)))
    if x is None:
        return (-1, 0, ())
    return (4, 0, repr(x))


class QuasiOrder(ABC):
    """拟序组合子基类"""

    name = "order"

    @abstractmethod
    def contains(self, x: Any) -> bool:
        """元素是否属于载体"""

    @abstractmethod
    def _leq(self, a: Any, b: Any) -> bool:
        """不做载体检查的比较"""

    @abstractmethod
    def sample(self, rng: random.Random) -> Any:
        """随机抽取一个载体元素"""

    @abstractmethod
    def sample_above(self, x: Any, rng: random.Random) -> Any:
        """随机抽取一个不小于 x 的元素"""

    def key(self, x: Any) -> Tuple:
        return _key(x)

    def check(self, x: Any) -> Any:
        if not self.contains(x):
            raise CarrierMismatch(f"元素不属于 {self.describe()} 的载体: {x!r}")
        return x

    def leq(self, a: Any, b: Any) -> bool:
        """
        a ⪯ b

        Raises:
            CarrierMismatch: 元素不在载体中
        """
        self.check(a)
        self.check(b)
        return self._leq(a, b)

    def describe(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.describe()))


class EqualityOn(QuasiOrder):
    """有限集合上的相等序"""

    name = "equality"

    def __init__(self, values: Iterable[Any]):
        self.values = tuple(sorted(set(values), key=_key))

    def contains(self, x: Any) -> bool:
        return x in self.values

    def _leq(self, a: Any, b: Any) -> bool:
        return a == b

    def sample(self, rng: random.Random) -> Any:
        return rng.choice(self.values)

    def sample_above(self, x: Any, rng: random.Random) -> Any:
        return x

    def describe(self) -> str:
        return f"EqualityOn({len(self.values)})"


class DicksonVec(QuasiOrder):
    """自然数向量的逐点序；bound 给定时载体截断在 [0, bound]"""

    name = "dickson"

    def __init__(self, dimension: int, bound: int = None):
        if dimension < 0:
            raise ValueError(f"维数不能为负: {dimension}")
        self.dimension = dimension
        self.bound = bound

    def contains(self, x: Any) -> bool:
        if not isinstance(x, tuple) or len(x) != self.dimension:
            return False
        for v in x:
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                return False
            if self.bound is not None and v > self.bound:
                return False
        return True

    def _leq(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
        return all(x <= y for x, y in zip(a, b))

    def _cap(self) -> int:
        return self.bound if self.bound is not None else 8

    def sample(self, rng: random.Random) -> Tuple[int, ...]:
        return tuple(rng.randint(0, self._cap()) for _ in range(self.dimension))

    def sample_above(self, x: Tuple[int, ...], rng: random.Random) -> Tuple[int, ...]:
        top = self.bound if self.bound is not None else None
        out = []
        for v in x:
            nv = v + rng.randint(0, 2)
            out.append(min(nv, top) if top is not None else nv)
        return tuple(out)

    def describe(self) -> str:
        return f"DicksonVec({self.dimension})"


def bag(values: Iterable[Any]) -> Tuple:
    """多重集的规范表示：按值排序的元组"""
    return tuple(sorted(values, key=value_key))


class BagEmbed(QuasiOrder):
    """有限字母表上的多重集包含序，元素用 bag() 的排序元组表示"""

    name = "bag"

    def __init__(self, alphabet: Iterable[Any], max_size: int = 6):
        self.alphabet = tuple(sorted(set(alphabet), key=value_key))
        self.max_size = max_size

    def contains(self, x: Any) -> bool:
        return isinstance(x, tuple) and all(v in self.alphabet for v in x) and tuple(x) == bag(x)

    def _leq(self, a: Tuple, b: Tuple) -> bool:
        ca, cb = Counter(a), Counter(b)
        return all(cb[v] >= n for v, n in ca.items())

    def sample(self, rng: random.Random) -> Tuple:
        return bag(rng.choice(self.alphabet) for _ in range(rng.randint(0, self.max_size)))

    def sample_above(self, x: Tuple, rng: random.Random) -> Tuple:
        extra = [rng.choice(self.alphabet) for _ in range(rng.randint(0, 2))]
        return bag(list(x) + extra)

    def describe(self) -> str:
        return f"BagEmbed({len(self.alphabet)})"


class Subword(QuasiOrder):
    """有限字母表上的子词（分散子序列）序，元素是元组"""

    name = "subword"

    def __init__(self, alphabet: Iterable[Any], max_size: int = 6):
        self.alphabet = tuple(sorted(set(alphabet), key=value_key))
        self.max_size = max_size

    def contains(self, x: Any) -> bool:
        return isinstance(x, tuple) and all(v in self.alphabet for v in x)

    def _leq(self, a: Tuple, b: Tuple) -> bool:
        it = iter(b)
        return all(any(v == w for w in it) for v in a)

    def sample(self, rng: random.Random) -> Tuple:
        return tuple(rng.choice(self.alphabet) for _ in range(rng.randint(0, self.max_size)))

    def sample_above(self, x: Tuple, rng: random.Random) -> Tuple:
        out = list(x)
        for _ in range(rng.randint(0, 2)):
            out.insert(rng.randint(0, len(out)), rng.choice(self.alphabet))
        return tuple(out)

    def describe(self) -> str:
        return f"Subword({len(self.alphabet)})"


class Product(QuasiOrder):
    """有限乘积，逐分量比较"""

    name = "product"

    def __init__(self, parts: Sequence[QuasiOrder]):
        self.parts = tuple(parts)

    def contains(self, x: Any) -> bool:
        return (isinstance(x, tuple) and len(x) == len(self.parts)
                and all(p.contains(v) for p, v in zip(self.parts, x)))

    def _leq(self, a: Tuple, b: Tuple) -> bool:
        return all(p._leq(x, y) for p, x, y in zip(self.parts, a, b))

    def sample(self, rng: random.Random) -> Tuple:
        return tuple(p.sample(rng) for p in self.parts)

    def sample_above(self, x: Tuple, rng: random.Random) -> Tuple:
        # 保留具名元组类型（如耦合状态）
        parts = [p.sample_above(v, rng) for p, v in zip(self.parts, x)]
        return type(x)._make(parts) if hasattr(type(x), "_make") else tuple(parts)

    def describe(self) -> str:
        return "Product(" + ", ".join(p.describe() for p in self.parts) + ")"

    def __hash__(self) -> int:
        return hash(self.describe())


@dataclass(frozen=True)
class Basis:
    """上闭集的有限基：两两不可比的极小元"""
    order: QuasiOrder
    elements: Tuple[Any, ...] = ()

    def __iter__(self) -> Iterator[Any]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: Any) -> bool:
        return x in self.elements


def leq(order: QuasiOrder, a: Any, b: Any) -> bool:
    return order.leq(a, b)


def minimize(order: QuasiOrder, xs: Iterable[Any]) -> Basis:
    """
    取极小元

    相互等价的元素中保留确定性全序下最小的一个。

    Args:
        order: 拟序
        xs: 有限元素集合

    Returns:
        反链基
    """
    candidates = sorted({order.check(x) for x in xs}, key=order.key)
    kept: List[Any] = []
    for x in candidates:
        if any(order._leq(m, x) for m in kept):
            continue
        kept = [m for m in kept if not order._leq(x, m)]
        kept.append(x)
    return Basis(order, tuple(sorted(kept, key=order.key)))


def member_up(order: QuasiOrder, basis: Basis, x: Any) -> bool:
    """x 是否属于 ↑basis"""
    order.check(x)
    return any(order._leq(m, x) for m in basis)


def _same_carrier(order: QuasiOrder, *bases: Basis):
    for b in bases:
        if b.order != order:
            raise CarrierMismatch(f"基的序不一致: {b.order.describe()} 与 {order.describe()}")


def union_bases(order: QuasiOrder, b1: Basis, b2: Basis) -> Basis:
    """↑b1 ∪ ↑b2 的基"""
    _same_carrier(order, b1, b2)
    return minimize(order, list(b1) + list(b2))


def includes(order: QuasiOrder, b1: Basis, b2: Basis) -> bool:
    """↑b1 ⊇ ↑b2"""
    _same_carrier(order, b1, b2)
    return all(member_up(order, b1, m) for m in b2)


"""
使用示例：

from src.services.order import DicksonVec, minimize, member_up

order = DicksonVec(2)
basis = minimize(order, [(1, 0), (0, 1), (1, 1)])
member_up(order, basis, (2, 3))  # True
"""
