#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
良结构迁移系统判定服务模块

实现基于良拟序的判定过程，支持：
1. 后向基饱和计算 Pred*（覆盖判定），沿基链引导前向搜索重建见证
2. 前向极小可达基计算 Succ*（子覆盖判定）
3. 弱上模拟的抽样校验
4. 逐规则符号前驱基与有界暴力前驱的比对
5. 计数器系统（VASS）实例与显式 BFS 对照
"""

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from config.settings import get_settings

from ..models.reports import Verdict, WitnessTrace
from ..utils.errors import IterationCap, PreconditionViolated
from ..utils.logger import logger
from .order import Basis, DicksonVec, EqualityOn, Product, QuasiOrder, member_up, minimize, union_bases

State = Any


@dataclass
class WstsInstance:
    """
    打包好的 WSTS 实例

    pred_basis(m) 返回 ↑Pred(↑m) 的有限基；未提供时不能做覆盖判定。
    """
    initial: State
    order: QuasiOrder
    succ: Callable[[State], Iterable[State]]
    pred_basis: Optional[Callable[[State], Iterable[State]]] = None
    has_downward_reflexive_simulation: bool = False
    upward_simulation_validated: bool = False
    name: str = "wsts"
    show: Callable[[State], str] = str

    def successors(self, s: State) -> List[State]:
        return list(self.succ(s))


@dataclass
class _Saturation:
    basis: Basis
    # 基元素首次进入基链的层号
    level: Dict[State, int] = field(default_factory=dict)
    iterations: int = 0
    insertions: int = 0


def _iter_cap(cap: Optional[int]) -> int:
    return cap if cap is not None else get_settings().iter_cap


def _saturate(w: WstsInstance, target: Iterable[State], cap: Optional[int] = None) -> _Saturation:
    if w.pred_basis is None:
        raise PreconditionViolated(f"实例 {w.name} 没有提供前驱基")
    cap = _iter_cap(cap)
    basis = minimize(w.order, target)
    level = {m: 0 for m in basis}
    frontier = list(basis)
    iterations = insertions = 0
    while frontier:
        iterations += 1
        new = []
        for m in frontier:
            for p in w.pred_basis(m):
                if not member_up(w.order, basis, p):
                    new.append(p)
        if not new:
            break
        grown = union_bases(w.order, basis, minimize(w.order, new))
        frontier = [m for m in grown if m not in basis.elements]
        for m in frontier:
            level.setdefault(m, iterations)
        insertions += len(frontier)
        basis = grown
        logger.debug(f"Basis size after iteration {iterations}: {len(basis)}")
        if insertions > cap:
            raise IterationCap(f"基插入次数超过上限 {cap}", cap=cap, iterations=iterations)
    return _Saturation(basis, {m: level[m] for m in basis}, iterations, insertions)


def pred_star_basis(w: WstsInstance, target: Iterable[State], cap: Optional[int] = None) -> Basis:
    """
    计算 ↑Pred*(↑target) 的有限基

    Args:
        w: WSTS 实例
        target: 目标基
        cap: 基插入次数上限，缺省取配置 iter_cap

    Returns:
        有限基

    Raises:
        IterationCap: 超过安全上限
    """
    return _saturate(w, target, cap).basis


def _level_of(w: WstsInstance, sat: _Saturation, x: State) -> float:
    levels = [sat.level[m] for m in sat.basis if w.order._leq(m, x)]
    return min(levels) if levels else float("inf")


def _covers(w: WstsInstance, targets: Sequence[State], x: State) -> bool:
    return any(w.order._leq(t, x) for t in targets)


def _guided_witness(w: WstsInstance, sat: _Saturation, s: State, targets: Sequence[State],
                    node_cap: int) -> Optional[List[State]]:
    """沿基链层号递减做前向搜索，构造 s 到 ↑targets 的轨迹"""
    trace = [s]
    current = s
    while not _covers(w, targets, current):
        here = _level_of(w, sat, current)
        # 有界 BFS 寻找层号更小的状态
        parents = {current: None}
        queue = deque([current])
        found = None
        while queue and found is None:
            x = queue.popleft()
            for y in w.successors(x):
                if y in parents:
                    continue
                parents[y] = x
                if _covers(w, targets, y) or _level_of(w, sat, y) < here:
                    found = y
                    break
                if len(parents) > node_cap:
                    return None
                queue.append(y)
        if found is None:
            return None
        segment = []
        node = found
        while node != current:
            segment.append(node)
            node = parents[node]
        trace.extend(reversed(segment))
        current = found
    return trace


def covering(w: WstsInstance, s: State, t: State, cap: Optional[int] = None, node_cap: int = 100_000) -> Verdict:
    """
    覆盖判定：是否存在 s →* t' 且 t ⪯ t'

    Returns:
        判定结果；肯定回答带可重放见证，见证重建失败时为不确定
    """
    return covering_any(w, s, [t], cap, node_cap)


def covering_any(w: WstsInstance, s: State, targets: Sequence[State], cap: Optional[int] = None,
                 node_cap: int = 100_000) -> Verdict:
    """覆盖判定的目标集版本：是否可达 ↑targets 中的某个状态"""
    targets = list(targets)
    if not targets:
        return Verdict(False, stats={'basis_size': 0, 'iterations': 0, 'insertions': 0})
    sat = _saturate(w, targets, cap)
    answer = member_up(w.order, sat.basis, s)
    stats = {'basis_size': len(sat.basis), 'iterations': sat.iterations, 'insertions': sat.insertions}
    logger.info(f"Covering on {w.name}: answer={answer}, basis size {len(sat.basis)}, {sat.iterations} iterations")
    if not answer:
        return Verdict(False, stats=stats)
    trace = _guided_witness(w, sat, s, targets, node_cap)
    if trace is None:
        logger.warning(f"Witness reconstruction failed on {w.name}")
        return Verdict(None, stats=stats, reason="witness reconstruction exceeded its search budget")
    stats['witness_steps'] = len(trace) - 1
    return Verdict(True, WitnessTrace(trace), stats)


@dataclass
class _Forward:
    basis: Basis
    parents: Dict[State, Optional[State]]
    expanded: int


def _forward(w: WstsInstance, s: State, cap: Optional[int] = None) -> _Forward:
    cap = _iter_cap(cap)
    basis = minimize(w.order, [s])
    parents: Dict[State, Optional[State]] = {s: None}
    queue = deque([s])
    expanded = 0
    while queue:
        x = queue.popleft()
        expanded += 1
        for y in w.successors(x):
            if y in parents or member_up(w.order, basis, y):
                continue
            parents[y] = x
            basis = union_bases(w.order, basis, minimize(w.order, [y]))
            queue.append(y)
            if len(parents) > cap:
                raise IterationCap(f"前向探索超过上限 {cap}", cap=cap)
    return _Forward(basis, parents, expanded)


def succ_star_basis(w: WstsInstance, s: State, cap: Optional[int] = None) -> Basis:
    """
    ↑Succ*(s) 的有限基（极小可达状态）

    只有在实例满足向下自反模拟时结果才是精确的。
    """
    if not w.has_downward_reflexive_simulation:
        logger.warning(f"Instance {w.name} lacks downward reflexive simulation; succ* basis may be inexact")
    return _forward(w, s, cap).basis


def subcovering(w: WstsInstance, s: State, t: State, cap: Optional[int] = None) -> Verdict:
    """
    子覆盖判定：是否存在 s →* t' 且 t' ⪯ t

    Raises:
        PreconditionViolated: 实例未声明向下自反模拟
    """
    if not w.has_downward_reflexive_simulation:
        raise PreconditionViolated(f"实例 {w.name} 不满足向下自反模拟，不能做子覆盖判定")
    fwd = _forward(w, s, cap)
    stats = {'basis_size': len(fwd.basis), 'expanded': fwd.expanded}
    for m in fwd.basis:
        if w.order._leq(m, t):
            trace = []
            node = m
            while node is not None:
                trace.append(node)
                node = fwd.parents[node]
            trace.reverse()
            stats['witness_steps'] = len(trace) - 1
            return Verdict(True, WitnessTrace(trace), stats)
    return Verdict(False, stats=stats)


def explore(w: WstsInstance, limit: int) -> List[State]:
    """从初始状态 BFS，最多返回 limit 个状态"""
    seen = {w.initial}
    order = [w.initial]
    queue = deque([w.initial])
    while queue and len(order) < limit:
        x = queue.popleft()
        for y in w.successors(x):
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
                if len(order) >= limit:
                    break
    return order


def _reach_above(w: WstsInstance, start: State, goal: State, depth: int) -> bool:
    frontier = [start]
    seen = {start}
    for _ in range(depth + 1):
        if any(w.order._leq(goal, x) for x in frontier):
            return True
        nxt = []
        for x in frontier:
            for y in w.successors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        if not frontier:
            return False
    return False


def check_upward_simulation(w: WstsInstance, samples: Optional[int] = None, depth: Optional[int] = None,
                            rng: Optional[random.Random] = None, pool_size: int = 2000) -> Dict[str, Any]:
    """
    抽样校验弱上模拟

    从可达状态中抽取 s → s'，取 t ⪰ s（可达状态中的或由序抽样得到的），
    在 depth 步内寻找 t →* t' 且 s' ⪯ t'。

    Args:
        w: WSTS 实例
        samples: 抽样次数，缺省取配置
        depth: 搜索深度，缺省取配置
        rng: 随机数发生器
        pool_size: 可达状态池大小

    Returns:
        报告字典，含 checked、counterexamples、validated
    """
    settings = get_settings()
    samples = settings.samples if samples is None else samples
    depth = settings.sim_depth if depth is None else depth
    rng = rng or random.Random(settings.seed)
    pool = explore(w, pool_size)
    counterexamples = []
    checked = 0
    for _ in range(samples):
        s = rng.choice(pool)
        succs = w.successors(s)
        if not succs:
            continue
        s1 = rng.choice(succs)
        above = [x for x in pool if w.order._leq(s, x)]
        if rng.random() < 0.5 and above:
            t = rng.choice(above)
        else:
            t = w.order.sample_above(s, rng)
        checked += 1
        if not _reach_above(w, t, s1, depth):
            counterexamples.append({'s': w.show(s), 's_next': w.show(s1), 't': w.show(t)})
    w.upward_simulation_validated = checked > 0 and not counterexamples
    if counterexamples:
        logger.warning(f"Upward simulation on {w.name}: {len(counterexamples)} counterexamples in {checked} samples")
    else:
        logger.info(f"Upward simulation on {w.name}: no counterexample in {checked} samples")
    return {
        'instance': w.name,
        'checked': checked,
        'counterexamples': counterexamples[:10],
        'counterexample_count': len(counterexamples),
        'validated': w.upward_simulation_validated,
    }


def validate_pred_basis(w: WstsInstance, pool: Sequence[State], targets: Optional[Sequence[State]] = None) -> List[Dict[str, str]]:
    """
    用有限状态池上的暴力前驱比对符号前驱基

    不健全：符号前驱没有一步后继落在 ↑m 中。
    不完全：池中某个一步可达 ↑m 的状态不在 ↑pred_basis(m) 中。

    Returns:
        差异列表，空列表表示一致
    """
    if w.pred_basis is None:
        raise PreconditionViolated(f"实例 {w.name} 没有提供前驱基")
    discrepancies = []
    for m in (targets if targets is not None else pool):
        symbolic = minimize(w.order, w.pred_basis(m))
        for p in symbolic:
            if not any(w.order._leq(m, y) for y in w.successors(p)):
                discrepancies.append({'target': w.show(m), 'state': w.show(p), 'kind': 'unsound'})
        for x in pool:
            if any(w.order._leq(m, y) for y in w.successors(x)) and not member_up(w.order, symbolic, x):
                discrepancies.append({'target': w.show(m), 'state': w.show(x), 'kind': 'incomplete'})
    if discrepancies:
        logger.warning(f"Pred-basis validation on {w.name}: {len(discrepancies)} discrepancies")
    return discrepancies


# ----------------------------------------------------------------------
# 计数器系统
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CounterRule:
    """控制点 src 到 dst，计数器加上 delta（负分量即带守卫的减一）"""
    src: int
    dst: int
    delta: Tuple[int, ...]


@dataclass
class CounterSystem:
    """
    有限控制的计数器系统

    状态为 (控制点, 计数向量)；lossy 为真时任一正计数器可以自发减一。
    """
    controls: int
    dimension: int
    rules: List[CounterRule] = field(default_factory=list)
    lossy: bool = False

    @property
    def order(self) -> QuasiOrder:
        return Product([EqualityOn(range(self.controls)), DicksonVec(self.dimension)])

    def succ(self, state: Tuple[int, Tuple[int, ...]]) -> List[Tuple[int, Tuple[int, ...]]]:
        q, vec = state
        out = []
        for r in self.rules:
            if r.src != q:
                continue
            nv = tuple(v + d for v, d in zip(vec, r.delta))
            if all(v >= 0 for v in nv):
                out.append((r.dst, nv))
        if self.lossy:
            for i, v in enumerate(vec):
                if v > 0:
                    out.append((q, vec[:i] + (v - 1,) + vec[i + 1:]))
        return sorted(set(out))

    def pred_basis(self, state: Tuple[int, Tuple[int, ...]]) -> List[Tuple[int, Tuple[int, ...]]]:
        """逐规则的符号极小前驱：max(m - delta, 守卫)"""
        q, m = state
        out = []
        for r in self.rules:
            if r.dst != q:
                continue
            out.append((r.src, tuple(max(x - d, max(-d, 0)) for x, d in zip(m, r.delta))))
        # 丢失迁移的前驱都已在 ↑state 中
        return out

    @property
    def monotone_downward(self) -> bool:
        """只有增量（可带丢失）时满足向下自反模拟"""
        return all(d >= 0 for r in self.rules for d in r.delta)

    def instance(self, initial: Tuple[int, Tuple[int, ...]], name: str = "counter") -> WstsInstance:
        return WstsInstance(
            initial=initial,
            order=self.order,
            succ=self.succ,
            pred_basis=self.pred_basis,
            has_downward_reflexive_simulation=self.monotone_downward,
            upward_simulation_validated=True,
            name=name,
        )


def random_counter_system(rng: random.Random, max_controls: int = 5, max_dim: int = 3,
                          max_rules: int = 8, lossy: bool = False, increments_only: bool = False) -> CounterSystem:
    """随机生成计数器系统，delta 分量取自 {-1, 0, 1}"""
    controls = rng.randint(1, max_controls)
    dim = rng.randint(1, max_dim)
    low = 0 if increments_only else -1
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        rules.append(CounterRule(rng.randrange(controls), rng.randrange(controls),
                                 tuple(rng.randint(low, 1) for _ in range(dim))))
    return CounterSystem(controls, dim, rules, lossy)


def explicit_cover(cs: CounterSystem, s, t, bound: int = 20) -> bool:
    """显式 BFS：计数值截断在 bound 以内是否可达 ⪰ t 的状态"""
    order = cs.order
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if order._leq(t, x):
            return True
        for y in cs.succ(x):
            if y not in seen and max(y[1], default=0) <= bound:
                seen.add(y)
                queue.append(y)
    return False


def explicit_subcover(cs: CounterSystem, s, t, bound: int = 20) -> bool:
    """显式 BFS：计数值截断在 bound 以内是否可达 ⪯ t 的状态"""
    order = cs.order
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if order._leq(x, t):
            return True
        for y in cs.succ(x):
            if y not in seen and max(y[1], default=0) <= bound:
                seen.add(y)
                queue.append(y)
    return False


def counter_oracle_agreement(rng: random.Random, count: int = 200, bound: int = 12,
                             subcover: bool = False) -> Dict[str, Any]:
    """
    随机计数器系统上判定器与显式 BFS 的一致性

    显式 BFS 截断在 bound 以内。判定器可达而 BFS 不可达、且见证越出 bound 时，
    以见证的最大计数值为界重跑 BFS，仍不可达才记为不一致；这类系统计入 beyond_bound。
    不确定的回答不参与比较，计入 inconclusive。

    Args:
        rng: 随机数发生器
        count: 系统个数
        bound: 显式对照的计数值上界
        subcover: 为真时比较子覆盖（只含增量、可带丢失的系统）

    Returns:
        统计字典，含 disagreements、inconclusive 与 beyond_bound
    """
    decide, oracle = (subcovering, explicit_subcover) if subcover else (covering, explicit_cover)
    disagreements = []
    beyond_bound = []
    positives = unreplayed = inconclusive = 0
    for i in range(count):
        cs = random_counter_system(rng, lossy=subcover and rng.random() < 0.5, increments_only=subcover)
        s = (0, (0,) * cs.dimension)
        t = (rng.randrange(cs.controls), tuple(rng.randint(0, 2) for _ in range(cs.dimension)))
        w = cs.instance(s)
        v = decide(w, s, t)
        if v.answer is None:
            inconclusive += 1
            continue
        expected = oracle(cs, s, t, bound)
        if v.answer:
            positives += 1
            if not v.witness.replays(cs.succ):
                unreplayed += 1
            peak = max((max(x[1], default=0) for x in v.witness.states), default=0)
            if not expected and peak > bound:
                expected = oracle(cs, s, t, peak)
                beyond_bound.append({'system': i, 'target': str(t), 'peak': peak, 'confirmed': expected})
            if not expected:
                disagreements.append({'system': i, 'target': str(t), 'decider': True, 'oracle': False})
        elif expected:
            disagreements.append({'system': i, 'target': str(t), 'decider': False, 'oracle': True})
    kind = 'subcovering' if subcover else 'covering'
    logger.info(f"Counter {kind} agreement: {count - len(disagreements)}/{count}, {positives} positive, "
                f"{inconclusive} inconclusive, {len(beyond_bound)} beyond bound {bound}")
    return {
        'systems': count,
        'positives': positives,
        'unreplayed': unreplayed,
        'inconclusive': inconclusive,
        'beyond_bound': beyond_bound,
        'disagreements': disagreements,
    }


"""
使用示例：

from src.services.wsts import CounterRule, CounterSystem, covering

cs = CounterSystem(controls=1, dimension=1, rules=[CounterRule(0, 0, (1,))])
w = cs.instance((0, (0,)))
verdict = covering(w, (0, (0,)), (0, (5,)))
print(verdict.answer, verdict.witness.steps)
"""
