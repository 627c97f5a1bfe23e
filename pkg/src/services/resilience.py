#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
韧性判定服务模块

把演算语义、敌手耦合与 WSTS 判定器组合成韧性检查，功能包括：
1. 自相似约束 2(a)-2(d) 的检查（先做结构充分条件，再做有界语义检查）
2. 显式状态的弱 barb 双模拟判定（分块细化），负结果带可重放的区分证据
3. err 不可达判定（覆盖判定的补）
4. 韧性判定：explicit 引擎做双模拟，wsts 引擎先用覆盖判定做否定，再检查核心与耦合状态的配对义务
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from config.settings import get_settings

from ..models.reports import (
    FAIL, INCONCLUSIVE, PASS, BisimResult, ConditionResult, ConstraintReport, Verdict, WitnessTrace,
)
from ..models.terms import (
    ERR, INERT, UNIT, Barb, Call, Choice, ContextTerm, Hole, Input, Lit, Located, Match, Model, Output,
    Par, ProcTerm, Repl, Restrict, expr_vars, show_expr, sorted_barbs,
)
from ..utils.errors import BudgetExceeded, CoreNotFiniteState, IterationCap, PreconditionViolated
from ..utils.logger import logger
from .adversary import AdversaryModel, CoupledState, CoupledSystem, benign, couple
from .order import Basis, member_up
from .semantics import CanonicalState, Semantics, plug_all
from .wsts import (
    WstsInstance, check_upward_simulation, covering_any, pred_star_basis,
)

LEFT = "left"
RIGHT = "right"

EXPLICIT = "explicit"
WSTS = "wsts"
ENGINES = (EXPLICIT, WSTS)

# 填入洞中的探针进程，其 barb 用来观察洞是否可用
MARKER = "__hole__"
MARKER_TERM = Output(MARKER, UNIT)
MARKER_BARB = Barb(MARKER, ())


class ClosedSystem:
    """良性环境下的闭合进程，提供与耦合系统相同的迁移系统接口"""

    def __init__(self, model: Model, term: ProcTerm, sem: Optional[Semantics] = None):
        self.model = model
        self.sem = sem or Semantics(model)
        self.initial = self.sem.canonicalize(term)

    def successors(self, s: CanonicalState) -> List[CanonicalState]:
        return sorted(self.sem.successors(s), key=lambda x: tuple(t.key() for t in x.threads))

    def barbs(self, s: CanonicalState) -> FrozenSet[Barb]:
        return self.sem.strong_barbs(s)

    def show(self, s: CanonicalState) -> str:
        return s.show()


def state_graph(ts: Any, cap: Optional[int] = None, depth: Optional[int] = None) -> nx.DiGraph:
    """
    迁移系统的显式可达图

    Args:
        ts: 具有 initial / successors / barbs 的迁移系统
        cap: 状态数上限
        depth: 探索深度，None 表示探索到饱和

    Returns:
        节点带 barbs 属性的有向图；graph['frontier'] 是深度边界上未展开的节点

    Raises:
        BudgetExceeded: 状态数超过 cap
    """
    cap = cap if cap is not None else get_settings().state_cap
    graph = nx.DiGraph()
    graph.add_node(ts.initial, barbs=ts.barbs(ts.initial))
    frontier = [ts.initial]
    level = 0
    while frontier and (depth is None or level < depth):
        level += 1
        nxt = []
        for st in frontier:
            for succ in ts.successors(st):
                if succ not in graph:
                    graph.add_node(succ, barbs=ts.barbs(succ))
                    nxt.append(succ)
                    if graph.number_of_nodes() > cap:
                        raise BudgetExceeded(f"显式探索超过状态上限 {cap}", cap=cap)
                graph.add_edge(st, succ)
        frontier = nxt
    graph.graph['frontier'] = frozenset(frontier)
    return graph


def weak_barb_map(graph: nx.DiGraph) -> Dict[Any, FrozenSet[Barb]]:
    """按强连通分量逆拓扑序累积每个节点的弱 barb 集合"""
    cond = nx.condensation(graph)
    mapping = cond.graph['mapping']
    acc: Dict[int, FrozenSet[Barb]] = {}
    for c in reversed(list(nx.topological_sort(cond))):
        barbs = set()
        for n in cond.nodes[c]['members']:
            barbs |= graph.nodes[n]['barbs']
        for d in cond.successors(c):
            barbs |= acc[d]
        acc[c] = frozenset(barbs)
    return {n: acc[mapping[n]] for n in graph.nodes}


def _reach_map(graph: nx.DiGraph) -> Dict[Any, FrozenSet[Any]]:
    """每个节点经 →* 可达的节点集合（含自身）"""
    cond = nx.condensation(graph)
    mapping = cond.graph['mapping']
    acc: Dict[int, FrozenSet[Any]] = {}
    for c in reversed(list(nx.topological_sort(cond))):
        nodes = set(cond.nodes[c]['members'])
        for d in cond.successors(c):
            nodes |= acc[d]
        acc[c] = frozenset(nodes)
    return {n: acc[mapping[n]] for n in graph.nodes}


def _barb_set_key(barbs: FrozenSet[Barb]) -> Tuple:
    return tuple(b.sort_key() for b in sorted_barbs(barbs))


# ----------------------------------------------------------------------
# 弱 barb 双模拟
# ----------------------------------------------------------------------

def _refine(graph: nx.DiGraph, wb: Dict[Any, FrozenSet[Barb]]) -> List[Dict[Any, int]]:
    """
    分块细化

    初始按弱 barb 集合分块；每轮以 (当前块, →* 可达的块集合) 为签名重新分块，
    块数不再增加时停止。返回每一轮的分块。
    """
    cond = nx.condensation(graph)
    mapping = cond.graph['mapping']
    order = list(reversed(list(nx.topological_sort(cond))))

    ids = {k: i for i, k in enumerate(sorted({_barb_set_key(b) for b in wb.values()}))}
    block = {n: ids[_barb_set_key(wb[n])] for n in graph.nodes}
    rounds = [block]
    while True:
        reach: Dict[int, FrozenSet[int]] = {}
        for c in order:
            blocks = {block[m] for m in cond.nodes[c]['members']}
            for d in cond.successors(c):
                blocks |= reach[d]
            reach[c] = frozenset(blocks)
        sigs = {n: (block[n], tuple(sorted(reach[mapping[n]]))) for n in graph.nodes}
        ids2 = {k: i for i, k in enumerate(sorted(set(sigs.values())))}
        new = {n: ids2[sigs[n]] for n in graph.nodes}
        if len(ids2) == len(set(block.values())):
            return rounds
        block = new
        rounds.append(block)


def _separation(rounds: List[Dict[Any, int]], p: Any, q: Any) -> int:
    for k, block in enumerate(rounds):
        if block[p] != block[q]:
            return k
    return len(rounds)


def _distinguish(graph: nx.DiGraph, rounds: List[Dict[Any, int]], wb: Dict[Any, FrozenSet[Barb]],
                 reach: Dict[Any, FrozenSet[Any]], left: Any, right: Any,
                 node_key: Callable[[Any], Any]) -> Tuple[Any, Any, List[Any], List[Any]]:
    """
    沿分离轮次递减构造区分证据

    每一步由可达块集合不同的一侧先走到对方无法匹配的块，
    另一侧选取弱 barb 相同的回应状态，直到两侧弱 barb 不同。
    """
    p, q = left, right
    lt, rt = [p], [q]
    while True:
        k = _separation(rounds, p, q)
        if k == 0:
            return p, q, lt, rt
        prev = rounds[k - 1]
        bp = {prev[x] for x in reach[p]}
        bq = {prev[y] for y in reach[q]}
        if bp - bq:
            target = min(bp - bq)
            x = min((n for n in reach[p] if prev[n] == target), key=node_key)
            same = sorted((n for n in reach[q] if wb[n] == wb[x]), key=node_key)
            y = same[0] if same else q
        else:
            target = min(bq - bp)
            y = min((n for n in reach[q] if prev[n] == target), key=node_key)
            same = sorted((n for n in reach[p] if wb[n] == wb[y]), key=node_key)
            x = same[0] if same else p
        lt.extend(nx.shortest_path(graph, p, x)[1:])
        rt.extend(nx.shortest_path(graph, q, y)[1:])
        p, q = x, y


def explicit_weak_barbed_bisim(t1: Any, t2: Any, cap: Optional[int] = None) -> BisimResult:
    """
    显式状态的弱 barb 双模拟判定

    Args:
        t1: 左侧迁移系统（initial / successors / barbs / show）
        t2: 右侧迁移系统
        cap: 每侧的状态数上限

    Returns:
        判定结果；任一侧超过上限时为不确定
    """
    try:
        g1 = state_graph(t1, cap)
        g2 = state_graph(t2, cap)
    except BudgetExceeded as e:
        logger.warning(f"Bisimulation check inconclusive: {str(e)}")
        return BisimResult(None, reason=str(e))

    graph = nx.DiGraph()
    for side, g in ((LEFT, g1), (RIGHT, g2)):
        for n, data in g.nodes(data=True):
            graph.add_node((side, n), barbs=data['barbs'])
        graph.add_edges_from(((side, u), (side, v)) for u, v in g.edges)

    wb = weak_barb_map(graph)
    rounds = _refine(graph, wb)
    final = rounds[-1]
    left, right = (LEFT, t1.initial), (RIGHT, t2.initial)

    counts: Dict[int, List[int]] = {}
    for (side, _), b in final.items():
        counts.setdefault(b, [0, 0])[0 if side == LEFT else 1] += 1
    pairs = sum(a * b for a, b in counts.values())
    stats = {
        'left_states': g1.number_of_nodes(),
        'right_states': g2.number_of_nodes(),
        'rounds': len(rounds),
        'blocks': len(counts),
    }
    logger.info(f"Bisimulation: {stats['left_states']} vs {stats['right_states']} states, "
                f"{stats['blocks']} blocks after {stats['rounds']} rounds")
    if final[left] == final[right]:
        return BisimResult(True, pairs=pairs, stats=stats)

    shows = {LEFT: t1.show, RIGHT: t2.show}

    def node_key(n):
        return shows[n[0]](n[1])

    reach = _reach_map(graph)
    p, q, lt, rt = _distinguish(graph, rounds, wb, reach, left, right, node_key)
    diff = sorted_barbs(wb[p] ^ wb[q])
    barb = diff[0]
    missing = RIGHT if barb in wb[p] else LEFT
    # 持有 barb 的一侧继续走到强呈现该 barb 的最近状态
    holder = p if missing == RIGHT else q
    lengths = nx.single_source_shortest_path_length(graph, holder)
    target = min((n for n in lengths if barb in graph.nodes[n]['barbs']), key=lambda n: (lengths[n], node_key(n)))
    tail = nx.shortest_path(graph, holder, target)[1:]
    if missing == RIGHT:
        lt.extend(tail)
        p = target
    else:
        rt.extend(tail)
        q = target
    return BisimResult(
        False,
        pairs=pairs,
        barb=str(barb),
        missing_side=missing,
        left_state=node_key(p),
        right_state=node_key(q),
        left_trace=[node_key(n) for n in lt],
        right_trace=[node_key(n) for n in rt],
        stats=stats,
    )


def replay_bisim_evidence(t1: Any, t2: Any, result: BisimResult, cap: Optional[int] = None) -> bool:
    """
    重放否定结果的证据：沿两侧轨迹逐步迁移，终点的弱 barb 恰在一侧含区分 barb

    Returns:
        证据成立时返回 True
    """
    if result.equivalent is not False:
        return False
    ends = []
    for ts, trace in ((t1, result.left_trace), (t2, result.right_trace)):
        current = ts.initial
        if ts.show(current) != trace[0]:
            return False
        for shown in trace[1:]:
            nxt = [s for s in ts.successors(current) if ts.show(s) == shown]
            if not nxt:
                return False
            current = nxt[0]
        ends.append(current)
    present = []
    for ts, end in zip((t1, t2), ends):
        barbs = weak_barb_map(state_graph(_Rooted(ts, end), cap))
        present.append(any(str(b) == result.barb for b in barbs[end]))
    return present[0] != present[1]


class _Rooted:
    """以给定状态为初始状态的迁移系统视图"""

    def __init__(self, ts: Any, initial: Any):
        self.ts = ts
        self.initial = initial

    def successors(self, s):
        return self.ts.successors(s)

    def barbs(self, s):
        return self.ts.barbs(s)

    def show(self, s):
        return self.ts.show(s)


# ----------------------------------------------------------------------
# 自相似约束
# ----------------------------------------------------------------------

def _hole_guards(p: ProcTerm, sem: Semantics, guard: Optional[str], out: List[Tuple[int, Optional[str]]]):
    """收集每个洞及其上方的守卫描述（None 表示处于使能位置）"""
    if isinstance(p, Hole):
        out.append((p.index, guard))
    elif isinstance(p, (Output, Input)):
        mark = "!" if isinstance(p, Output) else "?"
        _hole_guards(p.cont, sem, guard or f"prefix {p.chan}{mark}", out)
    elif isinstance(p, Match):
        if expr_vars(p.left) or expr_vars(p.right):
            inner = guard or "conditional match"
        elif not sem.holds(p):
            inner = guard or f"unsatisfied match [{show_expr(p.left)} {p.op} {show_expr(p.right)}]"
        else:
            inner = guard
        _hole_guards(p.body, sem, inner, out)
    elif isinstance(p, Choice):
        _hole_guards(p.left, sem, guard or "choice branch", out)
        _hole_guards(p.right, sem, guard or "choice branch", out)
    elif isinstance(p, (Par,)):
        _hole_guards(p.left, sem, guard, out)
        _hole_guards(p.right, sem, guard, out)
    elif isinstance(p, (Restrict, Repl, Located)):
        _hole_guards(p.body, sem, guard, out)


def _skeleton_outputs(p: ProcTerm, restricted: FrozenSet[str], mediated: FrozenSet[str],
                      out: List[str], calls: List[str]):
    """上下文骨架中未限制、非中介通道上的输出"""
    if isinstance(p, Output):
        if p.chan not in restricted and p.chan not in mediated:
            if isinstance(p.expr, Lit):
                out.append(str(Barb(p.chan, p.expr.value)))
            else:
                out.append(f"{p.chan}!{show_expr(p.expr)}")
        _skeleton_outputs(p.cont, restricted, mediated, out, calls)
    elif isinstance(p, Input):
        _skeleton_outputs(p.cont, restricted, mediated, out, calls)
    elif isinstance(p, Restrict):
        _skeleton_outputs(p.body, restricted | {p.chan}, mediated, out, calls)
    elif isinstance(p, (Par, Choice)):
        _skeleton_outputs(p.left, restricted, mediated, out, calls)
        _skeleton_outputs(p.right, restricted, mediated, out, calls)
    elif isinstance(p, (Match, Repl, Located)):
        _skeleton_outputs(p.body, restricted, mediated, out, calls)
    elif isinstance(p, Call):
        calls.append(p.name)


def _simulation_failure(gs: nx.DiGraph, gt: nx.DiGraph, s0: Any, t0: Any,
                        cond: Callable[[Any, Any], bool], show: Callable[[Any], str]) -> Optional[str]:
    """
    弱模拟 gs ≤ gt 的最大不动点

    深度边界上未展开的 t 状态乐观地视为可以匹配。返回反例描述，模拟成立时返回 None。
    """
    reach_t = _reach_map(gt)
    frontier_t = gt.graph.get('frontier', frozenset())
    rel: Set[Tuple[Any, Any]] = {(s, t) for s in gs.nodes for t in gt.nodes if cond(s, t)}
    reason: Dict[Tuple[Any, Any], str] = {}
    changed = True
    while changed:
        changed = False
        for s, t in sorted(rel, key=lambda st: (show(st[0]), show(st[1]))):
            if t in frontier_t:
                continue
            for s2 in gs.successors(s):
                if not any((s2, t2) in rel for t2 in reach_t[t]):
                    rel.discard((s, t))
                    reason[(s, t)] = f"move {show(s)} -> {show(s2)} is not matched from {show(t)}"
                    changed = True
                    break
    if (s0, t0) in rel:
        return None
    if not cond(s0, t0):
        return f"barbs of {show(s0)} are not preserved by {show(t0)}"
    return reason.get((s0, t0), f"{show(s0)} is not simulated by {show(t0)}")


def _barb_text(barbs: Iterable[Barb]) -> str:
    return "{" + ", ".join(str(b) for b in sorted_barbs(barbs)) + "}"


def check_context_constraints(model: Model, c: ContextTerm, q: ProcTerm, depth: Optional[int] = None,
                              mediated: Iterable[str] = (), cap: Optional[int] = None) -> ConstraintReport:
    """
    检查上下文 c 相对核心 q 的自相似条件

    结构检查通过即判定通过；否则（以及 2(b)、2(d) 总是）在深度 depth 内做有界语义检查：
    2(a) 探针填洞后可弱观测，且 q 的迁移与 barb 被 C[q] 模拟；
    2(b) C[q] 的迁移被 q 模拟且弱 barb 相等；
    2(c) C[0] 在深度内没有弱 barb；
    2(d) C[探针] 的每个可达状态仍可弱观测探针。

    Args:
        model: 模型
        c: 上下文
        q: 核心进程
        depth: 探索深度，缺省取配置
        mediated: 不可观测的中介通道
        cap: 状态数上限

    Returns:
        约束报告；超出状态上限的条件记为不确定
    """
    depth = depth if depth is not None else get_settings().default_depth
    sem = Semantics(model)
    mediated = frozenset(mediated)
    report = ConstraintReport(depth=depth)

    guards: List[Tuple[int, Optional[str]]] = []
    _hole_guards(c.term, sem, None, guards)
    guarded = [(i, g) for i, g in guards if g is not None]
    outputs: List[str] = []
    calls: List[str] = []
    _skeleton_outputs(c.term, frozenset(), mediated, outputs, calls)

    structural_a = not guarded
    structural_c = not outputs and not calls
    if structural_a:
        report.conditions['2a'] = ConditionResult('2a', PASS, 'structural')
    if structural_c:
        report.conditions['2c'] = ConditionResult('2c', PASS, 'structural')

    def show(s):
        return s.show()

    try:
        g_q = state_graph(ClosedSystem(model, q, sem), cap, depth)
        g_p = state_graph(ClosedSystem(model, plug_all(c, q), sem), cap, depth)
        g_marker = state_graph(ClosedSystem(model, plug_all(c, MARKER_TERM), sem), cap, depth)
        g_empty = state_graph(ClosedSystem(model, plug_all(c, INERT), sem), cap, depth)
    except BudgetExceeded as e:
        logger.warning(f"Constraint check inconclusive: {str(e)}")
        for name in ('2a', '2b', '2c', '2d'):
            report.conditions.setdefault(name, ConditionResult(name, INCONCLUSIVE, 'bounded-semantic', detail=str(e)))
        return report

    wb_q = weak_barb_map(g_q)
    wb_p = weak_barb_map(g_p)
    wb_marker = weak_barb_map(g_marker)
    wb_empty = weak_barb_map(g_empty)
    q0 = sem.canonicalize(q)
    p0 = sem.canonicalize(plug_all(c, q))
    marker0 = sem.canonicalize(plug_all(c, MARKER_TERM))
    empty0 = sem.canonicalize(plug_all(c, INERT))

    if not structural_a:
        if MARKER_BARB not in wb_marker[marker0]:
            i, g = guarded[0]
            report.conditions['2a'] = ConditionResult(
                '2a', FAIL, 'bounded-semantic', counterexample=f"hole []_{i} under {g}",
                detail="the core's moves are never enabled inside the context")
        else:
            failure = _simulation_failure(g_q, g_p, q0, p0, lambda s, t: wb_q[s] <= wb_p[t], show)
            report.conditions['2a'] = (ConditionResult('2a', PASS, 'bounded-semantic') if failure is None else
                                       ConditionResult('2a', FAIL, 'bounded-semantic', counterexample=failure))

    failure = _simulation_failure(g_p, g_q, p0, q0, lambda s, t: wb_p[s] == wb_q[t], show)
    report.conditions['2b'] = (ConditionResult('2b', PASS, 'bounded-semantic') if failure is None else
                               ConditionResult('2b', FAIL, 'bounded-semantic', counterexample=failure))

    if not structural_c:
        contributed = wb_empty[empty0]
        if contributed:
            report.conditions['2c'] = ConditionResult(
                '2c', FAIL, 'bounded-semantic', counterexample=str(sorted_barbs(contributed)[0]),
                detail=f"context alone exhibits {_barb_text(contributed)}")
        else:
            report.conditions['2c'] = ConditionResult('2c', PASS, 'bounded-semantic')

    lost = sorted((s for s in g_marker.nodes if MARKER_BARB not in wb_marker[s]), key=show)
    if lost and MARKER_BARB in wb_marker[marker0]:
        report.conditions['2d'] = ConditionResult(
            '2d', FAIL, 'bounded-semantic', counterexample=show(lost[0]),
            detail="a context move disables the core")
    elif lost:
        report.conditions['2d'] = ConditionResult('2d', FAIL, 'bounded-semantic', counterexample=show(marker0),
                                                  detail="the core is never enabled")
    else:
        report.conditions['2d'] = ConditionResult('2d', PASS, 'bounded-semantic')

    logger.info(f"Constraint check: {report.outcome} "
                f"({', '.join(f'{k}={v.outcome}' for k, v in sorted(report.conditions.items()))})")
    return report


# ----------------------------------------------------------------------
# err 可达性
# ----------------------------------------------------------------------

def err_unreachable(w: WstsInstance, err_basis: Iterable[Any], cap: Optional[int] = None) -> Verdict:
    """
    err 不可达判定

    Returns:
        answer 为 True 表示不可达；可达时 witness 是到达 err 的轨迹
    """
    try:
        v = covering_any(w, w.initial, list(err_basis), cap)
    except IterationCap as e:
        return Verdict(None, reason=str(e))
    if v.answer is None:
        return Verdict(None, stats=v.stats, reason=v.reason)
    return Verdict(not v.answer, witness=v.witness, stats=v.stats)


def err_check(model: Model, term: ProcTerm, adv: AdversaryModel, engine: str = EXPLICIT,
              cap: Optional[int] = None, truncate: bool = False, buffer_cap: Optional[int] = None) -> Verdict:
    """
    p ∘ A 是否可达 err

    Returns:
        answer 为 True 表示 err 可达（带最短见证）
    """
    cs = couple(model, term, adv, truncate=truncate, buffer_cap=buffer_cap)
    if engine == WSTS:
        try:
            w, graph = cs.to_wsts(name="err")
        except BudgetExceeded as e:
            return Verdict(None, reason=str(e))
        v = err_unreachable(w, cs.err_basis(graph), cap)
        if v.answer is None:
            return v
        return Verdict(not v.answer, witness=v.witness, stats=v.stats)
    try:
        graph = state_graph(cs, cap)
    except BudgetExceeded as e:
        return Verdict(None, reason=str(e))
    hits = [n for n in graph.nodes if ERR in graph.nodes[n]['barbs']]
    stats = {'states': graph.number_of_nodes()}
    if not hits:
        return Verdict(False, stats=stats)
    lengths = nx.single_source_shortest_path_length(graph, cs.initial)
    target = min(hits, key=lambda n: (lengths[n], cs.show(n)))
    path = nx.shortest_path(graph, cs.initial, target)
    return Verdict(True, WitnessTrace(path), stats)


def barb_cover(model: Model, term: ProcTerm, adv: AdversaryModel, barb: str, cap: Optional[int] = None,
               truncate: bool = False, buffer_cap: Optional[int] = None) -> Tuple[Verdict, CoupledSystem]:
    """
    在耦合系统的 WSTS 打包上判定是否可达呈现 barb 的状态

    Args:
        barb: barb 文本，如 "d1!v" 或 "err"

    Returns:
        (判定结果, 耦合系统)；肯定回答带见证
    """
    cs = couple(model, term, adv, truncate=truncate, buffer_cap=buffer_cap)
    try:
        w, graph = cs.to_wsts(name=f"cover {barb}")
    except BudgetExceeded as e:
        return Verdict(None, reason=str(e)), cs
    if barb == str(ERR):
        targets = cs.err_basis(graph)
    else:
        empty = tuple(() for _ in cs.channels)
        targets = [CoupledState(s, a, empty) for s in graph.nodes for a in cs.adv.states()
                   if any(str(b) == barb for b in cs.barbs(CoupledState(s, a, empty)))]
    try:
        return covering_any(w, w.initial, targets, cap), cs
    except IterationCap as e:
        return Verdict(None, reason=str(e)), cs


def system_weak_barbs(model: Model, term: ProcTerm, adv: Optional[AdversaryModel] = None,
                      depth: Optional[int] = None, cap: Optional[int] = None, truncate: bool = False,
                      buffer_cap: Optional[int] = None) -> Tuple[FrozenSet[Barb], bool]:
    """
    初始状态在 depth 步内的弱 barb 集合

    Returns:
        (弱 barb 集合, 探索是否饱和)

    Raises:
        BudgetExceeded: 状态数超过 cap
    """
    cs = couple(model, term, adv or benign(), truncate=truncate, buffer_cap=buffer_cap)
    graph = state_graph(cs, cap, depth)
    barbs: Set[Barb] = set()
    for n in graph.nodes:
        barbs |= graph.nodes[n]['barbs']
    return frozenset(barbs), not graph.graph['frontier']


def stuck_check(model: Model, term: ProcTerm, adv: AdversaryModel, cap: Optional[int] = None,
                truncate: bool = False, buffer_cap: Optional[int] = None) -> Verdict:
    """
    是否可达一个弱 barb 集合为空的状态

    Returns:
        answer 为 True 表示可达（带最短见证）；超过状态上限时不确定
    """
    cs = couple(model, term, adv, truncate=truncate, buffer_cap=buffer_cap)
    try:
        graph = state_graph(cs, cap)
    except BudgetExceeded as e:
        return Verdict(None, reason=str(e))
    wb = weak_barb_map(graph)
    stuck = [n for n in graph.nodes if not wb[n]]
    stats = {'states': graph.number_of_nodes(), 'stuck_states': len(stuck)}
    if not stuck:
        return Verdict(False, stats=stats)
    lengths = nx.single_source_shortest_path_length(graph, cs.initial)
    target = min(stuck, key=lambda n: (lengths[n], cs.show(n)))
    logger.info(f"Stuck state reachable in {lengths[target]} steps under {adv.name}")
    return Verdict(True, WitnessTrace(nx.shortest_path(graph, cs.initial, target)), stats)


# ----------------------------------------------------------------------
# 韧性判定
# ----------------------------------------------------------------------

def _explicit_resilience(core: CoupledSystem, system: CoupledSystem, cap: Optional[int]) -> Verdict:
    result = explicit_weak_barbed_bisim(core, system, cap)
    evidence = {'bisim': result.to_dict()}
    if result.equivalent is None:
        return Verdict(None, stats=result.stats, reason=result.reason, evidence=evidence)
    return Verdict(result.equivalent, stats=result.stats, evidence=evidence)


def _barb_basis(w: WstsInstance, system: CoupledSystem, graph: nx.MultiDiGraph, barb: Barb,
                cap: Optional[int]) -> Basis:
    empty = tuple(() for _ in system.channels)
    targets = [CoupledState(s, a, empty) for s in graph.nodes for a in system.adv.states()
               if barb in system.barbs(CoupledState(s, a, empty))]
    return pred_star_basis(w, targets, cap)


def paired_relation(g_core: nx.DiGraph, g_sys: nx.DiGraph,
                    show: Callable[[Any], str]) -> Tuple[Set[Tuple[Any, Any]], Dict[Tuple[Any, Any], Tuple[str, str]]]:
    """
    核心状态与耦合状态之间的最大配对关系

    从弱 barb 相等的配对出发，反复删除不满足转移义务的配对：
    上行义务：t → t' 时 s 经 →* 到达某个与 t' 配对的 s'；
    下行义务：s → s' 时 t 经 →* 到达某个与 s' 配对的 t'。

    Returns:
        (配对关系, 被删除配对 -> (义务名, 原因))
    """
    wb_c = weak_barb_map(g_core)
    wb_s = weak_barb_map(g_sys)
    reach_c = _reach_map(g_core)
    reach_s = _reach_map(g_sys)
    by_barbs: Dict[FrozenSet[Barb], List[Any]] = {}
    for s in g_sys.nodes:
        by_barbs.setdefault(wb_s[s], []).append(s)
    rel = {(t, s) for t in g_core.nodes for s in by_barbs.get(wb_c[t], ())}
    removed: Dict[Tuple[Any, Any], Tuple[str, str]] = {}

    changed = True
    while changed:
        changed = False
        by_core: Dict[Any, Set[Any]] = {}
        by_sys: Dict[Any, Set[Any]] = {}
        for t, s in rel:
            by_core.setdefault(t, set()).add(s)
            by_sys.setdefault(s, set()).add(t)
        for t, s in sorted(rel, key=lambda ts: (show(ts[0]), show(ts[1]))):
            failure = None
            for t2 in g_core.successors(t):
                if by_core.get(t2, set()).isdisjoint(reach_s[s]):
                    failure = ('upward', f"core move {show(t)} -> {show(t2)} is not matched from {show(s)}")
                    break
            if failure is None:
                for s2 in g_sys.successors(s):
                    if by_sys.get(s2, set()).isdisjoint(reach_c[t]):
                        failure = ('downward', f"move {show(s)} -> {show(s2)} is not matched from core {show(t)}")
                        break
            if failure is not None:
                rel.discard((t, s))
                removed[(t, s)] = failure
                changed = True
    return rel, removed


def _wsts_resilience(core: CoupledSystem, system: CoupledSystem, cap: Optional[int],
                     samples: Optional[int], rng) -> Verdict:
    settings = get_settings()
    try:
        core_graph = state_graph(core, cap)
    except BudgetExceeded as e:
        raise CoreNotFiniteState(f"核心系统不是有限状态的: {str(e)}")
    core_wb = weak_barb_map(core_graph)

    try:
        w, graph = system.to_wsts(name="resilience")
    except BudgetExceeded as e:
        return Verdict(None, reason=str(e))

    sim = check_upward_simulation(w, samples=samples, rng=rng)
    evidence: Dict[str, Any] = {'upward_simulation': sim}

    # err 可达且见证可重放即可否定，与上模拟是否成立无关
    err = err_unreachable(w, system.err_basis(graph), cap)
    if err.answer is False and err.witness is not None and err.witness.replays(system.successors):
        evidence['obligation'] = 'err_unreachable'
        return Verdict(False, witness=err.witness, stats=err.stats, evidence=evidence,
                       reason="err is reachable")

    # 上模拟成立时，核心初始 barb 不可覆盖即可否定
    if sim['validated']:
        barbs = sorted_barbs(core_wb[core.initial])
        try:
            with ThreadPoolExecutor(max_workers=settings.max_workers) as executor:
                bases = dict(zip(barbs, executor.map(lambda o: _barb_basis(w, system, graph, o, cap), barbs)))
        except IterationCap as e:
            logger.warning(f"Upward obligations skipped: {str(e)}")
            bases = {}
        logger.info(f"Resilience obligations: {len(bases)} core barbs, basis sizes "
                    f"{[len(bases[o]) for o in bases]}")
        for o in barbs:
            if o in bases and not member_up(w.order, bases[o], w.initial):
                evidence['obligation'] = 'upward'
                evidence['barb'] = str(o)
                return Verdict(False, evidence=evidence, reason=f"core barb {o} is not coverable")

    # 配对义务需要枚举耦合系统的可达状态
    try:
        sys_graph = state_graph(system, cap)
    except BudgetExceeded as e:
        logger.warning(f"Paired obligations undecided: {str(e)}")
        return Verdict(None, evidence=evidence, reason=f"paired obligations undecided: {str(e)}")

    rel, removed = paired_relation(core_graph, sys_graph, system.show)
    stats = {'core_states': core_graph.number_of_nodes(), 'system_states': sys_graph.number_of_nodes(),
             'pairs': len(rel)}
    logger.info(f"Paired obligations: {stats['pairs']} pairs over {stats['core_states']} core "
                f"and {stats['system_states']} coupled states")
    root = (core.initial, system.initial)
    if root in rel:
        return Verdict(True, stats=stats, evidence=evidence)
    evidence['core_state'] = core.show(core.initial)
    evidence['state'] = system.show(system.initial)
    if root in removed:
        obligation, reason = removed[root]
    else:
        sys_wb = weak_barb_map(sys_graph)
        obligation = 'barbs'
        reason = (f"weak barbs {_barb_text(sys_wb[system.initial])} differ from the core's "
                  f"{_barb_text(core_wb[core.initial])}")
    evidence['obligation'] = obligation
    return Verdict(False, stats=stats, evidence=evidence, reason=reason)


def check_resilience(model: Model, q: ProcTerm, c: ContextTerm, adv: AdversaryModel, engine: str = EXPLICIT,
                     depth: Optional[int] = None, cap: Optional[int] = None, truncate: bool = False,
                     buffer_cap: Optional[int] = None, samples: Optional[int] = None,
                     rng=None) -> Tuple[Verdict, ConstraintReport]:
    """
    判定 C[q] 在敌手 adv 下是否保持 q 的行为：q ∘ 1_A ≈ C[q] ∘ A

    Args:
        model: 模型
        q: 核心进程
        c: 上下文
        adv: 敌手
        engine: explicit 或 wsts
        depth: 约束检查深度
        cap: 状态数上限
        truncate: 丢弃越出值域的迁移
        buffer_cap: 中介缓冲区容量
        samples: 上模拟抽样次数
        rng: 随机数发生器

    Returns:
        (判定结果, 约束报告)；等价成立但约束报告有失败条件时判定结果为不确定

    Raises:
        CoreNotFiniteState: wsts 引擎下核心系统不是有限状态的
    """
    if engine not in ENGINES:
        raise PreconditionViolated(f"未知的判定引擎: {engine}", engine=engine)
    try:
        report = check_context_constraints(model, c, q, depth, adv.mediated_channels, cap)
        core = couple(model, q, benign())
        system = couple(model, plug_all(c, q), adv, truncate=truncate, buffer_cap=buffer_cap)
        if engine == EXPLICIT:
            verdict = _explicit_resilience(core, system, cap)
        else:
            verdict = _wsts_resilience(core, system, cap, samples, rng)
    except Exception as e:
        logger.error(f"Failed to check resilience under {adv.name}: {str(e)}")
        raise
    verdict.evidence['constraints'] = report.to_dict()
    failed = report.failed()
    if failed and verdict.answer is True:
        names = ", ".join(sorted(f.condition for f in failed))
        logger.warning(f"Equivalence holds but the context violates {names}; resilience is not established")
        verdict = Verdict(None, stats=verdict.stats, evidence=verdict.evidence,
                          reason=f"context constraints failed: {names}")
    verdict.stats['truncated'] = system.truncated + system.sem.stats.get('pruned', 0)
    logger.info(f"Resilience under {adv.name} ({engine}): {verdict.outcome}")
    return verdict, report


"""
使用示例：

from src.services.casestudies import replicated_server_model
from src.services.resilience import check_resilience
from src.services.adversary import resolve_adversary

model = replicated_server_model(clients=2, replicas=2, max_failures=1)
verdict, report = check_resilience(model, model.system("OTP"), model.context("Crep"),
                                   resolve_adversary(model, "FS"))
print(verdict.outcome, report.outcome)
"""
