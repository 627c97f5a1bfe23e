#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
敌手模型服务模块

实现敌手迁移系统与系统-敌手耦合，支持：
1. 内置敌手：良性（1_A）、步数计数、失败停止、通道丢失、通道乱序丢失
2. 耦合迁移：系统步（位置门控并推进敌手）、敌手自主步、中介通道的入队/出队、丢包
3. 耦合状态的 barb（位置门控的系统 barb 加 err）
4. 显式可达图（networkx）与 WSTS 打包（控制图、乘积序、逐规则前驱基）
"""

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from config.settings import get_settings

from ..models.terms import ERR, AdversaryDecl, Barb, Model, ProcTerm, Restrict, value_key
from ..utils.errors import BadParams, BudgetExceeded, MediationMismatch
from ..utils.logger import logger
from .order import BagEmbed, DicksonVec, EqualityOn, Product, QuasiOrder, Subword, bag
from .semantics import CanonicalState, Semantics
from .wsts import WstsInstance

FIFO = "fifo"
BAG = "bag"

BENIGN = "benign"
STEP_COUNTER = "step_counter"
FAIL_STOP = "fail_stop"
CHANNEL_OMISSION = "channel_omission"
CHANNEL_REORDER_OMISSION = "channel_reorder_omission"
KINDS = (BENIGN, STEP_COUNTER, FAIL_STOP, CHANNEL_OMISSION, CHANNEL_REORDER_OMISSION)


@dataclass
class AdversaryModel:
    """
    敌手迁移系统

    状态载体有限，states() 列出全部状态；initial 是序的最小元（良性状态）。
    err(state, system, semantics, up) 判断耦合状态是否呈现 err。
    """
    kind: str
    initial: Any
    order: QuasiOrder
    states: Callable[[], List[Any]]
    autonomous_succ: Callable[[Any], List[Any]] = lambda a: []
    on_system_step: Callable[[Any], Any] = lambda a: a
    location_up: Callable[[Any], Optional[FrozenSet[str]]] = lambda a: None
    err: Callable[[Any, CanonicalState, Semantics, Optional[FrozenSet[str]]], bool] = lambda a, s, sem, up: False
    mediation: Dict[str, str] = field(default_factory=dict)
    params: Dict[str, Any] = field(default_factory=dict)
    name: str = ""

    @property
    def mediated_channels(self) -> List[str]:
        return sorted(self.mediation)

    def show_state(self, a: Any) -> str:
        return str(a)


def _int_param(params: Dict[str, Any], key: str, default: Optional[int] = None) -> int:
    value = params.get(key, default)
    if value is None:
        raise BadParams(f"缺少参数 {key}", param=key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise BadParams(f"参数 {key} 必须是非负整数: {value}", param=key)
    return value


def _list_param(params: Dict[str, Any], key: str) -> List[str]:
    value = params.get(key)
    if value is None:
        raise BadParams(f"缺少参数 {key}", param=key)
    items = [str(v) for v in (value if isinstance(value, (list, tuple)) else [value])]
    if not items:
        raise BadParams(f"参数 {key} 不能为空", param=key)
    return sorted(set(items))


def benign() -> AdversaryModel:
    """1_A：单状态、无自主迁移、不产生 err"""
    return AdversaryModel(kind=BENIGN, initial=0, order=EqualityOn([0]), states=lambda: [0], name=BENIGN)


def step_counter(n: int) -> AdversaryModel:
    """
    计数系统步数的敌手 A(i, n)

    系统在 i ≤ n 步内终止并呈现结果 barb 时标记 err；计数在 n+1 处饱和。
    """
    if n < 0:
        raise BadParams(f"步数上限不能为负: {n}", param="n")

    def err(i, system: CanonicalState, sem: Semantics, up) -> bool:
        if i > n:
            return False
        return bool(sem.strong_barbs(system, up)) and not sem.successors(system, up)

    return AdversaryModel(
        kind=STEP_COUNTER,
        initial=0,
        order=EqualityOn(range(n + 2)),
        states=lambda: list(range(n + 2)),
        on_system_step=lambda i: min(i + 1, n + 1),
        err=err,
        params={'n': n},
        name=f"{STEP_COUNTER}({n})",
    )


def fail_stop(locs: Sequence[str], max_failures: int, all_locations: Iterable[str] = ()) -> AdversaryModel:
    """
    失败停止敌手

    状态是各位置的失败指示向量；一次迁移令一个存活位置永久失败，至多 max_failures 次。
    失败少的状态在序中更小，全部存活是最小元。
    """
    locs = tuple(sorted(set(locs)))
    if not locs:
        raise BadParams("失败停止敌手至少需要一个位置", param="locs")
    if max_failures > len(locs):
        raise BadParams(f"最大失败数 {max_failures} 超过位置数 {len(locs)}", param="max")
    universe = frozenset(all_locations) | frozenset(locs)

    def succ(state: Tuple[int, ...]) -> List[Tuple[int, ...]]:
        if sum(state) >= max_failures:
            return []
        return [state[:i] + (1,) + state[i + 1:] for i, f in enumerate(state) if f == 0]

    def up(state: Tuple[int, ...]) -> FrozenSet[str]:
        return universe - {loc for loc, f in zip(locs, state) if f}

    def states() -> List[Tuple[int, ...]]:
        return [s for s in itertools.product((0, 1), repeat=len(locs)) if sum(s) <= max_failures]

    model = AdversaryModel(
        kind=FAIL_STOP,
        initial=tuple(0 for _ in locs),
        order=DicksonVec(len(locs), bound=1),
        states=states,
        autonomous_succ=succ,
        location_up=up,
        params={'locs': list(locs), 'max': max_failures},
        name=f"{FAIL_STOP}({','.join(locs)};{max_failures})",
    )
    model.show_state = lambda s: "{" + ",".join(sorted(up(s) & frozenset(locs))) + "}"
    return model


def channel_fault(chs: Sequence[str], reorder: bool) -> AdversaryModel:
    """通道丢失（先进先出）或通道乱序丢失（多重集）敌手"""
    chs = sorted(set(chs))
    if not chs:
        raise BadParams("通道敌手至少需要一个通道", param="chs")
    kind = CHANNEL_REORDER_OMISSION if reorder else CHANNEL_OMISSION
    return AdversaryModel(
        kind=kind,
        initial=0,
        order=EqualityOn([0]),
        states=lambda: [0],
        mediation={ch: BAG if reorder else FIFO for ch in chs},
        params={'chs': chs},
        name=f"{kind}({','.join(chs)})",
    )


def builtin(kind: str, params: Optional[Dict[str, Any]] = None, locations: Iterable[str] = ()) -> AdversaryModel:
    """
    按种类与参数构造内置敌手

    Args:
        kind: benign / step_counter / fail_stop / channel_omission / channel_reorder_omission
        params: 参数（n、locs、max、chs）
        locations: 模型声明的全部位置

    Returns:
        敌手模型

    Raises:
        BadParams: 种类未知或参数不合法
    """
    params = dict(params or {})
    if kind == BENIGN:
        return benign()
    if kind == STEP_COUNTER:
        return step_counter(_int_param(params, 'n'))
    if kind == FAIL_STOP:
        return fail_stop(_list_param(params, 'locs'), _int_param(params, 'max', 1), locations)
    if kind == CHANNEL_OMISSION:
        return channel_fault(_list_param(params, 'chs'), reorder=False)
    if kind == CHANNEL_REORDER_OMISSION:
        return channel_fault(_list_param(params, 'chs'), reorder=True)
    raise BadParams(f"未知的敌手种类: {kind}", kind=kind)


def from_decl(decl: AdversaryDecl, model: Model) -> AdversaryModel:
    adv = builtin(decl.kind, decl.param_dict, model.locations)
    adv.name = decl.name
    for ch in adv.mediation:
        if ch not in model.channels:
            raise BadParams(f"敌手 {decl.name} 引用了未声明的通道: {ch}", channel=ch)
    return adv


def resolve_adversary(model: Model, name: Optional[str]) -> AdversaryModel:
    """按名称取模型中的敌手；None 或 benign 表示 1_A"""
    if not name or name == BENIGN:
        return benign()
    decl = model.adversaries.get(name)
    if decl is None:
        raise BadParams(f"未声明的敌手: {name}", adversary=name)
    return from_decl(decl, model)


# ----------------------------------------------------------------------
# 耦合
# ----------------------------------------------------------------------

class CoupledState(NamedTuple):
    """耦合状态：系统规范状态、敌手状态、各中介通道缓冲区（按通道名排序）"""
    system: CanonicalState
    adv: Any
    buffers: Tuple[Tuple, ...] = ()


def strip_mediated(term: ProcTerm, mediated: Iterable[str]) -> ProcTerm:
    """
    去掉中介通道在顶层的限制

    Raises:
        MediationMismatch: 某个中介通道在顶层未被限制
    """
    pending = set(mediated)
    kept: List[str] = []
    while isinstance(term, Restrict):
        if term.chan in pending:
            pending.discard(term.chan)
        else:
            kept.append(term.chan)
        term = term.body
    if pending:
        raise MediationMismatch(f"中介通道未在系统顶层被限制: {', '.join(sorted(pending))}",
                                channels=sorted(pending))
    for ch in reversed(kept):
        term = Restrict(ch, term)
    return term


class CoupledSystem:
    """
    耦合迁移系统 p ∘ A

    buffer_cap 给定时超过容量的入队被丢弃并计入截断统计。
    """

    def __init__(self, model: Model, term: ProcTerm, adv: AdversaryModel,
                 truncate: bool = False, buffer_cap: Optional[int] = None):
        self.model = model
        self.adv = adv
        self.channels = adv.mediated_channels
        self.sem = Semantics(model, mediated=self.channels, truncate=truncate)
        self.buffer_cap = buffer_cap
        self.truncated = 0
        system = self.sem.canonicalize(strip_mediated(term, self.channels))
        self.initial = CoupledState(system, adv.initial, tuple(() for _ in self.channels))

    def _up(self, st: CoupledState):
        return self.adv.location_up(st.adv)

    def _recv_values(self, st: CoupledState) -> Dict[str, List]:
        values = {}
        for ch, buf in zip(self.channels, st.buffers):
            if not buf:
                values[ch] = []
            elif self.adv.mediation[ch] == FIFO:
                values[ch] = [buf[0]]
            else:
                values[ch] = sorted(set(buf), key=value_key)
        return values

    def _put(self, buffers: Tuple[Tuple, ...], ch: str, value) -> Optional[Tuple[Tuple, ...]]:
        i = self.channels.index(ch)
        buf = buffers[i]
        if self.buffer_cap is not None and len(buf) >= self.buffer_cap:
            self.truncated += 1
            return None
        new = buf + (value,) if self.adv.mediation[ch] == FIFO else bag(buf + (value,))
        return buffers[:i] + (new,) + buffers[i + 1:]

    def _take(self, buffers: Tuple[Tuple, ...], ch: str, value) -> Tuple[Tuple, ...]:
        i = self.channels.index(ch)
        buf = list(buffers[i])
        buf.remove(value)
        return buffers[:i] + (tuple(buf),) + buffers[i + 1:]

    def successors(self, st: CoupledState) -> List[CoupledState]:
        """耦合规则 (a)-(d) 给出的全部后继"""
        out = set()
        up = self._up(st)
        for label, nxt in self.sem.labelled_steps(st.system, up, self._recv_values(st)):
            if label[0] == 'tau':
                out.add(CoupledState(nxt, self.adv.on_system_step(st.adv), st.buffers))
            elif label[0] == 'send':
                buffers = self._put(st.buffers, label[1], label[2])
                if buffers is not None:
                    out.add(CoupledState(nxt, st.adv, buffers))
            else:
                out.add(CoupledState(nxt, st.adv, self._take(st.buffers, label[1], label[2])))
        for a in self.adv.autonomous_succ(st.adv):
            out.add(CoupledState(st.system, a, st.buffers))
        for i, buf in enumerate(st.buffers):
            for j in range(len(buf)):
                dropped = buf[:j] + buf[j + 1:]
                out.add(CoupledState(st.system, st.adv, st.buffers[:i] + (dropped,) + st.buffers[i + 1:]))
        return sorted(out, key=_state_key)

    def barbs(self, st: CoupledState) -> FrozenSet[Barb]:
        """位置门控的系统 barb，加上 err"""
        up = self._up(st)
        barbs = set(self.sem.strong_barbs(st.system, up))
        if self.adv.err(st.adv, st.system, self.sem, up):
            barbs.add(ERR)
        return frozenset(barbs)

    def show(self, st: CoupledState) -> str:
        parts = [st.system.show(), f"adv={self.adv.show_state(st.adv)}"]
        for ch, buf in zip(self.channels, st.buffers):
            parts.append(f"{ch}=[{', '.join(str(v) for v in buf)}]")
        return " ; ".join(parts)

    def explore(self, cap: Optional[int] = None, depth: Optional[int] = None, strict: bool = True) -> nx.DiGraph:
        """
        显式可达图，节点带 barbs 属性

        strict 为假时超过 cap 不抛异常，返回部分图并置 graph['budget_exceeded']。

        Raises:
            BudgetExceeded: 状态数超过 cap（图的 frontier 属性标记未展开节点）
        """
        cap = cap if cap is not None else get_settings().state_cap
        graph = nx.DiGraph()
        graph.add_node(self.initial, barbs=self.barbs(self.initial), level=0)
        frontier = [self.initial]
        level = 0
        while frontier and (depth is None or level < depth):
            level += 1
            nxt = []
            for st in frontier:
                for succ in self.successors(st):
                    if succ not in graph:
                        graph.add_node(succ, barbs=self.barbs(succ), level=level)
                        nxt.append(succ)
                    graph.add_edge(st, succ)
                if graph.number_of_nodes() > cap:
                    graph.graph['frontier'] = nxt
                    graph.graph['truncated'] = self.truncated + self.sem.stats.get('pruned', 0)
                    logger.warning(f"Explicit exploration exceeded {cap} states")
                    if not strict:
                        graph.graph['budget_exceeded'] = True
                        return graph
                    raise BudgetExceeded(f"显式探索超过状态上限 {cap}", cap=cap)
            frontier = nxt
        graph.graph['frontier'] = frontier
        graph.graph['truncated'] = self.truncated + self.sem.stats.get('pruned', 0)
        return graph

    # ------------------------------------------------------------------
    # WSTS 打包
    # ------------------------------------------------------------------

    def control_graph(self, cap: Optional[int] = None) -> nx.MultiDiGraph:
        """
        系统分量的控制图：节点是系统规范状态，边带标签与使能的存活集合

        中介通道上的接收对值域中所有值展开，因此是耦合系统在系统分量上的上近似。
        """
        cap = cap if cap is not None else get_settings().state_cap
        ups = sorted({self.adv.location_up(a) for a in self.adv.states()}, key=lambda u: sorted(u or ()))
        graph = nx.MultiDiGraph()
        graph.add_node(self.initial.system)
        queue = [self.initial.system]
        while queue:
            s = queue.pop()
            edges: Dict[Tuple, set] = {}
            for up in ups:
                for label, nxt in self.sem.labelled_steps(s, up):
                    edges.setdefault((label, nxt), set()).add(up)
            for (label, nxt), enabled in edges.items():
                if nxt not in graph:
                    graph.add_node(nxt)
                    queue.append(nxt)
                    if graph.number_of_nodes() > cap:
                        raise BudgetExceeded(f"控制图超过状态上限 {cap}", cap=cap)
                graph.add_edge(s, nxt, label=label, ups=frozenset(enabled))
        return graph

    def order(self, controls: Iterable[CanonicalState]) -> QuasiOrder:
        alphabet = [()] + self.model.domain.atoms()
        buffers = [Subword(alphabet) if self.adv.mediation[ch] == FIFO else BagEmbed(alphabet)
                   for ch in self.channels]
        return Product([EqualityOn(controls), self.adv.order, Product(buffers)])

    def pred_basis_fn(self, graph: nx.MultiDiGraph) -> Callable[[CoupledState], List[CoupledState]]:
        """逐规则的符号前驱基"""
        adv = self.adv
        adv_states = adv.states()
        adv_order = adv.order

        def pred_basis(m: CoupledState) -> List[CoupledState]:
            out = []
            # (b) 敌手自主迁移
            for a0 in adv_states:
                if any(adv_order._leq(m.adv, a1) for a1 in adv.autonomous_succ(a0)):
                    out.append(CoupledState(m.system, a0, m.buffers))
            for s0, _, data in graph.in_edges(m.system, data=True):
                label = data['label']
                for a0 in adv_states:
                    if adv.location_up(a0) not in data['ups']:
                        continue
                    if label[0] == 'tau':
                        # (a) 系统步推进敌手
                        if adv_order._leq(m.adv, adv.on_system_step(a0)):
                            out.append(CoupledState(s0, a0, m.buffers))
                        continue
                    if not adv_order._leq(m.adv, a0):
                        continue
                    i = self.channels.index(label[1])
                    buf = m.buffers[i]
                    fifo = adv.mediation[label[1]] == FIFO
                    if label[0] == 'send':
                        # (c) 入队：去掉目标缓冲区中可由本次入队提供的那个消息
                        if fifo:
                            prev = buf[:-1] if buf and buf[-1] == label[2] else buf
                        else:
                            rest = list(buf)
                            if label[2] in rest:
                                rest.remove(label[2])
                            prev = tuple(rest)
                    else:
                        # (c) 出队：接收的值必须位于队首（多重集则只需存在）
                        prev = (label[2],) + buf if fifo else bag(buf + (label[2],))
                    out.append(CoupledState(s0, a0, m.buffers[:i] + (prev,) + m.buffers[i + 1:]))
            # (d) 丢包的前驱已在 ↑m 中
            return out

        return pred_basis

    def err_basis(self, graph: nx.MultiDiGraph) -> List[CoupledState]:
        """呈现 err 的极小耦合状态（缓冲区为空）"""
        empty = tuple(() for _ in self.channels)
        out = []
        for s in graph.nodes:
            for a in self.adv.states():
                if self.adv.err(a, s, self.sem, self.adv.location_up(a)):
                    out.append(CoupledState(s, a, empty))
        return out

    def to_wsts(self, graph: Optional[nx.MultiDiGraph] = None, name: str = "coupled") -> Tuple[WstsInstance, nx.MultiDiGraph]:
        """打包为 WSTS 实例；没有中介通道时满足向下自反模拟"""
        graph = graph if graph is not None else self.control_graph()
        w = WstsInstance(
            initial=self.initial,
            order=self.order(graph.nodes),
            succ=self.successors,
            pred_basis=self.pred_basis_fn(graph),
            has_downward_reflexive_simulation=not self.channels,
            name=name,
            show=self.show,
        )
        return w, graph


def _state_key(st: CoupledState) -> Tuple:
    return (tuple(t.key() for t in st.system.threads), repr(st.adv), repr(st.buffers))


def couple(model: Model, term: ProcTerm, adv: AdversaryModel, truncate: bool = False,
           buffer_cap: Optional[int] = None) -> CoupledSystem:
    """
    构造耦合系统

    Raises:
        MediationMismatch: 中介通道在系统顶层未被限制
    """
    try:
        return CoupledSystem(model, term, adv, truncate=truncate, buffer_cap=buffer_cap)
    except Exception as e:
        logger.error(f"Failed to couple system with {adv.name}: {str(e)}")
        raise


def coupled_successors(cs: CoupledSystem, st: CoupledState) -> List[CoupledState]:
    return cs.successors(st)


def coupled_barbs(cs: CoupledSystem, st: CoupledState) -> FrozenSet[Barb]:
    return cs.barbs(st)


"""
使用示例：

from src.services.adversary import builtin, couple

adv = builtin("fail_stop", {"locs": ["l1"], "max": 1}, model.locations)
cs = couple(model, model.system("Sys2"), adv)
graph = cs.explore()
"""
