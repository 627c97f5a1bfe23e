#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
案例模型服务模块

以模型文件文本的形式生成三个案例，并提供传输协议的计数器打包：
1. 侧信道：快/慢两个终止程序、白噪声上下文、步数计数敌手
2. 复制服务器：一次性提供者、广播客户端、失败停止敌手下的复制
3. 传输协议：单调切换的服务器、三种客户端、丢失/乱序丢失通道敌手
4. 传输协议客户端的计数器 WSTS 打包、覆盖查询与有界显式对照
5. 耦合系统的显式可达图
"""

from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import networkx as nx

from ..models.terms import Model
from ..utils.errors import BadParams
from ..utils.logger import logger
from .adversary import AdversaryModel, couple, resolve_adversary
from .order import BagEmbed, DicksonVec, EqualityOn, Product, QuasiOrder, bag
from .parser import parse_model
from .wsts import WstsInstance

ROUND = "round"
DELIVER = "deliver"


# ----------------------------------------------------------------------
# 侧信道
# ----------------------------------------------------------------------

def _steps_defs(prefix: str, n: int) -> List[str]:
    lines = [f"def {prefix}0 = res!m.0"]
    for i in range(1, n + 1):
        lines.append(f"def {prefix}{i} = t?(u).{prefix}{i - 1}")
    return lines


def sidechannel_text(n: int, n1: int, nested: bool = False) -> str:
    """
    侧信道案例的模型文本

    Args:
        n: 快程序的步数
        n1: 慢程序的步数
        nested: 是否附带嵌套上下文的检查

    Raises:
        BadParams: 不满足 0 < n < n1
    """
    if not 0 < n < n1:
        raise BadParams(f"需要 0 < n < n1，实际 n={n}, n1={n1}", n=n, n1=n1)
    lines = [
        f"# side channel: fast program takes {n} steps, slow program takes {n1} steps",
        "domain { 0..0, m }",
        "channel res",
        "def WhiteNoise = new w . (!w!(0).0 | !w?(u).0)",
    ]
    lines += _steps_defs("Fast", n)
    lines += _steps_defs("Slow", n1)
    lines += [
        f"system c = new t . (!t!(0).0 | Fast{n})",
        f"system c1 = new t . (!t!(0).0 | Slow{n1})",
        "context Noise = WhiteNoise | []_1",
    ]
    if nested:
        lines.append("context Noise2 = WhiteNoise | (WhiteNoise | []_1)")
    lines += [
        f"adversary A = step_counter(n={n})",
        "check err name=fast_err system=c adversary=A expect=reachable",
        "check err name=slow_err system=c1 adversary=A expect=unreachable",
        "check resilience name=noise_explicit core=c context=Noise adversary=A engine=explicit expect=pass",
        "check resilience name=noise_wsts core=c context=Noise adversary=A engine=wsts expect=pass",
    ]
    if nested:
        lines.append("check resilience name=noise_nested core=c context=Noise2 adversary=A engine=explicit expect=pass")
    return "\n".join(lines) + "\n"


def sidechannel_model(n: int, n1: int, nested: bool = False) -> Model:
    return parse_model(sidechannel_text(n, n1, nested))


# ----------------------------------------------------------------------
# 复制服务器
# ----------------------------------------------------------------------

def replicated_server_text(clients: int, replicas: int, max_failures: int, persistent: bool = False) -> str:
    """
    复制服务器案例的模型文本

    Sys1 只有一个客户端；Sys2 的服务器放在 l1；Sys3 把服务器复制到 l1..lr。
    persistent 为真时客户端在交付后继续接收，交付通道由复制的接收者消费。

    Raises:
        BadParams: 客户端或副本数小于 1，或最大失败数超过副本数
    """
    if clients < 1 or replicas < 1:
        raise BadParams(f"客户端与副本数至少为 1: clients={clients}, replicas={replicas}")
    if not 0 <= max_failures <= replicas:
        raise BadParams(f"最大失败数必须在 0..{replicas} 之间: {max_failures}", max_failures=max_failures)
    locs = [f"l{i}" for i in range(1, replicas + 1)]
    clis = range(1, clients + 1)
    lines = [
        f"# replicated server: {clients} clients, {replicas} replicas, up to {max_failures} failures",
        "domain { v }",
        "channel a, " + ", ".join(f"d{i}" for i in clis),
        "location " + ", ".join(locs),
        "def OTP = a!v.0",
    ]
    for i in clis:
        tail = f"BC{i}" if persistent else "0"
        lines.append(f"def BC{i} = a?(x).d{i}!x.{tail}")

    def with_sinks(body: str, served) -> str:
        if not persistent:
            return body
        return body + "".join(f" | !d{i}?(y).0" for i in served)

    all_bcs = " | ".join(f"BC{i}" for i in clis)
    replicated = " | ".join(f"loc {loc} [!OTP]" for loc in locs)
    lines += [
        "system Sys1 = " + with_sinks("new a . (BC1 | OTP)", [1]),
        "system Sys2 = " + with_sinks(f"new a . ({all_bcs} | loc l1 [!OTP])", clis),
        "system Sys3 = " + with_sinks(f"new a . ({all_bcs} | {replicated})", clis),
        "context Crep = " + " | ".join(f"loc {loc} [![]_{i}]" for i, loc in enumerate(locs, 1)),
        "adversary FS1 = fail_stop(locs=[l1], max=1)",
        f"adversary FS = fail_stop(locs=[{', '.join(locs)}], max={max_failures})",
    ]
    survives = replicas >= max_failures + 1
    lines += [
        "check barbs name=sys1_barbs system=Sys1 expect={d1!v}",
        "check bisim name=sys2_under_failure left=Sys2 right=Sys2 right_adversary=FS1 expect=inequivalent",
        f"check bisim name=sys3_under_failure left=Sys2 right=Sys3 right_adversary=FS "
        f"expect={'equivalent' if survives else 'inequivalent'}",
        f"check resilience name=otp_replicated core=OTP context=Crep adversary=FS engine=explicit "
        f"expect={'pass' if survives else 'fail'}",
    ]
    return "\n".join(lines) + "\n"


def replicated_server_model(clients: int, replicas: int, max_failures: int, persistent: bool = False) -> Model:
    return parse_model(replicated_server_text(clients, replicas, max_failures, persistent))


# ----------------------------------------------------------------------
# 传输协议
# ----------------------------------------------------------------------

def _rro_call(p: str, ns: List[str], name: str = "Rro") -> str:
    return f"{name}({', '.join([p] + ns)})"


def transmission_text(k: int, p_max: int) -> str:
    """
    传输协议案例的模型文本

    值域 1..k 是服务器依次切换的取值；计数器与缓冲区在 p_max 处截断。
    交付由顺序监视器 Mon 消费，交付值小于上次交付值时呈现 stale!y。
    Rro 交付后把本轮请求数清零，仍在途的旧响应不再被计数，乱序时会交付过期值；
    Rrc 交付后保留在途请求数 p - 1，交付值单调不减。

    Raises:
        BadParams: k < 2 或 p_max < 1
    """
    if k < 2 or p_max < 1:
        raise BadParams(f"需要 k >= 2 且 p_max >= 1，实际 k={k}, p_max={p_max}", k=k, p_max=p_max)
    top = max(k, p_max)
    ns = [f"n{v}" for v in range(1, k + 1)]
    dec = {v: [f"n{j} - 1" if j == v else f"n{j}" for j in range(1, k + 1)] for v in range(1, k + 1)}
    reset = ["p - 1"] * k

    def cases(name: str, carried: str) -> str:
        return " | ".join(f"[x = {v}] ([0 < n{v}] {_rro_call('p - 1', dec[v], name)} | "
                          f"[n{v} = 0] d!x.{_rro_call(carried, reset, name)})" for v in range(1, k + 1))

    delivered = ", ".join(f"d!{v}" for v in range(1, k + 1))
    zeros = ["0"] * k
    lines = [
        f"# transmission over lossy channels: {k} values, counters and buffers bounded by {p_max}",
        f"domain {{ 0..{top} }}",
        "channel b, c mediated",
        "channel d, stale",
        f"def Sr(v) = b?(u).c!v.Sr(v) + [v < {k}] Sr(v + 1)",
        "def Rs = b!().c?(x).d!x.Rs",
        "def Rc = c?(x).d!x.Rc",
        "def Ro = !b!().0 | Rc",
        f"def {_rro_call('p', ns)} = b!().{_rro_call('p + 1', ns)} + c?(x).({cases('Rro', '0')})",
        f"def {_rro_call('p', ns, 'Rrc')} = b!().{_rro_call('p + 1', ns, 'Rrc')} + c?(x).({cases('Rrc', 'p - 1')})",
        "def Mon(w) = d?(y).([y < w] stale!y.0 | [w <= y] Mon(y))",
        "system Rs_sys = new b, c . (Sr(1) | Rs | Mon(1))",
        "system Ro_sys = new b, c . (Sr(1) | Ro | Mon(1))",
        f"system Rro_sys = new b, c . (Sr(1) | {_rro_call('0', zeros)} | Mon(1))",
        f"system Rrc_sys = new b, c . (Sr(1) | {_rro_call('0', zeros, 'Rrc')} | Mon(1))",
        "adversary Ao = channel_omission(chs=[b, c])",
        "adversary Aro = channel_reorder_omission(chs=[b, c])",
        f"check bisim name=ro_reordering left=Ro_sys left_adversary=Ao right=Ro_sys right_adversary=Aro "
        f"buffer={p_max} expect=inequivalent",
        f"check bisim name=rro_against_ro left=Ro_sys left_adversary=Ao right=Rro_sys right_adversary=Aro "
        f"buffer={p_max} expect=inequivalent",
        f"check barbs name=rrc_in_order system=Rrc_sys adversary=Aro buffer={p_max} depth=1000 "
        f"expect={{{delivered}}}",
        f"check stuck name=rs_stuck system=Rs_sys adversary=Ao buffer={p_max} expect=reachable",
        f"check stuck name=ro_progress system=Ro_sys adversary=Ao buffer={p_max} expect=unreachable",
    ]
    return "\n".join(lines) + "\n"


class TxState(NamedTuple):
    """
    传输客户端的计数器状态

    vec = (p, b, n_1, ..., n_k)：p 是本轮请求数，b 是请求缓冲区中的令牌数。
    """
    ctrl: Any
    server: int
    vec: Tuple[int, ...]
    responses: Tuple[int, ...] = ()


@dataclass
class TransmissionCounters:
    """
    (b)(c)(Sr | Rro) ∘ Aro 的计数器打包

    控制点是 round 或 (deliver, v)；请求缓冲区只计数，响应缓冲区是 1..k 上的多重集。
    交付分支对 n_v 做零测试，因此上模拟不成立，前驱基在 ↑ 意义下是上近似。
    """
    k: int

    @property
    def values(self) -> List[int]:
        return list(range(1, self.k + 1))

    @property
    def controls(self) -> List[Any]:
        return [ROUND] + [(DELIVER, v) for v in self.values]

    @property
    def order(self) -> QuasiOrder:
        return Product([EqualityOn(self.controls), EqualityOn(self.values),
                        DicksonVec(self.k + 2), BagEmbed(self.values)])

    @property
    def initial(self) -> TxState:
        return TxState(ROUND, 1, (0,) * (self.k + 2), ())

    def state(self, ctrl: Any = ROUND, server: int = 1, p: int = 0, b: int = 0,
              n: Optional[Dict[int, int]] = None, responses=()) -> TxState:
        ns = [(n or {}).get(v, 0) for v in self.values]
        return TxState(ctrl, server, (p, b, *ns), bag(responses))

    @staticmethod
    def _set(vec: Tuple[int, ...], i: int, value: int) -> Tuple[int, ...]:
        return vec[:i] + (value,) + vec[i + 1:]

    def succ(self, s: TxState) -> List[TxState]:
        out = set()
        p, b = s.vec[0], s.vec[1]
        if s.ctrl == ROUND:
            # 发出请求
            out.add(s._replace(vec=self._set(self._set(s.vec, 0, p + 1), 1, b + 1)))
        if b > 0:
            # 服务器应答（取当前值）或请求丢失
            out.add(s._replace(vec=self._set(s.vec, 1, b - 1), responses=bag(s.responses + (s.server,))))
            out.add(s._replace(vec=self._set(s.vec, 1, b - 1)))
        if s.server < self.k:
            out.add(s._replace(server=s.server + 1))
        for v in sorted(set(s.responses)):
            rest = list(s.responses)
            rest.remove(v)
            rest = tuple(rest)
            out.add(s._replace(responses=rest))
            if s.ctrl != ROUND:
                continue
            i = v + 1
            if s.vec[i] > 0:
                vec = self._set(self._set(s.vec, 0, max(p - 1, 0)), i, s.vec[i] - 1)
                out.add(TxState(ROUND, s.server, vec, rest))
            else:
                out.add(TxState((DELIVER, v), s.server, s.vec, rest))
        if s.ctrl != ROUND:
            # 交付后开始新一轮
            vec = (0, b) + (max(p - 1, 0),) * self.k
            out.add(TxState(ROUND, s.server, vec, s.responses))
        return sorted(out, key=self.order.key)

    def pred_basis(self, m: TxState) -> List[TxState]:
        """逐规则的符号极小前驱"""
        out = []
        p, b = m.vec[0], m.vec[1]
        if m.ctrl == ROUND:
            out.append(m._replace(vec=self._set(self._set(m.vec, 0, max(p - 1, 0)), 1, max(b - 1, 0))))
        # 请求丢失与响应丢失
        out.append(m._replace(vec=self._set(m.vec, 1, b + 1)))
        for v in self.values:
            out.append(m._replace(responses=bag(m.responses + (v,))))
        # 应答：目标中的一个当前值可以由这次应答提供
        rest = list(m.responses)
        if m.server in rest:
            rest.remove(m.server)
        out.append(m._replace(vec=self._set(m.vec, 1, b + 1), responses=tuple(rest)))
        if m.server > 1:
            out.append(m._replace(server=m.server - 1))
        for v in self.values:
            i = v + 1
            if m.ctrl == ROUND:
                vec = self._set(self._set(m.vec, 0, p + 1 if p > 0 else 0), i, m.vec[i] + 1)
                out.append(TxState(ROUND, m.server, vec, bag(m.responses + (v,))))
            elif m.ctrl == (DELIVER, v) and m.vec[i] == 0:
                out.append(TxState(ROUND, m.server, m.vec, bag(m.responses + (v,))))
        if m.ctrl == ROUND and p == 0:
            top = max(m.vec[2:], default=0)
            need = top + 1 if top > 0 else 0
            for v in self.values:
                out.append(TxState((DELIVER, v), m.server, (need, b) + (0,) * self.k, m.responses))
        return out

    def show(self, s: TxState) -> str:
        ns = ", ".join(f"n{v}={s.vec[v + 1]}" for v in self.values)
        ctrl = s.ctrl if s.ctrl == ROUND else f"deliver {s.ctrl[1]}"
        return f"{ctrl}; server={s.server}; p={s.vec[0]}, b={s.vec[1]}, {ns}; c={list(s.responses)}"

    def instance(self, name: str = "transmission") -> WstsInstance:
        return WstsInstance(
            initial=self.initial,
            order=self.order,
            succ=self.succ,
            pred_basis=self.pred_basis,
            has_downward_reflexive_simulation=False,
            name=name,
            show=self.show,
        )

    def explicit_cover(self, target: TxState, bound: int) -> bool:
        """有界显式对照：计数器与响应缓冲区截断在 bound 以内"""
        order = self.order
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            x = queue.popleft()
            if order._leq(target, x):
                return True
            for y in self.succ(x):
                if y in seen or max(y.vec) > bound or len(y.responses) > bound:
                    continue
                seen.add(y)
                queue.append(y)
        return False


def transmission_queries(k: int) -> Dict[str, TxState]:
    """传输打包上的具名覆盖查询"""
    tc = TransmissionCounters(k)
    return {
        'delivery_reachable': tc.state((DELIVER, 1)),
        'delivery_with_pending_counter': tc.state((DELIVER, 1), n={1: 1}),
        'delivery_after_switch': tc.state((DELIVER, 1), server=k),
        'stale_allowance_after_reset': tc.state(ROUND, n={1: 1}),
    }


def transmission_model(k: int, p_max: int) -> Tuple[Model, WstsInstance]:
    """
    传输协议案例：模型与客户端的计数器打包

    Raises:
        BadParams: 参数不合法
    """
    model = parse_model(transmission_text(k, p_max))
    return model, TransmissionCounters(k).instance()


# ----------------------------------------------------------------------
# 显式可达图
# ----------------------------------------------------------------------

def explicit_reach(model: Model, system: str, adversary: Optional[str] = None, depth: int = 8,
                   cap: Optional[int] = None, buffer_cap: Optional[int] = None) -> nx.DiGraph:
    """
    耦合系统在 depth 步内的显式可达图

    超过状态上限时返回部分图，graph['budget_exceeded'] 为真，graph['frontier'] 为未展开节点。

    Args:
        model: 模型
        system: 系统名
        adversary: 敌手名，None 表示良性敌手
        depth: 探索深度
        cap: 状态数上限
        buffer_cap: 中介缓冲区容量（同时丢弃越出值域的迁移）

    Returns:
        节点带 barbs 与 level 属性的有向图
    """
    if depth < 0:
        raise BadParams(f"探索深度不能为负: {depth}", depth=depth)
    adv: AdversaryModel = resolve_adversary(model, adversary)
    cs = couple(model, model.system(system), adv, truncate=buffer_cap is not None, buffer_cap=buffer_cap)
    graph = cs.explore(cap=cap, depth=depth, strict=False)
    graph.graph['system'] = cs
    logger.info(f"Explored {graph.number_of_nodes()} states of {system} under {adv.name} to depth {depth}")
    return graph


GENERATORS = {
    'sidechannel': sidechannel_text,
    'repserver': replicated_server_text,
    'transmission': transmission_text,
}


"""
使用示例：

from src.services.casestudies import replicated_server_model, explicit_reach

model = replicated_server_model(clients=2, replicas=2, max_failures=1)
graph = explicit_reach(model, "Sys2", "FS1", depth=8)
print(graph.number_of_nodes())
"""
