#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
归约语义服务模块

实现值传递演算的操作语义，功能包括：
1. 结构同余规范化（并行的结合/交换/单位律、限制外提与约束名规范编号、闭合匹配求值、!P|!P = !P）
2. 一步后继计算（同步会合、选择、复制展开一份、位置门控）
3. 强/弱 barb 计算
4. 上下文填洞与上下文复合
5. 面向敌手耦合的带标签迁移（中介通道上的发送与接收）
"""

import functools
import itertools
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from ..models.terms import (
    Barb, BinOp, Call, Choice, ContextTerm, Hole, Inert, Input, Lit, Located, Match, Model,
    Output, Par, ProcTerm, Repl, Restrict, Sum, Tup, Var, Value, calls_of, choice_all, free_channels,
    free_vars, holes_of, normalize_binders, par_all, rename_channel, show, substitute,
)
from ..utils.errors import (
    BudgetExceeded, CaptureViolation, DomainEscape, HoleCountMismatch, ModelError, OpenTerm,
    UnguardedRecursion,
)
from ..utils.logger import logger

Up = Optional[FrozenSet[str]]

# 同一组对称线程的编号候选数上限
_MAX_TIE_ORDERINGS = 720

# 每个语义实例的展开与迁移缓存容量
_CACHE_SIZE = 50_000


@dataclass(frozen=True)
class Thread:
    """规范形中的一个顶层线程：所在位置与守卫项"""
    loc: Optional[str]
    term: ProcTerm

    def key(self) -> Tuple[str, str]:
        return (self.loc or "", repr(self.term))


@dataclass(frozen=True)
class CanonicalState:
    """
    规范状态

    以 % 开头的通道名是顶层限制的约束名，按首次出现顺序编号为 %0, %1, ...
    """
    threads: Tuple[Thread, ...] = ()

    @property
    def is_inert(self) -> bool:
        return not self.threads

    def bound_names(self) -> List[str]:
        names: List[str] = []
        for t in self.threads:
            for ch in _chan_order(t.term):
                if ch.startswith("%") and ch not in names:
                    names.append(ch)
        return names

    def to_term(self) -> ProcTerm:
        """转回进程项（约束名显示为 n_0, n_1, ...）"""
        names = self.bound_names()
        mapping = {n: f"n_{n[1:]}" for n in names}
        groups: Dict[Optional[str], List[ProcTerm]] = {}
        for t in self.threads:
            term = _rename_many(t.term, mapping) if mapping else t.term
            groups.setdefault(t.loc, []).append(_surface(term))
        parts = list(groups.get(None, []))
        for loc in sorted(k for k in groups if k is not None):
            parts.append(Located(loc, par_all(groups[loc])))
        body = par_all(parts)
        for n in reversed(names):
            body = Restrict(mapping[n], body)
        return body

    def show(self) -> str:
        return show(self.to_term())

    def __str__(self) -> str:
        return self.show()


def _surface(term: ProcTerm) -> ProcTerm:
    if isinstance(term, Sum):
        return choice_all(list(term.branches))
    return term


def _chan_order(p: ProcTerm) -> List[str]:
    """按遍历顺序列出项中出现的通道名（含调用的通道映射）"""
    if isinstance(p, (Output, Input)):
        return [p.chan] + _chan_order(p.cont)
    if isinstance(p, Call):
        return [cur for _, cur in p.chans]
    if isinstance(p, Sum):
        return [c for b in p.branches for c in _chan_order(b)]
    if isinstance(p, (Par, Choice)):
        return _chan_order(p.left) + _chan_order(p.right)
    if isinstance(p, (Restrict, Match, Repl, Located)):
        return _chan_order(p.body)
    return []


def _rename_many(p: ProcTerm, mapping: Dict[str, str]) -> ProcTerm:
    """同时重命名多个通道（经由临时名，避免链式替换）"""
    temps = {}
    for i, (old, new) in enumerate(mapping.items()):
        if old == new:
            continue
        tmp = f"\x00{i}"
        p = rename_channel(p, old, tmp)
        temps[tmp] = new
    for tmp, new in temps.items():
        p = rename_channel(p, tmp, new)
    return p


def _enabled(loc: Optional[str], up: Up) -> bool:
    return up is None or loc is None or loc in up


@dataclass(frozen=True)
class _Cap:
    """一个可执行的前缀能力"""
    owner: Tuple
    loc: Optional[str]
    out: bool
    chan: str
    payload: object
    cont: ProcTerm


class Semantics:
    """
    归约语义服务

    mediated 中的通道不做同步会合，只产生 send/recv 标签供敌手耦合使用，
    其上的输出也不是可观测 barb。truncate 为真时丢弃越出值域的迁移并计数。
    """

    def __init__(self, model: Model, mediated: Iterable[str] = (), truncate: bool = False):
        self.model = model
        self.domain = model.domain
        self.defs = model.defs
        self.mediated = frozenset(mediated)
        self.truncate = truncate
        self.stats: Counter = Counter()
        self._lock = threading.Lock()
        self._fresh = itertools.count()
        self._unfold_cached = functools.lru_cache(maxsize=_CACHE_SIZE)(self._unfold_key)
        self._steps_cached = functools.lru_cache(maxsize=_CACHE_SIZE)(self._compute_steps)
        self._def_chans = self._compute_def_chans()

    # ------------------------------------------------------------------
    # 表达式
    # ------------------------------------------------------------------

    def _count(self, key: str, n: int = 1):
        with self._lock:
            self.stats[key] += n

    def eval_expr(self, e) -> Value:
        """
        对闭合表达式求值

        Raises:
            OpenTerm: 含自由变量
            DomainEscape: 结果越出值域
        """
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, Var):
            raise OpenTerm(f"表达式含自由变量: {e.name}", var=e.name)
        if isinstance(e, Tup):
            return tuple(self.eval_expr(i) for i in e.items)
        if isinstance(e, BinOp):
            left, right = self.eval_expr(e.left), self.eval_expr(e.right)
            if not _is_int(left) or not _is_int(right):
                raise DomainEscape(f"算术运算的操作数不是整数: {left} {e.op} {right}")
            if e.op == '+':
                result = left + right
            elif e.op == '-':
                result = left - right
                if result < 0:
                    # 截断减法
                    logger.debug(f"Monus floored {left} - {right} at 0")
                    self._count("monus_floor")
                    result = 0
            else:
                raise DomainEscape(f"未知的运算符: {e.op}")
            self.check_value(result)
            return result
        raise TypeError(f"未知的表达式类型: {type(e).__name__}")

    def check_value(self, value: Value) -> Value:
        if value != () and not self.domain.contains(value):
            raise DomainEscape(f"值越出值域: {value}", value=str(value))
        return value

    def holds(self, m: Match) -> bool:
        """求值匹配条件"""
        left, right = self.eval_expr(m.left), self.eval_expr(m.right)
        if m.op == '=':
            return left == right
        if m.op == '!=':
            return left != right
        if not _is_int(left) or not _is_int(right):
            raise DomainEscape(f"比较运算的操作数不是整数: {left} {m.op} {right}")
        if m.op == '<':
            return left < right
        if m.op == '<=':
            return left <= right
        raise DomainEscape(f"未知的比较运算符: {m.op}")

    # ------------------------------------------------------------------
    # 调用展开
    # ------------------------------------------------------------------

    def _compute_def_chans(self) -> Dict[str, FrozenSet[str]]:
        """每个定义（传递地）使用的自由通道"""
        chans = {name: free_channels(d.body) for name, d in self.defs.items()}
        changed = True
        while changed:
            changed = False
            for name, d in self.defs.items():
                extra = frozenset()
                for c in calls_of(d.body):
                    extra |= chans.get(c.name, frozenset())
                if not extra <= chans[name]:
                    chans[name] = chans[name] | extra
                    changed = True
        return chans

    def _call_key(self, p: Call) -> Tuple:
        return (p.name, tuple(self.eval_expr(a) for a in p.args), p.chans)

    def unfold(self, p: Call) -> ProcTerm:
        """展开一次调用：代入实参并应用通道映射"""
        return self._unfold_cached(self._call_key(p))

    def _unfold_key(self, key: Tuple) -> ProcTerm:
        name, args, chans = key
        d = self.defs.get(name)
        if d is None:
            raise ModelError(f"未声明的进程定义: {name}", name=name)
        for v in args:
            self.check_value(v)
        body = substitute(d.body, dict(zip(d.params, args)))
        if chans:
            body = _rename_many(body, dict(chans))
        return body

    def clear_caches(self) -> None:
        """清空展开与迁移缓存"""
        self._unfold_cached.cache_clear()
        self._steps_cached.cache_clear()

    def _prune(self, p: ProcTerm) -> ProcTerm:
        """去掉调用映射中定义体用不到的通道"""
        if isinstance(p, Call):
            if not p.chans:
                return p
            used = self._def_chans.get(p.name, frozenset())
            kept = tuple(pair for pair in p.chans if pair[0] in used)
            return p if kept == p.chans else Call(p.name, p.args, kept)
        if isinstance(p, Output):
            return Output(p.chan, p.expr, self._prune(p.cont))
        if isinstance(p, Input):
            return Input(p.chan, p.var, self._prune(p.cont))
        if isinstance(p, Par):
            return Par(self._prune(p.left), self._prune(p.right))
        if isinstance(p, Choice):
            return Choice(self._prune(p.left), self._prune(p.right))
        if isinstance(p, Restrict):
            return Restrict(p.chan, self._prune(p.body))
        if isinstance(p, Match):
            return Match(p.left, p.right, self._prune(p.body), p.op)
        if isinstance(p, Repl):
            return Repl(self._prune(p.body))
        if isinstance(p, Located):
            return Located(p.loc, self._prune(p.body))
        if isinstance(p, Sum):
            return Sum(tuple(self._prune(b) for b in p.branches))
        return p

    # ------------------------------------------------------------------
    # 规范化
    # ------------------------------------------------------------------

    def _fresh_name(self) -> str:
        return f"%t{next(self._fresh)}"

    def _flatten(self, p: ProcTerm, loc: Optional[str], out: List[Thread], stack: FrozenSet[Tuple]):
        if isinstance(p, Inert):
            return
        if isinstance(p, Par):
            self._flatten(p.left, loc, out, stack)
            self._flatten(p.right, loc, out, stack)
        elif isinstance(p, Restrict):
            self._flatten(rename_channel(p.body, p.chan, self._fresh_name()), loc, out, stack)
        elif isinstance(p, Located):
            self._flatten(p.body, p.loc, out, stack)
        elif isinstance(p, Match):
            if self.holds(p):
                self._flatten(p.body, loc, out, stack)
        elif isinstance(p, Call):
            key = self._call_key(p)
            if key in stack:
                raise UnguardedRecursion(f"非守卫递归: {p.name}", name=p.name)
            self._flatten(self.unfold(p), loc, out, stack | {key})
        elif isinstance(p, Repl):
            if isinstance(p.body, Inert):
                return
            out.append(Thread(loc, normalize_binders(Repl(self._prune(p.body)))))
        elif isinstance(p, Output):
            value = self.check_value(self.eval_expr(p.expr))
            out.append(Thread(loc, normalize_binders(Output(p.chan, Lit(value), self._prune(p.cont)))))
        elif isinstance(p, Input):
            out.append(Thread(loc, normalize_binders(Input(p.chan, p.var, self._prune(p.cont)))))
        elif isinstance(p, (Choice, Sum)):
            skipped = [False]
            branches = self._branches(p, stack, set(), skipped)
            unique = sorted(set(branches), key=repr)
            if not unique and skipped[0]:
                raise UnguardedRecursion(f"选择的所有分支都是非守卫递归: {show(p)}")
            if len(unique) == 1:
                out.append(Thread(loc, unique[0]))
            elif unique:
                out.append(Thread(loc, Sum(tuple(unique))))
        elif isinstance(p, Hole):
            raise OpenTerm(f"状态中不能出现洞: []_{p.index}")
        else:
            raise TypeError(f"未知的进程项类型: {type(p).__name__}")

    def _branches(self, p: ProcTerm, stack: FrozenSet[Tuple], seen: Set[Tuple], skipped: List[bool]) -> List[ProcTerm]:
        """收集选择的守卫分支；调用分支带记忆地展开"""
        if isinstance(p, Choice):
            return self._branches(p.left, stack, seen, skipped) + self._branches(p.right, stack, seen, skipped)
        if isinstance(p, Sum):
            out: List[ProcTerm] = []
            for b in p.branches:
                out.extend(self._branches(b, stack, seen, skipped))
            return out
        if isinstance(p, Inert):
            return []
        if isinstance(p, Match):
            return self._branches(p.body, stack, seen, skipped) if self.holds(p) else []
        if isinstance(p, Call):
            key = self._call_key(p)
            if key in stack or key in seen:
                skipped[0] = True
                return []
            seen.add(key)
            return self._branches(self.unfold(p), stack, seen, skipped)
        if isinstance(p, Output):
            value = self.check_value(self.eval_expr(p.expr))
            return [normalize_binders(Output(p.chan, Lit(value), self._prune(p.cont)))]
        if isinstance(p, Input):
            return [normalize_binders(Input(p.chan, p.var, self._prune(p.cont)))]
        raise ModelError(f"选择分支必须以输入或输出前缀开头: {show(p)}")

    def _finish(self, threads: List[Thread]) -> CanonicalState:
        """复制线程去重并规范编号约束名"""
        kept: List[Thread] = []
        seen_repl = set()
        for t in threads:
            if isinstance(t.term, Repl):
                if t in seen_repl:
                    continue
                seen_repl.add(t)
            kept.append(t)

        names = {ch for t in kept for ch in _chan_order(t.term) if ch.startswith("%")}
        if not names:
            return CanonicalState(tuple(sorted(kept, key=Thread.key)))

        mask = {n: "%" for n in names}
        groups: Dict[str, List[Thread]] = {}
        for t in kept:
            masked = _rename_many(t.term, mask) if _chan_order(t.term) else t.term
            groups.setdefault(repr((t.loc or "", masked)), []).append(t)
        ordered_groups = [sorted(groups[k], key=Thread.key) for k in sorted(groups)]

        # 掩码后相同的线程之间的顺序决定编号，小规模时穷举取最小表示
        ties = [i for i, g in enumerate(ordered_groups)
                if len(g) > 1 and any(ch.startswith("%") for t in g for ch in _chan_order(t.term))]
        total = 1
        for i in ties:
            for n in range(2, len(ordered_groups[i]) + 1):
                total *= n
        if total > _MAX_TIE_ORDERINGS:
            ties = []

        best: Optional[Tuple[Thread, ...]] = None
        best_key = None
        for choice in itertools.product(*[itertools.permutations(ordered_groups[i]) for i in ties]):
            groups_now = list(ordered_groups)
            for i, perm in zip(ties, choice):
                groups_now[i] = list(perm)
            mapping: Dict[str, str] = {}
            for g in groups_now:
                for t in g:
                    for ch in _chan_order(t.term):
                        if ch.startswith("%") and ch not in mapping:
                            mapping[ch] = f"%{len(mapping)}"
            renamed = tuple(sorted((Thread(t.loc, _rename_many(t.term, mapping)) for t in kept), key=Thread.key))
            key = tuple(t.key() for t in renamed)
            if best_key is None or key < best_key:
                best, best_key = renamed, key
        return CanonicalState(best)

    def _build(self, threads: List[Thread], items: Sequence[Tuple[Optional[str], ProcTerm]]) -> CanonicalState:
        out = list(threads)
        for loc, term in items:
            self._flatten(term, loc, out, frozenset())
        return self._finish(out)

    def canonicalize(self, p: ProcTerm) -> CanonicalState:
        """
        计算结构同余下的规范代表

        Args:
            p: 闭合进程项

        Returns:
            规范状态

        Raises:
            OpenTerm: 含自由变量或洞
        """
        fv = free_vars(p)
        if fv:
            raise OpenTerm(f"进程项含自由变量: {', '.join(sorted(fv))}", vars=sorted(fv))
        if holes_of(p):
            raise OpenTerm("进程项含洞，需先填洞")
        self._count("canonicalized")
        return self._build([], [(None, p)])

    # ------------------------------------------------------------------
    # 迁移
    # ------------------------------------------------------------------

    def _prefixes(self, term: ProcTerm) -> List[Tuple[bool, str, object, ProcTerm]]:
        if isinstance(term, Output):
            return [(True, term.chan, term.expr.value, term.cont)]
        if isinstance(term, Input):
            return [(False, term.chan, term.var, term.cont)]
        if isinstance(term, Sum):
            out = []
            for b in term.branches:
                out.extend(self._prefixes(b))
            return out
        return []

    def _instantiate(self, t: Thread) -> List[Thread]:
        """复制线程展开一份副本"""
        out: List[Thread] = []
        self._flatten(t.term.body, t.loc, out, frozenset())
        return out

    def _caps(self, threads: Sequence[Thread], owner_prefix: Tuple, up: Up) -> List[_Cap]:
        caps = []
        for i, t in enumerate(threads):
            if isinstance(t.term, Repl) or not _enabled(t.loc, up):
                continue
            for out, chan, payload, cont in self._prefixes(t.term):
                caps.append(_Cap(owner_prefix + (i,), t.loc, out, chan, payload, cont))
        return caps

    def labelled_steps(self, s: CanonicalState, up: Up = None,
                       recv_values: Optional[Dict[str, Iterable[Value]]] = None) -> List[Tuple[Tuple, CanonicalState]]:
        """
        带标签的一步迁移

        标签为 ('tau',)、('send', ch, v) 或 ('recv', ch, v)；后两者只出现在中介通道上。

        Args:
            s: 规范状态
            up: 存活位置集合，None 表示全部存活
            recv_values: 中介通道上可接收的值；缺省为值域全部原子值加单位值

        Returns:
            (标签, 后继状态) 列表，已去重并按确定顺序排列
        """
        recv = None
        if recv_values is not None:
            recv = tuple(sorted(((ch, tuple(vs)) for ch, vs in recv_values.items()), key=lambda kv: kv[0]))
        return self._steps_cached(s, up, recv)

    def _compute_steps(self, s: CanonicalState, up: Up,
                       recv: Optional[Tuple[Tuple[str, Tuple], ...]]) -> List[Tuple[Tuple, CanonicalState]]:
        recv_values = dict(recv) if recv is not None else None
        copies: Dict[Tuple[int, int], List[Thread]] = {}
        caps = self._caps(s.threads, ('t',), up)
        for j, t in enumerate(s.threads):
            if isinstance(t.term, Repl) and _enabled(t.loc, up):
                copies[(j, 0)] = self._instantiate(t)
                caps.extend(self._caps(copies[(j, 0)], ('r', j, 0), up))

        steps: Set[Tuple[Tuple, CanonicalState]] = set()
        outs = [c for c in caps if c.out and c.chan not in self.mediated]
        ins = [c for c in caps if not c.out and c.chan not in self.mediated]
        for o in outs:
            for i in ins:
                if i.chan != o.chan or i.owner == o.owner:
                    continue
                self._add_step(steps, s, copies, ('tau',), [o, i], o.payload)
            if o.owner[0] == 'r':
                # 同一复制的两份副本之间的通信
                j = o.owner[1]
                if (j, 1) not in copies:
                    copies[(j, 1)] = self._instantiate(s.threads[j])
                for i in self._caps(copies[(j, 1)], ('r', j, 1), up):
                    if not i.out and i.chan == o.chan:
                        self._add_step(steps, s, copies, ('tau',), [o, i], o.payload)

        for c in caps:
            if c.chan not in self.mediated:
                continue
            if c.out:
                self._add_step(steps, s, copies, ('send', c.chan, c.payload), [c], None)
            else:
                values = self._recv_values(c.chan, recv_values)
                for v in values:
                    self._add_step(steps, s, copies, ('recv', c.chan, v), [c], v)

        return sorted(steps, key=lambda x: (repr(x[0]), tuple(t.key() for t in x[1].threads)))

    def _recv_values(self, chan: str, recv_values: Optional[Dict[str, Iterable[Value]]]) -> List[Value]:
        if recv_values is not None:
            return list(recv_values.get(chan, ()))
        return [()] + self.domain.atoms()

    def _add_step(self, steps: Set, s: CanonicalState, copies: Dict, label: Tuple, consumed: List[_Cap], value):
        try:
            steps.add((label, self._apply(s, copies, consumed, value)))
        except DomainEscape as e:
            if not self.truncate:
                raise
            logger.debug(f"Pruned transition {label}: {str(e)}")
            self._count("pruned")

    def _apply(self, s: CanonicalState, copies: Dict, consumed: List[_Cap], value) -> CanonicalState:
        used = {c.owner for c in consumed}
        threads = [t for i, t in enumerate(s.threads) if ('t', i) not in used]
        instances = sorted({(c.owner[1], c.owner[2]) for c in consumed if c.owner[0] == 'r'})
        for j, inst in instances:
            threads.extend(t for k, t in enumerate(copies[(j, inst)]) if ('r', j, inst, k) not in used)
        items = []
        for c in consumed:
            if c.out:
                items.append((c.loc, c.cont))
            else:
                items.append((c.loc, substitute(c.cont, {c.payload: value})))
        return self._build(threads, items)

    def successors(self, s: CanonicalState, up: Up = None) -> Set[CanonicalState]:
        """一步内部归约的后继集合"""
        return {nxt for label, nxt in self.labelled_steps(s, up) if label[0] == 'tau'}

    # ------------------------------------------------------------------
    # barb
    # ------------------------------------------------------------------

    def strong_barbs(self, s: CanonicalState, up: Up = None) -> FrozenSet[Barb]:
        """可立即执行的、非限制非中介通道上的输出"""
        barbs = set()
        for t in s.threads:
            if not _enabled(t.loc, up):
                continue
            threads = self._instantiate(t) if isinstance(t.term, Repl) else [t]
            for sub in threads:
                if not _enabled(sub.loc, up):
                    continue
                for out, chan, payload, _ in self._prefixes(sub.term):
                    if out and not chan.startswith("%") and chan not in self.mediated:
                        barbs.add(Barb(chan, payload))
        return frozenset(barbs)

    def weak_barbs(self, s: CanonicalState, up: Up = None, depth: int = 64,
                   saturate: bool = False, state_cap: Optional[int] = None) -> FrozenSet[Barb]:
        """
        depth 步内部迁移内可达状态的强 barb 并集

        Args:
            s: 起始状态
            up: 存活位置集合
            depth: 探索深度
            saturate: 为真时要求探索在深度内饱和
            state_cap: 访问状态数上限

        Raises:
            BudgetExceeded: 要求饱和而边界处仍有未探索状态
        """
        seen = {s}
        frontier = [s]
        barbs = set(self.strong_barbs(s, up))
        level = 0
        while frontier and level < depth:
            level += 1
            nxt = []
            for state in frontier:
                for succ in sorted(self.successors(state, up), key=lambda x: tuple(t.key() for t in x.threads)):
                    if succ in seen:
                        continue
                    seen.add(succ)
                    nxt.append(succ)
                    barbs |= self.strong_barbs(succ, up)
                    if state_cap is not None and len(seen) > state_cap:
                        raise BudgetExceeded(f"弱 barb 探索超过状态上限 {state_cap}", cap=state_cap)
            frontier = nxt
        if frontier and saturate:
            # 边界状态若已无新后继仍视为饱和
            if any(succ not in seen for state in frontier for succ in self.successors(state, up)):
                raise BudgetExceeded(f"弱 barb 探索在深度 {depth} 未饱和", depth=depth)
        return frozenset(barbs)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


# ----------------------------------------------------------------------
# 上下文
# ----------------------------------------------------------------------

def _fill(p: ProcTerm, fillers: Dict[int, ProcTerm]) -> ProcTerm:
    if isinstance(p, Hole):
        return fillers[p.index]
    if isinstance(p, Output):
        return Output(p.chan, p.expr, _fill(p.cont, fillers))
    if isinstance(p, Input):
        return Input(p.chan, p.var, _fill(p.cont, fillers))
    if isinstance(p, Par):
        return Par(_fill(p.left, fillers), _fill(p.right, fillers))
    if isinstance(p, Choice):
        return Choice(_fill(p.left, fillers), _fill(p.right, fillers))
    if isinstance(p, Restrict):
        return Restrict(p.chan, _fill(p.body, fillers))
    if isinstance(p, Match):
        return Match(p.left, p.right, _fill(p.body, fillers), p.op)
    if isinstance(p, Repl):
        return Repl(_fill(p.body, fillers))
    if isinstance(p, Located):
        return Located(p.loc, _fill(p.body, fillers))
    return p


def plug(c: ContextTerm, fillers: Sequence[ProcTerm]) -> ProcTerm:
    """
    填洞：第 i 个洞替换为 fillers[i-1]

    Raises:
        HoleCountMismatch: 填充物个数与洞数不符
        CaptureViolation: 填充物不是闭合项
    """
    if len(fillers) != c.hole_count:
        raise HoleCountMismatch(f"上下文有 {c.hole_count} 个洞，但给出了 {len(fillers)} 个填充物",
                                holes=c.hole_count, fillers=len(fillers))
    for i, f in enumerate(fillers, 1):
        fv = free_vars(f)
        if fv:
            raise CaptureViolation(f"第 {i} 个填充物含自由变量: {', '.join(sorted(fv))}", hole=i)
    return _fill(c.term, {i: f for i, f in enumerate(fillers, 1)})


def plug_all(c: ContextTerm, q: ProcTerm) -> ProcTerm:
    """所有洞都填入同一个核心进程"""
    return plug(c, [q] * c.hole_count)


def _shift_holes(p: ProcTerm, offset: int) -> ProcTerm:
    indices = sorted(set(holes_of(p)))
    return _fill(p, {i: Hole(i + offset) for i in indices})


def compose_contexts(outer: ContextTerm, inner: ContextTerm) -> ContextTerm:
    """
    上下文复合 outer[inner[·]]

    outer 的第 i 个洞填入 inner 的一份拷贝，拷贝中的洞编号整体偏移 (i-1)*|inner|。
    """
    n = inner.hole_count
    fillers = {i: _shift_holes(inner.term, (i - 1) * n) for i in range(1, outer.hole_count + 1)}
    return ContextTerm(_fill(outer.term, fillers))


"""
使用示例：

from src.services.parser import parse_model
from src.services.semantics import Semantics

model = parse_model(text)
sem = Semantics(model)
s = sem.canonicalize(model.system("Sys1"))
print(sem.successors(s))
print(sem.weak_barbs(s, depth=8, saturate=True))
"""
