#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
进程演算实体模型模块

定义了值传递演算中的基本实体类型：
- 值域（Domain）与表达式（Lit / Var / Tup / BinOp）
- 进程项（Inert、Output、Input、Par、Restrict、Choice、Match、Repl、Call、Located、Hole）
- 进程定义（ProcDef）、上下文（ContextTerm）
- 可观测量（Barb）
- 模型（Model）及其声明

所有实体都是不可变的，可以安全地在线程之间共享。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Union

Value = Union[int, str, tuple]


@dataclass(frozen=True)
class Domain:
    """有限值域：整数区间加具名常量"""
    low: int = 0
    high: int = 0
    constants: Tuple[str, ...] = ()
    has_ints: bool = True

    def contains(self, value: Value) -> bool:
        """检查值是否在值域内（元组逐项检查，空元组恒在域内）"""
        if isinstance(value, bool):
            return False
        if isinstance(value, int):
            return self.has_ints and self.low <= value <= self.high
        if isinstance(value, str):
            return value in self.constants
        if isinstance(value, tuple):
            return all(self.contains(v) for v in value)
        return False

    def atoms(self) -> List[Value]:
        """按声明顺序列出所有原子值"""
        ints = list(range(self.low, self.high + 1)) if self.has_ints else []
        return ints + list(self.constants)

    @property
    def size(self) -> int:
        return len(self.atoms())

    def show(self) -> str:
        parts = []
        if self.has_ints:
            parts.append(f"{self.low}..{self.high}")
        parts.extend(self.constants)
        return "domain { " + ", ".join(parts) + " }"


def show_value(value: Value) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(show_value(v) for v in value) + ")"
    return str(value)


def value_key(value: Value) -> Tuple:
    """值的确定性全序键（整数、常量、元组之间不可直接比较）"""
    if isinstance(value, int):
        return (0, value, "")
    if isinstance(value, str):
        return (1, 0, value)
    return (2, len(value), tuple(value_key(v) for v in value))


# ---------------------------------------------------------------------------
# 表达式
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: Value


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Tup:
    items: Tuple['Expr', ...]


@dataclass(frozen=True)
class BinOp:
    """整数算术；'-' 为截断减法（monus）"""
    op: str
    left: 'Expr'
    right: 'Expr'


Expr = Union[Lit, Var, Tup, BinOp]

UNIT = Lit(())


def expr_vars(e: Expr) -> FrozenSet[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Tup):
        out = frozenset()
        for item in e.items:
            out |= expr_vars(item)
        return out
    if isinstance(e, BinOp):
        return expr_vars(e.left) | expr_vars(e.right)
    return frozenset()


def subst_expr(e: Expr, env: Dict[str, Value]) -> Expr:
    if isinstance(e, Var):
        return Lit(env[e.name]) if e.name in env else e
    if isinstance(e, Tup):
        return Tup(tuple(subst_expr(i, env) for i in e.items))
    if isinstance(e, BinOp):
        return BinOp(e.op, subst_expr(e.left, env), subst_expr(e.right, env))
    return e


def show_expr(e: Expr) -> str:
    if isinstance(e, Lit):
        return show_value(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Tup):
        return "(" + ", ".join(show_expr(i) for i in e.items) + ")"
    left = show_expr(e.left)
    right = show_expr(e.right)
    if isinstance(e.right, BinOp):
        right = f"({right})"
    return f"{left} {e.op} {right}"


# ---------------------------------------------------------------------------
# 进程项
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Inert:
    pass


@dataclass(frozen=True)
class Output:
    chan: str
    expr: Expr
    cont: 'ProcTerm' = field(default_factory=Inert)


@dataclass(frozen=True)
class Input:
    chan: str
    var: str
    cont: 'ProcTerm' = field(default_factory=Inert)


@dataclass(frozen=True)
class Par:
    left: 'ProcTerm'
    right: 'ProcTerm'


@dataclass(frozen=True)
class Restrict:
    chan: str
    body: 'ProcTerm'


@dataclass(frozen=True)
class Choice:
    left: 'ProcTerm'
    right: 'ProcTerm'


@dataclass(frozen=True)
class Match:
    left: Expr
    right: Expr
    body: 'ProcTerm'
    op: str = "="


@dataclass(frozen=True)
class Repl:
    body: 'ProcTerm'


@dataclass(frozen=True)
class Call:
    """进程调用；chans 记录定义体中自由通道被限制重命名后的当前名称"""
    name: str
    args: Tuple[Expr, ...] = ()
    chans: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Located:
    loc: str
    body: 'ProcTerm'


@dataclass(frozen=True)
class Hole:
    index: int


@dataclass(frozen=True)
class Sum:
    """规范形中的守卫选择：分支均为输入/输出前缀，已排序去重"""
    branches: Tuple['ProcTerm', ...]


ProcTerm = Union[Inert, Output, Input, Par, Restrict, Choice, Match, Repl, Call, Located, Hole, Sum]

INERT = Inert()


def par_all(terms: List[ProcTerm]) -> ProcTerm:
    """右结合地并行组合，空列表为 0"""
    terms = [t for t in terms if not isinstance(t, Inert)]
    if not terms:
        return INERT
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Par(t, out)
    return out


def choice_all(terms: List[ProcTerm]) -> ProcTerm:
    if not terms:
        return INERT
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Choice(t, out)
    return out


def children(p: ProcTerm) -> List[ProcTerm]:
    if isinstance(p, (Output, Input)):
        return [p.cont]
    if isinstance(p, (Par, Choice)):
        return [p.left, p.right]
    if isinstance(p, (Restrict, Match, Repl, Located)):
        return [p.body]
    if isinstance(p, Sum):
        return list(p.branches)
    return []


def free_vars(p: ProcTerm) -> FrozenSet[str]:
    """进程项中的自由变量"""
    if isinstance(p, Output):
        return expr_vars(p.expr) | free_vars(p.cont)
    if isinstance(p, Input):
        return free_vars(p.cont) - {p.var}
    if isinstance(p, Match):
        return expr_vars(p.left) | expr_vars(p.right) | free_vars(p.body)
    if isinstance(p, Call):
        out = frozenset()
        for a in p.args:
            out |= expr_vars(a)
        return out
    out = frozenset()
    for c in children(p):
        out |= free_vars(c)
    return out


def free_channels(p: ProcTerm) -> FrozenSet[str]:
    """出现在前缀中且未被限制的通道名（不展开调用）"""
    if isinstance(p, (Output, Input)):
        return frozenset([p.chan]) | free_channels(p.cont)
    if isinstance(p, Restrict):
        return free_channels(p.body) - {p.chan}
    out = frozenset()
    for c in children(p):
        out |= free_channels(c)
    return out


def substitute(p: ProcTerm, env: Dict[str, Value]) -> ProcTerm:
    """把变量替换为值（输入绑定会遮蔽外层同名变量）"""
    if not env:
        return p
    if isinstance(p, Output):
        return Output(p.chan, subst_expr(p.expr, env), substitute(p.cont, env))
    if isinstance(p, Input):
        inner = {k: v for k, v in env.items() if k != p.var}
        return Input(p.chan, p.var, substitute(p.cont, inner))
    if isinstance(p, Par):
        return Par(substitute(p.left, env), substitute(p.right, env))
    if isinstance(p, Choice):
        return Choice(substitute(p.left, env), substitute(p.right, env))
    if isinstance(p, Restrict):
        return Restrict(p.chan, substitute(p.body, env))
    if isinstance(p, Match):
        return Match(subst_expr(p.left, env), subst_expr(p.right, env), substitute(p.body, env), p.op)
    if isinstance(p, Repl):
        return Repl(substitute(p.body, env))
    if isinstance(p, Located):
        return Located(p.loc, substitute(p.body, env))
    if isinstance(p, Call):
        return Call(p.name, tuple(subst_expr(a, env) for a in p.args), p.chans)
    if isinstance(p, Sum):
        return Sum(tuple(substitute(b, env) for b in p.branches))
    return p


def _rename_vars(e: Expr, env: Dict[str, str]) -> Expr:
    if isinstance(e, Var):
        return Var(env.get(e.name, e.name))
    if isinstance(e, Tup):
        return Tup(tuple(_rename_vars(i, env) for i in e.items))
    if isinstance(e, BinOp):
        return BinOp(e.op, _rename_vars(e.left, env), _rename_vars(e.right, env))
    return e


def normalize_binders(p: ProcTerm, depth: int = 0, env: Optional[Dict[str, str]] = None) -> ProcTerm:
    """
    输入绑定变量按嵌套深度重命名为 _v0, _v1, ...

    只差绑定变量名的项得到相同结果；同一路径上的绑定名两两不同，代入不会捕获。
    """
    env = env or {}
    if isinstance(p, Input):
        name = f"_v{depth}"
        return Input(p.chan, name, normalize_binders(p.cont, depth + 1, {**env, p.var: name}))
    if isinstance(p, Output):
        return Output(p.chan, _rename_vars(p.expr, env), normalize_binders(p.cont, depth, env))
    if isinstance(p, Par):
        return Par(normalize_binders(p.left, depth, env), normalize_binders(p.right, depth, env))
    if isinstance(p, Choice):
        return Choice(normalize_binders(p.left, depth, env), normalize_binders(p.right, depth, env))
    if isinstance(p, Restrict):
        return Restrict(p.chan, normalize_binders(p.body, depth, env))
    if isinstance(p, Match):
        return Match(_rename_vars(p.left, env), _rename_vars(p.right, env),
                     normalize_binders(p.body, depth, env), p.op)
    if isinstance(p, Repl):
        return Repl(normalize_binders(p.body, depth, env))
    if isinstance(p, Located):
        return Located(p.loc, normalize_binders(p.body, depth, env))
    if isinstance(p, Call):
        if not env:
            return p
        return Call(p.name, tuple(_rename_vars(a, env) for a in p.args), p.chans)
    if isinstance(p, Sum):
        return Sum(tuple(normalize_binders(b, depth, env) for b in p.branches))
    return p


def rename_channel(p: ProcTerm, old: str, new: str) -> ProcTerm:
    """通道重命名（遇到同名限制时停止）"""
    if isinstance(p, Output):
        return Output(new if p.chan == old else p.chan, p.expr, rename_channel(p.cont, old, new))
    if isinstance(p, Input):
        return Input(new if p.chan == old else p.chan, p.var, rename_channel(p.cont, old, new))
    if isinstance(p, Restrict):
        if p.chan == old:
            return p
        return Restrict(p.chan, rename_channel(p.body, old, new))
    if isinstance(p, Par):
        return Par(rename_channel(p.left, old, new), rename_channel(p.right, old, new))
    if isinstance(p, Choice):
        return Choice(rename_channel(p.left, old, new), rename_channel(p.right, old, new))
    if isinstance(p, Match):
        return Match(p.left, p.right, rename_channel(p.body, old, new), p.op)
    if isinstance(p, Repl):
        return Repl(rename_channel(p.body, old, new))
    if isinstance(p, Located):
        return Located(p.loc, rename_channel(p.body, old, new))
    if isinstance(p, Sum):
        return Sum(tuple(rename_channel(b, old, new) for b in p.branches))
    if isinstance(p, Call):
        return _rename_call(p, old, new)
    return p


def _is_source_name(name: str) -> bool:
    """源程序中可书写的名字（内部生成的限制名以 % 开头）"""
    return bool(name) and (name[0].isalpha() or name[0] == "_")


def _rename_call(p: Call, old: str, new: str) -> Call:
    """调用的通道映射：定义体中原名 -> 当前名；未映射的原名视为恒等"""
    pairs = dict(p.chans)
    out = {orig: (new if cur == old else cur) for orig, cur in pairs.items()}
    if old not in pairs and old not in pairs.values() and _is_source_name(old):
        out[old] = new
    return Call(p.name, p.args, tuple(sorted((k, v) for k, v in out.items() if k != v)))


def holes_of(p: ProcTerm) -> List[int]:
    """按出现顺序列出洞编号"""
    if isinstance(p, Hole):
        return [p.index]
    out: List[int] = []
    for c in children(p):
        out.extend(holes_of(c))
    return out


def calls_of(p: ProcTerm) -> List[Call]:
    if isinstance(p, Call):
        return [p]
    out: List[Call] = []
    for c in children(p):
        out.extend(calls_of(c))
    return out


def term_depth(p: ProcTerm) -> int:
    kids = children(p)
    return 1 + max((term_depth(c) for c in kids), default=0)


# 打印优先级：并行 < 选择 < 前缀
_PREC_PAR, _PREC_CHOICE, _PREC_PREFIX = 0, 1, 2


def _prec(p: ProcTerm) -> int:
    if isinstance(p, Par):
        return _PREC_PAR
    if isinstance(p, Choice):
        return _PREC_CHOICE
    if isinstance(p, Sum) and len(p.branches) > 1:
        return _PREC_CHOICE
    return _PREC_PREFIX


def _wrap(p: ProcTerm, need: int) -> str:
    text = show(p)
    return f"({text})" if _prec(p) < need else text


def show(p: ProcTerm) -> str:
    """打印为可被解析器读回的具体语法"""
    if isinstance(p, Inert):
        return "0"
    if isinstance(p, Output):
        payload = "" if p.expr == UNIT else show_expr(p.expr)
        return f"{p.chan}!({payload}).{_wrap(p.cont, _PREC_PREFIX)}"
    if isinstance(p, Input):
        return f"{p.chan}?({p.var}).{_wrap(p.cont, _PREC_PREFIX)}"
    if isinstance(p, Par):
        return f"{_wrap(p.left, _PREC_CHOICE)} | {_wrap(p.right, _PREC_PAR)}"
    if isinstance(p, Choice):
        return f"{_wrap(p.left, _PREC_PREFIX)} + {_wrap(p.right, _PREC_CHOICE)}"
    if isinstance(p, Restrict):
        return f"new {p.chan} . {_wrap(p.body, _PREC_PREFIX)}"
    if isinstance(p, Match):
        return f"[{show_expr(p.left)} {p.op} {show_expr(p.right)}] {_wrap(p.body, _PREC_PREFIX)}"
    if isinstance(p, Repl):
        return f"!{_wrap(p.body, _PREC_PREFIX)}"
    if isinstance(p, Call):
        if not p.args:
            return p.name
        return f"{p.name}(" + ", ".join(show_expr(a) for a in p.args) + ")"
    if isinstance(p, Located):
        return f"loc {p.loc} [ {show(p.body)} ]"
    if isinstance(p, Hole):
        return f"[]_{p.index}"
    if isinstance(p, Sum):
        return show(choice_all(list(p.branches)))
    raise TypeError(f"未知的进程项类型: {type(p).__name__}")


# ---------------------------------------------------------------------------
# 定义、上下文、barb
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcDef:
    """参数化（递归）进程定义"""
    name: str
    params: Tuple[str, ...]
    body: ProcTerm

    def show(self) -> str:
        head = self.name + (f"({', '.join(self.params)})" if self.params else "")
        return f"def {head} = {show(self.body)}"


@dataclass(frozen=True)
class ContextTerm:
    """带编号洞的进程项（多洞上下文）"""
    term: ProcTerm

    @property
    def hole_count(self) -> int:
        return len(set(holes_of(self.term)))

    def show(self) -> str:
        return show(self.term)


IDENTITY_CONTEXT = ContextTerm(Hole(1))


@dataclass(frozen=True)
class Barb:
    """可观测量：通道+值，或 err"""
    channel: Optional[str]
    value: Any = None

    @property
    def is_err(self) -> bool:
        return self.channel is None

    def sort_key(self) -> Tuple:
        if self.is_err:
            return (1, "", ())
        return (0, self.channel, value_key(self.value))

    def __str__(self) -> str:
        if self.is_err:
            return "err"
        return f"{self.channel}!{show_value(self.value)}"


ERR = Barb(None)


def sorted_barbs(barbs) -> List[Barb]:
    return sorted(barbs, key=lambda b: b.sort_key())


# ---------------------------------------------------------------------------
# 模型声明
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelDecl:
    name: str
    mediated: bool = False


@dataclass(frozen=True)
class AdversaryDecl:
    """敌手声明：种类与参数"""
    name: str
    kind: str
    params: Tuple[Tuple[str, Any], ...] = ()

    @property
    def param_dict(self) -> Dict[str, Any]:
        return dict(self.params)


@dataclass(frozen=True)
class CheckDecl:
    """检查声明：种类与 key=value 参数"""
    name: str
    kind: str
    params: Tuple[Tuple[str, Any], ...] = ()

    @property
    def param_dict(self) -> Dict[str, Any]:
        return dict(self.params)


@dataclass
class Model:
    """解析后的模型文件"""
    domain: Domain
    channels: Dict[str, ChannelDecl] = field(default_factory=dict)
    locations: List[str] = field(default_factory=list)
    defs: Dict[str, ProcDef] = field(default_factory=dict)
    systems: Dict[str, ProcTerm] = field(default_factory=dict)
    contexts: Dict[str, ContextTerm] = field(default_factory=dict)
    adversaries: Dict[str, AdversaryDecl] = field(default_factory=dict)
    checks: List[CheckDecl] = field(default_factory=list)

    def mediated_channels(self) -> List[str]:
        return [c.name for c in self.channels.values() if c.mediated]

    def system(self, name: str) -> ProcTerm:
        """按名称取系统；也接受进程定义名（无参调用）"""
        if name in self.systems:
            return self.systems[name]
        if name in self.defs and not self.defs[name].params:
            return Call(name)
        from ..utils.errors import UndeclaredName
        raise UndeclaredName(f"未声明的系统: {name}", name=name)

    def context(self, name: str) -> ContextTerm:
        if name in self.contexts:
            return self.contexts[name]
        if name in ('id', 'identity'):
            return IDENTITY_CONTEXT
        from ..utils.errors import UndeclaredName
        raise UndeclaredName(f"未声明的上下文: {name}", name=name)

    def to_text(self) -> str:
        """输出为模型文件文本"""
        lines = [self.domain.show()]
        for ch in self.channels.values():
            lines.append(f"channel {ch.name}" + (" mediated" if ch.mediated else ""))
        for loc in self.locations:
            lines.append(f"location {loc}")
        for d in self.defs.values():
            lines.append(d.show())
        for name, term in self.systems.items():
            lines.append(f"system {name} = {show(term)}")
        for name, ctx in self.contexts.items():
            lines.append(f"context {name} = {ctx.show()}")
        for adv in self.adversaries.values():
            args = ", ".join(f"{k}={_show_param(v)}" for k, v in adv.params)
            lines.append(f"adversary {adv.name} = {adv.kind}" + (f"({args})" if adv.params else ""))
        for chk in self.checks:
            args = " ".join(f"{k}={_show_param(v)}" for k, v in chk.params)
            lines.append(f"check {chk.kind} name={chk.name} {args}".rstrip())
        return "\n".join(lines) + "\n"


def _show_param(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_show_param(v) for v in value) + "]"
    if isinstance(value, (set, frozenset)):
        return "{" + ", ".join(_show_param(v) for v in sorted(value, key=str)) + "}"
    return str(value)
