#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
模型文件解析服务模块

负责把模型文件文本解析为 Model，支持：
1. 进程项的具体语法（0、ch!(e).P、ch?(x).P、P | Q、new a . P、P + Q、[e1 = e2] P、!P、Name(e,...)、loc l [ P ]、[]_i）
2. domain / channel / location / def / system / context / adversary / check 声明
3. # 行注释
4. 带行列号的语法错误，以及元数、未声明名称、非守卫递归的检查
"""

import threading
from typing import Any, Dict, List, Optional as Opt, Tuple

import networkx as nx
from arpeggio import EOF, NoMatch, Optional, ParserPython, PTNodeVisitor, ZeroOrMore, visit_parse_tree
from arpeggio import RegExMatch as _

from ..models.terms import (
    INERT, UNIT, AdversaryDecl, BinOp, Call, ChannelDecl, CheckDecl, Choice, ContextTerm, Domain,
    Hole, Inert, Input, Lit, Located, Match, Model, Output, Par, ProcDef, ProcTerm, Repl, Restrict,
    Tup, Var, children, expr_vars, free_vars, holes_of, show_value, subst_expr,
)
from ..utils.errors import (
    ArityMismatch, DuplicateDeclaration, ModelError, ParseError, UndeclaredName, UnguardedRecursion,
)
from ..utils.logger import logger

KEYWORDS = (
    "new", "loc", "def", "system", "context", "adversary", "check",
    "domain", "channel", "location", "mediated", "err",
)

# 具体语法中的标点，访问时统一过滤
_PUNCT = {"(", ")", "[", "]", "{", "}", ",", ".", "..", "=", "!", "?", "|", "+", ":"}


# ==========================================
# 语法
# ==========================================

def comment():
    return _(r'#[^\n]*')


def ident():
    return _(r'(?!(?:{})\b)[A-Za-z_][A-Za-z0-9_]*'.format("|".join(KEYWORDS)))


def param_key():
    # 检查种类与参数名可以与关键字同名（check err、system=...）
    return _(r'[A-Za-z_][A-Za-z0-9_]*')


def integer():
    return _(r'\d+')


def addop():
    return _(r'[+-]')


def cmpop():
    return _(r'!=|<=|<|=')


def unit():
    return _(r'\(\s*\)')


def tuple_expr():
    return "(", expr, ZeroOrMore(",", expr), ")"


def atom_expr():
    return [integer, unit, tuple_expr, ident]


def expr():
    return atom_expr, ZeroOrMore(addop, atom_expr)


def inert():
    return _(r'0(?![0-9])')


def hole():
    return _(r'\[\s*\]_\d+')


def payload():
    # ch!(e) 或 ch!v
    return [("(", Optional(expr), ")"), integer, ident]


def binder():
    return [("(", ident, ")"), ident]


def output():
    return ident, "!", payload, Optional(".", prefixed)


def input_():
    return ident, "?", binder, Optional(".", prefixed)


def restrict():
    return _(r'new\b'), ident, ZeroOrMore(",", ident), ".", prefixed


def match():
    return "[", expr, cmpop, expr, "]", prefixed


def repl():
    return "!", prefixed


def located():
    return _(r'loc\b'), ident, "[", proc, "]"


def call_args():
    return "(", Optional(expr, ZeroOrMore(",", expr)), ")"


def call():
    return ident, Optional(call_args)


def paren_proc():
    return "(", proc, ")"


def prefixed():
    return [inert, hole, located, restrict, match, repl, output, input_, call, paren_proc]


def choice():
    return prefixed, ZeroOrMore("+", prefixed)


def proc():
    return choice, ZeroOrMore("|", choice)


def dom_range():
    return integer, "..", integer


def dom_item():
    return [dom_range, integer, ident]


def domain_name():
    return ident, "="


def domain_decl():
    return _(r'domain\b'), Optional(domain_name), "{", dom_item, ZeroOrMore(",", dom_item), "}"


def mediated_kw():
    return _(r'mediated\b')


def channel_decl():
    return _(r'channel\b'), ident, ZeroOrMore(",", ident), Optional(mediated_kw)


def location_decl():
    return _(r'location\b'), ident, ZeroOrMore(",", ident)


def params():
    return "(", Optional(ident, ZeroOrMore(",", ident)), ")"


def def_decl():
    return _(r'def\b'), ident, Optional(params), "=", proc


def system_decl():
    return _(r'system\b'), ident, "=", proc


def context_decl():
    return _(r'context\b'), ident, "=", proc


def barb_lit():
    return [_(r'err\b'), (ident, "!", [unit, integer, ident])]


def param_list():
    return "[", Optional(param_value, ZeroOrMore(",", param_value)), "]"


def barb_set():
    return "{", Optional(barb_lit, ZeroOrMore(",", barb_lit)), "}"


def param_value():
    return [param_list, barb_set, integer, ident]


def kwarg():
    return param_key, "=", param_value


def adversary_decl():
    return _(r'adversary\b'), ident, "=", ident, Optional("(", Optional(kwarg, ZeroOrMore(",", kwarg)), ")")


def check_decl():
    return _(r'check\b'), param_key, ZeroOrMore(kwarg)


def decl():
    return [domain_decl, channel_decl, location_decl, def_decl, system_decl,
            context_decl, adversary_decl, check_decl]


def model():
    return ZeroOrMore(decl), EOF


def proc_only():
    return proc, EOF


# ==========================================
# 语法树访问器
# ==========================================

def _clean(items) -> List[Any]:
    """去掉标点与关键字字符串，保留标识符和语义对象"""
    out = []
    for c in items:
        if isinstance(c, str) and not isinstance(c, _Ident) and (c in _PUNCT or c in KEYWORDS):
            continue
        out.append(c)
    return out


class _Ident(str):
    """标识符（与关键字、标点字符串区分）"""


class _Mediated:
    pass


class _BarbSet(frozenset):
    pass


class ModelVisitor(PTNodeVisitor):
    """把语法树转换为实体对象"""

    def visit_ident(self, node, children):
        return _Ident(node.value)

    def visit_param_key(self, node, children):
        return _Ident(node.value)

    def visit_integer(self, node, children):
        return int(node.value)

    def visit_addop(self, node, children):
        return ("op", node.value)

    def visit_cmpop(self, node, children):
        return ("cmp", node.value)

    def visit_unit(self, node, children):
        return UNIT

    def visit_atom_expr(self, node, children):
        c = _clean(children)[0]
        if isinstance(c, _Ident):
            return Var(str(c))
        if isinstance(c, int):
            return Lit(c)
        return c

    def visit_tuple_expr(self, node, children):
        items = _clean(children)
        # (e) 仅为分组
        if len(items) == 1:
            return items[0]
        return Tup(tuple(items))

    def visit_expr(self, node, children):
        items = _clean(children)
        out = items[0]
        for i in range(1, len(items), 2):
            out = BinOp(items[i][1], out, items[i + 1])
        return out

    def visit_inert(self, node, children):
        return INERT

    def visit_hole(self, node, children):
        return Hole(int(node.value.split("_")[-1]))

    def visit_payload(self, node, children):
        items = _clean(children)
        if not items:
            return UNIT
        c = items[0]
        if isinstance(c, _Ident):
            return Var(str(c))
        if isinstance(c, int):
            return Lit(c)
        return c

    def visit_binder(self, node, children):
        return _clean(children)[0]

    def visit_output(self, node, children):
        items = _clean(children)
        cont = items[2] if len(items) > 2 else INERT
        return Output(str(items[0]), items[1], cont)

    def visit_input_(self, node, children):
        items = _clean(children)
        cont = items[2] if len(items) > 2 else INERT
        return Input(str(items[0]), str(items[1]), cont)

    def visit_restrict(self, node, children):
        items = _clean(children)
        body = items[-1]
        for name in reversed(items[:-1]):
            body = Restrict(str(name), body)
        return body

    def visit_match(self, node, children):
        items = _clean(children)
        return Match(items[0], items[2], items[3], items[1][1])

    def visit_repl(self, node, children):
        return Repl(_clean(children)[0])

    def visit_located(self, node, children):
        items = _clean(children)
        return Located(str(items[0]), items[1])

    def visit_call_args(self, node, children):
        return ("args", tuple(_clean(children)))

    def visit_call(self, node, children):
        items = _clean(children)
        args = items[1][1] if len(items) > 1 else ()
        return Call(str(items[0]), args)

    def visit_paren_proc(self, node, children):
        return _clean(children)[0]

    def visit_prefixed(self, node, children):
        return _clean(children)[0]

    def visit_choice(self, node, children):
        items = _clean(children)
        out = items[-1]
        for t in reversed(items[:-1]):
            out = Choice(t, out)
        return out

    def visit_proc(self, node, children):
        items = _clean(children)
        out = items[-1]
        for t in reversed(items[:-1]):
            out = Par(t, out)
        return out

    def visit_proc_only(self, node, children):
        return _clean(children)[0]

    def visit_dom_range(self, node, children):
        items = _clean(children)
        return ("range", items[0], items[1])

    def visit_dom_item(self, node, children):
        return _clean(children)[0]

    def visit_domain_name(self, node, children):
        return ("name", str(_clean(children)[0]))

    def visit_domain_decl(self, node, children):
        items = [i for i in _clean(children) if not (isinstance(i, tuple) and i[0] == "name")]
        return ("domain", items, node.position)

    def visit_mediated_kw(self, node, children):
        return _Mediated()

    def visit_channel_decl(self, node, children):
        items = _clean(children)
        mediated = any(isinstance(i, _Mediated) for i in items)
        names = [str(i) for i in items if isinstance(i, _Ident)]
        return ("channel", names, mediated, node.position)

    def visit_location_decl(self, node, children):
        return ("location", [str(i) for i in _clean(children)], node.position)

    def visit_params(self, node, children):
        return ("params", tuple(str(i) for i in _clean(children)))

    def visit_def_decl(self, node, children):
        items = _clean(children)
        name = str(items[0])
        ps = items[1][1] if len(items) > 2 else ()
        return ("def", name, ps, items[-1], node.position)

    def visit_system_decl(self, node, children):
        items = _clean(children)
        return ("system", str(items[0]), items[1], node.position)

    def visit_context_decl(self, node, children):
        items = _clean(children)
        return ("context", str(items[0]), items[1], node.position)

    def visit_barb_lit(self, node, children):
        items = _clean(children)
        if not items or items[0] == "err":
            return "err"
        value = items[1]
        if isinstance(value, Lit):
            value = value.value
        return f"{items[0]}!{show_value(value)}"

    def visit_param_list(self, node, children):
        return [self._plain(i) for i in _clean(children)]

    def visit_barb_set(self, node, children):
        return _BarbSet(_clean(children))

    def visit_param_value(self, node, children):
        return self._plain(_clean(children)[0])

    def visit_kwarg(self, node, children):
        items = _clean(children)
        return (str(items[0]), self._plain(items[1]) if len(items) > 1 else None)

    def visit_adversary_decl(self, node, children):
        items = _clean(children)
        return ("adversary", str(items[0]), str(items[1]), tuple(items[2:]), node.position)

    def visit_check_decl(self, node, children):
        items = _clean(children)
        return ("check", str(items[0]), tuple(items[1:]), node.position)

    def visit_decl(self, node, children):
        return _clean(children)[0]

    def visit_model(self, node, children):
        return [c for c in children if isinstance(c, tuple)]

    @staticmethod
    def _plain(value):
        if isinstance(value, _Ident):
            return str(value)
        if isinstance(value, _BarbSet):
            return frozenset(value)
        return value


# ==========================================
# 解析器实例（arpeggio 解析器不可重入，加锁复用）
# ==========================================

_PARSERS: Dict[str, ParserPython] = {}
_PARSER_LOCK = threading.Lock()


def _get_parser(root) -> ParserPython:
    key = root.__name__
    if key not in _PARSERS:
        _PARSERS[key] = ParserPython(root, comment_def=comment, ws='\t\n\r ')
    return _PARSERS[key]


def _parse(root, text: str):
    with _PARSER_LOCK:
        parser = _get_parser(root)
        try:
            tree = parser.parse(text)
        except NoMatch as e:
            line, col = _line_col(e, parser)
            expected = ", ".join(sorted({str(r.name) for r in getattr(e, "rules", [])}))[:120]
            raise ParseError(f"语法错误，期望: {expected}" if expected else "语法错误", line=line, col=col)
        return parser, tree


def _line_col(e: NoMatch, parser: ParserPython) -> Tuple[int, int]:
    try:
        return parser.pos_to_linecol(e.position)
    except Exception:
        return getattr(e, "line", None), getattr(e, "col", None)


def parse_term(text: str, constants: Tuple[str, ...] = ()) -> ProcTerm:
    """
    解析单个进程项（或上下文项）

    Args:
        text: 进程项文本
        constants: 作为具名常量解析的标识符

    Returns:
        进程项
    """
    _, tree = _parse(proc_only, text)
    with _PARSER_LOCK:
        term = visit_parse_tree(tree, ModelVisitor())
    return resolve_constants(term, frozenset(constants))


# ==========================================
# 构建与校验
# ==========================================

def resolve_constants(p: ProcTerm, constants, bound=frozenset()) -> ProcTerm:
    """把未绑定且属于具名常量的变量替换为字面值"""
    env = {c: c for c in constants if c not in bound}
    return _resolve(p, env)


def _resolve(p: ProcTerm, env: Dict[str, str]) -> ProcTerm:
    if isinstance(p, Input):
        inner = {k: v for k, v in env.items() if k != p.var}
        return Input(p.chan, p.var, _resolve(p.cont, inner))
    if isinstance(p, Output):
        return Output(p.chan, subst_expr(p.expr, env), _resolve(p.cont, env))
    if isinstance(p, Match):
        return Match(subst_expr(p.left, env), subst_expr(p.right, env), _resolve(p.body, env), p.op)
    if isinstance(p, Call):
        return Call(p.name, tuple(subst_expr(a, env) for a in p.args))
    if isinstance(p, Par):
        return Par(_resolve(p.left, env), _resolve(p.right, env))
    if isinstance(p, Choice):
        return Choice(_resolve(p.left, env), _resolve(p.right, env))
    if isinstance(p, Restrict):
        return Restrict(p.chan, _resolve(p.body, env))
    if isinstance(p, Repl):
        return Repl(_resolve(p.body, env))
    if isinstance(p, Located):
        return Located(p.loc, _resolve(p.body, env))
    return p


def _collect_value_idents(p: ProcTerm, bound: frozenset, out: set) -> None:
    """收集值位置上的自由标识符（用于推断值域）"""
    if isinstance(p, Input):
        _collect_value_idents(p.cont, bound | {p.var}, out)
        return
    if isinstance(p, Output):
        out.update(expr_vars(p.expr) - bound)
    elif isinstance(p, Match):
        out.update((expr_vars(p.left) | expr_vars(p.right)) - bound)
    elif isinstance(p, Call):
        for a in p.args:
            out.update(expr_vars(a) - bound)
    for c in children(p):
        _collect_value_idents(c, bound, out)


def _collect_ints(p: ProcTerm, out: set) -> None:
    def walk_expr(e):
        if isinstance(e, Lit) and isinstance(e.value, int) and not isinstance(e.value, bool):
            out.add(e.value)
        elif isinstance(e, Tup):
            for i in e.items:
                walk_expr(i)
        elif isinstance(e, BinOp):
            walk_expr(e.left)
            walk_expr(e.right)
    if isinstance(p, Output):
        walk_expr(p.expr)
    elif isinstance(p, Match):
        walk_expr(p.left)
        walk_expr(p.right)
    elif isinstance(p, Call):
        for a in p.args:
            walk_expr(a)
    for c in children(p):
        _collect_ints(c, out)


def _build_domain(items: List[Any]) -> Domain:
    low, high, has_ints = None, None, False
    constants: List[str] = []
    for item in items:
        if isinstance(item, tuple) and item and item[0] == "range":
            lo, hi = item[1], item[2]
            if lo > hi:
                raise ModelError(f"值域区间为空: {lo}..{hi}")
            low = lo if low is None else min(low, lo)
            high = hi if high is None else max(high, hi)
            has_ints = True
        elif isinstance(item, int):
            low = item if low is None else min(low, item)
            high = item if high is None else max(high, item)
            has_ints = True
        else:
            name = str(item)
            if name not in constants:
                constants.append(name)
    return Domain(low or 0, high or 0, tuple(constants), has_ints)


def parse_model(text: str) -> Model:
    """
    解析模型文件

    Args:
        text: 模型文件文本（UTF-8）

    Returns:
        校验后的模型

    Raises:
        ParseError: 语法错误（带行列号）
        ArityMismatch: 调用参数个数与定义不符
        UndeclaredName: 引用了未声明的名称
        UnguardedRecursion: 存在非守卫递归
    """
    parser, tree = _parse(model, text)
    with _PARSER_LOCK:
        decls = visit_parse_tree(tree, ModelVisitor())
    return _build_model(decls, parser)


def _pos(parser, position) -> Dict[str, int]:
    try:
        line, col = parser.pos_to_linecol(position)
        return {"line": line, "col": col}
    except Exception:
        return {}


def _build_model(decls: List[tuple], parser) -> Model:
    domain_items: Opt[List[Any]] = None
    channels: Dict[str, ChannelDecl] = {}
    locations: List[str] = []
    raw_defs: Dict[str, Tuple[Tuple[str, ...], ProcTerm]] = {}
    raw_systems: Dict[str, ProcTerm] = {}
    raw_contexts: Dict[str, ProcTerm] = {}
    adversaries: Dict[str, AdversaryDecl] = {}
    checks: List[CheckDecl] = []

    def dup(kind, name, position):
        raise DuplicateDeclaration(f"重复声明的{kind}: {name}", name=name, **_pos(parser, position))

    for d in decls:
        tag = d[0]
        if tag == "domain":
            if domain_items is not None:
                raise DuplicateDeclaration("值域只能声明一次", **_pos(parser, d[2]))
            domain_items = d[1]
        elif tag == "channel":
            for name in d[1]:
                channels[name] = ChannelDecl(name, d[2])
        elif tag == "location":
            for name in d[1]:
                if name not in locations:
                    locations.append(name)
        elif tag == "def":
            if d[1] in raw_defs:
                dup("定义", d[1], d[4])
            raw_defs[d[1]] = (d[2], d[3])
        elif tag == "system":
            if d[1] in raw_systems:
                dup("系统", d[1], d[3])
            raw_systems[d[1]] = d[2]
        elif tag == "context":
            if d[1] in raw_contexts:
                dup("上下文", d[1], d[3])
            raw_contexts[d[1]] = d[2]
        elif tag == "adversary":
            if d[1] in adversaries:
                dup("敌手", d[1], d[4])
            adversaries[d[1]] = AdversaryDecl(d[1], d[2], tuple(d[3]))
        elif tag == "check":
            params_ = dict(d[2])
            name = str(params_.pop("name", f"{d[1]}#{len(checks) + 1}"))
            checks.append(CheckDecl(name, d[1], tuple(params_.items())))

    all_terms = [body for _, body in raw_defs.values()] + list(raw_systems.values()) + list(raw_contexts.values())
    if domain_items is None:
        domain = _infer_domain(raw_defs, raw_systems, raw_contexts, all_terms)
        logger.debug(f"No domain declared, inferred {domain.show()}")
    else:
        domain = _build_domain(domain_items)

    consts = frozenset(domain.constants)
    defs = {
        name: ProcDef(name, ps, resolve_constants(body, consts, frozenset(ps)))
        for name, (ps, body) in raw_defs.items()
    }
    systems = {name: resolve_constants(t, consts) for name, t in raw_systems.items()}
    contexts = {name: ContextTerm(resolve_constants(t, consts)) for name, t in raw_contexts.items()}

    result = Model(domain, channels, locations, defs, systems, contexts, adversaries, checks)
    validate_model(result)
    logger.debug(f"Parsed model: {len(defs)} defs, {len(systems)} systems, "
                 f"{len(contexts)} contexts, {len(adversaries)} adversaries, {len(checks)} checks")
    return result


def _infer_domain(raw_defs, raw_systems, raw_contexts, all_terms) -> Domain:
    idents: set = set()
    for ps, body in raw_defs.values():
        _collect_value_idents(body, frozenset(ps), idents)
    for t in list(raw_systems.values()) + list(raw_contexts.values()):
        _collect_value_idents(t, frozenset(), idents)
    ints: set = set()
    for t in all_terms:
        _collect_ints(t, ints)
    return Domain(min(ints, default=0), max(ints, default=0), tuple(sorted(idents)), True)


def validate_model(m: Model) -> None:
    """
    校验模型的静态不变量

    Raises:
        UndeclaredName / ArityMismatch / UnguardedRecursion / ModelError
    """
    for d in m.defs.values():
        _check_term(m, d.body, f"def {d.name}", allowed_vars=frozenset(d.params), allow_holes=False)
    for name, t in m.systems.items():
        _check_term(m, t, f"system {name}", frozenset(), allow_holes=False)
    for name, c in m.contexts.items():
        _check_term(m, c.term, f"context {name}", frozenset(), allow_holes=True)
        indices = sorted(set(holes_of(c.term)))
        if indices != list(range(1, len(indices) + 1)):
            raise ModelError(f"上下文 {name} 的洞编号必须从 1 连续编号: {indices}")
    _check_guarded(m)
    _check_references(m)


def _check_term(m: Model, p: ProcTerm, where: str, allowed_vars: frozenset, allow_holes: bool,
                under_prefix: bool = False) -> None:
    fv = free_vars(p) - allowed_vars
    if fv:
        raise UndeclaredName(f"{where} 中存在未绑定的名称: {sorted(fv)}", names=sorted(fv))
    _walk_term(m, p, where, allow_holes, under_prefix)


def _walk_term(m: Model, p: ProcTerm, where: str, allow_holes: bool, under_prefix: bool) -> None:
    if isinstance(p, Call):
        if p.name not in m.defs:
            raise UndeclaredName(f"{where} 调用了未声明的进程: {p.name}", name=p.name)
        if len(p.args) != len(m.defs[p.name].params):
            raise ArityMismatch(
                f"{where} 调用 {p.name} 的参数个数为 {len(p.args)}，定义需要 {len(m.defs[p.name].params)}",
                name=p.name)
        return
    if isinstance(p, Hole) and not allow_holes:
        raise ModelError(f"{where} 中不允许出现洞 []_{p.index}")
    if isinstance(p, Located) and under_prefix:
        raise ModelError(f"{where} 中位置 {p.loc} 出现在前缀之下")
    if isinstance(p, Located) and m.locations and p.loc not in m.locations:
        raise UndeclaredName(f"{where} 使用了未声明的位置: {p.loc}", name=p.loc)
    nested = under_prefix or isinstance(p, (Output, Input))
    for c in children(p):
        _walk_term(m, c, where, allow_holes, nested)


def _unguarded_calls(p: ProcTerm, via_choice_only: bool = True) -> List[Tuple[str, bool]]:
    """非守卫位置上的调用，以及路径是否只经过选择/匹配"""
    if isinstance(p, Call):
        return [(p.name, via_choice_only)]
    if isinstance(p, (Output, Input, Inert, Hole)):
        return []
    if isinstance(p, (Choice, Match)):
        out = []
        for c in children(p):
            out.extend(_unguarded_calls(c, via_choice_only))
        return out
    out = []
    for c in children(p):
        out.extend(_unguarded_calls(c, False))
    return out


def _check_guarded(m: Model) -> None:
    graph = nx.DiGraph()
    graph.add_nodes_from(m.defs)
    for d in m.defs.values():
        for callee, choice_only in _unguarded_calls(d.body):
            strict = graph.get_edge_data(d.name, callee, {}).get("strict", False) or not choice_only
            graph.add_edge(d.name, callee, strict=strict)
    for scc in nx.strongly_connected_components(graph):
        sub = graph.subgraph(scc)
        if sub.number_of_edges() == 0:
            continue
        if any(data["strict"] for _, _, data in sub.edges(data=True)):
            raise UnguardedRecursion(f"非守卫递归: {sorted(scc)}", names=sorted(scc))


def _check_references(m: Model) -> None:
    for adv in m.adversaries.values():
        for name in _as_list(adv.param_dict.get("locs")):
            if m.locations and name not in m.locations:
                raise UndeclaredName(f"敌手 {adv.name} 引用了未声明的位置: {name}", name=name)
    for chk in m.checks:
        p = chk.param_dict
        for key in ("system", "left", "right", "core"):
            if key in p:
                m.system(str(p[key]))
        if "context" in p:
            m.context(str(p["context"]))
        for key in ("adversary", "left_adversary", "right_adversary"):
            if key in p and p[key] not in m.adversaries and p[key] != "benign":
                raise UndeclaredName(f"检查 {chk.name} 引用了未声明的敌手: {p[key]}", name=p[key])


def _as_list(value) -> List[str]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [str(value)]


"""
使用示例：

1. 解析模型文件:
from src.services.parser import parse_model

m = parse_model('''
domain { 0..1, v }
channel a, d1
def OTP = a!(v).0
def BC(i) = a?(x).d1!(x).0
system Sys1 = new a . (BC(1) | OTP)
''')

2. 解析单个进程项:
from src.services.parser import parse_term

p = parse_term("a!(v).0 | a?(x).d!(x).0", constants=("v",))
"""
