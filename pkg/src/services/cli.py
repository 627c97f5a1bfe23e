#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
命令行服务模块

解析模型文件并运行检查，支持：
1. parse / barbs / bisim / cover / resilience 单项命令
2. check：并发运行模型文件中声明的全部检查
3. gen：生成案例模型文件
4. selftest：判定器与显式对照的一致性套件
5. 每个检查一行 JSON 报告写到标准输出，汇总与耗时写到标准错误

退出码：0 全部通过，1 存在失败，2 存在不确定，3 用法或模型错误。
"""

import argparse
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from config.settings import Settings, get_settings

from .. import __version__
from ..models.reports import FAIL, INCONCLUSIVE, PASS, BisimResult, RunReport, Verdict
from ..models.terms import CheckDecl, Model
from ..utils.errors import BadParams, ResilchkError
from ..utils.file import FileHandler
from ..utils.logger import default_logger, logger
from .adversary import couple, resolve_adversary
from .casestudies import (
    GENERATORS, TransmissionCounters, transmission_queries,
)
from .parser import parse_model
from .resilience import (
    ENGINES, EXPLICIT, barb_cover, check_resilience, err_check, explicit_weak_barbed_bisim,
    replay_bisim_evidence, stuck_check, system_weak_barbs,
)
from .semantics import plug_all
from .wsts import (
    counter_oracle_agreement, covering, explore, validate_pred_basis,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

CHECK_KINDS = ('barbs', 'bisim', 'err', 'stuck', 'resilience', 'cover')


def exit_code(reports: Iterable[RunReport]) -> int:
    """失败优先于不确定"""
    verdicts = {r.verdict for r in reports}
    if FAIL in verdicts:
        return EXIT_FAIL
    if INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _judge(holds: Optional[bool], expect: Optional[str], positive: str, negative: str,
           default: bool) -> str:
    """
    把判定结果与期望比较

    Args:
        holds: 判定结果，None 为不确定
        expect: 期望值文本，None 时使用 default
        positive: 表示 holds 为真的期望值
        negative: 表示 holds 为假的期望值
        default: 没有期望时视为通过的结果
    """
    if expect is None:
        wanted = default
    elif expect == positive:
        wanted = True
    elif expect == negative:
        wanted = False
    else:
        raise BadParams(f"期望值必须是 {positive} 或 {negative}: {expect}", expect=expect)
    if holds is None:
        return INCONCLUSIVE
    return PASS if holds == wanted else FAIL


def _as_barb_set(value: Any) -> Optional[frozenset]:
    if value is None:
        return None
    if isinstance(value, (set, frozenset, list, tuple)):
        return frozenset(str(v) for v in value)
    return frozenset([str(value)])


def _buffer(params: Dict[str, Any]) -> Tuple[bool, Optional[int]]:
    """buffer=N 同时打开值域截断"""
    value = params.get('buffer')
    if value is None:
        return False, None
    return True, int(value)


def _opt_int(params: Dict[str, Any], key: str) -> Optional[int]:
    value = params.get(key)
    return None if value is None else int(value)


class CheckRunner:
    """在一个模型上运行检查并生成报告"""

    def __init__(self, model: Model, settings: Optional[Settings] = None, cap: Optional[int] = None):
        """
        初始化检查服务

        Args:
            model: 已解析的模型
            settings: 运行配置，缺省取全局配置
            cap: 状态数/迭代上限，None 时由各判定器取配置
        """
        self.model = model
        self.settings = settings or get_settings()
        self.cap = cap

    def run_all(self, checks: Optional[Sequence[CheckDecl]] = None) -> List[RunReport]:
        """
        并发运行检查，报告按声明顺序返回

        Args:
            checks: 检查声明，缺省为模型中的全部声明

        Returns:
            报告列表
        """
        checks = list(self.model.checks if checks is None else checks)
        if not checks:
            return []
        logger.info(f"Running {len(checks)} checks with {self.settings.max_workers} workers")
        with ThreadPoolExecutor(max_workers=self.settings.max_workers) as executor:
            return list(executor.map(self.run_check, checks))

    def run_check(self, decl: CheckDecl) -> RunReport:
        """
        运行单个检查；判定预算类错误记为不确定

        Raises:
            ResilchkError: 模型或参数错误
        """
        if decl.kind not in CHECK_KINDS:
            raise BadParams(f"未知的检查种类: {decl.kind}", check=decl.name, kind=decl.kind)
        handler = getattr(self, f"_check_{decl.kind}")
        started = time.perf_counter()
        try:
            report = handler(decl.name, decl.param_dict)
        except ResilchkError as e:
            if e.exit_code != EXIT_INCONCLUSIVE:
                logger.error(f"Failed to run check {decl.name}: {str(e)}")
                raise
            logger.warning(f"Check {decl.name} is inconclusive: {str(e)}")
            report = RunReport(check=decl.name, verdict=INCONCLUSIVE, kind=decl.kind, evidence=e.to_dict())
        logger.info(f"Check {decl.name}: {report.verdict} in {time.perf_counter() - started:.2f}s")
        return report

    # ------------------------------------------------------------------
    # 各类检查
    # ------------------------------------------------------------------

    def _check_barbs(self, name: str, params: Dict[str, Any]) -> RunReport:
        truncate, buffer_cap = _buffer(params)
        depth = _opt_int(params, 'depth')
        depth = self.settings.default_depth if depth is None else depth
        adv = resolve_adversary(self.model, params.get('adversary'))
        barbs, saturated = system_weak_barbs(self.model, self.model.system(params['system']), adv,
                                             depth=depth, cap=self.cap, truncate=truncate,
                                             buffer_cap=buffer_cap)
        observed = frozenset(str(b) for b in barbs)
        expect = _as_barb_set(params.get('expect'))
        if expect is None:
            verdict = PASS
        elif observed == expect and saturated:
            verdict = PASS
        elif not observed <= expect:
            # 弱 barb 集合只会随深度增大
            verdict = FAIL
        else:
            verdict = FAIL if saturated else INCONCLUSIVE
        return RunReport(
            check=name, verdict=verdict, kind='barbs',
            expected=None if expect is None else "{" + ", ".join(sorted(expect)) + "}",
            evidence={'weak_barbs': sorted(observed), 'saturated': saturated},
            stats={'depth': depth},
        )

    def _check_bisim(self, name: str, params: Dict[str, Any]) -> RunReport:
        engine = params.get('engine', EXPLICIT)
        if engine != EXPLICIT:
            raise BadParams(f"双模拟只支持 explicit 引擎: {engine}", engine=engine)
        truncate, buffer_cap = _buffer(params)
        sides = []
        for side in ('left', 'right'):
            adv = resolve_adversary(self.model, params.get(f"{side}_adversary"))
            sides.append(couple(self.model, self.model.system(params[side]), adv,
                                truncate=truncate, buffer_cap=buffer_cap))
        result = explicit_weak_barbed_bisim(sides[0], sides[1], self.cap)
        evidence = result.to_dict()
        stats = evidence.pop('stats')
        if result.equivalent is False:
            evidence['replayed'] = replay_bisim_evidence(sides[0], sides[1], result, self.cap)
        stats['truncated'] = sum(cs.truncated + cs.sem.stats.get('pruned', 0) for cs in sides)
        return RunReport(
            check=name, kind='bisim', engine=EXPLICIT, expected=params.get('expect'),
            verdict=_judge(result.equivalent, params.get('expect'), 'equivalent', 'inequivalent', True),
            evidence=evidence, stats=stats,
        )

    def _check_err(self, name: str, params: Dict[str, Any]) -> RunReport:
        truncate, buffer_cap = _buffer(params)
        engine = params.get('engine', EXPLICIT)
        term = self.model.system(params['system'])
        adv = resolve_adversary(self.model, params.get('adversary'))
        v = err_check(self.model, term, adv, engine=engine, cap=self.cap, truncate=truncate, buffer_cap=buffer_cap)
        cs = couple(self.model, term, adv, truncate=truncate, buffer_cap=buffer_cap)
        return self._reach_report(name, 'err', engine, v, cs, params.get('expect'))

    def _check_stuck(self, name: str, params: Dict[str, Any]) -> RunReport:
        truncate, buffer_cap = _buffer(params)
        term = self.model.system(params['system'])
        adv = resolve_adversary(self.model, params.get('adversary'))
        v = stuck_check(self.model, term, adv, cap=self.cap, truncate=truncate, buffer_cap=buffer_cap)
        cs = couple(self.model, term, adv, truncate=truncate, buffer_cap=buffer_cap)
        return self._reach_report(name, 'stuck', EXPLICIT, v, cs, params.get('expect'))

    def _check_cover(self, name: str, params: Dict[str, Any]) -> RunReport:
        instance = str(params['instance'])
        target = str(params['target'])
        expect = params.get('expect')
        if instance.startswith('transmission'):
            k = int(instance.partition(':')[2] or 2)
            queries = transmission_queries(k)
            if target not in queries:
                raise BadParams(f"未知的覆盖查询: {target}，可选: {', '.join(sorted(queries))}", target=target)
            tc = TransmissionCounters(k)
            w = tc.instance()
            v = covering(w, w.initial, queries[target], self.cap)
            data = v.to_dict(w.show)
            if v.answer:
                data['replayed'] = v.witness.replays(w.successors)
            return self._report_from(name, 'cover', 'wsts', v.answer, data, expect, 'reachable', 'unreachable', True)
        system, _, adversary = instance.partition('@')
        truncate, buffer_cap = _buffer(params)
        adv = resolve_adversary(self.model, adversary or None)
        v, cs = barb_cover(self.model, self.model.system(system), adv, target, self.cap,
                           truncate=truncate, buffer_cap=buffer_cap)
        data = v.to_dict(cs.show)
        if v.answer:
            data['replayed'] = v.witness.replays(cs.successors)
        return self._report_from(name, 'cover', 'wsts', v.answer, data, expect, 'reachable', 'unreachable', True)

    def _check_resilience(self, name: str, params: Dict[str, Any]) -> RunReport:
        engine = params.get('engine', EXPLICIT)
        if engine not in ENGINES:
            raise BadParams(f"未知的判定引擎: {engine}", engine=engine)
        truncate, buffer_cap = _buffer(params)
        q = self.model.system(params['core'])
        c = self.model.context(params.get('context', 'id'))
        adv = resolve_adversary(self.model, params.get('adversary'))
        samples = _opt_int(params, 'samples')
        verdict, _ = check_resilience(
            self.model, q, c, adv, engine=engine, depth=_opt_int(params, 'depth'), cap=self.cap,
            truncate=truncate, buffer_cap=buffer_cap,
            samples=self.settings.samples if samples is None else samples,
            rng=random.Random(self.settings.seed),
        )
        system = couple(self.model, plug_all(c, q), adv, truncate=truncate, buffer_cap=buffer_cap)
        data = verdict.to_dict(system.show)
        if verdict.answer is False:
            data['replayed'] = self._replay_resilience(verdict, q, system)
        return self._report_from(name, 'resilience', engine, verdict.answer, data,
                                 params.get('expect'), PASS, FAIL, True)

    def _replay_resilience(self, verdict: Verdict, q, system) -> Optional[bool]:
        if verdict.witness is not None:
            return verdict.witness.replays(system.successors)
        bisim = verdict.evidence.get('bisim')
        if not bisim:
            return None
        core = couple(self.model, q, resolve_adversary(self.model, None))
        return replay_bisim_evidence(core, system, BisimResult(**bisim), self.cap)

    # ------------------------------------------------------------------
    # 报告
    # ------------------------------------------------------------------

    def _reach_report(self, name: str, kind: str, engine: str, v: Verdict, cs, expect: Optional[str]) -> RunReport:
        data = v.to_dict(cs.show)
        if v.answer:
            data['replayed'] = v.witness.replays(cs.successors)
        # 没有期望时不可达为通过
        return self._report_from(name, kind, engine, v.answer, data, expect, 'reachable', 'unreachable', False)

    @staticmethod
    def _report_from(name: str, kind: str, engine: str, holds: Optional[bool], data: Dict[str, Any],
                     expect: Optional[str], positive: str, negative: str, default: bool) -> RunReport:
        stats = data.pop('stats', {})
        data.pop('answer', None)
        return RunReport(
            check=name, kind=kind, engine=engine, expected=expect,
            verdict=_judge(holds, expect, positive, negative, default),
            evidence=data, stats=stats,
        )


# ----------------------------------------------------------------------
# 自检套件
# ----------------------------------------------------------------------

def run_selftest(settings: Settings, count: int = 200, bound: int = 12) -> List[RunReport]:
    """
    判定器与显式对照的一致性套件

    Args:
        settings: 运行配置（seed）
        count: 随机计数器系统个数
        bound: 显式对照的计数值上界

    Returns:
        每个套件一行报告
    """
    rng = random.Random(settings.seed)
    reports = []
    for suite, subcover in (('counter_covering', False), ('counter_subcovering', True)):
        stats = counter_oracle_agreement(rng, count, bound, subcover=subcover)
        verdict = PASS if not stats['disagreements'] and not stats['unreplayed'] else FAIL
        if verdict == PASS and stats['inconclusive']:
            verdict = INCONCLUSIVE
        reports.append(RunReport(check=suite, verdict=verdict, kind='selftest', engine='wsts',
                                 evidence={'disagreements': stats.pop('disagreements')[:10],
                                           'beyond_bound': stats.pop('beyond_bound')[:10]}, stats=stats))

    tc = TransmissionCounters(2)
    w = tc.instance()
    mismatches = []
    for query, target in sorted(transmission_queries(2).items()):
        v = covering(w, w.initial, target)
        oracle = tc.explicit_cover(target, 4)
        replayed = v.witness.replays(w.successors) if v.answer else True
        if v.answer != oracle or not replayed:
            mismatches.append({'query': query, 'decider': v.answer, 'oracle': oracle, 'replayed': replayed})
    reports.append(RunReport(check='transmission_queries', verdict=FAIL if mismatches else PASS,
                             kind='selftest', engine='wsts', evidence={'mismatches': mismatches},
                             stats={'queries': len(transmission_queries(2))}))

    issues = validate_pred_basis(w, explore(w, 300))
    reports.append(RunReport(check='transmission_pred_basis', verdict=FAIL if issues else PASS,
                             kind='selftest', engine='wsts', evidence={'issues': issues[:10]},
                             stats={'issues': len(issues)}))
    return reports


# ----------------------------------------------------------------------
# 命令行
# ----------------------------------------------------------------------

class _ArgumentParser(argparse.ArgumentParser):
    """用法错误抛出异常，由 main 映射为退出码 3"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise BadParams(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='resilchk', description='Resilience checks for located process models')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--seed', type=int, default=None, help='seed for randomized validation sampling')
    parser.add_argument('--log-level', default=None, help='console log level (default WARNING)')
    parser.add_argument('--workers', type=int, default=None, help='threads for concurrent checks')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('parse', help='validate a model file')
    p.add_argument('file')

    p = sub.add_parser('check', help='run every check declared in a model file')
    p.add_argument('file')
    p.add_argument('--only', nargs='+', default=None, help='run only the named checks')
    p.add_argument('--cap', type=int, default=None)

    p = sub.add_parser('barbs', help='weak barbs of a system')
    p.add_argument('file')
    p.add_argument('--system', required=True)
    p.add_argument('--adversary', default=None)
    p.add_argument('--depth', type=int, default=None)
    p.add_argument('--expect', nargs='*', default=None, help='expected barbs, e.g. d1!v')
    p.add_argument('--buffer', type=int, default=None)
    p.add_argument('--cap', type=int, default=None)

    p = sub.add_parser('bisim', help='weak barbed bisimilarity of two coupled systems')
    p.add_argument('file')
    p.add_argument('--left', required=True)
    p.add_argument('--right', required=True)
    p.add_argument('--left-adversary', default=None)
    p.add_argument('--right-adversary', default=None)
    p.add_argument('--engine', choices=[EXPLICIT], default=EXPLICIT)
    p.add_argument('--expect', choices=['equivalent', 'inequivalent'], default=None)
    p.add_argument('--buffer', type=int, default=None)
    p.add_argument('--cap', type=int, default=None)

    p = sub.add_parser('cover', help='covering query on a coupled system or the transmission packaging')
    p.add_argument('file')
    p.add_argument('--instance', required=True, help='SYSTEM[@ADVERSARY] or transmission[:K]')
    p.add_argument('--target', required=True, help='barb such as err or d1!v, or a transmission query name')
    p.add_argument('--expect', choices=['reachable', 'unreachable'], default=None)
    p.add_argument('--buffer', type=int, default=None)
    p.add_argument('--cap', type=int, default=None)

    p = sub.add_parser('resilience', help='is the core resilient inside the context under the adversary')
    p.add_argument('file')
    p.add_argument('--core', required=True)
    p.add_argument('--context', default='id')
    p.add_argument('--adversary', required=True)
    p.add_argument('--engine', choices=list(ENGINES), default=EXPLICIT)
    p.add_argument('--expect', choices=[PASS, FAIL], default=None)
    p.add_argument('--depth', type=int, default=None)
    p.add_argument('--samples', type=int, default=None)
    p.add_argument('--buffer', type=int, default=None)
    p.add_argument('--cap', type=int, default=None)

    p = sub.add_parser('gen', help='emit a case-study model file')
    gen = p.add_subparsers(dest='casestudy', required=True)
    g = gen.add_parser('sidechannel')
    g.add_argument('--n', type=int, default=3)
    g.add_argument('--n1', type=int, default=5)
    g.add_argument('--nested', action='store_true')
    g.add_argument('-o', '--output', default=None)
    g = gen.add_parser('repserver')
    g.add_argument('--clients', type=int, default=2)
    g.add_argument('--replicas', type=int, default=2)
    g.add_argument('--maxfail', type=int, default=1)
    g.add_argument('--persistent', action='store_true')
    g.add_argument('-o', '--output', default=None)
    g = gen.add_parser('transmission')
    g.add_argument('--k', type=int, default=2)
    g.add_argument('--pmax', type=int, default=3)
    g.add_argument('-o', '--output', default=None)

    p = sub.add_parser('selftest', help='decider against explicit-oracle agreement suites')
    p.add_argument('--count', type=int, default=200)
    p.add_argument('--bound', type=int, default=12)
    return parser


def _adhoc_check(args: argparse.Namespace) -> CheckDecl:
    """把单项命令的参数转换为检查声明"""
    command = args.command
    if command == 'barbs':
        params = {'system': args.system, 'adversary': args.adversary, 'depth': args.depth,
                  'expect': None if args.expect is None else frozenset(args.expect)}
    elif command == 'bisim':
        params = {'left': args.left, 'right': args.right, 'left_adversary': args.left_adversary,
                  'right_adversary': args.right_adversary, 'engine': args.engine, 'expect': args.expect}
    elif command == 'cover':
        params = {'instance': args.instance, 'target': args.target, 'expect': args.expect}
    else:
        params = {'core': args.core, 'context': args.context, 'adversary': args.adversary,
                  'engine': args.engine, 'expect': args.expect, 'depth': args.depth, 'samples': args.samples}
    params['buffer'] = args.buffer
    params = {k: v for k, v in params.items() if v is not None}
    return CheckDecl(name=command, kind=command, params=tuple(sorted(params.items())))


def _load(path: str) -> Model:
    return parse_model(FileHandler.read_text(path))


def _generate(args: argparse.Namespace) -> str:
    if args.casestudy == 'sidechannel':
        text = GENERATORS['sidechannel'](args.n, args.n1, nested=args.nested)
    elif args.casestudy == 'repserver':
        text = GENERATORS['repserver'](args.clients, args.replicas, args.maxfail, persistent=args.persistent)
    else:
        text = GENERATORS['transmission'](args.k, args.pmax)
    parse_model(text)
    return text


def _configure_logging(args: argparse.Namespace, settings: Settings):
    level = args.log_level or ('WARNING' if settings.log_level == 'INFO' else settings.log_level)
    default_logger.reconfigure(console_level=level, log_dir=settings.log_dir if settings.log_file else '')


def _emit(reports: Sequence[RunReport]):
    for r in reports:
        sys.stdout.write(FileHandler.dumps_line(r.to_line()) + "\n")
    sys.stdout.flush()


def _summary(reports: Sequence[RunReport], elapsed: float) -> str:
    counts = {v: sum(1 for r in reports if r.verdict == v) for v in (PASS, FAIL, INCONCLUSIVE)}
    return (f"{len(reports)} checks: {counts[PASS]} pass, {counts[FAIL]} fail, "
            f"{counts[INCONCLUSIVE]} inconclusive ({elapsed:.2f}s)")


def run(args: argparse.Namespace, settings: Settings) -> List[RunReport]:
    """
    执行一个已解析的命令

    Returns:
        报告列表（gen 为空）
    """
    command = args.command
    if command == 'gen':
        text = _generate(args)
        if args.output:
            FileHandler.write_text(args.output, text)
            logger.info(f"Wrote {args.casestudy} model to {args.output}")
        else:
            sys.stdout.write(text)
        return []
    if command == 'selftest':
        return run_selftest(settings, count=args.count, bound=args.bound)

    model = _load(args.file)
    if command == 'parse':
        return [RunReport(check='parse', verdict=PASS, kind='parse', stats={
            'defs': len(model.defs), 'systems': len(model.systems), 'contexts': len(model.contexts),
            'adversaries': len(model.adversaries), 'checks': len(model.checks),
        })]
    runner = CheckRunner(model, settings, cap=args.cap)
    if command == 'check':
        checks = model.checks
        if args.only:
            missing = set(args.only) - {c.name for c in checks}
            if missing:
                raise BadParams(f"未声明的检查: {', '.join(sorted(missing))}")
            checks = [c for c in checks if c.name in args.only]
        return runner.run_all(checks)
    return [runner.run_check(_adhoc_check(args))]


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行入口

    Args:
        argv: 参数列表，缺省取 sys.argv

    Returns:
        退出码
    """
    started = time.perf_counter()
    args = None
    try:
        args = build_parser().parse_args(argv)
        settings = get_settings().merged(seed=args.seed, max_workers=args.workers)
        _configure_logging(args, settings)
        reports = run(args, settings)
    except SystemExit as e:
        return int(e.code or 0)
    except ResilchkError as e:
        location = getattr(args, 'file', None)
        prefix = f"{location}:" if location else ""
        sys.stderr.write(f"resilchk: {prefix}{str(e)}\n")
        sys.stderr.write(FileHandler.dumps_line(e.to_dict()) + "\n")
        return e.exit_code
    except (OSError, ValueError) as e:
        sys.stderr.write(f"resilchk: {str(e)}\n")
        return EXIT_USAGE
    _emit(reports)
    if reports:
        sys.stderr.write(_summary(reports, time.perf_counter() - started) + "\n")
    return exit_code(reports)


if __name__ == '__main__':
    sys.exit(main())


"""
使用示例：

1. 生成并检查复制服务器案例:
python -m src.services.cli gen repserver --clients 2 --replicas 2 --maxfail 1 -o m.rck
python -m src.services.cli resilience m.rck --core OTP --context Crep --adversary FS --engine explicit

2. 运行模型文件中声明的全部检查:
python -m src.services.cli check m.rck

3. 在代码中调用:
from src.services.cli import main

code = main(["parse", "m.rck"])
"""
