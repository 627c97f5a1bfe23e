#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
判定结果模型模块

定义了判定器与检查的输出类型：
- 见证轨迹（WitnessTrace）
- 判定结果（Verdict）
- 自相似约束报告（ConstraintReport）
- 双模拟结果（BisimResult）
- 命令行报告行（RunReport）
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional

from pydantic import BaseModel, Field

# 判定结论
PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class WitnessTrace:
    """状态序列，相邻状态之间由一步迁移相连"""
    states: List[Any] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def steps(self) -> int:
        return max(len(self.states) - 1, 0)

    @property
    def last(self) -> Any:
        return self.states[-1] if self.states else None

    def replays(self, succ: Callable[[Any], Iterable[Any]]) -> bool:
        """
        逐步校验轨迹

        Args:
            succ: 后继函数

        Returns:
            每一步都是 succ 的合法迁移时返回 True
        """
        for current, nxt in zip(self.states, self.states[1:]):
            if nxt not in set(succ(current)):
                return False
        return True

    def to_dict(self, show: Callable[[Any], str] = str) -> Dict[str, Any]:
        return {'steps': self.steps, 'states': [show(s) for s in self.states]}


@dataclass
class Verdict:
    """判定结果：answer 为 None 表示不确定"""
    answer: Optional[bool]
    witness: Optional[WitnessTrace] = None
    stats: Dict[str, Any] = field(default_factory=dict)
    reason: Optional[str] = None
    evidence: Dict[str, Any] = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return self.answer is None

    @property
    def outcome(self) -> str:
        if self.answer is None:
            return INCONCLUSIVE
        return PASS if self.answer else FAIL

    def to_dict(self, show: Callable[[Any], str] = str) -> Dict[str, Any]:
        data: Dict[str, Any] = {'answer': self.answer, 'stats': dict(self.stats)}
        if self.witness is not None:
            data['witness'] = self.witness.to_dict(show)
        if self.reason:
            data['reason'] = self.reason
        if self.evidence:
            data['evidence'] = dict(self.evidence)
        return data


@dataclass
class ConditionResult:
    """单个自相似条件的检查结果"""
    condition: str
    outcome: str = PASS
    method: str = "structural"
    counterexample: Optional[str] = None
    detail: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {'condition': self.condition, 'outcome': self.outcome, 'method': self.method}
        if self.counterexample is not None:
            data['counterexample'] = self.counterexample
        if self.detail:
            data['detail'] = self.detail
        return data


@dataclass
class ConstraintReport:
    """条件 2(a)-2(d) 的检查报告"""
    conditions: Dict[str, ConditionResult] = field(default_factory=dict)
    depth: int = 0

    @property
    def outcome(self) -> str:
        outcomes = [c.outcome for c in self.conditions.values()]
        if FAIL in outcomes:
            return FAIL
        if INCONCLUSIVE in outcomes:
            return INCONCLUSIVE
        return PASS

    @property
    def all_pass(self) -> bool:
        return self.outcome == PASS

    def failed(self) -> List[ConditionResult]:
        return [c for c in self.conditions.values() if c.outcome == FAIL]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'outcome': self.outcome,
            'depth': self.depth,
            'conditions': {k: v.to_dict() for k, v in sorted(self.conditions.items())},
        }


@dataclass
class BisimResult:
    """弱 barb 双模拟的判定结果"""
    equivalent: Optional[bool]
    pairs: int = 0
    # 区分证据：状态对、barb、缺少该 barb 的一侧
    barb: Optional[str] = None
    missing_side: Optional[str] = None
    left_state: Optional[str] = None
    right_state: Optional[str] = None
    left_trace: List[str] = field(default_factory=list)
    right_trace: List[str] = field(default_factory=list)
    reason: Optional[str] = None
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def outcome(self) -> str:
        if self.equivalent is None:
            return INCONCLUSIVE
        return PASS if self.equivalent else FAIL

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'equivalent': self.equivalent, 'pairs': self.pairs, 'stats': dict(self.stats)}
        for key in ('barb', 'missing_side', 'left_state', 'right_state', 'reason'):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        if self.left_trace:
            data['left_trace'] = list(self.left_trace)
        if self.right_trace:
            data['right_trace'] = list(self.right_trace)
        return data


class RunReport(BaseModel):
    """命令行输出的一行报告"""
    check: str
    verdict: str
    kind: str = ""
    engine: Optional[str] = None
    expected: Optional[str] = None
    evidence: Dict[str, Any] = Field(default_factory=dict)
    stats: Dict[str, Any] = Field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_line(self) -> Dict[str, Any]:
        """按稳定字段名导出，省略空值"""
        return self.model_dump(exclude_none=True)

    @classmethod
    def from_line(cls, data: Dict[str, Any]) -> 'RunReport':
        return cls.model_validate(data)
