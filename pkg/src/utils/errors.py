#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
异常定义模块

所有可预期的错误都继承自 ResilchkError，便于命令行统一映射退出码：
1. 模型错误（语法、元数、未声明名称、非守卫递归）
2. 语义错误（开放项、值域溢出、洞数量不匹配）
3. 序与判定器错误（载体不匹配、迭代上限、前置条件）
"""

from typing import Any, Dict, Optional


class ResilchkError(Exception):
    """基础异常"""

    code = "error"
    # 命令行退出码：3 = 用法/模型错误，2 = 不确定
    exit_code = 3

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典格式"""
        data = {'error': self.code, 'message': self.message}
        data.update({k: v for k, v in self.details.items() if v is not None})
        return data


class ModelError(ResilchkError):
    code = "model_error"


class ParseError(ModelError):
    """语法错误，携带行列号"""

    code = "syntax_error"

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        super().__init__(message, line=line, col=col)
        self.line = line
        self.col = col

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.line}:{self.col}: {self.message}"


class ArityMismatch(ModelError):
    code = "arity_mismatch"


class UndeclaredName(ModelError):
    code = "undeclared_name"


class DuplicateDeclaration(ModelError):
    code = "duplicate_declaration"


class UnguardedRecursion(ModelError):
    code = "unguarded_recursion"


class SemanticsError(ResilchkError):
    code = "semantics_error"


class OpenTerm(SemanticsError):
    code = "open_term"


class DomainEscape(SemanticsError):
    code = "domain_escape"


class HoleCountMismatch(SemanticsError):
    code = "hole_count_mismatch"


class CaptureViolation(SemanticsError):
    code = "capture_violation"


class MediationMismatch(SemanticsError):
    code = "mediation_mismatch"


class OrderError(ResilchkError):
    code = "order_error"


class CarrierMismatch(OrderError):
    code = "carrier_mismatch"


class DeciderError(ResilchkError):
    code = "decider_error"
    exit_code = 2


class IterationCap(DeciderError):
    code = "iteration_cap"


class BudgetExceeded(DeciderError):
    code = "budget_exceeded"


class PreconditionViolated(DeciderError):
    code = "precondition_violated"
    exit_code = 3


class CoreNotFiniteState(DeciderError):
    code = "core_not_finite_state"


class BadParams(ResilchkError):
    code = "bad_params"
