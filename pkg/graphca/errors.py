"""
异常定义

每个异常带机器可读的 code 和进程退出码，CLI 统一把它们序列化成 JSON 错误对象。
"""
from typing import Any, Dict, Optional


class GraphCAError(Exception):
    """所有业务异常的基类"""

    code: str = "error"
    exit_code: int = 2

    def __init__(self, message: str, code: Optional[str] = None, **details: Any):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"code": self.code, "message": self.message}
        payload.update(self.details)
        return payload


class GraphError(GraphCAError):
    """图构造或图生成错误（duplicate_edge / unknown_vertex / not_a_group ...）"""

    code = "graph_error"


class FormulaSyntaxError(GraphCAError):
    """公式语法错误，带行列号"""

    code = "syntax_error"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class FormulaSortError(GraphCAError):
    """变量种类错误（一阶 / 二阶混用）"""

    code = "sort_error"


class FormulaScopeError(GraphCAError):
    """自由变量没有赋值"""

    code = "unbound_variable"


class UnsupportedFormulaError(GraphCAError):
    """当前操作不支持的原子"""

    code = "unsupported_atom"


class RuleError(GraphCAError):
    """局部规则错误（rule_domain / rule_totality / unknown_rule）"""

    code = "rule_error"


class BudgetExceededError(GraphCAError):
    """超过预算"""

    code = "budget_exceeded"

    def __init__(self, message: str, cost: int, limit: int):
        super().__init__(message, cost=cost, limit=limit)
        self.cost = cost
        self.limit = limit


class InputError(GraphCAError):
    """输入文件不可读、JSON 格式错误或未知语料"""

    code = "malformed_input"


class PropertyViolation(GraphCAError):
    """等价性或引理探针失败"""

    code = "property_violation"
    exit_code = 1
