"""
Pydantic 数据模型

包括所有 JSON 输入文件（图、规则、多米诺、语料）和所有 JSON 输出结果。
"""
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator


# 输入文件
class VertexEntry(BaseModel):
    """顶点"""
    id: str
    label: str


class EdgeEntry(BaseModel):
    """有向标注边"""
    source: str = Field(..., alias="from")
    target: str = Field(..., alias="to")
    label: str

    model_config = {"populate_by_name": True}


class GraphFile(BaseModel):
    """图文件：{"sigma", "delta", "vertices", "edges"}"""
    sigma: List[str]
    delta: List[str]
    vertices: List[VertexEntry] = []
    edges: List[EdgeEntry] = []


class MultisetItem(BaseModel):
    """多重集中的一项 (word, state) -> count"""
    word: List[str] = Field(default_factory=list, description="边标签序列，空列表表示 ε")
    state: str
    count: int = Field(..., ge=1)

    @field_validator("word", mode="before")
    @classmethod
    def split_word(cls, value: Any) -> Any:
        # 允许用 "n.e" 这种点分字符串书写
        if isinstance(value, str):
            return [part for part in value.split(".") if part]
        return value


class TableEntry(BaseModel):
    """显式规则表中的一行"""
    sigma: str
    multiset: List[MultisetItem]
    out: str


class BuiltinRuleFile(BaseModel):
    """内置规则"""
    kind: Literal["builtin"] = "builtin"
    name: str
    params: Dict[str, Any] = {}


class TableRuleFile(BaseModel):
    """显式表规则（必须带默认输出以保证完全性）"""
    kind: Literal["table"] = "table"
    states: List[str]
    radius: int = Field(..., ge=0)
    cap: int = Field(..., ge=1)
    entries: List[TableEntry] = []
    default: str


class DominoFile(BaseModel):
    """多米诺规格：{"states", "pairs", "s0"}"""
    states: List[str]
    pairs: Dict[str, List[Tuple[str, str]]] = {}
    s0: Optional[str] = None


class DominoRuleFile(BaseModel):
    """由多米诺规格生成的规则"""
    kind: Literal["domino"] = "domino"
    spec: DominoFile


class SeededDominoRuleFile(BaseModel):
    """带种子状态的多米诺规则"""
    kind: Literal["seeded_domino"] = "seeded_domino"
    spec: DominoFile
    s0: str


class TranslatedRuleFile(BaseModel):
    """由 MSO 句子翻译得到的规则"""
    kind: Literal["translated"] = "translated"
    formula: str
    variant: Literal["connected", "general"] = "general"


RuleFile = Union[BuiltinRuleFile, TableRuleFile, DominoRuleFile, SeededDominoRuleFile, TranslatedRuleFile]


class CorpusFile(BaseModel):
    """语料文件：图列表，可附带命名公式与命名规则"""
    graphs: List[GraphFile] = []
    formulas: Dict[str, str] = {}
    rules: Dict[str, Dict[str, Any]] = {}


class CorpusInfo(BaseModel):
    """corpus list 的输出"""
    schema_version: int
    name: str
    graphs: int
    formulas: Dict[str, str] = {}
    rules: Dict[str, Dict[str, Any]] = {}


# 输出结果
class ErrorInfo(BaseModel):
    """错误信息"""
    code: str
    message: str
    details: Dict[str, Any] = {}


class ErrorResponse(BaseModel):
    """错误输出"""
    schema_version: int
    error: ErrorInfo


class CheckResult(BaseModel):
    """mso-check / fo-check 的结果"""
    schema_version: int
    command: str
    result: bool
    vertices: int
    states: Optional[int] = None
    configs: Optional[int] = None
    elapsed_ms: Optional[float] = None


class OrbitResult(BaseModel):
    """orbit 子命令结果"""
    schema_version: int
    transient: Optional[int] = None
    period: Optional[int] = None
    conclusive: bool = True
    sequence: List[List[str]] = []


class SimulationResult(BaseModel):
    """simulate 子命令结果"""
    schema_version: int
    steps: int
    sequence: List[List[str]]


class ProbeViolation(BaseModel):
    """引理探针违例，附完整证据"""
    probe: str
    level: int
    message: str
    configurations: List[List[str]] = []


class InstanceReport(BaseModel):
    """一个 (公式, 图) 实例的比较结果"""
    index: int
    graph: GraphFile
    connected: bool
    skipped: bool = False
    expected: Optional[bool] = None  # 图一侧（MSO）或原始 FO 一侧的真值
    actual: Optional[bool] = None    # 翻译后另一侧的真值
    agree: Optional[bool] = None
    states: Optional[int] = None
    configs: Optional[int] = None
    good_tuples: int = 0
    probe_violations: List[ProbeViolation] = []
    elapsed_ms: Optional[float] = None
    representative: Optional[int] = None  # 结果取自同构类中该下标的图


class TranslationReport(BaseModel):
    """verify 输出"""
    schema_version: int
    direction: str
    variant: Optional[str] = None
    formula: str
    rule: Optional[Dict[str, Any]] = None
    translated_formula: Optional[str] = None
    agreed: int = 0
    disagreed: int = 0
    skipped: int = 0
    probe_violations: int = 0
    instances: List[InstanceReport] = []
    elapsed_ms: Optional[float] = None


class HarnessReport(BaseModel):
    """示例校验（着色 / 连通性 / 生命游戏 / 多米诺）的结果"""
    schema_version: int
    name: str
    checked: int = 0
    disagreements: int = 0
    witnesses: List[Dict[str, Any]] = []
    elapsed_ms: Optional[float] = None


class LanguageResult(BaseModel):
    """language 子命令：语料中满足公式的图的下标"""
    schema_version: int
    formula: str
    members: List[int]
    total: int


class TranslationResult(BaseModel):
    """translate 子命令结果"""
    schema_version: int
    direction: str
    variant: Optional[str] = None
    source: str
    formula: str
    rule: Optional[Dict[str, Any]] = None
    states: Optional[int] = None
    signature: Optional[str] = None


class DominoResult(BaseModel):
    """domino 子命令结果"""
    schema_version: int
    command: str
    valid: Optional[bool] = None
    solution: Optional[List[str]] = None
    rule: Optional[Dict[str, Any]] = None
    spec: Optional[Dict[str, Any]] = None
    marked: List[str] = []


class CacheResult(BaseModel):
    """cache 子命令结果"""
    schema_version: int
    backend: str
    entries: int = 0
    removed: Optional[int] = None
    location: Optional[str] = None


class RunConfig(BaseModel):
    """命令行参数叠加在 Settings 之上的运行配置"""
    subcommand: str
    graph: Optional[str] = None
    rule: Optional[str] = None
    domino: Optional[str] = None
    corpus: Optional[str] = None
    budget_states: Optional[int] = Field(None, gt=0)
    budget_configs: Optional[int] = Field(None, gt=0)
    max_steps: Optional[int] = Field(None, gt=0)
    cache_dir: Optional[str] = None
    jobs: int = Field(1, gt=0)
    out: Optional[str] = None
    timings: bool = True
    seed: int = 0
    distributed: bool = False
    log_level: Optional[str] = None
