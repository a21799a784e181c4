"""
有限 (Σ,Δ) 标注图

顶点按插入顺序编号，这个顺序决定下游所有构形的编码。
无向图按对称有向边集编码，不单独提供无向类型。
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from graphca.config import get_settings
from graphca.errors import GraphError
from graphca.models.schemas import EdgeEntry, GraphFile, VertexEntry

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]


@dataclass(frozen=True)
class VertexSet:
    """某个图的顶点子集，规范形式为位掩码"""
    mask: int
    size: int

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def __iter__(self) -> Iterator[int]:
        return (i for i in range(self.size) if self.mask >> i & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def indices(self) -> List[int]:
        return list(self)


class LabeledGraph:
    """
    不可变的有限 (Σ,Δ) 标注简单有向图

    每个标签下，同一有序顶点对最多一条边。
    """

    def __init__(
        self,
        vertices: Sequence[str],
        sigma: Sequence[str],
        delta: Sequence[str],
        labels: Sequence[str],
        edges: Dict[str, FrozenSet[Tuple[int, int]]],
    ):
        self.vertices: Tuple[str, ...] = tuple(vertices)
        self.sigma: Tuple[str, ...] = tuple(sigma)
        self.delta: Tuple[str, ...] = tuple(delta)
        self.labels: Tuple[str, ...] = tuple(labels)
        self.edges: Dict[str, FrozenSet[Tuple[int, int]]] = {d: edges.get(d, frozenset()) for d in self.delta}
        self._index = {v: i for i, v in enumerate(self.vertices)}

        n = len(self.vertices)
        self._succ: Dict[str, Tuple[Tuple[int, ...], ...]] = {}
        self._succ_mask: Dict[str, Tuple[int, ...]] = {}
        for d in self.delta:
            succ: List[List[int]] = [[] for _ in range(n)]
            for (a, b) in self.edges[d]:
                succ[a].append(b)
            self._succ[d] = tuple(tuple(sorted(s)) for s in succ)
            self._succ_mask[d] = tuple(sum(1 << b for b in s) for s in succ)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, vertex: str) -> int:
        try:
            return self._index[vertex]
        except KeyError:
            raise GraphError(f"未知顶点: {vertex}", code="unknown_vertex", vertex=vertex)

    def successors(self, label: str, index: int) -> Tuple[int, ...]:
        """标签为 label 的出邻居（顶点下标）"""
        return self._succ[label][index]

    def successor_mask(self, label: str, index: int) -> int:
        return self._succ_mask[label][index]

    def edge_count(self) -> int:
        return sum(len(e) for e in self.edges.values())

    def vertex_set(self, ids: Iterable[str]) -> VertexSet:
        mask = 0
        for v in ids:
            mask |= 1 << self.index(v)
        return VertexSet(mask, self.n)

    def ids(self, vs: VertexSet) -> List[str]:
        return [self.vertices[i] for i in vs]

    def to_file(self) -> GraphFile:
        return GraphFile(
            sigma=list(self.sigma),
            delta=list(self.delta),
            vertices=[VertexEntry(id=v, label=l) for v, l in zip(self.vertices, self.labels)],
            edges=[
                EdgeEntry(source=self.vertices[a], target=self.vertices[b], label=d)
                for d in self.delta
                for (a, b) in sorted(self.edges[d])
            ],
        )

    def to_json(self) -> dict:
        """规范 JSON（用于指纹和输出）"""
        return self.to_file().model_dump(by_alias=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.sigma == other.sigma
            and self.delta == other.delta
            and self.labels == other.labels
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.labels, tuple(sorted((d, tuple(sorted(e))) for d, e in self.edges.items()))))

    def __repr__(self) -> str:
        return f"LabeledGraph(|V|={self.n}, |E|={self.edge_count()}, Σ={list(self.sigma)}, Δ={list(self.delta)})"


def build_graph(
    vertices: Sequence[str],
    sigma: Sequence[str],
    delta: Sequence[str],
    labels: Dict[str, str],
    edges: Iterable[Tuple[str, str, str]],
) -> LabeledGraph:
    """
    构造标注图并校验不变量

    Args:
        vertices: 顶点 id，按插入顺序
        sigma: 顶点标签字母表
        delta: 边标签字母表
        labels: 顶点 -> 顶点标签（必须全覆盖）
        edges: (from, to, label) 三元组

    Returns:
        LabeledGraph
    """
    seen = set()
    for v in vertices:
        if v in seen:
            raise GraphError(f"重复顶点: {v}", code="duplicate_vertex", vertex=v)
        seen.add(v)
    index = {v: i for i, v in enumerate(vertices)}

    vertex_labels = []
    for v in vertices:
        if v not in labels:
            raise GraphError(f"顶点 {v} 没有标签", code="unknown_label", vertex=v)
        if labels[v] not in sigma:
            raise GraphError(f"顶点 {v} 的标签 {labels[v]} 不在 Σ 中", code="unknown_label", label=labels[v])
        vertex_labels.append(labels[v])
    for v in labels:
        if v not in index:
            raise GraphError(f"未知顶点: {v}", code="unknown_vertex", vertex=v)

    edge_sets: Dict[str, set] = {d: set() for d in delta}
    for (a, b, d) in edges:
        if d not in edge_sets:
            raise GraphError(f"边标签 {d} 不在 Δ 中", code="unknown_label", label=d)
        for v in (a, b):
            if v not in index:
                raise GraphError(f"未知顶点: {v}", code="unknown_vertex", vertex=v)
        pair = (index[a], index[b])
        if pair in edge_sets[d]:
            raise GraphError(f"重复边: ({a}, {b}, {d})", code="duplicate_edge", edge=[a, b, d])
        edge_sets[d].add(pair)

    return LabeledGraph(vertices, sigma, delta, vertex_labels, {d: frozenset(e) for d, e in edge_sets.items()})


def graph_from_file(data: GraphFile) -> LabeledGraph:
    return build_graph(
        [v.id for v in data.vertices],
        data.sigma,
        data.delta,
        {v.id: v.label for v in data.vertices},
        [(e.source, e.target, e.label) for e in data.edges],
    )


def words(delta: Sequence[str], radius: int) -> List[Word]:
    """Δ^{≤r}：先按长度，再按 Δ 的顺序字典序；ε 在最前"""
    result: List[Word] = [()]
    for length in range(1, radius + 1):
        result.extend(itertools.product(delta, repeat=length))
    return result


def reach(graph: LabeledGraph, vertex: int, word: Word) -> VertexSet:
    """
    R^w(v)：从 v 出发、标签序列为 w 的路径的终点集合

    Args:
        graph: 图
        vertex: 起点下标
        word: 边标签序列，() 表示 ε

    Returns:
        VertexSet
    """
    for d in word:
        if d not in graph.delta:
            raise GraphError(f"单词中的标签 {d} 不在 Δ 中", code="unknown_label", label=d)
    frontier = 1 << vertex
    for d in word:
        nxt = 0
        for i in range(graph.n):
            if frontier >> i & 1:
                nxt |= graph.successor_mask(d, i)
        frontier = nxt
        if not frontier:
            break
    return VertexSet(frontier, graph.n)


def ball(graph: LabeledGraph, vertex: int, radius: int) -> List[int]:
    """半径 r 的球：所有长度 ≤ r 的路径终点（升序下标）"""
    mask = 1 << vertex
    frontier = mask
    for _ in range(radius):
        nxt = 0
        for i in range(graph.n):
            if frontier >> i & 1:
                for d in graph.delta:
                    nxt |= graph.successor_mask(d, i)
        frontier = nxt & ~mask
        mask |= nxt
        if not frontier:
            break
    return [i for i in range(graph.n) if mask >> i & 1]


def to_networkx(graph: LabeledGraph) -> nx.DiGraph:
    """转成 networkx 有向图，边属性 labels 为该有序对上的标签集合"""
    g = nx.DiGraph()
    for i, label in enumerate(graph.labels):
        g.add_node(i, label=label)
    for d in graph.delta:
        for (a, b) in graph.edges[d]:
            if g.has_edge(a, b):
                g[a][b]["labels"] = g[a][b]["labels"] | {d}
            else:
                g.add_edge(a, b, labels=frozenset({d}))
    return g


def is_connected(graph: LabeledGraph) -> bool:
    """对称化、去标签后是否连通；空图约定为连通"""
    if graph.n == 0:
        return True
    return nx.is_weakly_connected(to_networkx(graph))


def components(graph: LabeledGraph) -> List[List[int]]:
    """弱连通分量（每个分量内下标升序，分量按最小下标排序）"""
    if graph.n == 0:
        return []
    comps = [sorted(c) for c in nx.weakly_connected_components(to_networkx(graph))]
    return sorted(comps)


def symmetrize(graph: LabeledGraph) -> LabeledGraph:
    """每条边补上同标签的反向边"""
    edges = {d: frozenset(e | {(b, a) for (a, b) in e}) for d, e in graph.edges.items()}
    return LabeledGraph(graph.vertices, graph.sigma, graph.delta, graph.labels, edges)


def automorphisms(graph: LabeledGraph) -> List[Tuple[int, ...]]:
    """保持顶点标签与带标签边的全部自同构（perm[i] 为 i 的像）"""
    g = to_networkx(graph)
    matcher = DiGraphMatcher(
        g,
        g,
        node_match=lambda a, b: a["label"] == b["label"],
        edge_match=lambda a, b: a["labels"] == b["labels"],
    )
    perms = []
    for mapping in matcher.isomorphisms_iter():
        perms.append(tuple(mapping[i] for i in range(graph.n)))
    return sorted(perms)


# Cayley 图
def _check_group(table: Sequence[Sequence[int]]) -> int:
    """校验乘法表构成群，返回单位元"""
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise GraphError("乘法表必须是非空方阵", code="not_a_group", axiom="closure")
    for row in table:
        for x in row:
            if not 0 <= x < n:
                raise GraphError("乘法表元素越界", code="not_a_group", axiom="closure")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise GraphError(f"结合律不成立: ({a},{b},{c})", code="not_a_group", axiom="associativity")
    identity = None
    for e in range(n):
        if all(table[e][a] == a and table[a][e] == a for a in range(n)):
            identity = e
            break
    if identity is None:
        raise GraphError("没有单位元", code="not_a_group", axiom="identity")
    for a in range(n):
        if not any(table[a][b] == identity and table[b][a] == identity for b in range(n)):
            raise GraphError(f"元素 {a} 没有逆元", code="not_a_group", axiom="inverses")
    return identity


def cayley_graph(
    table: Sequence[Sequence[int]],
    generators: Dict[str, int],
    element_names: Optional[Sequence[str]] = None,
    vertex_label: str = "a",
) -> LabeledGraph:
    """
    有限群的 Cayley 图：(γ, γ') ∈ E_δ 当且仅当 γ' = γ·δ

    Args:
        table: 乘法表，table[a][b] = a·b
        generators: 生成元名字 -> 群元素
        element_names: 顶点 id，默认 "0".."n-1"
        vertex_label: 唯一的顶点标签

    Returns:
        每个标签出度、入度都为 1 的 LabeledGraph
    """
    _check_group(table)
    n = len(table)
    names = list(element_names) if element_names is not None else [str(i) for i in range(n)]
    for name, g in generators.items():
        if not 0 <= g < n:
            raise GraphError(f"生成元 {name} 不是群元素", code="not_a_group", axiom="generators")
    edges = {d: frozenset((a, table[a][g]) for a in range(n)) for d, g in generators.items()}
    return LabeledGraph(names, [vertex_label], list(generators), [vertex_label] * n, edges)


class Torus:
    """
    阿贝尔群 ℤ_{n1}×…×ℤ_{nd} 的 Cayley 图及其群运算

    生成元：一维为 e / e_inv；二维为 n=(0,1)、e=(1,0) 及其逆。
    """

    def __init__(self, dims: Sequence[int]):
        if not 1 <= len(dims) <= 2 or any(d < 1 for d in dims):
            raise GraphError(f"不支持的环面尺寸: {list(dims)}", code="bound_exceeded")
        self.dims: Tuple[int, ...] = tuple(dims)
        self.elements: List[Tuple[int, ...]] = list(itertools.product(*[range(d) for d in self.dims]))
        self._index = {g: i for i, g in enumerate(self.elements)}
        if len(self.dims) == 1:
            self.generators: Dict[str, Tuple[int, ...]] = {"e": (1,), "e_inv": (-1,)}
        else:
            self.generators = {"n": (0, 1), "e": (1, 0), "n_inv": (0, -1), "e_inv": (-1, 0)}

        size = len(self.elements)
        table = [[self._index[self.add(a, b)] for b in self.elements] for a in self.elements]
        gens = {name: self._index[self.reduce(off)] for name, off in self.generators.items()}
        names = [",".join(str(x) for x in g) for g in self.elements]
        self.graph = cayley_graph(table, gens, names)
        logger.debug(f"构造环面 {self.dims}: {size} 个顶点")

    def reduce(self, offset: Sequence[int]) -> Tuple[int, ...]:
        return tuple(x % d for x, d in zip(offset, self.dims))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.dims))

    def index(self, element: Sequence[int]) -> int:
        return self._index[self.reduce(element)]

    def word_offset(self, word: Word) -> Tuple[int, ...]:
        """单词在 ℤ^d 中的位移（不取模）"""
        off = [0] * len(self.dims)
        for d in word:
            for axis, x in enumerate(self.generators[d]):
                off[axis] += x
        return tuple(off)

    def ball_offsets(self, radius: int) -> List[Tuple[int, ...]]:
        """B(r)：字长 ≤ r 的位移（不取模），单位元在最前，其余按首次出现顺序"""
        seen: List[Tuple[int, ...]] = []
        for w in words(list(self.generators), radius):
            off = self.word_offset(w)
            if off not in seen:
                seen.append(off)
        return seen

    def check_ball(self, radius: int) -> None:
        """球在环面上不回绕（每个方向边长 > 2r）"""
        if any(d <= 2 * radius for d in self.dims):
            raise GraphError(
                f"环面 {list(self.dims)} 上半径 {radius} 的球会回绕（需要边长 > {2 * radius}）",
                code="ball_wraps",
            )


def torus(dims: Sequence[int]) -> Torus:
    return Torus(dims)


def moore_torus(n: int, m: int, vertex_label: str = "a") -> LabeledGraph:
    """n×m 环面上的国王邻接（8 邻居），单一边标签 u"""
    elements = list(itertools.product(range(n), range(m)))
    index = {g: i for i, g in enumerate(elements)}
    edges = set()
    for (x, y) in elements:
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                target = ((x + dx) % n, (y + dy) % m)
                if target != (x, y):
                    edges.add((index[(x, y)], index[target]))
    names = [f"{x},{y}" for (x, y) in elements]
    return LabeledGraph(names, [vertex_label], ["u"], [vertex_label] * len(elements), {"u": frozenset(edges)})


# 图枚举
def _edge_slots(n: int, delta: Sequence[str], symmetric: bool, loops: bool) -> List[Tuple[str, int, int]]:
    slots = []
    for d in delta:
        for a in range(n):
            for b in range(n):
                if symmetric and b <= a:
                    continue
                if a == b and not loops:
                    continue
                slots.append((d, a, b))
    return slots


def _canonical_code(
    n: int,
    label_ids: Tuple[int, ...],
    edge_set: FrozenSet[Tuple[str, int, int]],
    delta: Sequence[str],
) -> Tuple:
    """所有顶点置换下的最小编码（用于同构去重）"""
    best = None
    for perm in itertools.permutations(range(n)):
        labels = tuple(label_ids[perm.index(i)] for i in range(n))
        edges = tuple(sorted((delta.index(d), perm[a], perm[b]) for (d, a, b) in edge_set))
        code = (labels, edges)
        if best is None or code < best:
            best = code
    return best


CANONICAL_MAX_VERTICES = 6


def canonical_form(graph: LabeledGraph) -> Optional[Tuple]:
    """
    同构类的规范编码（连同 Σ、Δ），同构的图编码相同

    按全部顶点置换取最小编码，顶点数超过 CANONICAL_MAX_VERTICES 时返回 None。
    """
    if graph.n > CANONICAL_MAX_VERTICES:
        return None
    sigma, delta = list(graph.sigma), list(graph.delta)
    label_ids = tuple(sigma.index(label) for label in graph.labels)
    edge_set = frozenset((d, a, b) for d in delta for (a, b) in graph.edges.get(d, ()))
    return tuple(sigma), tuple(delta), graph.n, _canonical_code(graph.n, label_ids, edge_set, delta)


def enumerate_graphs(
    max_vertices: int,
    sigma: Sequence[str] = ("a",),
    delta: Sequence[str] = ("u",),
    symmetric: bool = False,
    loops: bool = True,
    up_to_isomorphism: bool = False,
) -> Iterator[LabeledGraph]:
    """
    按确定顺序枚举 1..N 个顶点的全部简单 (Σ,Δ) 标注图（N=0 时只产出空图）

    Args:
        max_vertices: 顶点数上限 N
        sigma: 顶点标签
        delta: 边标签
        symmetric: 只枚举对称、无自环的边集（即无向简单图）
        loops: 是否允许自环（symmetric 时忽略）
        up_to_isomorphism: 每个同构类只保留一个代表

    Returns:
        图的迭代器
    """
    limit = get_settings().max_vertices
    if max_vertices > limit:
        raise GraphError(
            f"顶点数上限 {max_vertices} 超过配置上限 {limit}",
            code="bound_exceeded",
            requested=max_vertices,
            limit=limit,
        )
    if max_vertices <= 0:
        yield LabeledGraph([], sigma, delta, [], {})
        return

    for n in range(1, max_vertices + 1):
        vertices = [f"v{i}" for i in range(n)]
        slots = _edge_slots(n, delta, symmetric, loops)
        seen = set()
        for label_ids in itertools.product(range(len(sigma)), repeat=n):
            for mask in range(1 << len(slots)):
                chosen = [slots[i] for i in range(len(slots)) if mask >> i & 1]
                if symmetric:
                    chosen = chosen + [(d, b, a) for (d, a, b) in chosen]
                edge_set = frozenset(chosen)
                if up_to_isomorphism:
                    code = _canonical_code(n, label_ids, edge_set, delta)
                    if code in seen:
                        continue
                    seen.add(code)
                edges = {d: frozenset((a, b) for (dd, a, b) in edge_set if dd == d) for d in delta}
                yield LabeledGraph(vertices, sigma, delta, [sigma[i] for i in label_ids], edges)
