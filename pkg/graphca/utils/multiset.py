"""
带上限的多重集与局部图样 P(c, v, r, k)
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from graphca.errors import InputError
from graphca.utils.graph import LabeledGraph, Word, reach, words

# (word, state) -> count
Key = Tuple[Word, int]


def cap(counts: Mapping[Key, int], k: int) -> Dict[Key, int]:
    """cap^k：每个计数截断为 min(count, k)，去掉零项"""
    if k < 1:
        raise InputError(f"上限 k 必须 ≥ 1，实际为 {k}", code="malformed_input", k=k)
    return {key: min(c, k) for key, c in counts.items() if c > 0}


@dataclass(frozen=True)
class CappedMultiset:
    """
    k-上限多重集 MS^k(Δ^{≤r} × S)

    items 按 (word, state) 排序存放，只保留正计数，因而可直接哈希。
    状态用规则状态表中的下标表示。
    """
    k: int
    items: Tuple[Tuple[Word, int, int], ...]
    _lookup: Dict[Key, int] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        self._lookup.update(((w, s), c) for (w, s, c) in self.items)

    @classmethod
    def from_counts(cls, counts: Mapping[Key, int], k: int) -> "CappedMultiset":
        capped = cap(counts, k)
        items = tuple(sorted((w, s, c) for (w, s), c in capped.items()))
        return cls(k, items)

    def count(self, word: Word, state: int) -> int:
        return self._lookup.get((word, state), 0)

    def center(self) -> int:
        """中心状态：唯一计数为正的 (ε, s)"""
        for (w, s, _) in self.items:
            if w == ():
                return s
        raise InputError("多重集缺少中心状态", code="malformed_input")

    def states_at(self, word: Word) -> List[int]:
        """沿 word 可达的状态（计数为正）"""
        return [s for (w, s, _) in self.items if w == word]

    def neighbor_states(self) -> List[int]:
        """所有长度为 1 的单词上出现过的状态（去重，升序）"""
        return sorted({s for (w, s, _) in self.items if len(w) == 1})

    def total(self, word_set: Iterable[Word], state: int) -> int:
        return sum(self.count(w, state) for w in word_set)

    def is_valid(self) -> bool:
        """所有计数在 [1, k]，且恰有一个计数为 1 的中心项"""
        if any(not 1 <= c <= self.k for (_, _, c) in self.items):
            return False
        centers = [(s, c) for (w, s, c) in self.items if w == ()]
        return len(centers) == 1 and centers[0][1] == 1


def pattern(
    graph: LabeledGraph,
    config: Sequence[int],
    vertex: int,
    radius: int,
    k: int,
    word_list: Optional[List[Word]] = None,
) -> CappedMultiset:
    """
    P(c, v, r, k)：(w, s) ↦ min(k, #{v' ∈ R^w(v) : c_{v'} = s})

    Args:
        graph: 图
        config: 每个顶点的状态下标
        vertex: 顶点下标
        radius: 半径 r
        k: 上限
        word_list: 预先算好的 Δ^{≤r}

    Returns:
        CappedMultiset
    """
    counts: Dict[Key, int] = {}
    for w in word_list if word_list is not None else words(graph.delta, radius):
        for u in reach(graph, vertex, w):
            key = (w, config[u])
            counts[key] = counts.get(key, 0) + 1
    return CappedMultiset.from_counts(counts, k)
