"""Координатные раскладки H⊗((F_1†)*)^{⊗k_1}⊗... и решатель условий на слои.

Элемент симметричного блока хранится как H-значный однородный многочлен
на F† (коэффициенты при мономах), элемент знакопеременного блока хранится как
значения тензора на строго возрастающих наборах индексов. Для блоков
степени 1 оба варианта совпадают с обычными координатами тензора.

Условие на слой: при фиксированных всех аргументах, кроме одного, вектор
значений лежит в ι_F(F). Для многочлена p это означает, что градиент
(∂_c p)_c лежит в ι_F(F) покомпонентно.
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce
from math import factorial
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .ahmod import AHModule
from .constants import DEFAULT_BUDGET
from .errors import BudgetExceededError, DimensionMismatchError
from .exactq import (
    ONE_Q,
    QQ,
    SparseVec,
    Subspace,
    matrix_rows,
    slot,
    span,
    sparse_matrix,
)

LOGGER = logging.getLogger(__name__)

Mono = Tuple[int, ...]
MultiMono = Tuple[Mono, ...]


@dataclass(frozen=True)
class Block:
    module: AHModule
    degree: int

    @property
    def dual_dim(self) -> int:
        return self.module.dagger.dim


def multinomial(mono: Mono) -> int:
    counts = Counter(mono)
    return factorial(len(mono)) // reduce(lambda acc, c: acc * factorial(c), counts.values(), 1)


def _alt_sign(c: int, rest: Mono) -> int:
    return -1 if sum(1 for x in rest if x < c) % 2 else 1


class TensorLayout:
    def __init__(self, blocks: Sequence[Block], alternating: bool = False):
        if alternating and len(blocks) != 1:
            raise DimensionMismatchError('Знакопеременная раскладка допускает ровно один блок')
        self.blocks: Tuple[Block, ...] = tuple(blocks)
        self.alternating = alternating

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorLayout):
            return NotImplemented
        return self.blocks == other.blocks and self.alternating == other.alternating

    def __hash__(self) -> int:
        return hash((self.blocks, self.alternating))

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(b.degree for b in self.blocks)

    @property
    def factors(self) -> Tuple[AHModule, ...]:
        return tuple(b.module for b in self.blocks for _ in range(b.degree))

    @property
    def logical_ambient(self) -> int:
        total = 4
        for b in self.blocks:
            total *= b.dual_dim ** b.degree
        return total

    def block_monomials(self, b: int) -> List[Mono]:
        block = self.blocks[b]
        if self.alternating:
            return list(itertools.combinations(range(block.dual_dim), block.degree))
        return list(itertools.combinations_with_replacement(range(block.dual_dim), block.degree))

    @cached_property
    def monomials(self) -> List[MultiMono]:
        return list(itertools.product(*(self.block_monomials(b) for b in range(len(self.blocks)))))

    @cached_property
    def index(self) -> Dict[MultiMono, int]:
        return {m: i for i, m in enumerate(self.monomials)}

    @property
    def size(self) -> int:
        return len(self.monomials)

    @property
    def coord_dim(self) -> int:
        return 4 * self.size

    def check_budget(self, budget: int = DEFAULT_BUDGET, what: str = '') -> None:
        if self.logical_ambient > budget:
            raise BudgetExceededError(self.logical_ambient, budget, what)

    def full(self) -> 'TensorLayout':
        return cached_layout(tuple(Block(m, 1) for m in self.factors))

    def rest(self) -> 'TensorLayout':
        return cached_layout(self.blocks[1:])

    def fibre_rows(self) -> Iterator[SparseVec]:
        """Строки условий на слои по всем блокам (в координатах раскладки)."""
        index = self.index
        for b, block in enumerate(self.blocks):
            if block.degree == 0:
                continue
            constraints = block.module.fibre_rows
            if not constraints:
                continue
            if self.alternating:
                lowered_b = list(itertools.combinations(range(block.dual_dim), block.degree - 1))
            else:
                lowered_b = list(itertools.combinations_with_replacement(range(block.dual_dim), block.degree - 1))
            others = [self.block_monomials(o) if o != b else lowered_b for o in range(len(self.blocks))]
            for lowered in itertools.product(*others):
                mu = lowered[b]
                for r in constraints:
                    row: SparseVec = {}
                    for col, coef in r.items():
                        c, h = divmod(col, 4)
                        if self.alternating:
                            if c in mu:
                                continue
                            factor = _alt_sign(c, mu)
                        else:
                            factor = mu.count(c) + 1
                        target = tuple(sorted(mu + (c,)))
                        mono = lowered[:b] + (target,) + lowered[b + 1:]
                        k = 4 * index[mono] + h
                        row[k] = row.get(k, 0) + coef * factor
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        yield row

    def expand(self, vec: SparseVec) -> SparseVec:
        """Переход к координатам полного тензора (блоки степени 1)."""
        dims = [b.dual_dim for b in self.blocks for _ in range(b.degree)]
        strides = [1] * len(dims)
        for i in range(len(dims) - 2, -1, -1):
            strides[i] = strides[i + 1] * dims[i + 1]
        out: SparseVec = {}
        for mono_idx in sorted({k // 4 for k in vec}):
            mono = self.monomials[mono_idx]
            q = slot(vec, mono_idx)
            per_block = []
            for part in mono:
                if self.alternating:
                    per_block.append([(perm, _perm_sign(perm, part)) for perm in itertools.permutations(part)])
                else:
                    weight = QQ(1, multinomial(part))
                    per_block.append([(perm, weight) for perm in set(itertools.permutations(part))])
            for combo in itertools.product(*per_block):
                idx = tuple(i for perm, _ in combo for i in perm)
                coef = reduce(lambda acc, pw: acc * pw[1], combo, ONE_Q)
                flat = sum(i * s for i, s in zip(idx, strides))
                for h, c in enumerate(q.components()):
                    if c:
                        k = 4 * flat + h
                        val = out.get(k, 0) + coef * c
                        if val:
                            out[k] = val
                        else:
                            out.pop(k, None)
        return out

    def compress(self, vec: SparseVec) -> SparseVec:
        """Обратно к expand на симметричных (антисимметричных) тензорах."""
        dims = [b.dual_dim for b in self.blocks for _ in range(b.degree)]
        strides = [1] * len(dims)
        for i in range(len(dims) - 2, -1, -1):
            strides[i] = strides[i + 1] * dims[i + 1]
        out: SparseVec = {}
        for i, mono in enumerate(self.monomials):
            idx = tuple(x for part in mono for x in part)
            flat = sum(x * s for x, s in zip(idx, strides))
            weight = ONE_Q
            if not self.alternating:
                for part in mono:
                    weight *= multinomial(part)
            for h in range(4):
                v = vec.get(4 * flat + h)
                if v:
                    out[4 * i + h] = v * weight
        return out


def _perm_sign(perm: Mono, sorted_part: Mono) -> int:
    pos = [sorted_part.index(x) for x in perm]
    inversions = sum(1 for i in range(len(pos)) for j in range(i + 1, len(pos)) if pos[i] > pos[j])
    return -1 if inversions % 2 else 1


class _DisjointSets:
    def __init__(self):
        self.parent: Dict[int, int] = {}

    def find(self, x: int) -> int:
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(x, x) != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, items: Iterable[int]) -> None:
        it = iter(items)
        first = next(it, None)
        if first is None:
            return
        r0 = self.find(first)
        for x in it:
            r = self.find(x)
            if r != r0:
                self.parent[r] = r0


@dataclass(frozen=True)
class SolvedSpace:
    layout: TensorLayout
    components: Tuple[Tuple[Subspace, Subspace], ...]

    @cached_property
    def subspace(self) -> Subspace:
        return _merge(self.layout.coord_dim, (s for s, _ in self.components))

    @cached_property
    def prime_subspace(self) -> Subspace:
        return _merge(self.layout.coord_dim, (p for _, p in self.components))


def _merge(ambient: int, parts: Iterable[Subspace]) -> Subspace:
    # носители компонент не пересекаются, поэтому объединение RREF-строк уже RREF
    rows = [r for s in parts for r in s.rows]
    rows.sort(key=min)
    return Subspace._trusted(ambient, rows)


def _local_kernel(rows: List[SparseVec], unknowns: List[int], extra: List[SparseVec]) -> List[SparseVec]:
    local = {u: t for t, u in enumerate(unknowns)}
    n = len(unknowns)
    eqs = [{local[k]: v for k, v in r.items()} for r in rows + extra]
    eqs = [e for e in eqs if e]
    if not eqs:
        return [{t: ONE_Q} for t in range(n)]
    null = sparse_matrix(eqs, n).nullspace()
    return span(matrix_rows(null), n).rows


def solve(layout: TensorLayout, head: Optional[Subspace] = None) -> SolvedSpace:
    """Решение условий на слои с разбиением на независимые компоненты.

    При заданном ``head`` первый блок пробегает только подпространство head
    (элемент ищется в виде Σ_t j_t ⊗ c_t с вещественными c_t), и условия на
    слои первого блока не накладываются.
    """
    if head is None:
        width = 4
        cells = layout.size
        rows = list(layout.fibre_rows())
    else:
        rest = layout.rest()
        n0 = len(layout.block_monomials(0))
        if head.ambient_dim != 4 * n0:
            raise DimensionMismatchError('Ограничение первого блока задано в чужом пространстве')
        width = head.dim
        cells = rest.size
        rows = list(_lift_rows(rest, head, n0))
    if cells == 0 or width == 0:
        return SolvedSpace(layout, ())

    sets = _DisjointSets()
    for r in rows:
        sets.union({k // width for k in r})
    groups: Dict[int, List[int]] = {}
    for cell in range(cells):
        groups.setdefault(sets.find(cell), []).append(cell)
    rows_by_group: Dict[int, List[SparseVec]] = {}
    for r in rows:
        rows_by_group.setdefault(sets.find(next(iter(r)) // width), []).append(r)

    LOGGER.debug(f"Решатель: ячеек {cells}, ширина {width}, уравнений {len(rows)}, компонент {len(groups)}")
    components = []
    for root in sorted(groups, key=lambda g: groups[g][0]):
        group_cells = groups[root]
        unknowns = [cell * width + t for cell in group_cells for t in range(width)]
        group_rows = rows_by_group.get(root, [])
        prime_rows = _real_part_rows(layout, head, group_cells, width)
        solution = _local_kernel(group_rows, unknowns, [])
        prime = _local_kernel(group_rows, unknowns, prime_rows)
        components.append((
            _to_global(layout, head, unknowns, width, solution),
            _to_global(layout, head, unknowns, width, prime),
        ))
    return SolvedSpace(layout, tuple(components))


def _lift_rows(rest: TensorLayout, head: Subspace, n0: int) -> Iterator[SparseVec]:
    width = head.dim
    heads = head.rows
    rest_rows = list(rest.fibre_rows())
    for mu0 in range(n0):
        base = 4 * mu0
        comps = [[j.get(base + h) for h in range(4)] for j in heads]
        if not any(any(c) for c in comps):
            continue
        for r in rest_rows:
            row: SparseVec = {}
            for col, coef in r.items():
                cell, h = divmod(col, 4)
                for t, jc in enumerate(comps):
                    v = jc[h]
                    if v:
                        k = cell * width + t
                        row[k] = row.get(k, 0) + coef * v
            row = {k: v for k, v in row.items() if v}
            if row:
                yield row


def _real_part_rows(layout: TensorLayout, head: Optional[Subspace], cells: List[int], width: int) -> List[SparseVec]:
    if head is None:
        return [{4 * cell: ONE_Q} for cell in cells]
    n0 = head.ambient_dim // 4
    real_parts = [[j.get(4 * mu0) for j in head.rows] for mu0 in range(n0)]
    out = []
    for mu0 in range(n0):
        coeffs = real_parts[mu0]
        if not any(coeffs):
            continue
        for cell in cells:
            out.append({cell * width + t: c for t, c in enumerate(coeffs) if c})
    return out


def _to_global(layout: TensorLayout, head: Optional[Subspace], unknowns: List[int], width: int,
               local_rows: List[SparseVec]) -> Subspace:
    ambient = layout.coord_dim
    if head is None:
        return Subspace._trusted(ambient, [{unknowns[t]: v for t, v in r.items()} for r in local_rows])
    n_rest = layout.rest().size
    heads = head.rows
    vectors = []
    for r in local_rows:
        vec: SparseVec = {}
        for t_local, c in r.items():
            cell, t = divmod(unknowns[t_local], width)
            for col0, jv in heads[t].items():
                mu0, h = divmod(col0, 4)
                k = 4 * (mu0 * n_rest + cell) + h
                val = vec.get(k, 0) + c * jv
                if val:
                    vec[k] = val
                else:
                    vec.pop(k, None)
        vectors.append(vec)
    return span(vectors, ambient)


@lru_cache(maxsize=None)
def cached_layout(blocks: Tuple[Block, ...], alternating: bool = False) -> TensorLayout:
    return TensorLayout(blocks, alternating)


def symmetric_layout(module: AHModule, *degrees: int) -> TensorLayout:
    return cached_layout(tuple(Block(module, d) for d in degrees))


MergeWeight = Callable[[Mono, Mono], Any]


def merge_blocks(layout: TensorLayout, vec: SparseVec, first: int = 0,
                 weight: Optional[MergeWeight] = None) -> Tuple[TensorLayout, SparseVec]:
    """Диагональная подстановка: блоки first и first+1 сливаются в один.

    На многочленах это обычное произведение p(x)·q(x), то есть σ_H,
    ограниченное на симметричные тензоры.
    """
    left, right = layout.blocks[first], layout.blocks[first + 1]
    if left.module != right.module or layout.alternating:
        raise DimensionMismatchError('Сливать можно только симметричные блоки одного модуля')
    blocks = layout.blocks[:first] + (Block(left.module, left.degree + right.degree),) + layout.blocks[first + 2:]
    merged = cached_layout(blocks)
    index = merged.index
    out: SparseVec = {}
    for key, val in vec.items():
        cell, h = divmod(key, 4)
        mono = layout.monomials[cell]
        a, b = mono[first], mono[first + 1]
        target = mono[:first] + (tuple(sorted(a + b)),) + mono[first + 2:]
        coef = val if weight is None else val * weight(a, b)
        k = 4 * index[target] + h
        total = out.get(k, 0) + coef
        if total:
            out[k] = total
        else:
            out.pop(k, None)
    return merged, out


def swap_blocks(layout: TensorLayout, vec: SparseVec) -> Tuple[TensorLayout, SparseVec]:
    """Перестановка двух блоков местами."""
    swapped = cached_layout((layout.blocks[1], layout.blocks[0]))
    index = swapped.index
    out: SparseVec = {}
    for key, val in vec.items():
        cell, h = divmod(key, 4)
        a, b = layout.monomials[cell]
        out[4 * index[(b, a)] + h] = val
    return swapped, out
