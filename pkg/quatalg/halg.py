"""Усечённые градуированные и фильтрованные H-алгебры.

Свободная алгебра F^Q хранится по степеням: степень g = weight·k есть
S_H^k Q в виде H-значных многочленов степени k на Q†. Умножение μ
есть произведение многочленов (σ_H на симметричных тензорах).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

from .ahmod import (
    AHModule,
    AHMorphism,
    QuotientMap,
    StabilityReport,
    is_stable,
    present,
    quotient_map,
    submodule_presentation,
)
from .constants import DEFAULT_BUDGET, DEFAULT_SEED
from .errors import ContainmentError, IncompatibleError, NotAHModuleError, NotHClosedError, UsageError
from .exactq import (
    ONE_Q,
    ZERO,
    Quaternion,
    SparseVec,
    Subspace,
    intersect,
    put_slot,
    slot,
    span,
    vec_times_matrix,
    zero_subspace,
)
from .layout import MergeWeight, Mono, TensorLayout, merge_blocks, swap_blocks, symmetric_layout
from .qtensor import EmbeddedModule, alt_power, check_sequence, embed_layout, sym_power

LOGGER = logging.getLogger(__name__)

HPoly = Dict[Mono, Quaternion]
Deformation = Callable[[SparseVec], Quaternion]


def poly_from_vec(vec: SparseVec, layout: TensorLayout) -> HPoly:
    out: HPoly = {}
    for cell in sorted({k // 4 for k in vec}):
        q = slot(vec, cell)
        if not q.is_zero():
            out[layout.monomials[cell][0]] = q
    return out


def vec_from_poly(poly: HPoly, layout: TensorLayout) -> SparseVec:
    out: SparseVec = {}
    for mono, q in poly.items():
        put_slot(out, layout.index[(mono,)], q)
    return out


def poly_mul(p: HPoly, q: HPoly) -> HPoly:
    out: HPoly = {}
    for m1, a in p.items():
        for m2, b in q.items():
            m = tuple(sorted(m1 + m2))
            total = out.get(m, ZERO) + a * b
            if total.is_zero():
                out.pop(m, None)
            else:
                out[m] = total
    return out


def eval_poly(poly: HPoly, x) -> Quaternion:
    acc = ZERO
    for mono, q in poly.items():
        value = ONE_Q
        for i in mono:
            value *= x[i]
        if value:
            acc = acc + q * value
    return acc


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    detail: str = ''


@dataclass
class AxiomReport:
    checks: List[AxiomCheck] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = '') -> None:
        self.checks.append(AxiomCheck(name, passed, detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def violations(self) -> List[AxiomCheck]:
        return [c for c in self.checks if not c.passed]


@dataclass(eq=False)
class GradedAlgebra:
    gen: AHModule
    truncation: int
    weight: int = 1
    budget: int = DEFAULT_BUDGET
    mu_weight: Optional[MergeWeight] = None
    name: str = ''

    def __post_init__(self):
        if self.weight < 1 or self.truncation < 0:
            raise UsageError('Вес образующих должен быть ≥ 1, а усечение ≥ 0')

    def degree(self, g: int) -> Optional[int]:
        if g < 0 or g > self.truncation or g % self.weight:
            return None
        return g // self.weight

    @property
    def grade_indices(self) -> List[int]:
        return list(range(0, self.truncation + 1, self.weight))

    @cached_property
    def grades(self) -> Dict[int, EmbeddedModule]:
        out = {}
        for g in self.grade_indices:
            out[g] = sym_power(self.gen, g // self.weight, self.budget)
            LOGGER.info(f"Степень {g}: размерности {out[g].dims()}")
        return out

    def grade(self, g: int) -> Optional[EmbeddedModule]:
        return self.grades.get(g) if self.degree(g) is not None else None

    def layout(self, *grades: int) -> TensorLayout:
        return symmetric_layout(self.gen, *(g // self.weight for g in grades))

    def dims(self) -> Dict[int, Tuple[int, int]]:
        return {g: (self.grades[g].dims() if g in self.grades else (0, 0)) for g in range(self.truncation + 1)}

    def one(self) -> SparseVec:
        return {0: ONE_Q}

    def multiply(self, layout: TensorLayout, vec: SparseVec, first: int = 0) -> Tuple[TensorLayout, SparseVec]:
        return merge_blocks(layout, vec, first, self.mu_weight)

    def tensor_basis(self, *grades: int, head: Optional[Subspace] = None) -> List[SparseVec]:
        """Вещественный базис A^{g_1}⊗_H ... ⊗_H A^{g_m} (первый сомножитель можно сузить до head)."""
        module = embed_layout(self.layout(*grades), self.budget, head=head, what='⊗_H степеней')
        return module.subspace.rows

    def product_image(self, j: int, k: int, head: Optional[Subspace] = None) -> Subspace:
        """μ(A^j⊗_H A^k), либо μ(head⊗_H A^k)."""
        target = self.layout(j + k)
        layout = self.layout(j, k)
        images = [self.multiply(layout, row)[1] for row in self.tensor_basis(j, k, head=head)]
        return span(images, target.coord_dim)

    def product(self, y: SparseVec, j: int, z: SparseVec, k: int) -> SparseVec:
        """y·z для совместимых y, z (произведение многочленов лежит в A^{j+k})."""
        if self.degree(j + k) is None:
            raise UsageError(f"Степень {j + k} вне усечения {self.truncation}")
        py = poly_from_vec(y, self.layout(j))
        pz = poly_from_vec(z, self.layout(k))
        out = vec_from_poly(poly_mul(py, pz), self.layout(j + k))
        if not self.grades[j + k].subspace.contains(out):
            raise IncompatibleError(f"Произведение не лежит в A^{j + k}: сомножители несовместимы")
        return out


def free_algebra(q: AHModule, truncation: int, weight: int = 1, budget: int = DEFAULT_BUDGET,
                 seed: int = DEFAULT_SEED) -> GradedAlgebra:
    if not is_stable(q, seed=seed):
        LOGGER.warning(f"Образующий модуль {q!r} не стабилен: формулы размерностей не применимы")
    alg = GradedAlgebra(q, truncation, weight, budget, name=f"F^{q.name}" if q.name else '')
    LOGGER.info(f"Свободная алгебра: {len(alg.grades)} ненулевых степеней до {truncation}")
    return alg


def axiom_a_check(alg: GradedAlgebra) -> AxiomReport:
    report = AxiomReport()
    w = alg.weight
    degrees = alg.grade_indices

    if 2 * w <= alg.truncation:
        alt = alt_power(alg.gen, 2, alg.budget)
        full = alg.layout(w, w)
        leaked = 0
        for row in alt.subspace.rows:
            if alg.multiply(full, alt.layout.expand(row))[1]:
                leaked += 1
        report.add('коммутативность: Λ²_H Q ⊆ Ker μ', leaked == 0, f"нарушений: {leaked}")

    for j in degrees[1:]:
        for k in degrees[1:]:
            if k < j or j + k > alg.truncation:
                continue
            layout = alg.layout(j, k)
            basis = alg.tensor_basis(j, k)
            bad = 0
            for row in basis:
                _, direct = alg.multiply(layout, row)
                swapped_layout, swapped = swap_blocks(layout, row)
                if direct != alg.multiply(swapped_layout, swapped)[1]:
                    bad += 1
            report.add(f"коммутативность: μ∘τ = μ на A^{j}⊗A^{k}", bad == 0, f"нарушений: {bad}")
            image = span([alg.multiply(layout, r)[1] for r in basis], alg.layout(j + k).coord_dim)
            closed = alg.grades[j + k].subspace.contains_subspace(image)
            report.add(f"градуировка: μ(A^{j}⊗A^{k}) ⊆ A^{j + k}", closed)

    for j in degrees[1:]:
        for k in degrees[1:]:
            for l in degrees[1:]:
                if j + k + l > alg.truncation:
                    continue
                layout = alg.layout(j, k, l)
                bad = 0
                for row in alg.tensor_basis(j, k, l):
                    mid, left = alg.multiply(layout, row, 0)
                    _, left = alg.multiply(mid, left, 0)
                    mid, right = alg.multiply(layout, row, 1)
                    _, right = alg.multiply(mid, right, 0)
                    if left != right:
                        bad += 1
                report.add(f"ассоциативность A^{j}⊗A^{k}⊗A^{l}", bad == 0, f"нарушений: {bad}")

    h_prime = alg.grades[0].prime_subspace
    report.add('единица: 1 ∉ A′', not h_prime.contains(alg.one()))
    report.add('единица: I·1 ⊂ A′', all(h_prime.contains({h: ONE_Q}) for h in (1, 2, 3)))

    bad = 0
    for g in degrees:
        for row in alg.grades[g].subspace.rows:
            _, left = alg.multiply(alg.layout(0, g), row)
            _, right = alg.multiply(alg.layout(g, 0), row)
            if left != row or right != row:
                bad += 1
    report.add('единица: μ(1⊗a) = μ(a⊗1) = a', bad == 0, f"нарушений: {bad}")
    LOGGER.info(f"Аксиомы A: {len(report.checks)} проверок, нарушений {len(report.violations())}")
    return report


def _check_generators(alg: GradedAlgebra, grade: int, gens: Subspace) -> None:
    module = alg.grade(grade)
    if module is None:
        raise UsageError(f"Степень {grade} не является степенью алгебры")
    if not module.subspace.contains_subspace(gens):
        raise ContainmentError(f"Образующие идеала не лежат в A^{grade}")
    if not gens.h_closed():
        raise NotHClosedError('Образующие идеала не замкнуты относительно умножения на i1, i2, i3')
    # AH-условие проверяется построением представления
    present(gens, intersect(gens, module.prime_subspace))


@dataclass(eq=False)
class IdealData:
    parent: GradedAlgebra
    generator_grade: int
    generators: Subspace
    grades: Dict[int, Subspace]
    recursive: Dict[int, Subspace] = field(default_factory=dict)

    def subspace(self, g: int) -> Subspace:
        if g in self.grades:
            return self.grades[g]
        return zero_subspace(self.parent.layout(g).coord_dim if self.parent.degree(g) is not None else 0)

    def dims(self) -> Dict[int, int]:
        return {g: self.subspace(g).dim for g in range(self.parent.truncation + 1)}

    def recursive_dims(self) -> Dict[int, int]:
        return {g: s.dim for g, s in self.recursive.items()}

    @property
    def stationary(self) -> bool:
        return all(self.grades[g] == s for g, s in self.recursive.items())

    def prime_dims(self) -> Dict[int, int]:
        out = {}
        for g in range(self.parent.truncation + 1):
            s = self.subspace(g)
            out[g] = intersect(s, self.parent.grades[g].prime_subspace).dim if s.dim else 0
        return out

    def absorption(self) -> AxiomReport:
        """μ(I^j⊗_H A^k) ⊆ I^{j+k} для всех вычисленных степеней."""
        report = AxiomReport()
        alg = self.parent
        for j, ij in sorted(self.grades.items()):
            if ij.is_zero():
                continue
            for k in alg.grade_indices[1:]:
                if j + k > alg.truncation:
                    continue
                image = alg.product_image(j, k, head=ij)
                report.add(f"μ(I^{j}⊗A^{k}) ⊆ I^{j + k}", self.subspace(j + k).contains_subspace(image))
        return report


def ideal_from_generators(alg: GradedAlgebra, grade: int, gens: Subspace) -> IdealData:
    _check_generators(alg, grade, gens)
    grades: Dict[int, Subspace] = {}
    recursive: Dict[int, Subspace] = {}
    for g in alg.grade_indices:
        if g < grade:
            continue
        if g == grade:
            grades[g] = gens
            continue
        grades[g] = _ideal_grade(alg, grade, gens, g)
        previous = grades[g - alg.weight]
        if g - alg.weight > grade:
            recursive[g] = alg.product_image(g - alg.weight, alg.weight, head=previous) \
                if not previous.is_zero() else zero_subspace(alg.layout(g).coord_dim)
        LOGGER.info(f"I^{g}: размерность {grades[g].dim}")
    return IdealData(alg, grade, gens, grades, recursive)


def _ideal_grade(alg: GradedAlgebra, grade: int, gens: Subspace, g: int) -> Subspace:
    if gens.is_zero():
        return zero_subspace(alg.layout(g).coord_dim)
    return alg.product_image(grade, g - grade, head=gens)


@dataclass(frozen=True)
class QuotientGrade:
    grade: int
    module: AHModule
    ideal_module: AHModule
    projection: QuotientMap
    exact: bool

    def dims(self) -> Tuple[int, int]:
        return (4 * self.module.n, self.module.uprime.dim)


@dataclass(eq=False)
class QuotientAlgebra:
    parent: GradedAlgebra
    ideal: IdealData
    grades: Dict[int, QuotientGrade]

    def dims(self) -> Dict[int, Tuple[int, int]]:
        return {g: (self.grades[g].dims() if g in self.grades else (0, 0))
                for g in range(self.parent.truncation + 1)}

    def project(self, g: int, vec: SparseVec) -> SparseVec:
        """A^g (координаты раскладки) → B^g."""
        base = self.parent.grades[g].coordinates(vec)
        return vec_times_matrix(base, self.grades[g].projection.projection)

    def lift(self, g: int, coords: SparseVec) -> SparseVec:
        slots = self.grades[g].projection.slots
        base: SparseVec = {}
        for t, s in enumerate(slots):
            put_slot(base, s, slot(coords, t))
        return self.parent.grades[g].embed(base)

    def product(self, y: SparseVec, j: int, z: SparseVec, k: int) -> SparseVec:
        """Индуцированное умножение B^j × B^k → B^{j+k} на совместимых представителях."""
        return self.project(j + k, self.parent.product(self.lift(j, y), j, self.lift(k, z), k))

    def stability(self, seed: int = DEFAULT_SEED) -> Dict[int, Tuple[StabilityReport, StabilityReport]]:
        out = {}
        for g, qg in self.grades.items():
            out[g] = (is_stable(qg.ideal_module, seed=seed), is_stable(qg.module, seed=seed))
        return out


def _base_subspace(module: EmbeddedModule, s: Subspace) -> Subspace:
    return span([module.coordinates(r) for r in s.rows], 4 * module.base.n)


def quotient_algebra(alg: GradedAlgebra, ideal: IdealData) -> QuotientAlgebra:
    grades = {}
    for g in alg.grade_indices:
        a = alg.grades[g]
        i_base = _base_subspace(a, ideal.subspace(g)) if g in ideal.grades else zero_subspace(4 * a.base.n)
        try:
            qmap = quotient_map(a.base, i_base)
        except NotAHModuleError as exc:
            raise exc.at_grade(g) from exc
        sub = submodule_presentation(a.base, i_base)
        rows = sub.basis.to_dod()
        inclusion = AHMorphism.from_images(sub.module, a.base, [dict(rows.get(4 * j, {})) for j in range(sub.module.n)])
        proj = AHMorphism.from_images(
            a.base, qmap.module, [vec_times_matrix({4 * i: ONE_Q}, qmap.projection) for i in range(a.base.n)],
        )
        exact = check_sequence([inclusion, proj]).ah_exact
        grades[g] = QuotientGrade(g, qmap.module, sub.module, qmap, exact)
        LOGGER.info(f"B^{g}: размерности {grades[g].dims()}, точность {exact}")
    return QuotientAlgebra(alg, ideal, grades)


class FilteredQuotient:
    """Фильтрованный идеал, порождённый J^λ = {y + λ(y)} ⊂ A^{g0} ⊕ H.

    Соотношения μ(T) + (λ⊗id)(T) для T ∈ J⊗_H A^m хранятся в
    ⊕_g A^g, координаты упорядочены от старших степеней к младшим,
    так что строки RREF с опорой в степени ≤ k задают I ∩ F_k.
    """

    def __init__(self, parent: GradedAlgebra, generator_grade: int, generators: Subspace,
                 deformation: Optional[Deformation] = None):
        _check_generators(parent, generator_grade, generators)
        self.parent = parent
        self.generator_grade = generator_grade
        self.generators = generators
        self.deformation = deformation
        self.offsets: Dict[int, int] = {}
        offset = 0
        for g in reversed(parent.grade_indices):
            self.offsets[g] = offset
            offset += parent.layout(g).coord_dim
        self.total_dim = offset

    def _grade_of(self, col: int) -> int:
        for g in self.parent.grade_indices:
            if col >= self.offsets[g]:
                return g
        raise IndexError(col)

    def _shift(self, g: int, vec: SparseVec) -> SparseVec:
        base = self.offsets[g]
        return {base + k: v for k, v in vec.items()}

    def _lambda_part(self, layout: TensorLayout, vec: SparseVec) -> SparseVec:
        rest = layout.rest()
        n_rest = rest.size
        columns: Dict[int, SparseVec] = {}
        for key, val in vec.items():
            cell, h = divmod(key, 4)
            mu0, nu = divmod(cell, n_rest)
            columns.setdefault(nu, {})[4 * mu0 + h] = val
        out: SparseVec = {}
        for nu, column in columns.items():
            q = self.deformation(column)
            put_slot(out, nu, q)
        return out

    @cached_property
    def relations(self) -> Subspace:
        alg = self.parent
        g0 = self.generator_grade
        rows: List[SparseVec] = []
        for g in alg.grade_indices:
            if g < g0:
                continue
            m = g - g0
            layout = alg.layout(g0, m)
            for t in alg.tensor_basis(g0, m, head=self.generators):
                _, top = alg.multiply(layout, t)
                rel = self._shift(g, top)
                if self.deformation is not None:
                    rel.update(self._shift(m, self._lambda_part(layout, t)))
                rows.append(rel)
        LOGGER.info(f"Фильтрованный идеал: {len(rows)} соотношений")
        return span(rows, self.total_dim)

    def leading(self, g: int) -> Subspace:
        """Проекция I ∩ F_g на степень g (идеал старших членов)."""
        base = self.offsets[g]
        width = self.parent.layout(g).coord_dim
        picked = [r for r in self.relations.rows if self._grade_of(min(r)) == g]
        return span([{k - base: v for k, v in r.items() if base <= k < base + width} for r in picked], width)

    def level_dims(self) -> Dict[int, Tuple[int, int, int]]:
        """Для F_k: (dim F_k, dim I ∩ F_k, dim F_k/(I ∩ F_k))."""
        pivots = [self._grade_of(min(r)) for r in self.relations.rows]
        out = {}
        total = 0
        for g in self.parent.grade_indices:
            total += self.parent.grades[g].subspace.dim
            inside = sum(1 for p in pivots if p <= g)
            out[g] = (total, inside, total - inside)
        return out


def associated_graded(filtration: FilteredQuotient) -> QuotientAlgebra:
    """gr: B^k = A^k / lt_k; нарушение AH-условия сообщается с номером степени."""
    alg = filtration.parent
    grades = {g: filtration.leading(g) for g in alg.grade_indices}
    ideal = IdealData(alg, filtration.generator_grade, filtration.generators, grades)
    return quotient_algebra(alg, ideal)
