"""Многообразия M_{P,Q} ⊂ Q†: уравнения ψ_y = 0 для y из порождающих идеала.

Семейство Эгучи–Хансона: Q = R³⊗Y, образующие в степени 2 (вес 2),
J = ⟨h⟩⊗S²_H Y в степени 4, деформация J^λ = {y + λ(y)}.
Точка Q† задаётся в карте реперов: v_1, v_2, v_3 ∈ R³,
координата z[3k+g] есть g-я компонента v_{k+1}.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from .ahmod import AHModule, direct_sum_many, y_module, y_presentation
from .constants import DEFAULT_BUDGET, DEFAULT_SEED, RANDOM_ENTRY_BOUND
from .errors import InvariantViolationError, UsageError
from .exactq import (
    ONE_Q,
    QQ,
    ZERO,
    ZERO_Q,
    Quaternion,
    Rational,
    SparseVec,
    Subspace,
    intersect,
    put_slot,
    rank,
    slot,
    span,
    sparse_matrix,
    to_rational,
)
from .halg import (
    FilteredQuotient,
    GradedAlgebra,
    HPoly,
    QuotientAlgebra,
    associated_graded,
    eval_poly,
    poly_from_vec,
)
from .layout import TensorLayout
from .qtensor import sym_power

LOGGER = logging.getLogger(__name__)

Chart = Tuple[Tuple[Rational, ...], ...]
RealPoly = Dict[Tuple[int, ...], Rational]

EH_WEIGHT = 2
EH_GENERATOR_GRADE = 4


def eval_theta(x: Sequence[Any], y: SparseVec, layout: TensorLayout) -> Quaternion:
    """θ_x(y): полная свёртка y с x^{⊗k} (x в координатах базиса Q†)."""
    return eval_poly(poly_from_vec(y, layout), [to_rational(c) for c in x])


def substitute(poly: HPoly, chart: Chart) -> HPoly:
    """Замена x_c = Σ_z chart[z][c]·z."""
    columns = [[(z, row[c]) for z, row in enumerate(chart) if row[c]] for c in range(len(chart[0]))]
    out: HPoly = {}
    for mono, q in poly.items():
        for choice in itertools.product(*(columns[c] for c in mono)):
            coef = ONE_Q
            for _, v in choice:
                coef *= v
            key = tuple(sorted(z for z, _ in choice))
            total = out.get(key, ZERO) + q * coef
            if total.is_zero():
                out.pop(key, None)
            else:
                out[key] = total
    return out


def monomial_basis(n_vars: int, degree: int = 2) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []
    for d in range(degree + 1):
        out.extend(itertools.combinations_with_replacement(range(n_vars), d))
    return out


@dataclass(frozen=True, eq=False)
class QuadraticSystem:
    """Вещественные уравнения степени ≤ 2 в координатах карты (RREF по коэффициентам)."""
    gen_dual_dim: int
    chart: Chart
    forms: Tuple[Tuple[HPoly, Quaternion], ...]
    real_equations: Subspace

    @property
    def n_vars(self) -> int:
        return len(self.chart)

    @cached_property
    def monomials(self) -> List[Tuple[int, ...]]:
        return monomial_basis(self.n_vars)

    def polynomials(self) -> List[RealPoly]:
        monos = self.monomials
        return [{monos[k]: v for k, v in row.items()} for row in self.real_equations.rows]

    def __len__(self) -> int:
        return self.real_equations.dim

    def equivalent(self, other: 'QuadraticSystem') -> bool:
        return self.n_vars == other.n_vars and self.real_equations == other.real_equations


def real_system(polys: Sequence[RealPoly], n_vars: int) -> Subspace:
    """Строчное пространство вещественных многочленов степени ≤ 2."""
    index = {m: i for i, m in enumerate(monomial_basis(n_vars))}
    rows = []
    for p in polys:
        row: SparseVec = {}
        for mono, c in p.items():
            c = to_rational(c)
            if c:
                k = index[tuple(sorted(mono))]
                row[k] = row.get(k, ZERO_Q) + c
        rows.append({k: v for k, v in row.items() if v})
    return span(rows, len(index))


def identity_chart(n: int) -> Chart:
    return tuple(tuple(ONE_Q if i == j else ZERO_Q for j in range(n)) for i in range(n))


def _build_system(forms: List[Tuple[HPoly, Quaternion]], d: int, chart: Chart) -> QuadraticSystem:
    n_vars = len(chart)
    polys: List[RealPoly] = []
    for poly, constant in forms:
        in_chart = substitute(poly, chart)
        if not constant.is_zero():
            in_chart[()] = in_chart.get((), ZERO) + constant
        for h in range(4):
            comp = {m: q.components()[h] for m, q in in_chart.items() if q.components()[h]}
            if comp:
                polys.append(comp)
    system = QuadraticSystem(d, chart, tuple(forms), real_system(polys, n_vars))
    LOGGER.info(f"Система: {len(forms)} форм, {len(system)} независимых вещественных уравнений")
    return system


EquationSource = Union[QuotientAlgebra, FilteredQuotient]


def emit_equations(source: EquationSource, chart: Optional[Chart] = None) -> QuadraticSystem:
    """ψ_y(x) + λ(y) = 0 по вещественному базису J, разложенные на 4 компоненты."""
    if isinstance(source, FilteredQuotient):
        alg, grade, gens, deformation = source.parent, source.generator_grade, source.generators, source.deformation
    else:
        ideal = source.ideal
        alg, grade, gens, deformation = source.parent, ideal.generator_grade, ideal.generators, None
    if alg.degree(grade) != 2:
        raise UsageError(f"Уравнения строятся только для образующих многочленной степени 2, получена степень {grade}")
    d = alg.gen.dagger.dim
    chart = chart or identity_chart(d)
    layout = alg.layout(grade)
    forms = []
    for row in gens.rows:
        constant = deformation(row) if deformation is not None else ZERO
        forms.append((poly_from_vec(row, layout), constant))
    return _build_system(forms, d, chart)


def _point(point: Sequence[Any]) -> List[Rational]:
    return [to_rational(c) for c in point]


def evaluate(poly: RealPoly, point: Sequence[Rational]) -> Rational:
    acc = ZERO_Q
    for mono, c in poly.items():
        value = c
        for i in mono:
            value *= point[i]
        acc += value
    return acc


def membership(system: QuadraticSystem, point: Sequence[Any]) -> bool:
    z = _point(point)
    if len(z) != system.n_vars:
        raise UsageError(f"Точка должна иметь {system.n_vars} координат, получено {len(z)}")
    return all(not evaluate(p, z) for p in system.polynomials())


def _gradient(poly: RealPoly, point: Sequence[Rational]) -> SparseVec:
    grad: SparseVec = {}
    for mono, c in poly.items():
        for pos, i in enumerate(mono):
            value = c
            for other_pos, j in enumerate(mono):
                if other_pos != pos:
                    value *= point[j]
            if value:
                grad[i] = grad.get(i, ZERO_Q) + value
    return {k: v for k, v in grad.items() if v}


def jacobian_rows(system: QuadraticSystem, point: Sequence[Any]) -> List[SparseVec]:
    z = _point(point)
    return [_gradient(p, z) for p in system.polynomials()]


def jacobian_rank(system: QuadraticSystem, point: Sequence[Any]) -> int:
    rows = jacobian_rows(system, point)
    return rank(sparse_matrix(rows, system.n_vars)) if rows else 0


def tangent_space(system: QuadraticSystem, point: Sequence[Any]) -> Subspace:
    """Ядро матрицы Якоби в точке."""
    rows = jacobian_rows(system, point)
    if not any(rows):
        return span([{i: ONE_Q} for i in range(system.n_vars)], system.n_vars)
    null = sparse_matrix(rows, system.n_vars).nullspace()
    return span([dict(r) for r in null.to_dod().values()], system.n_vars)


def reconstruction_rank(alg: GradedAlgebra, system: QuadraticSystem, point: Sequence[Any]) -> int:
    """dim V_m: дифференциалы линейных функций ψ_q (q из образующих) на касательном пространстве."""
    tangent = tangent_space(system, point)
    gens = alg.grades[alg.weight]
    layout = alg.layout(alg.weight)
    chart = system.chart
    directions = []
    for t in tangent.rows:
        x = [ZERO_Q] * system.gen_dual_dim
        for z, coef in t.items():
            for c, v in enumerate(chart[z]):
                if v:
                    x[c] += coef * v
        directions.append(x)
    rows = []
    for q in gens.subspace.rows:
        poly = poly_from_vec(q, layout)
        vec: SparseVec = {}
        for i, x in enumerate(directions):
            put_slot(vec, i, eval_poly(poly, x))
        rows.append(vec)
    return rank(sparse_matrix(rows, 4 * len(directions))) if directions else 0


def _check_rotation(rotation: Sequence[Sequence[Any]]) -> sp.Matrix:
    r = sp.Matrix([[sp.Rational(str(to_rational(c))) for c in row] for row in rotation])
    if r.shape != (3, 3) or r.T * r != sp.eye(3) or r.det() != 1:
        raise InvariantViolationError('Ожидалась рациональная матрица из SO(3)')
    return r


def rotation_from_quadruple(a: int, b: int, c: int, d: int) -> Tuple[Tuple[Rational, ...], ...]:
    """Матрица x ↦ q x q̄/|q|² для q = a + b i1 + c i2 + d i3."""
    q = Quaternion(a, b, c, d)
    if q.is_zero():
        raise InvariantViolationError('Нулевой кватернион не задаёт поворот')
    inv = q.inverse()
    images = [q * e * inv for e in (Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1))]
    return tuple(tuple(images[col].components()[row + 1] for col in range(3)) for row in range(3))


def rotate_point(rotation: Sequence[Sequence[Any]], point: Sequence[Any]) -> List[Rational]:
    """v_k ↦ R v_k для каждого из трёх векторов репера."""
    z = _point(point)
    r = [[to_rational(c) for c in row] for row in rotation]
    out = []
    for k in range(3):
        v = z[3 * k:3 * k + 3]
        out.extend(sum((r[g][h] * v[h] for h in range(3)), ZERO_Q) for g in range(3))
    return out


def so3_action_check(system: QuadraticSystem, rotation: Sequence[Sequence[Any]],
                     point: Optional[Sequence[Any]] = None) -> bool:
    """Инвариантность системы при v_k ↦ R v_k (и сохранение принадлежности точки)."""
    _check_rotation(rotation)
    if system.n_vars != 9:
        raise UsageError('Действие SO(3) определено для карты реперов из 9 координат')
    r = [[to_rational(c) for c in row] for row in rotation]
    # z[3k+g] ↦ Σ_h R[g][h] z[3k+h]
    linear = {3 * k + g: [(3 * k + h, r[g][h]) for h in range(3) if r[g][h]] for k in range(3) for g in range(3)}
    rotated = []
    for poly in system.polynomials():
        out: RealPoly = {}
        for mono, c in poly.items():
            for choice in itertools.product(*(linear[i] for i in mono)):
                coef = c
                for _, v in choice:
                    coef *= v
                key = tuple(sorted(i for i, _ in choice))
                out[key] = out.get(key, ZERO_Q) + coef
        rotated.append(out)
    invariant = real_system(rotated, system.n_vars) == system.real_equations
    if point is not None and membership(system, point):
        return invariant and membership(system, rotate_point(rotation, point))
    return invariant


def random_rotation(rng: np.random.Generator) -> Tuple[Tuple[Rational, ...], ...]:
    while True:
        quad = [int(x) for x in rng.integers(-RANDOM_ENTRY_BOUND, RANDOM_ENTRY_BOUND + 1, size=4)]
        if any(quad):
            return rotation_from_quadruple(*quad)


@dataclass(frozen=True)
class OrbitSample:
    point: Tuple[Rational, ...]
    member: bool
    jacobian_rank: int
    orientation: int


def orientation(point: Sequence[Any]) -> int:
    z = _point(point)
    det = sp.Matrix(3, 3, [sp.Rational(str(c)) for c in z]).det()
    return int(sp.sign(det))


def orbit_samples(system: QuadraticSystem, base_point: Sequence[Any], count: int,
                  seed: int = DEFAULT_SEED) -> List[OrbitSample]:
    """Случайные рациональные повороты базовой точки: принадлежность и ранг Якоби."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        p = rotate_point(random_rotation(rng), base_point)
        out.append(OrbitSample(tuple(p), membership(system, p), jacobian_rank(system, p), orientation(p)))
    return out


# ---- Эгучи–Хансон ----

@lru_cache(maxsize=None)
def frame_chart() -> Chart:
    """F[k][c]: проекция (q1,q2,q3) ↦ q_{k+1} в базисе Y† (строки RREF)."""
    pres = y_presentation()
    y = pres.module
    rows = pres.basis.to_dod()
    gens = [dict(rows.get(4 * j, {})) for j in range(y.n)]
    chart = []
    for k in range(3):
        alpha: SparseVec = {}
        for j, w in enumerate(gens):
            put_slot(alpha, j, slot(w, k))
        chart.append(tuple(y.dagger.coordinates(alpha)))
    return tuple(chart)


@lru_cache(maxsize=None)
def eh_generator() -> AHModule:
    y = y_module()
    return direct_sum_many([y, y, y], 'R³⊗Y')


def eh_chart() -> Chart:
    """z[3k+g] ↦ x[3g+c] с коэффициентом F[k][c]."""
    f = frame_chart()
    chart = [[ZERO_Q] * 9 for _ in range(9)]
    for k in range(3):
        for g in range(3):
            for c in range(3):
                chart[3 * k + g][3 * g + c] = f[k][c]
    return tuple(tuple(row) for row in chart)


def eh_algebra(truncation: int = 4, budget: int = DEFAULT_BUDGET) -> GradedAlgebra:
    return GradedAlgebra(eh_generator(), truncation, EH_WEIGHT, budget, name='F^{R³⊗Y}')


def eh_generators(alg: GradedAlgebra) -> Subspace:
    """J = ⟨h⟩⊗S²_H Y: многочлены Σ_g b(x_g) для b ∈ S²_H Y."""
    s2y = sym_power(y_module(), 2, alg.budget)
    source = s2y.layout
    target = alg.layout(EH_GENERATOR_GRADE)
    rows = []
    for b in s2y.subspace.rows:
        vec: SparseVec = {}
        for key, val in b.items():
            cell, h = divmod(key, 4)
            (mono,) = source.monomials[cell]
            for g in range(3):
                shifted = tuple(3 * g + c for c in mono)
                vec[4 * target.index[(shifted,)] + h] = val
        rows.append(vec)
    return span(rows, target.coord_dim)


LambdaMatrix = Tuple[Tuple[Rational, ...], ...]


def lambda_from_params(a11: Any, a22: Any, a12: Any, a23: Any, a31: Any) -> LambdaMatrix:
    a11, a22, a12, a23, a31 = (to_rational(c) for c in (a11, a22, a12, a23, a31))
    a33 = -a11 - a22
    return ((a11, a12, a31), (a12, a22, a23), (a31, a23, a33))


def check_lambda(lam: Sequence[Sequence[Any]]) -> LambdaMatrix:
    m = tuple(tuple(to_rational(c) for c in row) for row in lam)
    if len(m) != 3 or any(len(row) != 3 for row in m):
        raise InvariantViolationError('λ задаётся матрицей 3×3')
    if any(m[i][j] != m[j][i] for i in range(3) for j in range(3)):
        raise InvariantViolationError('Матрица λ должна быть симметричной')
    if m[0][0] + m[1][1] + m[2][2]:
        raise InvariantViolationError('След матрицы λ должен быть нулевым')
    return m


def classify_lambda(lam: Sequence[Sequence[Any]]) -> int:
    """1: λ = 0; 2: кратное младшее собственное значение; 3: остальное."""
    m = check_lambda(lam)
    if not any(any(row) for row in m):
        return 1
    matrix = sp.Matrix([[sp.Rational(str(c)) for c in row] for row in m])
    x = sp.Symbol('x')
    p = matrix.charpoly(x).as_expr()
    g = sp.Poly(sp.gcd(p, sp.diff(p, x)), x)
    if g.degree() < 1:
        return 3
    double = sp.solve(g.as_expr(), x)[0]
    return 2 if double < 0 else 3


def frame_coefficients(vec: SparseVec, layout: TensorLayout) -> Dict[Tuple[int, int], Quaternion]:
    """s_kl: ψ(v) = Σ_kl s_kl v_k·v_l, считанные по первому сомножителю R³."""
    poly = substitute(poly_from_vec(vec, layout), eh_chart())
    out = {}
    for k in range(3):
        for l in range(k, 3):
            q = poly.get(tuple(sorted((3 * k, 3 * l))), ZERO)
            out[(k, l)] = q if k == l else q * QQ(1, 2)
    return out


def lambda_deformation(lam: LambdaMatrix, layout: TensorLayout):
    """λ(y) = −Σ_kl s_kl(y)·a_kl как H-значная функция координат степени 4."""
    def deform(vec: SparseVec) -> Quaternion:
        s = frame_coefficients(vec, layout)
        acc = ZERO
        for (k, l), q in s.items():
            weight = lam[k][l] if k == l else 2 * lam[k][l]
            if weight:
                acc = acc - q * weight
        return acc
    return deform


def _frame_dot(k: int, l: int) -> RealPoly:
    return {tuple(sorted((3 * k + g, 3 * l + g))): ONE_Q for g in range(3)}


def frame_equations(lam: Sequence[Sequence[Any]]) -> QuadraticSystem:
    """Gram(v) − λ ∝ I в карте реперов: v_k·v_l = a_kl (k ≠ l), |v_k|² − a_kk одинаковы."""
    m = check_lambda(lam)
    polys: List[RealPoly] = []
    for k, l in ((0, 1), (1, 2), (0, 2)):
        poly = _frame_dot(k, l)
        poly[()] = -m[k][l]
        polys.append(poly)
    for k in (0, 1):
        poly = _frame_dot(k, k)
        for mono, c in _frame_dot(k + 1, k + 1).items():
            poly[mono] = poly.get(mono, ZERO_Q) - c
        poly[()] = m[k + 1][k + 1] - m[k][k]
        polys.append(poly)
    return QuadraticSystem(9, eh_chart(), (), real_system(polys, 9))


@dataclass(eq=False)
class EHFamily:
    lam: LambdaMatrix
    case: int
    algebra: GradedAlgebra
    generators: Subspace
    filtered: FilteredQuotient
    system: QuadraticSystem

    @cached_property
    def graded(self) -> QuotientAlgebra:
        return associated_graded(self.filtered)

    def lambda_on_prime(self) -> bool:
        """λ ∈ J†: Re λ(y) = 0 на J′."""
        prime = intersect(self.generators, self.algebra.grades[EH_GENERATOR_GRADE].prime_subspace)
        deform = self.filtered.deformation
        return all(not deform(r).r0 for r in prime.rows)

    def filtered_dims(self) -> Dict[int, Tuple[int, int, int]]:
        return self.filtered.level_dims()

    def leading_dims(self) -> Dict[int, int]:
        return {g: self.filtered.leading(g).dim for g in self.algebra.grade_indices}

    def membership(self, point: Sequence[Any]) -> bool:
        return membership(self.system, point)

    def jacobian_rank(self, point: Sequence[Any]) -> int:
        return jacobian_rank(self.system, point)

    def reconstruction_rank(self, point: Sequence[Any]) -> int:
        return reconstruction_rank(self.algebra, self.system, point)


def eh_family(lam: Sequence[Sequence[Any]], truncation: int = 4, budget: int = DEFAULT_BUDGET) -> EHFamily:
    m = check_lambda(lam)
    alg = eh_algebra(truncation, budget)
    gens = eh_generators(alg)
    deform = lambda_deformation(m, alg.layout(EH_GENERATOR_GRADE))
    filtered = FilteredQuotient(alg, EH_GENERATOR_GRADE, gens, deform)
    system = emit_equations(filtered, eh_chart())
    family = EHFamily(m, classify_lambda(m), alg, gens, filtered, system)
    if not family.lambda_on_prime():
        raise InvariantViolationError('λ не лежит в J†')
    LOGGER.info(f"Семейство Эгучи–Хансона: случай {family.case}, уравнений {len(system)}")
    return family
